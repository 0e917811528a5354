"""Independent reference implementations the tests compare the engine against.

Everything here is written from scratch against documented behavior
rather than by calling into the engine, so each check is two separate
derivations of the same answer.
"""

import random
from itertools import permutations

GATE_STUBS = """\
.SUBCKT INV A ZN
.ENDS
.SUBCKT BUF A Z
.ENDS
.SUBCKT NAND2 A B ZN
.ENDS
.SUBCKT NOR2 A B ZN
.ENDS
"""

GATE_TERMS = {
    "INV": ("A", "ZN"),
    "BUF": ("A", "Z"),
    "NAND2": ("A", "B", "ZN"),
    "NOR2": ("A", "B", "ZN"),
}


def row_hpwl(tech, netlist, order):
    """Half-perimeter wirelength of gates abutted left-to-right at y = 0.

    Uses the first access point of each template pin and skips supply
    nets; computed straight from the tech tables.
    """
    points = {}
    x = 0
    for name in order:
        dev = netlist.device(name)
        tmpl = tech.templates[dev.model]
        terms = {t.casefold(): net for t, net in dev.terminals}
        for pin in tmpl.pins:
            net = terms[pin.casefold()]
            if netlist.is_supply(net):
                continue
            _, dx, dy = tmpl.pins[pin][0]
            points.setdefault(net, []).append((x + dx, dy))
        x += tmpl.width
    total = 0
    for pts in points.values():
        xs = [p for p, _ in pts]
        ys = [q for _, q in pts]
        total += max(xs) - min(xs) + max(ys) - min(ys)
    return total


def best_row_order(tech, netlist, names):
    """Brute force over every permutation, first optimum in name order wins.

    The y extent of every net is fixed by the pin heights alone (gates
    sit at y = 0 whatever the order), so only x spans are recomputed
    per permutation; the y part is added once at the end.
    """
    items = {}
    net_ids = {}
    ys = {}
    for name in sorted(names):
        dev = netlist.device(name)
        tmpl = tech.templates[dev.model]
        terms = {t.casefold(): net for t, net in dev.terminals}
        pins = []
        for pin in tmpl.pins:
            net = terms[pin.casefold()]
            if netlist.is_supply(net):
                continue
            nid = net_ids.setdefault(net, len(net_ids))
            _, dx, dy = tmpl.pins[pin][0]
            pins.append((nid, dx))
            ys.setdefault(nid, []).append(dy)
        items[name] = (tmpl.width, tuple(pins))

    n_nets = len(net_ids)
    y_part = sum(max(v) - min(v) for v in ys.values())
    big = 10 ** 9
    best = None
    best_cost = None
    for perm in permutations(sorted(names)):
        lo = [big] * n_nets
        hi = [-big] * n_nets
        x = 0
        for name in perm:
            width, pins = items[name]
            for nid, dx in pins:
                p = x + dx
                if p < lo[nid]:
                    lo[nid] = p
                if p > hi[nid]:
                    hi[nid] = p
            x += width
        cost = y_part
        for nid in range(n_nets):
            if hi[nid] >= lo[nid]:
                cost += hi[nid] - lo[nid]
        if best_cost is None or cost < best_cost:
            best_cost = cost
            best = perm
    return list(best), best_cost


def random_gate_design(rng: random.Random, n: int) -> tuple[str, list[str]]:
    """SPICE text for a random n-gate design over the bundled gate library."""
    nets = [f"N{i}" for i in range(max(3, n + 2))]
    cards = []
    names = []
    for i in range(n):
        kind = rng.choice(list(GATE_TERMS))
        name = f"X{i + 1}"
        names.append(name)
        wired = [rng.choice(nets) for _ in GATE_TERMS[kind]]
        cards.append(f"{name} {' '.join(wired)} {kind}")
    text = GATE_STUBS + ".SUBCKT TOP " + " ".join(nets) + "\n"
    text += "\n".join(cards) + "\n.ENDS\n"
    return text, names
