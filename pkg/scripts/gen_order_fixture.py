"""Regenerate tests/data/order_n10_optima.json.

Solves random ten-item row-ordering cases exactly (10! permutations per
case) with the compiled search kernel and stores the optima, so the
test suite can check the greedy path against known-exact answers
without ever enumerating 3.6M permutations itself.

The generator first cross-checks the kernel on small cases against a
plain itertools oracle written here, independent of the package
internals.  Run from the repository root:

    python3 scripts/gen_order_fixture.py
"""

from __future__ import annotations

import itertools
import json
import random
from pathlib import Path

from cellgrid.place import _kernels
from cellgrid.place.rowmodel import build_model

SEED = 20260819
N_CASES = 24
N_ITEMS = 10
OUT = Path(__file__).resolve().parent.parent / "tests" / "data" / "order_n10_optima.json"


def random_items(rng: random.Random, n: int):
    """Row items (name, width, pins) with every net used twice or more."""
    names = [f"C{i:02d}" for i in range(n)]
    widths = {name: rng.randint(2, 6) for name in names}
    n_nets = max(2, round(n * 1.2))
    nets = [f"N{i:02d}" for i in range(n_nets)]
    pins: dict[str, list[tuple[str, int, int]]] = {name: [] for name in names}
    # two pins per net keeps every net able to stretch
    for net in nets:
        for name in rng.sample(names, 2):
            pins[name].append((net, rng.randint(0, widths[name]), rng.randint(0, 6)))
    # sprinkle extras
    for _ in range(n):
        name = rng.choice(names)
        pins[name].append((rng.choice(nets), rng.randint(0, widths[name]),
                           rng.randint(0, 6)))
    return [(name, widths[name], pins[name]) for name in names]


def oracle(items):
    """Brute force: first strictly better order in name-lex order wins."""
    names = sorted(name for name, _, _ in items)
    by_name = {name: (width, pins) for name, width, pins in items}
    best_order = None
    best_cost = None
    for perm in itertools.permutations(names):
        x = 0
        spans: dict[str, list[int]] = {}
        for name in perm:
            width, pins = by_name[name]
            for net, dx, dy in pins:
                spans.setdefault(net, [x + dx, x + dx, dy, dy])
                s = spans[net]
                s[0] = min(s[0], x + dx)
                s[1] = max(s[1], x + dx)
                s[2] = min(s[2], dy)
                s[3] = max(s[3], dy)
            x += width
        cost = sum(s[1] - s[0] + s[3] - s[2] for s in spans.values())
        if best_cost is None or cost < best_cost:
            best_cost = cost
            best_order = perm
    return list(best_order), best_cost


def kernel_solve(items):
    model = build_model(items)
    free = list(range(len(model.names)))
    order, cost = _kernels.exhaustive_search(
        model.widths, model.pin_item, model.pin_dx, model.pin_net,
        model.n_nets, [], free, [])
    return [model.names[i] for i in order], cost + model.y_const


def main():
    if _kernels.BACKEND != "cython":
        print("warning: compiled kernel unavailable; this will be slow")
    rng = random.Random(SEED)
    for check in range(6):
        items = random_items(rng, rng.randint(4, 7))
        want = oracle(items)
        got = kernel_solve(items)
        assert got == tuple(want) or list(got) == list(want), (check, want, got)
    print("kernel cross-check ok")

    cases = []
    for i in range(N_CASES):
        items = random_items(rng, N_ITEMS)
        order, cost = kernel_solve(items)
        cases.append({
            "items": [[name, width, [list(p) for p in pins]]
                      for name, width, pins in items],
            "optimum_order": order,
            "optimum_cost": cost,
        })
        print(f"case {i}: optimum {cost}")
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps({"seed": SEED, "cases": cases}, indent=2,
                              sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {OUT} ({len(cases)} cases)")


if __name__ == "__main__":
    main()
