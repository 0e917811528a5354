"""Placement: transistor rows, gate rows, and wirelength-driven ordering.

Transistor-level netlists become two abutted rows, NMOS at y = 0 in R0
and PMOS mirrored (MX) above it across a configurable gap, with
complementary pairs sharing a column so their gates line up.  Gate-level
netlists become a single abutted row of GATE_CELL templates.

The ordering objective is half-perimeter wirelength over signal nets.
Orders with at most 8 free items are solved exactly by lexicographic
exhaustive search; larger ones use greedy insertion followed by
pairwise-swap hill climbing, with the baseline order kept as a floor so
the result is never worse than the input.  All ties resolve to the
lexicographically smaller name sequence, which keeps results stable
across runs and kernel backends.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping, Sequence

from ..errors import (
    BadPermutation,
    ConstraintConflict,
    NotGateLevel,
    UnresolvedPin,
)
from ..layout import LayoutDb, empty_db, place_instance
from ..netlist import Device, DeviceKind, Netlist, complementary_pairs
from ..tech import GATE_CELL, NMOS_UNIT, PMOS_UNIT, Technology, Template, orient_point
from . import _kernels
from .rowmodel import RowModel, build_model


class OrderMethod(enum.Enum):
    EXHAUSTIVE = "EXHAUSTIVE"
    GREEDY_SWAP = "GREEDY_SWAP"


EXHAUSTIVE_LIMIT = 8


@dataclass(frozen=True)
class PlacementConstraints:
    fixed_left: tuple[str, ...] = ()
    fixed_right: tuple[str, ...] = ()


@dataclass(frozen=True)
class OrderResult:
    order: tuple[str, ...]
    hpwl_before: int
    hpwl_after: int
    method: OrderMethod


# --- wirelength over an explicit placement -----------------------------------


def device_template(netlist: Netlist, tech: Technology, dev: Device) -> Template:
    if dev.kind is DeviceKind.PMOS:
        return tech.unit_template(PMOS_UNIT)
    if dev.kind is DeviceKind.NMOS:
        return tech.unit_template(NMOS_UNIT)
    tmpl = tech.templates.get(dev.model)
    if tmpl is None:
        raise UnresolvedPin(f"{dev.name}: no template named {dev.model}")
    return tmpl


def bound_pins(dev: Device, tmpl: Template) -> list[tuple[str, str]]:
    """(pin, net) for every template pin, matched case-insensitively
    against the device terminals."""
    terms = {t.casefold(): net for t, net in dev.terminals}
    out = []
    for pin in tmpl.pins:
        net = terms.get(pin.casefold())
        if net is None:
            raise UnresolvedPin(
                f"{dev.name}: template {tmpl.name} pin {pin} has no matching terminal")
        out.append((pin, net))
    return out


def hpwl(netlist: Netlist, tech: Technology,
         placement: Mapping[str, tuple[tuple[int, int], str]]) -> int:
    """Half-perimeter wirelength over signal nets.

    placement maps device name to (origin, orient).  The first access
    point of each template pin stands in for the pin.  Supply nets are
    excluded; nets with fewer than two access points contribute zero.
    """
    points: dict[str, list[tuple[int, int]]] = {}
    for name, (origin, orient) in placement.items():
        dev = netlist.device(name)
        if dev is None:
            raise UnresolvedPin(f"no device named {name} in {netlist.name}")
        tmpl = device_template(netlist, tech, dev)
        for pin, net in bound_pins(dev, tmpl):
            if netlist.is_supply(net):
                continue
            layer, dx, dy = tmpl.pins[pin][0]
            x, y = orient_point(dx, dy, tmpl.width, tmpl.height, orient)
            points.setdefault(net, []).append((origin[0] + x, origin[1] + y))
    total = 0
    for pts in points.values():
        if len(pts) < 2:
            continue
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        total += (max(xs) - min(xs)) + (max(ys) - min(ys))
    return total


# --- gate rows ----------------------------------------------------------------


def _gate_devices(netlist: Netlist) -> list[Device]:
    for dev in netlist.devices:
        if dev.kind is not DeviceKind.SUBCKT:
            raise NotGateLevel(f"{netlist.name} contains transistor {dev.name}")
    return list(netlist.devices)


def _gate_items(netlist: Netlist, tech: Technology) -> list[tuple[str, int, list[tuple[str, int, int]]]]:
    items = []
    for dev in _gate_devices(netlist):
        tmpl = device_template(netlist, tech, dev)
        pins = []
        for pin, net in bound_pins(dev, tmpl):
            if netlist.is_supply(net):
                continue
            _, dx, dy = tmpl.pins[pin][0]
            pins.append((net, dx, dy))
        items.append((dev.name, tmpl.width, pins))
    return items


def place_gate_row(netlist: Netlist, tech: Technology,
                   order: Sequence[str]) -> LayoutDb:
    """Abut gate cells left to right at y = 0 in the given order.

    order must be a permutation of the netlist's device names
    (case-insensitive); an empty netlist with an empty order yields an
    empty database.
    """
    devices = _gate_devices(netlist)
    canonical = {d.name.casefold(): d for d in devices}
    seen: set[str] = set()
    resolved: list[Device] = []
    for name in order:
        dev = canonical.get(name.casefold())
        if dev is None:
            raise BadPermutation(f"{name} is not a device of {netlist.name}")
        if dev.name in seen:
            raise BadPermutation(f"{name} appears twice in the order")
        seen.add(dev.name)
        resolved.append(dev)
    if len(resolved) != len(devices):
        missing = sorted(d.name for d in devices if d.name not in seen)
        raise BadPermutation(f"order is missing {missing[0]}")

    db = empty_db(tech, netlist.name)
    x = 0
    for dev in resolved:
        tmpl = device_template(netlist, tech, dev)
        pin_nets = dict(bound_pins(dev, tmpl))
        db = place_instance(db, tech, dev.name, tmpl.name, (x, 0), "R0", pin_nets)
        x += tmpl.width
    return db


# --- transistor rows -----------------------------------------------------------


def place_transistor_rows(netlist: Netlist, tech: Technology,
                          constraints: PlacementConstraints | None = None) -> LayoutDb:
    """Two-row placement of a transistor-level netlist.

    Complementary pairs occupy shared columns ordered by the wirelength
    optimizer (a pair is named by its PMOS for constraint matching and
    tie-breaking); unpaired devices are appended at the right end of
    their row in netlist order.  Constraints may name either member of
    a pair.
    """
    pairs, unpaired = complementary_pairs(netlist)
    pmos_tmpl = tech.unit_template(PMOS_UNIT)
    nmos_tmpl = tech.unit_template(NMOS_UNIT)
    pmos_y = nmos_tmpl.height + tech.row_gap

    member: dict[str, str] = {}  # device name -> pair item name (the PMOS name)
    items = []
    for p_name, n_name in pairs:
        member[p_name] = p_name
        member[n_name] = p_name
        p_dev = netlist.device(p_name)
        n_dev = netlist.device(n_name)
        width = max(pmos_tmpl.width, nmos_tmpl.width)
        pins: list[tuple[str, int, int]] = []
        for pin, net in bound_pins(n_dev, nmos_tmpl):
            if netlist.is_supply(net):
                continue
            _, dx, dy = nmos_tmpl.pins[pin][0]
            pins.append((net, dx, dy))
        for pin, net in bound_pins(p_dev, pmos_tmpl):
            if netlist.is_supply(net):
                continue
            _, dx, dy = pmos_tmpl.pins[pin][0]
            x, y = orient_point(dx, dy, pmos_tmpl.width, pmos_tmpl.height, "MX")
            pins.append((net, x, pmos_y + y))
        items.append((p_name, width, pins))

    fixed_left, fixed_right = _resolve_constraints(constraints, member, netlist)
    order, _, _, _ = _optimize_model(build_model(items), fixed_left, fixed_right,
                                     [name for name, _, _ in items])

    db = empty_db(tech, netlist.name)
    by_pmos = dict(pairs)
    x = 0
    width = max(pmos_tmpl.width, nmos_tmpl.width)
    for p_name in order:
        n_name = by_pmos[p_name]
        db = _place_unit(db, netlist, tech, n_name, nmos_tmpl, (x, 0), "R0")
        db = _place_unit(db, netlist, tech, p_name, pmos_tmpl, (x, pmos_y), "MX")
        x += width
    nmos_x = pmos_x = x
    for name in unpaired:
        dev = netlist.device(name)
        if dev.kind is DeviceKind.PMOS:
            db = _place_unit(db, netlist, tech, name, pmos_tmpl, (pmos_x, pmos_y), "MX")
            pmos_x += pmos_tmpl.width
        else:
            db = _place_unit(db, netlist, tech, name, nmos_tmpl, (nmos_x, 0), "R0")
            nmos_x += nmos_tmpl.width
    return db


def _place_unit(db: LayoutDb, netlist: Netlist, tech: Technology, name: str,
                tmpl: Template, origin: tuple[int, int], orient: str) -> LayoutDb:
    dev = netlist.device(name)
    pin_nets = dict(bound_pins(dev, tmpl))
    return place_instance(db, tech, name, tmpl.name, origin, orient, pin_nets)


def _resolve_constraints(constraints: PlacementConstraints | None,
                         member: dict[str, str],
                         netlist: Netlist) -> tuple[list[str], list[str]]:
    if constraints is None:
        return [], []
    fixed_left: list[str] = []
    fixed_right: list[str] = []
    assigned: dict[str, str] = {}
    for side, requested, out in (("left", constraints.fixed_left, fixed_left),
                                 ("right", constraints.fixed_right, fixed_right)):
        for name in requested:
            dev = netlist.device(name)
            if dev is None:
                raise ConstraintConflict(f"constraint names unknown device {name}")
            item = member.get(dev.name)
            if item is None:
                raise ConstraintConflict(
                    f"{name} is unpaired and cannot be order-constrained")
            if item in assigned:
                if assigned[item] != side:
                    raise ConstraintConflict(
                        f"{name} is fixed to both ends via pair {item}")
                continue
            assigned[item] = side
            out.append(item)
    return fixed_left, fixed_right


# --- ordering -------------------------------------------------------------------


def _partial_x(model: RowModel, seq: Sequence[int]) -> int:
    """Horizontal wirelength counting only the items present in seq."""
    pos: dict[int, int] = {}
    x = 0
    for item in seq:
        pos[item] = x
        x += model.widths[item]
    lo: dict[int, int] = {}
    hi: dict[int, int] = {}
    for i in range(len(model.pin_item)):
        item = model.pin_item[i]
        if item not in pos:
            continue
        px = pos[item] + model.pin_dx[i]
        net = model.pin_net[i]
        if net not in lo:
            lo[net] = hi[net] = px
        else:
            lo[net] = min(lo[net], px)
            hi[net] = max(hi[net], px)
    return sum(hi[n] - lo[n] for n in lo)


def _optimize_model(model: RowModel, fixed_left: list[str], fixed_right: list[str],
                    input_order: list[str]) -> tuple[list[str], int, int, OrderMethod]:
    """Shared ordering engine; returns (order, before, after, method)."""
    ids = {name: i for i, name in enumerate(model.names)}
    left = [ids[n] for n in fixed_left]
    right = [ids[n] for n in fixed_right]
    fixed = set(left) | set(right)
    free = sorted(i for i in range(len(model.names)) if i not in fixed)

    baseline = left + [ids[n] for n in input_order if ids[n] not in fixed] + right
    before = _kernels.hpwl_x(model.widths, model.pin_item, model.pin_dx,
                             model.pin_net, model.n_nets, baseline)

    if len(free) <= EXHAUSTIVE_LIMIT:
        best, after = _kernels.exhaustive_search(
            model.widths, model.pin_item, model.pin_dx, model.pin_net,
            model.n_nets, left, free, right)
        order = list(best)
        method = OrderMethod.EXHAUSTIVE
    else:
        order, after = _greedy_swap(model, left, free, right)
        # the heuristic must never lose to the ordering it was given
        if (before, _names(model, baseline)) < (after, _names(model, order)):
            order, after = baseline, before
        method = OrderMethod.GREEDY_SWAP
    return [model.names[i] for i in order], before + model.y_const, \
        after + model.y_const, method


def _names(model: RowModel, order: Sequence[int]) -> tuple[str, ...]:
    return tuple(model.names[i] for i in order)


def _greedy_insert(model: RowModel, insert_seq: list[int], left: list[int],
                   right: list[int]) -> list[int]:
    """Insert items one at a time, each at its cheapest position so far."""
    seq: list[int] = []
    for item in insert_seq:
        best = None
        for pos in range(len(seq) + 1):
            cand = seq[:pos] + [item] + seq[pos:]
            cost = _partial_x(model, left + cand + right)
            key = (cost, _names(model, cand))
            if best is None or key < best[0]:
                best = (key, cand)
        seq = best[1]
    return left + seq + right


def _descend(model: RowModel, order: list[int], lo: int, hi: int) -> tuple[list[int], int]:
    """Best-improvement hill climb over swaps and relocations to a fixpoint."""
    cost = _kernels.hpwl_x(model.widths, model.pin_item, model.pin_dx,
                           model.pin_net, model.n_nets, order)
    improved = True
    while improved:
        improved = False
        best = None
        for cand in _neighbors(order, lo, hi):
            c = _kernels.hpwl_x(model.widths, model.pin_item, model.pin_dx,
                                model.pin_net, model.n_nets, cand)
            key = (c, _names(model, cand))
            if best is None or key < best[0]:
                best = (key, cand)
        if best is not None and best[0][0] < cost:
            order = best[1]
            cost = best[0][0]
            improved = True
    return order, cost


def _neighbors(order: list[int], lo: int, hi: int):
    """Pairwise swaps and single-item relocations of the free window."""
    for i in range(lo, hi):
        for j in range(i + 1, hi):
            cand = list(order)
            cand[i], cand[j] = cand[j], cand[i]
            yield cand
    for i in range(lo, hi):
        rest = order[:i] + order[i + 1:]
        for j in range(lo, hi):
            if j == i:
                continue
            yield rest[:j] + [order[i]] + rest[j:]


def _greedy_swap(model: RowModel, left: list[int], free: list[int],
                 right: list[int]) -> tuple[list[int], int]:
    """Multi-start construction plus local search; fully deterministic.

    One greedy insertion run per rotation of the name-sorted free list,
    each polished by hill climbing; the best (cost, names) result wins,
    so ties always land on the same order.
    """
    lo = len(left)
    best = None
    for r in range(len(free)):
        rotated = free[r:] + free[:r]
        order = _greedy_insert(model, rotated, left, right)
        order, cost = _descend(model, order, lo, lo + len(free))
        key = (cost, _names(model, order))
        if best is None or key < best[0]:
            best = (key, order)
    return best[1], best[0][0]


def optimize_order(netlist: Netlist, tech: Technology,
                   constraints: PlacementConstraints | None = None) -> OrderResult:
    """Choose a gate order minimizing HPWL, subject to end constraints.

    hpwl_before is the wirelength of the baseline: the netlist order
    with fixed items pulled to their slots.  hpwl_after is our result
    and is never larger.  Exact search runs when at most 8 items are
    free; otherwise greedy insertion plus swap hill climbing.
    """
    devices = _gate_devices(netlist)
    items = _gate_items(netlist, tech)
    model = build_model(items)

    member = {d.name: d.name for d in devices}
    fixed_left, fixed_right = _resolve_constraints(constraints, member, netlist)

    input_order = [d.name for d in devices]
    order, before, after, method = _optimize_model(model, fixed_left, fixed_right,
                                                   input_order)
    return OrderResult(tuple(order), before, after, method)
