"""Compact row abstraction shared by the ordering kernels.

A row is a sequence of items (gate cells, or PMOS/NMOS pairs collapsed
into one column) placed left to right at cumulative-width x positions.
Pin y coordinates never depend on the order, so the vertical half of
the wirelength objective is folded into a single constant and the
kernels only evaluate the horizontal half.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class RowModel:
    names: tuple[str, ...]   # item names; item id == index
    widths: tuple[int, ...]
    pin_item: tuple[int, ...]  # parallel arrays, one entry per pin
    pin_dx: tuple[int, ...]    # x offset of the pin inside its item
    pin_net: tuple[int, ...]   # dense net ids
    n_nets: int
    y_const: int               # order-independent vertical wirelength


def build_model(items: list[tuple[str, int, list[tuple[str, int, int]]]],
                signal_net: set[str] | None = None) -> RowModel:
    """items: (name, width, pins) with pins as (net, dx, dy).

    Nets not in signal_net (when given) are ignored.  Net ids are
    assigned in sorted net-name order so equal models are identical.
    Item ids are assigned in sorted item-name order; the kernels walk
    permutations in ascending id order, so id order must agree with the
    name order used for tie-breaking.
    """
    items = sorted(items, key=lambda it: it[0])
    nets: set[str] = set()
    for _, _, pins in items:
        for net, _, _ in pins:
            if signal_net is None or net in signal_net:
                nets.add(net)
    net_id = {net: i for i, net in enumerate(sorted(nets))}

    names: list[str] = []
    widths: list[int] = []
    pin_item: list[int] = []
    pin_dx: list[int] = []
    pin_net: list[int] = []
    ymin: dict[int, int] = {}
    ymax: dict[int, int] = {}
    for idx, (name, width, pins) in enumerate(items):
        names.append(name)
        widths.append(width)
        for net, dx, dy in pins:
            if net not in net_id:
                continue
            nid = net_id[net]
            pin_item.append(idx)
            pin_dx.append(dx)
            pin_net.append(nid)
            ymin[nid] = min(ymin.get(nid, dy), dy)
            ymax[nid] = max(ymax.get(nid, dy), dy)
    y_const = sum(ymax[n] - ymin[n] for n in ymin)
    return RowModel(
        names=tuple(names),
        widths=tuple(widths),
        pin_item=tuple(pin_item),
        pin_dx=tuple(pin_dx),
        pin_net=tuple(pin_net),
        n_nets=len(net_id),
        y_const=y_const,
    )
