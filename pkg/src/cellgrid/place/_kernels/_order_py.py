"""Pure-Python ordering kernel.

Same contract as the compiled twin in _order_cy; kept dependency-free
so the package works without a C toolchain.
"""

from __future__ import annotations

from itertools import permutations
from typing import Sequence


def hpwl_x(widths: Sequence[int], pin_item: Sequence[int], pin_dx: Sequence[int],
           pin_net: Sequence[int], n_nets: int, order: Sequence[int]) -> int:
    """Horizontal half-perimeter wirelength of a left-to-right ordering."""
    pos = [0] * len(widths)
    x = 0
    for item in order:
        pos[item] = x
        x += widths[item]
    minx = [0] * n_nets
    maxx = [0] * n_nets
    seen = [False] * n_nets
    for i in range(len(pin_item)):
        px = pos[pin_item[i]] + pin_dx[i]
        net = pin_net[i]
        if not seen[net]:
            seen[net] = True
            minx[net] = px
            maxx[net] = px
        elif px < minx[net]:
            minx[net] = px
        elif px > maxx[net]:
            maxx[net] = px
    return sum(maxx[n] - minx[n] for n in range(n_nets) if seen[n])


def exhaustive_search(widths: Sequence[int], pin_item: Sequence[int],
                      pin_dx: Sequence[int], pin_net: Sequence[int], n_nets: int,
                      prefix: Sequence[int], free: Sequence[int],
                      suffix: Sequence[int]) -> tuple[tuple[int, ...], int]:
    """Best ordering prefix+perm(free)+suffix by horizontal wirelength.

    free must arrive sorted in the caller's tie-break order; permutations
    are tried lexicographically and only strict improvements are kept,
    so the first optimum in that order wins ties.
    """
    best_cost = None
    best: tuple[int, ...] = ()
    prefix = tuple(prefix)
    suffix = tuple(suffix)
    for perm in permutations(free):
        order = prefix + perm + suffix
        cost = hpwl_x(widths, pin_item, pin_dx, pin_net, n_nets, order)
        if best_cost is None or cost < best_cost:
            best_cost = cost
            best = order
    return best, best_cost
