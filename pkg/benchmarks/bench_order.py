"""Compare the compiled ordering kernel against its pure-Python twin.

Times the two hot operations behind optimize_order: single-order
wirelength evaluation (hpwl_x, the inner loop of the greedy passes)
and full permutation search (exhaustive_search, the n <= 8 path).
Both backends run the same inputs; results report per-call time and
speedup.  Run from the repository root:

    python3 benchmarks/bench_order.py [--quick]
"""

from __future__ import annotations

import argparse
import random
import time

from cellgrid.place import _kernels
from cellgrid.place._kernels import _order_py
from cellgrid.place.rowmodel import build_model


def random_items(rng: random.Random, n: int):
    """Same shape of row items the optimizer sees in gate-level designs."""
    names = [f"C{i:02d}" for i in range(n)]
    widths = {name: rng.randint(2, 6) for name in names}
    nets = [f"N{i:02d}" for i in range(max(2, round(n * 1.2)))]
    pins: dict[str, list[tuple[str, int, int]]] = {name: [] for name in names}
    for net in nets:
        for name in rng.sample(names, 2):
            pins[name].append((net, rng.randint(0, widths[name]), rng.randint(0, 6)))
    for _ in range(n):
        name = rng.choice(names)
        pins[name].append((rng.choice(nets), rng.randint(0, widths[name]),
                           rng.randint(0, 6)))
    return [(name, widths[name], pins[name]) for name in names]


def bench(fn, repeat: int) -> float:
    """Best-of-three wall time for `repeat` calls of fn, in seconds."""
    best = None
    for _ in range(3):
        start = time.perf_counter()
        for _ in range(repeat):
            fn()
        elapsed = time.perf_counter() - start
        if best is None or elapsed < best:
            best = elapsed
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--quick", action="store_true",
                        help="smaller workloads for a fast smoke run")
    args = parser.parse_args()

    if _kernels.BACKEND != "cython":
        print("note: compiled extension not built; timing the pure-Python "
              "kernel against itself")
    compiled = _kernels
    fallback = _order_py

    rng = random.Random(7)
    rows = []

    # hpwl_x: many evaluations of shuffled orders on a mid-size row
    model = build_model(random_items(rng, 12))
    orders = []
    base = list(range(12))
    for _ in range(64):
        rng.shuffle(base)
        orders.append(tuple(base))
    evals = 2_000 if args.quick else 20_000

    def eval_orders(impl):
        def run():
            for order in orders:
                impl.hpwl_x(model.widths, model.pin_item, model.pin_dx,
                            model.pin_net, model.n_nets, order)
        return run

    sanity = [compiled.hpwl_x(model.widths, model.pin_item, model.pin_dx,
                              model.pin_net, model.n_nets, o) for o in orders]
    check = [fallback.hpwl_x(model.widths, model.pin_item, model.pin_dx,
                             model.pin_net, model.n_nets, o) for o in orders]
    assert sanity == check, "backends disagree on hpwl_x"

    t_c = bench(eval_orders(compiled), evals // 64)
    t_p = bench(eval_orders(fallback), evals // 64)
    rows.append(("hpwl_x, 12 items", evals, t_c, t_p))

    # exhaustive_search: full 8! sweep, the largest exact case
    n = 7 if args.quick else 8
    model = build_model(random_items(rng, n))
    free = list(range(n))

    def search(impl):
        def run():
            impl.exhaustive_search(model.widths, model.pin_item, model.pin_dx,
                                   model.pin_net, model.n_nets, [], free, [])
        return run

    got_c = compiled.exhaustive_search(model.widths, model.pin_item, model.pin_dx,
                                       model.pin_net, model.n_nets, [], free, [])
    got_p = fallback.exhaustive_search(model.widths, model.pin_item, model.pin_dx,
                                       model.pin_net, model.n_nets, [], free, [])
    assert (tuple(got_c[0]), got_c[1]) == (tuple(got_p[0]), got_p[1]), \
        "backends disagree on exhaustive_search"

    reps = 2 if args.quick else 3
    t_c = bench(search(compiled), reps)
    t_p = bench(search(fallback), reps)
    rows.append((f"exhaustive_search, {n}! orders", reps, t_c, t_p))

    print(f"\nactive backend: {_kernels.BACKEND}")
    print(f"{'workload':<30} {'calls':>7} {'compiled':>12} {'python':>12} {'speedup':>9}")
    for label, calls, t_c, t_p in rows:
        print(f"{label:<30} {calls:>7} {t_c:>11.4f}s {t_p:>11.4f}s "
              f"{t_p / t_c:>8.1f}x")


if __name__ == "__main__":
    main()
