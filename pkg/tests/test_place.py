"""Placement: templates, rows, and the ordering optimizer vs brute force."""

import json
import random

import pytest

from cellgrid.errors import (
    BadPermutation,
    ConstraintConflict,
    NotGateLevel,
    NotTransistorLevel,
    UnresolvedPin,
)
from cellgrid.netlist import parse_spice
from cellgrid.place import (
    OrderMethod,
    PlacementConstraints,
    bound_pins,
    device_template,
    hpwl,
    optimize_order,
    place_gate_row,
    place_transistor_rows,
)
from cellgrid.place._kernels import BACKEND, _order_py, exhaustive_search, hpwl_x
from cellgrid.place.rowmodel import build_model

from conftest import CHAIN_SP, DATA, INV_SP
from oracles import best_row_order, random_gate_design, row_hpwl


def gates(text):
    return parse_spice(text)[-1]


def test_device_template_kinds(tech):
    nl = parse_spice(INV_SP)[0]
    assert device_template(nl, tech, nl.device("MP1")).name == "PU"
    assert device_template(nl, tech, nl.device("MN1")).name == "NU"
    chain = gates(CHAIN_SP)
    assert device_template(chain, tech, chain.device("X1")).name == "INV"
    mystery = gates(".SUBCKT T A\nX1 A GHOST\n.ENDS\n")
    with pytest.raises(UnresolvedPin):
        device_template(mystery, tech, mystery.device("X1"))


def test_bound_pins_case_insensitive(tech):
    nl = parse_spice(INV_SP)[0]
    tmpl = device_template(nl, tech, nl.device("MN1"))
    assert bound_pins(nl.device("MN1"), tmpl) == [("S", "VSS"), ("G", "A"), ("D", "ZN")]
    lower = gates(".SUBCKT inv a zn\n.ENDS\n.SUBCKT T x y\nX1 x y inv\n.ENDS\n")
    # template pin A matches terminal a
    tmpl = tech.templates["INV"]
    dev = lower.device("X1")
    with pytest.raises(UnresolvedPin):
        bound_pins(dev, tech.templates["NAND2"])  # no B terminal on an inverter


def test_hpwl_hand_case(tech):
    nl = parse_spice(INV_SP)[0]
    placement = {"MN1": ((0, 0), "R0"), "MP1": ((0, 6), "MX")}
    # A spans (1,4)-(1,6): 2.  ZN spans (2,2)-(2,8): 6.  VDD/VSS excluded.
    assert hpwl(nl, tech, placement) == 8


def test_hpwl_unknown_device(tech):
    nl = parse_spice(INV_SP)[0]
    with pytest.raises(UnresolvedPin):
        hpwl(nl, tech, {"MZZ": ((0, 0), "R0")})


def test_place_gate_row_abuts(tech):
    nl = gates(CHAIN_SP)
    db = place_gate_row(nl, tech, ["X2", "X1", "X3"])
    # BUF and INV are 3 wide
    assert db.instances["X2"].origin == (0, 0)
    assert db.instances["X1"].origin == (3, 0)
    assert db.instances["X3"].origin == (6, 0)
    assert all(i.orient == "R0" for i in db.instances.values())
    assert db.instances["X1"].pin_nets == {"A": "IN", "ZN": "N1"}


def test_place_gate_row_checks_permutation(tech):
    nl = gates(CHAIN_SP)
    with pytest.raises(BadPermutation):
        place_gate_row(nl, tech, ["X1", "X2"])  # X3 missing
    with pytest.raises(BadPermutation):
        place_gate_row(nl, tech, ["X1", "X2", "X2"])
    with pytest.raises(BadPermutation):
        place_gate_row(nl, tech, ["X1", "X2", "X9"])
    with pytest.raises(NotGateLevel):
        place_gate_row(parse_spice(INV_SP)[0], tech, ["MP1", "MN1"])


def test_place_transistor_rows_shape(tech):
    nl = parse_spice(INV_SP)[0]
    db = place_transistor_rows(nl, tech)
    assert db.instances["MN1"].origin == (0, 0)
    assert db.instances["MN1"].orient == "R0"
    # PMOS row sits one gap above the 4-tall NMOS row, mirrored
    assert db.instances["MP1"].origin == (0, 6)
    assert db.instances["MP1"].orient == "MX"


def test_place_transistor_rows_unpaired_in_netlist_order(tech):
    text = (
        ".SUBCKT C A B VDD VSS\n"
        "MP1 X A VDD VDD pmos\n"
        "MN1 X A VSS VSS nmos\n"
        "MN9 Y B VSS VSS nmos\n"
        "MN2 Z B VSS VSS nmos\n"
        ".ENDS\n")
    db = place_transistor_rows(parse_spice(text)[0], tech)
    # the pair takes the leftmost column; extras follow in netlist order
    xs = {n: db.instances[n].origin[0] for n in db.instances}
    assert xs["MN1"] == xs["MP1"] == 0
    assert xs["MN9"] == 2 and xs["MN2"] == 4


def test_place_transistor_rows_rejects_gates(tech):
    with pytest.raises(NotTransistorLevel):
        place_transistor_rows(gates(CHAIN_SP), tech)


def test_place_transistor_constraints_accept_either_pair_member(tech):
    nand = parse_spice((DATA.parent.parent / "corpus" / "nand2.sp").read_text())[0]
    by_pmos = place_transistor_rows(
        nand, tech, PlacementConstraints(fixed_left=("MP1",)))
    by_nmos = place_transistor_rows(
        nand, tech, PlacementConstraints(fixed_left=("MN1",)))
    assert by_pmos.instances["MP1"].origin[0] == 0
    assert by_pmos.instances["MN1"].origin[0] == 0
    assert {n: i.origin for n, i in by_nmos.instances.items()} == \
           {n: i.origin for n, i in by_pmos.instances.items()}


def test_constraint_conflict_both_ends(tech):
    nl = gates(CHAIN_SP)
    with pytest.raises(ConstraintConflict):
        optimize_order(nl, tech, PlacementConstraints(
            fixed_left=("X1",), fixed_right=("X1",)))


def test_optimize_order_rejects_transistor_netlists(tech):
    with pytest.raises(NotGateLevel):
        optimize_order(parse_spice(INV_SP)[0], tech)


def test_optimize_order_chain(tech):
    nl = gates(CHAIN_SP)
    result = optimize_order(nl, tech)
    assert result.method is OrderMethod.EXHAUSTIVE
    assert sorted(result.order) == ["X1", "X2", "X3"]
    oracle_order, oracle_cost = best_row_order(tech, nl, ["X1", "X2", "X3"])
    assert list(result.order) == oracle_order
    assert result.hpwl_after == oracle_cost
    assert result.hpwl_before == row_hpwl(tech, nl, ["X1", "X2", "X3"])


def test_optimize_order_respects_fixed_ends(tech):
    nl = gates(CHAIN_SP)
    result = optimize_order(nl, tech, PlacementConstraints(
        fixed_left=("X3",), fixed_right=("X1",)))
    assert result.order[0] == "X3" and result.order[-1] == "X1"
    assert result.hpwl_after == row_hpwl(tech, nl, result.order)


@pytest.mark.parametrize("seed", range(25))
def test_optimize_order_matches_brute_force(tech, seed):
    """Exhaustive search result equals an independent brute force, ties included."""
    rng = random.Random(9000 + seed)
    text, names = random_gate_design(rng, rng.randint(2, 7))
    nl = gates(text)
    result = optimize_order(nl, tech)
    oracle_order, oracle_cost = best_row_order(tech, nl, names)
    assert result.method is OrderMethod.EXHAUSTIVE
    assert list(result.order) == oracle_order
    assert result.hpwl_after == oracle_cost


@pytest.mark.parametrize("seed", range(10))
def test_greedy_never_worse_than_input(tech, seed):
    rng = random.Random(4200 + seed)
    text, names = random_gate_design(rng, rng.randint(9, 13))
    nl = gates(text)
    result = optimize_order(nl, tech)
    assert result.method is OrderMethod.GREEDY_SWAP
    assert result.hpwl_after <= result.hpwl_before
    assert result.hpwl_after == row_hpwl(tech, nl, result.order)
    assert sorted(result.order) == sorted(names)


def test_optimized_row_cost_matches_placement(tech):
    """The optimizer's reported cost is the cost of actually placing its order."""
    rng = random.Random(7)
    text, names = random_gate_design(rng, 6)
    nl = gates(text)
    result = optimize_order(nl, tech)
    db = place_gate_row(nl, tech, result.order)
    placement = {n: (i.origin, i.orient) for n, i in db.instances.items()}
    assert hpwl(nl, tech, placement) == result.hpwl_after


# --- kernel twins --------------------------------------------------------------


def random_model(rng):
    n = rng.randint(2, 7)
    items = []
    for i in range(n):
        pins = [(f"N{rng.randint(0, n)}", rng.randint(0, 3), rng.randint(0, 5))
                for _ in range(rng.randint(1, 4))]
        items.append((f"C{i:02d}", rng.randint(2, 6), pins))
    return build_model(items)


@pytest.mark.skipif(BACKEND != "cython", reason="compiled kernel not built")
@pytest.mark.parametrize("seed", range(30))
def test_compiled_kernel_agrees_with_pure_python(seed):
    rng = random.Random(31337 + seed)
    model = random_model(rng)
    free = list(range(len(model.names)))
    args = (model.widths, model.pin_item, model.pin_dx, model.pin_net, model.n_nets)
    order = list(free)
    rng.shuffle(order)
    assert hpwl_x(*args, order) == _order_py.hpwl_x(*args, order)
    got = exhaustive_search(*args, [], free, [])
    want = _order_py.exhaustive_search(*args, [], free, [])
    assert tuple(got[0]) == tuple(want[0])
    assert got[1] == want[1]


@pytest.mark.skipif(BACKEND != "cython", reason="compiled kernel not built")
def test_compiled_kernel_handles_prefix_suffix():
    rng = random.Random(5)
    model = random_model(rng)
    n = len(model.names)
    args = (model.widths, model.pin_item, model.pin_dx, model.pin_net, model.n_nets)
    got = exhaustive_search(*args, [0], list(range(2, n)), [1])
    want = _order_py.exhaustive_search(*args, [0], list(range(2, n)), [1])
    assert tuple(got[0]) == tuple(want[0]) and got[1] == want[1]
    assert got[0][0] == 0 and got[0][-1] == 1


def test_frozen_ten_item_fixture_spot_check():
    """Three fixture cases end to end; the full sweep runs in acceptance."""
    from cellgrid.place import _optimize_model

    doc = json.loads((DATA / "order_n10_optima.json").read_text())
    for case in doc["cases"][:3]:
        items = [(n, w, [tuple(p) for p in pins]) for n, w, pins in case["items"]]
        model = build_model(items)
        order, _, after, method = _optimize_model(
            model, [], [], sorted(n for n, _, _ in items))
        assert method is OrderMethod.GREEDY_SWAP
        assert after <= 1.05 * case["optimum_cost"]
