"""Layout database: placement rules, geometry math, canonical serialization."""

import pytest

from cellgrid.errors import DuplicateInstance, LayoutError, Overlap, UnknownInstance, UnknownTemplate
from cellgrid.layout import (
    add_label,
    empty_db,
    from_canonical_json,
    instance_bbox,
    move_instance,
    net_pins,
    nets_in_layout,
    pin_access_points,
    place_instance,
    swap_instances,
    to_canonical_json,
)
from cellgrid.layout import LayoutDb, NetLabel, Via, WireSegment

from conftest import DATA

NU_PINS = {"S": "VSS", "G": "A", "D": "Z"}


def place_nu(db, tech, name, origin, orient="R0", pins=NU_PINS):
    return place_instance(db, tech, name, "NU", origin, orient, pins)


def test_place_and_bbox(tech):
    db = place_nu(empty_db(tech, "C"), tech, "m1", (3, 5))
    inst = db.instances["m1"]
    assert inst.origin == (3, 5) and inst.orient == "R0"
    assert instance_bbox(tech, inst) == (3, 5, 5, 9)


def test_place_rejects_duplicate_name(tech):
    db = place_nu(empty_db(tech, "C"), tech, "m1", (0, 0))
    with pytest.raises(DuplicateInstance):
        place_nu(db, tech, "m1", (10, 0))


def test_place_rejects_unknown_template(tech):
    with pytest.raises(UnknownTemplate):
        place_instance(empty_db(tech, "C"), tech, "m1", "NOPE", (0, 0), "R0", {})


def test_place_rejects_bad_orient_and_pins(tech):
    db = empty_db(tech, "C")
    with pytest.raises(LayoutError):
        place_instance(db, tech, "m1", "NU", (0, 0), "R7", NU_PINS)
    with pytest.raises(LayoutError):
        place_instance(db, tech, "m1", "NU", (0, 0), "R0", {"S": "VSS"})


def test_overlap_needs_positive_area(tech):
    db = place_nu(empty_db(tech, "C"), tech, "m1", (0, 0))
    # NU is 2x4: sharing the x=2 edge is legal
    db = place_nu(db, tech, "m2", (2, 0))
    # and so is sharing only the corner
    db = place_nu(db, tech, "m3", (4, 4))
    with pytest.raises(Overlap) as err:
        place_nu(db, tech, "m4", (1, 2))
    assert err.value.existing in {"m1", "m2"}


def test_move_and_swap(tech):
    db = place_nu(empty_db(tech, "C"), tech, "m1", (0, 0))
    db = place_nu(db, tech, "m2", (4, 0), orient="MX")
    db = move_instance(db, tech, "m1", (8, 0))
    assert db.instances["m1"].origin == (8, 0)
    db = swap_instances(db, tech, "m1", "m2")
    assert db.instances["m1"].origin == (4, 0)
    assert db.instances["m1"].orient == "MX"
    assert db.instances["m2"].origin == (8, 0)
    assert db.instances["m2"].orient == "R0"


def test_move_checks_overlap_and_name(tech):
    db = place_nu(empty_db(tech, "C"), tech, "m1", (0, 0))
    db = place_nu(db, tech, "m2", (4, 0))
    with pytest.raises(Overlap):
        move_instance(db, tech, "m2", (1, 0))
    with pytest.raises(UnknownInstance):
        move_instance(db, tech, "zz", (0, 0))


def test_mutators_leave_old_snapshots_alone(tech):
    db0 = empty_db(tech, "C")
    db1 = place_nu(db0, tech, "m1", (0, 0))
    db2 = move_instance(db1, tech, "m1", (6, 0))
    assert db0.instances == {}
    assert db1.instances["m1"].origin == (0, 0)
    assert db2.instances["m1"].origin == (6, 0)


def test_pin_access_points_follow_orientation(tech):
    db = place_nu(empty_db(tech, "C"), tech, "m1", (10, 20), orient="MX")
    # NU gate is (M1, 1, 4) in a 2x4 box; MX sends dy 4 to 0
    assert pin_access_points(tech, db.instances["m1"], "G") == [("M1", 11, 20)]
    assert pin_access_points(tech, db.instances["m1"], "S") == [("M1", 10, 24)]


def test_net_pins_sorted(tech):
    db = place_nu(empty_db(tech, "C"), tech, "m2", (4, 0))
    db = place_nu(db, tech, "m1", (0, 0))
    assert net_pins(db, tech, "A") == [("m1", "G"), ("m2", "G")]
    assert net_pins(db, tech, "NOPE") == []


def test_nets_in_layout_covers_geometry(tech):
    db = place_nu(empty_db(tech, "C"), tech, "m1", (0, 0))
    db = LayoutDb(db.tech_name, db.cell_name, db.instances,
                  (WireSegment("X9", "M2", 0, (0, 2)),), (), ())
    assert nets_in_layout(db) == {"VSS", "A", "Z", "X9"}


def test_add_label_keeps_sort(tech):
    db = empty_db(tech, "C")
    db = add_label(db, "B", "M1", 1, 1)
    db = add_label(db, "A", "M1", 0, 0)
    assert [l.net for l in db.labels] == ["A", "B"]


# --- canonical serialization --------------------------------------------------


def build_one_way(tech):
    db = empty_db(tech, "C")
    db = place_nu(db, tech, "m1", (0, 0))
    db = place_nu(db, tech, "m2", (4, 0))
    db = add_label(db, "Z", "M1", 0, 0)
    return db


def build_other_way(tech):
    db = empty_db(tech, "C")
    db = add_label(db, "Z", "M1", 0, 0)
    db = place_nu(db, tech, "m2", (4, 0))
    db = place_nu(db, tech, "m1", (0, 0))
    return db


def test_canonical_bytes_ignore_construction_order(tech):
    assert to_canonical_json(build_one_way(tech)) == to_canonical_json(build_other_way(tech))


def test_canonical_json_round_trips(tech):
    db = build_one_way(tech)
    db = LayoutDb(db.tech_name, db.cell_name, db.instances,
                  (WireSegment("Z", "M1", 0, (0, 4)),),
                  (Via("M1", "M2", 0, 4, "Z"),),
                  db.labels)
    again = from_canonical_json(to_canonical_json(db))
    assert again == db
    assert to_canonical_json(again) == to_canonical_json(db)


def test_canonical_json_shape():
    raw = (DATA / "nand2_layout.json").read_bytes()
    db = from_canonical_json(raw)
    assert to_canonical_json(db) == raw
    assert raw.endswith(b"}\n")


def test_from_canonical_json_validates():
    with pytest.raises(LayoutError):
        from_canonical_json(b"[]")
    with pytest.raises(LayoutError):
        from_canonical_json(b'{"cell_name": "C"}')
    with pytest.raises(LayoutError):
        from_canonical_json(b"{not json")


def test_golden_nand2_layout(tech, nand2_session):
    """Frozen full-flow output: any placement or routing drift shows up here."""
    assert to_canonical_json(nand2_session.current) == (DATA / "nand2_layout.json").read_bytes()


def test_golden_nand2_positions(nand2_session):
    db = nand2_session.current
    # pairs share a column, PMOS mirrored above the NMOS row
    assert db.instances["MN2"].origin == (0, 0)
    assert db.instances["MP2"].origin == (0, 6)
    assert db.instances["MN1"].origin == (2, 0)
    assert db.instances["MP1"].origin == (2, 6)
    assert db.instances["MP1"].orient == "MX"
    assert db.instances["MN1"].orient == "R0"
