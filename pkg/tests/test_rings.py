import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import KLEIN, PIR_SPECS
from ringext.rings import (
    RingMismatchError, RingSpecError, TableRing, build_ring, element_arith, orbit_partition, validate_table_ring,
)


def _z4_tables():
    x = np.arange(4)
    return (x[:, None] + x[None, :]) % 4, (x[:, None] * x[None, :]) % 4


@pytest.mark.parametrize("spec,order,units", [
    ("Z(4)", 4, 2),
    ("Z(12)", 12, 4),
    ("GF(9)", 9, 8),
    ("ZChain(2,3)", 8, 4),
    ("PChain(3,2)", 9, 6),
    ("Mat(2,GF(2))", 16, 6),
    ("Mat(2,GF(3))", 81, 48),
    ("Mat(2,ZChain(2,2))", 256, 96),
    ("Prod(Z(4),GF(2))", 8, 2),
    (KLEIN, 16, 8),
])
def test_orders_and_units(spec, order, units):
    ring = build_ring(spec)
    assert ring.order == order
    assert ring.units.size == units
    assert ring.one in ring.units


def test_z4_units_are_one_and_three():
    assert build_ring("Z(4)").units.tolist() == [1, 3]


@pytest.mark.parametrize("spec", PIR_SPECS + [KLEIN])
def test_axioms_hold(spec):
    ring = build_ring(spec)
    add_t, mul_t = ring.tables()
    report = validate_table_ring(add_t, mul_t)
    assert report.ok, report.summary()


@pytest.mark.parametrize("spec", ["Mat(2,GF(3))", "Mat(2,ZChain(2,2))", "Prod(Mat(2,GF(2)),Z(9))"])
def test_reduced_axiom_scan_agrees(spec):
    ring = build_ring(spec)
    assert validate_table_ring(*ring.tables(), exhaustive=False).ok


def test_tampered_table_reports_witness():
    add_t, mul_t = _z4_tables()
    mul_t = mul_t.copy()
    mul_t[2, 2] = 1
    report = validate_table_ring(add_t, mul_t)
    names = [name for name, _ in report.violations]
    assert not report.ok
    assert any("distributivity" in n for n in names)
    assert all(len(w) == 3 for name, w in report.violations if "distributivity" in name)


def test_bad_shape_and_range():
    assert not validate_table_ring(np.zeros((2, 3)), np.zeros((2, 3))).ok
    add_t, mul_t = _z4_tables()
    add_t = add_t.copy()
    add_t[0, 0] = 7
    assert validate_table_ring(add_t, mul_t).violations[0][0] == "add table range"


def test_units_closed_and_invertible():
    for spec in ("Z(12)", "Mat(2,GF(3))", "Prod(Z(4),GF(2))", KLEIN):
        ring = build_ring(spec)
        u = ring.units
        prods = ring.mul(u[:, None], u[None, :])
        assert np.isin(prods, u).all()
        assert all((ring.mul(x, u) == ring.one).any() for x in u)


@pytest.mark.parametrize("spec", ["Z(", "Foo(3)", "GF(6)", "Z(0)", "Mat(2,Z(6))", "Z(4) junk", "Table(nope.json)"])
def test_bad_specs(spec):
    with pytest.raises(RingSpecError):
        build_ring(spec)


def test_order_cap(monkeypatch):
    with pytest.raises(RingSpecError, match="max-order"):
        build_ring("Mat(3,GF(3))")
    monkeypatch.setenv("RINGEXT_MAX_ORDER", "20000")
    assert build_ring("Mat(3,GF(3))").order == 19683


def test_table_file(tmp_path):
    add_t, mul_t = _z4_tables()
    path = tmp_path / "z4.json"
    path.write_text(json.dumps({"order": 4, "add": add_t.tolist(), "mul": mul_t.tolist()}))
    ring = build_ring(f"Table({path})")
    assert isinstance(ring, TableRing) and ring.order == 4 and ring.units.size == 2


def test_table_zero_relabelled_to_index_zero(tmp_path):
    perm = [2, 0, 3, 1]  # new index of old element
    add_t, mul_t = _z4_tables()
    inv = np.argsort(perm)
    a = np.array(perm)[add_t[inv][:, inv]]
    m = np.array(perm)[mul_t[inv][:, inv]]
    ring = TableRing(a, m)
    assert (ring.add(0, ring.elements) == ring.elements).all()


def test_bad_table_file(tmp_path):
    add_t, mul_t = _z4_tables()
    mul_t = mul_t.copy()
    mul_t[2, 2] = 1
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"order": 4, "add": add_t.tolist(), "mul": mul_t.tolist()}))
    with pytest.raises(RingSpecError, match="axiom|distributivity"):
        build_ring(f"Table({path})")


def test_element_arith_examples():
    z4 = build_ring("Z(4)")
    two = z4.element(2)
    assert element_arith("mul", two, two).index == 0
    m = build_ring("Mat(2,GF(2))")
    a = m.element(m.index_of("[[1,1],[0,1]]"))
    assert element_arith("mul", a, a).index == m.one
    p = build_ring("Prod(Z(4),GF(2))")
    s = element_arith("add", p.element(p.index_of("(3,1)")), p.element(p.index_of("(1,1)")))
    assert s.index == 0
    assert element_arith("neg", z4.element(1)).index == 3
    with pytest.raises(RingMismatchError):
        element_arith("add", two, p.element(1))
    assert (two * two).index == 0 and (two + two).index == 0 and (-two).index == 2


def test_labels_roundtrip():
    for spec in ("GF(8)", "PChain(2,3)", "Mat(2,GF(2))", "Prod(Z(4),GF(2))", KLEIN):
        ring = build_ring(spec)
        assert [ring.index_of(ring.label(x)) for x in range(ring.order)] == list(range(ring.order))


def test_orbits_z4():
    z4 = build_ring("Z(4)")
    left = orbit_partition(z4, "left")
    assert sorted(tuple(c.tolist()) for c in left.classes) == [(0,), (1, 3), (2,)]
    assert (orbit_partition(z4, "double").rep == left.rep).all()


def test_orbits_mat2():
    m = build_ring("Mat(2,GF(2))")
    assert len(orbit_partition(m, "left")) == 1 + 3 + 1
    assert len(orbit_partition(m, "double")) == 3


@pytest.mark.parametrize("spec", PIR_SPECS + [KLEIN])
def test_orbit_invariants(spec):
    ring = build_ring(spec)
    left, right, double = (orbit_partition(ring, k) for k in ("left", "right", "double"))
    assert len(left) == len(right)
    for part in (left, right, double):
        assert part.rep[0] == 0 and part.sizes[0] == 1
        assert (part.rep <= np.arange(ring.order)).all()
    # double orbits are unions of one-sided orbits
    assert (double.rep[left.rep] == double.rep).all()
    assert (double.rep[right.rep] == double.rep).all()


@given(st.integers(2, 40), st.data())
def test_residue_arithmetic(m, data):
    ring = build_ring(f"Z({m})")
    a = data.draw(st.integers(0, m - 1))
    b = data.draw(st.integers(0, m - 1))
    assert ring.add(a, b) == (a + b) % m
    assert ring.mul(a, b) == (a * b) % m


@given(st.sampled_from(["GF(4)", "GF(8)", "GF(9)", "PChain(2,3)", "Mat(2,GF(2))", KLEIN]), st.data())
def test_distributive_samples(spec, data):
    ring = build_ring(spec)
    a, b, c = (data.draw(st.integers(0, ring.order - 1)) for _ in range(3))
    assert ring.mul(a, ring.add(b, c)) == ring.add(ring.mul(a, b), ring.mul(a, c))
    assert ring.mul(ring.mul(a, b), c) == ring.mul(a, ring.mul(b, c))
