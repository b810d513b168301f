import itertools
import random
from fractions import Fraction as F

import numpy as np
import pytest

from ringext.oracle import (
    BudgetExceeded, CounterexampleError, NotAnInjectiveMap, build_counterexample, enumerate_codes, is_extendable,
    make_code, null_vector_integer, oracle_extension_property, span,
)
from ringext.orthogonality import build_matrix, criterion
from ringext.rings import build_ring
from ringext.weights import builtin_weight, correlate, make_weight, random_weight


@pytest.fixture(scope="module")
def z4():
    return build_ring("Z(4)")


def test_null_vectors(z4):
    bad = make_weight(z4, {1: 1, 2: 0})
    assert null_vector_integer(build_matrix(z4, bad, "W0")) == [1, 0]
    assert null_vector_integer(build_matrix(z4, builtin_weight(z4, "lee"), "W0")) is None
    zero = make_weight(z4, {1: 0, 2: 0})
    assert null_vector_integer(build_matrix(z4, zero, "W0")) == [1, 0]


def test_z4_counterexample(z4):
    pair = build_counterexample(z4, make_weight(z4, {1: 1, 2: 0}))
    assert (pair.g_plus, pair.g_minus) == ((2, 1), (1, 0))
    assert pair.verified and not pair.extension.extendable


def test_mat2_counterexample():
    ring = build_ring("Mat(2,GF(2))")
    w = builtin_weight(ring, "rank", ranks=["2", "3"])
    assert not criterion(ring, w).passes
    pair = build_counterexample(ring, w)
    assert pair.verified and pair.n == 4


def test_counterexample_preconditions(z4):
    with pytest.raises(CounterexampleError, match="invertible"):
        build_counterexample(z4, builtin_weight(z4, "lee"))
    bad = make_weight(z4, {1: 1, 2: 0})
    with pytest.raises(CounterexampleError, match="kernel"):
        build_counterexample(z4, bad, v=[0, 1])
    with pytest.raises(CounterexampleError):
        build_counterexample(z4, bad.with_w0(1))


def test_identity_extends(z4):
    lee = builtin_weight(z4, "lee")
    res = is_extendable(z4, [[1, 2]], [[1, 2]], lee)
    assert res.extendable and res.monomial.perm == (0, 1)


def test_lee_example_extends(z4):
    res = is_extendable(z4, [[1, 2]], [[3, 2]], builtin_weight(z4, "lee"))
    assert res.extendable
    assert res.monomial.perm == (0, 1) and res.monomial.units == (3, 1)
    assert res.monomial.apply(z4, [1, 2]).tolist() == [3, 2]


def test_ill_defined_maps_rejected(z4):
    lee = builtin_weight(z4, "lee")
    with pytest.raises(NotAnInjectiveMap):
        is_extendable(z4, [[2, 0]], [[1, 0]], lee)  # 2*(2,0) = 0 but 2*(1,0) != 0
    with pytest.raises(NotAnInjectiveMap):
        is_extendable(z4, [[1, 0]], [[2, 0]], lee)
    with pytest.raises(BudgetExceeded):
        is_extendable(z4, [[1, 0]], [[1, 0]], lee, budget=1)


def test_oracle_examples(z4):
    assert oracle_extension_property(z4, builtin_weight(z4, "lee")).holds
    rep = oracle_extension_property(z4, make_weight(z4, {1: 1, 2: 0}))
    assert rep.holds is False and rep.witness is not None
    gf2 = build_ring("GF(2)")
    assert oracle_extension_property(gf2, builtin_weight(gf2, "hamming")).holds


def test_oracle_budget(z4):
    with pytest.raises(BudgetExceeded) as exc:
        oracle_extension_property(z4, builtin_weight(z4, "lee"), budget=10)
    assert exc.value.report.exhausted


@pytest.mark.parametrize("spec,n,count", [("GF(2)", 2, 5), ("GF(3)", 2, 6), ("Z(4)", 1, 3), ("Mat(2,GF(2))", 2, 67)])
def test_code_counts(spec, n, count):
    assert len(enumerate_codes(build_ring(spec), n, include_zero=True)) == count


@pytest.mark.parametrize("spec", ["Z(4)", "Z(6)", "PChain(2,2)", "Prod(Z(4),GF(2))"])
def test_codes_are_submodules(spec):
    ring = build_ring(spec)
    for code in enumerate_codes(ring, 2):
        el = code.elements
        assert (ring.order**2) % code.size == 0
        sums = ring.add(el[:, None, :], el[None, :, :]).reshape(-1, 2)
        assert code.mask[sums[:, 0] * ring.order + sums[:, 1]].all()
        assert (span(ring, code.generators) == code.mask).all()


def _isometries(ring, w, code):
    """Every injective weight-preserving map from a cyclic code, by brute force."""
    (g,) = code.generators
    words = {tuple(ring.mul(a, g).tolist()) for a in range(ring.order)}
    ann = [a for a in range(ring.order) if not ring.mul(a, g).any()]
    wt = lambda v: sum(w(x) for x in v)  # noqa: E731
    out = []
    for h in itertools.product(range(ring.order), repeat=len(g)):
        h = np.array(h)
        ok = all(not ring.mul(a, h).any() for a in ann)
        for a in range(ring.order):
            src, dst = tuple(ring.mul(a, g).tolist()), tuple(ring.mul(a, h).tolist())
            ok = ok and wt(src) == wt(dst) and (any(src) == any(dst))
        if ok and len(words) == len({tuple(ring.mul(a, h).tolist()) for a in range(ring.order)}):
            out.append((g, h))
    return out


@pytest.mark.parametrize("spec", ["Z(4)", "Z(6)"])
def test_isometries_survive_correlation(spec):
    ring = build_ring(spec)
    rng = random.Random(1)
    w = random_weight(ring, rng)
    fs = [[F(rng.randint(-3, 3)) for _ in range(ring.order)] for _ in range(5)]
    wfs = [correlate(ring, w, f) for f in fs]
    for code in enumerate_codes(ring, 2):
        if len(code.generators) != 1:
            continue
        for g, h in _isometries(ring, w, code):
            for wf in wfs:
                for a in range(ring.order):
                    assert sum(wf[x] for x in ring.mul(a, g)) == sum(wf[x] for x in ring.mul(a, h))


def test_make_code():
    ring = build_ring("Z(4)")
    code = make_code(ring, [[1, 2]])
    assert code.size == 4 and code.n == 2
