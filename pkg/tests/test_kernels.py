"""The numba and numpy flavours of every kernel must agree."""

import random

import numpy as np
import pytest

from ringext import _kernels
from ringext.oracle import oracle_extension_property
from ringext.rings import build_ring, validate_table_ring
from ringext.weights import builtin_weight, make_weight, random_weight

pytestmark = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not installed")


def _both(fn, *args):
    with _kernels.use_backend("numba"):
        a = fn(*args)
    with _kernels.use_backend("numpy"):
        b = fn(*args)
    return a, b


def test_backend_switch():
    before = _kernels.backend()
    with _kernels.use_backend("numpy"):
        assert _kernels.backend() == "numpy"
    assert _kernels.backend() == before
    with pytest.raises(ValueError):
        _kernels.set_backend("cuda")


@pytest.mark.parametrize("seed", range(5))
def test_orbit_labels(seed):
    rng = np.random.default_rng(seed)
    n = 200
    src = rng.integers(0, n, 150)
    dst = rng.integers(0, n, 150)
    a, b = _both(_kernels.orbit_labels, n, src, dst)
    assert (a == b).all()
    assert (a <= np.arange(n)).all()


def test_table_matmul():
    f = build_ring("GF(4)")
    add_t, mul_t = f.tables()
    rng = np.random.default_rng(0)
    x = rng.integers(0, 4, (20, 3, 3))
    y = rng.integers(0, 4, (20, 3, 3))
    a, b = _both(_kernels.table_matmul, x, y, add_t, mul_t)
    assert (a == b).all()


def test_axiom_scan():
    ring = build_ring("Z(6)")
    add_t, mul_t = ring.tables()
    bad = mul_t.copy()
    bad[2, 3] = 1
    for m in (mul_t, bad):
        a, b = _both(_kernels.axiom_scan, add_t, m)
        assert (a == b).all()
    with _kernels.use_backend("numpy"):
        assert not validate_table_ring(add_t, bad).ok


def test_monomial_extension():
    ring = build_ring("Z(4)")
    _, mul_t = ring.tables()
    perms = np.array([[0, 1], [1, 0]])
    units = np.array([1, 3])
    for gens, imgs in [([[1, 2]], [[3, 2]]), ([[2, 1]], [[1, 0]]), ([[1, 2]], [[2, 3]])]:
        (pa, ca), (pb, cb) = _both(_kernels.monomial_extension, np.array(gens), np.array(imgs), units, mul_t, perms)
        assert pa == pb
        if pa >= 0:
            assert (ca == cb).all()


@pytest.mark.parametrize("spec", ["Z(4)", "Z(6)", "GF(4)", "Mat(2,GF(2))"])
def test_oracle_backends_agree(spec):
    ring = build_ring(spec)
    for w in (builtin_weight(ring, "hamming"), random_weight(ring, random.Random(3), zero_prob=0.5)):
        a, b = _both(lambda: oracle_extension_property(ring, w, stop_at_failure=False))
        assert (a.holds, a.isometries, a.failures, a.witness) == (b.holds, b.isometries, b.failures, b.witness)


def test_oracle_backends_agree_on_failure():
    ring = build_ring("Z(4)")
    w = make_weight(ring, {1: 1, 2: 0})
    a, b = _both(lambda: oracle_extension_property(ring, w))
    assert a.holds is b.holds is False
    assert a.witness == b.witness
