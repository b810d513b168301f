"""Hot inner loops, each in two flavours.

Every kernel exists as an explicit-loop version compiled with numba and as a
vectorised pure-numpy version.  The active backend is chosen once from the
``RINGEXT_BACKEND`` environment variable (``numba`` or ``numpy``); when numba
cannot be imported the numpy path is used.  Both paths return identical
results, which the test-suite checks.
"""

from __future__ import annotations

import contextlib
import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


def _initial_backend() -> str:
    name = os.environ.get("RINGEXT_BACKEND", "numba" if HAVE_NUMBA else "numpy").lower()
    if name not in ("numba", "numpy"):
        raise ValueError(f"RINGEXT_BACKEND must be 'numba' or 'numpy', got {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        return "numpy"
    return name


BACKEND = _initial_backend()


def backend() -> str:
    return BACKEND


def set_backend(name: str) -> None:
    global BACKEND
    if name not in ("numba", "numpy"):
        raise ValueError(name)
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    BACKEND = name


@contextlib.contextmanager
def use_backend(name: str):
    old = BACKEND
    set_backend(name)
    try:
        yield
    finally:
        set_backend(old)


# ---------------------------------------------------------------------------
# connected components with minimal-index representatives


@njit(cache=True)
def _orbit_labels_jit(n_nodes, src, dst):
    parent = np.arange(n_nodes)
    for e in range(src.shape[0]):
        a = src[e]
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        b = dst[e]
        while parent[b] != b:
            parent[b] = parent[parent[b]]
            b = parent[b]
        if a < b:
            parent[b] = a
        elif b < a:
            parent[a] = b
    for x in range(n_nodes):
        r = x
        while parent[r] != r:
            r = parent[r]
        parent[x] = r
    return parent


def _orbit_labels_numpy(n_nodes, src, dst):
    labels = np.arange(n_nodes)
    while True:
        old = labels
        lo = np.minimum(labels[src], labels[dst])
        new = labels.copy()
        np.minimum.at(new, src, lo)
        np.minimum.at(new, dst, lo)
        # pointer jumping until labels are fixed points
        while True:
            jumped = new[new]
            if np.array_equal(jumped, new):
                break
            new = jumped
        labels = new
        if np.array_equal(labels, old):
            return labels


def orbit_labels(n_nodes: int, src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """Label each node by the smallest node index of its connected component."""
    src = np.ascontiguousarray(src, dtype=np.int64)
    dst = np.ascontiguousarray(dst, dtype=np.int64)
    if BACKEND == "numba":
        return _orbit_labels_jit(n_nodes, src, dst)
    return _orbit_labels_numpy(n_nodes, src, dst)


# ---------------------------------------------------------------------------
# batched matrix products over a ring given by tables


@njit(cache=True)
def _table_matmul_jit(a, b, add_t, mul_t):
    batch, n, _ = a.shape
    out = np.zeros((batch, n, n), dtype=a.dtype)
    for z in range(batch):
        for i in range(n):
            for j in range(n):
                acc = 0
                for k in range(n):
                    acc = add_t[acc, mul_t[a[z, i, k], b[z, k, j]]]
                out[z, i, j] = acc
    return out


def _table_matmul_numpy(a, b, add_t, mul_t):
    n = a.shape[1]
    out = np.zeros(a.shape, dtype=a.dtype)
    for i in range(n):
        for j in range(n):
            acc = mul_t[a[:, i, 0], b[:, 0, j]]
            for k in range(1, n):
                acc = add_t[acc, mul_t[a[:, i, k], b[:, k, j]]]
            out[:, i, j] = acc
    return out


def table_matmul(a: np.ndarray, b: np.ndarray, add_t: np.ndarray, mul_t: np.ndarray) -> np.ndarray:
    """Multiply batches of square matrices whose entries index a base ring.

    The base ring's zero must be index 0.
    """
    a = np.ascontiguousarray(a, dtype=np.int64)
    b = np.ascontiguousarray(b, dtype=np.int64)
    if BACKEND == "numba":
        return _table_matmul_jit(a, b, add_t.astype(np.int64), mul_t.astype(np.int64))
    return _table_matmul_numpy(a, b, add_t, mul_t)


# ---------------------------------------------------------------------------
# exhaustive ring-axiom scan over all triples
#
# Row k of the result holds the first failing triple (x, y, z) for axiom k,
# or -1s: 0 additive associativity, 1 multiplicative associativity,
# 2 left distributivity x(y+z) = xy+xz, 3 right distributivity (y+z)x = yx+zx.

AXIOM_NAMES = (
    "additive associativity",
    "multiplicative associativity",
    "left distributivity",
    "right distributivity",
)


@njit(cache=True)
def _axiom_scan_jit(add_t, mul_t):
    n = add_t.shape[0]
    out = -np.ones((4, 3), dtype=np.int64)
    for x in range(n):
        for y in range(n):
            xy_a = add_t[x, y]
            xy_m = mul_t[x, y]
            for z in range(n):
                if out[0, 0] < 0 and add_t[xy_a, z] != add_t[x, add_t[y, z]]:
                    out[0, 0] = x
                    out[0, 1] = y
                    out[0, 2] = z
                if out[1, 0] < 0 and mul_t[xy_m, z] != mul_t[x, mul_t[y, z]]:
                    out[1, 0] = x
                    out[1, 1] = y
                    out[1, 2] = z
                yz = add_t[y, z]
                if out[2, 0] < 0 and mul_t[x, yz] != add_t[xy_m, mul_t[x, z]]:
                    out[2, 0] = x
                    out[2, 1] = y
                    out[2, 2] = z
                if out[3, 0] < 0 and mul_t[yz, x] != add_t[mul_t[y, x], mul_t[z, x]]:
                    out[3, 0] = x
                    out[3, 1] = y
                    out[3, 2] = z
    return out


def _first_true(mask, x):
    idx = np.argwhere(mask)
    if idx.shape[0] == 0:
        return None
    y, z = idx[0]
    return (x, int(y), int(z))


def _axiom_scan_numpy(add_t, mul_t):
    n = add_t.shape[0]
    out = -np.ones((4, 3), dtype=np.int64)
    ys = np.arange(n)[:, None]
    zs = np.arange(n)[None, :]
    for x in range(n):
        checks = (
            add_t[add_t[x, ys], zs] != add_t[x, add_t[ys, zs]],
            mul_t[mul_t[x, ys], zs] != mul_t[x, mul_t[ys, zs]],
            mul_t[x, add_t[ys, zs]] != add_t[mul_t[x, ys], mul_t[x, zs]],
            mul_t[add_t[ys, zs], x] != add_t[mul_t[ys, x], mul_t[zs, x]],
        )
        for k, bad in enumerate(checks):
            if out[k, 0] < 0:
                hit = _first_true(bad, x)
                if hit is not None:
                    out[k] = hit
        if (out[:, 0] >= 0).all():
            break
    return out


def axiom_scan(add_t: np.ndarray, mul_t: np.ndarray) -> np.ndarray:
    add_t = np.ascontiguousarray(add_t, dtype=np.int64)
    mul_t = np.ascontiguousarray(mul_t, dtype=np.int64)
    if BACKEND == "numba":
        return _axiom_scan_jit(add_t, mul_t)
    return _axiom_scan_numpy(add_t, mul_t)


# ---------------------------------------------------------------------------
# monomial extension search
#
# gens, imgs: (t, n) element indices.  Find the first permutation (in the
# order of ``perms``) and, per coordinate j, the smallest-position unit u with
# gens[i, perm[j]] * u == imgs[i, j] for every i.


@njit(cache=True)
def _monomial_extension_jit(gens, imgs, units, mul_t, perms):
    t, n = gens.shape
    choice = np.empty(n, dtype=np.int64)
    for p in range(perms.shape[0]):
        ok = True
        for j in range(n):
            src = perms[p, j]
            found = -1
            for ui in range(units.shape[0]):
                u = units[ui]
                good = True
                for i in range(t):
                    if mul_t[gens[i, src], u] != imgs[i, j]:
                        good = False
                        break
                if good:
                    found = u
                    break
            if found < 0:
                ok = False
                break
            choice[j] = found
        if ok:
            return p, choice
    return -1, choice


def _monomial_extension_numpy(gens, imgs, units, mul_t, perms):
    t, n = gens.shape
    # compat[j, k, u]: coordinate k with unit u reproduces image coordinate j
    prod = mul_t[gens[:, :, None], units[None, None, :]]  # (t, n_src, U)
    compat = (prod[:, None, :, :] == imgs[:, :, None, None]).all(axis=0)  # (n_img, n_src, U)
    usable = compat.any(axis=2)
    ok = usable[np.arange(n)[None, :], perms].all(axis=1)
    hits = np.flatnonzero(ok)
    choice = np.empty(n, dtype=np.int64)
    if hits.size == 0:
        return -1, choice
    p = int(hits[0])
    for j in range(n):
        choice[j] = units[np.argmax(compat[j, perms[p, j]])]
    return p, choice


def monomial_extension(gens, imgs, units, mul_t, perms):
    """Return ``(perm_index, units_per_coordinate)``; perm_index is -1 if none."""
    args = (
        np.ascontiguousarray(gens, dtype=np.int64),
        np.ascontiguousarray(imgs, dtype=np.int64),
        np.ascontiguousarray(units, dtype=np.int64),
        np.ascontiguousarray(mul_t, dtype=np.int64),
        np.ascontiguousarray(perms, dtype=np.int64),
    )
    if BACKEND == "numba":
        p, choice = _monomial_extension_jit(*args)
    else:
        p, choice = _monomial_extension_numpy(*args)
    return int(p), choice


# ---------------------------------------------------------------------------
# isometry search for the extension oracle
#
# A code is given by generators gens (t, n).  Coefficient tuples rho in R^t
# (excluding 0) are sorted by the index of their last nonzero entry;
# level_start[k]:level_start[k+1] delimits those whose last nonzero entry is
# k.  For each rho, cw_zero/cw_wt hold whether the codeword is zero and its
# (integer-scaled) weight.  A choice of images h_0..h_{t-1} in R^n is accepted
# when, for every rho, the image sum_i rho_i h_i is zero exactly when the
# codeword is, and has the same weight.  That makes the map well defined,
# injective and weight preserving.  Every accepted map is then tested for a
# monomial extension.
#
# Returns (n_isometries, n_failures, work, exhausted_budget, witness_images).


@njit(cache=True)
def _image_ok(k, h, rhos, lo, hi, cw_zero, cw_wt, add_t, mul_t, wt):
    n = h.shape[1]
    for r in range(lo, hi):
        is_zero = True
        weight = 0
        for j in range(n):
            acc = 0
            for i in range(k + 1):
                acc = add_t[acc, mul_t[rhos[r, i], h[i, j]]]
            if acc != 0:
                is_zero = False
            weight += wt[acc]
        if is_zero != cw_zero[r] or weight != cw_wt[r]:
            return False
    return True


@njit(cache=True)
def _search_isometries_jit(gens, rhos, level_start, cw_zero, cw_wt, cand, add_t, mul_t, wt,
                           units, perms, budget, stop_at_failure):
    t, n = gens.shape
    n_cand = cand.shape[0]
    h = np.zeros((t, n), dtype=np.int64)
    witness = -np.ones((t, n), dtype=np.int64)
    pos = np.zeros(t, dtype=np.int64)
    n_iso = 0
    n_fail = 0
    work = 0
    k = 0
    pos[0] = 0
    while k >= 0:
        if pos[k] >= n_cand:
            k -= 1
            if k >= 0:
                pos[k] += 1
            continue
        for j in range(n):
            h[k, j] = cand[pos[k], j]
        lo = level_start[k]
        hi = level_start[k + 1]
        work += hi - lo
        if work > budget:
            return n_iso, n_fail, work, True, witness
        if _image_ok(k, h, rhos, lo, hi, cw_zero, cw_wt, add_t, mul_t, wt):
            if k == t - 1:
                n_iso += 1
                p, _ = _monomial_extension_jit(gens, h, units, mul_t, perms)
                work += perms.shape[0] * n
                if p < 0:
                    if n_fail == 0:
                        for i in range(t):
                            for j in range(n):
                                witness[i, j] = h[i, j]
                    n_fail += 1
                    if stop_at_failure:
                        return n_iso, n_fail, work, False, witness
                pos[k] += 1
            else:
                k += 1
                pos[k] = 0
        else:
            pos[k] += 1
    return n_iso, n_fail, work, False, witness


def _search_isometries_numpy(gens, rhos, level_start, cw_zero, cw_wt, cand, add_t, mul_t, wt,
                             units, perms, budget, stop_at_failure, chunk=64):
    t, n = gens.shape
    partial = np.zeros((1, 0, n), dtype=np.int64)
    work = 0
    for k in range(t):
        lo, hi = level_start[k], level_start[k + 1]
        rk = rhos[lo:hi]  # (P, t)
        term = mul_t[rk[:, k][:, None, None], cand[None, :, :]]  # (P, C, n)
        survivors = []
        for start in range(0, partial.shape[0], chunk):
            block = partial[start:start + chunk]  # (M, k, n)
            prefix = np.zeros((block.shape[0], rk.shape[0], n), dtype=np.int64)
            for i in range(k):
                prefix = add_t[prefix, mul_t[rk[:, i][None, :, None], block[:, i, None, :]]]
            img = add_t[prefix[:, :, None, :], term[None, :, :, :]]  # (M, P, C, n)
            work += block.shape[0] * cand.shape[0] * rk.shape[0]
            if work > budget:
                return 0, 0, work, True, -np.ones((t, n), dtype=np.int64)
            zero = (img == 0).all(axis=3)
            weight = wt[img].sum(axis=3)
            good = ((zero == cw_zero[lo:hi][None, :, None]) & (weight == cw_wt[lo:hi][None, :, None])).all(axis=1)
            m_idx, c_idx = np.nonzero(good)
            if m_idx.size:
                survivors.append(np.concatenate([block[m_idx], cand[c_idx][:, None, :]], axis=1))
        if not survivors:
            return 0, 0, work, False, -np.ones((t, n), dtype=np.int64)
        partial = np.concatenate(survivors, axis=0)
    n_iso = partial.shape[0]
    # extension test for every accepted map at once
    prod = mul_t[gens[:, :, None], units[None, None, :]]  # (t, n_src, U)
    n_fail = 0
    witness = -np.ones((t, n), dtype=np.int64)
    for start in range(0, n_iso, 256):
        block = partial[start:start + 256]  # (B, t, n_img)
        compat = (prod[None, :, None, :, :] == block[:, :, :, None, None]).all(axis=1)  # (B, n_img, n_src, U)
        usable = compat.any(axis=3)
        ext = usable[:, np.arange(n)[None, :], perms].all(axis=2).any(axis=1)
        work += block.shape[0] * perms.shape[0] * n
        bad = np.flatnonzero(~ext)
        if bad.size:
            if n_fail == 0:
                witness = block[bad[0]].copy()
            n_fail += int(bad.size)
            if stop_at_failure:
                return start + int(bad[0]) + 1, n_fail, work, False, witness
    return n_iso, n_fail, work, False, witness


def search_isometries(gens, rhos, level_start, cw_zero, cw_wt, cand, add_t, mul_t, wt,
                      units, perms, budget, stop_at_failure=True):
    args = [
        np.ascontiguousarray(gens, dtype=np.int64),
        np.ascontiguousarray(rhos, dtype=np.int64),
        np.ascontiguousarray(level_start, dtype=np.int64),
        np.ascontiguousarray(cw_zero, dtype=np.bool_),
        np.ascontiguousarray(cw_wt, dtype=np.int64),
        np.ascontiguousarray(cand, dtype=np.int64),
        np.ascontiguousarray(add_t, dtype=np.int64),
        np.ascontiguousarray(mul_t, dtype=np.int64),
        np.ascontiguousarray(wt, dtype=np.int64),
        np.ascontiguousarray(units, dtype=np.int64),
        np.ascontiguousarray(perms, dtype=np.int64),
        int(budget),
        bool(stop_at_failure),
    ]
    if BACKEND == "numba":
        res = _search_isometries_jit(*args)
    else:
        res = _search_isometries_numpy(*args)
    n_iso, n_fail, work, exhausted, witness = res
    return int(n_iso), int(n_fail), int(work), bool(exhausted), witness
