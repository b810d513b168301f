"""Brute-force ground truth for the Extension Property on tiny codes.

Codes are left submodules of R^n.  Vectors of R^n are numbered by mixed
radix with the first coordinate most significant.
"""

from __future__ import annotations

import itertools
import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key

import numpy as np

from . import _kernels, exact
from .ideals import all_ideals
from .orthogonality import OrthMatrix, build_matrix
from .rings import FiniteRing, orbit_partition
from .weights import Weight, WeightError, symmetry_groups

DEFAULT_BUDGET = 10**8
DEFAULT_ORACLE_BUDGET = 10**11
AMBIENT_LIMIT = 4096


class BudgetExceeded(RuntimeError):
    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class NotAnInjectiveMap(ValueError):
    pass


class CounterexampleError(ValueError):
    pass


# ---------------------------------------------------------------------------
# ambient vectors and codes


def all_vectors(ring: FiniteRing, n: int) -> np.ndarray:
    """Every vector of R^n as rows of an (|R|^n, n) array, in index order."""
    grids = np.indices((ring.order,) * n).reshape(n, -1)
    return np.ascontiguousarray(grids.T, dtype=np.int64)


def vector_index(ring: FiniteRing, v) -> np.ndarray | int:
    v = np.asarray(v, dtype=np.int64)
    return np.ravel_multi_index(tuple(np.moveaxis(v, -1, 0)), (ring.order,) * v.shape[-1])


def _vec_add(ring: FiniteRing, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return ring.add(a, b)


def span(ring: FiniteRing, gens: np.ndarray) -> np.ndarray:
    """Membership mask over R^n of the left submodule generated by ``gens``."""
    gens = np.atleast_2d(np.asarray(gens, dtype=np.int64))
    n = gens.shape[1]
    xs = ring.elements
    current = np.zeros((1, n), dtype=np.int64)
    for g in gens:
        multiples = ring.mul(xs[:, None], g[None, :])  # (|R|, n)
        sums = _vec_add(ring, current[:, None, :], multiples[None, :, :]).reshape(-1, n)
        idx = np.unique(vector_index(ring, sums))
        current = all_vectors_cache(ring, n)[idx]
    mask = np.zeros(ring.order**n, dtype=bool)
    mask[vector_index(ring, current)] = True
    return mask


def all_vectors_cache(ring: FiniteRing, n: int) -> np.ndarray:
    key = ("vectors", n)
    if key not in ring.cache:
        ring.cache[key] = all_vectors(ring, n)
    return ring.cache[key]


@dataclass(eq=False)
class LinearCode:
    ring: FiniteRing
    n: int
    generators: np.ndarray
    mask: np.ndarray

    @property
    def size(self) -> int:
        return int(self.mask.sum())

    @property
    def elements(self) -> np.ndarray:
        return all_vectors_cache(self.ring, self.n)[np.flatnonzero(self.mask)]

    def labels(self) -> list[list[str]]:
        return [[self.ring.label(x) for x in g] for g in self.generators]

    def __repr__(self) -> str:
        return f"<LinearCode n={self.n} |C|={self.size} gens={self.labels()}>"


def make_code(ring: FiniteRing, gens) -> LinearCode:
    gens = np.atleast_2d(np.asarray(gens, dtype=np.int64))
    return LinearCode(ring, gens.shape[1], gens, span(ring, gens))


def _minimise(ring: FiniteRing, gens: list[np.ndarray], mask: np.ndarray) -> list[np.ndarray]:
    gens = list(gens)
    i = 0
    while i < len(gens) and len(gens) > 1:
        trial = gens[:i] + gens[i + 1:]
        if (span(ring, np.array(trial)) == mask).all():
            gens = trial
        else:
            i += 1
    return gens


def _code_cmp(a: LinearCode, b: LinearCode) -> int:
    if a.size != b.size:
        return -1 if a.size < b.size else 1
    diff = np.flatnonzero(a.mask != b.mask)
    if diff.size == 0:
        return 0
    return -1 if a.mask[diff[0]] else 1


def enumerate_codes(ring: FiniteRing, n: int, include_zero: bool = False) -> list[LinearCode]:
    """All left submodules of R^n, in canonical order, each with few generators."""
    if ring.order**n > AMBIENT_LIMIT:
        raise BudgetExceeded(f"R^{n} has {ring.order**n} vectors; limit is {AMBIENT_LIMIT}")
    key = ("codes", n)
    if key not in ring.cache:
        vecs = all_vectors_cache(ring, n)
        found: dict[bytes, tuple[list[np.ndarray], np.ndarray]] = {}
        for v in vecs:
            m = span(ring, v[None, :])
            found.setdefault(np.packbits(m).tobytes(), ([v], m))
        items = list(found.values())
        i = 0
        while i < len(items):
            for j in range(i):
                ga, ma = items[i]
                gb, mb = items[j]
                if (ma <= mb).all() or (mb <= ma).all():
                    continue
                gens = ga + gb
                m = span(ring, np.array(gens))
                k = np.packbits(m).tobytes()
                if k not in found:
                    found[k] = (gens, m)
                    items.append(found[k])
            i += 1
        codes = [
            LinearCode(ring, n, np.array(_minimise(ring, g, m)), m) for g, m in items
        ]
        ring.cache[key] = sorted(codes, key=cmp_to_key(_code_cmp))
    codes = ring.cache[key]
    return codes if include_zero else [c for c in codes if c.size > 1]


# ---------------------------------------------------------------------------
# monomial maps and extendability


@dataclass(frozen=True)
class MonomialMap:
    """x -> (x[perm[0]] * units[0], ..., x[perm[n-1]] * units[n-1])."""

    perm: tuple[int, ...]
    units: tuple[int, ...]

    def apply(self, ring: FiniteRing, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        return ring.mul(x[..., list(self.perm)], np.array(self.units, dtype=np.int64))

    def to_json(self, ring: FiniteRing) -> dict:
        return {"perm": list(self.perm), "units": [ring.label(u) for u in self.units]}


@dataclass
class ExtensionResult:
    extendable: bool
    monomial: MonomialMap | None
    searched: int

    def to_json(self, ring: FiniteRing) -> dict:
        return {
            "extendable": self.extendable,
            "monomial": self.monomial.to_json(ring) if self.monomial else None,
            "monomial_maps_searched": self.searched,
        }


def _coefficients(ring: FiniteRing, t: int) -> np.ndarray:
    """All nonzero tuples in R^t, grouped by the position of the last nonzero entry."""
    tuples = all_vectors_cache(ring, t)[1:]
    nz = tuples != 0
    last = t - 1 - np.argmax(nz[:, ::-1], axis=1)
    order = np.argsort(last, kind="stable")
    return tuples[order], np.searchsorted(last[order], np.arange(t + 1))


def _combine(ring: FiniteRing, rhos: np.ndarray, gens: np.ndarray) -> np.ndarray:
    """Rows sum_i rho_i * gens_i for every coefficient tuple."""
    out = np.zeros((rhos.shape[0], gens.shape[1]), dtype=np.int64)
    for i in range(gens.shape[0]):
        out = ring.add(out, ring.mul(rhos[:, i, None], gens[i][None, :]))
    return out


def check_linear_map(ring: FiniteRing, gens: np.ndarray, imgs: np.ndarray) -> None:
    """Raise unless a -> images defines an injective left-linear map on the code."""
    gens = np.atleast_2d(np.asarray(gens, dtype=np.int64))
    imgs = np.atleast_2d(np.asarray(imgs, dtype=np.int64))
    if gens.shape[0] != imgs.shape[0]:
        raise NotAnInjectiveMap("need one image per generator")
    rhos = all_vectors_cache(ring, gens.shape[0])
    src = vector_index(ring, _combine(ring, rhos, gens))
    dst = vector_index(ring, _combine(ring, rhos, imgs))
    seen: dict[int, int] = {}
    back: dict[int, int] = {}
    for s, d in zip(src.tolist(), dst.tolist()):
        if seen.setdefault(s, d) != d:
            raise NotAnInjectiveMap("map is not well defined on the code")
        if back.setdefault(d, s) != s:
            raise NotAnInjectiveMap("map is not injective on the code")


def _permutations(n: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(n))), dtype=np.int64).reshape(-1, n)


def is_extendable(ring: FiniteRing, gens, imgs, w: Weight, budget: int = DEFAULT_BUDGET) -> ExtensionResult:
    """Search all G_rt(w)-monomial maps for one that sends each generator to its image."""
    gens = np.atleast_2d(np.asarray(gens, dtype=np.int64))
    imgs = np.atleast_2d(np.asarray(imgs, dtype=np.int64))
    if gens.shape != imgs.shape:
        raise NotAnInjectiveMap("generators and images differ in shape")
    check_linear_map(ring, gens, imgs)
    n = gens.shape[1]
    units = symmetry_groups(ring, w).g_rt
    size = len(_permutations(n)) * len(units) ** n
    if size > budget:
        raise BudgetExceeded(f"{size} monomial maps exceed the search budget {budget}")
    perms = _permutations(n)
    p, choice = _kernels.monomial_extension(gens, imgs, units, ring.tables()[1], perms)
    if p < 0:
        return ExtensionResult(False, None, size)
    return ExtensionResult(True, MonomialMap(tuple(int(i) for i in perms[p]), tuple(int(u) for u in choice)), size)


# ---------------------------------------------------------------------------
# counterexample construction


def null_vector_integer(w0: OrthMatrix) -> list[int] | None:
    if not w0.square:
        raise ValueError(f"W0 is {w0.shape[0]}x{w0.shape[1]}, not square")
    basis = exact.nullspace(w0.entries)
    return exact.primitive_integer(basis[0]) if basis else None


@dataclass
class CounterexamplePair:
    v: list[int]
    index: list[str]
    g_plus: tuple[int, ...]
    g_minus: tuple[int, ...]
    defect: list[Fraction]
    orbits_plus: list[str]
    orbits_minus: list[str]
    extension: ExtensionResult
    ring: FiniteRing = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.g_plus)

    @property
    def orbit_mismatch(self) -> bool:
        return Counter(self.orbits_plus) != Counter(self.orbits_minus)

    @property
    def verified(self) -> bool:
        return all(d == 0 for d in self.defect) and self.orbit_mismatch and not self.extension.extendable

    def to_json(self) -> dict:
        lab = self.ring.label
        return {
            "null_vector": dict(zip(self.index, self.v)),
            "length": self.n,
            "g_plus": [lab(x) for x in self.g_plus],
            "g_minus": [lab(x) for x in self.g_minus],
            "map": "a*g_plus -> a*g_minus",
            "defect_all_zero": all(d == 0 for d in self.defect),
            "right_orbits_plus": sorted(self.orbits_plus),
            "right_orbits_minus": sorted(self.orbits_minus),
            "orbit_multisets_differ": self.orbit_mismatch,
            "extension_search": self.extension.to_json(self.ring),
            "verified": self.verified,
        }


def build_counterexample(ring: FiniteRing, w: Weight, v: list[int] | None = None,
                         budget: int = DEFAULT_BUDGET) -> CounterexamplePair:
    """Two cyclic codes related by a weight-preserving map that no monomial map extends."""
    if w.w0 != 0:
        raise CounterexampleError("the construction needs w(0) = 0")
    w0 = build_matrix(ring, w, "W0")
    if v is None:
        v = null_vector_integer(w0)
        if v is None:
            raise CounterexampleError("W0 is invertible; there is no null vector")
    v = [int(x) for x in v]
    if len(v) != len(w0.cols) or not any(v):
        raise CounterexampleError(f"need a nonzero vector of length {len(w0.cols)}")
    if any(x != 0 for x in exact.matvec(w0.entries, v)):
        raise CounterexampleError("vector is not in the kernel of W0")
    right = orbit_partition(ring, "right")
    gens = [I.generator for I in all_ideals(ring, "right").principal[1:]]
    plus = [c for c, k in zip(gens, v) if k > 0 for _ in range(k)] + [ring.one]
    minus = [c for c, k in zip(gens, v) if k < 0 for _ in range(-k)] + [ring.one]
    n = max(len(plus), len(minus))
    plus += [0] * (n - len(plus))
    minus += [0] * (n - len(minus))
    gp, gm = np.array(plus, dtype=np.int64), np.array(minus, dtype=np.int64)
    xs = ring.elements
    wv = w.element_values
    defect = []
    for a in xs:
        lhs = sum((wv[x] for x in ring.mul(a, gp)), Fraction(0))
        rhs = sum((wv[x] for x in ring.mul(a, gm)), Fraction(0))
        defect.append(lhs - rhs)
    if any(defect):
        raise AssertionError("weight defect is nonzero for a null vector")
    orbit = lambda x: ring.label(int(right.rep[x]))  # noqa: E731
    extension = is_extendable(ring, gp[None, :], gm[None, :], w, budget)
    return CounterexamplePair(
        v=v,
        index=list(w0.cols),
        g_plus=tuple(plus),
        g_minus=tuple(minus),
        defect=defect,
        orbits_plus=[orbit(x) for x in plus],
        orbits_minus=[orbit(x) for x in minus],
        extension=extension,
        ring=ring,
    )


# ---------------------------------------------------------------------------
# exhaustive oracle


@dataclass
class OracleReport:
    holds: bool | None
    n_max: int
    codes: dict[int, int] = field(default_factory=dict)
    isometries: int = 0
    failures: int = 0
    work: int = 0
    exhausted: bool = False
    witness: dict | None = None
    seconds: float = 0.0

    def to_json(self) -> dict:
        return {
            "extension_property": self.holds,
            "n_max": self.n_max,
            "codes_per_length": {str(k): v for k, v in self.codes.items()},
            "isometries_checked": self.isometries,
            "non_extendable": self.failures,
            "work": self.work,
            "budget_exhausted": self.exhausted,
            "witness": self.witness,
            "seconds": round(self.seconds, 3),
        }


def oracle_extension_property(ring: FiniteRing, w: Weight, n_max: int = 2, budget: int = DEFAULT_ORACLE_BUDGET,
                              stop_at_failure: bool = True) -> OracleReport:
    """Check every injective weight-preserving map on every code of length <= n_max."""
    if w.ring is not ring:
        raise ValueError("weight belongs to another ring")
    if w.w0 != 0:
        raise WeightError("the oracle needs w(0) = 0")
    if ring.order**n_max > AMBIENT_LIMIT:
        raise BudgetExceeded(f"R^{n_max} has {ring.order**n_max} vectors; limit is {AMBIENT_LIMIT}")
    start = time.perf_counter()
    wt, _ = w.scaled_integers()
    add_t, mul_t = ring.tables()
    units = symmetry_groups(ring, w).g_rt
    report = OracleReport(holds=True, n_max=n_max)
    for n in range(1, n_max + 1):
        codes = enumerate_codes(ring, n)
        report.codes[n] = len(codes)
        cand = all_vectors_cache(ring, n)
        perms = _permutations(n)
        for code in codes:
            gens = code.generators
            rhos, level_start = _coefficients(ring, gens.shape[0])
            words = _combine(ring, rhos, gens)
            n_iso, n_fail, work, exhausted, witness = _kernels.search_isometries(
                gens, rhos, level_start, (words == 0).all(axis=1), wt[words].sum(axis=1), cand,
                add_t, mul_t, wt, units, perms, budget - report.work, stop_at_failure)
            report.isometries += n_iso
            report.failures += n_fail
            report.work += work
            if exhausted:
                report.exhausted = True
                report.holds = None
                report.seconds = time.perf_counter() - start
                raise BudgetExceeded(f"oracle budget {budget} exhausted", report)
            if n_fail and report.witness is None:
                report.holds = False
                report.witness = {
                    "length": n,
                    "generators": code.labels(),
                    "images": [[ring.label(x) for x in row] for row in witness],
                }
                if stop_at_failure:
                    report.seconds = time.perf_counter() - start
                    return report
    report.seconds = time.perf_counter() - start
    return report
