"""Rational weights on finite rings.

A bi-invariant weight is constant on the double unit orbits UxU, so it is
stored as one exact rational per nonzero double-orbit representative plus a
separate value ``w0`` at zero.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from .ideals import all_ideals, cyclic_mask
from .rings import FiniteRing, GaloisField, MatrixRing, ResidueRing, RingElement, RingMismatchError, orbit_partition


class WeightError(ValueError):
    pass


class NotBiInvariant(WeightError):
    def __init__(self, message: str, witness: tuple):
        super().__init__(message)
        self.witness = witness


def parse_rational(value) -> Fraction:
    """Exact rational from an int, a Fraction or a string ``"p/q"``.

    Floats are refused: binary floating point cannot carry exact weights.
    """
    if isinstance(value, bool):
        raise WeightError(f"not a rational literal: {value!r}")
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise WeightError(f"not a rational literal: {value!r}") from None
    raise WeightError(f"not a rational literal: {value!r} (write rationals as strings 'p/q')")


def format_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True, eq=False)
class Weight:
    ring: FiniteRing
    values: Mapping[int, Fraction]
    w0: Fraction = Fraction(0)
    name: str = "table"
    params: dict = field(default_factory=dict)

    @cached_property
    def _double(self):
        return orbit_partition(self.ring, "double")

    def __call__(self, x) -> Fraction:
        if isinstance(x, RingElement):
            if x.ring is not self.ring:
                raise RingMismatchError("element from another ring")
            x = x.index
        x = int(x)
        if x == 0:
            return self.w0
        return self.values[int(self._double.rep[x])]

    @cached_property
    def element_values(self) -> list[Fraction]:
        rep = self._double.rep
        out = [self.values.get(int(r), self.w0) for r in rep]
        out[0] = self.w0
        return out

    def with_w0(self, w0) -> "Weight":
        return Weight(self.ring, self.values, parse_rational(w0), self.name, self.params)

    def scaled_integers(self) -> tuple[np.ndarray, int]:
        """Element values times the lcm of denominators, as int64, and that lcm."""
        vals = self.element_values
        scale = math.lcm(*(v.denominator for v in vals))
        ints = [int(v * scale) for v in vals]
        if max(abs(v) for v in ints) * max(1, self.ring.order) >= 2**62:
            raise WeightError("weight values too large for integer kernels")
        return np.array(ints, dtype=np.int64), scale

    def orbit_table(self) -> dict[str, Fraction]:
        """Values keyed by the labels of the double-orbit representatives."""
        out = {self.ring.label(0): self.w0}
        for r in sorted(self.values):
            out[self.ring.label(r)] = self.values[r]
        return out

    def to_json(self) -> dict:
        return {
            "kind": "table",
            "name": self.name,
            "values": {k: format_rational(v) for k, v in self.orbit_table().items()},
        }

    def __repr__(self) -> str:
        vals = ", ".join(f"{k}: {format_rational(v)}" for k, v in self.orbit_table().items())
        return f"Weight({self.name}; {vals})"


def _find_units(ring: FiniteRing, x: int, y: int) -> tuple[int, int] | None:
    """Units (u, v) with u*x*v == y, searched exhaustively when affordable."""
    units = ring.units
    if units.size**2 > 10**6:
        return None
    left = ring.mul(units, x)
    for v in units:
        hits = np.flatnonzero(ring.mul(left, v) == y)
        if hits.size:
            return int(units[hits[0]]), int(v)
    return None


def make_weight(ring: FiniteRing, table: Mapping, w0=None, name: str = "table") -> Weight:
    """Build a bi-invariant weight from element- or orbit-labelled rationals.

    Keys are element indices or labels.  Every nonzero double orbit needs at
    least one entry; all entries inside one orbit must agree.
    """
    double = orbit_partition(ring, "double")
    values: dict[int, Fraction] = {}
    seen_at: dict[int, int] = {}
    zero_value = None
    for key, raw in table.items():
        x = ring.index_of(key)
        val = parse_rational(raw)
        if x == 0:
            zero_value = val
            continue
        r = int(double.rep[x])
        if r in values and values[r] != val:
            y0 = seen_at[r]
            units = _find_units(ring, y0, x)
            witness = (ring.label(y0), ring.label(x)) + ((ring.label(units[0]), ring.label(units[1])) if units else ())
            raise NotBiInvariant(
                f"weight is not bi-invariant: w({ring.label(y0)}) = {format_rational(values[r])} but "
                f"w({ring.label(x)}) = {format_rational(val)}"
                + (f" with {ring.label(x)} = {ring.label(units[0])}*{ring.label(y0)}*{ring.label(units[1])}"
                   if units else ""),
                witness,
            )
        values.setdefault(r, val)
        seen_at.setdefault(r, x)
    missing = [int(r) for r in double.representatives if r != 0 and int(r) not in values]
    if missing:
        raise WeightError(f"missing weight value for element {ring.label(missing[0])} (and its orbit)")
    if w0 is not None:
        w0 = parse_rational(w0)
    elif zero_value is not None:
        w0 = zero_value
    else:
        w0 = Fraction(0)
    return Weight(ring, values, w0, name)


def _rank_over_field(ring: MatrixRing, x: int) -> int:
    f = ring.base
    add_t, mul_t = f.tables()
    neg = f.neg(np.arange(f.order))
    inv = np.zeros(f.order, dtype=np.int64)
    for a in range(1, f.order):
        inv[a] = int(np.flatnonzero(mul_t[a] == f.one)[0])
    m = [list(map(int, row)) for row in ring.decode(x)]
    rank, rows, cols = 0, ring.n, ring.n
    for c in range(cols):
        pivot = next((r for r in range(rank, rows) if m[r][c]), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        scale = inv[m[rank][c]]
        m[rank] = [int(mul_t[scale, v]) for v in m[rank]]
        for r in range(rows):
            if r != rank and m[r][c]:
                factor = neg[m[r][c]]
                m[r] = [int(add_t[a, mul_t[factor, b]]) for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


def matrix_rank(ring: MatrixRing, x: int) -> int:
    if not isinstance(ring, MatrixRing) or not isinstance(ring.base, GaloisField):
        raise WeightError("rank is defined here only for Mat(n, GF(q))")
    return _rank_over_field(ring, x)


def builtin_weight(ring: FiniteRing, kind: str, gamma=None, ranks: Sequence | None = None) -> Weight:
    double = orbit_partition(ring, "double")
    reps = [int(r) for r in double.representatives if r != 0]
    if kind == "hamming":
        return Weight(ring, {r: Fraction(1) for r in reps}, name="hamming")
    if kind == "homogeneous":
        g = parse_rational(gamma) if gamma is not None else Fraction(1)
        lattice = all_ideals(ring, "left")
        left = orbit_partition(ring, "left")
        values = {}
        for r in reps:
            ideal = lattice.find(cyclic_mask(ring, r, "left"))
            mu = lattice.mobius(0, ideal.id)
            values[r] = g * (1 - Fraction(mu, left.sizes[int(left.rep[r])]))
        return Weight(ring, values, name="homogeneous", params={"gamma": format_rational(g)})
    if kind == "lee":
        if not isinstance(ring, ResidueRing) or ring.m not in (2, 3, 4, 6):
            raise WeightError("the Lee weight is bi-invariant only on Z(m) for m in {2, 3, 4, 6}")
        table = {x: min(x, ring.m - x) for x in range(ring.m)}
        return make_weight(ring, table, name="lee")
    if kind == "rank":
        if not isinstance(ring, MatrixRing) or not isinstance(ring.base, GaloisField):
            raise WeightError("the rank weight needs Mat(n, GF(q))")
        n = ring.n
        if ranks is None:
            vals = [Fraction(k) for k in range(n + 1)]
        else:
            vals = [parse_rational(v) for v in ranks]
            if len(vals) == n:
                vals = [Fraction(0)] + vals
            if len(vals) != n + 1:
                raise WeightError(f"rank weight on {ring.spec} needs {n} values (ranks 1..{n})")
        values = {r: vals[matrix_rank(ring, r)] for r in reps}
        return Weight(ring, values, vals[0], name="rank",
                      params={"ranks": [format_rational(v) for v in vals[1:]]})
    raise WeightError(f"unknown weight kind {kind!r}")


def random_weight(ring: FiniteRing, rng: random.Random, zero_prob: float = 0.0, bound: int = 6,
                  max_den: int = 3, w0=0) -> Weight:
    """Random bi-invariant weight with small rational values.

    Each orbit value is zero with probability ``zero_prob``.
    """
    double = orbit_partition(ring, "double")
    values = {}
    for r in double.representatives:
        if r == 0:
            continue
        if rng.random() < zero_prob:
            values[int(r)] = Fraction(0)
        else:
            values[int(r)] = Fraction(rng.randint(-bound, bound), rng.randint(1, max_den))
    return Weight(ring, values, parse_rational(w0), name="random")


def weight_from_json(ring: FiniteRing, data: Mapping) -> Weight:
    kind = data.get("kind", "table")
    if kind == "table":
        if "values" not in data:
            raise WeightError("table weight needs a 'values' object")
        return make_weight(ring, data["values"], w0=data.get("w0"))
    w = builtin_weight(ring, kind, gamma=data.get("gamma"), ranks=data.get("ranks"))
    if "w0" in data:
        w = w.with_w0(data["w0"])
    return w


# ---------------------------------------------------------------------------
# weights as raw functions on elements


def _as_values(ring: FiniteRing, f) -> list[Fraction]:
    if isinstance(f, Weight):
        return f.element_values
    vals = [parse_rational(v) for v in f]
    if len(vals) != ring.order:
        raise WeightError(f"function needs {ring.order} values, got {len(vals)}")
    return vals


@dataclass(frozen=True)
class SymmetryGroups:
    g_lt: np.ndarray
    g_rt: np.ndarray

    def to_json(self, ring: FiniteRing) -> dict:
        return {"left": [ring.label(u) for u in self.g_lt], "right": [ring.label(u) for u in self.g_rt]}


def _codes(values: list[Fraction]) -> np.ndarray:
    index: dict[Fraction, int] = {}
    return np.array([index.setdefault(v, len(index)) for v in values], dtype=np.int64)


def symmetry_groups(ring: FiniteRing, f) -> SymmetryGroups:
    codes = _codes(_as_values(ring, f))
    xs = ring.elements
    g_lt = [int(u) for u in ring.units if (codes[ring.mul(u, xs)] == codes).all()]
    g_rt = [int(u) for u in ring.units if (codes[ring.mul(xs, u)] == codes).all()]
    for group in (g_lt, g_rt):
        members = set(group)
        arr = np.array(group, dtype=np.int64)
        prods = ring.mul(arr[:, None], arr[None, :])
        assert ring.one in members and set(prods.ravel().tolist()) <= members, "symmetry set is not a subgroup"
    return SymmetryGroups(np.array(g_lt, dtype=np.int64), np.array(g_rt, dtype=np.int64))


def correlate(ring: FiniteRing, w, f) -> list[Fraction]:
    """Right correlation: x -> sum over r of w(r x) f(r)."""
    wv = _as_values(ring, w)
    fv = _as_values(ring, f)
    support = [r for r in range(ring.order) if fv[r] != 0]
    xs = ring.elements
    out = [Fraction(0)] * ring.order
    for r in support:
        prods = ring.mul(r, xs)
        for x in range(ring.order):
            out[x] += wv[prods[x]] * fv[r]
    return out


def point_function(ring: FiniteRing, r: int) -> list[Fraction]:
    out = [Fraction(0)] * ring.order
    out[int(r)] = Fraction(1)
    return out


def eps_left(ring: FiniteRing, r: int) -> list[Fraction]:
    """Uniform distribution on the generators of the left ideal Rr."""
    left = orbit_partition(ring, "left")
    cls = left.rep == left.rep[int(r)]
    c = Fraction(1, int(cls.sum()))
    return [c if m else Fraction(0) for m in cls]


def e_right(ring: FiniteRing, s: int) -> list[Fraction]:
    """Indicator of the generators of the right ideal sR."""
    right = orbit_partition(ring, "right")
    cls = right.rep == right.rep[int(s)]
    return [Fraction(1) if m else Fraction(0) for m in cls]


def extend_to_tuples(w: Weight, v: Sequence) -> Fraction:
    total = Fraction(0)
    for x in v:
        if isinstance(x, RingElement) and x.ring is not w.ring:
            raise RingMismatchError("tuple entry from another ring")
        total += w(x)
    return total
