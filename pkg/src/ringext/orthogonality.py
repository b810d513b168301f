"""Orthogonality matrices, their determinants and the extension criterion.

Conventions: left principal ideals index rows of W0/W/T and columns of Q;
right principal ideals index columns of W0/W/T and rows of Q.  Every index
set is listed in canonical ideal order (cardinality, then sorted element
set), and determinant identities hold up to sign.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import exact
from .ideals import Ideal, IdealLattice, all_ideals, annihilator, classify_ring, cyclic_mask, socle
from .rings import FiniteRing
from .weights import Weight, format_rational, parse_rational

ORDERING = "canonical: by cardinality, then lexicographic sorted element set"
KINDS = ("W0", "W", "Q", "T", "WQ")


class NotPrincipalIdealRing(ValueError):
    """Raised where the criterion needs a principal ideal ring."""

    def __init__(self, message: str, det_w0: Fraction | None = None):
        super().__init__(message)
        self.det_w0 = det_w0


class InterpolationFault(AssertionError):
    pass


@dataclass
class OrthMatrix:
    kind: str
    rows: list[str]
    cols: list[str]
    entries: list[list[Fraction]]
    row_side: str
    col_side: str
    ring_spec: str = ""
    ordering: str = ORDERING
    w0: Fraction | None = None

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.cols)

    @property
    def square(self) -> bool:
        return len(self.rows) == len(self.cols)

    def det(self) -> Fraction:
        if not self.square:
            raise ValueError(f"{self.kind} is {self.shape[0]}x{self.shape[1]}, not square")
        return exact.bareiss_det(self.entries)

    def array(self) -> np.ndarray:
        return np.array(self.entries, dtype=object)

    def to_json(self) -> dict:
        out = {
            "kind": self.kind,
            "ring": self.ring_spec,
            "ordering": self.ordering,
            "row_side": self.row_side,
            "col_side": self.col_side,
            "rows": list(self.rows),
            "cols": list(self.cols),
            "entries": [[format_rational(x) for x in row] for row in self.entries],
        }
        if self.w0 is not None:
            out["w0"] = format_rational(self.w0)
        return out

    @classmethod
    def from_json(cls, data: dict) -> "OrthMatrix":
        return cls(
            kind=data["kind"],
            rows=list(data["rows"]),
            cols=list(data["cols"]),
            entries=[[parse_rational(x) for x in row] for row in data["entries"]],
            row_side=data["row_side"],
            col_side=data["col_side"],
            ring_spec=data.get("ring", ""),
            ordering=data.get("ordering", ORDERING),
            w0=parse_rational(data["w0"]) if "w0" in data else None,
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, OrthMatrix):
            return NotImplemented
        return self.to_json() == other.to_json()


@dataclass
class _Frame:
    left: IdealLattice
    right: IdealLattice
    lp: list[Ideal]
    rp: list[Ideal]

    @property
    def left_gens(self) -> np.ndarray:
        return np.array([I.generator for I in self.lp], dtype=np.int64)

    @property
    def right_gens(self) -> np.ndarray:
        return np.array([I.generator for I in self.rp], dtype=np.int64)


def _frame(ring: FiniteRing) -> _Frame:
    left, right = all_ideals(ring, "left"), all_ideals(ring, "right")
    return _Frame(left, right, left.principal, right.principal)


def _weight_block(ring: FiniteRing, w: Weight, rows: np.ndarray, cols: np.ndarray, zero_value: Fraction):
    vals = list(w.element_values)
    vals[0] = zero_value
    prods = ring.mul(rows[:, None], cols[None, :])
    return [[vals[int(p)] for p in row] for row in prods]


def _names(ideals: list[Ideal]) -> list[str]:
    return [I.name() for I in ideals]


def build_matrix(ring: FiniteRing, w: Weight | None, kind: str, w0=None) -> OrthMatrix:
    if kind not in KINDS:
        raise ValueError(f"unknown matrix kind {kind!r}; expected one of {', '.join(KINDS)}")
    if kind in ("W0", "W", "WQ") and w is None:
        raise ValueError(f"{kind} needs a weight")
    if w is not None and w.ring is not ring:
        raise ValueError("weight belongs to another ring")
    f = _frame(ring)
    spec = ring.spec
    if kind == "W0":
        lp, rp = f.lp[1:], f.rp[1:]
        entries = _weight_block(ring, w, f.left_gens[1:], f.right_gens[1:], Fraction(0))
        return OrthMatrix("W0", _names(lp), _names(rp), entries, "left", "right", spec)
    if kind == "W":
        z = w.w0 if w0 is None else parse_rational(w0)
        entries = _weight_block(ring, w, f.left_gens, f.right_gens, z)
        return OrthMatrix("W", _names(f.lp), _names(f.rp), entries, "left", "right", spec, w0=z)
    if kind == "Q":
        mu = f.right.mobius
        perp = [annihilator(I).id for I in f.lp]
        entries = [[Fraction(mu(p, c.id)) for p in perp] for c in f.rp]
        return OrthMatrix("Q", _names(f.rp), _names(f.lp), entries, "right", "left", spec)
    if kind == "T":
        leq = f.right.leq
        perp = [annihilator(I).id for I in f.lp]
        entries = [[Fraction(int(leq[b.id, p])) for b in f.rp] for p in perp]
        return OrthMatrix("T", _names(f.lp), _names(f.rp), entries, "left", "right", spec)
    wm = build_matrix(ring, w, "W", w0)
    q = build_matrix(ring, None, "Q")
    entries = exact.matmul(wm.entries, q.entries)
    return OrthMatrix("WQ", _names(f.lp), _names(f.lp), entries, "left", "left", spec, w0=wm.w0)


# ---------------------------------------------------------------------------
# diagonal factors and the criterion


@dataclass(frozen=True)
class Factor:
    ideal: str
    full: Fraction
    nonzero: Fraction
    in_socle: bool


def _require_pir(ring: FiniteRing) -> None:
    cls = classify_ring(ring)
    if not cls.is_pir:
        raise NotPrincipalIdealRing(
            f"{ring.spec} is not a principal ideal ring "
            f"({cls.right_ideals - cls.right_principal} non-principal right ideals)"
        )


def _factor_of(ring: FiniteRing, w: Weight, right: IdealLattice, a: Ideal) -> tuple[Fraction, Fraction]:
    """Sum of w(d) mu(0, dR) over principal dR <= aR; also without dR = 0."""
    mu = right.mobius
    nonzero = Fraction(0)
    for d in right.principal[1:]:
        if right.leq[d.id, a.id]:
            m = mu(0, d.id)
            if m:
                nonzero += w(d.generator) * m
    return w.w0 + nonzero, nonzero


def diagonal_factors(ring: FiniteRing, w: Weight, require_pir: bool = True) -> list[Factor]:
    """Factor for every right principal ideal aR, zero ideal included.

    With ``require_pir=False`` the sums still run over principal dR only,
    which is a diagnostic and not a criterion on other rings.
    """
    if require_pir:
        _require_pir(ring)
    right = all_ideals(ring, "right")
    soc = socle(ring, "right")
    out = []
    for a in right.principal:
        full, nonzero = _factor_of(ring, w, right, a)
        out.append(Factor(a.name(), full, nonzero, bool(right.leq[a.id, soc.id])))
    return out


@dataclass
class CriterionVerdict:
    """Nonzero-restricted factors for every nonzero aR; ``evaluated`` lists
    the ideals the verdict was decided on (those in the socle when reduced)."""

    factors: dict[str, Fraction]
    evaluated: list[str]
    socle_reduced: bool
    passes: bool
    det_w0: Fraction
    det_via_factorization: Fraction
    ordering: str = ORDERING
    failing: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "passes": self.passes,
            "socle_reduced": self.socle_reduced,
            "factors": {k: format_rational(v) for k, v in self.factors.items()},
            "evaluated": list(self.evaluated),
            "failing": list(self.failing),
            "det_W0": format_rational(self.det_w0),
            "det_via_factorization": format_rational(self.det_via_factorization),
            "ordering": self.ordering,
        }


def criterion(ring: FiniteRing, w: Weight, use_socle_reduction: bool = True) -> CriterionVerdict:
    if w.ring is not ring:
        raise ValueError("weight belongs to another ring")
    if w.w0 != 0:
        raise ValueError(f"criterion needs w(0) = 0, got {format_rational(w.w0)}")
    try:
        _require_pir(ring)
    except NotPrincipalIdealRing as exc:
        raise NotPrincipalIdealRing(str(exc), det_w0=det_exact(build_matrix(ring, w, "W0"))) from None
    table = diagonal_factors(ring, w)[1:]
    chosen = [f for f in table if f.in_socle] if use_socle_reduction else table
    failing = [f.ideal for f in chosen if f.nonzero == 0]
    product = Fraction(1)
    for f in table:
        product *= f.nonzero
    return CriterionVerdict(
        factors={f.ideal: f.nonzero for f in table},
        evaluated=[f.ideal for f in chosen],
        socle_reduced=use_socle_reduction,
        passes=not failing,
        det_w0=det_exact(build_matrix(ring, w, "W0")),
        det_via_factorization=product,
        failing=failing,
    )


# ---------------------------------------------------------------------------
# determinant tools


def det_exact(m: OrthMatrix) -> Fraction:
    return m.det()


def det_factorized(ring: FiniteRing, w: Weight) -> Fraction:
    """Product of the nonzero-restricted factors over all nonzero aR (sign not fixed)."""
    product = Fraction(1)
    for f in diagonal_factors(ring, w)[1:]:
        product *= f.nonzero
    return product


@dataclass(frozen=True)
class W0Polynomial:
    coefficients: list[Fraction]
    det_w0: Fraction

    def to_json(self) -> dict:
        return {
            "coefficients": [format_rational(c) for c in self.coefficients],
            "det_W0": format_rational(self.det_w0),
        }


def det_poly_in_w0(ring: FiniteRing, w: Weight) -> W0Polynomial:
    """det W as a polynomial in the value at zero, recovered by interpolation.

    Raises InterpolationFault if the constant term is nonzero or the linear
    coefficient differs from det W0.
    """
    dim = len(all_ideals(ring, "left").principal)
    xs = [Fraction(k) for k in range(dim + 1)]
    ys = [build_matrix(ring, w, "W", x).det() for x in xs]
    coef = exact.interpolate(xs, ys)
    w0_matrix = build_matrix(ring, w, "W0")
    d0 = w0_matrix.det() if w0_matrix.square else None
    if coef[0] != 0:
        raise InterpolationFault(f"det W has constant term {coef[0]} in w0")
    if d0 is not None and coef[1] != d0:
        raise InterpolationFault(f"linear coefficient {coef[1]} differs from det W0 = {d0}")
    while len(coef) > 1 and coef[-1] == 0:
        coef.pop()
    return W0Polynomial(coef, d0)


@dataclass
class TriangularityReport:
    lower_triangular: bool
    violations: list[tuple[str, str]]
    diagonal: list[Fraction]
    expected: list[Fraction]

    @property
    def diagonal_matches(self) -> bool:
        return self.diagonal == self.expected

    @property
    def ok(self) -> bool:
        return self.lower_triangular and self.diagonal_matches

    def to_json(self) -> dict:
        return {
            "lower_triangular": self.lower_triangular,
            "diagonal_matches": self.diagonal_matches,
            "violations": [list(v) for v in self.violations],
            "diagonal": [format_rational(x) for x in self.diagonal],
            "expected": [format_rational(x) for x in self.expected],
        }


def triangularity(ring: FiniteRing, w: Weight) -> TriangularityReport:
    """Check that WQ vanishes off the containment relation and its diagonal."""
    f = _frame(ring)
    wq = build_matrix(ring, w, "WQ")
    violations = []
    for i, a in enumerate(f.lp):
        for j, b in enumerate(f.lp):
            if not f.left.leq[b.id, a.id] and wq.entries[i][j] != 0:
                violations.append((a.name(), b.name()))
    diagonal = [wq.entries[i][i] for i in range(len(f.lp))]
    expected = []
    for a in f.lp:
        gen = a.generator
        a_right = f.right.find(cyclic_mask(ring, gen, "right"))
        expected.append(_factor_of(ring, w, f.right, a_right)[0])
    return TriangularityReport(not violations, violations, diagonal, expected)


def tq_is_identity(ring: FiniteRing) -> bool:
    t = build_matrix(ring, None, "T")
    q = build_matrix(ring, None, "Q")
    if not (t.square and q.square):
        return False
    prod = exact.matmul(t.entries, q.entries)
    n = len(prod)
    return all(prod[i][j] == (1 if i == j else 0) for i in range(n) for j in range(n))
