"""Small finite rings with identity, addressed by dense element indices.

Every ring enumerates its elements as ``0 .. order-1`` with the zero element
at index 0.  Arithmetic is vectorised: ``add``, ``mul`` and ``neg`` accept
integer arrays (or scalars) and broadcast.  Rings built from constructors
compute structurally; ``Table`` rings and small rings use materialised
tables.
"""

from __future__ import annotations

import json
import math
import os
import re
from dataclasses import dataclass
from functools import cached_property
from importlib import resources
from pathlib import Path

import numpy as np

from . import _kernels

DEFAULT_MAX_ORDER = 4096
TABLE_LIMIT = 4096
AUTO_TABLE_LIMIT = 1024
EXHAUSTIVE_AXIOM_LIMIT = 256


class RingSpecError(ValueError):
    """Malformed or unsupported ring spec string."""


class RingMismatchError(ValueError):
    pass


def max_order_default() -> int:
    env = os.environ.get("RINGEXT_MAX_ORDER")
    return int(env) if env else DEFAULT_MAX_ORDER


def prime_power(q: int) -> tuple[int, int] | None:
    """Return ``(p, e)`` with ``q == p**e`` for prime p, or None."""
    if q < 2:
        return None
    p = next(d for d in range(2, q + 1) if q % d == 0)
    e = 0
    while q % p == 0:
        q //= p
        e += 1
    return (p, e) if q == 1 else None


def _digits(x: np.ndarray, base: int, width: int) -> np.ndarray:
    """Little-endian base-``base`` digits of x along a new last axis."""
    x = np.asarray(x, dtype=np.int64)
    powers = base ** np.arange(width, dtype=np.int64)
    return (x[..., None] // powers) % base


def _undigits(d: np.ndarray, base: int) -> np.ndarray:
    powers = base ** np.arange(d.shape[-1], dtype=np.int64)
    return (d * powers).sum(axis=-1)


class FiniteRing:
    """Base class.  Subclasses implement ``_add``, ``_mul``, ``_neg``."""

    spec: str
    order: int
    one: int
    zero = 0

    # -- arithmetic -------------------------------------------------------

    def add(self, a, b):
        if self._tables is None and self.order <= AUTO_TABLE_LIMIT:
            self.tables()
        if self._tables is not None:
            return self._tables[0][a, b].astype(np.int64)
        return self._add(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))

    def mul(self, a, b):
        if self._tables is None and self.order <= AUTO_TABLE_LIMIT:
            self.tables()
        if self._tables is not None:
            return self._tables[1][a, b].astype(np.int64)
        return self._mul(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))

    def neg(self, a):
        return self._neg(np.asarray(a, dtype=np.int64))

    _tables: tuple[np.ndarray, np.ndarray] | None = None

    def tables(self) -> tuple[np.ndarray, np.ndarray]:
        """Materialised ``(add, mul)`` tables; also switches arithmetic to lookups."""
        if self._tables is None:
            if self.order > TABLE_LIMIT:
                raise RingSpecError(f"{self.spec}: order {self.order} too large for tables")
            xs = np.arange(self.order, dtype=np.int64)
            add_t = self._add(xs[:, None], xs[None, :]).astype(np.int32)
            mul_t = self._mul(xs[:, None], xs[None, :]).astype(np.int32)
            self._tables = (add_t, mul_t)
        return self._tables

    @property
    def elements(self) -> np.ndarray:
        return np.arange(self.order, dtype=np.int64)

    def element(self, x) -> "RingElement":
        if isinstance(x, str):
            x = self.index_of(x)
        return RingElement(self, int(x))

    # -- labels -----------------------------------------------------------

    def label(self, x: int) -> str:
        return str(int(x))

    @cached_property
    def _label_index(self) -> dict[str, int]:
        return {self.label(i): i for i in range(self.order)}

    def index_of(self, label) -> int:
        if isinstance(label, (int, np.integer)):
            if not 0 <= label < self.order:
                raise RingSpecError(f"element index {label} out of range for {self.spec}")
            return int(label)
        key = str(label).replace(" ", "")
        try:
            return self._label_index[key]
        except KeyError:
            raise RingSpecError(f"unknown element label {label!r} in {self.spec}") from None

    # -- units ------------------------------------------------------------

    def unit_generators(self) -> np.ndarray:
        """A generating set of the unit group."""
        return self.units

    @cached_property
    def units(self) -> np.ndarray:
        return _closure(self, self.unit_generators())

    @cached_property
    def unit_mask(self) -> np.ndarray:
        mask = np.zeros(self.order, dtype=bool)
        mask[self.units] = True
        return mask

    def additive_generators(self) -> np.ndarray:
        """Generators of the additive group (greedy, as a fallback)."""
        add_t, _ = self.tables()
        seen = np.zeros(self.order, dtype=bool)
        seen[0] = True
        gens = []
        for x in range(self.order):
            if seen[x]:
                continue
            gens.append(x)
            members = np.flatnonzero(seen)
            frontier = members
            while frontier.size:
                nxt = np.unique(add_t[frontier, x])
                nxt = nxt[~seen[nxt]]
                seen[nxt] = True
                frontier = nxt
        return np.array(gens, dtype=np.int64)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.spec} order={self.order}>"

    # cached derived structure (ideal lattices, orbit partitions, ...)
    @cached_property
    def cache(self) -> dict:
        return {}


def _closure(ring: FiniteRing, gens: np.ndarray) -> np.ndarray:
    """Multiplicative monoid generated by ``gens`` together with 1."""
    seen = np.zeros(ring.order, dtype=bool)
    seen[ring.one] = True
    frontier = np.array([ring.one], dtype=np.int64)
    gens = np.asarray(gens, dtype=np.int64)
    while frontier.size:
        prods = ring.mul(frontier[:, None], gens[None, :]).ravel()
        prods = np.unique(prods)
        prods = prods[~seen[prods]]
        seen[prods] = True
        frontier = prods
    return np.flatnonzero(seen)


class ResidueRing(FiniteRing):
    """The integers modulo m."""

    def __init__(self, m: int, spec: str | None = None):
        if m < 2:
            raise RingSpecError("Z(m) needs m >= 2")
        self.m = m
        self.order = m
        self.one = 1
        self.spec = spec or f"Z({m})"

    def _add(self, a, b):
        return (a + b) % self.m

    def _mul(self, a, b):
        return (a * b) % self.m

    def _neg(self, a):
        return (-a) % self.m

    @cached_property
    def units(self) -> np.ndarray:
        return np.array([u for u in range(self.m) if math.gcd(u, self.m) == 1], dtype=np.int64)

    def additive_generators(self) -> np.ndarray:
        return np.array([1], dtype=np.int64)


def _poly_mulmod(a: list[int], b: list[int], modulus: list[int], p: int) -> list[int]:
    """Multiply coefficient lists (little endian) modulo a monic polynomial."""
    e = len(modulus) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    for d in range(len(prod) - 1, e - 1, -1):
        c = prod[d]
        if c:
            for k in range(e + 1):
                prod[d - e + k] = (prod[d - e + k] - c * modulus[k]) % p
    return (prod + [0] * e)[:e]


def _is_irreducible(poly: list[int], p: int) -> bool:
    e = len(poly) - 1
    for d in range(1, e // 2 + 1):
        for v in range(p**d):
            divisor = [(v // p**i) % p for i in range(d)] + [1]
            rem = list(poly)
            for k in range(e, d - 1, -1):
                c = rem[k]
                if c:
                    for i in range(d + 1):
                        rem[k - d + i] = (rem[k - d + i] - c * divisor[i]) % p
            if not any(rem[:d]):
                return False
    return True


def conway_free_modulus(p: int, e: int) -> list[int]:
    """Smallest monic irreducible polynomial of degree e over F_p.

    Coefficient vectors (c_0, ..., c_{e-1}) are ordered by the integer
    sum c_i p^i; the first irreducible one wins.
    """
    for v in range(p**e):
        poly = [(v // p**i) % p for i in range(e)] + [1]
        if _is_irreducible(poly, p):
            return poly
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


class GaloisField(FiniteRing):
    """GF(p^e) with elements sum c_i a^i encoded as sum c_i p^i."""

    def __init__(self, q: int, spec: str | None = None):
        pe = prime_power(q)
        if pe is None:
            raise RingSpecError(f"GF({q}): {q} is not a prime power")
        self.p, self.e = pe
        self.order = q
        self.one = 1
        self.spec = spec or f"GF({q})"
        self.modulus = conway_free_modulus(self.p, self.e) if self.e > 1 else [0, 1]
        self._build_logs()

    def _coeffs(self, x: int) -> list[int]:
        return [(x // self.p**i) % self.p for i in range(self.e)]

    def _index(self, coeffs: list[int]) -> int:
        return sum(c * self.p**i for i, c in enumerate(coeffs))

    def _build_logs(self) -> None:
        q = self.order
        if self.e == 1:
            mulmod = lambda a, b: (a * b) % q  # noqa: E731
        else:
            def mulmod(a, b):
                return self._index(_poly_mulmod(self._coeffs(a), self._coeffs(b), self.modulus, self.p))
        for g in range(2, q) if q > 2 else [1]:
            exp = [1]
            x = 1
            for _ in range(q - 2):
                x = mulmod(x, g)
                if x == 1:
                    break
                exp.append(x)
            if len(exp) == q - 1:
                break
        self.primitive = g
        self._exp = np.array(exp + exp, dtype=np.int64)
        log = np.zeros(q, dtype=np.int64)
        log[np.array(exp)] = np.arange(q - 1)
        self._log = log

    def _add(self, a, b):
        if self.e == 1:
            return (a + b) % self.p
        return _undigits((_digits(a, self.p, self.e) + _digits(b, self.p, self.e)) % self.p, self.p)

    def _neg(self, a):
        if self.e == 1:
            return (-a) % self.p
        return _undigits((-_digits(a, self.p, self.e)) % self.p, self.p)

    def _mul(self, a, b):
        a, b = np.broadcast_arrays(a, b)
        out = self._exp[self._log[a] + self._log[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    @cached_property
    def units(self) -> np.ndarray:
        return np.arange(1, self.order, dtype=np.int64)

    def unit_generators(self) -> np.ndarray:
        return np.array([self.primitive], dtype=np.int64)

    def additive_generators(self) -> np.ndarray:
        return self.p ** np.arange(self.e, dtype=np.int64)

    def label(self, x: int) -> str:
        x = int(x)
        if self.e == 1:
            return str(x)
        terms = []
        for i, c in reversed(list(enumerate(self._coeffs(x)))):
            if not c:
                continue
            mono = "" if i == 0 else ("a" if i == 1 else f"a^{i}")
            coef = str(c) if (c != 1 or i == 0) else ""
            terms.append(coef + mono)
        return "+".join(terms) if terms else "0"


class TruncatedPolyRing(FiniteRing):
    """F_q[x]/(x^k): a commutative chain ring with maximal ideal (x)."""

    def __init__(self, q: int, k: int, spec: str | None = None):
        if k < 1:
            raise RingSpecError("PChain(q,k) needs k >= 1")
        self.field = GaloisField(q)
        self.q, self.k = q, k
        self.order = q**k
        self.one = 1
        self.spec = spec or f"PChain({q},{k})"
        if self.order <= TABLE_LIMIT:
            self.field.tables()

    def _split(self, a):
        return _digits(a, self.q, self.k)

    def _add(self, a, b):
        f = self.field
        return _undigits(f.add(self._split(a), self._split(b)), self.q)

    def _neg(self, a):
        return _undigits(self.field.neg(self._split(a)), self.q)

    def _mul(self, a, b):
        f = self.field
        a, b = np.broadcast_arrays(a, b)
        da, db = self._split(a), self._split(b)
        out = np.zeros(da.shape, dtype=np.int64)
        for i in range(self.k):
            for j in range(self.k - i):
                out[..., i + j] = f.add(out[..., i + j], f.mul(da[..., i], db[..., j]))
        return _undigits(out, self.q)

    @cached_property
    def units(self) -> np.ndarray:
        xs = self.elements
        return xs[xs % self.q != 0]

    def additive_generators(self) -> np.ndarray:
        fg = self.field.additive_generators()
        return np.array([g * self.q**i for i in range(self.k) for g in fg], dtype=np.int64)

    def label(self, x: int) -> str:
        coeffs = [int(c) for c in self._split(int(x))]
        terms = []
        for i in reversed(range(self.k)):
            c = coeffs[i]
            if not c:
                continue
            cl = self.field.label(c)
            if "+" in cl and i > 0:
                cl = f"({cl})"
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if i > 0 and cl == "1":
                cl = ""
            terms.append(cl + mono)
        return "+".join(terms) if terms else "0"


class MatrixRing(FiniteRing):
    """n x n matrices over a small base ring, row-major, entry (0,0) most significant."""

    def __init__(self, n: int, base: FiniteRing, spec: str | None = None):
        if n < 1:
            raise RingSpecError("Mat(n, S) needs n >= 1")
        self.n = n
        self.base = base
        self.order = base.order ** (n * n)
        self.spec = spec or f"Mat({n},{base.spec})"
        add_t, mul_t = base.tables()
        self._badd = add_t.astype(np.int64)
        self._bmul = mul_t.astype(np.int64)
        ident = np.zeros((n, n), dtype=np.int64)
        ident[np.arange(n), np.arange(n)] = base.one
        self.one = int(self.encode(ident))

    def decode(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        powers = self.base.order ** np.arange(self.n * self.n - 1, -1, -1, dtype=np.int64)
        flat = (x[..., None] // powers) % self.base.order
        return flat.reshape(x.shape + (self.n, self.n))

    def encode(self, mats) -> np.ndarray:
        mats = np.asarray(mats, dtype=np.int64)
        flat = mats.reshape(mats.shape[:-2] + (self.n * self.n,))
        powers = self.base.order ** np.arange(self.n * self.n - 1, -1, -1, dtype=np.int64)
        return (flat * powers).sum(axis=-1)

    def _add(self, a, b):
        return self.encode(self._badd[self.decode(a), self.decode(b)])

    def _neg(self, a):
        neg = self.base.neg(np.arange(self.base.order))
        return self.encode(neg[self.decode(a)])

    def _mul(self, a, b):
        a, b = np.broadcast_arrays(a, b)
        shape = a.shape
        da = self.decode(a.ravel())
        db = self.decode(b.ravel())
        out = np.empty(a.size, dtype=np.int64)
        step = 1 << 16
        for s in range(0, a.size, step):
            prod = _kernels.table_matmul(da[s:s + step], db[s:s + step], self._badd, self._bmul)
            out[s:s + step] = self.encode(prod)
        return out.reshape(shape)

    def unit_generators(self) -> np.ndarray:
        n, base = self.n, self.base
        gens = []
        ident = np.zeros((n, n), dtype=np.int64)
        ident[np.arange(n), np.arange(n)] = base.one
        for s in base.additive_generators():
            for i in range(n):
                for j in range(n):
                    if i != j:
                        m = ident.copy()
                        m[i, j] = s
                        gens.append(self.encode(m))
        for u in base.unit_generators():
            m = ident.copy()
            m[0, 0] = u
            gens.append(self.encode(m))
        return np.unique(np.array(gens, dtype=np.int64))

    def label(self, x: int) -> str:
        m = self.decode(int(x))
        rows = ",".join("[" + ",".join(self.base.label(v) for v in row) + "]" for row in m)
        return f"[{rows}]"


class ProductRing(FiniteRing):
    """Direct product, first component most significant."""

    def __init__(self, parts: list[FiniteRing], spec: str | None = None):
        if len(parts) < 1:
            raise RingSpecError("Prod needs at least one component")
        self.parts = parts
        self.sizes = [r.order for r in parts]
        self.order = math.prod(self.sizes)
        self.spec = spec or "Prod(" + ",".join(r.spec for r in parts) + ")"
        self.one = int(self.encode([r.one for r in parts]))

    def split(self, x) -> list[np.ndarray]:
        x = np.asarray(x, dtype=np.int64)
        out = []
        for size in reversed(self.sizes):
            out.append(x % size)
            x = x // size
        return out[::-1]

    def encode(self, comps) -> np.ndarray:
        acc = np.zeros(np.broadcast(*[np.asarray(c) for c in comps]).shape, dtype=np.int64)
        for c, size in zip(comps, self.sizes):
            acc = acc * size + np.asarray(c, dtype=np.int64)
        return acc

    def _add(self, a, b):
        return self.encode([r.add(x, y) for r, x, y in zip(self.parts, self.split(a), self.split(b))])

    def _mul(self, a, b):
        return self.encode([r.mul(x, y) for r, x, y in zip(self.parts, self.split(a), self.split(b))])

    def _neg(self, a):
        return self.encode([r.neg(x) for r, x in zip(self.parts, self.split(a))])

    @cached_property
    def units(self) -> np.ndarray:
        grids = np.meshgrid(*[r.units for r in self.parts], indexing="ij")
        return np.sort(self.encode([g.ravel() for g in grids]))

    def unit_generators(self) -> np.ndarray:
        gens = []
        ones = [r.one for r in self.parts]
        for k, r in enumerate(self.parts):
            for g in r.unit_generators():
                comps = list(ones)
                comps[k] = g
                gens.append(int(self.encode(comps)))
        return np.array(sorted(set(gens)), dtype=np.int64)

    def additive_generators(self) -> np.ndarray:
        gens = []
        zeros = [0] * len(self.parts)
        for k, r in enumerate(self.parts):
            for g in r.additive_generators():
                comps = list(zeros)
                comps[k] = g
                gens.append(int(self.encode(comps)))
        return np.array(gens, dtype=np.int64)

    def label(self, x: int) -> str:
        comps = self.split(int(x))
        return "(" + ",".join(r.label(int(c)) for r, c in zip(self.parts, comps)) + ")"


class TableRing(FiniteRing):
    """A ring given by explicit addition and multiplication tables."""

    def __init__(self, add_t, mul_t, labels=None, spec: str = "Table"):
        add_t = np.asarray(add_t, dtype=np.int64)
        mul_t = np.asarray(mul_t, dtype=np.int64)
        report = validate_table_ring(add_t, mul_t)
        if not report.ok:
            raise RingSpecError(f"{spec}: tables fail ring axioms: {report.summary()}")
        n = add_t.shape[0]
        zero, one = report.zero, report.one
        # move zero to index 0
        perm = np.arange(n)
        perm[[0, zero]] = perm[[zero, 0]]
        inv = np.argsort(perm)
        add_t = inv[add_t[np.ix_(perm, perm)]]
        mul_t = inv[mul_t[np.ix_(perm, perm)]]
        if labels is not None:
            labels = [str(labels[i]).replace(" ", "") for i in perm]
            if len(set(labels)) != n:
                raise RingSpecError(f"{spec}: duplicate element labels")
        self._labels = labels
        self.order = n
        self.one = int(inv[one])
        self.spec = spec
        self._tables = (add_t.astype(np.int32), mul_t.astype(np.int32))

    def _neg(self, a):
        neg = np.argmax(self._tables[0] == 0, axis=1)
        return neg[a]

    @cached_property
    def units(self) -> np.ndarray:
        mul_t = self._tables[1]
        right_inv = mul_t == self.one
        two_sided = right_inv & right_inv.T
        return np.flatnonzero(two_sided.any(axis=1))

    def unit_generators(self) -> np.ndarray:
        # greedy: add a unit whenever it lies outside the group generated so far
        gens: list[int] = []
        covered = np.zeros(self.order, dtype=bool)
        covered[self.one] = True
        for u in self.units:
            if not covered[u]:
                gens.append(int(u))
                covered[_closure(self, np.array(gens))] = True
        return np.array(gens, dtype=np.int64)

    def label(self, x: int) -> str:
        return self._labels[int(x)] if self._labels is not None else str(int(x))


# ---------------------------------------------------------------------------
# elements


@dataclass(frozen=True)
class RingElement:
    ring: FiniteRing
    index: int

    def __post_init__(self):
        if not 0 <= self.index < self.ring.order:
            raise ValueError(f"index {self.index} out of range for {self.ring.spec}")

    def _check(self, other: "RingElement") -> None:
        if not isinstance(other, RingElement) or other.ring is not self.ring:
            raise RingMismatchError("operands belong to different rings")

    def __add__(self, other):
        self._check(other)
        return RingElement(self.ring, int(self.ring.add(self.index, other.index)))

    def __mul__(self, other):
        self._check(other)
        return RingElement(self.ring, int(self.ring.mul(self.index, other.index)))

    def __neg__(self):
        return RingElement(self.ring, int(self.ring.neg(self.index)))

    def __sub__(self, other):
        return self + (-other)

    def __str__(self) -> str:
        return self.ring.label(self.index)

    def __repr__(self) -> str:
        return f"RingElement({self.ring.spec}, {self})"


def element_arith(op: str, a: RingElement, b: RingElement | None = None) -> RingElement:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "neg":
        return -a
    raise ValueError(f"unknown operation {op!r}")


# ---------------------------------------------------------------------------
# table validation


@dataclass
class ValidationReport:
    order: int
    violations: list[tuple[str, tuple]]
    zero: int | None = None
    one: int | None = None
    exhaustive: bool = True

    @property
    def ok(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        return "; ".join(f"{name} fails at {w}" for name, w in self.violations) or "valid"

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "valid": self.ok,
            "exhaustive": self.exhaustive,
            "zero": self.zero,
            "one": self.one,
            "violations": [{"axiom": name, "witness": list(map(int, w))} for name, w in self.violations],
        }


def validate_table_ring(add_t, mul_t, exhaustive: bool | None = None) -> ValidationReport:
    """Check the ring axioms on raw tables and report every violated axiom.

    For orders above ``EXHAUSTIVE_AXIOM_LIMIT`` the triple checks are reduced
    to generating sets: additive associativity via Light's test over additive
    generators, distributivity over additive generators in one slot, and
    multiplicative associativity over triples of additive generators (valid
    once both distributive laws hold).
    """
    add_t = np.asarray(add_t)
    mul_t = np.asarray(mul_t)
    violations: list[tuple[str, tuple]] = []
    if add_t.ndim != 2 or add_t.shape[0] != add_t.shape[1] or mul_t.shape != add_t.shape:
        return ValidationReport(0, [("shape", tuple(add_t.shape) + tuple(mul_t.shape))])
    n = add_t.shape[0]
    for name, t in (("add", add_t), ("mul", mul_t)):
        if t.size and (t.min() < 0 or t.max() >= n):
            bad = np.argwhere((t < 0) | (t >= n))[0]
            violations.append((f"{name} table range", tuple(int(v) for v in bad)))
    if violations:
        return ValidationReport(n, violations)
    add_t = add_t.astype(np.int64)
    mul_t = mul_t.astype(np.int64)
    xs = np.arange(n)

    zeros = [e for e in range(n) if (add_t[e] == xs).all() and (add_t[:, e] == xs).all()]
    zero = zeros[0] if zeros else None
    if zero is None:
        violations.append(("additive identity", ()))
    bad = np.argwhere(add_t != add_t.T)
    if bad.size:
        violations.append(("additive commutativity", tuple(int(v) for v in bad[0])))
    if zero is not None:
        no_inv = np.flatnonzero(~(add_t == zero).any(axis=1))
        if no_inv.size:
            violations.append(("additive inverses", (int(no_inv[0]),)))
    ones = [e for e in range(n) if (mul_t[e] == xs).all() and (mul_t[:, e] == xs).all()]
    one = ones[0] if ones else None
    if one is None:
        violations.append(("multiplicative identity", ()))

    if exhaustive is None:
        exhaustive = n <= EXHAUSTIVE_AXIOM_LIMIT
    if exhaustive:
        found = _kernels.axiom_scan(add_t, mul_t)
        for k, name in enumerate(_kernels.AXIOM_NAMES):
            if found[k, 0] >= 0:
                violations.append((name, tuple(int(v) for v in found[k])))
    elif not violations:
        violations.extend(_reduced_axiom_scan(add_t, mul_t, zero))
    return ValidationReport(n, violations, zero, one, exhaustive)


def _reduced_axiom_scan(add_t, mul_t, zero) -> list[tuple[str, tuple]]:
    n = add_t.shape[0]
    seen = np.zeros(n, dtype=bool)
    seen[zero] = True
    gens = []
    for x in range(n):
        if seen[x]:
            continue
        gens.append(x)
        frontier = np.flatnonzero(seen)
        while frontier.size:
            nxt = np.unique(add_t[frontier[:, None], np.array(gens)[None, :]])
            nxt = nxt[~seen[nxt]]
            seen[nxt] = True
            frontier = nxt
    out = []
    xs = np.arange(n)[:, None]
    ys = np.arange(n)[None, :]
    checks = (
        ("additive associativity", lambda g: add_t[add_t[xs, g], ys] != add_t[xs, add_t[g, ys]]),
        ("left distributivity", lambda g: mul_t[xs, add_t[ys, g]] != add_t[mul_t[xs, ys], mul_t[xs, g]]),
        ("right distributivity", lambda g: mul_t[add_t[ys, g], xs] != add_t[mul_t[ys, xs], mul_t[g, xs]]),
    )
    for name, check in checks:
        for g in gens:
            bad = np.argwhere(check(g))
            if bad.size:
                x, y = bad[0]
                out.append((name, (int(x), int(y), int(g))))
                break
    if not out:
        for a in gens:
            for b in gens:
                ab = mul_t[a, b]
                for c in gens:
                    if mul_t[ab, c] != mul_t[a, mul_t[b, c]]:
                        out.append(("multiplicative associativity", (a, b, c)))
                        return out
    return out


# ---------------------------------------------------------------------------
# ring-spec parsing

_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<num>\d+)|(?P<sym>[(),]))")


def _tokenize(spec: str) -> list[str]:
    tokens = []
    pos = 0
    spec = spec.strip()
    while pos < len(spec):
        if spec.startswith("Table(", pos) or spec.startswith("Table (", pos):
            start = spec.index("(", pos)
            depth, end = 0, start
            for end in range(start, len(spec)):
                if spec[end] == "(":
                    depth += 1
                elif spec[end] == ")":
                    depth -= 1
                    if depth == 0:
                        break
            else:
                raise RingSpecError(f"unbalanced parentheses in {spec!r}")
            tokens.append(("table", spec[start + 1:end].strip()))
            pos = end + 1
            continue
        m = _TOKEN.match(spec, pos)
        if not m or m.end() == pos:
            raise RingSpecError(f"unexpected character {spec[pos]!r} at position {pos} in {spec!r}")
        pos = m.end()
        if m.group("name"):
            tokens.append(("name", m.group("name")))
        elif m.group("num"):
            tokens.append(("num", int(m.group("num"))))
        elif m.group("sym"):
            tokens.append(("sym", m.group("sym")))
    return tokens


class _Parser:
    def __init__(self, spec: str, max_order: int, base_dir: Path | None):
        self.spec = spec
        self.tokens = _tokenize(spec)
        self.pos = 0
        self.max_order = max_order
        self.base_dir = base_dir

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self, kind=None, value=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (value is not None and tok[1] != value):
            want = value or kind or "token"
            raise RingSpecError(f"expected {want!r} but found {tok[1]!r} in {self.spec!r}")
        self.pos += 1
        return tok[1]

    def number(self) -> int:
        return self.take("num")

    def ring(self) -> FiniteRing:
        kind, value = self.peek()
        if kind == "table":
            self.pos += 1
            return load_table_ring(value, base_dir=self.base_dir, max_order=self.max_order)
        name = self.take("name")
        self.take("sym", "(")
        if name == "Z":
            m = self.number()
            self._cap(m)
            r = ResidueRing(m)
        elif name == "GF":
            q = self.number()
            self._cap(q)
            r = GaloisField(q)
        elif name == "ZChain":
            p = self.number()
            self.take("sym", ",")
            k = self.number()
            if prime_power(p) != (p, 1):
                raise RingSpecError(f"ZChain({p},{k}): {p} is not prime")
            self._cap(p**k)
            r = ResidueRing(p**k, spec=f"ZChain({p},{k})")
        elif name == "PChain":
            q = self.number()
            self.take("sym", ",")
            k = self.number()
            if prime_power(q) is None:
                raise RingSpecError(f"PChain({q},{k}): {q} is not a prime power")
            self._cap(q**k)
            r = TruncatedPolyRing(q, k)
        elif name == "Mat":
            n = self.number()
            self.take("sym", ",")
            base = self.ring()
            if not isinstance(base, (ResidueRing, GaloisField, TruncatedPolyRing)):
                raise RingSpecError(f"Mat(n, S): S must be a field or chain ring, got {base.spec}")
            if isinstance(base, ResidueRing) and prime_power(base.m) is None:
                raise RingSpecError(f"Mat(n, S): {base.spec} is not a chain ring")
            self._cap(base.order ** (n * n))
            r = MatrixRing(n, base)
        elif name == "Prod":
            parts = [self.ring()]
            while self.peek() == ("sym", ","):
                self.pos += 1
                parts.append(self.ring())
            self._cap(math.prod(p.order for p in parts))
            r = ProductRing(parts)
        else:
            raise RingSpecError(f"unknown ring constructor {name!r} in {self.spec!r}")
        self.take("sym", ")")
        return r

    def _cap(self, order: int) -> None:
        if order > self.max_order:
            raise RingSpecError(
                f"ring order {order} exceeds the cap {self.max_order} (raise --max-order or RINGEXT_MAX_ORDER)"
            )


def build_ring(spec: str, max_order: int | None = None, base_dir: str | Path | None = None) -> FiniteRing:
    """Parse a ring-spec expression such as ``Mat(2, GF(3))`` and build the ring."""
    if max_order is None:
        max_order = max_order_default()
    parser = _Parser(spec, max_order, Path(base_dir) if base_dir else None)
    ring = parser.ring()
    if parser.pos != len(parser.tokens):
        raise RingSpecError(f"trailing input {parser.peek()[1]!r} in {spec!r}")
    return ring


def _resolve_table_path(name: str, base_dir: Path | None) -> Path:
    candidates = [Path(name)]
    if base_dir is not None:
        candidates.insert(0, base_dir / name)
    data = resources.files("ringext") / "data"
    stem = Path(name).name
    candidates += [Path(str(data / stem)), Path(str(data / (stem + ".json")))]
    for c in candidates:
        if c.is_file():
            return c
    raise RingSpecError(f"table file {name!r} not found")


def load_table_ring(name: str, base_dir: Path | None = None, max_order: int | None = None) -> TableRing:
    """Load ``Table(<path>)``; bundled tables may be named without a path."""
    path = _resolve_table_path(name, base_dir)
    try:
        data = json.loads(path.read_text())
        order = int(data["order"])
        add_t, mul_t = data["add"], data["mul"]
    except (ValueError, KeyError, TypeError) as exc:
        raise RingSpecError(f"table file {name!r}: {exc}") from None
    if max_order is not None and order > max_order:
        raise RingSpecError(f"table ring order {order} exceeds the cap {max_order}")
    if np.shape(add_t) != (order, order) or np.shape(mul_t) != (order, order):
        raise RingSpecError(f"table file {name!r}: tables must be {order}x{order}")
    return TableRing(add_t, mul_t, data.get("labels"), spec=f"Table({name})")


# ---------------------------------------------------------------------------
# unit orbits


@dataclass(frozen=True, eq=False)
class OrbitPartition:
    """Orbits Ux (left), xU (right) or UxU (double) of the unit group."""

    ring: FiniteRing
    kind: str
    rep: np.ndarray  # rep[x] = smallest element index in the class of x

    @cached_property
    def representatives(self) -> np.ndarray:
        return np.unique(self.rep)

    @cached_property
    def classes(self) -> list[np.ndarray]:
        order = np.argsort(self.rep, kind="stable")
        reps = self.rep[order]
        cuts = np.flatnonzero(np.diff(reps)) + 1
        return np.split(order, cuts)

    @cached_property
    def sizes(self) -> dict[int, int]:
        reps, counts = np.unique(self.rep, return_counts=True)
        return dict(zip(reps.tolist(), counts.tolist()))

    def class_of(self, x: int) -> np.ndarray:
        return np.flatnonzero(self.rep == self.rep[x])

    def __len__(self) -> int:
        return len(self.representatives)


def orbit_partition(ring: FiniteRing, kind: str) -> OrbitPartition:
    if kind not in ("left", "right", "double"):
        raise ValueError(f"orbit kind must be left, right or double, not {kind!r}")
    key = ("orbits", kind)
    if key in ring.cache:
        return ring.cache[key]
    xs = ring.elements
    src, dst = [], []
    for g in ring.unit_generators():
        if kind in ("left", "double"):
            src.append(xs)
            dst.append(np.asarray(ring.mul(g, xs), dtype=np.int64))
        if kind in ("right", "double"):
            src.append(xs)
            dst.append(np.asarray(ring.mul(xs, g), dtype=np.int64))
    if src:
        rep = _kernels.orbit_labels(ring.order, np.concatenate(src), np.concatenate(dst))
    else:
        rep = xs.copy()
    part = OrbitPartition(ring, kind, np.asarray(rep, dtype=np.int64))
    ring.cache[key] = part
    return part
