"""One-sided ideals, their lattices, annihilators, socles and Möbius values."""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from .rings import FiniteRing, orbit_partition

MAX_IDEALS = 2**14


class IdealExplosion(RuntimeError):
    pass


@dataclass(eq=False)
class Ideal:
    """A left or right ideal stored as a membership mask.

    ``spanning`` lists elements s whose principal ideals (Rs or sR) sum to
    the ideal; containment tests only need those.  ``generators`` is the
    full set of single generators, empty when the ideal is not principal.
    """

    ring: FiniteRing
    side: str
    mask: np.ndarray
    spanning: tuple[int, ...]
    generators: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    id: int = -1

    @property
    def size(self) -> int:
        return int(self._size)

    @functools.cached_property
    def _size(self) -> int:
        return int(self.mask.sum())

    @functools.cached_property
    def elements(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    @functools.cached_property
    def key(self) -> bytes:
        return np.packbits(self.mask).tobytes()

    @property
    def principal(self) -> bool:
        return len(self.generators) > 0

    @property
    def generator(self) -> int | None:
        """Canonical generator: the smallest element index generating the ideal."""
        return int(self.generators[0]) if self.principal else None

    def __contains__(self, x) -> bool:
        return bool(self.mask[int(x)])

    def __le__(self, other: "Ideal") -> bool:
        return bool(self.size <= other.size and other.mask[list(self.spanning)].all())

    def name(self) -> str:
        """Short label such as ``2R`` or ``R2`` (``0``/``R`` for the extremes)."""
        if self.size == 1:
            return "0"
        if self.size == self.ring.order:
            return "R"
        gens = [self.generator] if self.principal else list(self.spanning)
        parts = []
        for x in gens:
            g = self.ring.label(x)
            g = f"({g})" if "+" in g and g[0] not in "[(" else g
            parts.append(f"{g}R" if self.side == "right" else f"R{g}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"<Ideal {self.side} {self.name()} |I|={self.size} id={self.id}>"


def _canonical_cmp(a: Ideal, b: Ideal) -> int:
    """Order by cardinality, then lexicographically by sorted element set."""
    if a.size != b.size:
        return -1 if a.size < b.size else 1
    diff = np.flatnonzero(a.mask != b.mask)
    if diff.size == 0:
        return 0
    return -1 if a.mask[diff[0]] else 1


def canonical_sort(ideals: list[Ideal]) -> list[Ideal]:
    return sorted(ideals, key=functools.cmp_to_key(_canonical_cmp))


def cyclic_mask(ring: FiniteRing, x: int, side: str) -> np.ndarray:
    xs = ring.elements
    prods = ring.mul(xs, x) if side == "left" else ring.mul(x, xs)
    mask = np.zeros(ring.order, dtype=bool)
    mask[prods] = True
    return mask


def _principal_list(ring: FiniteRing, side: str) -> list[Ideal]:
    part = orbit_partition(ring, side)
    out = []
    for cls in part.classes:
        x = int(cls[0])
        out.append(Ideal(ring, side, cyclic_mask(ring, x, side), (x,), np.sort(cls)))
    return canonical_sort(out)


def _explicit_sum(ring: FiniteRing, a: Ideal, b: Ideal) -> np.ndarray:
    mask = np.zeros(ring.order, dtype=bool)
    ea, eb = a.elements, b.elements
    step = max(1, (1 << 22) // max(1, eb.size))
    for s in range(0, ea.size, step):
        mask[ring.add(ea[s:s + step, None], eb[None, :]).ravel()] = True
    return mask


class IdealLattice:
    """All ideals of one side, in canonical order, with containment relation."""

    def __init__(self, ring: FiniteRing, side: str, ideals: list[Ideal]):
        self.ring = ring
        self.side = side
        self.ideals = canonical_sort(ideals)
        for i, ideal in enumerate(self.ideals):
            ideal.id = i
        self._by_key = {I.key: I for I in self.ideals}
        n = len(self.ideals)
        leq = np.zeros((n, n), dtype=bool)
        for i, a in enumerate(self.ideals):
            span = list(a.spanning)
            for j, b in enumerate(self.ideals):
                leq[i, j] = a.size <= b.size and b.mask[span].all()
        self.leq = leq
        self.principal_ids = [I.id for I in self.ideals if I.principal]
        self.mobius = MobiusTable(self)

    def __len__(self) -> int:
        return len(self.ideals)

    def __getitem__(self, i: int) -> Ideal:
        return self.ideals[i]

    def __iter__(self):
        return iter(self.ideals)

    @property
    def zero(self) -> Ideal:
        return self.ideals[0]

    @property
    def top(self) -> Ideal:
        return self.ideals[-1]

    @property
    def principal(self) -> list[Ideal]:
        return [self.ideals[i] for i in self.principal_ids]

    def find(self, mask: np.ndarray) -> Ideal | None:
        return self._by_key.get(np.packbits(mask).tobytes())

    def join(self, i: int, j: int) -> int:
        upper = np.flatnonzero(self.leq[i] & self.leq[j])
        return int(upper[0])  # canonical order refines containment

    def meet(self, i: int, j: int) -> int:
        lower = np.flatnonzero(self.leq[:, i] & self.leq[:, j])
        return int(lower[-1])

    def covers(self) -> list[tuple[int, int]]:
        """Hasse diagram edges (lower, upper)."""
        strict = self.leq & ~np.eye(len(self), dtype=bool)
        edges = []
        for i, j in zip(*np.nonzero(strict)):
            between = strict[i] & strict[:, j]
            if not between.any():
                edges.append((int(i), int(j)))
        return edges

    def atoms(self) -> list[int]:
        return [j for i, j in self.covers() if i == 0]


def all_ideals(ring: FiniteRing, side: str) -> IdealLattice:
    """The lattice of all ideals of ``side``, as the join-closure of the principal ones."""
    if side not in ("left", "right"):
        raise ValueError(f"side must be left or right, not {side!r}")
    key = ("lattice", side)
    if key in ring.cache:
        return ring.cache[key]
    ideals = _principal_list(ring, side)
    by_key = {I.key: I for I in ideals}
    pending = [(i, j) for j in range(len(ideals)) for i in range(j)]
    while pending:
        i, j = pending.pop()
        a, b = ideals[i], ideals[j]
        if a <= b or b <= a:
            continue
        meet_size = int((a.mask & b.mask).sum())
        size = a.size * b.size // meet_size
        hit = next((K for K in ideals if K.size == size and a <= K and b <= K), None)
        if hit is not None:
            continue
        mask = _explicit_sum(ring, a, b)
        new = Ideal(ring, side, mask, tuple(sorted(set(a.spanning) | set(b.spanning))))
        if new.key in by_key:  # pragma: no cover - the size test already covers this
            continue
        by_key[new.key] = new
        ideals.append(new)
        if len(ideals) > MAX_IDEALS:
            raise IdealExplosion(f"{ring.spec}: more than {MAX_IDEALS} {side} ideals")
        k = len(ideals) - 1
        pending.extend((m, k) for m in range(k))
    lattice = IdealLattice(ring, side, ideals)
    ring.cache[key] = lattice
    return lattice


def principal_ideals(ring: FiniteRing, side: str) -> list[Ideal]:
    return all_ideals(ring, side).principal


def annihilator(ideal: Ideal) -> Ideal:
    """Right annihilator of a left ideal, or left annihilator of a right ideal.

    The result is the matching member of the other side's lattice.
    """
    ring = ideal.ring
    xs = ring.elements
    mask = np.ones(ring.order, dtype=bool)
    for s in ideal.spanning:
        prods = ring.mul(s, xs) if ideal.side == "left" else ring.mul(xs, s)
        mask &= prods == 0
    other = "right" if ideal.side == "left" else "left"
    found = all_ideals(ring, other).find(mask)
    if found is None:  # pragma: no cover - annihilators are ideals, hence in the lattice
        raise AssertionError("annihilator missing from ideal lattice")
    return found


class MobiusTable:
    """Memoised Möbius function of an ideal lattice, keyed by ideal ids."""

    def __init__(self, lattice: IdealLattice):
        self.lattice = lattice
        self.values: dict[tuple[int, int], int] = {}

    def __call__(self, lower: int, upper: int) -> int:
        key = (lower, upper)
        if key in self.values:
            return self.values[key]
        leq = self.lattice.leq
        if not leq[lower, upper]:
            value = 0
        elif lower == upper:
            value = 1
        else:
            below = np.flatnonzero(leq[lower] & leq[:, upper])
            value = -sum(self(lower, t) for t in below if t != upper)
        self.values[key] = value
        return value

    def row(self, lower: int) -> list[int]:
        return [self(lower, j) for j in range(len(self.lattice))]


def mobius(lattice: IdealLattice, lower: Ideal | int, upper: Ideal | int) -> int:
    i = lower if isinstance(lower, int) else lower.id
    j = upper if isinstance(upper, int) else upper.id
    return lattice.mobius(i, j)


def socle(ring: FiniteRing, side: str) -> Ideal:
    """Sum of all minimal nonzero ideals of the given side."""
    lattice = all_ideals(ring, side)
    acc = 0
    for a in lattice.atoms():
        acc = lattice.join(acc, a)
    return lattice[acc]


@dataclass(frozen=True)
class RingClass:
    is_frobenius: bool
    is_pir: bool
    socles_coincide: bool
    left_principal: int
    right_principal: int
    left_ideals: int
    right_ideals: int

    def to_json(self) -> dict:
        return dict(self.__dict__)


def classify_ring(ring: FiniteRing) -> RingClass:
    left, right = all_ideals(ring, "left"), all_ideals(ring, "right")
    soc_l, soc_r = socle(ring, "left"), socle(ring, "right")
    return RingClass(
        is_frobenius=soc_l.principal and soc_r.principal,
        is_pir=len(left.principal_ids) == len(left) and len(right.principal_ids) == len(right),
        socles_coincide=bool((soc_l.mask == soc_r.mask).all()),
        left_principal=len(left.principal_ids),
        right_principal=len(right.principal_ids),
        left_ideals=len(left),
        right_ideals=len(right),
    )
