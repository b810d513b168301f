"""Exact linear algebra over the rationals."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

Matrix = Sequence[Sequence[Fraction]]


def _integer_rows(m: Matrix) -> tuple[list[list[int]], int]:
    """Scale each row to integers; returns the rows and the product of scales."""
    rows, scale = [], 1
    for row in m:
        row = [Fraction(x) for x in row]
        lcm = math.lcm(*(x.denominator for x in row)) if row else 1
        rows.append([int(x * lcm) for x in row])
        scale *= lcm
    return rows, scale


def bareiss_det(m: Matrix) -> Fraction:
    """Determinant by fraction-free elimination."""
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return Fraction(1)
    a, scale = _integer_rows(m)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return Fraction(0)
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        pivot = a[k][k]
        for i in range(k + 1, n):
            ai, aik = a[i], a[i][k]
            for j in range(k + 1, n):
                ai[j] = (ai[j] * pivot - aik * a[k][j]) // prev
            ai[k] = 0
        prev = pivot
    return Fraction(sign * a[n - 1][n - 1], scale)


def rref(m: Matrix) -> tuple[list[list[Fraction]], list[int]]:
    a = [[Fraction(x) for x in row] for row in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a, pivots


def rank(m: Matrix) -> int:
    return len(rref(m)[1]) if len(m) else 0


def nullspace(m: Matrix) -> list[list[Fraction]]:
    """Basis of {v : m v = 0}, one vector per free column, in column order."""
    cols = len(m[0]) if len(m) else 0
    a, pivots = rref(m)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for row, p in zip(a, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def primitive_integer(v: Sequence[Fraction]) -> list[int]:
    """Scale a rational vector to coprime integers, first nonzero entry positive."""
    lcm = math.lcm(*(Fraction(x).denominator for x in v))
    ints = [int(Fraction(x) * lcm) for x in v]
    g = math.gcd(*ints) or 1
    ints = [x // g for x in ints]
    lead = next((x for x in ints if x), 1)
    return [-x for x in ints] if lead < 0 else ints


def matmul(a: Matrix, b: Matrix) -> list[list[Fraction]]:
    bt = list(zip(*b))
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def matvec(a: Matrix, v: Sequence) -> list[Fraction]:
    return [sum((Fraction(x) * y for x, y in zip(row, v)), Fraction(0)) for row in a]


def interpolate(xs: Sequence[Fraction], ys: Sequence[Fraction]) -> list[Fraction]:
    """Coefficients (constant first) of the polynomial through the given points."""
    n = len(xs)
    coef = [Fraction(y) for y in ys]
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    # Newton form to monomial basis
    poly = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        shifted = [Fraction(0)] + poly[:-1]
        poly = [s - xs[i] * p for s, p in zip(shifted, poly)]
        poly[0] += coef[i]
    return poly
