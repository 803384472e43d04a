"""Tiny helpers for 2x2 matrices stored as nested tuples."""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence, Tuple

Mat2 = Tuple[Tuple[int, int], Tuple[int, int]]

IDENTITY: Mat2 = ((1, 0), (0, 1))


def mat(rows: Sequence[Sequence]) -> Mat2:
    (a, b), (c, d) = rows
    return ((a, b), (c, d))


def mul(x: Mat2, y: Mat2) -> Mat2:
    (a, b), (c, d) = x
    (e, f), (g, h) = y
    return ((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h))


def power(x: Mat2, k: int) -> Mat2:
    if k < 0:
        return power(inverse(x), -k)
    out, base = IDENTITY, x
    while k:
        if k & 1:
            out = mul(out, base)
        base = mul(base, base)
        k >>= 1
    return out


def det(x: Mat2):
    return x[0][0] * x[1][1] - x[0][1] * x[1][0]


def trace(x: Mat2):
    return x[0][0] + x[1][1]


def inverse(x: Mat2) -> Mat2:
    """Inverse over Q; stays integral when det = +-1."""
    dt = det(x)
    if dt == 0:
        raise ZeroDivisionError("singular matrix")
    (a, b), (c, d) = x
    if dt in (1, -1):
        return ((d * dt, -b * dt), (-c * dt, a * dt))
    q = Fraction(1, 1) / dt
    return ((d * q, -b * q), (-c * q, a * q))


def transpose(x: Mat2) -> Mat2:
    return ((x[0][0], x[1][0]), (x[0][1], x[1][1]))


def apply_row(v: Tuple[int, int], x: Mat2) -> Tuple[int, int]:
    """Row vector times matrix."""
    return (v[0] * x[0][0] + v[1] * x[1][0], v[0] * x[0][1] + v[1] * x[1][1])


def apply_col(x: Mat2, v: Tuple[int, int]) -> Tuple[int, int]:
    """Matrix times column vector."""
    return (x[0][0] * v[0] + x[0][1] * v[1], x[1][0] * v[0] + x[1][1] * v[1])


def hnf_rows(vectors: Sequence[Tuple[int, int]]) -> Mat2:
    """Hermite normal form of the integer lattice spanned by ``vectors``.

    Returns rows ((a, b), (0, c)) with a, c > 0 and 0 <= b < c.  Raises
    ValueError when the vectors do not span a rank-2 lattice.
    """
    a = 0  # gcd of first coordinates, tracked with its row
    row = (0, 0)
    rest = []
    for x, y in vectors:
        x, y = int(x), int(y)
        if x == 0:
            rest.append(y)
            continue
        if a == 0:
            row = (x, y)
            a = x
            continue
        # extended gcd on the first coordinate
        g, s, t = _xgcd(row[0], x)
        new = (g, s * row[1] + t * y)
        # the complementary combination kills the first coordinate
        rest.append((row[0] // g) * y - (x // g) * row[1])
        row = new
        a = g
    if a == 0:
        raise ValueError("vectors do not span a rank-2 lattice")
    c = 0
    for y in rest:
        c = gcd(c, y)
    if c == 0:
        raise ValueError("vectors do not span a rank-2 lattice")
    x, y = row
    if x < 0:
        x, y = -x, -y
    return ((x, y % c), (0, c))


def _xgcd(a: int, b: int):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


def in_hnf(h: Mat2, v: Tuple[int, int]) -> bool:
    (a, b), (_, c) = h
    x, y = v
    if x % a:
        return False
    return (y - (x // a) * b) % c == 0


def reduce_hnf(h: Mat2, v: Tuple[int, int]) -> Tuple[int, int]:
    """Canonical representative of v modulo the lattice with HNF h."""
    (a, b), (_, c) = h
    x, y = v
    k = x // a
    x, y = x - k * a, y - k * b
    return (x, y % c)
