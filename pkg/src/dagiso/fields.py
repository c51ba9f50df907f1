"""Exact scalar and matrix arithmetic over a prime field F_q or the rationals.

Vanishing tests elsewhere in the package must be exact, so there is no
floating point here: field elements are Python ints reduced mod q, rational
elements are ``fractions.Fraction``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple, Union

MERSENNE31 = 2**31 - 1  # default modulus; prime, fits fast reduction

Element = Union[int, Fraction]


class FieldArithmeticError(ValueError):
    """Invalid field parameter or operation."""


class SingularPivotError(FieldArithmeticError):
    """A linear solve hit a zero pivot (triggers resampling upstream)."""


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for all 64-bit inputs."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class PrimeField:
    """The field F_q for an odd prime q > 2. Elements are ints in [0, q)."""

    __slots__ = ("q",)

    def __init__(self, q: int):
        if q <= 2 or not is_prime(q):
            raise FieldArithmeticError(f"modulus must be a prime > 2, got {q}")
        self.q = q

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and other.q == self.q

    def __hash__(self) -> int:
        return hash(("PrimeField", self.q))

    def __repr__(self) -> str:
        return f"PrimeField({self.q})"

    def element(self, x: int) -> int:
        return x % self.q

    def inv(self, x: int) -> int:
        if x % self.q == 0:
            raise SingularPivotError("inverse of 0 in F_q")
        return pow(x, -1, self.q)


# Throughout the package, field=None selects the exact-rational
# instantiation of the same interfaces.

@dataclass(frozen=True)
class FieldMatrix:
    """Rectangular matrix over ``field`` (a PrimeField) or over Q if field is None."""

    field: Optional[PrimeField]
    rows: Tuple[Tuple[Element, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.rows)
        if rows and any(len(r) != len(rows[0]) for r in rows):
            raise FieldArithmeticError("matrix rows have unequal lengths")
        if self.field is not None:
            q = self.field.q
            rows = tuple(tuple(int(x) % q for x in r) for r in rows)
        else:
            rows = tuple(tuple(Fraction(x) for x in r) for r in rows)
        object.__setattr__(self, "rows", rows)

    @property
    def shape(self) -> Tuple[int, int]:
        r = len(self.rows)
        return (r, len(self.rows[0]) if r else 0)


def det_and_rank(m: FieldMatrix) -> Tuple[Optional[Element], int]:
    """Exact determinant (None for non-square input) and rank of ``m``.

    Row reduction with deterministic pivoting: the first row holding a
    nonzero entry in the pivot column is used, so results are reproducible
    bit-for-bit across runs.
    """
    if m.field is not None:
        return _det_and_rank_mod([list(r) for r in m.rows], m.field.q)
    return _det_and_rank_frac([list(r) for r in m.rows])


def solve_univariate_linear(a: Element, b: Element,
                            field: Optional[PrimeField]) -> Element:
    """Solve a*x - b = 0 for x; raises SingularPivotError when a = 0."""
    if field is not None:
        q = field.q
        a %= q
        if a == 0:
            raise SingularPivotError("a = 0 in a*x = b over F_q")
        return b * pow(a, -1, q) % q
    a = Fraction(a)
    if a == 0:
        raise SingularPivotError("a = 0 in a*x = b over Q")
    return Fraction(b) / a


# ---------------------------------------------------------------------------
# Internal eliminations on raw row lists. These are the hot paths for minor
# evaluation and point sampling, so they stay free of per-element dispatch.

def _det_and_rank_mod(rows, q: int) -> Tuple[Optional[int], int]:
    nr = len(rows)
    nc = len(rows[0]) if nr else 0
    square = nr == nc
    det = 1
    rank = 0
    r = 0
    for c in range(nc):
        piv = None
        for i in range(r, nr):
            if rows[i][c] % q:
                piv = i
                break
        if piv is None:
            det = 0
            continue
        if piv != r:
            rows[piv], rows[r] = rows[r], rows[piv]
            det = -det
        pv = rows[r][c] % q
        det = det * pv % q
        inv = pow(pv, -1, q)
        prow = rows[r]
        for i in range(r + 1, nr):
            f = rows[i][c] % q
            if f:
                f = f * inv % q
                ri = rows[i]
                for k in range(c, nc):
                    ri[k] = (ri[k] - f * prow[k]) % q
        r += 1
        rank += 1
    if not square:
        return None, rank
    if rank < nr:
        return 0, rank
    return det % q, rank


def _det_and_rank_frac(rows) -> Tuple[Optional[Fraction], int]:
    rows = [[Fraction(x) for x in r] for r in rows]
    nr = len(rows)
    nc = len(rows[0]) if nr else 0
    square = nr == nc
    det = Fraction(1)
    rank = 0
    r = 0
    for c in range(nc):
        piv = None
        for i in range(r, nr):
            if rows[i][c]:
                piv = i
                break
        if piv is None:
            continue
        if piv != r:
            rows[piv], rows[r] = rows[r], rows[piv]
            det = -det
        pv = rows[r][c]
        det *= pv
        prow = rows[r]
        for i in range(r + 1, nr):
            f = rows[i][c]
            if f:
                f = f / pv
                ri = rows[i]
                for k in range(c, nc):
                    ri[k] -= f * prow[k]
        r += 1
        rank += 1
    if not square:
        return None, rank
    if rank < nr:
        return Fraction(0), rank
    return det, rank


def _det_mod(rows, q: int) -> int:
    """Determinant of a square raw row-list over F_q; mutates ``rows``."""
    n = len(rows)
    if n == 0:
        return 1
    if n == 1:
        return rows[0][0] % q
    if n == 2:
        (a, b), (c, d) = rows
        return (a * d - b * c) % q
    if n == 3:
        (a, b, c), (d, e, f), (g, h, i) = rows
        return (a * (e * i - f * h) - b * (d * i - f * g)
                + c * (d * h - e * g)) % q
    det, _ = _det_and_rank_mod(rows, q)
    return det


def _det_frac(rows) -> Fraction:
    n = len(rows)
    if n == 0:
        return Fraction(1)
    if n == 1:
        return Fraction(rows[0][0])
    if n == 2:
        (a, b), (c, d) = rows
        return Fraction(a * d - b * c)
    det, _ = _det_and_rank_frac(rows)
    return det


def _rank_frac(rows) -> int:
    if not rows or not rows[0]:
        return 0
    _, rank = _det_and_rank_frac(rows)
    return rank
