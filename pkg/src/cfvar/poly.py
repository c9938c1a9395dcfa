"""Exact bivariate polynomials over rationals.

Poly2 represents a polynomial in ``n`` whose coefficients are polynomials in a
second variable (``z`` throughout the catalog, ``s`` for the gamma-quotient
family).  Coefficients are a dense grid of Fractions indexed by
(n-power, z-power).  All arithmetic is exact.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence, Union

Rat = Union[int, Fraction]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"expected rational, got {type(x).__name__}")


class Poly2:
    """Polynomial in (n, z) with exact Fraction coefficients.

    ``coeffs[i][j]`` is the coefficient of ``n**i * z**j``.  Trailing zero
    rows/columns are trimmed so equal polynomials compare equal.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[Sequence[Rat]] | Rat = 0):
        if isinstance(coeffs, (int, Fraction, str)):
            coeffs = [[_frac(coeffs)]]
        grid = [[_frac(c) for c in row] for row in coeffs]
        self.coeffs = _trim(grid)

    # -- constructors --------------------------------------------------
    @staticmethod
    def n() -> "Poly2":
        return Poly2([[0], [1]])

    @staticmethod
    def z() -> "Poly2":
        return Poly2([[0, 1]])

    @staticmethod
    def const(x: Rat) -> "Poly2":
        return Poly2(x)

    # -- structure -----------------------------------------------------
    @property
    def n_degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def z_degree(self) -> int:
        return max((len(r) - 1 for r in self.coeffs), default=0)

    @property
    def is_zero(self) -> bool:
        return self.coeffs == [[Fraction(0)]]

    @property
    def z_free(self) -> bool:
        return self.z_degree == 0

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly2(other)
        if not isinstance(other, Poly2):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(tuple(r) for r in self.coeffs))

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other) -> "Poly2":
        other = _as_poly(other)
        rows = max(len(self.coeffs), len(other.coeffs))
        cols = max(self.z_degree, other.z_degree) + 1
        grid = [[Fraction(0)] * cols for _ in range(rows)]
        for src in (self, other):
            for i, row in enumerate(src.coeffs):
                for j, c in enumerate(row):
                    grid[i][j] += c
        return Poly2(grid)

    __radd__ = __add__

    def __neg__(self) -> "Poly2":
        return Poly2([[-c for c in row] for row in self.coeffs])

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) + (-self)

    def __mul__(self, other) -> "Poly2":
        other = _as_poly(other)
        rows = self.n_degree + other.n_degree + 1
        cols = self.z_degree + other.z_degree + 1
        grid = [[Fraction(0)] * cols for _ in range(rows)]
        for i, ra in enumerate(self.coeffs):
            for j, ca in enumerate(ra):
                if not ca:
                    continue
                for k, rb in enumerate(other.coeffs):
                    for l, cb in enumerate(rb):
                        if cb:
                            grid[i + k][j + l] += ca * cb
        return Poly2(grid)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Poly2":
        c = _frac(other)
        return Poly2([[v / c for v in row] for row in self.coeffs])

    def __pow__(self, k: int) -> "Poly2":
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers")
        out = Poly2(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- evaluation / substitution ----------------------------------------
    def eval(self, n, z=None):
        """Evaluate at (n, z).  Horner in both variables; exact for exact inputs."""
        if z is None and not self.z_free:
            raise ValueError("polynomial depends on z but no z given")
        acc = None
        for row in reversed(self.coeffs):
            if z is None:
                rv = row[0]
            else:
                rv = None
                for c in reversed(row):
                    rv = c if rv is None else rv * z + c
            acc = rv if acc is None else acc * n + rv
        return acc

    def shift_n(self, s: Rat) -> "Poly2":
        """Return p(n + s, z)."""
        s = _frac(s)
        rows = len(self.coeffs)
        cols = self.z_degree + 1
        grid = [[Fraction(0)] * cols for _ in range(rows)]
        for i, row in enumerate(self.coeffs):
            # (n+s)^i = sum_k C(i,k) s^(i-k) n^k
            for k in range(i + 1):
                b = math.comb(i, k) * s ** (i - k)
                for j, c in enumerate(row):
                    if c:
                        grid[k][j] += b * c
        return Poly2(grid)

    def bind_z(self, z: Rat) -> "Poly2":
        """Substitute an exact z value, returning a z-free polynomial."""
        z = _frac(z)
        grid = []
        for row in self.coeffs:
            v = Fraction(0)
            for c in reversed(row):
                v = v * z + c
            grid.append([v])
        return Poly2(grid)

    def even_in_z(self) -> bool:
        return all(not c for row in self.coeffs for j, c in enumerate(row) if j % 2 == 1)

    def bind_z_squared(self, w: Rat) -> "Poly2":
        """Substitute z**2 = w (requires the polynomial to be even in z).

        Lets the catalog evaluate entries like f(z) at purely imaginary z
        (z = iy binds w = -y**2) without complex arithmetic.
        """
        if not self.even_in_z():
            raise ValueError("polynomial has odd z-powers; z^2 substitution undefined")
        w = _frac(w)
        grid = []
        for row in self.coeffs:
            v = Fraction(0)
            for j in range(len(row) - 1 - (len(row) - 1) % 2, -1, -2):
                v = v * w + row[j]
            grid.append([v])
        return Poly2(grid)

    # -- content ------------------------------------------------------------
    def denominator_lcm(self) -> int:
        out = 1
        for row in self.coeffs:
            for c in row:
                out = out * c.denominator // math.gcd(out, c.denominator)
        return out

    def content(self) -> Fraction:
        """gcd of coefficients as a positive rational (0 for the zero poly)."""
        num = 0
        den = 1
        for row in self.coeffs:
            for c in row:
                num = math.gcd(num, abs(c.numerator))
                den = den * c.denominator // math.gcd(den, c.denominator)
        return Fraction(num, den)

    # -- display --------------------------------------------------------------
    def __repr__(self):
        return f"Poly2({self})"

    def __str__(self):
        terms = []
        for i in range(self.n_degree, -1, -1):
            row = self.coeffs[i] if i < len(self.coeffs) else []
            for j in range(len(row) - 1, -1, -1):
                c = row[j]
                if not c:
                    continue
                mono = ""
                if i:
                    mono += "n" + (f"^{i}" if i > 1 else "")
                if j:
                    mono += ("*" if mono else "") + "z" + (f"^{j}" if j > 1 else "")
                if not mono:
                    terms.append(str(c))
                elif c == 1:
                    terms.append(mono)
                elif c == -1:
                    terms.append("-" + mono)
                else:
                    terms.append(f"{c}*{mono}")
        if not terms:
            return "0"
        out = terms[0]
        for t in terms[1:]:
            out += " - " + t[1:] if t.startswith("-") else " + " + t
        return out


def _as_poly(x) -> Poly2:
    if isinstance(x, Poly2):
        return x
    return Poly2(x)


def _trim(grid):
    if not grid:
        return [[Fraction(0)]]
    grid = [list(row) if row else [Fraction(0)] for row in grid]
    for row in grid:
        while len(row) > 1 and not row[-1]:
            row.pop()
    while len(grid) > 1 and grid[-1] == [Fraction(0)]:
        grid.pop()
    if not grid:
        grid = [[Fraction(0)]]
    return grid


#: convenience generator monomials for building catalog polynomials
N = Poly2.n()
Z = Poly2.z()
