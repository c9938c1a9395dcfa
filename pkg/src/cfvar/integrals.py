"""Beukers-type integral families, Bessel moments, and exact coordinate data.

Multi-dimensional integrals use per-axis tanh-sinh nodes on (0,1) with the
endpoint complement carried separately (1-x evaluated from the transform, not
by subtraction) and the integrand assembled in log space, so the half-integer
endpoint singularities and the 1-(1-xy)z edge are handled without underflow.
1-D integrals use the same nodes directly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy.special import k0e

from mpmath import mp

from .cfcore import ThreeTermRecurrence
from .numkit import NumkitError, RealValue, _digits, ln_gamma, pFq, to_mpf
from .poly import Poly2, N as _N


class IntegralError(ValueError):
    pass


# --------------------------------------------------------------------------
# parameter tuples and convergence conditions
# --------------------------------------------------------------------------
@dataclass(frozen=True)
class Params3:
    a0: Fraction
    a1: Fraction
    a2: Fraction
    a3: Fraction
    a4: Fraction
    a5: Fraction

    def __init__(self, a0, a1, a2, a3, a4, a5):
        for name, v in zip("a0 a1 a2 a3 a4 a5".split(), (a0, a1, a2, a3, a4, a5)):
            object.__setattr__(self, name, Fraction(v))

    def astuple(self):
        return (self.a0, self.a1, self.a2, self.a3, self.a4, self.a5)

    @staticmethod
    def profile(n: int) -> "Params3":
        """All six exponents n - 1/2 (the shifted zeta(3) family)."""
        h = Fraction(2 * n - 1, 2)
        return Params3(h, h, h, h, h, h)


@dataclass(frozen=True)
class Params2:
    a0: Fraction
    a1: Fraction
    a2: Fraction
    a3: Fraction
    a4: Fraction

    def __init__(self, a0, a1, a2, a3, a4):
        for name, v in zip("a0 a1 a2 a3 a4".split(), (a0, a1, a2, a3, a4)):
            object.__setattr__(self, name, Fraction(v))

    def astuple(self):
        return (self.a0, self.a1, self.a2, self.a3, self.a4)

    @staticmethod
    def profile(n: int) -> "Params2":
        h = Fraction(2 * n - 1, 2)
        return Params2(h, h, h, h, h)


def convergence_quantities3(a: Params3) -> list[Fraction]:
    a0, a1, a2, a3, a4, a5 = a.astuple()
    return [a1, a2, a3, a4, a5, a4 + a5 - a3, a1 + a4 + a5 - a0 - a3, a2 + a4 + a5 - a0 - a3]


def convergence_quantities2(a: Params2) -> list[Fraction]:
    a0, a1, a2, a3, a4 = a.astuple()
    return [a1, a2, a3, a4, a3 + a4 - a0]


def convergent3_ok(a: Params3) -> bool:
    return all(q > -1 for q in convergence_quantities3(a))


def convergent2_ok(a: Params2) -> bool:
    return all(q > -1 for q in convergence_quantities2(a))


# --------------------------------------------------------------------------
# c-matrices
# --------------------------------------------------------------------------
CELLS3 = tuple((i, j) for i in range(4) for j in range(4))
CELLS2 = ((0, 0),) + tuple((i, j) for i in range(1, 4) for j in range(1, 4))

#: cells whose Gamma(value + 1) product normalizes the invariant quantity
GAMMA_CELLS3 = ((1, 0), (2, 0), (3, 0), (0, 1), (2, 1), (3, 1), (2, 2), (3, 3))
GAMMA_CELLS2 = ((0, 0), (2, 1), (3, 1), (2, 2), (3, 3))


@dataclass(frozen=True)
class CMatrix:
    cells: tuple  # ((i, j, Fraction), ...) sorted by (i, j)

    def __getitem__(self, idx) -> Fraction:
        i, j = idx
        for ci, cj, v in self.cells:
            if ci == i and cj == j:
                return v
        raise KeyError(idx)

    @property
    def index_set(self):
        return tuple((i, j) for i, j, _ in self.cells)

    def multiset(self) -> tuple:
        return tuple(sorted(v for _, _, v in self.cells))

    def as_dict(self):
        return {(i, j): v for i, j, v in self.cells}

    @staticmethod
    def from_dict(d) -> "CMatrix":
        return CMatrix(tuple((i, j, Fraction(v)) for (i, j), v in sorted(d.items())))


def cmatrix3(a: Params3) -> CMatrix:
    a0, a1, a2, a3, a4, a5 = a.astuple()
    grid = {
        (0, 0): a0, (0, 1): a4 + a5 - a3, (0, 2): a1 + a4 - a0, (0, 3): a2 + a5 - a0,
        (1, 0): a3, (1, 1): a4 + a5 - a0, (1, 2): a1 + a4 - a3, (1, 3): a2 + a5 - a3,
        (2, 0): a1, (2, 1): a1 + a4 + a5 - a0 - a3, (2, 2): a4, (2, 3): a2 + a5 - a1,
        (3, 0): a2, (3, 1): a2 + a4 + a5 - a0 - a3, (3, 2): a1 + a4 - a2, (3, 3): a5,
    }
    return CMatrix.from_dict(grid)


def cmatrix2(a: Params2) -> CMatrix:
    a0, a1, a2, a3, a4 = a.astuple()
    grid = {
        (0, 0): a3 + a4 - a0,
        (1, 1): a0, (1, 2): a1 + a3 - a0, (1, 3): a2 + a4 - a0,
        (2, 1): a1, (2, 2): a3, (2, 3): a2 + a4 - a1,
        (3, 1): a2, (3, 2): a1 + a3 - a2, (3, 3): a4,
    }
    return CMatrix.from_dict(grid)


def recover_params3(c: CMatrix) -> tuple[Params3, bool]:
    """Invert the c-matrix construction; the flag reports family membership."""
    a = Params3(c[0, 0], c[2, 0], c[3, 0], c[1, 0], c[2, 2], c[3, 3])
    return a, cmatrix3(a).cells == c.cells


def recover_params2(c: CMatrix) -> tuple[Params2, bool]:
    a = Params2(c[1, 1], c[2, 1], c[3, 1], c[2, 2], c[3, 3])
    return a, cmatrix2(a).cells == c.cells


# --------------------------------------------------------------------------
# quadrature engine
# --------------------------------------------------------------------------
@dataclass(frozen=True)
class QuadSpec:
    """Target absolute tolerance and node budget (level = tanh-sinh halvings)."""

    tol: float = 1e-10
    max_level: int = 8
    kind: str = "tanh_sinh"

    def require(self, floor: float, dim: int):
        if self.tol < floor:
            raise IntegralError(f"{dim}-D quadrature tolerance capped at {floor:g}")


DEFAULT_1D = QuadSpec(1e-14, 9)
DEFAULT_2D = QuadSpec(1e-10, 7)
DEFAULT_3D = QuadSpec(1e-7, 6)


@lru_cache(maxsize=32)
def _nodes(level: int):
    """tanh-sinh nodes on (0,1): (x, 1-x computed stably, weight, log weight)."""
    h = 2.0 ** -level
    kmax = int(np.ceil(6.5 / h))
    t = h * np.arange(-kmax, kmax + 1)
    sh = np.sinh(t)
    with np.errstate(over="ignore"):
        w = (np.pi / 4) * np.cosh(t) / np.cosh((np.pi / 2) * sh) ** 2 * h
        x = 1.0 / (1.0 + np.exp(-np.pi * sh))
    xc = x[::-1].copy()
    keep = np.isfinite(w) & (w > 1e-140) & (x > 0) & (xc > 0)
    x, xc, w = x[keep], xc[keep], w[keep]
    return x, xc, w, np.log(w)


def _refine(evaluate, spec: QuadSpec, start_level: int):
    prev = None
    for level in range(start_level, spec.max_level + 1):
        val = evaluate(level)
        if prev is not None and abs(val - prev) <= max(spec.tol * 0.25, 1e-16 * abs(val)):
            return val, abs(val - prev)
        prev = val
    return prev, abs(val - prev) if prev is not None else np.inf


def quad1(f, spec: QuadSpec = DEFAULT_1D, start_level: int = 6):
    """Integrate f(x, xc) over (0,1); f receives x and 1-x separately."""

    def ev(level):
        x, xc, w, _ = _nodes(level)
        return float(np.sum(f(x, xc) * w))

    val, est = _refine(ev, spec, start_level)
    return val, est


def quad2_log(logf, spec: QuadSpec = DEFAULT_2D, start_level: int = 5):
    def ev(level):
        x, xc, w, lw = _nodes(level)
        F = logf(x[:, None], xc[:, None], x[None, :], xc[None, :]) + lw[:, None] + lw[None, :]
        return float(np.exp(F).sum())

    return _refine(ev, spec, start_level)


def quad3_log(logf, spec: QuadSpec = DEFAULT_3D, start_level: int = 4):
    def ev(level):
        x, xc, w, lw = _nodes(level)
        total = 0.0
        ly = lw[:, None] + lw[None, :]
        y, yc = x[:, None], xc[:, None]
        z, zc = x[None, :], xc[None, :]
        for xi, xci, lwi in zip(x, xc, lw):
            F = logf(xi, xci, y, yc, z, zc) + ly + lwi
            total += float(np.exp(F).sum())
        return total

    return _refine(ev, spec, start_level)


def _quad_value(val, est, spec: QuadSpec, provenance: str) -> RealValue:
    if not np.isfinite(val) or est > spec.tol:
        raise IntegralError(f"quadrature budget exhausted (estimate {est:.2e} > {spec.tol:g})")
    digits = max(1, min(15, int(-math.log10(max(est, 1e-16)))))
    return RealValue(mp.mpf(val), digits, provenance)


# --------------------------------------------------------------------------
# the integral families
# --------------------------------------------------------------------------
def quad_I1(nu, z, spec: QuadSpec = DEFAULT_1D) -> RealValue:
    """I1(nu; z) = int_0^1 x^(nu-1/2) (1-x)^(nu-1/2) (1-zx)^(-nu-1/2) dx."""
    spec.require(1e-15, 1)
    nu_f, z_f = float(nu), float(z)
    if nu_f <= -0.5:
        raise IntegralError("need nu > -1/2")
    if z_f >= 1:
        raise IntegralError("need z < 1")
    e = nu_f - 0.5

    def f(x, xc):
        return x ** e * xc ** e * (1 - z_f * x) ** (-nu_f - 0.5)

    val, est = quad1(f, spec)
    return _quad_value(val, est, spec, "quadrature")


def quad_r1(n, z, spec: QuadSpec = DEFAULT_1D) -> RealValue:
    """r(n; z) = int_0^1 x^n (1-x)^n (1-zx)^(-n-1) dx."""
    spec.require(1e-15, 1)
    n_f, z_f = float(n), float(z)
    if z_f >= 1:
        raise IntegralError("need z < 1")

    def f(x, xc):
        return x ** n_f * xc ** n_f * (1 - z_f * x) ** (-n_f - 1)

    val, est = quad1(f, spec)
    return _quad_value(val, est, spec, "quadrature")


def quad_I2(a: Params2, spec: QuadSpec = DEFAULT_2D) -> RealValue:
    """The 5-parameter double integral (unsigned)."""
    spec.require(1e-10, 2)
    if not convergent2_ok(a):
        raise IntegralError(f"non-convergent parameters {a}")
    a0, a1, a2, a3, a4 = [float(v) for v in a.astuple()]

    def logf(x, xc, y, yc):
        return (a1 * np.log(x) + a3 * np.log(xc) + a2 * np.log(y) + a4 * np.log(yc)
                - (a0 + 1.0) * np.log(xc + x * yc))

    val, est = quad2_log(logf, spec)
    return _quad_value(val, est, spec, "quadrature")


def quad_I2_profile(n: int, spec: QuadSpec = DEFAULT_2D) -> RealValue:
    """I2(n) including its defining (-1)^n sign."""
    v = quad_I2(Params2.profile(n), spec)
    return RealValue(v.value * (-1) ** n, v.digits, v.provenance)


def quad_I3(a: Params3, spec: QuadSpec = DEFAULT_3D) -> RealValue:
    """The 6-parameter triple integral."""
    spec.require(1e-8, 3)
    if not convergent3_ok(a):
        raise IntegralError(f"non-convergent parameters {a}")
    a0, a1, a2, a3, a4, a5 = [float(v) for v in a.astuple()]

    def logf(x, xc, y, yc, z, zc):
        return (a1 * np.log(x) + a4 * np.log(xc) + a2 * np.log(y) + a5 * np.log(yc)
                + a3 * np.log(z) + (a4 + a5 - a3) * np.log(zc)
                - (a0 + 1.0) * np.log(zc + x * y * z))

    val, est = quad3_log(logf, spec)
    return _quad_value(val, est, spec, "quadrature")


def quad_I3_profile(n: int, spec: QuadSpec = DEFAULT_3D) -> RealValue:
    return quad_I3(Params3.profile(n), spec)


def quad_r3(nu, spec: QuadSpec = DEFAULT_3D) -> RealValue:
    """Nesterenko-style symmetric integral: the n-th power of the full kernel."""
    spec.require(1e-8, 3)
    nu_f = float(nu)
    if nu_f < 0:
        raise IntegralError("quad_r3 restricted to nu >= 0")

    def logf(x, xc, y, yc, z, zc):
        den = np.log(zc + x * y * z)
        inner = (np.log(x) + np.log(xc) + np.log(y) + np.log(yc) + np.log(z) + np.log(zc)
                 - den)
        return nu_f * inner - den

    val, est = quad3_log(logf, spec)
    return _quad_value(val, est, spec, "quadrature")


# --------------------------------------------------------------------------
# gamma-normalized invariants
# --------------------------------------------------------------------------
def normalized3(a: Params3, spec: QuadSpec = DEFAULT_3D) -> RealValue:
    v = quad_I3(a, spec)
    lg = sum(float(ln_gamma(q + 1, 20).value) for q in convergence_quantities3(a))
    return RealValue(v.value * mp.e ** (-lg), v.digits, "quadrature")


def normalized2(a: Params2, spec: QuadSpec = DEFAULT_2D) -> RealValue:
    v = quad_I2(a, spec)
    lg = sum(float(ln_gamma(q + 1, 20).value) for q in convergence_quantities2(a))
    return RealValue(v.value * mp.e ** (-lg), v.digits, "quadrature")


# --------------------------------------------------------------------------
# Bessel moments
# --------------------------------------------------------------------------
def bessel_moment(n: int, k: int, spec: QuadSpec = DEFAULT_1D) -> RealValue:
    """c_{n,k} = int_0^infty t^k K0(t)^n dt, split at t = 1.

    On (0,1] tanh-sinh absorbs the log^n singularity at 0; on [1, T] the
    scaled kernel k0e keeps the e^(-nt) decay explicit, and T is chosen so
    the dropped tail is below the tolerance floor.
    """
    spec.require(1e-15, 1)
    if not (1 <= n <= 4) or k < 0:
        raise IntegralError("supported range: n in 1..4, k >= 0")
    T = (16 * math.log(10) + 40.0) / n

    def f_small(x, xc):
        return x ** k * (k0e(x) * np.exp(-x)) ** n

    def f_large(x, xc):
        t = 1 + x * (T - 1)
        return (T - 1) * t ** k * k0e(t) ** n * np.exp(-n * t)

    v1, e1 = quad1(f_small, spec)
    v2, e2 = quad1(f_large, spec)
    return _quad_value(v1 + v2, e1 + e2, spec, "quadrature")


# --------------------------------------------------------------------------
# exact data: big Apery numbers, period coordinates
# --------------------------------------------------------------------------
def big_apery(n: int) -> int:
    """A_n = sum_k C(n,k)^2 C(n+k,k)^2."""
    if n < 0:
        raise IntegralError("need n >= 0")
    return sum(math.comb(n, k) ** 2 * math.comb(n + k, k) ** 2 for k in range(n + 1))


#: difference equation of the theorem-2 family (common to p, q, I2 and its coords)
EQ1 = ThreeTermRecurrence((2 * _N + 1) ** 2, 44 * _N ** 2 + 1, (2 * _N - 1) ** 2)
#: big Apery recursion (note the minus sign is carried by R_minus)
EQ2A = ThreeTermRecurrence((_N + 1) ** 3, (2 * _N + 1) * (17 * _N ** 2 + 17 * _N + 5), -(_N ** 3))
#: its half-shift companion
EQ2 = ThreeTermRecurrence((2 * _N + 1) ** 3, 4 * _N * (68 * _N ** 2 + 3), -((2 * _N - 1) ** 3))


@lru_cache(maxsize=8)
def _eq1_coords(N: int):
    pt = EQ1.propagate(Fraction(0), Fraction(-20), N)
    qt = EQ1.propagate(Fraction(-1, 2), Fraction(-1, 4), N)
    return pt, qt


def I2_coords(n: int) -> tuple[Fraction, Fraction]:
    """(ptilde, qtilde) with I2(n) = ptilde A - qtilde B, A = pi G(3/4)^2/G(1/4)^2,
    B = pi G(1/4)^2/G(3/4)^2; exact propagation from the closed-form initial values."""
    if n < 0:
        raise IntegralError("need n >= 0")
    pt, qt = _eq1_coords(max(n + 1, 2))
    return pt[n], qt[n]


@lru_cache(maxsize=8)
def _eq2_coords(N: int):
    al = EQ2.propagate(Fraction(8), Fraction(-56), N)
    be = EQ2.propagate(Fraction(0), Fraction(-3, 2), N)
    return al, be


def I3_coords(n: int) -> tuple[Fraction, Fraction]:
    """(alpha, beta) with I3(n) = alpha omega_plus + beta eta_plus."""
    if n < 0:
        raise IntegralError("need n >= 0")
    al, be = _eq2_coords(max(n + 1, 2))
    return al[n], be[n]


# --------------------------------------------------------------------------
# hypergeometric identity check (theorem-2 proof series)
# --------------------------------------------------------------------------
class HypergReport(NamedTuple):
    residual_1: object
    residual_2: object
    ok: bool


def hyperg_identity_check(prec=15) -> HypergReport:
    """Both gamma-quotient series identities against the AGM oracle.

    identity 1: (G(1/4)/G(3/4))^4 = 80 - (2048/625) sum (n+1) (3/4)_n^4 / (9/4)_n^4
    identity 2: (G(3/4)/G(1/4))^4 = 1/16 - (4/81) sum (2n+1) (1/4)_n^4 / (7/4)_n^4
    written as unit-argument pFq values (term decay n^-5).
    """
    d = _digits(prec)
    from .numkit import constant

    gq4 = constant("gamma_q4", d + 5).value
    with mp.workdps(d + 10):
        s1 = pFq([2, 1] + [Fraction(3, 4)] * 4, [1] + [Fraction(9, 4)] * 4, 1, d).value
        s2 = pFq([Fraction(3, 2), 1] + [Fraction(1, 4)] * 4,
                 [Fraction(1, 2)] + [Fraction(7, 4)] * 4, 1, d).value
        r1 = abs((80 - mp.mpf(2048) / 625 * s1) - gq4 ** 2)
        r2 = abs((mp.mpf(1) / 16 - mp.mpf(4) / 81 * s2) - 1 / gq4 ** 2)
        tol = mp.mpf(10) ** (-(d - 5))
        return HypergReport(+r1, +r2, bool(r1 < tol and r2 < tol))
