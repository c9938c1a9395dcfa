"""Continued fraction data model and exact evaluation.

A CFSpec mirrors the [[heads..., poly],[heads..., poly]] notation: the first
list gives partial denominators b_0, b_1, ... and the second the partial
numerators a_1, a_2, ...; in each list the final entry is a polynomial in the
index and everything before it is a head value.  Materialization convention
(validated against every displayed expansion in the source catalog):

    b_n = b_heads[n]     for 0 <= n < len(b_heads), else b_poly(n)
    a_n = a_heads[n-1]   for 1 <= n <= len(a_heads), else a_poly(n-1)

Convergents are exact big-rational pairs via the Wallis recursion.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

from mpmath import mp

from .numkit import RealValue, _digits, _guard, _round_to, to_mpf
from .poly import Poly2


class CFError(ValueError):
    pass


class NoConvergence(CFError):
    pass


class ZeroPartialNumerator(CFError):
    def __init__(self, index: int):
        super().__init__(f"partial numerator a_{index} is zero")
        self.index = index


def _as_head(h) -> Poly2:
    p = h if isinstance(h, Poly2) else Poly2(h)
    if p.n_degree > 0:
        raise CFError("head values must not depend on the index n")
    return p


@dataclass(frozen=True)
class CFSpec:
    b_heads: tuple
    b_poly: Poly2
    a_heads: tuple
    a_poly: Poly2

    def __init__(self, b_heads, b_poly, a_heads, a_poly):
        object.__setattr__(self, "b_heads", tuple(_as_head(h) for h in b_heads))
        object.__setattr__(self, "b_poly", b_poly if isinstance(b_poly, Poly2) else Poly2(b_poly))
        object.__setattr__(self, "a_heads", tuple(_as_head(h) for h in a_heads))
        object.__setattr__(self, "a_poly", a_poly if isinstance(a_poly, Poly2) else Poly2(a_poly))
        if self.a_poly.is_zero:
            raise CFError("a_poly must not be identically zero")

    @property
    def z_free(self) -> bool:
        return (self.b_poly.z_free and self.a_poly.z_free
                and all(h.z_free for h in self.b_heads + self.a_heads))

    def bind(self, z):
        """Return (b, a) callables producing exact Fractions (z bound if given)."""
        if z is None and not self.z_free:
            raise CFError("CF depends on a parameter; supply z")
        kb, ka = len(self.b_heads), len(self.a_heads)

        def b(n: int) -> Fraction:
            if n < 0:
                raise CFError("b index must be >= 0")
            if n < kb:
                return self.b_heads[n].eval(0, z)
            return self.b_poly.eval(Fraction(n), z)

        def a(n: int) -> Fraction:
            if n < 1:
                raise CFError("a index must be >= 1")
            if n <= ka:
                return self.a_heads[n - 1].eval(0, z)
            return self.a_poly.eval(Fraction(n - 1), z)

        return b, a

    def tail_only(self) -> "CFSpec":
        """The CF built from the coefficient polynomials alone (b_0 = 0, no heads)."""
        return CFSpec([Poly2(0)], self.b_poly, [], self.a_poly)

    def bind_z_squared(self, w) -> "CFSpec":
        """Substitute z^2 = w exactly (all polynomials must be even in z)."""
        return CFSpec([h.bind_z_squared(w) for h in self.b_heads],
                      self.b_poly.bind_z_squared(w),
                      [h.bind_z_squared(w) for h in self.a_heads],
                      self.a_poly.bind_z_squared(w))

    def __str__(self):
        bs = ",".join(str(h) for h in self.b_heads)
        as_ = ",".join(str(h) for h in self.a_heads)
        sep_b = "," if bs else ""
        sep_a = "," if as_ else ""
        return f"[[{bs}{sep_b}{self.b_poly}],[{as_}{sep_a}{self.a_poly}]]"


class ConvergentPair(NamedTuple):
    n: int
    p: Fraction
    q: Fraction

    @property
    def value(self) -> Fraction:
        return self.p / self.q


def materialize(cf: CFSpec, n: int, part: str, z=None) -> Fraction:
    """Coefficient a_n (n >= 1) or b_n (n >= 0) with z bound if supplied."""
    b, a = cf.bind(z)
    if part == "b":
        return b(n)
    if part == "a":
        return a(n)
    raise CFError("part must be 'a' or 'b'")


def convergents(cf: CFSpec, N: int, z=None) -> list[ConvergentPair]:
    """Exact convergent pairs to depth N (p_-1 = 1, p_0 = b_0, q_-1 = 0, q_0 = 1)."""
    if N < 0:
        raise CFError("depth must be >= 0")
    b, a = cf.bind(z)
    pm1, p0 = Fraction(1), Fraction(b(0))
    qm1, q0 = Fraction(0), Fraction(1)
    out = [ConvergentPair(0, p0, q0)]
    for n in range(1, N + 1):
        an, bn = a(n), b(n)
        if an == 0:
            raise ZeroPartialNumerator(n)
        p = bn * p0 + an * pm1
        q = bn * q0 + an * qm1
        pm1, p0, qm1, q0 = p0, p, q0, q
        out.append(ConvergentPair(n, p, q))
    return out


def prefix_transfer(cf: CFSpec, k: int, z=None):
    """2x2 matrix [[p_{k-1}, p_k], [q_{k-1}, q_k]] mapping the depth-k tail to the value.

    If x is the value of the tail a_{k+1}/(b_{k+1} + ...), the CF value equals
    (p_{k-1} x + p_k) / (q_{k-1} x + q_k).
    """
    cs = convergents(cf, k, z)
    if k == 0:
        return ((Fraction(1), cs[0].p), (Fraction(0), cs[0].q))
    return ((cs[k - 1].p, cs[k].p), (cs[k - 1].q, cs[k].q))


class LimitResult(NamedTuple):
    value: RealValue
    error: object  # mpf error estimate
    depth: int


def limit(cf: CFSpec, prec, z=None, max_terms: int = 2000) -> LimitResult:
    """CF limit to ~10^-prec with a safeguarded successive-convergent estimate.

    Doubles the evaluation depth until the tail estimate
    |x_N - x_{N-1}| * r/(1-r), r the last step ratio, falls below target
    (works for both geometric and algebraic decay), with a x10 safety factor
    for non-alternating tails.
    """
    d = _digits(prec)
    target = mp.mpf(10) ** (-d)
    b, a = cf.bind(z)
    with mp.workdps(_guard(d) + 10):
        pm1, p0 = Fraction(1), Fraction(b(0))
        qm1, q0 = Fraction(0), Fraction(1)
        n = 0
        vals = [to_mpf(p0)]  # q0 = 1
        checkpoint = 8
        while True:
            while n < checkpoint:
                n += 1
                an, bn = a(n), b(n)
                if an == 0:
                    raise ZeroPartialNumerator(n)
                p = bn * p0 + an * pm1
                q = bn * q0 + an * qm1
                pm1, p0, qm1, q0 = p0, p, q0, q
                if n >= checkpoint - 2:
                    if q == 0:
                        raise NoConvergence("vanishing convergent denominator")
                    vals.append(to_mpf(p) / to_mpf(q))
            d1 = abs(vals[-1] - vals[-2])
            d0 = abs(vals[-2] - vals[-3])
            alternating = (vals[-1] - vals[-2]) * (vals[-2] - vals[-3]) < 0
            if d1 == 0:
                est = mp.mpf(0)
            elif d0 > d1:
                r = d1 / d0
                est = d1 * r / (1 - r)
                if not alternating:
                    est *= 10
            else:
                est = mp.inf
            if est <= target:
                return LimitResult(_round_to(vals[-1], d), +est, n)
            if n >= max_terms:
                raise NoConvergence(
                    f"oscillation {mp.nstr(est, 3)} above 1e-{d} at depth {n}")
            checkpoint = min(max_terms, checkpoint * 2) if checkpoint < max_terms else max_terms + 1
            vals = vals[-3:]


# --------------------------------------------------------------------------
# rate models and fitting
# --------------------------------------------------------------------------
SIGN_CONST = "+1"
SIGN_ALT_EVEN = "(-1)^n"       # positive error at even n
SIGN_ALT_ODD = "(-1)^(n+1)"    # positive error at odd n


@dataclass(frozen=True)
class RateModel:
    """Error model  limit - p(n)/q(n) ~ sign * C / rho^(e n + f).

    ``C`` and ``rho`` are ConstExpr (z-free entries) or callables z -> mpf
    (parameterized entries); ``C`` may be None when the source gives no
    constant (only the per-step ratio rho^e is then checkable).
    """

    sign: str
    C: object
    rho: object
    e: int
    f: int

    def rho_value(self, prec, z=None):
        return _eval_rate_part(self.rho, prec, z)

    def C_value(self, prec, z=None):
        if self.C is None:
            return None
        return _eval_rate_part(self.C, prec, z)

    def normalized(self, prec, z=None):
        """(sign, |C|or None, |rho|) with a negative rho folded into the sign/C.

        For negative rho (parameterized entries evaluated at z < 0),
        (-rho)^(e n + f) = (-1)^(e n + f) rho^(e n + f); with even e the flip
        is the constant factor (-1)^f, which is absorbed into the sign of C.
        """
        rho = self.rho_value(prec, z)
        C = self.C_value(prec, z)
        sign = self.sign
        if rho < 0:
            if self.e % 2:
                raise CFError("negative rho with odd slope not supported")
            rho = -rho
            if self.f % 2:
                sign, C = _negate_sign(sign), (None if C is None else -C)
        return sign, C, rho


def _negate_sign(sign: str) -> str:
    if sign == SIGN_CONST:
        return "-1"
    return SIGN_ALT_ODD if sign == SIGN_ALT_EVEN else SIGN_ALT_EVEN


def _eval_rate_part(part, prec, z):
    from .numkit import ConstExpr, eval_const_expr

    if isinstance(part, ConstExpr):
        return eval_const_expr(part, prec).value
    if callable(part):
        if z is None:
            raise CFError("rate component needs z")
        return part(z, prec)
    raise CFError(f"cannot evaluate rate component {part!r}")


class RateFit(NamedTuple):
    rho_step: object     # estimate of rho^e (per-step error ratio)
    C_hat: object        # signed constant estimate (None if model exponents absent)
    sign_hat: str        # one of "+1", "-1", "(-1)^n", "(-1)^(n+1)"


def rate_fit(cf: CFSpec, true_limit, n_range, prec, z=None,
             rho_model=None, e: int = 1, f: int = 0) -> RateFit:
    """Fit the error model over n_range = (lo, hi) against a known limit.

    rho_step is the per-step error ratio |err(hi-1)/err(hi)|.  C_hat (a
    positive magnitude; sign_hat carries the pattern) removes the modeled
    decay rho^(e n + f) -- rho_model required -- and extrapolates the
    residual 1/n drift linearly (two-point Richardson).
    """
    lo, hi = n_range
    d = _digits(prec)
    L = true_limit.value if isinstance(true_limit, RealValue) else true_limit
    with mp.workdps(_guard(d) + 10):
        cs = convergents(cf, hi + 1, z)
        errs = {}
        for n in range(lo, hi + 1):
            c = cs[n]
            errs[n] = L - to_mpf(c.p) / to_mpf(c.q)
        if any(v == 0 for v in errs.values()):
            raise CFError("exact convergent hit the limit; extend precision")
        if min(abs(v) for v in errs.values()) < mp.mpf(10) ** (-(d - 5)):
            raise CFError("errors underflow working precision; raise prec or lower range")
        rho_step = abs(errs[hi - 1] / errs[hi])
        signs = [1 if errs[n] > 0 else -1 for n in range(lo, hi + 1)]
        sign_hat = _classify_signs(signs, lo)
        C_hat = None
        if rho_model is not None:
            rho = abs(rho_model)
            c_of = lambda n: abs(errs[n]) * rho ** (e * n + f)
            n1, n2 = max(lo, hi - 8), hi
            c1, c2 = c_of(n1), c_of(n2)
            C_hat = (n2 * c2 - n1 * c1) / (n2 - n1)
        return RateFit(+rho_step, C_hat, sign_hat)


def _classify_signs(signs, lo: int) -> str:
    if all(s == signs[0] for s in signs):
        return SIGN_CONST if signs[0] > 0 else "-1"
    alternating = all(signs[i] != signs[i + 1] for i in range(len(signs) - 1))
    if not alternating:
        return "irregular"
    # positive at even n?
    first_even_idx = 0 if lo % 2 == 0 else 1
    return SIGN_ALT_EVEN if signs[first_even_idx] > 0 else SIGN_ALT_ODD


# --------------------------------------------------------------------------
# three-term recurrences
# --------------------------------------------------------------------------
@dataclass(frozen=True)
class ThreeTermRecurrence:
    """R_plus(n) y(n+1) = R_zero(n) y(n) + R_minus(n) y(n-1)."""

    R_plus: Poly2
    R_zero: Poly2
    R_minus: Poly2

    def __init__(self, R_plus, R_zero, R_minus):
        mk = lambda p: p if isinstance(p, Poly2) else Poly2(p)
        object.__setattr__(self, "R_plus", mk(R_plus))
        object.__setattr__(self, "R_zero", mk(R_zero))
        object.__setattr__(self, "R_minus", mk(R_minus))
        if self.R_plus.is_zero:
            raise CFError("leading coefficient identically zero")

    def shift_n(self, s) -> "ThreeTermRecurrence":
        return ThreeTermRecurrence(self.R_plus.shift_n(s), self.R_zero.shift_n(s),
                                   self.R_minus.shift_n(s))

    def propagate(self, y0: Fraction, y1: Fraction, N: int, z=None) -> list[Fraction]:
        """Exact values y(0..N) from rational initial data."""
        ys = [Fraction(y0), Fraction(y1)]
        for n in range(1, N):
            rp = self.R_plus.eval(Fraction(n), z)
            if rp == 0:
                raise CFError(f"leading coefficient vanishes at n={n}")
            r0 = self.R_zero.eval(Fraction(n), z)
            rm = self.R_minus.eval(Fraction(n), z)
            ys.append((r0 * ys[n] + rm * ys[n - 1]) / rp)
        return ys

    def __str__(self):
        return f"({self.R_plus}) y(n+1) = ({self.R_zero}) y(n) + ({self.R_minus}) y(n-1)"


def denominator_profile(rec: ThreeTermRecurrence, init, N: int) -> list[int]:
    """Reduced denominators of y(2..N) propagated exactly from rational y(0), y(1)."""
    y0, y1 = (Fraction(v) for v in init)
    ys = rec.propagate(y0, y1, N)
    return [ys[n].denominator for n in range(2, N + 1)]


class RecurrenceReport(NamedTuple):
    residuals: list
    ok: bool


def check_recurrence(rec: ThreeTermRecurrence, values, tol=None, z=None) -> RecurrenceReport:
    """Residuals R+ y(n+1) - R0 y(n) - R- y(n-1) over indexed values.

    ``values`` maps index n -> value (dict or sequence indexed from 0).
    Exact zero is required when tol is None and the values are rational.
    """
    if isinstance(values, dict):
        have = set(values)
        centers = [n for n in sorted(values) if n - 1 in have and n + 1 in have]
        get = values.__getitem__
    else:
        centers = [n for n in range(1, len(values) - 1)]
        get = values.__getitem__
    residuals = []
    ok = True
    to_num = (lambda v: v) if tol is None else (lambda v: to_mpf(v) if isinstance(v, (Fraction, int)) else v)
    for n in centers:
        rp = rec.R_plus.eval(Fraction(n), z)
        r0 = rec.R_zero.eval(Fraction(n), z)
        rm = rec.R_minus.eval(Fraction(n), z)
        res = to_num(rp) * to_num(get(n + 1)) - to_num(r0) * to_num(get(n)) - to_num(rm) * to_num(get(n - 1))
        residuals.append((n, res))
        if tol is None:
            ok = ok and res == 0
        else:
            ok = ok and abs(res) <= tol
    return RecurrenceReport(residuals, ok)


class RecurrenceCF(NamedTuple):
    tail: CFSpec
    normalizer: object   # callable m -> Fraction, the s-scaling at CF index m
    delta: int


def recurrence_to_cf(rec: ThreeTermRecurrence, z=None) -> RecurrenceCF:
    """Bridge a three-term recurrence to a CF tail via product normalization.

    With s(n) = prod_{j=0}^{n-1} R_plus(j), the scaled solutions
    u(n) = y(n) s(n) satisfy u(n+1) = R_zero(n) u(n) + R_minus(n) R_plus(n-1) u(n-1),
    which is the convergent recursion of the CF tail

        b_m = R_zero(m),   a_m = R_minus(m) R_plus(m-1)   (m >= 1).

    Contract (testable by exact propagation): for any solution y of the
    recurrence, u_m = y(m + delta) * normalizer(m) with delta = 1 satisfies
    u_m = b_m u_{m-1} + a_m u_{m-2} for all m >= 2.
    """
    for j in range(0, 3):
        if rec.R_plus.eval(Fraction(j), z) == 0:
            raise CFError(f"normalization not found: R_plus vanishes at n={j}")
    b_poly = rec.R_zero
    a_poly = rec.R_minus.shift_n(1) * rec.R_plus  # evaluated at m-1 per CFSpec convention
    tail = CFSpec([Poly2(0)], b_poly, [], a_poly)

    def normalizer(m: int) -> Fraction:
        out = Fraction(1)
        for j in range(0, m + 1):
            out *= Fraction(rec.R_plus.eval(Fraction(j), z))
        return out

    return RecurrenceCF(tail, normalizer, 1)
