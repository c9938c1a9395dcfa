"""CF variations: half-shift, equivalence rescaling, head edits, Euler transform.

The half-shift substitutes n -> n + 1/2 in the coefficient polynomials and
clears denominators with a constant equivalence scaling c_n = c (n >= 1,
c_0 = 1), which leaves every convergent unchanged as a fraction.  Head edits
relate CFs with a common tail through an exact 2x2 Moebius matrix built from
prefix transfer matrices.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .cfcore import CFError, CFSpec, ThreeTermRecurrence, convergents, prefix_transfer
from .poly import Poly2


@dataclass(frozen=True)
class MoebiusMap:
    """x -> (a x + b) / (c x + d) over exact rationals."""

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    def __post_init__(self):
        if self.det == 0:
            raise CFError("Moebius map must be invertible")

    @property
    def det(self) -> Fraction:
        return self.a * self.d - self.b * self.c

    def __call__(self, x):
        num = self.a * x + self.b
        den = self.c * x + self.d
        if den == 0:
            raise ZeroDivisionError("Moebius map pole")
        return num / den

    def inverse(self) -> "MoebiusMap":
        return MoebiusMap(self.d, -self.b, -self.c, self.a)

    def compose(self, other: "MoebiusMap") -> "MoebiusMap":
        """self after other: (self . other)(x) = self(other(x))."""
        return MoebiusMap(self.a * other.a + self.b * other.c,
                          self.a * other.b + self.b * other.d,
                          self.c * other.a + self.d * other.c,
                          self.c * other.b + self.d * other.d)

    def __str__(self):
        return f"x -> ({self.a} x + {self.b}) / ({self.c} x + {self.d})"


def _require_pipeline_shape(cf: CFSpec):
    if len(cf.b_heads) > 1 or len(cf.a_heads) > 1:
        raise CFError("transform supports at most one b-head and one a-head")


def clear_denominators(cf: CFSpec) -> tuple[CFSpec, Fraction]:
    """Equivalence-rescale with c_0 = 1, c_n = c (n >= 1) to make all
    coefficients integral; returns (rescaled CF, c).

    The scaling acts as a_n -> c_n c_{n-1} a_n, b_n -> c_n b_n, so c must make
    c * b_poly, c^2 * a_poly, c * b-head (index >= 1, none in the pipeline
    shape) and c * a_1 integral; the smallest such positive rational is
    assembled prime by prime.
    """
    _require_pipeline_shape(cf)
    constraints_c = [cf.b_poly]          # scaled by c
    constraints_c2 = [cf.a_poly]         # scaled by c^2
    if cf.a_heads:
        constraints_c.append(cf.a_heads[0])
    c = _minimal_scale(constraints_c, constraints_c2)
    new_b = cf.b_poly * c
    new_a = cf.a_poly * c * c
    new_a_heads = [h * c for h in cf.a_heads]
    out = CFSpec(cf.b_heads, new_b, new_a_heads, new_a)
    return out, c


def _minimal_scale(lin: list[Poly2], quad: list[Poly2]) -> Fraction:
    """Smallest positive rational c with c*lin and c^2*quad integer-coefficient.

    Per prime p the constraints are v_p(c) >= -min v_p(lin coeffs) and
    2 v_p(c) >= -min v_p(quad coeffs); the minimum may be negative, which
    strips common content.
    """
    primes = set()
    fracs = [f for poly in lin + quad for row in poly.coeffs for f in row if f]
    if not fracs:
        return Fraction(1)
    for f in fracs:
        primes |= _prime_factors(f.denominator) | _prime_factors(f.numerator)
    c = Fraction(1)
    for p in sorted(primes):
        bounds = []
        lo_lin = min((_valuation(f, p) for poly in lin for row in poly.coeffs for f in row if f),
                     default=None)
        lo_quad = min((_valuation(f, p) for poly in quad for row in poly.coeffs for f in row if f),
                      default=None)
        if lo_lin is not None:
            bounds.append(-lo_lin)
        if lo_quad is not None:
            bounds.append(-(lo_quad // 2))  # = ceil(-lo_quad / 2)
        c *= Fraction(p) ** max(bounds)
    return c


def _prime_factors(n: int) -> set:
    n = abs(n)
    out = set()
    d = 2
    while d * d <= n:
        while n % d == 0:
            out.add(d)
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.add(n)
    return out


def _valuation(f: Fraction, p: int) -> int:
    v = 0
    num, den = f.numerator, f.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def half_shift(cf: CFSpec) -> CFSpec:
    """n -> n + 1/2 in the coefficient polynomials, then clear denominators.

    Heads are preserved (scaled by the clearing constant where the
    equivalence transform reaches them).
    """
    _require_pipeline_shape(cf)
    shifted = CFSpec(cf.b_heads, cf.b_poly.shift_n(Fraction(1, 2)),
                     cf.a_heads, cf.a_poly.shift_n(Fraction(1, 2)))
    out, _ = clear_denominators(shifted)
    return out


def head_edit(cf: CFSpec, new_b_heads, new_a_heads, z=None,
              max_coincidence: int = 10) -> tuple[CFSpec, MoebiusMap]:
    """Replace head lists, returning the new CF and the exact Moebius map M
    with limit(new) = M(limit(old)).

    Requires the two CFs to materialize identically beyond some depth
    k <= max_coincidence (checked, not assumed).
    """
    new = CFSpec(new_b_heads, cf.b_poly, new_a_heads, cf.a_poly)
    if not (cf.b_poly == new.b_poly and cf.a_poly == new.a_poly):
        raise CFError("tail polynomials differ; heads-only edit required")
    b_old, a_old = cf.bind(z)
    b_new, a_new = new.bind(z)
    probe = max_coincidence + max(len(cf.b_heads), len(new.b_heads),
                                  len(cf.a_heads), len(new.a_heads)) + 3
    k = 0
    for n in range(1, probe + 1):
        if a_old(n) != a_new(n) or b_old(n) != b_new(n):
            k = n
    if k > max_coincidence:
        raise CFError(f"tails do not coincide within depth {max_coincidence}")
    T_old = prefix_transfer(cf, k, z)
    T_new = prefix_transfer(new, k, z)
    M_old = MoebiusMap(T_old[0][0], T_old[0][1], T_old[1][0], T_old[1][1])
    M_new = MoebiusMap(T_new[0][0], T_new[0][1], T_new[1][0], T_new[1][1])
    return new, M_new.compose(M_old.inverse())


def integer_shift(cf: CFSpec, m: int, z=None) -> tuple[CFSpec, MoebiusMap]:
    """Drop the first m layers into a Moebius map; shift polynomial arguments by m.

    The returned CF has value x = a_{m+1}/(b_{m+1} + ...) and
    limit(cf) = M(x) with M from the depth-m prefix transfer matrix.
    """
    if m < 0:
        raise CFError("shift must be >= 0")
    if m == 0:
        return cf, MoebiusMap(Fraction(1), Fraction(0), Fraction(0), Fraction(1))
    b_old, a_old = cf.bind(z)
    for j in range(1, m + 1):
        if a_old(j) == 0:
            raise CFError(f"zero partial numerator a_{j} in dropped layers")
    T = prefix_transfer(cf, m, z)
    M = MoebiusMap(T[0][0], T[0][1], T[1][0], T[1][1])
    kb, ka = len(cf.b_heads), len(cf.a_heads)
    new_b_heads = [Poly2(0)] + [cf.b_heads[j] for j in range(m + 1, kb)]
    new_a_heads = [cf.a_heads[j - 1] for j in range(m + 1, ka + 1)]
    new = CFSpec(new_b_heads, cf.b_poly.shift_n(m), new_a_heads, cf.a_poly.shift_n(m))
    return new, M


def euler_transform(t0, ratio_num: Poly2, ratio_den: Poly2, k_start: int) -> CFSpec:
    """Series-to-CF: the depth-n convergent equals the n-th partial sum exactly.

    The series is sum_{k >= k_start} t_k with t_{k_start} = t0 and term ratio
    t_k / t_{k-1} = ratio_num(k) / ratio_den(k) (polynomials in k, possibly
    z-dependent).  k_start must be 0 or 1; the depth-n convergent equals
    sum_{k <= n} t_k (with the empty sum 0 at depth 0 when k_start = 1).

    Denominators are cleared with the per-layer scaling c_m = ratio_den(m),
    reproducing the catalog's printed forms.
    """
    if k_start not in (0, 1):
        raise CFError("k_start must be 0 or 1")
    t0 = t0 if isinstance(t0, Poly2) else Poly2(t0)
    if ratio_den.is_zero:
        raise CFError("ratio denominator is identically zero")
    for k in range(max(1, k_start), max(1, k_start) + 8):
        if ratio_den.z_free and ratio_den.eval(Fraction(k)) == 0:
            raise CFError(f"ratio denominator vanishes at k={k}")
        if ratio_num.z_free and k > k_start and ratio_num.eval(Fraction(k)) == 0:
            raise CFError(f"ratio vanishes at k={k}")
    # unscaled: b_0 = t0 or 0; a_1 = t_1; b_m = 1 + r_m, a_m = -r_m (m >= 2)
    # scaled by c_m = den(m):  b_m = den(m) + num(m),  a_m = -num(m) den(m-1)
    if k_start == 0:
        b0 = t0
        a1 = t0 * _at(ratio_num, 1)
    else:
        b0 = Poly2(0)
        a1 = t0 * _at(ratio_den, 1)
    b_poly = ratio_den + ratio_num
    a_poly = -(ratio_num.shift_n(1) * ratio_den)  # evaluated at m-1 per CFSpec convention
    b1 = _at(ratio_den, 1)
    b_heads = [b0]
    if _at(b_poly, 1) != b1:
        b_heads.append(b1)
    return CFSpec(b_heads, b_poly, [a1], a_poly)


def _at(p: Poly2, k: int) -> Poly2:
    """Evaluate the n-variable at integer k, keeping z symbolic."""
    out = Poly2(0)
    npow = 1
    for i, row in enumerate(p.coeffs):
        out = out + Poly2([row]) * npow
        npow *= k
    return out


def recurrence_shift_half(rec: ThreeTermRecurrence) -> ThreeTermRecurrence:
    """Substitute n -> n + 1/2 and renormalize to a primitive integer triple.

    Clears denominators with the minimal power of 2 and removes the common
    integer content of the three coefficient polynomials.
    """
    shifted = [rec.R_plus.shift_n(Fraction(1, 2)), rec.R_zero.shift_n(Fraction(1, 2)),
               rec.R_minus.shift_n(Fraction(1, 2))]
    den = 1
    for p in shifted:
        den = den * p.denominator_lcm() // math.gcd(den, p.denominator_lcm())
    scaled = [p * den for p in shifted]
    g = Fraction(0)
    for p in scaled:
        c = p.content()
        g = c if g == 0 else Fraction(math.gcd(g.numerator, c.numerator),
                                      math.lcm(g.denominator, c.denominator))
    if g not in (0, 1):
        scaled = [p / g for p in scaled]
    return ThreeTermRecurrence(*scaled)


def recurrences_equal_up_to_shift(r1: ThreeTermRecurrence, r2: ThreeTermRecurrence,
                                  max_shift: int = 3):
    """Return the integer shift delta with r1 shifted by delta == r2, else None."""
    for delta in range(-max_shift, max_shift + 1):
        s = r1.shift_n(delta)
        if (s.R_plus == r2.R_plus and s.R_zero == r2.R_zero and s.R_minus == r2.R_minus):
            return delta
    return None
