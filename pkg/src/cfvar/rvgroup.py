"""Permutation groups acting on the exponent matrices of the integral families.

Group elements are permutations of the 16-cell (triple-integral) or 10-cell
(double-integral) index set; matrices act by value transport.  Closure is a
breadth-first enumeration that also records a generator word per element.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import NamedTuple

from .integrals import (CELLS2, CELLS3, CMatrix, IntegralError, Params2, Params3,
                        QuadSpec, cmatrix2, cmatrix3, convergent2_ok, convergent3_ok,
                        I2_coords, I3_coords, normalized2, normalized3,
                        recover_params2, recover_params3)


@dataclass(frozen=True)
class CellPerm:
    """Bijection on a cell index set, stored as a mapping tuple."""

    domain: tuple
    mapping: tuple  # image[i] is the image of domain[i]
    name: str = ""

    def __post_init__(self):
        if sorted(self.mapping) != sorted(self.domain):
            raise ValueError("not a bijection on the domain")

    def __call__(self, cell):
        return self.mapping[self.domain.index(cell)]

    def compose(self, other: "CellPerm") -> "CellPerm":
        """self after other."""
        idx = {c: k for k, c in enumerate(self.domain)}
        mapping = tuple(self.mapping[idx[other.mapping[k]]] for k in range(len(self.domain)))
        return CellPerm(self.domain, mapping, "")

    def inverse(self) -> "CellPerm":
        inv = {img: src for src, img in zip(self.domain, self.mapping)}
        return CellPerm(self.domain, tuple(inv[c] for c in self.domain), "")

    @property
    def is_identity(self) -> bool:
        return self.mapping == self.domain

    def order(self) -> int:
        p = self
        for k in range(1, 10001):
            if p.is_identity:
                return k
            p = p.compose(self)
        raise ValueError("order exceeds bound")


def _identity(domain) -> CellPerm:
    return CellPerm(domain, domain, "e")


def _from_pairs(domain, pairs, name) -> CellPerm:
    m = {c: c for c in domain}
    for a, b in pairs:
        m[a], m[b] = m[b], m[a]
    return CellPerm(domain, tuple(m[c] for c in domain), name)


def _row_swap(domain, r1, r2, name) -> CellPerm:
    pairs = [((r1, j), (r2, j)) for j in range(4) if (r1, j) in domain and (r2, j) in domain]
    return _from_pairs(domain, pairs, name)


def _col_swap(domain, c1, c2, name) -> CellPerm:
    pairs = [((i, c1), (i, c2)) for i in range(4) if (i, c1) in domain and (i, c2) in domain]
    return _from_pairs(domain, pairs, name)


def generators_G3() -> list[CellPerm]:
    """a_j (rows j,0 for j=1,2,3), b (columns 2,3), and the h double-transposition."""
    D = CELLS3
    gens = [_row_swap(D, j, 0, f"a{j}") for j in (1, 2, 3)]
    gens.append(_col_swap(D, 2, 3, "b"))
    gens.append(_from_pairs(D, [((0, 0), (2, 2)), ((0, 2), (2, 0)),
                                ((1, 1), (3, 3)), ((1, 3), (3, 1))], "h"))
    return gens


def generators_G2() -> list[CellPerm]:
    """a_j (rows j,3 for j=1,2), b (columns 2,3), and h on the 10-cell set."""
    D = CELLS2
    gens = [_row_swap(D, j, 3, f"a{j}") for j in (1, 2)]
    gens.append(_col_swap(D, 2, 3, "b"))
    gens.append(_from_pairs(D, [((0, 0), (2, 2)), ((1, 1), (3, 3)), ((1, 3), (3, 1))], "h"))
    return gens


class GroupClosure(NamedTuple):
    elements: list          # CellPerm
    words: dict             # mapping tuple -> generator word


def group_closure(gens: list[CellPerm], bound: int = 10 ** 6) -> GroupClosure:
    """Breadth-first closure under composition, with a generator word per element."""
    if not gens:
        raise ValueError("need at least one generator")
    domain = gens[0].domain
    ident = _identity(domain)
    words = {ident.mapping: ""}
    frontier = [ident]
    elements = [ident]
    while frontier:
        nxt = []
        for el in frontier:
            for g in gens:
                new = g.compose(el)
                if new.mapping not in words:
                    words[new.mapping] = (g.name or "g") + words[el.mapping]
                    nxt.append(new)
                    elements.append(new)
                    if len(elements) > bound:
                        raise ValueError("closure exceeded safety bound")
        frontier = nxt
    return GroupClosure(elements, words)


def apply_perm(perm: CellPerm, c: CMatrix) -> CMatrix:
    """Value transport: the permuted matrix holds c[cell] at perm(cell)."""
    vals = c.as_dict()
    return CMatrix.from_dict({perm(cell): vals[cell] for cell in perm.domain})


def successive_maxima(multiset, k: int) -> tuple:
    vals = sorted(multiset, reverse=True)
    if k > len(vals):
        raise ValueError("k exceeds multiset size")
    return tuple(vals[:k])


def lcm_d(N: int) -> int:
    """d_N = lcm(1, ..., N); d_0 = 1."""
    if N < 0:
        raise ValueError("need N >= 0")
    return reduce(math.lcm, range(1, N + 1), 1)


# --------------------------------------------------------------------------
# integrality of the period coordinates on the diagonal profiles
# --------------------------------------------------------------------------
class IntegralityRow(NamedTuple):
    n: int
    d: int                 # d_{2n-1}
    scaled: tuple          # the scaled coordinates as Fractions
    cofactor: int          # minimal integer making all scaled entries integral
    ok: bool               # integral without any cofactor


class IntegralityReport(NamedTuple):
    rows: list
    all_ok: bool


def _cofactor(values) -> int:
    return reduce(math.lcm, (v.denominator for v in values), 1)


def integrality3(n_max: int) -> IntegralityReport:
    """d_{2n-1}^3 (alpha, beta)(n) in Z^2 for the all-(n-1/2) profile, n = 1..n_max."""
    rows = []
    for n in range(1, n_max + 1):
        d = lcm_d(2 * n - 1)
        al, be = I3_coords(n)
        scaled = (al * d ** 3, be * d ** 3)
        cof = _cofactor(scaled)
        rows.append(IntegralityRow(n, d, scaled, cof, cof == 1))
    return IntegralityReport(rows, all(r.ok for r in rows))


def integrality2(n_max: int) -> IntegralityReport:
    """d_{2n-1}^2 (ptilde, qtilde)(n) in Z^2 for the all-(n-1/2) profile."""
    rows = []
    for n in range(1, n_max + 1):
        d = lcm_d(2 * n - 1)
        pt, qt = I2_coords(n)
        scaled = (pt * d ** 2, qt * d ** 2)
        cof = _cofactor(scaled)
        rows.append(IntegralityRow(n, d, scaled, cof, cof == 1))
    return IntegralityReport(rows, all(r.ok for r in rows))


# --------------------------------------------------------------------------
# invariance scan
# --------------------------------------------------------------------------
class ScanRow(NamedTuple):
    word: str
    params: tuple
    deviation: object      # None if skipped
    skipped: str           # reason, empty if evaluated


class ScanReport(NamedTuple):
    base_value: object
    rows: list
    max_deviation: object
    n_skipped: int


def invariance_scan(a, sample_size: int = 20, spec: QuadSpec | None = None) -> ScanReport:
    """Compare the gamma-normalized integral across group-transformed parameters.

    ``a`` is a Params3 or Params2.  Elements whose transformed parameters
    violate the convergence condition are skipped with notice.  Sampling is
    deterministic: the closure is enumerated breadth-first and sampled at an
    even stride.
    """
    if isinstance(a, Params3):
        gens, make, rec, norm, conv, ok_fn = (generators_G3(), cmatrix3, recover_params3,
                                              normalized3, convergent3_ok, None)
        spec = spec or QuadSpec(1e-6, 5)
    elif isinstance(a, Params2):
        gens, make, rec, norm, conv, ok_fn = (generators_G2(), cmatrix2, recover_params2,
                                              normalized2, convergent2_ok, None)
        spec = spec or QuadSpec(1e-8, 6)
    else:
        raise TypeError("expected Params3 or Params2")
    if not conv(a):
        raise IntegralError("base parameters do not converge")
    closure = group_closure(gens)
    els = closure.elements
    if sample_size < len(els):
        stride = max(1, len(els) // sample_size)
        els = els[::stride][:sample_size]
    base_matrix = make(a)
    base = norm(a, spec).value
    rows = []
    seen = set()
    devs = []
    n_skipped = 0
    for el in els:
        word = closure.words[el.mapping] or "e"
        c2 = apply_perm(el, base_matrix)
        params, consistent = rec(c2)
        if not consistent:
            rows.append(ScanRow(word, params.astuple(), None, "image not in parameter family"))
            n_skipped += 1
            continue
        if params.astuple() in seen:
            continue
        seen.add(params.astuple())
        if not conv(params):
            rows.append(ScanRow(word, params.astuple(), None, "transformed integral non-convergent"))
            n_skipped += 1
            continue
        dev = abs(norm(params, spec).value - base)
        devs.append(dev)
        rows.append(ScanRow(word, params.astuple(), dev, ""))
    return ScanReport(base, rows, max(devs) if devs else None, n_skipped)
