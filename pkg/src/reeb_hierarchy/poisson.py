"""Graded Poisson bracket on orbit polynomials.

    {f, g} = sum_n kappa_n (df/dp_n dg/dq_n - (-1)^{|f||g|} dg/dp_n df/dq_n)

with ``p_n = q_{-n}``.  Derivatives in ``p`` are taken from the right and
derivatives in ``q`` from the left; with this choice the bracket is exactly
the hbar^1 part of the normal-ordered Weyl commutator (see ``weyl``).

Besides the bracket of two explicit polynomials this module computes single
coefficients of the bracket of two *series* (possibly infinite sums such as
the dispersionless KdV integrals) exactly, by enumerating which pairs of
input monomials can contribute to a given output monomial.
"""

from __future__ import annotations

from collections import Counter
from fractions import Fraction
from functools import lru_cache
from itertools import product

from .algebra import (BadOrbitError, Monomial, Polynomial, _partial_term, koszul_sort,
                      monomial_parity, winding)


def _valid(mono: Monomial, model) -> bool:
    """True if ``mono`` is a nonvanishing monomial of good variables."""
    prev = None
    for k in mono:
        var = model.variable(k)
        if not var.good or (k == prev and var.parity):
            return False
        prev = k
    return True


def bracket_monomials(a: Monomial, b: Monomial, model) -> dict[Monomial, Fraction]:
    """``{a, b}`` for two canonical monomials with unit coefficients."""
    return dict(_bracket_monomials(a, b, model))


@lru_cache(maxsize=200_000)
def _bracket_monomials(a: Monomial, b: Monomial, model) -> tuple:
    par = lambda k: model.variable(k).parity  # noqa: E731
    pa = monomial_parity(a, model)
    pb = monomial_parity(b, model)
    swap = -1 if pa and pb else 1
    out: dict[Monomial, Fraction] = {}

    def add(n, left, right, weight):
        # left carries p_n, right carries q_n
        ra = _partial_term(left, -n, "right", par)
        rb = _partial_term(right, n, "left", par)
        mono, s = koszul_sort(ra[0] + rb[0], par)
        if s:
            out[mono] = out.get(mono, 0) + weight * n * ra[1] * rb[1] * s

    for n in {-k for k in a if k < 0} & {k for k in b if k > 0}:
        add(n, a, b, 1)
    for n in {-k for k in b if k < 0} & {k for k in a if k > 0}:
        # the product d_p g * d_q f is formed in that order
        add(n, b, a, -swap)
    return tuple((m, Fraction(c)) for m, c in out.items() if c)


def bracket(f: Polynomial, g: Polynomial, model=None) -> Polynomial:
    """Poisson bracket of two polynomials over the same orbit model.

    Inhomogeneous parity is handled term by term, which is the bilinear
    extension over homogeneous parts.
    """
    model = model if model is not None else f.grading
    f._check(g)
    acc: dict[Monomial, Fraction] = {}
    for a, ca in f.items():
        for b, cb in g.items():
            for mono, c in _bracket_monomials(a, b, model):
                acc[mono] = acc.get(mono, 0) + c * ca * cb
    return Polynomial({m: c for m, c in acc.items() if c}, f.grading, _trusted=True)


class SeriesSpec:
    """A possibly infinite formal sum queried one coefficient at a time.

    Subclasses implement :meth:`coefficient`.  ``winding_zero`` promises that
    every monomial with nonzero coefficient has winding 0, which lets the
    bracket enumeration fix the contracted index.  ``lengths`` is the set of
    monomial lengths that can occur (None if unknown).
    """

    winding_zero = True
    lengths: frozenset | None = None

    def coefficient(self, mono: Monomial) -> Fraction:
        raise NotImplementedError

    def contraction_candidates(self) -> set[int] | None:
        """Indices ``n > 0`` that can be contracted if winding is not fixed."""
        return None

    def describe(self) -> str:
        return type(self).__name__


class ExplicitSeries(SeriesSpec):
    def __init__(self, poly: Polynomial):
        self.poly = poly
        self.winding_zero = all(winding(m) == 0 for m, _ in poly.items())
        self.lengths = frozenset(len(m) for m, _ in poly.items())

    def coefficient(self, mono):
        return self.poly.coefficient(mono)

    def contraction_candidates(self):
        return {abs(k) for m, _ in self.poly.items() for k in m}

    def describe(self):
        return f"explicit({len(self.poly)} terms)"


class ZeroSeries(SeriesSpec):
    lengths = frozenset()

    def coefficient(self, mono):
        return Fraction(0)

    def describe(self):
        return "zero"


def _submultisets(mono: Monomial):
    counts = sorted(Counter(mono).items())
    keys = [k for k, _ in counts]
    for choice in product(*(range(c + 1) for _, c in counts)):
        left = []
        right = []
        for k, take, (_, total) in zip(keys, choice, counts):
            left.extend([k] * take)
            right.extend([k] * (total - take))
        yield tuple(left), tuple(right)


def contributing_pairs(target: Monomial, f: SeriesSpec, g: SeriesSpec, model) -> set:
    """All ``(a, b)`` such that ``{a, b}`` may contain ``target``."""
    pairs = set()
    for left, right in _submultisets(target):
        w = winding(left)
        # a = left * p_n, b = right * q_n
        cands = {w} if (f.winding_zero or g.winding_zero) else (
            (f.contraction_candidates() or set()) & (g.contraction_candidates() or set()))
        for n in cands:
            if n > 0:
                pairs.add((tuple(sorted(left + (-n,))), tuple(sorted(right + (n,)))))
        # a = left * q_n, b = right * p_n
        cands = {-w} if (f.winding_zero or g.winding_zero) else (
            (f.contraction_candidates() or set()) & (g.contraction_candidates() or set()))
        for n in cands:
            if n > 0:
                pairs.add((tuple(sorted(left + (n,))), tuple(sorted(right + (-n,)))))
    if f.lengths is not None and g.lengths is not None:
        pairs = {(a, b) for a, b in pairs if len(a) in f.lengths and len(b) in g.lengths}
    return {(a, b) for a, b in pairs if _valid(a, model) and _valid(b, model)}


def bracket_coefficient(target, f: SeriesSpec, g: SeriesSpec, model) -> Fraction:
    """Exact coefficient of ``target`` in ``{f, g}`` for two series.

    Each contributing pair of monomials is found by splitting the factors of
    ``target`` between ``f`` and ``g``; winding conservation fixes the
    contracted index, so the sum is finite even for infinite series.
    """
    target = tuple(sorted(target))
    if winding(target) != 0 and (f.winding_zero and g.winding_zero):
        raise ValueError(f"target {list(target)} has nonzero winding")
    for k in target:
        if not model.variable(k).good:
            raise BadOrbitError(f"target contains bad orbit variable {k}")
    total = Fraction(0)
    for a, b in sorted(contributing_pairs(target, f, g, model)):
        ca = f.coefficient(a)
        if not ca:
            continue
        cb = g.coefficient(b)
        if not cb:
            continue
        for mono, c in _bracket_monomials(a, b, model):
            if mono == target:
                total += c * ca * cb
    return total
