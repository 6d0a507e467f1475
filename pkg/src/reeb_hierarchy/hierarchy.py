"""Descendant Hamiltonians of a single orbit and commutativity checks.

The circle hierarchy is the dispersionless KdV sequence

    h_j = sum_{n_1 + ... + n_{j+2} = 0} q_{n_1} ... q_{n_{j+2}} / (j+2)!

over ordered index vectors.  We store each multiset once, with coefficient
``1 / prod(multiplicity!)``, which is the same total.  For a closed geodesic
the hierarchy keeps only the summands of degree ``2(m + j - 3)`` under the
orbit model's grading, drops bad orbits, and multiplies by the orientation
sign ``epsilon``.
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement, product

from .algebra import Monomial, Polynomial, monomial_degree
from .orbits import CIRCLE, MultiplicativeSigns, OrbitModel
from .poisson import SeriesSpec, ZeroSeries, _valid, bracket_coefficient

FILTERS = ("target", "none", "max")


class SearchBoundError(ValueError):
    pass


def target_degree(model: OrbitModel, j: int) -> int:
    return 2 * (model.m + j - 3)


def t_degree(j: int, theta_degree: int = 1) -> int:
    """Grading of the formal variable ``t_j`` coupled to the j-th descendant."""
    return 2 * (1 - j) - theta_degree


def _symmetry_factor(mono: Monomial) -> Fraction:
    return Fraction(1, math.prod(math.factorial(c) for c in Counter(mono).values()))


def kdv_coefficient(mono: Monomial, j: int) -> Fraction:
    """Coefficient of a sorted monomial in the untruncated KdV integral ``h_j``."""
    if len(mono) != j + 2 or sum(mono) != 0 or 0 in mono:
        return Fraction(0)
    return _symmetry_factor(mono)


def window(cutoff: int) -> list[int]:
    return [k for k in range(-cutoff, cutoff + 1) if k]


def winding_zero_multisets(length: int, indices) -> list[Monomial]:
    """Sorted tuples of ``length`` entries from ``indices`` summing to zero."""
    indices = sorted(indices)
    return [c for c in combinations_with_replacement(indices, length) if sum(c) == 0]


def kdv(j: int, cutoff: int) -> Polynomial:
    """Truncation of the j-th dispersionless KdV integral to ``|n| <= cutoff``.

    >>> kdv(0, 2)
    1*q[-2]*q[2] + 1*q[-1]*q[1]
    """
    if j < 0 or cutoff < 1:
        raise ValueError("need j >= 0 and cutoff >= 1")
    terms = {m: _symmetry_factor(m) for m in winding_zero_multisets(j + 2, window(cutoff))}
    return Polynomial(terms, CIRCLE, _trusted=True)


def _filtered_coefficient(mono: Monomial, model: OrbitModel, j: int, mode: str) -> Fraction:
    base = kdv_coefficient(mono, j)
    if not base or not _valid(mono, model):
        return Fraction(0)
    if mode == "target" and monomial_degree(mono, model) != target_degree(model, j):
        return Fraction(0)
    return model.epsilon(mono) * base


def filtered(model: OrbitModel, j: int, cutoff: int, mode: str = "target",
             theta_degree: int = 1) -> Polynomial:
    """The hierarchy element ``g_j`` of a closed geodesic, truncated at ``cutoff``.

    ``mode='target'`` keeps degree ``2(m+j-3)``; ``'none'`` keeps every
    good summand; ``'max'`` keeps the summands of maximal degree within the
    window (exploratory only).  Monomials with a repeated odd variable vanish.
    """
    if mode not in FILTERS:
        raise ValueError(f"unknown filter {mode!r}")
    if theta_degree == 0:
        return Polynomial.zero(model)
    if theta_degree != 1:
        raise ValueError("only zero- and one-forms occur for orbit curves")
    pre = "none" if mode == "max" else mode
    terms = {}
    for mono in winding_zero_multisets(j + 2, window(cutoff)):
        c = _filtered_coefficient(mono, model, j, pre)
        if c:
            terms[mono] = c
    if mode == "max" and terms:
        top = max(monomial_degree(m, model) for m in terms)
        terms = {m: c for m, c in terms.items() if monomial_degree(m, model) == top}
    return Polynomial(terms, model, _trusted=True)


class KdVSeries(SeriesSpec):
    def __init__(self, j: int):
        self.j = j
        self.lengths = frozenset({j + 2})

    def coefficient(self, mono):
        return kdv_coefficient(tuple(mono), self.j)

    def describe(self):
        return f"kdv:{self.j}"


class FilteredSeries(SeriesSpec):
    def __init__(self, model: OrbitModel, j: int, mode: str = "target"):
        if mode not in ("target", "none"):
            raise ValueError("series support the 'target' and 'none' filters only")
        self.model, self.j, self.mode = model, j, mode
        self.lengths = frozenset({j + 2})

    def coefficient(self, mono):
        return _filtered_coefficient(tuple(mono), self.model, self.j, self.mode)

    def describe(self):
        return f"filtered:{self.j}" + ("" if self.mode == "target" else f"/{self.mode}")


@dataclass(frozen=True)
class HierarchySpec:
    model: OrbitModel
    j: int
    cutoff: int
    filter: str = "target"
    theta_degree: int = 1

    def __post_init__(self):
        if self.cutoff < 1:
            raise ValueError("cutoff must be at least 1")
        if self.theta_degree not in (0, 1):
            raise ValueError("theta_degree must be 0 or 1")

    @property
    def t_degree(self) -> int:
        return t_degree(self.j, self.theta_degree)

    @property
    def degree(self) -> int:
        return target_degree(self.model, self.j)

    def generate(self) -> Polynomial:
        return filtered(self.model, self.j, self.cutoff, self.filter, self.theta_degree)


@dataclass
class CommuteReport:
    f: str
    g: str
    window: int
    checked: int
    residuals: list = field(default_factory=list)  # [(monomial, Fraction)]

    @property
    def passed(self) -> bool:
        return not self.residuals

    def to_json(self):
        return {
            "f": self.f, "g": self.g, "window": self.window, "checked": self.checked,
            "passed": self.passed,
            "residuals": [{"mono": list(m), "num": str(c.numerator), "den": str(c.denominator)}
                          for m, c in self.residuals],
        }


def candidate_targets(f: SeriesSpec, g: SeriesSpec, model: OrbitModel, cutoff: int) -> list:
    if f.lengths is None or g.lengths is None:
        raise ValueError("verification needs series with known monomial lengths")
    lengths = sorted({a + b - 2 for a in f.lengths for b in g.lengths if a + b >= 2})
    indices = [k for k in window(cutoff) if model.variable(k).good]
    out = []
    for length in lengths:
        out.extend(m for m in winding_zero_multisets(length, indices) if _valid(m, model))
    return out


def _coefficients(args):
    targets, f, g, model = args
    return [bracket_coefficient(t, f, g, model) for t in targets]


def verify_commute(f: SeriesSpec, g: SeriesSpec, model: OrbitModel, cutoff: int,
                   jobs: int = 1) -> CommuteReport:
    """Check ``{f, g} = 0`` on every monomial with indices in ``[-cutoff, cutoff]``.

    Each coefficient is exact for the untruncated series.  With ``jobs > 1``
    the targets are split into chunks for a process pool; the residual list
    is ordered by target either way.
    """
    targets = candidate_targets(f, g, model, cutoff)
    if jobs > 1 and len(targets) > 64:
        size = -(-len(targets) // (4 * jobs))
        chunks = [targets[i:i + size] for i in range(0, len(targets), size)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            values = [c for part in pool.map(_coefficients, [(ch, f, g, model) for ch in chunks])
                      for c in part]
    else:
        values = _coefficients((targets, f, g, model))
    residuals = [(t, c) for t, c in zip(targets, values) if c]
    return CommuteReport(f.describe(), g.describe(), cutoff, len(targets), residuals)


def zero_form_hierarchy(j: int) -> SeriesSpec:
    """Descendants of the zero-form string: identically zero."""
    return ZeroSeries()


def sign_search(model: OrbitModel, j: int, k: int, cutoff: int, bound: int | None = None,
                mode: str = "target", max_assignments: int = 4096, jobs: int = 1) -> list[dict]:
    """Multiplicative sign choices ``epsilon_n`` making ``g_j`` and ``g_k`` commute.

    Every good signed index with ``|n| <= bound`` (default ``cutoff``) gets a
    sign; indices beyond it keep +1.  Returns the passing assignments as
    ``{index: sign}`` dicts in enumeration order.
    """
    bound = cutoff if bound is None else bound
    indices = [n for n in window(bound) if model.variable(n).good]
    if 2 ** len(indices) > max_assignments:
        raise SearchBoundError(
            f"{2 ** len(indices)} sign assignments exceed the limit {max_assignments}")
    passing = []
    for choice in product((1, -1), repeat=len(indices)):
        signs = dict(zip(indices, choice))
        trial = model.with_signs(MultiplicativeSigns.from_mapping(signs))
        report = verify_commute(FilteredSeries(trial, j, mode), FilteredSeries(trial, k, mode),
                                trial, cutoff, jobs)
        if report.passed:
            passing.append(signs)
    return passing
