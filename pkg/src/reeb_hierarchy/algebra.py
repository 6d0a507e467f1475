"""Graded supercommutative polynomials over the rationals.

Variables are identified by a signed nonzero index ``k``: ``k > 0`` is the
orbit variable ``q_k`` and ``k < 0`` is ``p_|k|`` (so ``q_{-n} = p_n``).
Monomials are stored as tuples of indices sorted ascending; an even variable
may repeat, an odd one may not.  Every sign produced by reordering factors is
the Koszul sign: one ``-1`` per inversion of two odd factors.

The grading of each variable is not stored in the polynomial itself but read
from a *grading*, any object with a ``variable(k) -> OrbitVariable`` method
(``reeb_hierarchy.orbits.OrbitModel`` is the usual one).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Protocol

Monomial = tuple  # tuple[int, ...], sorted ascending


class BadOrbitError(ValueError):
    """A variable attached to a bad orbit was used."""


@dataclass(frozen=True)
class OrbitVariable:
    index: int
    grading: int
    kappa: int
    good: bool = True

    def __post_init__(self):
        if self.index == 0:
            raise ValueError("orbit variable index must be nonzero")
        if self.kappa < 1:
            raise ValueError("multiplicity must be positive")

    @property
    def parity(self) -> int:
        return self.grading % 2

    @property
    def name(self) -> str:
        return f"q{self.index}" if self.index > 0 else f"p{-self.index}"


class Grading(Protocol):
    def variable(self, k: int) -> OrbitVariable: ...


def _parity(grading: Grading, k: int) -> int:
    var = grading.variable(k)
    if not var.good:
        raise BadOrbitError(f"{var.name} belongs to a bad orbit")
    return var.parity


def koszul_sort(factors: Iterable[int], parity) -> tuple[Monomial, int]:
    """Sort ``factors`` ascending and return ``(sorted, sign)``.

    ``parity`` maps an index to 0/1.  ``sign`` is 0 when an odd factor
    repeats.  Insertion sort, so the sign is accumulated swap by swap.
    """
    word = list(factors)
    sign = 1
    for i in range(1, len(word)):
        j = i
        while j > 0 and word[j - 1] > word[j]:
            if parity(word[j - 1]) and parity(word[j]):
                sign = -sign
            word[j - 1], word[j] = word[j], word[j - 1]
            j -= 1
    for a, b in zip(word, word[1:]):
        if a == b and parity(a):
            return tuple(word), 0
    return tuple(word), sign


def normalize(factors: Iterable[int], grading: Grading) -> tuple[Monomial, int]:
    """Canonical monomial and Koszul sign for a product of variables.

    >>> from reeb_hierarchy.orbits import OrbitModel
    >>> normalize([1, -1], OrbitModel.circle())
    ((-1, 1), 1)
    """
    factors = list(factors)
    for k in factors:
        _parity(grading, k)
    return koszul_sort(factors, lambda k: grading.variable(k).parity)


def winding(mono: Monomial) -> int:
    return sum(mono)


def monomial_degree(mono: Monomial, grading: Grading) -> int:
    return sum(grading.variable(k).grading for k in mono)


def monomial_parity(mono: Monomial, grading: Grading) -> int:
    return sum(grading.variable(k).parity for k in mono) % 2


class _ZeroPolynomial:
    def __repr__(self):
        return "zero polynomial"


ZERO_POLYNOMIAL = _ZeroPolynomial()


@dataclass(frozen=True)
class Inhomogeneous:
    """Degree report for a polynomial mixing several degrees."""

    degrees: tuple  # ((degree, number of terms), ...) sorted by degree


class Polynomial:
    """Finite sum of canonical monomials with exact rational coefficients.

    Instances are treated as immutable; arithmetic returns new objects.
    """

    __slots__ = ("_terms", "grading")

    def __init__(self, terms: Mapping[Monomial, object] | None = None, grading: Grading = None,
                 *, _trusted: bool = False):
        if grading is None:
            raise TypeError("a grading (orbit model) is required")
        self.grading = grading
        if _trusted:
            self._terms = dict(terms or {})
            return
        acc: dict[Monomial, Fraction] = {}
        for factors, coeff in (terms or {}).items():
            mono, sign = normalize(factors, grading)
            if sign == 0:
                continue
            acc[mono] = acc.get(mono, Fraction(0)) + sign * Fraction(coeff)
        self._terms = {m: c for m, c in acc.items() if c != 0}

    @classmethod
    def constant(cls, value, grading: Grading) -> "Polynomial":
        return cls({(): value}, grading)

    @classmethod
    def var(cls, k: int, grading: Grading) -> "Polynomial":
        return cls({(k,): 1}, grading)

    @classmethod
    def zero(cls, grading: Grading) -> "Polynomial":
        return cls({}, grading, _trusted=True)

    @property
    def terms(self) -> dict[Monomial, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[Monomial, Fraction]]:
        return iter(self._terms.items())

    def monomials(self) -> list[Monomial]:
        return sorted(self._terms, key=lambda m: (len(m), m))

    def coefficient(self, mono) -> Fraction:
        return self._terms.get(tuple(mono), Fraction(0))

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self._terms == other._terms
        if other == 0:
            return not self._terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def _check(self, other: "Polynomial"):
        if self.grading != other.grading:
            raise ValueError("polynomials over different orbit models")

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            return self + Polynomial.constant(other, self.grading)
        self._check(other)
        acc = dict(self._terms)
        for m, c in other._terms.items():
            s = acc.get(m, 0) + c
            if s:
                acc[m] = s
            else:
                acc.pop(m, None)
        return Polynomial(acc, self.grading, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial({m: -c for m, c in self._terms.items()}, self.grading, _trusted=True)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Polynomial":
        c = Fraction(c)
        if c == 0:
            return Polynomial.zero(self.grading)
        return Polynomial({m: c * v for m, v in self._terms.items()}, self.grading, _trusted=True)

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            return mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def parity(self) -> int | None:
        """Common parity of all terms, or None if mixed (zero counts as even)."""
        ps = {monomial_parity(m, self.grading) for m in self._terms}
        if not ps:
            return 0
        return ps.pop() if len(ps) == 1 else None

    def homogeneous_parts(self) -> dict[int, "Polynomial"]:
        parts: dict[int, dict] = {}
        for m, c in self._terms.items():
            parts.setdefault(monomial_parity(m, self.grading), {})[m] = c
        return {p: Polynomial(t, self.grading, _trusted=True) for p, t in parts.items()}

    def __repr__(self):
        if not self._terms:
            return "0"
        return " + ".join(f"{c}*{_mono_str(m)}" for m, c in
                          ((m, self._terms[m]) for m in self.monomials()))


def _mono_str(mono: Monomial) -> str:
    if not mono:
        return "1"
    return "*".join(f"q[{k}]" for k in mono)


def mul(f: Polynomial, g: Polynomial) -> Polynomial:
    f._check(g)
    par = lambda k: f.grading.variable(k).parity  # noqa: E731
    acc: dict[Monomial, Fraction] = {}
    for a, ca in f._terms.items():
        for b, cb in g._terms.items():
            mono, sign = koszul_sort(a + b, par)
            if sign:
                acc[mono] = acc.get(mono, 0) + sign * ca * cb
    return Polynomial({m: c for m, c in acc.items() if c}, f.grading, _trusted=True)


def _partial_term(mono: Monomial, k: int, side: str, parity) -> tuple[Monomial, int] | None:
    """Derivative of one monomial; returns (monomial, integer factor) or None."""
    count = mono.count(k)
    if count == 0:
        return None
    pos = mono.index(k)
    rest = mono[:pos] + mono[pos + 1:]
    if not parity(k):
        return rest, count
    if side == "left":
        passed = mono[:pos]
    elif side == "right":
        passed = mono[pos + 1:]
    else:
        raise ValueError(f"side must be 'left' or 'right', not {side!r}")
    odd = sum(parity(x) for x in passed)
    return rest, -1 if odd % 2 else 1


def partial(f: Polynomial, k: int, side: str = "left") -> Polynomial:
    """Graded derivative of ``f`` with respect to variable ``k``.

    The left derivative brings the variable to the front before deleting it,
    the right derivative brings it to the back.  For even variables both are
    the ordinary partial derivative.
    """
    _parity(f.grading, k)
    par = lambda x: f.grading.variable(x).parity  # noqa: E731
    acc: dict[Monomial, Fraction] = {}
    for mono, c in f._terms.items():
        res = _partial_term(mono, k, side, par)
        if res is None:
            continue
        rest, factor = res
        acc[rest] = acc.get(rest, 0) + factor * c
    return Polynomial({m: c for m, c in acc.items() if c}, f.grading, _trusted=True)


def degree(f: Polynomial):
    """Common degree of all terms.

    Returns an ``int``, ``ZERO_POLYNOMIAL`` for the zero polynomial, or an
    :class:`Inhomogeneous` report listing how many terms sit in each degree.
    """
    if not f:
        return ZERO_POLYNOMIAL
    counts = Counter(monomial_degree(m, f.grading) for m in f._terms)
    if len(counts) == 1:
        return next(iter(counts))
    return Inhomogeneous(tuple(sorted(counts.items())))


def variables(f: Polynomial) -> set[int]:
    return {k for m in f._terms for k in m}
