"""Branched covers of the cylinder counted by permutation factorizations.

A degree-``d`` cover of the cylinder branched over one interior point is
encoded by permutations ``(s_plus, tau, s_minus)`` of ``{0..d-1}`` with
``s_plus * tau * s_minus = id``.  The cycle types of ``s_plus`` and
``s_minus`` are the multiplicities of the orbits at the two ends, that of
``tau`` is the ramification profile over the special point.  Counts are
weighted by ``1/d!``.

Branching Hamiltonians for the circle multiply one connected genus-0
component per part ``mu_i``; each component has a marked point that is a
ramification point of order ``mu_i - 1``, i.e. one marked cycle of ``tau``.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import permutations

from .algebra import Polynomial, mul
from .orbits import CIRCLE

DEFAULT_MAX_DEGREE = 7


class BoundExceeded(ValueError):
    pass


class GenusError(ValueError):
    pass


def as_partition(parts) -> tuple:
    if isinstance(parts, str):
        parts = [int(x) for x in parts.replace(" ", "").split(",") if x]
    parts = tuple(sorted((int(p) for p in parts), reverse=True))
    if any(p < 1 for p in parts):
        raise ValueError(f"partition parts must be positive: {parts}")
    return parts


@dataclass(frozen=True)
class BranchingProfile:
    mu: tuple

    def __post_init__(self):
        object.__setattr__(self, "mu", as_partition(self.mu))
        if not self.mu:
            raise ValueError("a branching profile needs at least one part")

    @property
    def length(self) -> int:
        return len(self.mu)

    @property
    def size(self) -> int:
        return sum(self.mu)

    def __str__(self):
        return ",".join(map(str, self.mu))


@dataclass(frozen=True)
class FactorizationSpec:
    d: int
    lam_plus: tuple
    lam_minus: tuple
    nu: tuple
    connected: bool = True

    def __post_init__(self):
        for name in ("lam_plus", "lam_minus", "nu"):
            object.__setattr__(self, name, as_partition(getattr(self, name)))
            if sum(getattr(self, name)) != self.d:
                raise ValueError(f"{name}={getattr(self, name)} is not a partition of {self.d}")


# ------------------------------------------------------------ permutations


def cycle_type(perm) -> tuple:
    seen = [False] * len(perm)
    lengths = []
    for i in range(len(perm)):
        if not seen[i]:
            n = 0
            j = i
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                n += 1
            lengths.append(n)
    return tuple(sorted(lengths, reverse=True))


def compose(a, b) -> tuple:
    """``(a * b)(i) = a[b[i]]``."""
    return tuple(a[i] for i in b)


def inverse(a) -> tuple:
    out = [0] * len(a)
    for i, x in enumerate(a):
        out[x] = i
    return tuple(out)


def representative(partition) -> tuple:
    perm = []
    start = 0
    for length in partition:
        perm.extend(range(start + 1, start + length))
        perm.append(start)
        start += length
    return tuple(perm)


def class_size(partition) -> int:
    d = sum(partition)
    z = 1
    for part, mult in Counter(partition).items():
        z *= part ** mult * math.factorial(mult)
    return math.factorial(d) // z


def permutations_of_type(partition):
    """Each permutation of cycle type ``partition`` exactly once.

    The cycle through the smallest unused point is built first, with every
    distinct remaining length tried in turn.
    """
    d = sum(partition)
    yield from _build(tuple(sorted(partition)), [None] * d, frozenset(range(d)))


def _build(lengths, perm, free):
    if not free:
        yield tuple(perm)
        return
    first = min(free)
    rest = free - {first}
    for length in sorted(set(lengths)):
        i = lengths.index(length)
        remaining = lengths[:i] + lengths[i + 1:]
        for tail in permutations(sorted(rest), length - 1):
            cycle = (first,) + tail
            for a, b in zip(cycle, cycle[1:] + cycle[:1]):
                perm[a] = b
            yield from _build(remaining, perm, rest.difference(tail))


def is_transitive(gens, d: int) -> bool:
    parent = list(range(d))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in gens:
        for i, x in enumerate(g):
            ra, rb = find(i), find(x)
            if ra != rb:
                parent[ra] = rb
    root = find(0)
    return all(find(i) == root for i in range(d))


# ------------------------------------------------------------ counting


def _tuples(d, a, b, c, connected) -> int:
    """Number of ``(x, y, z)`` of types ``(a, b, c)`` with ``x y z = id``.

    The relation is invariant under cyclic rotation and conjugation, so one
    factor is fixed to a class representative and the smallest remaining
    class is enumerated.
    """
    if d == 0:
        return 1
    rots = [(a, b, c), (b, c, a), (c, a, b)]
    # fix the largest class, iterate the smaller of the other two
    a, b, c = max(rots, key=lambda t: class_size(t[0]))
    x = representative(a)
    hits = 0
    if class_size(b) <= class_size(c):
        for y in permutations_of_type(b):
            xy = compose(x, y)
            if cycle_type(xy) == c and (not connected or is_transitive((x, y), d)):
                hits += 1
    else:
        # x y z = id  <=>  y = x^-1 z^-1
        xinv = inverse(x)
        for z in permutations_of_type(c):
            y = compose(xinv, inverse(z))
            if cycle_type(y) == b and (not connected or is_transitive((x, z), d)):
                hits += 1
    return class_size(a) * hits


def count(spec: FactorizationSpec, max_degree: int | None = DEFAULT_MAX_DEGREE) -> Fraction:
    """``(1/d!) * #{(s+, tau, s-)}`` with the given cycle types.

    >>> count(FactorizationSpec(2, (2,), (1, 1), (2,)))
    Fraction(1, 2)
    """
    if max_degree is not None and spec.d > max_degree:
        raise BoundExceeded(f"degree {spec.d} exceeds enumeration bound {max_degree}")
    return _count(spec.d, spec.lam_plus, spec.nu, spec.lam_minus, spec.connected)


@lru_cache(maxsize=None)
def _count(d, lam_plus, nu, lam_minus, connected) -> Fraction:
    return Fraction(_tuples(d, lam_plus, nu, lam_minus, connected), math.factorial(d))


def euler_characteristic(spec: FactorizationSpec) -> int:
    return len(spec.lam_plus) + len(spec.lam_minus) + len(spec.nu) - spec.d


def genus(spec: FactorizationSpec) -> int:
    """Riemann-Hurwitz genus of a connected cover: ``2 - 2g = chi``."""
    chi = euler_characteristic(spec)
    if chi % 2 or chi > 2:
        raise GenusError(f"Euler characteristic {chi} does not give a genus")
    return (2 - chi) // 2


def _sub_partitions(parts: tuple):
    counts = sorted(Counter(parts).items(), reverse=True)

    def rec(i):
        if i == len(counts):
            yield ()
            return
        p, m = counts[i]
        for take in range(m + 1):
            for rest in rec(i + 1):
                yield (p,) * take + rest
    for sub in rec(0):
        yield sub


def _remove(parts, sub):
    c = Counter(parts)
    c.subtract(sub)
    return as_partition(list(c.elements()))


def assemble_disconnected(spec: FactorizationSpec) -> Fraction:
    """Disconnected count rebuilt from connected counts (exponential formula).

    Labeled recursion on the block containing sheet 0: its size ``b`` and
    the parts of each profile it carries.
    """
    return Fraction(_assembled_tuples(spec.d, spec.lam_plus, spec.nu, spec.lam_minus),
                    math.factorial(spec.d))


@lru_cache(maxsize=None)
def _assembled_tuples(d, lp, nu, lm) -> int:
    if d == 0:
        return 1
    total = 0
    for sp in _sub_partitions(lp):
        b = sum(sp)
        if b == 0:
            continue
        for sn in _sub_partitions(nu):
            if sum(sn) != b:
                continue
            for sm in _sub_partitions(lm):
                if sum(sm) != b:
                    continue
                conn = _tuples(b, sp, sn, sm, True)
                if not conn:
                    continue
                rest = _assembled_tuples(d - b, _remove(lp, sp), _remove(nu, sn), _remove(lm, sm))
                total += math.comb(d - 1, b - 1) * conn * rest
    return total


def partitions(n: int, max_part: int | None = None, max_length: int | None = None):
    """Partitions of ``n`` (nonincreasing tuples) with optional bounds."""
    max_part = n if max_part is None else min(max_part, n)
    if n == 0:
        yield ()
        return
    if max_length == 0:
        return
    for first in range(max_part, 0, -1):
        for rest in partitions(n - first, first, None if max_length is None else max_length - 1):
            yield (first,) + rest


# ------------------------------------------------------------ Hamiltonians


@lru_cache(maxsize=None)
def _component_counts(mu_i: int, d: int, lam_plus: tuple, cutoff: int) -> tuple:
    """Connected genus-0 counts ``{lam_minus: count}`` for fixed ``lam_plus``."""
    nu = as_partition((mu_i,) + (1,) * (d - mu_i))
    want = mu_i + 1 - len(lam_plus)
    out = {}
    for lm in partitions(d, cutoff, want):
        if len(lm) != want:
            continue
        c = _count(d, lam_plus, nu, lm, True)
        if c:
            out[lm] = c
    return tuple(sorted(out.items()))


def component_polynomial(mu_i: int, cutoff: int) -> Polynomial:
    """Connected genus-0 covers with one marked ramification point of order ``mu_i - 1``."""
    if mu_i < 1:
        raise ValueError("branching parts must be positive")
    ends = mu_i + 1
    terms = {}
    for d in range(mu_i, cutoff * (ends // 2) + 1):
        nu = as_partition((mu_i,) + (1,) * (d - mu_i))
        # choices of the marked cycle of tau
        marks = Counter(nu)[mu_i]
        for lp in partitions(d, cutoff, ends - 1):
            for lm, c in _component_counts(mu_i, d, lp, cutoff):
                mono = tuple(sorted([-x for x in lp] + list(lm)))
                terms[mono] = terms.get(mono, 0) + marks * c
    return Polynomial({m: c for m, c in terms.items() if c}, CIRCLE, _trusted=True)


@dataclass
class BranchingNormalization:
    """Per-profile rational factors applied to ``h_mu`` (default 1)."""

    factors: dict = field(default_factory=dict)

    def factor(self, mu: tuple) -> Fraction:
        return Fraction(self.factors.get(as_partition(mu), 1))


DEFAULT_NORMALIZATION = BranchingNormalization()


def branching_hamiltonian(mu, cutoff: int,
                          normalization: BranchingNormalization = DEFAULT_NORMALIZATION) -> Polynomial:
    """``h_mu`` for the circle, truncated to indices ``|n| <= cutoff``.

    Product over the parts of ``mu`` of the component polynomials; the
    components are distinguished by their marked points, so no symmetry
    factor is divided out.
    """
    profile = mu if isinstance(mu, BranchingProfile) else BranchingProfile(mu)
    out = Polynomial.constant(1, CIRCLE)
    for part in profile.mu:
        out = mul(out, component_polynomial(part, cutoff))
    return out.scale(normalization.factor(profile.mu))


def genus_zero_profiles(j: int, strict: bool = False) -> list[tuple]:
    """Correction profiles of genus 0: ``|mu| + l(mu) = j + 2`` and ``|mu| <= j``.

    ``strict=True`` only admits ``|mu| < j``.  That set cannot match the KdV
    integrals from ``j = 2`` on: ``p_1^2 q_1^2`` occurs in ``h_2`` but needs a
    degree-2 cover, which only ``mu = (1, 1)`` (size 2) provides.
    """
    out = []
    for size in range(1, j if strict else j + 1):
        for mu in partitions(size):
            if size + len(mu) == j + 2:
                out.append(mu)
    return out


def branching_genus(j: int, mu) -> Fraction:
    """Genus from ``j + 1 = 2g - 1 + |mu| + l(mu)``."""
    mu = as_partition(mu)
    return Fraction(j + 2 - sum(mu) - len(mu), 2)


@dataclass
class RhoSolution:
    j: int
    cutoff: int
    profiles: list
    status: str  # "ok" | "inconsistent" | "underdetermined"
    values: dict = field(default_factory=dict)
    nullity: int = 0
    equations: int = 0

    @property
    def leading(self):
        return self.values.get((self.j + 1,))

    @property
    def corrections(self) -> dict:
        return {mu: v for mu, v in self.values.items() if mu != (self.j + 1,)}

    def to_json(self):
        return {
            "j": self.j, "cutoff": self.cutoff, "status": self.status,
            "equations": self.equations, "nullity": self.nullity,
            "profiles": [list(mu) for mu in self.profiles],
            "values": [{"mu": list(mu), "num": str(v.numerator), "den": str(v.denominator)}
                       for mu, v in self.values.items()],
        }


def solve_rho(j: int, cutoff: int, profiles=None, strict: bool = False) -> RhoSolution:
    """Exact coefficients expressing the KdV integral ``h_j`` through ``h_mu``.

    Solves ``h_j = sum_mu rho_mu h_mu`` coefficientwise on all monomials with
    indices in ``[-cutoff, cutoff]``.  The leading profile ``(j+1,)`` is an
    unknown like the others, so its expected value ``1/j!`` is checked rather
    than imposed.
    """
    import sympy

    from .hierarchy import kdv

    if profiles is None:
        profiles = [(j + 1,)] + genus_zero_profiles(j, strict)
    profiles = [as_partition(mu) for mu in profiles]
    target = kdv(j, cutoff)
    columns = [branching_hamiltonian(mu, cutoff) for mu in profiles]
    rows = sorted({m for m, _ in target.items()} | {m for col in columns for m, _ in col.items()},
                  key=lambda m: (len(m), m))
    A = sympy.Matrix([[sympy.Rational(c.coefficient(m).numerator, c.coefficient(m).denominator)
                       for c in columns] for m in rows])
    b = sympy.Matrix([sympy.Rational(target.coefficient(m).numerator,
                                     target.coefficient(m).denominator) for m in rows])
    sol = RhoSolution(j, cutoff, profiles, "ok", equations=len(rows))
    if not rows:
        sol.status = "underdetermined"
        sol.nullity = len(profiles)
        return sol
    try:
        x, params = A.gauss_jordan_solve(b)
    except ValueError:
        sol.status = "inconsistent"
        return sol
    if params.shape[0]:
        sol.status = "underdetermined"
        sol.nullity = params.shape[0]
        return sol
    for mu, v in zip(profiles, x):
        v = sympy.Rational(v)
        sol.values[mu] = Fraction(int(v.p), int(v.q))
    return sol
