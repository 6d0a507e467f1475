from fractions import Fraction
from itertools import permutations
from math import factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reeb_hierarchy.hierarchy import kdv
from reeb_hierarchy.hurwitz import (BoundExceeded, FactorizationSpec, assemble_disconnected,
                                    branching_genus, branching_hamiltonian, class_size,
                                    component_polynomial, count, cycle_type, genus,
                                    genus_zero_profiles, partitions, permutations_of_type,
                                    solve_rho)


def brute_count(d, lp, lm, nu, connected):
    """Scan all of S_d x S_d; sigma^- is forced by the product relation."""
    def ctype(p):
        seen, out = set(), []
        for i in range(d):
            if i not in seen:
                n, j = 0, i
                while j not in seen:
                    seen.add(j)
                    j = p[j]
                    n += 1
                out.append(n)
        return tuple(sorted(out, reverse=True))

    def comp(a, b):
        return tuple(a[b[i]] for i in range(d))

    def inv(a):
        out = [0] * d
        for i, x in enumerate(a):
            out[x] = i
        return tuple(out)

    def transitive(gens):
        reach, todo = {0}, [0]
        while todo:
            x = todo.pop()
            for g in gens:
                if g[x] not in reach:
                    reach.add(g[x])
                    todo.append(g[x])
        return len(reach) == d

    perms = list(permutations(range(d)))
    n = 0
    for sp in perms:
        if ctype(sp) != lp:
            continue
        for tau in perms:
            if ctype(tau) != nu:
                continue
            sm = inv(comp(sp, tau))
            if ctype(sm) == lm and (not connected or transitive([sp, tau])):
                n += 1
    return Fraction(n, factorial(d))


def all_specs(max_d):
    for d in range(1, max_d + 1):
        parts = list(partitions(d))
        for lp in parts:
            for lm in parts:
                for nu in parts:
                    yield d, lp, lm, nu


def test_documented_counts():
    assert count(FactorizationSpec(2, (2,), (1, 1), (2,))) == Fraction(1, 2)
    assert count(FactorizationSpec(3, (3,), (3,), (1, 1, 1))) == Fraction(1, 3)


@pytest.mark.parametrize("d,lp,lm,nu", [s for s in all_specs(4)])
def test_counts_match_brute_force(d, lp, lm, nu):
    for connected in (True, False):
        assert count(FactorizationSpec(d, lp, lm, nu, connected)) == \
            brute_count(d, lp, lm, nu, connected)


@pytest.mark.parametrize("d", [1, 2, 3, 4, 5])
def test_exponential_formula(d):
    for _, lp, lm, nu in all_specs(d):
        if sum(lp) != d:
            continue
        spec = FactorizationSpec(d, lp, lm, nu, connected=False)
        assert assemble_disconnected(spec) == count(spec)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_class_algebra_identity(d):
    # summing over all sigma^- types counts every pair (sigma^+, tau)
    for lp in partitions(d):
        for nu in partitions(d):
            total = sum(count(FactorizationSpec(d, lp, lm, nu, connected=False))
                        for lm in partitions(d))
            assert total == Fraction(class_size(lp) * class_size(nu), factorial(d))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5), st.data())
def test_plus_minus_symmetry_and_genus(d, data):
    parts = list(partitions(d))
    lp, lm, nu = (data.draw(st.sampled_from(parts)) for _ in range(3))
    a = count(FactorizationSpec(d, lp, lm, nu))
    assert a == count(FactorizationSpec(d, lm, lp, nu))
    if a:
        assert genus(FactorizationSpec(d, lp, lm, nu)) >= 0


def test_permutations_of_type():
    for part in [(3, 1, 1), (2, 2, 1), (1, 1, 1, 1, 1), (5,)]:
        perms = list(permutations_of_type(part))
        assert len(perms) == len(set(perms)) == class_size(part)
        assert all(cycle_type(p) == part for p in perms)


def test_bounds():
    with pytest.raises(BoundExceeded):
        count(FactorizationSpec(8, (8,), (8,), (1,) * 8))
    with pytest.raises(ValueError):
        FactorizationSpec(3, (2,), (3,), (3,))


def test_components():
    assert component_polynomial(1, 3) == kdv(0, 3)
    assert component_polynomial(2, 2) == kdv(1, 2)
    assert branching_hamiltonian((4,), 1) == 0
    h = branching_hamiltonian((2,), 2)
    assert h.coefficient((-1, -1, 2)) == kdv(1, 2).coefficient((-1, -1, 2)) == Fraction(1, 2)
    assert branching_hamiltonian((1, 1), 2) == kdv(0, 2) * kdv(0, 2)
    with pytest.raises(ValueError):
        branching_hamiltonian((), 2)


def test_genus_rule():
    assert branching_genus(2, (3,)) == 0
    assert branching_genus(2, (1, 1)) == 0
    assert genus_zero_profiles(2) == [(1, 1)]
    assert genus_zero_profiles(2, strict=True) == []
    assert genus_zero_profiles(3) == [(2, 1)]


@pytest.mark.parametrize("j,cutoff,leading,corrections", [
    (1, 3, Fraction(1), {}),
    (2, 3, Fraction(1, 2), {(1, 1): Fraction(1, 4)}),
    (3, 3, Fraction(1, 6), {(2, 1): Fraction(1, 3)}),
    (4, 2, Fraction(1, 24), {(1, 1, 1): Fraction(1, 36), (3, 1): Fraction(1, 8),
                             (2, 2): Fraction(1, 12)}),
])
def test_solve_rho(j, cutoff, leading, corrections):
    sol = solve_rho(j, cutoff)
    assert sol.status == "ok"
    assert sol.leading == leading
    assert sol.corrections == corrections


def test_solve_rho_strict_is_inconsistent_at_j2():
    assert solve_rho(2, 4, strict=True).status == "inconsistent"
