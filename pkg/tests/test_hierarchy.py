from fractions import Fraction
from itertools import product

import pytest

from reeb_hierarchy.algebra import Polynomial, monomial_degree
from reeb_hierarchy.hierarchy import (FilteredSeries, HierarchySpec, KdVSeries, SearchBoundError,
                                      filtered, kdv, kdv_coefficient, sign_search, t_degree,
                                      target_degree, verify_commute, zero_form_hierarchy)
from reeb_hierarchy.orbits import CIRCLE, OrbitModel
from reeb_hierarchy.poisson import ExplicitSeries, bracket


def kdv_oracle(j, cutoff):
    """Sum over ordered index vectors divided by (j+2)!."""
    import math
    idx = [k for k in range(-cutoff, cutoff + 1) if k]
    acc = {}
    for vec in product(idx, repeat=j + 2):
        if sum(vec) == 0:
            key = tuple(sorted(vec))
            acc[key] = acc.get(key, 0) + Fraction(1, math.factorial(j + 2))
    return Polynomial(acc, CIRCLE)


@pytest.mark.parametrize("j,cutoff", [(0, 3), (1, 3), (2, 2), (3, 2)])
def test_kdv_matches_ordered_sum(j, cutoff):
    assert kdv(j, cutoff) == kdv_oracle(j, cutoff)


def test_kdv_small_cases():
    assert kdv(0, 2).terms == {(-2, 2): 1, (-1, 1): 1}
    assert kdv(1, 2).terms == {(-2, 1, 1): Fraction(1, 2), (-1, -1, 2): Fraction(1, 2)}
    assert kdv_coefficient((-1, -1, 1, 1), 2) == Fraction(1, 4)
    assert kdv_coefficient((-1, 1), 1) == 0


def test_truncated_kdv_commutes_on_small_targets():
    f, g = kdv(1, 8), kdv(2, 8)
    full = bracket(f, g)
    assert all(max(map(abs, m)) > 2 for m in full.terms)


def test_verify_kdv_and_parallel_agree():
    r1 = verify_commute(KdVSeries(1), KdVSeries(3), CIRCLE, 4)
    r2 = verify_commute(KdVSeries(1), KdVSeries(3), CIRCLE, 4, jobs=2)
    assert r1.passed and r1.to_json() == r2.to_json()


def test_verify_detects_noncommuting_pair():
    f = ExplicitSeries(Polynomial({(-2, 1, 1): 1}, CIRCLE))
    report = verify_commute(f, KdVSeries(1), CIRCLE, 3)
    assert not report.passed
    assert report.to_json()["residuals"]


def test_hyperbolic_hierarchy_vanishes():
    for c in (1, 2, 3):
        model = OrbitModel.hyperbolic(2, c)
        for j in range(1, 5):
            assert filtered(model, j, 6) == 0
        h0 = filtered(model, 0, 6)
        assert set(h0.terms) == {(-n, n) for n in range(1, 7) if not model.is_bad(n)}


def test_filter_modes_and_degrees():
    model = OrbitModel.elliptic(3, Fraction(1, 3))
    for j in range(3):
        g = filtered(model, j, 4)
        assert all(monomial_degree(m, model) == target_degree(model, j) for m in g.terms)
        none = filtered(model, j, 4, "none")
        assert all(none.coefficient(m) == c for m, c in g.items())
        top = filtered(model, j, 4, "max")
        if top:
            degs = {monomial_degree(m, model) for m in top.terms}
            assert len(degs) == 1
    assert filtered(model, 1, 4, theta_degree=0) == 0
    with pytest.raises(ValueError):
        filtered(model, 1, 4, "bogus")


def test_bad_orbits_absent():
    model = OrbitModel.hyperbolic(2, 1)
    for j in range(4):
        for mode in ("target", "none", "max"):
            g = filtered(model, j, 6, mode)
            assert all(k % 2 for m in g.terms for k in m)


def test_filtered_series_matches_polynomial():
    model = OrbitModel.table(2, [1, 3, 5, 7, 9, 11])
    series = FilteredSeries(model, 1)
    poly = filtered(model, 1, 4)
    assert all(series.coefficient(m) == c for m, c in poly.items())


def test_spec_and_t_degree():
    spec = HierarchySpec(OrbitModel.hyperbolic(2, 1), 2, 5)
    assert spec.degree == 2 * (2 + 2 - 3)
    assert spec.t_degree == t_degree(2) == -3
    assert spec.generate() == 0
    with pytest.raises(ValueError):
        HierarchySpec(CIRCLE, 1, 0)
    assert zero_form_hierarchy(3).coefficient((-1, 1)) == 0


def test_sign_search_on_circle_keeps_trivial_signs():
    found = sign_search(CIRCLE, 0, 1, 2, bound=1)
    assert {-1: 1, 1: 1} in found
    with pytest.raises(SearchBoundError):
        sign_search(CIRCLE, 0, 1, 3, bound=3, max_assignments=16)
