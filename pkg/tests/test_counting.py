import random
from fractions import Fraction

import pytest

from jetlog.counting import (
    CountQuery, bundle_ratio_check, count_points, count_stratum, count_system, estimate_dimension,
    fit_count_polynomial, interpolate, jet_dimension_table, linear_bound_check, scheme_points,
)
from jetlog.errors import BudgetExceeded
from jetlog.fixture import load_fixture
from jetlog.grothendieck import NEG_INFINITY
from jetlog.jets import AffineScheme, ContactCondition, PairSpec, jet_equations, stratum_conditions
from jetlog.symbolic import Ideal

from oracles import brute_count, image_count, naive_interpolate

V = ("x", "y")


def test_count_examples():
    line = AffineScheme.parse(["x"], 1)
    assert count_points(CountQuery(jet_equations(line, 2), (), 3)) == 1
    assert scheme_points(AffineScheme.parse(["x*y"], 2), 1, 2) == 8
    a2 = AffineScheme.affine_space(2)
    cond = ContactCondition(Ideal.parse(["x", "y"], V), 1)
    assert count_points(CountQuery(jet_equations(a2, 1), (cond,), 3)) == 8


SCHEMES = [
    (["x*y"], 2), (["x^2 + y^3"], 2), (["x^2 - y^2"], 2), (["x", "y"], 2), (["y - x^2"], 2),
    (["x^2*y"], 2), (["x*y", "x^2"], 2),
]


@pytest.mark.parametrize("gens,N", SCHEMES)
@pytest.mark.parametrize("n", [0, 1, 2])
@pytest.mark.parametrize("q", [2, 3])
def test_scheme_counts_match_brute_force(gens, N, n, q):
    s = AffineScheme.parse(gens, N)
    assert scheme_points(s, n, q) == brute_count(q, s.variables, n, [(gens, ">=", n + 1)])


@pytest.mark.parametrize("q", [2, 3, 4])
def test_exact_orders_match_brute_force(q):
    a2 = AffineScheme.affine_space(2)
    for k in range(3):
        for gens in (["x", "y"], ["x*y"], ["x^2 + y^3"]):
            cond = ContactCondition(Ideal.parse(gens, V), k)
            got = count_points(CountQuery(jet_equations(a2, 2), (cond,), q))
            if q in (2, 3):
                assert got == brute_count(q, V, 2, [(gens, "==", k)])
            assert got >= 0


def test_prime_power_field():
    # L_1(A^2) has q^4 points over any field, F_4 included
    assert scheme_points(AffineScheme.affine_space(2), 1, 4) == 4 ** 4
    line = AffineScheme.parse(["x^2 + x*y + y^2"], 2)
    assert scheme_points(line, 0, 4) == 7  # splits over F_4: two lines meeting at the origin


def test_lifted_stratum_is_the_image():
    pair = load_fixture("cone").pair
    f = "x^2 + y^2 + z^2"
    J = ["2*x", "2*y", "2*z", f]
    for n, e in [(1, 1), (2, 1)]:
        expected = image_count(3, ("x", "y", "z"), n, e, [([f], ">=", n + e + 1), (J, "==", e)])
        st = stratum_conditions(pair, n, e, y_order=None, force=True)
        assert count_stratum(st, 3) == expected


def test_budget_and_determinism():
    s = AffineScheme.parse(["x^2 + y^3"], 2)
    sys2 = jet_equations(s, 3)
    with pytest.raises(BudgetExceeded) as info:
        count_system(sys2.equations, sys2.variables, 5, budget=3)
    assert info.value.required == 5 ** 8
    a = count_system(sys2.equations, sys2.variables, 5, workers=1)
    b = count_system(sys2.equations, sys2.variables, 5, workers=2)
    assert a == b == count_system(sys2.equations, sys2.variables, 5)


def test_interpolation_matches_lagrange():
    rng = random.Random(3)
    for _ in range(30):
        k = rng.randint(1, 6)
        xs = rng.sample(range(-20, 20), k)
        ys = [rng.randint(-50, 50) for _ in xs]
        assert interpolate(xs, ys) == naive_interpolate(xs, ys)


def test_estimate_dimension_examples():
    primes = [2, 3, 5, 7, 11]
    est = estimate_dimension(jet_equations(AffineScheme.affine_space(2), 1), (), primes)
    assert est.dim == 4 and est.count_polynomial == (0, 0, 0, 0, 1) and est.consistent
    # 3q^2 - 2q: both the origin fibre and the two punctured branches have dimension 2
    est = estimate_dimension(jet_equations(AffineScheme.parse(["x*y"], 2), 1), (), primes)
    assert est.count_polynomial == (0, -2, 3) and est.consistent
    # the oracle's own counts confirm the polynomial at a prime outside the fit
    p = 13
    value = sum(c * p ** k for k, c in enumerate(est.count_polynomial))
    assert value == brute_count(p, V, 1, [(["x*y"], ">=", 2)])
    empty = AffineScheme.parse(["1"], 2)
    est = estimate_dimension(jet_equations(empty, 1), (), primes)
    assert est.dim == NEG_INFINITY and est.count_polynomial == (0,)


def test_fit_extends_past_low_degree_fit():
    est = fit_count_polynomial(lambda p: p ** 5 + 1, [2, 3, 5])
    assert est.consistent and est.count_polynomial == (1, 0, 0, 0, 0, 1)


def test_fit_reports_non_polynomial_counts():
    with pytest.warns(UserWarning):
        est = fit_count_polynomial(lambda p: p % 4, [3, 5, 7], max_primes=5)
    assert not est.consistent


def test_bundle_smooth_and_cone():
    a2 = PairSpec.smooth(AffineScheme.parse(["x"], 2))
    rep = bundle_ratio_check(a2, 0, range(0, 4), 3)
    assert rep.holds and all(r.ratio == 9 for r in rep.rows)
    cone = load_fixture("cone").pair
    rep = bundle_ratio_check(cone, 1, range(0, 5), 3)
    assert rep.holds
    assert [r.ratio for r in rep.rows if r.in_regime] == [9, 9, 9]
    assert not rep.rows[1].in_regime and rep.rows[1].ok is None


def test_literal_conjunction_breaks_below_lift_range():
    cone = load_fixture("cone").pair
    rep = bundle_ratio_check(cone, 1, range(1, 4), 3, lift=False)
    assert rep.rows[0].ratio == Fraction(108, 13)
    assert rep.rows[1].ratio == 9


def test_linear_bound_examples():
    cusp = AffineScheme.parse(["x^2 + y^3"], 2, expected_dim=1)
    rep = linear_bound_check(cusp, 0, 4, [5, 7, 11, 13])
    assert rep.holds and [rep.dims[n].dim for n in range(5)] == [1, 2, 3, 4, 5]
    line = AffineScheme.parse(["x"], 2, expected_dim=1)
    rep = linear_bound_check(line, 0, 3, [3, 5, 7])
    assert [rep.dims[n].dim for n in range(4)] == [1, 2, 3, 4]
    pt = AffineScheme.parse(["x", "y"], 2, expected_dim=0)
    rep = linear_bound_check(pt, 0, 3, [3, 5, 7])
    assert rep.slope == 0 and rep.holds


def test_cusp_bound_fails_beyond_level_four():
    cusp = AffineScheme.parse(["x^2 + y^3"], 2, expected_dim=1)
    rep = linear_bound_check(cusp, 0, 5, [5, 7, 11, 13])
    assert rep.dims[5].dim == 7 and not rep.bound_ok(5)
    assert rep.slope < 2


def test_dimension_table_smooth_pair():
    pair = PairSpec.smooth(AffineScheme.parse(["x*y"], 2))
    tab = jet_dimension_table(pair, 3, 1, [3, 5, 7])
    assert tab[(1, 2)].dim == NEG_INFINITY and tab[(0, 1)].dim == 2
