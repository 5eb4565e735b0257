from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from confsphere.exact_poly import AmbientPoly
from confsphere.identities import (
    check_dirichlet_identity,
    check_gjms_commutator,
    check_gjms_first_order,
    check_self_adjointness,
    check_sigma2_commutator,
    check_trilinear_symmetry,
    gjms_battery,
    random_sphere_function,
    sigma2_battery,
)
from confsphere.operators import GjmsOrder, gjms_apply
from confsphere.sphere_calc import SphereFunction, reduce


def one(n):
    return SphereFunction.constant(n, 1)


def sx(n, i):
    return SphereFunction.coordinate(n, i)


def test_random_function_reproducible():
    a = random_sphere_function(6, 3, seed=11)
    b = random_sphere_function(6, 3, seed=11)
    c = random_sphere_function(6, 3, seed=12)
    assert a == b and a != c
    assert a.degree <= 3


def test_gjms_commutator_at_constant():
    r = check_gjms_commutator(one(5), GjmsOrder(5, 1))
    assert r.verdict
    assert r.lhs == one(5) * 5


def test_gjms_commutator_coordinate():
    n = 5
    r = check_gjms_commutator(sx(n, 0), GjmsOrder(n, 2))
    assert r.verdict
    assert r.rhs == sx(n, 0) * (2 * (n + 2) * Fraction(35, 4))


def test_gjms_commutator_random_seven_three():
    u = random_sphere_function(7, 3, seed=5)
    assert check_gjms_commutator(u, GjmsOrder(7, 3), seed=5, degree=3).verdict


def test_first_order_at_constant():
    n = 5
    for i in range(n + 1):
        r = check_gjms_first_order(one(n), GjmsOrder(n, 1), i)
        assert r.verdict
        assert r.lhs == sx(n, i) * n


def test_first_order_examples():
    assert check_gjms_first_order(sx(5, 1), GjmsOrder(5, 1), 0).verdict
    u = random_sphere_function(6, 2, seed=3)
    assert all(check_gjms_first_order(u, GjmsOrder(6, 2), i).verdict for i in range(7))


def test_sigma2_commutator_examples():
    r = check_sigma2_commutator(one(6))
    assert r.verdict and r.lhs == one(6) * Fraction(5, 4)
    assert check_sigma2_commutator(sx(5, 0)).verdict
    assert check_sigma2_commutator(random_sphere_function(7, 2, seed=9)).verdict
    with pytest.raises(ValueError):
        check_sigma2_commutator(one(4))


def test_self_adjointness_examples():
    o = GjmsOrder(6, 2)
    r = check_self_adjointness(sx(6, 0), one(6), o)
    assert r.verdict and r.lhs.coefficient == 0
    u, v = random_sphere_function(6, 2, 1), random_sphere_function(6, 3, 2)
    assert check_self_adjointness(u, v, o).verdict


def test_dirichlet_examples():
    r = check_dirichlet_identity(one(6))
    assert r.verdict and r.lhs.coefficient == Fraction(15, 32)
    assert check_dirichlet_identity(sx(6, 0)).verdict
    assert check_dirichlet_identity(reduce(AmbientPoly.parse(7, "1 + x0 x1"))).verdict


def test_trilinear_symmetry_spanning_inputs():
    n = 5
    basis = [one(n), sx(n, 0), reduce(AmbientPoly.parse(n, "x0 x1")), reduce(AmbientPoly.parse(n, "x1^2"))]
    assert check_trilinear_symmetry(basis).verdict


def test_failed_check_reports_difference():
    # a wrong operator must not pass: use L_2 where the identity wants L_4
    u = random_sphere_function(5, 2, seed=1)
    r = check_gjms_commutator(u, GjmsOrder(5, 2))
    bogus = type(r)(r.identity, r.n, r.lhs, gjms_apply(u, GjmsOrder(5, 1)), k=2)
    assert not bogus.verdict
    assert bogus.to_json()["verdict"] is False


def test_report_json_fields():
    r = check_gjms_first_order(sx(5, 2), GjmsOrder(5, 1), 3, seed=4, degree=1)
    data = r.to_json()
    assert data["identity"] == "gjms_first_order"
    assert (data["n"], data["k"], data["seed"], data["degree"], data["i"]) == (5, 1, 4, 1, 3)
    assert data["verdict"] is True and data["lhs_minus_rhs"] == "0"


def test_batteries_small():
    reps = gjms_battery(5, 1, degree=2, trials=2, seed=1)
    assert len(reps) == 2 * (1 + 6) and all(r.verdict for r in reps)
    assert [r.seed for r in reps[::7]] == [1, 2]
    reps = sigma2_battery(6, degree=2, trials=2, seed=1)
    assert len(reps) == 4 and all(r.verdict for r in reps)


@given(st.integers(0, 10**6), st.sampled_from([(5, 1), (5, 2), (6, 2), (7, 1)]))
def test_commutator_identity_property(seed, nk):
    n, k = nk
    u = random_sphere_function(n, 2, seed)
    assert check_gjms_commutator(u, GjmsOrder(n, k)).verdict
