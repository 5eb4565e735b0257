import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from confsphere.exact_poly import AmbientPoly
from confsphere.operators import (
    GjmsOrder,
    gjms_apply,
    gjms_apply_factored,
    gjms_descriptor,
    gjms_eigenvalue,
    gjms_energy,
    i_operator,
    polarize_cubic,
    sigma1,
    sigma2_constant,
    sigma2_descriptor,
    sigma2_diagonal,
    sigma2_dirichlet_energy,
    sigma2_energy,
    sigma2_form,
    sigma2_trilinear,
)
from confsphere.zonal import ZonalFunction, sigma2_energy_zonal
from confsphere.sphere_calc import (
    omega,
    SphereFunction,
    grad_inner,
    integrate,
    laplace_beltrami,
    multiply,
    reduce,
)


def sx(n, i):
    return SphereFunction.coordinate(n, i)


def one(n):
    return SphereFunction.constant(n, 1)


def sphere_poly(n, max_deg=2):
    key = st.tuples(*[st.integers(0, 2)] * (n + 1)).filter(lambda a: sum(a) <= max_deg)
    return st.dictionaries(key, st.integers(-3, 3), max_size=4).map(lambda d: reduce(AmbientPoly.from_terms(n, d)))


def test_order_validation():
    with pytest.raises(ValueError):
        GjmsOrder(5, 3)
    with pytest.raises(ValueError):
        GjmsOrder(5, -1)
    with pytest.raises(ValueError):
        GjmsOrder(5, 0).lower()
    assert GjmsOrder(7, 3).lower() == GjmsOrder(7, 2)


def gamma_ratio(n, k):
    # Gamma(n/2 + k) / Gamma(n/2 - k) by telescoping
    out = Fraction(1)
    for i in range(-k, k):
        out *= Fraction(n, 2) + i
    return out


@pytest.mark.parametrize("n,k", [(n, k) for n in range(3, 10) for k in range(1, (n - 1) // 2 + 1)])
def test_eigenvalue_at_zero_is_gamma_ratio(n, k):
    assert gjms_eigenvalue(0, GjmsOrder(n, k)) == gamma_ratio(n, k)


def test_eigenvalue_examples():
    assert gjms_eigenvalue(0, GjmsOrder(5, 1)) == Fraction(15, 4)
    assert gjms_eigenvalue(1, GjmsOrder(5, 1)) == Fraction(35, 4)
    assert gjms_eigenvalue(7, GjmsOrder(5, 0)) == 1


def test_gjms_apply_examples():
    o = GjmsOrder(5, 1)
    assert gjms_apply(one(5), o) == one(5) * Fraction(15, 4)
    assert gjms_apply(sx(5, 0), o) == sx(5, 0) * Fraction(35, 4)
    assert gjms_apply(one(5), GjmsOrder(5, 0)) == one(5)


def test_gjms_energy_examples():
    o = GjmsOrder(5, 1)
    assert gjms_energy(one(5), o).coefficient == Fraction(15, 4)
    assert gjms_energy(sx(5, 0), o).coefficient == Fraction(35, 4) / 6
    assert gjms_energy(sx(5, 0) + 1, o).coefficient == Fraction(15, 4) + Fraction(35, 24)


def test_sigma1_examples():
    for n in (5, 6, 7, 9):
        assert sigma1(one(n)) == one(n) * (Fraction(n, 2) * Fraction(n - 4, 4) ** 2)
    assert sigma1(one(6)) == one(6) * Fraction(3, 4)
    n = 6
    x = sx(n, 0)
    x2 = multiply(x, x)
    expected = (
        laplace_beltrami(x2) * Fraction(-(n - 4), 8)
        - (one(n) - x2)
        + x2 * (Fraction(n, 2) * Fraction(n - 4, 4) ** 2)
    )
    assert sigma1(x) == expected
    with pytest.raises(ValueError):
        sigma1(one(4))


def test_i_operator_examples():
    for w in (Fraction(1), Fraction(-1, 3), Fraction(5, 2)):
        assert i_operator(one(6), w) == one(6) * (w * w * 3)
    n = 5
    x = sx(n, 0)
    expected = (one(n) - multiply(x, x)) * Fraction(-n, 2) + multiply(x, x * (-n) + x * Fraction(n, 2))
    assert i_operator(x, 1) == expected
    with pytest.raises(ValueError):
        i_operator(x, Fraction(-(n - 2), 2))


def test_sigma2_constants():
    assert sigma2_constant(6) == Fraction(15, 32)
    assert sigma2_constant(8) == 7
    assert sigma2_diagonal(one(6)) == one(6) * Fraction(15, 32)
    assert sigma2_trilinear(one(7), one(7), one(7)) == one(7) * sigma2_constant(7)
    assert sigma2_energy(one(6)).coefficient == Fraction(15, 32)


def test_sigma2_energy_of_coordinate_matches_zonal_path():
    # x0 changes sign and sigma_1(x0) < 0 on the equator, so the energy is negative
    for n in (5, 6, 7):
        x = sx(n, 0)
        exact = integrate(multiply(x, sigma2_diagonal(x)))
        assert exact == sigma2_dirichlet_energy(x)
        zonal = sigma2_energy_zonal(ZonalFunction.t_power(n, 1)) / omega(n)
        assert float(exact.coefficient) == pytest.approx(zonal, rel=1e-11)
    assert sigma2_energy(sx(5, 0)).coefficient == Fraction(-795, 2048)


def test_polarization_agrees_with_cyclic_average():
    n = 5
    a = reduce(AmbientPoly.parse(n, "x0 x1 + 1"))
    b = reduce(AmbientPoly.parse(n, "x2 - 2 x0^2"))
    c = reduce(AmbientPoly.parse(n, "3 + x3"))
    assert polarize_cubic(sigma2_diagonal, a, b) == sigma2_trilinear(a, b, b)
    assert polarize_cubic(sigma2_diagonal, a, b, c) == sigma2_trilinear(a, b, c)


def test_slot_form_symmetric_in_first_two():
    n = 6
    a = reduce(AmbientPoly.parse(n, "x0 x1 + x2"))
    b = reduce(AmbientPoly.parse(n, "x3^2 - 1"))
    c = reduce(AmbientPoly.parse(n, "x0 + 2"))
    assert sigma2_form(a, b, c) == sigma2_form(b, a, c)


def test_trilinear_permutations_degree_two():
    n = 5
    args = [
        reduce(AmbientPoly.parse(n, "x0 x1 - x2 + 1")),
        reduce(AmbientPoly.parse(n, "2 x3^2 + x0")),
        reduce(AmbientPoly.parse(n, "x4 x5 - 3")),
    ]
    base = sigma2_trilinear(*args)
    for perm in itertools.permutations(args):
        assert sigma2_trilinear(*perm) == base


def test_descriptors():
    d = gjms_descriptor(5, 2)
    assert (d.j, d.k, d.sharp) == (1, 2, Fraction(105, 16))
    assert d.mass_exponent == Fraction(10, 1)
    assert d.critical_exponent == 9
    s = sigma2_descriptor(6)
    assert s.mass_exponent == 12 and s.density_weight == Fraction(1, 12)
    assert s.critical_exponent == Fraction(11)
    with pytest.raises(ValueError):
        gjms_descriptor(5, 0)
    with pytest.raises(ValueError):
        sigma2_descriptor(4)
    with pytest.raises(TypeError):
        s(one(6))


@given(sphere_poly(5, 3))
def test_factored_equals_spectral(u):
    for k in (1, 2):
        o = GjmsOrder(5, k)
        assert gjms_apply(u, o) == gjms_apply_factored(u, o)


@given(sphere_poly(7, 2), sphere_poly(7, 2))
def test_self_adjoint(u, v):
    o = GjmsOrder(7, 3)
    assert integrate(multiply(v, gjms_apply(u, o))) == integrate(multiply(u, gjms_apply(v, o)))


@given(sphere_poly(6, 2))
def test_i_operator_at_critical_weight_is_sigma1(u):
    assert i_operator(u, Fraction(-(6 - 4), 4)) == sigma1(u)


@given(sphere_poly(5, 3))
def test_spectral_gap(u):
    o = GjmsOrder(5, 1)
    gap = gjms_energy(u, o) - integrate(multiply(u, u)) * gjms_eigenvalue(0, o)
    if u.is_constant():
        assert gap.coefficient == 0
    else:
        assert gap.coefficient > 0


@given(sphere_poly(6, 2))
def test_dirichlet_form(u):
    assert sigma2_energy(u) == sigma2_dirichlet_energy(u)


@given(sphere_poly(5, 2))
def test_grad_inner_symmetric(u):
    v = sx(5, 1) + 2
    assert grad_inner(u, v) == grad_inner(v, u)
