import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from confsphere.quadrature import jacobi_rule, nodes_for_degree, sphere_rule
from confsphere.sphere_calc import monomial_moment, omega


@pytest.mark.parametrize("n", [1, 2, 5, 6, 7])
def test_polar_weights_total_volume(n):
    rule = jacobi_rule(n, 40)
    assert rule.sphere_integral(np.ones(rule.size)) == pytest.approx(omega(n), rel=1e-14)


def test_polar_rule_matches_beta_moments():
    # integral of t^{2m} (1-t^2)^a over (-1,1) = B(m+1/2, a+1)
    n = 6
    a = (n - 2) / 2
    rule = jacobi_rule(n, 30)
    for m in range(0, 20):
        exact = math.gamma(m + 0.5) * math.gamma(a + 1) / math.gamma(m + a + 1.5)
        assert np.dot(rule.weights, rule.nodes ** (2 * m)) == pytest.approx(exact, rel=1e-12)


def test_nodes_for_degree():
    assert [nodes_for_degree(d) for d in (0, 1, 2, 3, 4)] == [1, 1, 2, 2, 3]


def test_sphere_rule_points_on_sphere():
    rule = sphere_rule(4, 7)
    assert np.allclose(np.sum(rule.points**2, axis=1), 1.0)
    assert rule.integrate(np.ones(rule.size)) == pytest.approx(omega(4))


def test_active_rule_matches_full_rule():
    full = sphere_rule(5, 9)
    part = sphere_rule(5, 9, active=2)
    f = lambda y: np.exp(y[:, 0]) * (1 + y[:, 1] ** 2)
    assert part.integrate(f(part.points)) == pytest.approx(full.integrate(f(full.points)), rel=1e-12)
    with pytest.raises(ValueError):
        sphere_rule(5, 3, active=7)


@given(st.lists(st.integers(0, 4), min_size=5, max_size=5))
def test_monomials_integrated_exactly(alpha):
    n = 4
    rule = sphere_rule(n, sum(alpha))
    vals = np.prod(rule.points ** np.array(alpha), axis=1)
    expected = float(monomial_moment(tuple(alpha))) * omega(n)
    assert rule.integrate(vals) == pytest.approx(expected, abs=1e-13 * omega(n))
