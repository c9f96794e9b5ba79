import math
from fractions import Fraction

import numpy as np
import pytest

from hermspec.specfun import (ConvergenceError, gamma_ln, gauss_2f1, gauss_laguerre_rule,
                              jacobi_eval, kummer_1f1, laguerre_eval, laguerre_table,
                              log_pochhammer, pochhammer, radial_rule)

# ---------------------------------------------------------------------------
# independent oracles
# ---------------------------------------------------------------------------


def laguerre_series(k, alpha, z):
    """Explicit sum L_k = sum_j (alpha+j+1)_(k-j) (-z)^j / ((k-j)! j!)."""
    total = 0.0
    for j in range(k + 1):
        total += pochhammer(alpha + j + 1, k - j) * (-z) ** j \
            / (math.factorial(k - j) * math.factorial(j))
    return total


def hyp1f1_rational(a, b, z, terms=200):
    """Exact-rational series oracle for rational arguments."""
    total, term = Fraction(0), Fraction(1)
    for m in range(terms):
        total += term
        term = term * (a + m) * z / ((b + m) * (m + 1))
    return float(total)


def jacobi_series(k, a, b, x):
    total = 0.0
    for m in range(k + 1):
        total += (math.comb(k, m) * math.gamma(a + b + k + m + 1)
                  / math.gamma(a + m + 1) * ((x - 1.0) / 2.0) ** m)
    return math.gamma(a + k + 1) / (math.factorial(k) * math.gamma(a + b + k + 1)) * total


# ---------------------------------------------------------------------------
# Laguerre / Jacobi recurrences
# ---------------------------------------------------------------------------


def test_laguerre_base_cases():
    assert laguerre_eval(0, 0.5, 3.2) == 1.0
    assert laguerre_eval(1, 0.0, 1.0) == 0.0
    # frozen from the explicit-series oracle
    assert laguerre_eval(2, 0.0, 1.0) == pytest.approx(-0.5, abs=1e-15)


@pytest.mark.parametrize("k,alpha", [(3, 0.0), (5, 0.5), (7, -0.3), (4, -2.0), (6, 2.5)])
def test_laguerre_matches_series(k, alpha):
    for z in (0.0, 0.3, 1.7, 4.0):
        assert laguerre_eval(k, alpha, z) == pytest.approx(
            laguerre_series(k, alpha, z), rel=1e-12, abs=1e-12)


def test_laguerre_table_consistency():
    z = np.linspace(0.0, 9.0, 7)
    table = laguerre_table(6, 0.7, z)
    for k in range(7):
        assert np.allclose(table[k], laguerre_eval(k, 0.7, z), rtol=1e-13)


def test_laguerre_orthogonality():
    # quadrature inner products equal Gamma(k+alpha+1)/k! delta_kj
    alpha = 0.6
    rule = gauss_laguerre_rule(40, alpha)
    table = laguerre_table(30, alpha, rule.nodes)
    gram = (table * rule.weights) @ table.T
    target = np.diag([math.exp(math.lgamma(k + alpha + 1) - math.lgamma(k + 1))
                      for k in range(31)])
    assert np.abs(gram - target).max() < 1e-10


def test_jacobi_values():
    assert jacobi_eval(0, 0.3, -0.2, 0.1) == 1.0
    assert jacobi_eval(1, 0.0, 0.0, 0.5) == pytest.approx(0.5, abs=1e-15)
    assert jacobi_eval(3, 1.0, 1.0, 0.3) == pytest.approx(
        jacobi_series(3, 1.0, 1.0, 0.3), rel=1e-13)
    # frozen value of the degree-3 oracle
    assert jacobi_eval(3, 1.0, 1.0, 0.3) == pytest.approx(-0.711, abs=1e-12)


# ---------------------------------------------------------------------------
# gamma / pochhammer
# ---------------------------------------------------------------------------


def test_gamma_ln():
    assert gamma_ln(1.0) == 0.0
    # reference via product recursion from Gamma(0.5) = sqrt(pi)
    ref = 0.5 * math.log(math.pi) + sum(math.log(0.5 + i) for i in range(10))
    assert gamma_ln(10.5) == pytest.approx(ref, rel=1e-13)
    with pytest.raises(ValueError):
        gamma_ln(0.0)
    with pytest.raises(ValueError):
        gamma_ln(-2.5)


def test_pochhammer():
    assert pochhammer(0.0, 3) == 0.0
    assert pochhammer(1.7, 0) == 1.0
    assert pochhammer(2.0, 4) == pytest.approx(2 * 3 * 4 * 5)
    assert pochhammer(-3.0, 5) == 0.0  # terminates through zero
    log_abs, sign = log_pochhammer(-2.5, 3)
    assert sign == -1.0
    assert math.exp(log_abs) * sign == pytest.approx((-2.5) * (-1.5) * (-0.5))


# ---------------------------------------------------------------------------
# hypergeometric functions
# ---------------------------------------------------------------------------


def test_kummer_basic():
    assert kummer_1f1(0.7, 1.3, 0.0) == 1.0
    assert kummer_1f1(1.0, 1.0, 2.0) == pytest.approx(math.exp(2.0), rel=1e-13)
    # frozen from the 200-term exact-rational oracle
    val = hyp1f1_rational(Fraction(5, 4), Fraction(1), Fraction(-4))
    assert val == pytest.approx(-0.040317843021702826, abs=1e-16)
    assert kummer_1f1(1.25, 1.0, -4.0) == pytest.approx(val, rel=1e-12)


def test_kummer_transform_self_consistency():
    for a in (0.4, 1.1, 2.3):
        for b in (0.9, 1.5, 3.2):
            for z in (-0.5, -3.0, -20.0, -120.0):
                direct = math.exp(z) * kummer_1f1(b - a, b, -z)
                assert abs(kummer_1f1(a, b, z) - direct) < 1e-9 * abs(direct)


def test_kummer_mpmath_reference():
    mp = pytest.importorskip("mpmath")
    mp.mp.dps = 30
    for (a, b) in ((0.8, 1.0), (1.75, 0.5), (2.5, 2.0)):
        for z in (-5.0, -80.0, -400.0, -700.0, -1500.0):
            ref = float(mp.hyp1f1(a, b, z))
            assert kummer_1f1(a, b, z) == pytest.approx(ref, rel=1e-10)


def test_kummer_domain_errors():
    with pytest.raises(ValueError):
        kummer_1f1(1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        kummer_1f1(1.0, -2.0, 1.0)


def test_gauss_2f1_basic():
    assert gauss_2f1(0.7, 1.1, 1.9, 0.0) == 1.0
    # identity 2F1(1,1;2;z) = -ln(1-z)/z
    assert gauss_2f1(1.0, 1.0, 2.0, -1.0) == pytest.approx(math.log(2.0), rel=1e-12)


def test_gauss_2f1_mpmath_reference():
    mp = pytest.importorskip("mpmath")
    mp.mp.dps = 30
    assert gauss_2f1(2.3, 1.8, 1.5, -9.0) == pytest.approx(
        float(mp.hyp2f1(2.3, 1.8, 1.5, -9.0)), rel=1e-10)
    for z in (-0.3, -25.0, -384.0):
        ref = float(mp.hyp2f1(2.5, 1.5, 1.0, z))
        assert gauss_2f1(2.5, 1.5, 1.0, z) == pytest.approx(ref, rel=1e-10)


def test_gauss_2f1_domain_errors():
    with pytest.raises(ValueError):
        gauss_2f1(1.0, 1.0, 0.0, -1.0)
    with pytest.raises(ValueError):
        gauss_2f1(1.0, 1.0, 2.0, 0.5)


def test_hypergeometric_convergence_cap():
    with pytest.raises(ConvergenceError):
        gauss_2f1(2.0, 1.0, 1.5, -1e9)


# ---------------------------------------------------------------------------
# quadrature rules
# ---------------------------------------------------------------------------


def test_one_point_rules():
    rule = gauss_laguerre_rule(1, 0.0)
    assert rule.nodes[0] == pytest.approx(1.0)
    assert rule.weights[0] == pytest.approx(1.0)
    alpha = 0.7
    rule = gauss_laguerre_rule(1, alpha)
    assert rule.nodes[0] == pytest.approx(alpha + 1.0)
    assert rule.weights[0] == pytest.approx(math.gamma(alpha + 1.0))


def test_gauss_laguerre_moment():
    rule = gauss_laguerre_rule(32, 0.5)
    assert rule.integrate(rule.nodes ** 3) == pytest.approx(math.gamma(4.5), rel=1e-13)


@pytest.mark.parametrize("size", [4, 8, 16, 32])
@pytest.mark.parametrize("alpha", [-0.3, 0.0, 0.5, 2.0])
def test_gauss_laguerre_exactness(size, alpha):
    rule = gauss_laguerre_rule(size, alpha)
    assert np.all(rule.weights > 0.0)
    for m in range(2 * size):
        exact = math.exp(math.lgamma(m + alpha + 1.0))
        assert rule.integrate(rule.nodes ** m) == pytest.approx(exact, rel=1e-11)


def test_gauss_laguerre_validation():
    with pytest.raises(ValueError):
        gauss_laguerre_rule(0, 0.0)
    with pytest.raises(ValueError):
        gauss_laguerre_rule(4, -1.0)


def test_radial_rule_moments():
    rule = radial_rule(1, 0, 0.0, 16)
    assert rule.integrate(np.ones_like(rule.nodes)) == pytest.approx(
        math.sqrt(math.pi) / 2.0, rel=1e-13)
    rule = radial_rule(3, 0, 0.0, 16)
    assert rule.integrate(np.ones_like(rule.nodes)) == pytest.approx(
        math.sqrt(math.pi) / 4.0, rel=1e-13)
    # Gamma((2*mu + 2*n + d)/2)/2 oracle; here (2*0.5 + 2 + 2)/2 = 5/2
    rule = radial_rule(2, 1, 0.5, 8)
    assert rule.integrate(np.ones_like(rule.nodes)) == pytest.approx(
        math.gamma(2.5) / 2.0, rel=1e-13)


def test_radial_rule_change_of_variables():
    # weight r^(2mu+2n+d-1) e^{-r^2}: check a nontrivial polynomial in r^2
    d, n, mu = 3, 2, 0.4
    rule = radial_rule(d, n, mu, 12)
    g = rule.nodes ** 4 - 2.0 * rule.nodes ** 2 + 3.0
    a = n + 0.5 * (d - 2) + mu
    exact = 0.5 * (math.gamma(a + 3) - 2 * math.gamma(a + 2) + 3 * math.gamma(a + 1))
    assert rule.integrate(g) == pytest.approx(exact, rel=1e-13)


def test_radial_rule_domain():
    with pytest.raises(ValueError):
        radial_rule(1, 0, -0.6, 8)
