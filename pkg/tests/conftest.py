"""Shared quadrature oracles used across the test modules.

The oracles build basis values from raw Laguerre tables plus explicit
normalization constants and integrate them with Gauss rules whose weight
absorbs every power of |x|, so each integral they report is exact up to
roundoff and independent of the closed-form matrix assembly under test.
"""

import math

import numpy as np
import pytest

from hermspec.ghf_basis import aghf_radial, ghf_radial
from hermspec.harmonics import harmonic_dim
from hermspec.specfun import gauss_laguerre_rule, laguerre_table, radial_rule


def scaled_weights(rule, n=0):
    """w_i e^{r_i^2} r_i^{-2n}: rule weights usable against enveloped
    radial tables that already carry the r^n factor."""
    return np.exp(rule.log_weights + rule.nodes ** 2 - 2 * n * np.log(rule.nodes))


def ghf_quad_gram(mu, d, n, kmax, quad=None, weight_mu=None):
    """(|x|^{2 weight_mu} Hhat^{mu}_k, Hhat^{mu}_j) by exact radial quadrature."""
    weight_mu = mu if weight_mu is None else weight_mu
    rule = radial_rule(d, n, weight_mu, quad or (2 * kmax + 16))
    tab = ghf_radial(mu, d, n, kmax, rule.nodes)
    w = scaled_weights(rule, n)
    return (tab * w) @ tab.T


def aghf_quad_gram(s, d, n, kmax, weight_mu=0.0, quad=None):
    """(|x|^{2 weight_mu} Hcheck^{s}_k, Hcheck^{s}_j) by exact radial quadrature."""
    rule = radial_rule(d, n, weight_mu, quad or (2 * kmax + 16))
    tab = aghf_radial(s, d, n, kmax, rule.nodes)
    w = scaled_weights(rule, n)
    return (tab * w) @ tab.T


def muntz_power_oracle(spec, alpha, K, quad=None):
    """(|x|^{2 alpha} HM_k, HM_j) via the exact rho = r^{2 theta} rule.

    Uses raw Laguerre tables and explicit normalizers only; valid for the
    ordinary spaces and the 1D special space alike.
    """
    theta, beta, k0 = spec.theta, spec.beta, spec.k_start
    psi = (1.0 + alpha) / theta
    alpha_rule = (beta if k0 == 0 else k0) + psi - 1.0
    rule = gauss_laguerre_rule(quad or (2 * K + 16), alpha_rule)
    rho = rule.nodes
    tab = laguerre_table(K, beta, rho)[k0:]
    norm = np.array([math.exp(0.5 * (math.log(2.0) + math.lgamma(k + 1.0)
                                     - math.lgamma(k + beta + 1.0)))
                     for k in range(k0, K + 1)])
    tab = tab * norm[:, None]
    # match the rule weight x^alpha_rule to the integrand power beta+psi-1
    w = rule.weights * rho ** ((beta + psi - 1.0) - rule.alpha)
    return (tab * w) @ tab.T / (2.0 * theta)


def stiffness_split_oracle(spec, K, quad=40):
    """(grad u, grad v) from raw Laguerre tables and the derivative
    recurrence rho L' = k L - (k + beta) L_{k-1}, with exact rho-space
    Gauss rules; independent of the closed-form stiffness entries."""
    theta, beta, n, d = spec.theta, spec.beta, spec.n, spec.d
    rule = gauss_laguerre_rule(quad, beta - 1.0 if n > 0 else beta)
    rho = rule.nodes
    L = laguerre_table(K, beta, rho)
    norm = np.array([math.exp(0.5 * (math.log(2.0) + math.lgamma(k + 1.0)
                                     - math.lgamma(k + beta + 1.0)))
                     for k in range(K + 1)])
    q = np.empty_like(L)
    q[0] = 0.0
    for k in range(1, K + 1):
        q[k] = k * L[k] - (k + beta) * L[k - 1]
    g = L * norm[:, None]
    qn = q * norm[:, None]

    def cross(power, A, B):
        w = rule.weights * rho ** (power - rule.alpha)
        return (A * w) @ B.T

    lam = n * n + n * (n + d - 2)
    t1 = lam * cross(beta - 1.0, g, g) if n > 0 else 0.0
    mixed = cross(beta - 1.0, qn, g)
    t2 = 2.0 * theta * n * (mixed + mixed.T - cross(beta, g, g)) if n > 0 else 0.0
    mid = cross(beta, qn, g)
    s3 = cross(beta - 1.0, qn, qn) - 0.5 * (mid + mid.T) + 0.25 * cross(beta + 1.0, g, g)
    return (t1 + t2 + 4.0 * theta ** 2 * s3) / (2.0 * theta)


def block_bandwidth(mat, tol=0.0):
    """Largest |i-j| with an entry exceeding ``tol`` in magnitude."""
    mat = np.asarray(mat)
    band = 0
    for lag in range(1, mat.shape[0]):
        if np.any(np.abs(np.diagonal(mat, lag)) > tol):
            band = lag
    return band


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
