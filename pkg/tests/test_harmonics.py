import math

import numpy as np
import pytest

from hermspec.harmonics import (HarmonicIndex, harmonic_dim, sph_eval, sph_eval_angles,
                                sph_table, sphere_rule, surface_area)
from hermspec.specfun import jacobi_eval


def test_harmonic_dim_values():
    assert harmonic_dim(1, 0) == 1 and harmonic_dim(1, 1) == 1
    assert harmonic_dim(1, 2) == 0 and harmonic_dim(1, 5) == 0
    assert harmonic_dim(2, 0) == 1
    for n in range(1, 8):
        assert harmonic_dim(2, n) == 2
    for n in range(8):
        assert harmonic_dim(3, n) == 2 * n + 1
    with pytest.raises(ValueError):
        harmonic_dim(4, 0)
    with pytest.raises(ValueError):
        harmonic_dim(2, -1)


def test_harmonic_index_validation():
    HarmonicIndex(3, 2, 5)
    with pytest.raises(ValueError):
        HarmonicIndex(3, 2, 6)
    with pytest.raises(ValueError):
        HarmonicIndex(1, 2, 1)  # no degree-2 harmonics in 1D
    with pytest.raises(ValueError):
        HarmonicIndex(2, 1, 0)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_sphere_rule_area(d):
    rule = sphere_rule(d, 4)
    assert rule.weights.sum() == pytest.approx(surface_area(d), rel=1e-13)
    assert np.allclose(np.linalg.norm(rule.points, axis=1), 1.0)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_orthonormality(d):
    nmax = 10 if d < 3 else 10
    rule = sphere_rule(d, nmax)
    idx, table = sph_table(d, nmax, rule.points)
    gram = (table * rule.weights) @ table.T
    assert np.abs(gram - np.eye(len(idx))).max() < 1e-12


def test_point_values():
    assert sph_eval(HarmonicIndex(2, 0, 1), np.array([0.3, math.sqrt(1 - 0.09)])) \
        == pytest.approx(1.0 / math.sqrt(2.0 * math.pi))
    assert sph_eval(HarmonicIndex(1, 1, 1), np.array([1.0])) \
        == pytest.approx(1.0 / math.sqrt(2.0))
    assert sph_eval(HarmonicIndex(1, 1, 1), np.array([-1.0])) \
        == pytest.approx(-1.0 / math.sqrt(2.0))
    assert sph_eval(HarmonicIndex(1, 0, 1), np.array([-1.0])) \
        == pytest.approx(1.0 / math.sqrt(2.0))


def test_d3_proportional_to_gegenbauer_form():
    # our orthonormal member equals (sin theta)^l P_(n-l)^(l,l)(cos) trig(l phi)
    # up to one constant per (n, l)
    theta = np.linspace(0.3, 2.8, 11)
    phi = np.linspace(0.1, 6.0, 11)
    for (n, ell) in [(0, 1), (2, 1), (3, 4), (4, 7)]:
        ours = sph_eval_angles(3, n, ell, theta, phi)
        if ell == 1:
            ref = jacobi_eval(n, 0.0, 0.0, np.cos(theta)) / math.sqrt(8 * math.pi)
        else:
            l = ell // 2
            trig = np.cos(l * phi) if ell % 2 == 0 else np.sin(l * phi)
            ref = (np.sin(theta) ** l * jacobi_eval(n - l, float(l), float(l), np.cos(theta))
                   * trig / (2 ** (l + 1) * math.sqrt(math.pi)))
        ratio = ours / ref
        assert np.abs(ratio - ratio[0]).max() < 1e-12 * abs(ratio[0])


def _beltrami_fd(d, n, ell, h=1e-3):
    # second-order FD Laplace-Beltrami at interior points
    if d == 2:
        theta = np.linspace(0.4, 5.8, 9)
        f = lambda t: sph_eval_angles(2, n, ell, t)  # noqa: E731
        lap = (f(theta + h) - 2.0 * f(theta) + f(theta - h)) / h ** 2
        vals = f(theta)
    else:
        theta = np.linspace(0.5, 2.6, 7)
        phi = np.linspace(0.2, 5.9, 7)
        f = lambda t, p: sph_eval_angles(3, n, ell, t, p)  # noqa: E731
        ftt = (f(theta + h, phi) - 2.0 * f(theta, phi) + f(theta - h, phi)) / h ** 2
        ft = (f(theta + h, phi) - f(theta - h, phi)) / (2 * h)
        fpp = (f(theta, phi + h) - 2.0 * f(theta, phi) + f(theta, phi - h)) / h ** 2
        lap = ftt + ft / np.tan(theta) + fpp / np.sin(theta) ** 2
        vals = f(theta, phi)
    return lap, vals


@pytest.mark.parametrize("d,n,ell", [(2, 1, 1), (2, 3, 2), (3, 1, 2), (3, 2, 4), (3, 4, 1)])
def test_laplace_beltrami_eigenrelation(d, n, ell):
    lap, vals = _beltrami_fd(d, n, ell)
    target = -n * (n + d - 2) * vals
    scale = np.abs(target).max()
    assert np.abs(lap - target).max() < 1e-4 * scale


def test_sphere_rule_unsupported():
    with pytest.raises(ValueError):
        sphere_rule(4, 3)
