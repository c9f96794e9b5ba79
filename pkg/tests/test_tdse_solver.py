import math

import numpy as np
import pytest

from conftest import aghf_quad_gram, scaled_weights
from hermspec import fl_solver
from hermspec.ghf_basis import BasisSpec, SpectralField, Truncation, ghf_radial
from hermspec.specfun import radial_rule
from hermspec.tdse_solver import (CNOperators, SeparableSource, TDSEProblem,
                                  assemble_potential, cn_step, run)


def test_problem_validation():
    psi0 = lambda pts: np.zeros(len(np.atleast_2d(pts)), dtype=complex)  # noqa: E731
    with pytest.raises(ValueError):
        TDSEProblem(s=1.2, mu=0.5, gamma=1.0, dt=0.1, t_end=1.0, psi0=psi0, N=2, K=4)
    with pytest.raises(ValueError):
        TDSEProblem(s=0.5, mu=-0.6, gamma=1.0, dt=0.1, t_end=1.0, psi0=psi0, N=2, K=4)
    with pytest.raises(ValueError):
        TDSEProblem(s=0.5, mu=0.5, gamma=1.0, dt=-0.1, t_end=1.0, psi0=psi0, N=2, K=4)


def test_potential_identity_limits():
    V = assemble_potential(1e-12, 0.0, 2, 0, 6)
    assert np.abs(V - np.eye(7)).max() < 1e-10


def test_potential_first_entry_closed_form():
    for (s, mu, d, n) in [(0.5, 0.7, 2, 0), (0.3, 0.2, 3, 1)]:
        V = assemble_potential(s, mu, d, n, 3)
        ref = math.exp(math.lgamma(n + 0.5 * d + mu) - math.lgamma(n + 0.5 * d + s))
        assert V[0, 0] == pytest.approx(ref, rel=1e-13)


def test_potential_vs_quadrature_oracle():
    # entry (1, 2) for s = 0.5, mu = 0.7, n = 0, d = 2 against the weighted
    # Gram of the adjoint functions
    s, mu, d, n = 0.5, 0.7, 2, 0
    V = assemble_potential(s, mu, d, n, 4)
    gram = aghf_quad_gram(s, d, n, 4, weight_mu=mu)
    assert V[1, 2] == pytest.approx(gram[1, 2], rel=1e-11)
    assert np.abs(V - gram).max() < 1e-11


def test_cn_step_scalar_rotation():
    # one mode with M = I, A = 1/2 I: amplification (1 - i dt/4)/(1 + i dt/4)
    spec = BasisSpec("aghf", 2, 0.5)
    trunc = Truncation("rectangular", 0, 0)
    ops = CNOperators.__new__(CNOperators)
    dt = 0.21
    ops.d, ops.dt, ops.truncation = 2, dt, trunc
    ops.mass = {0: np.eye(1)}
    A = 0.5 * np.eye(1)
    ops.lhs = {0: (1j / dt) * np.eye(1) - 0.5 * A}
    ops.rhs = {0: (1j / dt) * np.eye(1) + 0.5 * A}
    state = SpectralField(spec, trunc, np.array([1.0 + 0.0j]))
    out = cn_step(state, ops, dt)
    expect = (1.0 - 1j * dt / 4.0) / (1.0 + 1j * dt / 4.0)
    assert out.coeffs[0] == pytest.approx(expect, rel=1e-14)
    # zero state, zero source stays zero
    zero = SpectralField(spec, trunc, np.array([0.0 + 0.0j]))
    assert cn_step(zero, ops, dt).coeffs[0] == 0.0


def _manufactured_cfg(s=0.5, mu=0.5, K=24):
    from hermspec.cli_harness import manufactured_tdse
    cfg = {"s": s, "mu": mu, "gamma": 1.0, "d": 2, "N": 2, "K": K,
           "t_end": 1.0, "quad_size": 0}
    return lambda dt: manufactured_tdse(cfg, dt)


def test_temporal_second_order():
    make = _manufactured_cfg()
    lattice = fl_solver.default_lattice(2, extent=4.0, step=0.5)
    rho = np.einsum("ij,ij->i", lattice, lattice)
    exact = np.exp(-rho - 1.0)
    errs = []
    for dt in (0.1, 0.05):
        res = run(make(dt))
        errs.append(np.abs(res.fields[-1].evaluate(lattice) - exact).max())
    assert 3.6 <= errs[0] / errs[1] <= 4.4


def test_norm_conservation_without_source():
    psi0 = lambda pts: np.exp(  # noqa: E731
        -np.einsum("ij,ij->i", np.atleast_2d(pts), np.atleast_2d(pts))) + 0.0j
    prob = TDSEProblem(s=0.5, mu=0.5, gamma=1.0, dt=0.05, t_end=1.0, psi0=psi0,
                       N=2, K=20, psi0_radial=True)
    res = run(prob)
    drift = np.abs(np.diff(res.gram_norms)) / res.gram_norms[0]
    assert drift.max() < 1e-12


def test_eigenmode_evolution_oracle():
    # s = 1, mu = 1, gamma^2/2 = 1/2: the generator is (-Delta + |x|^2)/2,
    # diagonal in the mu = 0 family with eigenvalues (4k + 2n + d)/2; compare
    # the stepped solution against the analytic eigen-expansion of psi0
    d, K = 2, 16
    psi0 = lambda pts: np.exp(  # noqa: E731
        -np.einsum("ij,ij->i", np.atleast_2d(pts), np.atleast_2d(pts))) + 0.0j
    t_end = 0.5
    prob = TDSEProblem(s=1.0, mu=1.0, gamma=1.0, dt=0.0005, t_end=t_end, psi0=psi0,
                       N=0, K=K, record_times=(t_end,), psi0_radial=True)
    res = run(prob)
    # analytic coefficients of e^{-r^2} in the mu = 0 family (n = 0 block)
    ks = np.arange(K + 1)
    coef = (2.0 * math.sqrt(math.pi) / 3.0) * (1.0 / 3.0) ** ks
    phases = np.exp(-1j * 0.5 * (4 * ks + d) * t_end)
    spec0 = BasisSpec("ghf", 2, 0.0)
    ref_field = SpectralField(spec0, Truncation("rectangular", 0, K), coef * phases)
    lattice = fl_solver.default_lattice(2, extent=4.0, step=0.5)
    got = res.fields[-1].evaluate(lattice)
    ref = ref_field.evaluate(lattice)
    assert np.abs(got - ref).max() < 2e-6  # dt^2 floor dominates


def test_spatial_spectral_accuracy_until_temporal_floor():
    make_err = []
    lattice = fl_solver.default_lattice(2, extent=4.0, step=0.5)
    rho = np.einsum("ij,ij->i", lattice, lattice)
    t_end, dt = 0.25, 0.0125
    from hermspec.cli_harness import manufactured_tdse
    for K in (4, 8, 16):
        cfg = {"s": 0.5, "mu": 0.5, "gamma": 1.0, "d": 2, "N": 0, "K": K,
               "t_end": t_end, "quad_size": 0}
        res = run(manufactured_tdse(cfg, dt))
        make_err.append(np.abs(res.fields[-1].evaluate(lattice)
                               - np.exp(-rho - t_end)).max())
    # geometric decay until the dt^2 floor takes over
    assert make_err[0] > 10 * make_err[1]
    assert make_err[1] > make_err[2]


def test_separable_source_matches_callable():
    src = SeparableSource([lambda t: math.exp(-t), lambda t: t],
                          [lambda pts: np.ones(len(pts)),
                           lambda pts: np.einsum("ij,ij->i", pts, pts)],
                          weights=[0.0, 0.25])
    pts = np.array([[0.5, 0.5], [1.0, -2.0]])
    rho = np.einsum("ij,ij->i", pts, pts)
    expect = math.exp(-0.3) * 1.0 + 0.3 * rho ** 0.25 * rho
    assert np.abs(src(pts, 0.3) - expect).max() < 1e-14


def test_record_times_must_hit_grid():
    psi0 = lambda pts: np.zeros(len(np.atleast_2d(pts)), dtype=complex)  # noqa: E731
    prob = TDSEProblem(s=0.5, mu=0.5, gamma=1.0, dt=0.1, t_end=0.5, psi0=psi0,
                       N=0, K=2, record_times=(0.123,))
    with pytest.raises(ValueError):
        run(prob)
