"""Generalized eigensolver for -(1/2) Delta + Z |x|^(2 alpha) in the
Muntz basis.

Two schemes share the machinery: the Coulomb potential Z/|x| (Z < 0) with
theta = 1/2, where the combination S + kappa^2/8 M is diagonal and the
exact spectrum lambda_i = -2 Z^2 / (2i + d - 3)^2 is available as an
oracle, and rational power potentials Z |x|^{(2 nu - 2 mu)/(mu + 1)} with
theta = 1/(mu + 1), where stiffness and mass are banded with bandwidths
max(nu, 1) and mu.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .harmonics import harmonic_dim
from .linalg_blocks import generalized_eig_smallest
from .muntz_basis import MuntzSpec, fractional_power_block, muntz_eval, \
    power_potential_block, stiffness_block
from .specfun import pochhammer

__all__ = [
    "EigenProblem",
    "EigenResult",
    "AssemblyError",
    "assemble_coulomb",
    "assemble_fractional",
    "solve_eigs",
    "exact_coulomb",
    "reference_eigenvalues",
]


class AssemblyError(RuntimeError):
    """An assembled operator violated a structural assertion."""


@dataclass
class EigenProblem:
    """Schrodinger eigenproblem specification.

    ``kind='coulomb'`` solves with V = Z/|x| (Z < 0, d >= 2).
    ``kind='power'`` solves with V = Z |x|^{q/p} for a rational exponent
    q/p > -2, realized through mu = 2p - 1, nu = 2p + q - 1 and
    theta = 1/(mu + 1); for d = 1 this mu is odd, as the special
    origin-vanishing space requires.
    """

    d: int
    kind: str
    Z: float
    N: int
    K: int
    count: int
    kappa: float = 1.0
    p: int = None
    q: int = None

    def __post_init__(self):
        if self.kind not in ("coulomb", "power"):
            raise ValueError(f"unknown potential kind {self.kind!r}")
        if self.kappa <= 0.0:
            raise ValueError("kappa must be positive")
        if self.count < 1:
            raise ValueError("count must be >= 1")
        if self.kind == "coulomb":
            if self.d < 2:
                raise ValueError("the Coulomb scheme requires d >= 2")
            if self.Z >= 0.0:
                raise ValueError("the Coulomb scheme requires Z < 0")
        else:
            if self.p is None or self.q is None or self.p < 1:
                raise ValueError("power potentials need integers p >= 1 and q")
            if self.q / self.p <= -2.0:
                raise ValueError("the exponent q/p must exceed -2")

    @property
    def mu(self):
        return 2 * self.p - 1

    @property
    def nu(self):
        return 2 * self.p + self.q - 1

    @property
    def theta(self):
        return 0.5 if self.kind == "coulomb" else 1.0 / (self.mu + 1)


def assemble_coulomb(problem):
    """Per-degree blocks (S, M, D) of the Coulomb scheme.

    S combines the diagonalized energy form, the diagonal |x|^{-1}
    potential block and the Gram correction; M is the kappa-scaled Gram.
    D = S + kappa^2/8 M must come out diagonal, which is asserted.
    """
    if problem.kind != "coulomb":
        raise ValueError("assemble_coulomb needs a Coulomb problem")
    kap, Z, d, K = problem.kappa, problem.Z, problem.d, problem.K
    S, M, D = {}, {}, {}
    for n in range(problem.N + 1):
        if harmonic_dim(d, n) == 0:
            continue
        spec = MuntzSpec(d, 0.5, n)
        beta = spec.beta
        ks = np.arange(K + 1)
        gram = power_potential_block(spec, 0.0, K)
        pot = power_potential_block(spec, -0.5, K)
        Sn = (0.5 * kap ** (2 - d) * np.diag(beta + 2.0 * ks + 1.0)
              + Z * kap ** (1 - d) * pot
              - 0.125 * kap ** (2 - d) * gram)
        Mn = kap ** (-d) * gram
        Dn = Sn + kap ** 2 / 8.0 * Mn
        leak = np.max(np.abs(Dn - np.diag(np.diag(Dn))))
        if leak > 1e-12 * max(1.0, np.max(np.abs(np.diag(Dn)))):
            raise AssemblyError(f"S + kappa^2/8 M not diagonal (leak {leak:.2e})")
        S[n], M[n], D[n] = Sn, Mn, Dn
    return S, M, D


def assemble_fractional(problem):
    """Per-degree blocks (S, M) of the rational-power scheme.

    Bandwidths are asserted: the mass has bandwidth mu and the stiffness
    bandwidth max(nu, 1); entries beyond the band are exact zeros from
    the terminating Pochhammer sums.
    """
    if problem.kind != "power":
        raise ValueError("assemble_fractional needs a power-potential problem")
    kap, Z, d, K = problem.kappa, problem.Z, problem.d, problem.K
    mu, nu, theta = problem.mu, problem.nu, problem.theta
    exponent = (2.0 * nu - 2.0 * mu) / (mu + 1.0)
    S, M = {}, {}
    nmax = min(problem.N, 1) if d == 1 else problem.N
    for n in range(nmax + 1):
        if harmonic_dim(d, n) == 0:
            continue
        spec = MuntzSpec(d, theta, n, kappa=kap)
        T = stiffness_block(spec, K)
        P = fractional_power_block(spec, nu, K)
        Mn = fractional_power_block(spec, mu, K)
        Sn = 0.5 * kap ** (2 - d) * T + Z * kap ** (-exponent) * P
        _assert_bandwidth(Mn, mu, "mass")
        _assert_bandwidth(Sn, max(nu, 1), "stiffness")
        S[n], M[n] = Sn, Mn
    return S, M


def _assert_bandwidth(mat, band, label):
    size = mat.shape[0]
    for lag in range(band + 1, size):
        if np.any(mat[np.arange(size - lag), np.arange(lag, size)] != 0.0):
            raise AssemblyError(f"{label} block exceeds bandwidth {band}")


@dataclass
class EigenResult:
    """Merged spectrum with per-entry (n, ell) provenance."""

    entries: list            # (value, n, ell) ascending
    block_values: dict = field(repr=False)
    block_vectors: dict = field(repr=False)

    @property
    def values(self):
        return np.array([v for v, _, _ in self.entries])

    def distinct(self, rtol=1e-6, atol=1e-9):
        """Group entries into (value, multiplicity) clusters."""
        groups = []
        for v, n, ell in self.entries:
            if groups and abs(v - groups[-1][0]) <= atol + rtol * abs(groups[-1][0]):
                groups[-1][1] += 1
            else:
                groups.append([v, 1])
        return [(v, m) for v, m in groups]


def solve_eigs(problem):
    """Smallest ``count`` eigenvalues (with multiplicity across ell)."""
    if problem.kind == "coulomb":
        S, M, _ = assemble_coulomb(problem)
        shift = problem.kappa ** 2 / 8.0
    else:
        S, M = assemble_fractional(problem)
        shift = 0.0
    entries = []
    block_values, block_vectors = {}, {}
    for n, Sn in S.items():
        per_block = min(problem.count, Sn.shape[0])
        vals, vecs = generalized_eig_smallest(Sn, M[n], per_block, shift=shift)
        block_values[n], block_vectors[n] = vals, vecs
        for ell in range(1, harmonic_dim(problem.d, n) + 1):
            entries.extend((float(v), n, ell) for v in vals)
    entries.sort(key=lambda t: (t[0], t[1], t[2]))
    return EigenResult(entries[:problem.count], block_values, block_vectors)


def exact_coulomb(d, Z, i):
    """Exact Coulomb level i >= 1: (eigenvalue, multiplicity, evaluator).

    lambda_i = -2 Z^2/(2i + d - 3)^2 with multiplicity
    ((i-1)_(d-1) + (i)_(d-1))/(d-1)!.  ``evaluator(n, ell)`` returns the
    eigenfunction callable, the basis member at the scaled argument
    4|Z| x/(2i + d - 3), valid for n <= i - 1.
    """
    if Z == 0.0:
        raise ValueError("Z must be nonzero")
    if i < 1:
        raise ValueError("level index i starts at 1")
    if d < 2:
        raise ValueError("exact_coulomb requires d >= 2")
    denom = 2 * i + d - 3
    lam = -2.0 * Z ** 2 / denom ** 2
    mult = (pochhammer(i - 1, d - 1) + pochhammer(i, d - 1)) / math.factorial(d - 1)

    def evaluator(n, ell):
        if not 0 <= n <= i - 1:
            raise ValueError(f"level {i} carries degrees n <= {i - 1}")
        spec = MuntzSpec(d, 0.5, n)
        scale = 4.0 * abs(Z) / denom

        def fn(points):
            return muntz_eval(spec, i - n - 1, ell, scale * np.atleast_2d(points))

        return fn

    return lam, int(round(mult)), evaluator


def reference_eigenvalues(problem, factor=4):
    """High-resolution self-run reference (K multiplied by ``factor``)."""
    ref = EigenProblem(problem.d, problem.kind, problem.Z, problem.N,
                       problem.K * factor, problem.count, problem.kappa,
                       problem.p, problem.q)
    return solve_eigs(ref).values
