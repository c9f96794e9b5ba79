"""Spectral-Galerkin solver for (-Delta)^s u + gamma u = f on R^d.

In the adjoint basis the fractional stiffness matrix is the identity, so
the Galerkin system collapses to (I + gamma M) u = f with M the adjoint
Gram matrix, block diagonal over (n, ell) and SPD.  The module also
carries the manufactured problems with Gaussian and algebraic exact
solutions whose sources involve 1F1 and 2F1.
"""

import math
from dataclasses import dataclass

import numpy as np

from .ghf_basis import BasisSpec, SpectralField, Truncation, aghf_radial, signed_connection
from .harmonics import harmonic_dim, sph_table, sphere_rule, surface_area
from .linalg_blocks import cholesky_solve
from .specfun import gauss_2f1, kummer_1f1, radial_rule

__all__ = [
    "FLProblem",
    "ManufacturedSource",
    "assemble_mass",
    "project_rhs",
    "solve",
    "manufactured_source",
    "manufactured_solution",
    "evaluate_field",
    "max_error",
    "default_lattice",
]


@dataclass
class FLProblem:
    """(-Delta)^s u + gamma u = f with rectangular truncation (N, K)."""

    d: int
    s: float
    gamma: float
    source: object  # callable f(points) or a named kind: exp | algebraic
    N: int
    K: int
    r_exponent: float = None
    quad_size: int = None

    def __post_init__(self):
        if not 0.0 < self.s < 1.0:
            raise ValueError("s must lie in (0, 1)")
        if self.gamma <= 0.0:
            raise ValueError("gamma must be positive")


def assemble_mass(s, d, n, K):
    """Adjoint Gram block (M^n)_{kj} = (-1)^{k+j} sum_p C^k_p C^j_p."""
    B = signed_connection(s, d, n, K)
    return B @ B.T


class ManufacturedSource:
    """Radial source callable with its exact solution attached (if any)."""

    def __init__(self, fn, exact=None, radial=True, name=""):
        self._fn = fn
        self.exact = exact
        self.radial = radial
        self.name = name

    def __call__(self, points):
        return self._fn(points)


def _sq_norm(points):
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    return np.einsum("ij,ij->i", pts, pts)


def manufactured_solution(kind, r_exponent=None):
    """Exact solutions of the manufactured problems: exp | algebraic."""
    if kind == "exp":
        return lambda pts: np.exp(-_sq_norm(pts))
    if kind == "algebraic":
        if r_exponent is None or r_exponent <= 0.0:
            raise ValueError("algebraic solution needs r_exponent > 0")
        return lambda pts: (1.0 + _sq_norm(pts)) ** (-r_exponent)
    raise ValueError(f"unknown manufactured kind {kind!r}")


def manufactured_source(kind, d, s, gamma, r_exponent=None):
    """Closed-form sources for the manufactured problems.

    exp:        u = e^{-|x|^2},
                f = gamma u + 2^{2s} Gamma(s+d/2)/Gamma(d/2)
                    1F1(s+d/2; d/2; -|x|^2)
    algebraic:  u = (1+|x|^2)^{-r},
                f = gamma u + 2^{2s} Gamma(s+r) Gamma(s+d/2) /
                    (Gamma(r) Gamma(d/2)) 2F1(s+r, s+d/2; d/2; -|x|^2)
    sin-exp / cos-algebraic: source-only problems without a closed-form
    solution (reference runs provide the truth).
    """
    if kind == "exp":
        c = math.exp(2 * s * math.log(2.0) + math.lgamma(s + 0.5 * d) - math.lgamma(0.5 * d))

        def fn(pts):
            rho = _sq_norm(pts)
            return gamma * np.exp(-rho) + c * kummer_1f1(s + 0.5 * d, 0.5 * d, -rho)

        return ManufacturedSource(fn, manufactured_solution("exp"), name="exp")
    if kind == "algebraic":
        r = r_exponent
        if r is None or r <= 0.0:
            raise ValueError("algebraic source needs r_exponent > 0")
        c = math.exp(2 * s * math.log(2.0) + math.lgamma(s + r) + math.lgamma(s + 0.5 * d)
                     - math.lgamma(r) - math.lgamma(0.5 * d))

        def fn(pts):
            rho = _sq_norm(pts)
            return (gamma * (1.0 + rho) ** (-r)
                    + c * gauss_2f1(s + r, s + 0.5 * d, 0.5 * d, -rho))

        return ManufacturedSource(fn, manufactured_solution("algebraic", r), name="algebraic")
    if kind == "sin-exp":
        return ManufacturedSource(
            lambda pts: np.sin(np.sqrt(_sq_norm(pts))) * np.exp(-_sq_norm(pts)),
            name="sin-exp")
    if kind == "cos-algebraic":
        r = r_exponent
        if r is None or r <= 0.0:
            raise ValueError("cos-algebraic source needs r_exponent > 0")
        return ManufacturedSource(
            lambda pts: np.cos(np.sqrt(_sq_norm(pts))) * (1.0 + _sq_norm(pts)) ** (-r),
            name="cos-algebraic")
    raise ValueError(f"unknown manufactured kind {kind!r}")


def _scaled_radial_weights(rule):
    # w_i e^{r_i^2}: turns the Gaussian-weighted rule into one usable on
    # integrands that carry their own envelope (log-space for safety)
    return np.exp(rule.log_weights + rule.nodes ** 2)


def project_rhs(f, spec, truncation, quad_size=None, sphere_degree=None, radial=False,
                weight_mu=0.0):
    """Moments fhat^n_{k,ell} = (f, Hcheck^{s,n}_{k,ell}) as a SpectralField.

    Quadrature: a radial Gauss rule of ``quad_size`` points (default
    max(2K + 16, 64)) times a sphere rule of degree >= N.  ``radial=True``
    activates the fast path where only n = 0 blocks are computed.

    A nonzero ``weight_mu`` treats ``f`` as the smooth factor of
    |x|^{2 weight_mu} f(x) and moves the power into the quadrature weight,
    which keeps the rule exact for potentials with fractional powers.
    """
    if spec.family != "aghf":
        raise ValueError("project_rhs expects an adjoint-family spec")
    d, s, N = spec.d, spec.param, truncation.N
    kmax_all = max(truncation.kmax(n) for n in range(N + 1))
    if quad_size is None:
        quad_size = max(2 * kmax_all + 16, 64)
    rule = radial_rule(d, 0, weight_mu, quad_size)
    r = rule.nodes
    w = _scaled_radial_weights(rule)
    radial = radial or getattr(f, "radial", False)

    if radial:
        fv = np.asarray(f(r[:, None] * np.eye(d)[0]))
        ang = {(0, 1): fv * math.sqrt(surface_area(d))}
        pairs = [(0, 1)]
    else:
        sphere = sphere_rule(d, max(N, 1) if sphere_degree is None else sphere_degree)
        pts = (r[:, None, None] * sphere.points[None, :, :]).reshape(-1, d)
        fv = np.asarray(f(pts)).reshape(r.size, -1)
        pairs, ytab = sph_table(d, N, sphere.points)
        ang_mat = fv @ (sphere.weights[:, None] * ytab.T)
        ang = {pair: ang_mat[:, i] for i, pair in enumerate(pairs)}

    dtype = complex if any(np.iscomplexobj(v) for v in ang.values()) else float
    field = SpectralField(spec, truncation, np.zeros(truncation.size(d), dtype=dtype))
    for n in range(N + 1):
        kmax = truncation.kmax(n)
        if kmax < 0 or harmonic_dim(d, n) == 0:
            continue
        table = aghf_radial(s, d, n, kmax, r)
        for ell in range(1, harmonic_dim(d, n) + 1):
            vec = ang.get((n, ell))
            if vec is None:
                continue
            field.block(n, ell)[:] = table @ (w * vec)
    return field


def solve(problem):
    """Solve the Galerkin system (I + gamma M) u = fhat block by block."""
    spec = BasisSpec("aghf", problem.d, problem.s)
    trunc = Truncation("rectangular", problem.N, problem.K)
    f = problem.source
    if isinstance(f, str):
        f = manufactured_source(f, problem.d, problem.s, problem.gamma, problem.r_exponent)
    fhat = project_rhs(f, spec, trunc, quad_size=problem.quad_size)
    out = SpectralField(spec, trunc, np.zeros_like(fhat.coeffs))
    for n in range(problem.N + 1):
        if harmonic_dim(problem.d, n) == 0:
            continue
        A = np.eye(problem.K + 1) + problem.gamma * assemble_mass(
            problem.s, problem.d, n, problem.K)
        for ell in range(1, harmonic_dim(problem.d, n) + 1):
            out.block(n, ell)[:] = cholesky_solve(A, fhat.block(n, ell))
    return out


def evaluate_field(field, points):
    """Expansion values at physical points."""
    return field.evaluate(points)


def default_lattice(d, extent=6.0, step=0.25):
    """Reproducible tensor evaluation lattice |x|_inf <= extent."""
    axis = np.arange(-extent, extent + 0.5 * step, step)
    grids = np.meshgrid(*([axis] * d), indexing="ij")
    return np.column_stack([g.ravel() for g in grids])


def max_error(field, exact, points=None):
    """Max pointwise error over the evaluation lattice (or given points)."""
    if points is None:
        points = default_lattice(field.spec.d)
    return float(np.max(np.abs(field.evaluate(points) - np.asarray(exact(points)))))
