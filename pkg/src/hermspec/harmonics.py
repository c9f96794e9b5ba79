"""Real orthonormal spherical harmonics on S^(d-1) for d = 1, 2, 3.

The d = 1 "sphere" is the two-point set {-1, +1} with counting measure,
d = 2 is the unit circle parametrized by the polar angle, and d = 3 uses
spherical coordinates (theta, phi).  Normalization constants are derived
so that quadrature orthonormality holds exactly; the classical Gegenbauer
representations are recovered up to constant factors.
"""

import math
from dataclasses import dataclass

import numpy as np

from .specfun import jacobi_eval

__all__ = [
    "HarmonicIndex",
    "SphereRule",
    "harmonic_dim",
    "sph_eval",
    "sph_eval_angles",
    "sph_table",
    "sphere_rule",
    "surface_area",
]


def harmonic_dim(d, n):
    """Dimension a_n^d of the space of degree-n harmonics in d variables.

    a_n^d = C(n+d-1, n) - C(n+d-3, n-2), the second term read as zero for
    n = 0, 1.
    """
    if d not in (1, 2, 3):
        raise ValueError(f"unsupported dimension d={d}")
    if n < 0:
        raise ValueError("harmonic degree must be >= 0")
    first = math.comb(n + d - 1, n)
    second = math.comb(n + d - 3, n - 2) if n >= 2 else 0
    return first - second


def surface_area(d):
    """Surface measure of S^(d-1) (2, 2*pi, 4*pi for d = 1, 2, 3)."""
    return {1: 2.0, 2: 2.0 * math.pi, 3: 4.0 * math.pi}[d]


@dataclass(frozen=True)
class HarmonicIndex:
    """Degree/order pair (n, ell) with 1 <= ell <= a_n^d."""

    d: int
    n: int
    ell: int

    def __post_init__(self):
        dim = harmonic_dim(self.d, self.n)
        if dim == 0:
            raise ValueError(f"no degree-{self.n} harmonics exist for d={self.d}")
        if not 1 <= self.ell <= dim:
            raise ValueError(f"ell={self.ell} outside [1, {dim}] for (d={self.d}, n={self.n})")


@dataclass(frozen=True)
class SphereRule:
    """Quadrature on S^(d-1): unit-vector ``points`` (m, d) and ``weights``.

    Exact for products of harmonics up to the declared ``degree``; the
    weights sum to the surface area of the sphere.
    """

    d: int
    points: np.ndarray
    weights: np.ndarray
    degree: int

    def integrate(self, values):
        return np.tensordot(self.weights, values, axes=(0, -1)) if np.ndim(values) > 1 \
            else float(np.dot(self.weights, values))


def sphere_rule(d, degree):
    """Quadrature exact for products Y_ell^n Y_iota^m with n, m <= degree."""
    if d == 1:
        points = np.array([[-1.0], [1.0]])
        weights = np.array([1.0, 1.0])
        return SphereRule(1, points, weights, degree)
    if d == 2:
        m = 2 * degree + 1
        theta = 2.0 * math.pi * np.arange(m) / m
        points = np.column_stack([np.cos(theta), np.sin(theta)])
        weights = np.full(m, 2.0 * math.pi / m)
        return SphereRule(2, points, weights, degree)
    if d == 3:
        nt = degree + 1
        t, wt = np.polynomial.legendre.leggauss(nt)
        mphi = 2 * degree + 1
        phi = 2.0 * math.pi * np.arange(mphi) / mphi
        st = np.sqrt(1.0 - t ** 2)
        px = np.outer(st, np.cos(phi)).ravel()
        py = np.outer(st, np.sin(phi)).ravel()
        pz = np.repeat(t, mphi)
        points = np.column_stack([px, py, pz])
        weights = np.repeat(wt, mphi) * (2.0 * math.pi / mphi)
        return SphereRule(3, points, weights, degree)
    raise ValueError(f"unsupported dimension d={d}")


def _c3(n, l):
    # orthonormal constant for (sin theta)^l P_(n-l)^(l,l)(cos theta) {cos,sin}(l phi)
    if l == 0:
        return math.sqrt((2 * n + 1) / (4.0 * math.pi))
    log_c = 0.5 * (math.log(2 * n + 1) + math.lgamma(n + l + 1) + math.lgamma(n - l + 1)
                   - math.log(2.0 * math.pi)) - l * math.log(2.0) - math.lgamma(n + 1)
    return math.exp(log_c)


def sph_eval_angles(d, n, ell, theta, phi=None):
    """Orthonormal harmonic in angular coordinates.

    d = 2: ``theta`` is the polar angle on the circle.
    d = 3: ``theta`` in [0, pi], ``phi`` in [0, 2*pi).
    (d = 1 has no angles; use :func:`sph_eval`.)
    """
    HarmonicIndex(d, n, ell)
    if d == 2:
        theta = np.asarray(theta, dtype=float)
        if n == 0:
            return np.full_like(theta, 1.0 / math.sqrt(2.0 * math.pi))
        if ell == 1:
            return np.cos(n * theta) / math.sqrt(math.pi)
        return np.sin(n * theta) / math.sqrt(math.pi)
    if d == 3:
        theta = np.asarray(theta, dtype=float)
        phi = np.asarray(phi, dtype=float)
        ct, st = np.cos(theta), np.sin(theta)
        if ell == 1:
            return _c3(n, 0) * jacobi_eval(n, 0.0, 0.0, ct)
        l = ell // 2
        trig = np.cos(l * phi) if ell % 2 == 0 else np.sin(l * phi)
        return _c3(n, l) * st ** l * jacobi_eval(n - l, float(l), float(l), ct) * trig
    raise ValueError("sph_eval_angles supports d = 2, 3 only")


def sph_eval(idx, direction):
    """Orthonormal harmonic Y_ell^n at unit vector(s) ``direction``.

    ``direction`` has shape (d,) or (m, d); the radial factor r^n of the
    associated harmonic polynomial is applied by the basis modules.
    """
    d, n, ell = idx.d, idx.n, idx.ell
    pts = np.atleast_2d(np.asarray(direction, dtype=float))
    if pts.shape[1] != d:
        raise ValueError(f"direction must have {d} components")
    if d == 1:
        vals = (np.full(pts.shape[0], 1.0 / math.sqrt(2.0)) if n == 0
                else pts[:, 0] / math.sqrt(2.0))
    elif d == 2:
        vals = sph_eval_angles(2, n, ell, np.arctan2(pts[:, 1], pts[:, 0]))
    else:
        theta = np.arccos(np.clip(pts[:, 2], -1.0, 1.0))
        phi = np.arctan2(pts[:, 1], pts[:, 0])
        vals = sph_eval_angles(3, n, ell, theta, phi)
    return vals if np.ndim(direction) > 1 else float(vals[0])


def sph_table(d, nmax, points):
    """All orthonormal harmonics up to degree ``nmax`` at unit vectors.

    Returns ``(index, values)`` where ``index`` lists (n, ell) in canonical
    order and ``values[i]`` holds the i-th harmonic at every point.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    index, rows = [], []
    for n in range(nmax + 1):
        for ell in range(1, harmonic_dim(d, n) + 1):
            index.append((n, ell))
            rows.append(sph_eval(HarmonicIndex(d, n, ell), pts))
    return index, np.array(rows)
