"""Generalised Hermite polynomials and functions on R^d, d = 1, 2, 3.

The polynomial family combines a generalised Laguerre factor in r^2 with a
spherical harmonic,

    H_{k,ell}^{mu,n}(x) = r^n L_k^{(n + (d-2)/2 + mu)}(r^2) Y_ell^n(x/r),

orthogonal under |x|^{2 mu} e^{-|x|^2}; the enveloped, normalized functions

    Hhat_{k,ell}^{mu,n}(x) = gamma_{k,n}^{-1/2} e^{-|x|^2 / 2} H_{k,ell}^{mu,n}(x)

are orthonormal under |x|^{2 mu}.  The adjoint family applies alternating
signs to the connection coefficients that expand Hhat^{mu} in Hhat^{0}; the
two families are exchanged by the Fourier transform, which makes the
adjoint functions orthonormal in the H^s energy inner product and is the
basis of the fractional-Laplacian solver.

This module also carries the one-dimensional specialization (the classical
Szego family), the parity-aware modified derivative acting on its
coefficient expansions, 1D projections, and a grid Fourier transform used
as a numerical cross-check of the adjoint-pair identities.
"""

import csv
import os
import io
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .harmonics import HarmonicIndex, harmonic_dim, sph_eval, sph_table  # noqa: F401
from .specfun import enveloped_laguerre_table, laguerre_eval, log_pochhammer, radial_rule

__all__ = [
    "FAMILIES",
    "BasisSpec",
    "BasisIndex",
    "Truncation",
    "SpectralField",
    "ConnectionMatrix",
    "GhpSeries",
    "ResolutionWarning",
    "gamma_norm",
    "ghp_eval",
    "ghf_eval",
    "ghf_radial_eval",
    "ghf_radial",
    "aghf_eval",
    "aghf_radial",
    "connection_coeffs",
    "connection_matrix",
    "signed_connection",
    "numeric_fourier",
    "fourier_axis",
    "modified_derivative",
    "project_1d",
    "szego_gamma",
    "szego_h_table",
    "szego_ghf_table",
    "szego_ghp_table",
]

FAMILIES = ("ghf", "aghf", "muntz")


class ResolutionWarning(RuntimeWarning):
    """The sampling grid does not resolve the function being transformed."""


@dataclass(frozen=True)
class BasisSpec:
    """Which family, dimension, parameter and scaling a field lives in.

    ``param`` is mu for the plain family, s for the adjoint family and
    theta for the Muntz family.
    """

    family: str
    d: int
    param: float
    kappa: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.d not in (1, 2, 3):
            raise ValueError(f"unsupported dimension d={self.d}")
        if self.kappa <= 0.0:
            raise ValueError("kappa must be positive")
        if self.family in ("ghf", "aghf") and self.param <= -0.5:
            raise ValueError("ghf/aghf require param > -1/2")
        if self.family == "muntz" and self.param <= 0.0:
            raise ValueError("muntz requires theta > 0")


@dataclass(frozen=True)
class BasisIndex:
    """Radial degree k plus harmonic pair (ell, n)."""

    k: int
    ell: int
    n: int

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("radial degree k must be >= 0")


@dataclass(frozen=True)
class Truncation:
    """Truncation rule: rectangular (k <= K, n <= N) or triangular (2k + n <= N)."""

    kind: str
    N: int
    K: int = None

    def __post_init__(self):
        if self.kind not in ("rectangular", "triangular"):
            raise ValueError(f"unknown truncation kind {self.kind!r}")
        if self.kind == "rectangular" and (self.K is None or self.K < 0):
            raise ValueError("rectangular truncation needs K >= 0")
        if self.N < 0:
            raise ValueError("N must be >= 0")

    def kmax(self, n):
        if self.kind == "rectangular":
            return self.K
        return (self.N - n) // 2

    def blocks(self, d):
        """Canonical block layout [(n, ell, size), ...], n outer, ell inner."""
        out = []
        for n in range(self.N + 1):
            kmax = self.kmax(n)
            if kmax < 0:
                continue
            for ell in range(1, harmonic_dim(d, n) + 1):
                out.append((n, ell, kmax + 1))
        return out

    def size(self, d):
        return sum(size for _, _, size in self.blocks(d))


class SpectralField:
    """Coefficient vector over a truncated basis, in canonical order.

    Coefficients are stored flat with n outermost, then ell, then the
    radial index k.  Values may be real or complex.
    """

    def __init__(self, spec, truncation, coeffs=None):
        self.spec = spec
        self.truncation = truncation
        self._blocks = truncation.blocks(spec.d)
        self._offsets = {}
        pos = 0
        for n, ell, size in self._blocks:
            self._offsets[(n, ell)] = (pos, size)
            pos += size
        if coeffs is None:
            coeffs = np.zeros(pos)
        coeffs = np.asarray(coeffs)
        if coeffs.shape != (pos,):
            raise ValueError(f"expected {pos} coefficients, got {coeffs.shape}")
        self.coeffs = coeffs

    def block(self, n, ell):
        pos, size = self._offsets[(n, ell)]
        return self.coeffs[pos:pos + size]

    def blocks(self):
        return list(self._blocks)

    def copy(self):
        return SpectralField(self.spec, self.truncation, self.coeffs.copy())

    def evaluate(self, points):
        """Sum the expansion at physical points, shape (m, d) or (d,)."""
        if self.spec.family == "muntz":
            from . import muntz_basis
            return muntz_basis.evaluate_muntz_field(self, points)
        pts = np.atleast_2d(np.asarray(points, dtype=float)) * self.spec.kappa
        r = np.linalg.norm(pts, axis=1)
        dirs = np.where(r[:, None] > 0.0, pts / np.where(r[:, None] == 0.0, 1.0, r[:, None]),
                        np.eye(self.spec.d)[0])
        out = np.zeros(pts.shape[0], dtype=self.coeffs.dtype)
        for n in range(self.truncation.N + 1):
            kmax = self.truncation.kmax(n)
            if kmax < 0 or harmonic_dim(self.spec.d, n) == 0:
                continue
            if self.spec.family == "aghf":
                radial = aghf_radial(self.spec.param, self.spec.d, n, kmax, r)
            else:
                radial = ghf_radial(self.spec.param, self.spec.d, n, kmax, r)
            for ell in range(1, harmonic_dim(self.spec.d, n) + 1):
                c = self.block(n, ell)
                if not np.any(c):
                    continue
                y = sph_eval(HarmonicIndex(self.spec.d, n, ell), dirs)
                out += (c @ radial) * y
        return out if np.ndim(points) > 1 else out[0]

    def to_csv(self, fh):
        """Flat CSV record: one header line of metadata, then n,ell,k,re,im rows."""
        close = False
        if isinstance(fh, (str, bytes, os.PathLike)):
            fh = open(fh, "w", newline="")
            close = True
        try:
            writer = csv.writer(fh, lineterminator="\n")
            tr = self.truncation
            writer.writerow(["family", "d", "param", "kappa", "trunc", "N", "K"])
            writer.writerow([self.spec.family, self.spec.d, repr(self.spec.param),
                             repr(self.spec.kappa), tr.kind, tr.N,
                             "" if tr.K is None else tr.K])
            writer.writerow(["n", "ell", "k", "re", "im"])
            for n, ell, size in self._blocks:
                block = self.block(n, ell)
                for k in range(size):
                    v = complex(block[k])
                    writer.writerow([n, ell, k, repr(v.real), repr(v.imag)])
        finally:
            if close:
                fh.close()

    @classmethod
    def from_csv(cls, fh):
        close = False
        if isinstance(fh, (str, bytes, os.PathLike)):
            fh = open(fh, newline="")
            close = True
        try:
            reader = csv.reader(fh)
            header = next(reader)
            while header and header[0].startswith("#"):
                header = next(reader)
            if header[:4] != ["family", "d", "param", "kappa"]:
                raise ValueError("not a SpectralField CSV record")
            meta = next(reader)
            spec = BasisSpec(meta[0], int(meta[1]), float(meta[2]), float(meta[3]))
            trunc = Truncation(meta[4], int(meta[5]), int(meta[6]) if meta[6] else None)
            next(reader)  # column header
            fld = cls(spec, trunc, np.zeros(trunc.size(spec.d), dtype=complex))
            for row in reader:
                n, ell, k = int(row[0]), int(row[1]), int(row[2])
                fld.block(n, ell)[k] = float(row[3]) + 1j * float(row[4])
            if np.allclose(fld.coeffs.imag, 0.0):
                fld.coeffs = fld.coeffs.real.copy()
            return fld
        finally:
            if close:
                fh.close()


@dataclass(frozen=True)
class ConnectionMatrix:
    """Lower-triangular change of basis between parameters mu and nu."""

    mu: float
    nu: float
    n: int
    d: int
    mat: np.ndarray = field(repr=False)

    def __getitem__(self, kj):
        return self.mat[kj]


def gamma_norm(spec, k, n):
    """Normalization gamma_{k,n} = Gamma(k + n + d/2 + mu) / (2 k!)."""
    return _gamma_norm(spec.param, spec.d, k, n)


def _gamma_norm(mu, d, k, n):
    if mu <= -0.5:
        raise ValueError("gamma_norm requires mu > -1/2")
    return math.exp(math.lgamma(k + n + 0.5 * d + mu) - math.lgamma(k + 1)) / 2.0


def ghf_radial(mu, d, n, kmax, r):
    """Radial parts of the orthonormal functions for k = 0..kmax.

    Includes the r^n factor and the Gaussian envelope, so rows are
    O(1) uniformly in k and r.
    """
    r = np.asarray(r, dtype=float)
    alpha = n + 0.5 * (d - 2) + mu
    rho = r * r
    pref = math.sqrt(2.0) * r ** n * np.exp(-0.5 * rho)
    return enveloped_laguerre_table(kmax, alpha, rho, pref)


def ghp_eval(spec, idx, x):
    """Polynomial-family value H_{k,ell}^{mu,n} at point(s) x."""
    mu, d = spec.param, spec.d
    if mu <= -0.5:
        raise ValueError("ghp_eval requires mu > -1/2")
    HarmonicIndex(d, idx.n, idx.ell)
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    r = np.linalg.norm(pts, axis=1)
    safe = np.where(r[:, None] == 0.0, 1.0, r[:, None])
    dirs = np.where(r[:, None] > 0.0, pts / safe, np.eye(d)[0])
    vals = r ** idx.n * laguerre_eval(idx.k, idx.n + 0.5 * (d - 2) + mu, r * r) \
        * sph_eval(HarmonicIndex(d, idx.n, idx.ell), dirs)
    return vals if np.ndim(x) > 1 else float(vals[0])


def ghf_eval(spec, idx, x):
    """Orthonormal-function value Hhat_{k,ell}^{mu,n} at point(s) x."""
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    r = np.linalg.norm(pts, axis=1)
    safe = np.where(r[:, None] == 0.0, 1.0, r[:, None])
    dirs = np.where(r[:, None] > 0.0, pts / safe, np.eye(spec.d)[0])
    radial = ghf_radial(spec.param, spec.d, idx.n, idx.k, r)[idx.k]
    vals = radial * sph_eval(HarmonicIndex(spec.d, idx.n, idx.ell), dirs)
    return vals if np.ndim(x) > 1 else float(vals[0])


def ghf_radial_eval(spec, k, n, r):
    """Radial factor of the orthonormal function (r^n envelope included)."""
    return ghf_radial(spec.param, spec.d, n, k, np.asarray(r, dtype=float))[k]


def connection_matrix(mu, nu, n, d, kmax):
    """Lower-triangular ndarray C with Hhat^{mu}_k = sum_j C[k, j] Hhat^{nu}_j.

    C[k, j] = (mu - nu)_{k-j} / (k-j)! *
              sqrt(k! Gamma(j + n + d/2 + nu) / (j! Gamma(k + n + d/2 + mu)))

    computed in log space with sign tracking; mu = nu gives the identity.
    """
    if mu <= -0.5 or nu <= -0.5:
        raise ValueError("connection coefficients require mu, nu > -1/2")
    delta = mu - nu
    ks = np.arange(kmax + 1)
    lg_fact = np.array([math.lgamma(k + 1.0) for k in ks])
    lg_mu = np.array([math.lgamma(k + n + 0.5 * d + mu) for k in ks])
    lg_nu = np.array([math.lgamma(k + n + 0.5 * d + nu) for k in ks])
    lp = np.empty(kmax + 1)
    sg = np.empty(kmax + 1)
    for m in range(kmax + 1):
        lp[m], sg[m] = log_pochhammer(delta, m)
    mat = np.zeros((kmax + 1, kmax + 1))
    for k in range(kmax + 1):
        j = np.arange(k + 1)
        m = k - j
        log_val = lp[m] - lg_fact[m] + 0.5 * (lg_fact[k] + lg_nu[j] - lg_fact[j] - lg_mu[k])
        mat[k, :k + 1] = sg[m] * np.exp(log_val)
    return mat


def connection_coeffs(mu, nu, n, d, kmax):
    """Connection coefficients as a :class:`ConnectionMatrix`."""
    return ConnectionMatrix(mu, nu, n, d, connection_matrix(mu, nu, n, d, kmax))


def signed_connection(s, d, n, kmax):
    """B[k, j] = (-1)^(k-j) C[k, j] with C the (s -> 0) connection matrix.

    Rows expand the adjoint functions in the mu = 0 orthonormal family.
    """
    mat = connection_matrix(s, 0.0, n, d, kmax)
    signs = (-1.0) ** np.abs(np.subtract.outer(np.arange(kmax + 1), np.arange(kmax + 1)))
    return mat * signs


def aghf_radial(s, d, n, kmax, r):
    """Radial parts of the adjoint family for k = 0..kmax."""
    return signed_connection(s, d, n, kmax) @ ghf_radial(0.0, d, n, kmax, r)


def aghf_eval(spec, idx, x):
    """Adjoint-family value Hcheck_{k,ell}^{mu,n} at point(s) x."""
    if spec.family != "aghf":
        raise ValueError("aghf_eval requires an adjoint-family spec")
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    r = np.linalg.norm(pts, axis=1)
    safe = np.where(r[:, None] == 0.0, 1.0, r[:, None])
    dirs = np.where(r[:, None] > 0.0, pts / safe, np.eye(spec.d)[0])
    radial = aghf_radial(spec.param, spec.d, idx.n, idx.k, r)[idx.k]
    vals = radial * sph_eval(HarmonicIndex(spec.d, idx.n, idx.ell), dirs)
    return vals if np.ndim(x) > 1 else float(vals[0])


# ---------------------------------------------------------------------------
# grid Fourier transform
# ---------------------------------------------------------------------------

def fourier_axis(extent=12.0, step=0.05):
    """Uniform sampling axis x_j = -extent + j*step covering [-extent, extent)."""
    m = int(round(2.0 * extent / step))
    return -extent + step * np.arange(m)


def numeric_fourier(values, extent=12.0, step=0.05, tail_tol=1e-12):
    """Trapezoid-rule Fourier transform of samples on a uniform d-dim grid.

    ``values`` holds samples at the tensor grid built from
    :func:`fourier_axis`; the convention is
    F[u](xi) = (2*pi)^(-d/2) \\int u(x) e^{-i <xi, x>} dx.
    Returns ``(xi, transform)`` with ``xi`` the 1D dual axis (ascending,
    shared by all dimensions).  Emits :class:`ResolutionWarning` when the
    samples on the grid boundary exceed ``tail_tol``.
    """
    values = np.asarray(values)
    d = values.ndim
    m = values.shape[0]
    if any(s != m for s in values.shape):
        raise ValueError("numeric_fourier expects a cubic grid")
    boundary = max(np.abs(np.take(values, [0, -1], axis=ax)).max() for ax in range(d))
    if boundary > tail_tol:
        warnings.warn(
            f"grid boundary value {boundary:.2e} exceeds {tail_tol:.0e}; "
            "enlarge the extent", ResolutionWarning, stacklevel=2)
    xi = 2.0 * math.pi * np.fft.fftfreq(m, d=step)
    out = np.fft.fftn(values)
    # phase for the offset x_0 = -extent on each axis
    phase = np.exp(1j * xi * extent)
    for ax in range(d):
        shape = [1] * d
        shape[ax] = m
        out = out * phase.reshape(shape)
    out *= step ** d / (2.0 * math.pi) ** (0.5 * d)
    shift = np.fft.fftshift
    return shift(xi), shift(out)


# ---------------------------------------------------------------------------
# one-dimensional Szego family
# ---------------------------------------------------------------------------

def szego_gamma(mu, n):
    """Norm^2 of the degree-n Szego polynomial: 2^{2n} [n/2]! Gamma([(n+1)/2] + mu + 1/2)."""
    return math.exp(2 * n * math.log(2.0) + math.lgamma(n // 2 + 1)
                    + math.lgamma((n + 1) // 2 + mu + 0.5))


def szego_h_table(mu, nmax, x):
    """Raw Szego polynomials H_n^{(mu)}(x), n = 0..nmax (unnormalized).

    Three-term recurrence H_{n+1} = 2 x H_n - 2 (n + theta_n) H_{n-1} with
    theta_n = 0 for even n and 2*mu for odd n.  Values grow rapidly; use the
    normalized tables for large degrees.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty((nmax + 1,) + x.shape)
    out[0] = 1.0
    if nmax >= 1:
        out[1] = 2.0 * x
    for n in range(1, nmax):
        theta = 2.0 * mu if n % 2 else 0.0
        out[n + 1] = 2.0 * x * out[n] - 2.0 * (n + theta) * out[n - 1]
    return out


def _szego_parity_tables(mu, nmax, x, envelope):
    # normalized even/odd Laguerre forms; the sign (-1)^k restores the
    # Szego orientation (leading coefficient 2^n > 0)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    rho = x * x
    out = np.empty((nmax + 1,) + x.shape)
    kev = nmax // 2
    kod = (nmax - 1) // 2
    env = np.exp(-0.5 * rho) if envelope else np.ones_like(x)
    ev = enveloped_laguerre_table(kev, mu - 0.5, rho, env)
    signs = (-1.0) ** np.arange(kev + 1)
    out[0::2] = ev * signs[:, None]
    if nmax >= 1:
        od = enveloped_laguerre_table(kod, mu + 0.5, rho, env * x)
        signs = (-1.0) ** np.arange(kod + 1)
        out[1::2] = od * signs[:, None]
    return out


def szego_ghf_table(mu, nmax, x):
    """Orthonormal Szego functions Hhat_n^{(mu)}(x) = H_n^{(mu)} e^{-x^2/2} / sqrt(gamma_n)."""
    return _szego_parity_tables(mu, nmax, x, envelope=True)


def szego_ghp_table(mu, nmax, x):
    """Orthonormal Szego polynomials H_n^{(mu)}(x) / sqrt(gamma_n) (no envelope)."""
    return _szego_parity_tables(mu, nmax, x, envelope=False)


@dataclass
class GhpSeries:
    """Finite expansion sum_m coeff[m] H_m^{(mu)} in the raw Szego basis."""

    mu: float
    coeff: np.ndarray

    def __post_init__(self):
        self.coeff = np.asarray(self.coeff, dtype=float)

    def __call__(self, x):
        table = szego_h_table(self.mu, len(self.coeff) - 1, x)
        vals = self.coeff @ table
        return vals if np.ndim(x) else float(vals[0] if vals.ndim else vals)


def modified_derivative(series, order):
    """Apply the parity-aware derivative ``order`` times to a Szego expansion.

    The operator differentiates the even part directly and divides the odd
    part by 2x before differentiating; iterated, it maps

        H_{2k}^{(mu)}   -> 4^m k!/(k-m)! H_{2k-2m+1}^{(mu+m-1)},
        H_{2k+1}^{(mu)} -> 4^m k!/(k-m)! H_{2k-2m+1}^{(mu+m)},

    with terms k < m annihilated.  Returns the pair
    ``(even_image, odd_image)``; their sum is the derivative of the full
    expansion.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    m = order
    coeff = np.asarray(series.coeff, dtype=float)
    nmax = len(coeff) - 1

    def _image(src_parity):
        out = {}
        for idx in range(src_parity, nmax + 1, 2):
            k = idx // 2
            c = coeff[idx]
            if c == 0.0 or k < m:
                continue
            factor = 4.0 ** m
            for i in range(m):
                factor *= (k - i)
            out[2 * k - 2 * m + 1] = out.get(2 * k - 2 * m + 1, 0.0) + c * factor
        if not out:
            return np.zeros(1)
        arr = np.zeros(max(out) + 1)
        for deg, val in out.items():
            arr[deg] = val
        return arr

    return (GhpSeries(series.mu + m - 1, _image(0)),
            GhpSeries(series.mu + m, _image(1)))


def project_1d(f, mu, N, weighted=True, quad_size=None, weight_power=0.0):
    """Orthogonal projection coefficients of a 1D function, degrees 0..N.

    ``weighted=True`` projects in L^2_{|x|^{2 mu}} onto the enveloped space
    (coefficients against the orthonormal Szego functions); ``weighted=False``
    projects in L^2_{|x|^{2 mu} e^{-x^2}} onto polynomials (coefficients
    against the orthonormal Szego polynomials).  ``f`` must accept an
    ndarray of points.  The rho-variable Gauss rule must have at least
    N + 1 points.

    A nonzero ``weight_power`` w treats ``f`` as the smooth factor of
    |x|^{2 w} f(x), moving the power into the quadrature weight so that
    origin singularities are integrated exactly.
    """
    if quad_size is None:
        quad_size = N + 16
    if quad_size < N + 1:
        raise ValueError("quad_size must be at least N + 1")
    coeffs = np.zeros(N + 1)
    kev = N // 2
    kod = (N - 1) // 2
    # even part against even basis members
    rule = radial_rule(1, 0, mu + weight_power, quad_size)
    r = rule.nodes
    fe = 0.5 * (np.asarray(f(r)) + np.asarray(f(-r)))
    if weighted:
        fe = fe * np.exp(0.5 * r * r)
    table = enveloped_laguerre_table(kev, mu - 0.5, r * r, np.ones_like(r))
    signs = (-1.0) ** np.arange(kev + 1)
    coeffs[0::2] = 2.0 * signs * (table @ (rule.weights * fe))
    if N >= 1:
        rule = radial_rule(1, 1, mu + weight_power, quad_size)
        r = rule.nodes
        fo = 0.5 * (np.asarray(f(r)) - np.asarray(f(-r)))
        if weighted:
            fo = fo * np.exp(0.5 * r * r)
        table = enveloped_laguerre_table(kod, mu + 0.5, r * r, np.ones_like(r))
        signs = (-1.0) ** np.arange(kod + 1)
        coeffs[1::2] = 2.0 * signs * (table @ (rule.weights * fo / r))
    return coeffs
