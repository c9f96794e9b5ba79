"""Scalar special functions and quadrature rules.

Building blocks shared by every basis family: the generalised Laguerre
and Jacobi three-term recurrences, log-gamma / Pochhammer helpers with
sign tracking, the Kummer (1F1) and Gauss (2F1) hypergeometric functions
needed by the manufactured sources, and Gauss-Laguerre quadrature
(including the half-line radial rule obtained through rho = r^2).

All functions are pure and thread-safe; array arguments are broadcast
where that is natural.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln as _gammaln_arr

import scipy.linalg as _sla

from .linalg_blocks import EigenConvergenceError


def _tridiag_eigvals(diag, offdiag):
    # values-only path for quadrature nodes (skips the O(n^2) vectors)
    if diag.size == 1:
        return diag.copy()
    try:
        return _sla.eigh_tridiagonal(diag, offdiag, eigvals_only=True, check_finite=False)
    except _sla.LinAlgError as exc:
        raise EigenConvergenceError(str(exc)) from exc

__all__ = [
    "QuadratureRule",
    "ConvergenceError",
    "gamma_ln",
    "pochhammer",
    "log_pochhammer",
    "laguerre_eval",
    "laguerre_table",
    "enveloped_laguerre_table",
    "jacobi_eval",
    "kummer_1f1",
    "gauss_2f1",
    "gauss_laguerre_rule",
    "radial_rule",
]

#: convergence cap and tolerance for hypergeometric series
HYP_MAX_TERMS = 10_000
HYP_TOL = 1e-14
#: Pfaff-mapped 2F1 series converge like w^m with w = z/(z-1); for deeply
#: negative z the cap grows with 1/(1-w) up to this hard limit.
HYP_HARD_CAP = 500_000
#: below this z the 1F1 Kummer transform would overflow; switch to the
#: large-argument expansion instead.
_KUMMER_SWITCH = -600.0


class ConvergenceError(RuntimeError):
    """A hypergeometric series failed to meet tolerance within its cap."""


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes/weights of a 1D rule.

    ``kind`` is one of ``gauss-laguerre``, ``radial-gauss-laguerre``
    (the r = sqrt(rho) image of a Gauss-Laguerre rule), ``gauss-legendre``
    or ``periodic-trapezoid``.  ``exactness_degree`` is the largest
    polynomial degree integrated exactly (for the radial rule: degree as
    a polynomial in r^2).  Gaussian rules also carry ``log_weights``,
    which stay finite where the weights themselves underflow.
    """

    kind: str
    nodes: np.ndarray
    weights: np.ndarray
    exactness_degree: int
    alpha: float = None
    log_weights: np.ndarray = None

    def integrate(self, values):
        return float(np.dot(self.weights, values)) if np.ndim(values) == 1 \
            else np.tensordot(self.weights, values, axes=(0, 0))


def gamma_ln(x):
    """ln Gamma(x) for x > 0."""
    if np.any(np.asarray(x) <= 0.0):
        raise ValueError("gamma_ln requires x > 0")
    if np.isscalar(x):
        return math.lgamma(x)
    return _gammaln_arr(x)


def pochhammer(a, m):
    """Rising factorial (a)_m = a (a+1) ... (a+m-1); (a)_0 = 1.

    Defined for every real ``a`` (including zero and negative integers,
    where the product terminates at an exact zero).
    """
    if m < 0:
        raise ValueError("pochhammer requires m >= 0")
    out = 1.0
    for i in range(m):
        out *= a + i
    return out


def log_pochhammer(a, m):
    """``(log|.|, sign)`` of the rising factorial, overflow-safe in m."""
    if m < 0:
        raise ValueError("log_pochhammer requires m >= 0")
    log_abs, sign = 0.0, 1.0
    for i in range(m):
        f = a + i
        if f == 0.0:
            return -math.inf, 0.0
        log_abs += math.log(abs(f))
        if f < 0.0:
            sign = -sign
    return log_abs, sign


def laguerre_eval(k, alpha, z):
    """Generalised Laguerre polynomial L_k^(alpha)(z) by forward recurrence.

    ``alpha`` may be any real number, including the negative integers that
    appear in the one-dimensional Muntz space; orthogonality statements do
    not apply there but the recurrence remains a valid polynomial identity.
    """
    if k < 0:
        raise ValueError("laguerre_eval requires k >= 0")
    z = np.asarray(z, dtype=float)
    prev = np.ones_like(z)
    if k == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 + alpha - z
    for j in range(1, k):
        prev, cur = cur, ((2 * j + alpha + 1 - z) * cur - (j + alpha) * prev) / (j + 1)
    return cur if cur.ndim else float(cur)


def laguerre_table(kmax, alpha, z):
    """All L_k^(alpha)(z) for k = 0..kmax, shape ``(kmax+1,) + z.shape``."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    out = np.empty((kmax + 1,) + z.shape)
    out[0] = 1.0
    if kmax >= 1:
        out[1] = 1.0 + alpha - z
    for j in range(1, kmax):
        out[j + 1] = ((2 * j + alpha + 1 - z) * out[j] - (j + alpha) * out[j - 1]) / (j + 1)
    return out


def enveloped_laguerre_table(kmax, alpha, rho, prefactor):
    """Rows ``prefactor * sqrt(k!/Gamma(k+alpha+1)) L_k^(alpha)(rho)``.

    Requires alpha > -1.  The three-term recurrence runs on the
    normalized, pre-multiplied values, which stay O(1) when ``prefactor``
    carries the Gaussian envelope; this is the stable path for every
    basis evaluation and for quadrature weights.
    """
    if alpha <= -1.0:
        raise ValueError("enveloped_laguerre_table requires alpha > -1")
    rho = np.asarray(rho, dtype=float)
    out = np.empty((kmax + 1,) + rho.shape)
    out[0] = prefactor * math.exp(-0.5 * math.lgamma(alpha + 1.0))
    if kmax == 0:
        return out
    c = alpha + 1.0
    out[1] = (c - rho) * out[0] / math.sqrt(c)
    for k in range(1, kmax):
        a = math.sqrt((k + 1.0) * (k + c))
        b = 2.0 * k + c - rho
        cc = math.sqrt(k * (k + c - 1.0))
        out[k + 1] = (b * out[k] - cc * out[k - 1]) / a
    return out


def jacobi_eval(k, a, b, x):
    """Jacobi polynomial P_k^(a,b)(x) by the three-term recurrence."""
    if k < 0:
        raise ValueError("jacobi_eval requires k >= 0")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if k == 0:
        return prev if prev.ndim else float(prev)
    cur = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * x
    for n in range(2, k + 1):
        c1 = 2.0 * n * (n + a + b) * (2.0 * n + a + b - 2.0)
        c2 = (2.0 * n + a + b - 1.0) * (a * a - b * b)
        c3 = (2.0 * n + a + b - 1.0) * (2.0 * n + a + b) * (2.0 * n + a + b - 2.0)
        c4 = 2.0 * (n + a - 1.0) * (n + b - 1.0) * (2.0 * n + a + b)
        prev, cur = cur, ((c2 + c3 * x) * cur - c4 * prev) / c1
    return cur if cur.ndim else float(cur)


def _series(num, den, z, max_terms):
    """sum_m prod(num)_m / (prod(den)_m m!) z^m with term-ratio stopping."""
    total, term = 1.0, 1.0
    small = 0
    for m in range(max_terms):
        ratio = z / (m + 1.0)
        for p in num:
            ratio *= p + m
        for q in den:
            ratio /= q + m
        term *= ratio
        total += term
        if abs(term) <= HYP_TOL * abs(total):
            small += 1
            if small >= 2:
                return total
        else:
            small = 0
    raise ConvergenceError(
        f"hypergeometric series did not converge in {max_terms} terms (z={z})")


def _kummer_scalar(a, b, z):
    if z == 0.0:
        return 1.0
    if z > 0.0:
        return _series((a,), (b,), z, HYP_MAX_TERMS)
    if z >= _KUMMER_SWITCH:
        # Kummer transform: series argument positive, no cancellation
        return math.exp(z) * _series((b - a,), (b,), -z, HYP_MAX_TERMS)
    # deep negative argument: algebraic large-|z| expansion
    ba = b - a
    if abs(ba - round(ba)) < 1e-12 and round(ba) <= 0:
        raise ConvergenceError("1F1 expansion pole: b - a is a nonpositive integer")
    total, term = 1.0, 1.0
    prev = math.inf
    for m in range(60):
        term *= (a + m) * (1.0 + a - b + m) / ((m + 1.0) * (-z))
        if abs(term) >= prev:
            break
        total += term
        prev = abs(term)
        if abs(term) <= HYP_TOL * abs(total):
            break
    else:
        raise ConvergenceError("1F1 asymptotic expansion did not converge")
    # math.lgamma gives log|Gamma|; restore the sign of 1/Gamma(b-a)
    log_pref = math.lgamma(b) - math.lgamma(ba) - a * math.log(-z)
    return _gamma_sign(ba) * math.exp(log_pref) * total


def _gamma_sign(x):
    if x > 0:
        return 1.0
    # Gamma(x) sign alternates between the negative-integer poles
    return 1.0 if (math.floor(x) % 2 == 0) else -1.0


def kummer_1f1(a, b, z):
    """Confluent hypergeometric function 1F1(a; b; z).

    For z < 0 the Kummer transform 1F1(a;b;z) = e^z 1F1(b-a;b;-z) avoids
    cancellation; for very negative z the algebraic large-argument
    expansion takes over before e^{-z} overflows.
    """
    if abs(b - round(b)) < 1e-12 and round(b) <= 0:
        raise ValueError("kummer_1f1 requires b not a nonpositive integer")
    if np.isscalar(z):
        return _kummer_scalar(a, b, float(z))
    z = np.asarray(z, dtype=float)
    flat = z.reshape(-1)
    out = np.array([_kummer_scalar(a, b, float(v)) for v in flat])
    return out.reshape(z.shape)


def _gauss2f1_scalar(a, b, c, z):
    if z > 0.0:
        raise ValueError("gauss_2f1 is implemented for z <= 0 only")
    if z == 0.0:
        return 1.0
    # Pfaff transform maps z <= 0 into w in [0, 1)
    w = z / (z - 1.0)
    cap = HYP_MAX_TERMS
    if w > 0.99:
        cap = min(HYP_HARD_CAP, int(40.0 / (1.0 - w)) + 1000)
    return (1.0 - z) ** (-a) * _series((a, c - b), (c,), w, cap)


def gauss_2f1(a, b, c, z):
    """Gauss hypergeometric function 2F1(a, b; c; z) on the half line z <= 0.

    The Pfaff transform maps the argument into [0, 1) before summation.
    """
    if abs(c - round(c)) < 1e-12 and round(c) <= 0:
        raise ValueError("gauss_2f1 requires c not a nonpositive integer")
    if np.isscalar(z):
        return _gauss2f1_scalar(a, b, c, float(z))
    z = np.asarray(z, dtype=float)
    flat = z.reshape(-1)
    out = np.array([_gauss2f1_scalar(a, b, c, float(v)) for v in flat])
    return out.reshape(z.shape)


def gauss_laguerre_rule(size, alpha):
    """Gauss-Laguerre rule: sum w_i f(z_i) = int_0^inf f(z) z^alpha e^-z dz
    exactly for polynomials f of degree <= 2*size - 1.

    Nodes come from the Jacobi matrix (Golub-Welsch); weights are the
    Christoffel numbers w_i = 1 / sum_{k < size} Lhat_k(z_i)^2 over the
    orthonormal Laguerre polynomials, evaluated with the Gaussian
    envelope so the far-tail weights keep full relative accuracy (the
    eigenvector route loses them entirely).
    """
    if size < 1:
        raise ValueError("gauss_laguerre_rule requires size >= 1")
    if alpha <= -1.0:
        raise ValueError("gauss_laguerre_rule requires alpha > -1")
    diag = 2.0 * np.arange(size) + alpha + 1.0
    i = np.arange(1, size)
    offdiag = np.sqrt(i * (i + alpha))
    try:
        nodes = _tridiag_eigvals(diag, offdiag)
    except EigenConvergenceError as exc:  # pragma: no cover - LAPACK is robust here
        raise EigenConvergenceError(f"Golub-Welsch failed: {exc}") from exc
    lhat_env = enveloped_laguerre_table(size - 1, alpha, nodes, np.exp(-0.5 * nodes))
    with np.errstate(divide="ignore"):
        log_w = -nodes - np.log(np.sum(lhat_env ** 2, axis=0))
    for i in np.nonzero(~np.isfinite(log_w))[0]:
        # envelope underflowed at a far-tail node; redo with rescaling
        log_w[i] = -nodes[i] - _christoffel_log_sum(alpha, nodes[i], size)
    weights = np.exp(log_w)
    return QuadratureRule("gauss-laguerre", nodes, weights, 2 * size - 1, alpha, log_w)


def _christoffel_log_sum(alpha, x, size):
    """log sum_{k < size} Lhat_k(x)^2 with Lhat = e^{-x/2} * orthonormal
    Laguerre, computed with running rescaling (far-tail nodes only)."""
    c = alpha + 1.0
    prev, cur = 0.0, 1.0
    scale = -0.5 * x - 0.5 * math.lgamma(c)  # values held as v * e^scale
    total_log = 2.0 * scale
    for k in range(size - 1):
        if k == 0:
            nxt = (c - x) * cur / math.sqrt(c)
        else:
            a = math.sqrt((k + 1.0) * (k + c))
            nxt = ((2.0 * k + c - x) * cur - math.sqrt(k * (k + c - 1.0)) * prev) / a
        prev, cur = cur, nxt
        mag = max(abs(prev), abs(cur))
        if mag > 1e200 or (0.0 < mag < 1e-200):
            shift = math.log(mag)
            prev *= math.exp(-shift)
            cur *= math.exp(-shift)
            scale += shift
        if cur != 0.0:
            total_log = float(np.logaddexp(total_log, 2.0 * (math.log(abs(cur)) + scale)))
    return total_log


def radial_rule(d, n, mu, size):
    """Half-line radial rule for the weight r^(2*mu + 2*n + d - 1) e^{-r^2}.

    sum w_i g(r_i) equals int_0^inf g(r) r^(2 mu + 2 n + d - 1) e^{-r^2} dr
    exactly whenever g is a polynomial in r^2 of degree <= 2*size - 1.
    Built from the Gauss-Laguerre rule with alpha = n + (d-2)/2 + mu via
    r = sqrt(rho) and weight halving.
    """
    alpha = n + 0.5 * (d - 2) + mu
    if alpha <= -1.0:
        raise ValueError("radial_rule requires n + (d-2)/2 + mu > -1")
    base = gauss_laguerre_rule(size, alpha)
    return QuadratureRule("radial-gauss-laguerre", np.sqrt(base.nodes),
                          0.5 * base.weights, base.exactness_degree, alpha,
                          base.log_weights - math.log(2.0))
