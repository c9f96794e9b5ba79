"""Dense linear algebra on the small per-harmonic blocks.

Every operator in this package is block diagonal over the harmonic index
(n, ell); each block is a dense symmetric (or Hermitian) matrix over the
radial index k of at most a few hundred rows.  This module wraps the
LAPACK routines used on those blocks: Cholesky solves, a symmetric
tridiagonal eigensolver (which also backs the Golub-Welsch quadrature
construction), the generalized symmetric-definite eigensolver, and a
complex LU solve for the time stepper.
"""

import re
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla


class NotPositiveDefiniteError(np.linalg.LinAlgError):
    """Cholesky factorization hit a nonpositive pivot."""

    def __init__(self, pivot, message=None):
        self.pivot = pivot
        super().__init__(message or f"matrix is not positive definite (pivot {pivot})")


class SingularBlockError(np.linalg.LinAlgError):
    """LU factorization of a block produced an exactly singular factor."""


class EigenConvergenceError(np.linalg.LinAlgError):
    """Eigensolver failed to converge."""


@dataclass
class BlockDiagOperator:
    """Operator block diagonal over (n, ell).

    Parameters
    ----------
    layout : list of (n, ell, size)
        One entry per block, in the canonical (n outer, ell inner) order.
    blocks : list of ndarray
        Dense blocks matching ``layout``; each must be symmetric
        (Hermitian if complex) to 1e-13 relative.
    """

    layout: list
    blocks: list = field(repr=False)

    def __post_init__(self):
        if len(self.layout) != len(self.blocks):
            raise ValueError("layout and blocks length mismatch")
        for (n, ell, size), block in zip(self.layout, self.blocks):
            block = np.asarray(block)
            if block.shape != (size, size):
                raise ValueError(f"block ({n},{ell}) shape {block.shape} != ({size},{size})")
            scale = max(np.abs(block).max(), 1.0)
            if np.abs(block - block.conj().T).max() > 1e-13 * scale:
                raise ValueError(f"block ({n},{ell}) is not symmetric/Hermitian")

    @property
    def total_size(self):
        return sum(size for _, _, size in self.layout)

    def offsets(self):
        """Start offset of each block in the flattened coefficient vector."""
        offs, pos = [], 0
        for _, _, size in self.layout:
            offs.append(pos)
            pos += size
        return offs

    def matvec(self, x):
        x = np.asarray(x)
        out = np.empty_like(x, dtype=np.result_type(x, *[b.dtype for b in self.blocks]))
        pos = 0
        for (_, _, size), block in zip(self.layout, self.blocks):
            out[pos:pos + size] = block @ x[pos:pos + size]
            pos += size
        return out


def cholesky_solve(block, rhs):
    """Solve ``block @ x = rhs`` for an SPD block via Cholesky.

    Complex right-hand sides are solved component-wise against the real
    factor.  Raises :class:`NotPositiveDefiniteError` with the failing
    pivot index when the block is not SPD.
    """
    block = np.asarray(block, dtype=float)
    try:
        factor = sla.cho_factor(block, check_finite=False)
    except sla.LinAlgError as exc:
        pivot = getattr(exc, "info", None)
        if pivot is None:  # scipy reports the pivot in the message only
            match = re.search(r"(\d+)", str(exc))
            pivot = int(match.group(1)) if match else -1
        raise NotPositiveDefiniteError(pivot, str(exc)) from exc
    rhs = np.asarray(rhs)
    if np.iscomplexobj(rhs):
        return (sla.cho_solve(factor, rhs.real, check_finite=False)
                + 1j * sla.cho_solve(factor, rhs.imag, check_finite=False))
    return sla.cho_solve(factor, rhs, check_finite=False)


def symtridiag_eig(diag, offdiag):
    """Eigendecomposition of a real symmetric tridiagonal matrix.

    Returns ``(values, vectors)`` with eigenvalues ascending and
    ``vectors[:, i]`` the i-th orthonormal eigenvector.
    """
    diag = np.asarray(diag, dtype=float)
    offdiag = np.asarray(offdiag, dtype=float)
    if offdiag.shape != (max(diag.size - 1, 0),):
        raise ValueError("offdiag must have length len(diag) - 1")
    if diag.size == 1:
        return diag.copy(), np.ones((1, 1))
    try:
        values, vectors = sla.eigh_tridiagonal(diag, offdiag, check_finite=False)
    except sla.LinAlgError as exc:
        raise EigenConvergenceError(str(exc)) from exc
    return values, vectors


def _fix_signs(vectors):
    # deterministic output: first component of significant size made positive
    for i in range(vectors.shape[1]):
        col = vectors[:, i]
        idx = np.argmax(np.abs(col) > 1e-12 * np.abs(col).max())
        if col[idx] < 0:
            vectors[:, i] = -col
    return vectors


def generalized_eig_smallest(S, M, count, shift=0.0):
    """Smallest ``count`` eigenpairs of ``S u = lambda M u`` with M SPD.

    ``S`` may be indefinite.  When ``shift`` is nonzero the equivalent
    problem ``(S + shift*M) u = (lambda + shift) M u`` is solved instead,
    which lets callers exploit a diagonal ``S + shift*M``.
    Returns ``(values, vectors)`` ascending, eigenvector signs normalized
    so the first significant component is positive.
    """
    S = np.asarray(S, dtype=float)
    M = np.asarray(M, dtype=float)
    n = S.shape[0]
    count = min(count, n)
    try:
        sla.cho_factor(M, check_finite=False)
    except sla.LinAlgError as exc:
        raise NotPositiveDefiniteError(getattr(exc, "info", -1), f"M is not SPD: {exc}") from exc
    A = S + shift * M if shift else S
    try:
        values, vectors = sla.eigh(A, M, subset_by_index=[0, count - 1], check_finite=False)
    except sla.LinAlgError as exc:
        raise EigenConvergenceError(str(exc)) from exc
    return values - shift, _fix_signs(vectors)


def complex_block_solve(A, rhs):
    """Solve a complex (or real) square block by LU with partial pivoting."""
    A = np.asarray(A)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", sla.LinAlgWarning)
            lu, piv = sla.lu_factor(A, check_finite=False)
    except sla.LinAlgError as exc:
        raise SingularBlockError(str(exc)) from exc
    if not np.all(np.isfinite(lu)) or np.any(np.diag(lu) == 0.0):
        raise SingularBlockError("exactly singular block")
    return sla.lu_solve((lu, piv), np.asarray(rhs), check_finite=False)
