"""
Cyclic Jacobi eigenvalues for small Hermitian matrices.

A Hermitian H = X + iY is diagonalized through its real symmetric embedding
[[X, -Y], [Y, X]], whose spectrum is the spectrum of H with every eigenvalue
doubled. Stacks of matrices are rotated together: every sweep visits the
pairs (p, q) in the same order for the whole batch.
"""

import logging

import numpy as np

from config.constants import ERROR_MATRIX_SIZE, JACOBI_MAX_SWEEPS, JACOBI_TOLERANCE

logger = logging.getLogger(__name__)


def _embed(H: np.ndarray) -> np.ndarray:
    X, Y = H.real, H.imag
    top = np.concatenate([X, -Y], axis=-1)
    bottom = np.concatenate([Y, X], axis=-1)
    return np.concatenate([top, bottom], axis=-2)


def _off_diagonal(A: np.ndarray) -> np.ndarray:
    diag = np.diagonal(A, axis1=-2, axis2=-1)
    return np.sqrt(np.maximum(np.sum(A * A, axis=(-2, -1)) - np.sum(diag * diag, axis=-1), 0.0))


def jacobi_eigvalsh(A: np.ndarray, tol: float = JACOBI_TOLERANCE) -> np.ndarray:
    """
    Eigenvalues of real symmetric matrices, ascending.

    Args:
        A: (..., n, n) real symmetric stack
        tol: stop once the off-diagonal Frobenius mass is below tol times the
            Frobenius norm, for every matrix of the stack

    Returns:
        np.ndarray: (..., n) sorted eigenvalues
    """
    A = np.array(A, dtype=float)
    if A.ndim < 2 or A.shape[-1] != A.shape[-2]:
        raise ValueError(f"{ERROR_MATRIX_SIZE}: expected square matrices, got shape {A.shape}")
    batch_shape = A.shape[:-2]
    n = A.shape[-1]
    A = A.reshape((-1, n, n))
    scale = np.sqrt(np.sum(A * A, axis=(-2, -1)))

    for _ in range(JACOBI_MAX_SWEEPS):
        if np.all(_off_diagonal(A) <= tol * scale):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[:, p, q]
                active = apq != 0
                if not active.any():
                    continue
                app, aqq = A[:, p, p], A[:, q, q]
                theta = np.divide(aqq - app, 2.0 * apq, out=np.zeros_like(apq), where=active)
                sign = np.where(theta >= 0, 1.0, -1.0)
                t = np.where(active, sign / (np.abs(theta) + np.hypot(theta, 1.0)), 0.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rp, rq = A[:, p, :].copy(), A[:, q, :].copy()
                A[:, p, :] = c[:, None] * rp - s[:, None] * rq
                A[:, q, :] = s[:, None] * rp + c[:, None] * rq
                cp, cq = A[:, :, p].copy(), A[:, :, q].copy()
                A[:, :, p] = c[:, None] * cp - s[:, None] * cq
                A[:, :, q] = s[:, None] * cp + c[:, None] * cq
    else:
        logger.warning("Jacobi iteration stopped after %d sweeps above tolerance %g", JACOBI_MAX_SWEEPS, tol)

    values = np.sort(np.diagonal(A, axis1=-2, axis2=-1), axis=-1)
    return values.reshape(batch_shape + (n,))


def hermitian_eigvalsh(H: np.ndarray, tol: float = JACOBI_TOLERANCE) -> np.ndarray:
    """
    Eigenvalues of Hermitian matrices, ascending.

    Args:
        H: (..., m, m) Hermitian stack (the imaginary part may be absent)
        tol: Jacobi stopping tolerance

    Returns:
        np.ndarray: (..., m) sorted real eigenvalues
    """
    H = np.asarray(H)
    if not np.iscomplexobj(H):
        return jacobi_eigvalsh(H, tol)
    H = 0.5 * (H + np.conj(np.swapaxes(H, -1, -2)))
    doubled = jacobi_eigvalsh(_embed(H), tol)
    return doubled[..., ::2]


def lambda_max(H: np.ndarray) -> np.ndarray:
    """Largest eigenvalue of each Hermitian matrix of the stack."""
    return hermitian_eigvalsh(H)[..., -1]


def operator_norm(X: np.ndarray) -> np.ndarray:
    """Operator (spectral) norm ||X|| = lambda_max(X* X)^(1/2) of each matrix of the stack."""
    X = np.asarray(X)
    gram = np.conj(np.swapaxes(X, -1, -2)) @ X
    return np.sqrt(np.maximum(lambda_max(gram), 0.0))
