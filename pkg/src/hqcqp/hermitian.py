"""Dense complex Hermitian linear algebra.

Validation, eigendecomposition by cyclic Jacobi sweeps, Cholesky whitening
factors and real quadratic forms. Everything operates on plain complex128
numpy arrays and is a pure function of its inputs.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import _kernels

HERMITIAN_TOL = 1e-12
EIGEN_SWEEP_TOL = 1e-12
MAX_SWEEPS = 60


class DimensionError(ValueError):
    pass


class NotPositiveDefiniteError(ValueError):
    """Cholesky pivot failure; carries the index of the failing pivot."""

    def __init__(self, pivot_index: int, pivot_value: float):
        self.pivot_index = pivot_index
        self.pivot_value = pivot_value
        super().__init__(
            f"not positive definite: pivot {pivot_index} is {pivot_value:.6g}"
        )


class EigenConvergenceError(RuntimeError):
    def __init__(self, residual: float, sweeps: int):
        self.residual = residual
        self.sweeps = sweeps
        super().__init__(
            f"Jacobi sweeps did not converge after {sweeps} sweeps "
            f"(off-diagonal residual {residual:.3e})"
        )


class EigenPair(NamedTuple):
    value: float
    vector: np.ndarray


def as_complex_matrix(m, name: str = "matrix") -> np.ndarray:
    """Coerce to a square complex128 array, rejecting non-square input."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {a.shape}")
    return a


def validate_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    """True iff m equals its conjugate transpose within tol, relative to the
    largest entry magnitude."""
    a = as_complex_matrix(m)
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    dev = float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0
    return dev <= tol * max(scale, 1e-300)


def require_hermitian(m, name: str = "matrix", tol: float = HERMITIAN_TOL) -> np.ndarray:
    a = as_complex_matrix(m, name)
    if not validate_hermitian(a, tol):
        raise ValueError(f"{name} is not Hermitian within tolerance {tol}")
    return a


def hermitianize(a: np.ndarray) -> np.ndarray:
    """Hermitian part (a + a^H) / 2, used to scrub roundoff dust."""
    return (a + a.conj().T) / 2.0


def phase_normalize(v: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the largest-magnitude entry is real positive."""
    k = int(np.argmax(np.abs(v)))
    pivot = v[k]
    mag = abs(pivot)
    if mag == 0.0:
        return v
    return v * (np.conj(pivot) / mag)


def hermitian_eigh(a, max_sweeps: int = MAX_SWEEPS):
    """Full eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps.

    Returns (w, v): eigenvalues ascending and unit eigenvectors as the
    columns of v, each phase-normalized. Raises EigenConvergenceError if the
    sweep budget is exhausted.
    """
    a = as_complex_matrix(a)
    work = a.copy()
    v = np.eye(a.shape[0], dtype=np.complex128)
    sweeps = _kernels.jacobi_cycle(work, v, EIGEN_SWEEP_TOL, max_sweeps)
    if sweeps < 0:
        off = float(np.linalg.norm(work - np.diag(np.diag(work))))
        raise EigenConvergenceError(off, max_sweeps)
    w = np.diag(work).real.copy()
    order = np.argsort(w, kind="stable")
    w = w[order]
    v = v[:, order]
    for j in range(v.shape[1]):
        col = phase_normalize(v[:, j])
        v[:, j] = col / np.linalg.norm(col)
    return w, v


def min_eigenpair(a) -> EigenPair:
    """Algebraically smallest eigenvalue and one unit eigenvector."""
    w, v = hermitian_eigh(a)
    return EigenPair(float(w[0]), v[:, 0].copy())


def quadratic_form(a, u) -> float:
    """Real value of u^H a u for Hermitian a.

    The imaginary part of the raw sum must be negligible relative to
    ||a||_F ||u||^2; a violation signals a non-Hermitian input.
    """
    a = np.asarray(a, dtype=np.complex128)
    u = np.asarray(u, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or u.shape != (a.shape[0],):
        raise DimensionError(
            f"dimension mismatch: matrix {a.shape}, vector {u.shape}"
        )
    raw = complex(np.vdot(u, a @ u))
    scale = 1.0 + float(np.linalg.norm(a)) * float(np.vdot(u, u).real)
    if abs(raw.imag) > 1e-10 * scale:
        raise ValueError(
            f"quadratic form has non-negligible imaginary part {raw.imag:.3e}; "
            "input is not Hermitian"
        )
    return raw.real


def cholesky_lower(t) -> np.ndarray:
    """Lower-triangular L with t = L L^H; pivots must be strictly positive."""
    a = as_complex_matrix(t, "t")
    n = a.shape[0]
    lower = np.zeros((n, n), dtype=np.complex128)
    for j in range(n):
        d = a[j, j].real - float(np.vdot(lower[j, :j], lower[j, :j]).real)
        if not np.isfinite(d) or d <= 0.0:
            raise NotPositiveDefiniteError(j, d)
        lower[j, j] = np.sqrt(d)
        if j + 1 < n:
            lower[j + 1 :, j] = (
                a[j + 1 :, j] - lower[j + 1 :, :j] @ lower[j, :j].conj()
            ) / lower[j, j]
    return lower


def _lower_triangular_inverse(lower: np.ndarray) -> np.ndarray:
    n = lower.shape[0]
    inv = np.zeros((n, n), dtype=np.complex128)
    for i in range(n):
        row = np.zeros(n, dtype=np.complex128)
        row[i] = 1.0
        row[:i] = -(lower[i, :i] @ inv[:i, :])[:i]
        inv[i, :] = row / lower[i, i]
    return inv


def inverse_sqrt_factor(t) -> np.ndarray:
    """Inverse of the lower Cholesky factor of a positive definite t.

    With t = F F^H the returned F^{-1} satisfies F^{-1} t F^{-H} = I, which
    is the whitening transform used to absorb the objective matrix.
    """
    lower = cholesky_lower(t)
    return _lower_triangular_inverse(lower)


def frobenius(a) -> float:
    return float(np.linalg.norm(np.asarray(a)))
