"""Dense complex matrix kernels.

Hermitian eigendecomposition, unitary exponentials of Hermitian generators,
spectral and trace norms, trace distance and Kronecker products. These are the
numeric substrate for everything else in the package.

Conventions fixed here:

* the unitary-difference norm is the spectral (operator 2-) norm;
* trace distance is ``Tr|rho - sigma|`` WITHOUT the customary 1/2 factor, so
  it ranges over [0, 2] and is twice the textbook value.

All functions are pure and never mutate their arguments.
"""

from __future__ import annotations

import numpy as np

from .config import DENSITY_ATOL, HERMITIAN_INPUT_ATOL

__all__ = [
    "DensityMatrix",
    "as_complex_matrix",
    "expm_hermitian",
    "hermitian_deviation",
    "hermitian_eig",
    "kron",
    "maximally_mixed",
    "pure_density",
    "spectral_norm",
    "trace_distance",
    "trace_norm",
]


def as_complex_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a 2-D complex ndarray."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got an array of ndim={m.ndim}")
    return m


def _require_square(m: np.ndarray, what: str) -> None:
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"{what} must be square, got shape {m.shape}")


def hermitian_deviation(m: np.ndarray) -> float:
    """Spectral norm of ``m - m^dagger`` (0 for exactly Hermitian input)."""
    return spectral_norm(m - m.conj().T)


def _require_hermitian(m: np.ndarray, what: str, atol: float) -> None:
    dev = hermitian_deviation(m)
    if dev > atol:
        raise ValueError(
            f"{what} must be Hermitian: ||m - m^dagger|| = {dev:.3e} > {atol:.1e}"
        )


def hermitian_eig(a) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(w, v)`` with real eigenvalues ``w`` sorted descending and
    unitary ``v`` whose columns are the matching eigenvectors, so that
    ``a = v @ diag(w) @ v.conj().T``.
    """
    m = as_complex_matrix(a)
    _require_square(m, "eigendecomposition input")
    _require_hermitian(m, "eigendecomposition input", HERMITIAN_INPUT_ATOL)
    w, v = np.linalg.eigh(m)
    return w[::-1].copy(), v[:, ::-1].copy()


def expm_hermitian(a, tau: float) -> np.ndarray:
    """``exp(-1j * a * tau)`` for Hermitian ``a``, via eigendecomposition.

    The spectral route is exact up to eigensolver accuracy; eigenvector
    columns are renormalized so the result is unitary to machine precision.
    """
    m = as_complex_matrix(a)
    _require_square(m, "exponential generator")
    _require_hermitian(m, "exponential generator", HERMITIAN_INPUT_ATOL)
    w, v = np.linalg.eigh(m)
    v = v / np.linalg.norm(v, axis=0, keepdims=True)
    phases = np.exp(-1j * w * float(tau))
    return (v * phases) @ v.conj().T


def spectral_norm(m) -> float:
    """Largest singular value."""
    return float(np.linalg.norm(as_complex_matrix(m), ord=2))


def trace_norm(m) -> float:
    """Sum of singular values."""
    return float(np.linalg.svd(as_complex_matrix(m), compute_uv=False).sum())


def kron(a, b) -> np.ndarray:
    """Kronecker product, dimensions multiply."""
    return np.kron(as_complex_matrix(a), as_complex_matrix(b))


class DensityMatrix:
    """A validated density matrix.

    Checks Hermiticity, unit trace and positive semidefiniteness, each within
    ``atol``. The stored matrix is a read-only copy; instances are immutable
    and safe to share across threads.
    """

    __slots__ = ("_mat",)

    def __init__(self, mat, *, atol: float = DENSITY_ATOL):
        m = as_complex_matrix(mat)
        _require_square(m, "density matrix")
        dev = hermitian_deviation(m)
        if dev > atol:
            raise ValueError(
                f"density matrix is not Hermitian: deviation {dev:.3e} > {atol:.1e}"
            )
        tr_dev = abs(complex(np.trace(m)) - 1.0)
        if tr_dev > atol:
            raise ValueError(
                f"density matrix does not have unit trace: |Tr - 1| = {tr_dev:.3e} > {atol:.1e}"
            )
        min_eig = float(np.linalg.eigvalsh((m + m.conj().T) / 2.0).min())
        if min_eig < -atol:
            raise ValueError(
                f"density matrix is not PSD: min eigenvalue {min_eig:.3e} < -{atol:.1e}"
            )
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "_mat", m)

    @property
    def mat(self) -> np.ndarray:
        return self._mat

    @property
    def dim(self) -> int:
        return self._mat.shape[0]

    def __repr__(self) -> str:  # pragma: no cover - debug aid
        return f"DensityMatrix(dim={self.dim})"


def pure_density(vec) -> DensityMatrix:
    """Density matrix of a pure state; the vector is normalized first."""
    v = np.asarray(vec, dtype=complex).reshape(-1)
    n = np.linalg.norm(v)
    if n == 0:
        raise ValueError("cannot build a pure state from the zero vector")
    v = v / n
    return DensityMatrix(np.outer(v, v.conj()))


def maximally_mixed(dim: int) -> DensityMatrix:
    """The state I/dim."""
    if dim < 1:
        raise ValueError(f"dimension must be positive, got {dim}")
    return DensityMatrix(np.eye(dim, dtype=complex) / dim)


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """``Tr|rho - sigma|``, in [0, 2] (twice the 1/2-normalized convention)."""
    if rho.dim != sigma.dim:
        raise ValueError(
            f"trace distance needs equal dimensions, got {rho.dim} and {sigma.dim}"
        )
    return trace_norm(rho.mat - sigma.mat)
