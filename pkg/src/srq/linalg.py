"""Dense complex linear algebra for multi-qubit density matrices.

Matrices are numpy complex arrays in row-major (C) storage. The
computational basis is |q1 q2 ... qN> with qubit 1 most significant;
basis index 0 of a single qubit is the state annihilated by the
lowering operator.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

# Centralized tolerances.
HERM_TOL = 1e-10  # allowed deviation from Hermiticity
PSD_TOL = 1e-8    # eigenvalues below -PSD_TOL are an error, above are clamped
EQ_TOL = 1e-9     # default absolute tolerance for matrix comparisons

ID2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
SIGMA_MINUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)  # |0><1|
SIGMA_PLUS = SIGMA_MINUS.conj().T                                # |1><0|


class NotHermitianError(ValueError):
    """A matrix expected to be Hermitian is not, beyond tolerance."""


class NotPSDError(ValueError):
    """A matrix expected to be positive semidefinite has a negative eigenvalue."""


class HermitianEigen(NamedTuple):
    """Eigendecomposition of a Hermitian matrix."""

    eigenvalues: np.ndarray   # real, ascending
    eigenvectors: np.ndarray  # orthonormal columns, input = V diag(w) V^dag


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two matrices."""
    return np.kron(a, b)


def is_hermitian(m: np.ndarray, tol: float = HERM_TOL) -> bool:
    """True if m equals its conjugate transpose within absolute tolerance."""
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def allclose(a: np.ndarray, b: np.ndarray, tol: float = EQ_TOL) -> bool:
    """Entrywise equality within an explicit absolute tolerance."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        return False
    return bool(np.max(np.abs(a - b)) <= tol)


def _check_dims(rho: np.ndarray, dims: Sequence[int]) -> None:
    total = int(np.prod(dims))
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {rho.shape}")
    if rho.shape[0] != total:
        raise ValueError(
            f"dimension mismatch: matrix is {rho.shape[0]}x{rho.shape[0]}, "
            f"subsystem dims {list(dims)} multiply to {total}"
        )


def partial_trace(rho: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Trace out all subsystems not listed in ``keep`` (0-based positions).

    Kept subsystems retain their original relative order. The trace of
    the input is preserved.
    """
    _check_dims(rho, dims)
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep must name at least one subsystem")
    if keep[0] < 0 or keep[-1] >= len(dims):
        raise ValueError(f"keep indices {keep} out of range for {len(dims)} subsystems")
    cur = np.asarray(rho, dtype=complex).reshape(list(dims) * 2)
    nsub = len(dims)
    for q in reversed([q for q in range(len(dims)) if q not in keep]):
        cur = np.trace(cur, axis1=q, axis2=q + nsub)
        nsub -= 1
    d_out = int(np.prod([dims[q] for q in keep]))
    return np.ascontiguousarray(cur.reshape(d_out, d_out))


def partial_transpose(rho: np.ndarray, dims: Sequence[int], subsystem: int) -> np.ndarray:
    """Transpose the indices of one subsystem (0-based position) only."""
    _check_dims(rho, dims)
    n = len(dims)
    if not 0 <= subsystem < n:
        raise ValueError(f"subsystem {subsystem} out of range for {n} subsystems")
    t = np.asarray(rho, dtype=complex).reshape(list(dims) * 2)
    t = np.swapaxes(t, subsystem, subsystem + n)
    d = rho.shape[0]
    return np.ascontiguousarray(t.reshape(d, d))


def eigh(h: np.ndarray) -> HermitianEigen:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    Raises NotHermitianError when the input deviates from Hermiticity
    by more than HERM_TOL.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    dev = float(np.max(np.abs(h - h.conj().T)))
    if dev > HERM_TOL:
        raise NotHermitianError(f"matrix deviates from Hermiticity by {dev:.3e}")
    w, v = np.linalg.eigh(h)
    return HermitianEigen(w, v)


def sqrt_psd(rho: np.ndarray) -> np.ndarray:
    """Hermitian square root of a positive semidefinite matrix.

    Eigenvalues in (-PSD_TOL, 0) are clamped to zero; anything below
    -PSD_TOL raises NotPSDError.
    """
    w, v = eigh(rho)
    if w[0] < -PSD_TOL:
        raise NotPSDError(f"eigenvalue {w[0]:.3e} below -{PSD_TOL:.0e}")
    w = np.clip(w, 0.0, None)
    root = (v * np.sqrt(w)) @ v.conj().T
    return 0.5 * (root + root.conj().T)
