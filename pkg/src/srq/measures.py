"""Information and response measures on chain density matrices.

Qubit arguments are 1-based, matching the site numbering of the model
module. Entropies are in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import (
    NotPSDError,
    PSD_TOL,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    partial_trace,
    partial_transpose,
    sqrt_psd,
)
from .model import embed

_LOG_FLOOR = 1e-15  # positive eigenvalues below this contribute nothing to entropy


def _n_qubits(rho: np.ndarray) -> int:
    d = rho.shape[0]
    n = int(round(math.log2(d)))
    if 2 ** n != d:
        raise ValueError(f"matrix dimension {d} is not a power of two")
    return n


def _entropy_from_eigenvalues(w: np.ndarray) -> float:
    if w[0] < -PSD_TOL:
        raise NotPSDError(f"eigenvalue {w[0]:.3e} below -{PSD_TOL:.0e}")
    w = w[w > _LOG_FLOOR]
    return float(-(w * np.log2(w)).sum())


def von_neumann_entropy(rho: np.ndarray) -> float:
    """-tr(rho log2 rho), with 0 log 0 = 0."""
    return _entropy_from_eigenvalues(np.linalg.eigvalsh(rho))


def _binary_entropy(x: float) -> float:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def _reduced_single(rho: np.ndarray, i: int) -> np.ndarray:
    n = _n_qubits(rho)
    if not 1 <= i <= n:
        raise IndexError(f"qubit {i} out of range 1..{n}")
    return partial_trace(rho, [2] * n, [i - 1])


def reduced_pair(rho: np.ndarray, i: int, j: int) -> np.ndarray:
    """Two-qubit reduction onto qubits i and j (1-based, i != j).

    The lower-numbered qubit becomes the first factor of the 4x4 result.
    """
    n = _n_qubits(rho)
    if i == j:
        raise IndexError("pair indices must differ")
    for q in (i, j):
        if not 1 <= q <= n:
            raise IndexError(f"qubit {q} out of range 1..{n}")
    a, b = sorted((i, j))
    return partial_trace(rho, [2] * n, [a - 1, b - 1])


def mutual_information(rho: np.ndarray, i: int, j: int) -> float:
    """S_i + S_j - S_ij on the two-qubit reduction, clamped at 0 from below."""
    rij = reduced_pair(rho, i, j)
    ri = partial_trace(rij, [2, 2], [0])
    rj = partial_trace(rij, [2, 2], [1])
    value = (von_neumann_entropy(ri) + von_neumann_entropy(rj)
             - von_neumann_entropy(rij))
    return max(value, 0.0)


def concurrence(rho2q: np.ndarray) -> float:
    """Two-qubit concurrence via the Hermitian product R = sqrt(rho) rho~ sqrt(rho),
    where rho~ is the spin-flipped conjugate (sigma_y x sigma_y) rho* (sigma_y x sigma_y).

    Conjugation is taken in the fixed computational basis. The square
    roots of the eigenvalues of R are taken as singular values of
    X = sqrt(rho) sqrt(rho~) with R = X X^dag, which keeps the small
    ones accurate to machine precision instead of sqrt(eps).
    """
    if rho2q.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {rho2q.shape}")
    yy = np.kron(SIGMA_Y, SIGMA_Y)
    root = sqrt_psd(rho2q)
    root_flipped = yy @ root.conj() @ yy  # sqrt of the spin-flipped conjugate
    lam = np.linalg.svd(root @ root_flipped, compute_uv=False)
    return float(np.clip(lam[0] - lam[1] - lam[2] - lam[3], 0.0, 1.0))


def entanglement_of_formation(c: float) -> float:
    """Entanglement of formation in bits as a function of concurrence."""
    if not -1e-12 <= c <= 1.0 + 1e-12:
        raise ValueError(f"concurrence {c} outside [0, 1]")
    c = min(max(c, 0.0), 1.0)
    return _binary_entropy(0.5 * (1.0 + math.sqrt(1.0 - c * c)))


def min_pt_eigenvalue(rho2q: np.ndarray) -> float:
    """Smallest eigenvalue of the partial transpose over the second qubit.

    Negative values certify entanglement; for two qubits the converse
    holds as well.
    """
    if rho2q.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {rho2q.shape}")
    pt = partial_transpose(rho2q, [2, 2], 1)
    return float(np.linalg.eigvalsh(pt)[0])


def signal(rho: np.ndarray, axis: str) -> float:
    """Mean single-site Pauli expectation (1/N) sum_i <sigma_axis^i>."""
    if axis == "x":
        pauli = SIGMA_X
    elif axis == "z":
        pauli = SIGMA_Z
    else:
        raise ValueError(f"axis must be 'x' or 'z', got {axis!r}")
    n = _n_qubits(rho)
    op = sum(embed(pauli, i, n) for i in range(1, n + 1)) / n
    value = complex(np.trace(rho @ op))
    if abs(value.imag) > 1e-10:
        raise ValueError(f"imaginary residue {value.imag:.3e} in a real observable")
    return float(value.real)


def single_qubit_coherence(rho: np.ndarray, i: int) -> float:
    """<sigma_x> of the reduced state of qubit i."""
    ri = _reduced_single(rho, i)
    return float(np.trace(ri @ SIGMA_X).real)


@dataclass(frozen=True)
class PairMeasures:
    """Correlation measures of one qubit pair in a chain state.

    classical_proxy is mutual_information - eof, reported as-is without
    any claim that it isolates classical correlations.
    """

    pair: tuple[int, int]
    mutual_information: float
    eof: float
    concurrence: float
    min_pt_eigenvalue: float
    classical_proxy: float
    entangled: bool


def pair_measures(rho: np.ndarray, i: int, j: int) -> PairMeasures:
    """Compute all pairwise measures from a single two-qubit reduction."""
    rij = reduced_pair(rho, i, j)
    ri = partial_trace(rij, [2, 2], [0])
    rj = partial_trace(rij, [2, 2], [1])
    mi = max(von_neumann_entropy(ri) + von_neumann_entropy(rj)
             - von_neumann_entropy(rij), 0.0)
    c = concurrence(rij)
    e = entanglement_of_formation(c)
    mpt = min_pt_eigenvalue(rij)
    return PairMeasures(
        pair=(i, j),
        mutual_information=mi,
        eof=e,
        concurrence=c,
        min_pt_eigenvalue=mpt,
        classical_proxy=mi - e,
        entangled=mpt < -1e-9,
    )
