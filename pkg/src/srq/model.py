"""Hamiltonian, jump operators and Liouvillian of a driven qubit chain.

Frozen conventions (anchored to the closed-form two-qubit steady state
of the analytic module; the cross-check lives in the test suite):

* sigma_z = diag(+1, -1), so the damped-to state |0> has sigma_z = +1.
* Coherent part, open chain:
      H = -sum_i detuning_i/2 * sigma_z^i
        + coupling * sum_{i<N} sigma_z^i sigma_z^{i+1}
        + sum_i rabi_i * sigma_x^i
* Dissipation acts locally: lowering on qubit i with coefficient
  gamma_i*(nbar+1), raising with gamma_i*nbar. The Lindblad weight in
  the generator is twice the coefficient, so at nbar=0 the excited
  population of a lone qubit relaxes at rate 2*gamma_i.
* Vectorization is column-stacking: vec(rho)[i + j*D] = rho[i, j].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .linalg import ID2, SIGMA_MINUS, SIGMA_PLUS, SIGMA_X, SIGMA_Z


@dataclass(frozen=True)
class ChainParams:
    """Physical parameters of an N-qubit driven dissipative chain.

    All rates and frequencies share one unit system; the steady state
    depends only on their ratios.
    """

    n_qubits: int
    rabi: tuple[float, ...]
    detuning: tuple[float, ...]
    coupling: float
    gamma: tuple[float, ...]
    nbar: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "n_qubits", int(self.n_qubits))
        for name in ("rabi", "detuning", "gamma"):
            object.__setattr__(self, name, tuple(float(x) for x in getattr(self, name)))
        object.__setattr__(self, "coupling", float(self.coupling))
        object.__setattr__(self, "nbar", float(self.nbar))
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be >= 1")
        for name in ("rabi", "detuning", "gamma"):
            if len(getattr(self, name)) != self.n_qubits:
                raise ValueError(f"{name} must have n_qubits={self.n_qubits} entries")
        if any(x < 0 for x in self.rabi):
            raise ValueError("rabi entries must be >= 0")
        if any(x < 0 for x in self.gamma):
            raise ValueError("gamma entries must be >= 0")
        if self.nbar < 0:
            raise ValueError("nbar must be >= 0")

    @classmethod
    def uniform(cls, n_qubits: int, rabi: float = 1.0, detuning: float = 0.0,
                coupling: float = 0.0, gamma: float = 0.0, nbar: float = 0.0) -> "ChainParams":
        """Chain with identical per-qubit parameters."""
        n = int(n_qubits)
        return cls(n, (rabi,) * n, (detuning,) * n, coupling, (gamma,) * n, nbar)

    @property
    def dim(self) -> int:
        return 2 ** self.n_qubits

    def is_uniform(self) -> bool:
        return (len(set(self.rabi)) == 1 and len(set(self.detuning)) == 1
                and len(set(self.gamma)) == 1)


@dataclass(frozen=True)
class JumpTerm:
    """One dissipative channel: coefficient and chain-dimension operator.

    ``rate`` is the raw coefficient gamma_i*(nbar+1) or gamma_i*nbar;
    build_liouvillian applies twice this value as the Lindblad weight.
    """

    rate: float
    operator: np.ndarray

    def __post_init__(self):
        if self.rate < 0:
            raise ValueError("rate must be >= 0")


@dataclass(frozen=True)
class Superoperator:
    """Generator acting on column-stacked density matrices."""

    dim: int
    matrix: np.ndarray  # dim^2 x dim^2

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """Time derivative of a density matrix under this generator."""
        return unvec(self.matrix @ vec(rho), self.dim)


def vec(rho: np.ndarray) -> np.ndarray:
    """Column-stack a matrix into a vector."""
    return np.asarray(rho, dtype=complex).reshape(-1, order="F")


def unvec(x: np.ndarray, dim: int) -> np.ndarray:
    """Inverse of vec for a dim x dim matrix."""
    return np.asarray(x, dtype=complex).reshape((dim, dim), order="F")


def embed(op: np.ndarray, site: int, n: int) -> np.ndarray:
    """Place a single-qubit operator at 1-based position ``site`` of an
    n-qubit chain, identity elsewhere."""
    if not 1 <= site <= n:
        raise ValueError(f"site {site} out of range 1..{n}")
    out = np.array([[1.0 + 0.0j]])
    for k in range(1, n + 1):
        out = np.kron(out, op if k == site else ID2)
    return out


def build_h_coh(p: ChainParams) -> np.ndarray:
    """Coherent part of the chain Hamiltonian (Hermitian, dim 2^N)."""
    n = p.n_qubits
    h = np.zeros((p.dim, p.dim), dtype=complex)
    for i in range(1, n + 1):
        if p.detuning[i - 1] != 0.0:
            h -= 0.5 * p.detuning[i - 1] * embed(SIGMA_Z, i, n)
        if p.rabi[i - 1] != 0.0:
            h += p.rabi[i - 1] * embed(SIGMA_X, i, n)
    if p.coupling != 0.0:
        for i in range(1, n):
            h += p.coupling * embed(SIGMA_Z, i, n) @ embed(SIGMA_Z, i + 1, n)
    return h


def build_jump_terms(p: ChainParams) -> list[JumpTerm]:
    """Local dissipation channels: 2N terms, lowering then raising.

    Zero-rate terms are kept so the channel list has a fixed layout.
    """
    n = p.n_qubits
    terms = [JumpTerm(p.gamma[i - 1] * (p.nbar + 1.0), embed(SIGMA_MINUS, i, n))
             for i in range(1, n + 1)]
    terms += [JumpTerm(p.gamma[i - 1] * p.nbar, embed(SIGMA_PLUS, i, n))
              for i in range(1, n + 1)]
    return terms


def build_liouvillian(p: ChainParams) -> Superoperator:
    """Assemble the full generator as a dense dim^2 x dim^2 matrix.

    Column-stacking convention; assembled sparse, densified once.
    The Lindblad weight of each channel is 2 * JumpTerm.rate (see the
    module docstring for the damping convention).
    """
    d = p.dim
    ident = sp.identity(d, dtype=complex, format="csr")
    h = sp.csr_matrix(build_h_coh(p))
    gen = -1j * (sp.kron(ident, h, format="csr") - sp.kron(h.T, ident, format="csr"))
    for term in build_jump_terms(p):
        weight = 2.0 * term.rate
        if weight == 0.0:
            continue
        op = sp.csr_matrix(term.operator)
        opd_op = (op.conj().T @ op).tocsr()
        gen = gen + weight * (
            sp.kron(op.conj(), op, format="csr")
            - 0.5 * sp.kron(ident, opd_op, format="csr")
            - 0.5 * sp.kron(opd_op.T, ident, format="csr")
        )
    return Superoperator(d, gen.toarray())


def ground_state(n: int) -> np.ndarray:
    """Density matrix with every qubit in the damped-to state |0...0>."""
    d = 2 ** n
    rho = np.zeros((d, d), dtype=complex)
    rho[0, 0] = 1.0
    return rho


def validate_regime(p: ChainParams, omega_scale: float, threshold: float = 0.1) -> list[str]:
    """Warnings for parameter ratios outside the weak-coupling regime.

    Each ratio rabi_i/omega, gamma_i*nbar/omega, |detuning_i|/omega and
    coupling/omega at or above ``threshold`` produces one warning.
    Never raises for regime violations; callers decide what to do.
    """
    if omega_scale <= 0:
        raise ValueError("omega_scale must be > 0")
    warnings: list[str] = []

    def check(label: str, value: float):
        ratio = abs(value) / omega_scale
        if ratio >= threshold:
            warnings.append(
                f"{label}/omega_scale = {ratio:.3g} exceeds {threshold:g}; "
                "results may leave the validated regime"
            )

    for i in range(p.n_qubits):
        check(f"rabi[{i + 1}]", p.rabi[i])
        check(f"gamma[{i + 1}]*nbar", p.gamma[i] * p.nbar)
        check(f"detuning[{i + 1}]", p.detuning[i])
    check("coupling", p.coupling)
    return warnings
