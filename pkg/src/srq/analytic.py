"""Closed-form steady-state results for short driven chains on resonance.

Everything here is expressed through the dimensionless ratios
r = gamma/rabi and s = coupling/rabi. These formulas serve as ground
truth for the numerical solver (see the verify CLI mode and the test
suite).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class AnalyticParams:
    """Dimensionless parameter point for the two-qubit closed forms."""

    r: float  # gamma / rabi
    s: float  # coupling / rabi

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("r must be >= 0")

    @property
    def t(self) -> float:
        return self.r * self.r + 1.0

    @property
    def k(self) -> float:
        r2 = self.r * self.r
        return 3.0 + 2.0 * r2 + self.t * self.t + 4.0 * r2 * self.s * self.s


def steady_state_2q(r: float, s: float) -> np.ndarray:
    """Closed-form steady state of the resonant two-qubit chain.

    Basis |00>, |01>, |10>, |11> with |0> the damped-to state; the r=0
    point is a removable limit of the formula, not a physical steady
    state (without damping the stationary set is degenerate).
    """
    p = AnalyticParams(r, s)
    t, k, r2 = p.t, p.k, r * r
    upper = np.array([
        [t * t + 4.0 * r2 * s * s, 2.0 * s * r2 + 1j * r * t,
         2.0 * s * r2 + 1j * r * t, 2j * r * s - r2],
        [0.0, t, r2, 1j * r],
        [0.0, 0.0, t, 1j * r],
        [0.0, 0.0, 0.0, 1.0],
    ], dtype=complex)
    full = upper + np.triu(upper, 1).conj().T
    return full / k


def gamma_threshold(omega: float, j: float) -> float:
    """Noise strength at which the two-qubit steady state stops being
    separable: omega^2 / (2 j)."""
    if j <= 0:
        raise ValueError("coupling must be > 0")
    return omega * omega / (2.0 * j)


def signal2(r: float, s: float) -> float:
    """Mean x-response of the two-qubit steady state: 4 s r^2 / k."""
    p = AnalyticParams(r, s)
    return 4.0 * s * r * r / p.k


def signal2_peak(s: float) -> tuple[float, float]:
    """Location and height of the two-qubit response maximum over noise.

    Returns (sqrt(2), s / (2 + s^2)) in units of the drive amplitude;
    the location does not depend on s.
    """
    if s <= 0:
        raise ValueError("s must be > 0")
    return math.sqrt(2.0), s / (2.0 + s * s)


def single_qubit_detuned(omega: float, delta: float, gamma: float) -> float:
    """Stated magnitude of the detuned single-qubit response,
    omega*|delta| / (delta^2 + (gamma/2)^2 + (omega/2)^2)."""
    return omega * abs(delta) / (delta * delta + 0.25 * gamma * gamma
                                 + 0.25 * omega * omega)


def coherence_2q(omega: float, j: float, gamma: float) -> float:
    """Per-qubit <sigma_x> of the two-qubit steady state,
    4 j gamma^2 / (k omega^3); identical to signal2 at r=gamma/omega,
    s=j/omega."""
    if omega <= 0:
        raise ValueError("omega must be > 0")
    p = AnalyticParams(gamma / omega, j / omega)
    return 4.0 * j * gamma * gamma / (p.k * omega ** 3)
