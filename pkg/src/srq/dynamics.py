"""Steady states and time evolution for chain generators."""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .model import Superoperator, unvec, vec

logger = logging.getLogger(__name__)

COND_LIMIT = 1e12        # condition estimate beyond which the solve is distrusted
RESIDUAL_REL = 1e-10     # fixed-point residual bound, relative to ||L||_F
PERTURB = 1e-8           # right-hand-side perturbation for the uniqueness probe
PERTURB_MOVE = 1e-4      # solution movement that flags a degenerate generator
NULL_REL = 1e-10         # singular values below NULL_REL * s_max count as null


class NonUniqueSteadyStateError(RuntimeError):
    """The generator has more than one stationary state."""


class SolveFailedError(RuntimeError):
    """The steady-state solve did not produce a valid density matrix."""


class StepUnderflowError(RuntimeError):
    """Time integration would require an absurdly small substep."""


def validate_density_matrix(rho: np.ndarray, herm_tol: float = 1e-9,
                            trace_tol: float = 1e-9, eig_floor: float = -1e-8) -> None:
    """Raise ValueError unless rho is Hermitian, unit-trace and PSD
    within the stated tolerances. Never repairs the input."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {rho.shape}")
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    if herm > herm_tol:
        raise ValueError(f"not Hermitian: deviation {herm:.3e} > {herm_tol:.0e}")
    tr = complex(np.trace(rho))
    if abs(tr - 1.0) > trace_tol:
        raise ValueError(f"trace {tr:.12g} differs from 1 by more than {trace_tol:.0e}")
    wmin = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
    if wmin < eig_floor:
        raise ValueError(f"negative eigenvalue {wmin:.3e} below {eig_floor:.0e}")


def _trace_row(dim: int) -> np.ndarray:
    row = np.zeros(dim * dim, dtype=complex)
    row[np.arange(dim) * (dim + 1)] = 1.0
    return row


def _nullspace_state(m: np.ndarray, dim: int) -> np.ndarray:
    """SVD fallback: recover the stationary state when the direct solve
    is ambiguous, or detect a degenerate stationary set."""
    _, s, vh = np.linalg.svd(m)
    smax = float(s[0]) if s.size else 0.0
    if smax == 0.0:
        raise NonUniqueSteadyStateError("generator is identically zero")
    nullity = int(np.sum(s <= NULL_REL * smax))
    if nullity > 1:
        raise NonUniqueSteadyStateError(
            f"stationary subspace has dimension {nullity}; "
            "add dissipation to select a unique steady state"
        )
    if nullity == 0:
        raise SolveFailedError("no stationary direction found within tolerance")
    rho = unvec(vh[-1].conj(), dim)
    tr = complex(np.trace(rho))
    if abs(tr) < 1e-10:
        raise SolveFailedError("stationary direction is traceless; cannot normalize")
    return rho / tr


def steady_state(lv: Superoperator) -> np.ndarray:
    """Unique stationary density matrix of a generator.

    Direct dense solve of the dim^2 linear system with one row replaced
    by the unit-trace constraint. Trace preservation makes the
    population rows sum to zero identically, so each of them is
    redundant; the one with the smallest infinity norm is replaced to
    preserve conditioning. Uniqueness is probed by perturbing the
    constraint's right-hand side and by a condition estimate; an SVD
    fallback runs when either probe is ambiguous.

    Raises NonUniqueSteadyStateError for degenerate generators and
    SolveFailedError when no valid density matrix can be produced.
    """
    m = lv.matrix
    d = lv.dim
    population_rows = np.arange(d) * (d + 1)
    row = int(population_rows[
        np.argmin(np.max(np.abs(m[population_rows, :]), axis=1))])
    a = np.array(m, dtype=complex)
    a[row, :] = _trace_row(d)
    b = np.zeros(d * d, dtype=complex)
    b[row] = 1.0

    rho = None
    anorm = float(np.linalg.norm(a, 1))
    try:
        with warnings.catch_warnings():
            # Exactly singular factorizations are handled by the SVD path.
            warnings.simplefilter("ignore", sla.LinAlgWarning)
            lu, piv = sla.lu_factor(a, check_finite=False)
        gecon = sla.get_lapack_funcs("gecon", (a,))
        rcond, _ = gecon(lu, anorm)
    except Exception:
        rcond = 0.0
        lu = piv = None
    if lu is not None and np.isfinite(rcond) and rcond > 1.0 / COND_LIMIT:
        x = sla.lu_solve((lu, piv), b, check_finite=False)
        b2 = b.copy()
        b2[row] += PERTURB
        x2 = sla.lu_solve((lu, piv), b2, check_finite=False)
        moved = float(np.linalg.norm(x - x2))
        if np.all(np.isfinite(x)) and moved <= PERTURB_MOVE:
            rho = unvec(x, d)
    if rho is None:
        rho = _nullspace_state(m, d)

    herm = float(np.max(np.abs(rho - rho.conj().T)))
    if herm > 1e-9:
        raise SolveFailedError(f"solution deviates from Hermiticity by {herm:.3e}")
    rho = 0.5 * (rho + rho.conj().T)
    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > 1e-9:
        raise SolveFailedError(f"solution trace {tr:.12g} is not 1")
    rho /= tr
    wmin = float(np.linalg.eigvalsh(rho)[0])
    if wmin < -1e-8:
        raise SolveFailedError(f"solution has negative eigenvalue {wmin:.3e}")
    mnorm = float(np.linalg.norm(m))
    residual = float(np.linalg.norm(m @ vec(rho)))
    if mnorm > 0 and residual > RESIDUAL_REL * mnorm:
        raise SolveFailedError(
            f"fixed-point residual {residual:.3e} exceeds {RESIDUAL_REL:.0e}*||L||"
        )
    return rho


@dataclass
class Trajectory:
    """States on a time grid, plus optional derived per-time series."""

    times: np.ndarray
    states: list[np.ndarray]
    series: dict[str, np.ndarray] = field(default_factory=dict)


def _spectral_norm_estimate(m: np.ndarray, iterations: int = 20) -> float:
    """Largest singular value via power iteration on m^dag m.

    Deterministic: the start vector comes from a fixed-seed generator.
    """
    n = m.shape[0]
    rng = np.random.default_rng(0)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    sigma = 0.0
    for _ in range(iterations):
        w = m @ v
        sigma = float(np.linalg.norm(w))
        if sigma == 0.0:
            return 0.0
        v = m.conj().T @ w
        v /= np.linalg.norm(v)
    return sigma


def evolve(rho0: np.ndarray, lv: Superoperator, t_grid, step_scale: float = 0.005) -> Trajectory:
    """Integrate the master equation with classical fixed-substep RK4.

    The substep h satisfies h * ||L||_2est <= step_scale (default 0.005,
    hard cap 0.1); the norm estimate uses 20 power-iteration steps. The
    trace is renormalized each substep and the accumulated drift is
    logged at DEBUG level. States at grid points are validated; any
    violation raises instead of being repaired.
    """
    if not 0 < step_scale <= 0.1:
        raise ValueError("step_scale must be in (0, 0.1]")
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size < 1:
        raise ValueError("t_grid must be a one-dimensional grid")
    if t[0] != 0.0:
        raise ValueError("t_grid must start at 0")
    if t.size > 1 and np.any(np.diff(t) <= 0):
        raise ValueError("t_grid must be strictly ascending")
    validate_density_matrix(rho0)
    if rho0.shape[0] != lv.dim:
        raise ValueError(f"state dimension {rho0.shape[0]} != generator dimension {lv.dim}")

    m = lv.matrix
    d = lv.dim
    span = float(t[-1] - t[0]) if t.size > 1 else 0.0
    sigma = _spectral_norm_estimate(m)
    diag_idx = np.arange(d) * (d + 1)

    states = [np.array(rho0, dtype=complex)]
    x = vec(rho0)
    drift = 0.0
    nsteps = 0
    for k in range(t.size - 1):
        dt = float(t[k + 1] - t[k])
        if sigma == 0.0:
            states.append(unvec(x, d).copy())
            continue
        nsub = max(1, math.ceil(dt * sigma / step_scale))
        h = dt / nsub
        if span > 0 and h < 1e-12 * span:
            raise StepUnderflowError(
                f"required substep {h:.3e} is below 1e-12 of the span {span:.3e}"
            )
        for _ in range(nsub):
            k1 = m @ x
            k2 = m @ (x + 0.5 * h * k1)
            k3 = m @ (x + 0.5 * h * k2)
            k4 = m @ (x + h * k3)
            x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            tr = x[diag_idx].sum()
            drift += abs(tr - 1.0)
            x = x / tr
            nsteps += 1
        states.append(unvec(x, d).copy())

    logger.debug("trace renormalization drift over %d substeps: %.3e", nsteps, drift)
    for state in states:
        validate_density_matrix(state)
    return Trajectory(times=t.copy(), states=states)
