"""Parameter sweeps, peak location and separability thresholds.

A sweep computes the steady state on every grid point of one parameter
and evaluates the requested measures. Measure descriptors are strings:

    signal_x, signal_z            mean Pauli response of the chain
    coherence:i                   <sigma_x> of qubit i
    mutual_information:i:j        pairwise mutual information (bits)
    eof:i:j                       entanglement of formation (bits)
    min_pt_eig:i:j                smallest partial-transpose eigenvalue
    classical_proxy:i:j           mutual_information - eof

Qubit indices are 1-based.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .dynamics import NonUniqueSteadyStateError, SolveFailedError, steady_state
from .measures import (
    min_pt_eigenvalue,
    mutual_information,
    pair_measures,
    reduced_pair,
    signal,
    single_qubit_coherence,
)
from .model import ChainParams, build_liouvillian

PARAMETERS = ("gamma_all", "nbar", "j", "n_qubits")

_MEASURE_ARITY = {
    "signal_x": 0,
    "signal_z": 0,
    "coherence": 1,
    "mutual_information": 2,
    "eof": 2,
    "min_pt_eig": 2,
    "classical_proxy": 2,
}


class NoSignChangeError(RuntimeError):
    """Bisection preconditions not met: same sign at both interval ends."""


def parse_measure(descriptor: str) -> tuple[str, tuple[int, ...]]:
    """Split a measure descriptor into (name, qubit indices)."""
    parts = descriptor.split(":")
    name = parts[0]
    if name not in _MEASURE_ARITY:
        raise ValueError(f"unknown measure {name!r}")
    arity = _MEASURE_ARITY[name]
    if len(parts) - 1 != arity:
        raise ValueError(f"measure {name!r} takes {arity} qubit indices, "
                         f"got {len(parts) - 1}")
    try:
        idx = tuple(int(p) for p in parts[1:])
    except ValueError:
        raise ValueError(f"non-integer qubit index in {descriptor!r}") from None
    if any(i < 1 for i in idx):
        raise ValueError(f"qubit indices are 1-based, got {descriptor!r}")
    if arity == 2 and idx[0] == idx[1]:
        raise ValueError(f"pair indices must differ in {descriptor!r}")
    return name, idx


def validate_measures(measures: Sequence[str], n_qubits: int) -> None:
    for desc in measures:
        _, idx = parse_measure(desc)
        for i in idx:
            if i > n_qubits:
                raise ValueError(f"measure {desc!r} references qubit {i} "
                                 f"but the chain has {n_qubits}")


def evaluate_measure(descriptor: str, rho: np.ndarray) -> float:
    """Evaluate one measure descriptor on a chain density matrix."""
    name, idx = parse_measure(descriptor)
    if name == "signal_x":
        return signal(rho, "x")
    if name == "signal_z":
        return signal(rho, "z")
    if name == "coherence":
        return single_qubit_coherence(rho, idx[0])
    if name == "mutual_information":
        return mutual_information(rho, idx[0], idx[1])
    if name == "eof":
        return pair_measures(rho, idx[0], idx[1]).eof
    if name == "min_pt_eig":
        return min_pt_eigenvalue(reduced_pair(rho, idx[0], idx[1]))
    if name == "classical_proxy":
        return pair_measures(rho, idx[0], idx[1]).classical_proxy
    raise AssertionError(name)


def make_grid(lo: float, hi: float, points: int, scale: str = "linear") -> tuple[float, ...]:
    """Strictly increasing grid with the given endpoints."""
    if points < 2:
        raise ValueError("a grid needs at least 2 points")
    if not lo < hi:
        raise ValueError("grid requires lo < hi")
    if scale == "linear":
        return tuple(np.linspace(lo, hi, points))
    if scale == "log":
        if lo <= 0:
            raise ValueError("log grid requires lo > 0")
        return tuple(np.geomspace(lo, hi, points))
    raise ValueError(f"unknown grid scale {scale!r}")


def apply_parameter(base: ChainParams, parameter: str, value: float) -> ChainParams:
    """Chain parameters with one swept quantity replaced."""
    if parameter == "gamma_all":
        return replace(base, gamma=(float(value),) * base.n_qubits)
    if parameter == "nbar":
        return replace(base, nbar=float(value))
    if parameter == "j":
        return replace(base, coupling=float(value))
    if parameter == "n_qubits":
        n = int(value)
        if n != value or n < 1:
            raise ValueError(f"n_qubits grid values must be positive integers, got {value}")
        if not base.is_uniform():
            raise ValueError("sweeping n_qubits requires uniform per-qubit parameters")
        return ChainParams.uniform(n, rabi=base.rabi[0], detuning=base.detuning[0],
                                   coupling=base.coupling, gamma=base.gamma[0],
                                   nbar=base.nbar)
    raise ValueError(f"unknown sweep parameter {parameter!r}")


@dataclass(frozen=True)
class SweepSpec:
    """Declarative description of a one-parameter steady-state sweep."""

    base: ChainParams
    parameter: str
    grid: tuple[float, ...]
    measures: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(float(v) for v in self.grid))
        object.__setattr__(self, "measures", tuple(self.measures))
        if self.parameter not in PARAMETERS:
            raise ValueError(f"unknown sweep parameter {self.parameter!r}")
        if len(self.grid) < 2:
            raise ValueError("grid must contain at least 2 points")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ValueError("grid must be strictly increasing")
        if not self.measures:
            raise ValueError("at least one measure is required")
        if self.parameter == "n_qubits":
            for v in self.grid:
                apply_parameter(self.base, "n_qubits", v)  # validates integrality
                validate_measures(self.measures, int(v))
        else:
            validate_measures(self.measures, self.base.n_qubits)


@dataclass
class MeasureRecord:
    """One grid point of a sweep; ``error`` is set when the solve failed."""

    parameter_value: float
    values: dict[str, float]
    error: str | None = None


def _sweep_point(spec: SweepSpec, value: float) -> MeasureRecord:
    params = apply_parameter(spec.base, spec.parameter, value)
    try:
        rho = steady_state(build_liouvillian(params))
    except (NonUniqueSteadyStateError, SolveFailedError) as exc:
        return MeasureRecord(value, {}, error=f"{type(exc).__name__}: {exc}")
    values = {}
    for desc in spec.measures:
        v = evaluate_measure(desc, rho)
        if not math.isfinite(v):
            return MeasureRecord(value, {}, error=f"non-finite value for {desc}")
        values[desc] = v
    return MeasureRecord(value, values)


def run_sweep(spec: SweepSpec, workers: int = 1) -> list[MeasureRecord]:
    """Steady state plus measures on every grid point, in grid order.

    Points are independent; with workers > 1 they are evaluated
    concurrently. Failed points are recorded with a reason instead of
    aborting the sweep. Results do not depend on ``workers``.
    """
    if workers <= 1:
        return [_sweep_point(spec, v) for v in spec.grid]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda v: _sweep_point(spec, v), spec.grid))


@dataclass(frozen=True)
class PeakResult:
    """Maximum of a scalar response over one parameter."""

    location: float
    value: float
    interior: bool  # False when the best point sits on the search boundary


def find_peak(objective: Callable[[float], float], interval: tuple[float, float],
              tol: float) -> PeakResult:
    """Locate the maximum of a scalar function on an interval.

    A 32-point bracketing scan guards against stray local maxima, then
    golden-section search refines the bracket to width <= tol. A
    maximum on the scan boundary (monotone, saturation-shaped response)
    is returned as-is with interior=False.
    """
    lo, hi = float(interval[0]), float(interval[1])
    if not lo < hi:
        raise ValueError("interval must satisfy lo < hi")
    if tol <= 0:
        raise ValueError("tol must be > 0")
    xs = np.linspace(lo, hi, 32)
    vals = [float(objective(x)) for x in xs]
    m = int(np.argmax(vals))
    if m == 0 or m == len(xs) - 1:
        return PeakResult(float(xs[m]), vals[m], False)
    a, b = float(xs[m - 1]), float(xs[m + 1])
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = float(objective(c)), float(objective(d))
    while (b - a) > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = float(objective(c))
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = float(objective(d))
    x = 0.5 * (a + b)
    return PeakResult(x, float(objective(x)), True)


def find_ppt_threshold(base: ChainParams, pair: tuple[int, int],
                       interval: tuple[float, float], tol: float = 1e-8) -> float:
    """Noise strength where the pair's smallest partial-transpose
    eigenvalue changes sign, by bisection on gamma_all.

    Requires opposite signs at the interval ends (NoSignChangeError
    otherwise).
    """
    i, j = pair

    def f(g: float) -> float:
        rho = steady_state(build_liouvillian(apply_parameter(base, "gamma_all", g)))
        return min_pt_eigenvalue(reduced_pair(rho, i, j))

    lo, hi = float(interval[0]), float(interval[1])
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise NoSignChangeError(
            f"no sign change on [{lo:g}, {hi:g}]: f(lo)={flo:.3e}, f(hi)={fhi:.3e}"
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class EnhancementRow:
    """Peak single-qubit response of one chain size."""

    n_qubits: int
    peak_gamma: float
    peak_value: float
    interior: bool


def array_enhancement(n_list: Sequence[int], base: ChainParams,
                      gamma_interval: tuple[float, float],
                      tol: float = 1e-4) -> list[EnhancementRow]:
    """Peak <sigma_x> of qubit 1 versus noise strength, per chain size.

    ``base`` must have uniform per-qubit parameters; its coupling and
    nbar are reused for every size. Rows come back sorted by size.
    """
    if not base.is_uniform():
        raise ValueError("array_enhancement requires uniform per-qubit parameters")
    rows = []
    for n in sorted(int(n) for n in n_list):
        params_n = ChainParams.uniform(n, rabi=base.rabi[0], detuning=base.detuning[0],
                                       coupling=base.coupling, gamma=base.gamma[0],
                                       nbar=base.nbar)

        def objective(g: float) -> float:
            rho = steady_state(build_liouvillian(apply_parameter(params_n, "gamma_all", g)))
            return single_qubit_coherence(rho, 1)

        peak = find_peak(objective, gamma_interval, tol)
        rows.append(EnhancementRow(n, peak.location, peak.value, peak.interior))
    return rows
