"""Driven dissipative qubit chains: steady states, entanglement and
information measures, and their dependence on noise strength."""

__version__ = "0.1.0"

from .analytic import (
    AnalyticParams,
    coherence_2q,
    gamma_threshold,
    signal2,
    signal2_peak,
    single_qubit_detuned,
    steady_state_2q,
)
from .dynamics import (
    NonUniqueSteadyStateError,
    SolveFailedError,
    StepUnderflowError,
    Trajectory,
    evolve,
    steady_state,
    validate_density_matrix,
)
from .measures import (
    PairMeasures,
    concurrence,
    entanglement_of_formation,
    min_pt_eigenvalue,
    mutual_information,
    pair_measures,
    signal,
    single_qubit_coherence,
    von_neumann_entropy,
)
from .model import (
    ChainParams,
    JumpTerm,
    Superoperator,
    build_h_coh,
    build_jump_terms,
    build_liouvillian,
    embed,
    ground_state,
    validate_regime,
)
from .sweep import (
    EnhancementRow,
    MeasureRecord,
    NoSignChangeError,
    PeakResult,
    SweepSpec,
    array_enhancement,
    find_peak,
    find_ppt_threshold,
    make_grid,
    run_sweep,
)

__all__ = [
    "AnalyticParams", "ChainParams", "EnhancementRow", "JumpTerm",
    "MeasureRecord", "NoSignChangeError", "NonUniqueSteadyStateError",
    "PairMeasures", "PeakResult", "SolveFailedError", "StepUnderflowError",
    "Superoperator", "SweepSpec", "Trajectory", "array_enhancement",
    "build_h_coh", "build_jump_terms", "build_liouvillian", "coherence_2q",
    "concurrence", "embed", "entanglement_of_formation", "evolve",
    "find_peak", "find_ppt_threshold", "gamma_threshold", "ground_state",
    "make_grid", "min_pt_eigenvalue", "mutual_information", "pair_measures",
    "run_sweep", "signal", "signal2", "signal2_peak", "single_qubit_coherence",
    "single_qubit_detuned", "steady_state", "steady_state_2q",
    "validate_density_matrix", "validate_regime", "von_neumann_entropy",
]
