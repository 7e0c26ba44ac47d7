import math

import numpy as np
import pytest

import prop_checks as pc
from srq.analytic import steady_state_2q
from srq.dynamics import steady_state
from srq.measures import (
    concurrence,
    entanglement_of_formation,
    min_pt_eigenvalue,
    mutual_information,
    pair_measures,
    signal,
    single_qubit_coherence,
    von_neumann_entropy,
)
from srq.model import ChainParams, build_liouvillian, ground_state

BELL = np.zeros((4, 4), dtype=complex)
BELL[np.ix_([0, 3], [0, 3])] = 0.5


def binary_entropy(x):
    # Independent scalar oracle for the tests.
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


# Closed-form two-qubit steady state at r=1, s=1.5, written out entry by
# entry (k = 18) so the expected values below do not depend on the
# analytic module.
LITERAL_SS = np.array([
    [13 / 18, (3 + 2j) / 18, (3 + 2j) / 18, (-1 + 3j) / 18],
    [(3 - 2j) / 18, 2 / 18, 1 / 18, 1j / 18],
    [(3 - 2j) / 18, 1 / 18, 2 / 18, 1j / 18],
    [(-1 - 3j) / 18, -1j / 18, -1j / 18, 1 / 18],
], dtype=complex)

# Frozen from an independent eigenvalue computation on LITERAL_SS.
LITERAL_SS_MI = 0.237323819138763


def test_entropy_pure_state():
    psi = np.array([1.0, 1j, 0.0, 0.0]) / math.sqrt(2)
    rho = np.outer(psi, psi.conj())
    assert abs(von_neumann_entropy(rho)) < 1e-12


def test_entropy_maximally_mixed():
    assert abs(von_neumann_entropy(np.eye(4, dtype=complex) / 4) - 2.0) < 1e-12


def test_entropy_matches_binary_entropy_oracle():
    rho = np.diag([0.25, 0.75]).astype(complex)
    assert abs(von_neumann_entropy(rho) - binary_entropy(0.25)) < 1e-12


def test_mutual_information_product_state(rng):
    rho = np.kron(pc.random_density(rng, 2), pc.random_density(rng, 2))
    assert mutual_information(rho, 1, 2) < 1e-10


def test_mutual_information_bell_state():
    assert abs(mutual_information(BELL, 1, 2) - 2.0) < 1e-12


def test_mutual_information_of_literal_steady_state():
    assert abs(mutual_information(LITERAL_SS, 1, 2) - LITERAL_SS_MI) < 1e-12
    assert abs(mutual_information(steady_state_2q(1.0, 1.5), 1, 2)
               - LITERAL_SS_MI) < 1e-12


def test_mutual_information_rejects_bad_indices():
    with pytest.raises(IndexError):
        mutual_information(BELL, 1, 1)
    with pytest.raises(IndexError):
        mutual_information(BELL, 1, 3)


def test_concurrence_bell_state():
    assert abs(concurrence(BELL) - 1.0) < 1e-12


def test_concurrence_product_pure_state(rng):
    psi = np.kron([1.0, 0.0], [1.0 / math.sqrt(2), 1.0 / math.sqrt(2)])
    rho = np.outer(psi, psi).astype(complex)
    assert concurrence(rho) < 1e-9


def test_concurrence_werner_state():
    p = 0.8
    werner = p * BELL + (1 - p) * np.eye(4) / 4
    expected = max(0.0, (3 * p - 1) / 2)  # closed form for this family
    assert abs(concurrence(werner) - expected) < 1e-12
    # Brute-force cross-check through the non-Hermitian product.
    yy = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]])
    flipped = yy @ werner.conj() @ yy
    lam = np.sort(np.sqrt(np.clip(np.linalg.eigvals(werner @ flipped).real, 0, None)))[::-1]
    assert abs(concurrence(werner) - max(0.0, lam[0] - lam[1] - lam[2] - lam[3])) < 1e-9


def test_concurrence_local_unitary_invariance(rng):
    pc.check_concurrence_local_unitary_invariance(rng)


def test_eof_endpoints():
    assert entanglement_of_formation(0.0) == 0.0
    assert abs(entanglement_of_formation(1.0) - 1.0) < 1e-15


def test_eof_half_concurrence():
    expected = binary_entropy((1 + math.sqrt(0.75)) / 2)
    assert abs(entanglement_of_formation(0.5) - expected) < 1e-12


def test_eof_rejects_out_of_range():
    with pytest.raises(ValueError):
        entanglement_of_formation(1.01)
    with pytest.raises(ValueError):
        entanglement_of_formation(-0.01)


def test_min_pt_product_state(rng):
    rho = np.kron(pc.random_density(rng, 2), pc.random_density(rng, 2))
    assert min_pt_eigenvalue(rho) > -1e-10


def test_min_pt_bell_state():
    assert abs(min_pt_eigenvalue(BELL) - (-0.5)) < 1e-12


def test_min_pt_below_threshold_stays_positive():
    # r = 0.3 is below the separability threshold 1/(2 s) = 1/3 at s = 1.5.
    assert min_pt_eigenvalue(steady_state_2q(0.3, 1.5)) > -1e-9


def test_signal_ground_state_z():
    assert abs(signal(ground_state(3), "z") - 1.0) < 1e-12


def test_signal_maximally_mixed():
    rho = np.eye(4, dtype=complex) / 4
    assert abs(signal(rho, "x")) < 1e-12
    assert abs(signal(rho, "z")) < 1e-12


def test_signal_steady_state_value():
    p = ChainParams.uniform(2, rabi=1.0, coupling=1.5, gamma=1.0)
    rho = steady_state(build_liouvillian(p))
    assert abs(signal(rho, "x") - 1.0 / 3.0) < 1e-9


def test_signal_rejects_unknown_axis():
    with pytest.raises(ValueError):
        signal(ground_state(1), "y")


def test_single_qubit_coherence_plus_state():
    plus = 0.5 * np.array([[1.0, 1.0], [1.0, 1.0]], dtype=complex)
    assert abs(single_qubit_coherence(plus, 1) - 1.0) < 1e-12
    assert abs(single_qubit_coherence(ground_state(1), 1)) < 1e-12


def test_single_qubit_coherence_steady_state():
    p = ChainParams.uniform(2, rabi=1.0, coupling=1.5, gamma=1.0)
    rho = steady_state(build_liouvillian(p))
    for qubit in (1, 2):
        assert abs(single_qubit_coherence(rho, qubit) - 1.0 / 3.0) < 1e-9


def test_pair_measures_consistency():
    pm = pair_measures(steady_state_2q(1.0, 1.5), 1, 2)
    assert pm.pair == (1, 2)
    assert abs(pm.classical_proxy - (pm.mutual_information - pm.eof)) < 1e-15
    assert pm.entangled == (pm.min_pt_eigenvalue < -1e-9)
    assert (pm.eof > 1e-9) == (pm.concurrence > 1e-9)


def test_ppt_eof_equivalence(rng):
    pc.check_ppt_eof_equivalence(rng)


def test_mi_dominates_eof_on_steady_family():
    pc.check_mi_exceeds_eof_on_family()


def test_signal_equals_single_qubit_coherence():
    pc.check_signal_equals_coherence_n2()
