import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dilatic.errors import DegenerateInput, DimensionMismatch, KrausBoundViolated, ZeroOutcome
from dilatic.interferometer import recompose
from dilatic.povm import compile_povm, detection_operators, validate_povm
from dilatic.simulator import (
    DensityMatrix,
    QuditState,
    apply_pure_map,
    apply_quantum_operation,
    dephase_and_mix,
    entanglement_filter,
    filtered_state,
    measure_povm,
    prepare_qudit,
    propagate,
    sample_counts,
    schmidt_coefficients,
)
from dilatic.dilation import dilate
from dilatic.interferometer import dilation_to_circuit

from conftest import random_contraction, random_povm, random_state, trine

seeds = st.integers(0, 2**32 - 1)


def test_qudit_state_rejects_overnormalised():
    with pytest.raises(ValueError):
        QuditState([1.0, 1.0])


def test_propagate_through_dilation_scalar():
    circ = dilation_to_circuit(dilate([[0.6]]))
    out = propagate(circ, [1.0]).amplitudes
    np.testing.assert_allclose(out, [0.6, 0.8], atol=1e-15)


def test_propagate_matches_recompose(rng):
    k = random_contraction(3, 4, rng)
    circ = dilation_to_circuit(dilate(k))
    x = random_state(4, rng)
    np.testing.assert_allclose(propagate(circ, x).amplitudes, recompose(circ)[:, :4] @ x, atol=1e-14)


def test_apply_pure_map_hand_value():
    state, p = apply_pure_map(np.diag([0.6, 1.0]), np.array([1, 1]) / np.sqrt(2))
    # (0.36 + 1) / 2
    assert p == pytest.approx(0.68, abs=1e-15)
    np.testing.assert_allclose(state.amplitudes, np.array([0.6, 1.0]) / np.sqrt(1.36), atol=1e-15)


def test_apply_pure_map_zero_outcome():
    with pytest.raises(ZeroOutcome):
        apply_pure_map(np.diag([0.0, 1.0]), [1.0, 0.0])


def test_apply_pure_map_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        apply_pure_map(np.eye(2), [1.0, 0, 0])


def test_quantum_operation_rejects_excess_kraus():
    with pytest.raises(KrausBoundViolated):
        apply_quantum_operation([np.eye(2), np.eye(2)], np.diag([1.0, 0.0]))


def test_quantum_operation_amplitude_damping():
    g = 0.3
    kraus = [np.array([[1, 0], [0, np.sqrt(1 - g)]]), np.array([[0, np.sqrt(g)], [0, 0]])]
    out, p = apply_quantum_operation(kraus, np.diag([0.0, 1.0]))
    assert p == pytest.approx(1.0, abs=1e-15)
    np.testing.assert_allclose(out.rho, np.diag([g, 1 - g]), atol=1e-15)


def test_trine_probabilities_on_e1():
    b = compile_povm(validate_povm(trine()))
    rec = measure_povm(b, [1.0, 0.0])
    np.testing.assert_allclose(rec.outcome_probs, [2 / 3, 1 / 6, 1 / 6], atol=1e-12)
    # post-measurement state of outcome 0 is e1 up to phase
    assert abs(abs(rec.outcome_states[0].amplitudes[0]) - 1) < 1e-12


def test_projective_measurement_exact(rng):
    b = compile_povm(validate_povm([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])]))
    psi = random_state(2, rng)
    rec = measure_povm(b, psi)
    np.testing.assert_allclose(rec.outcome_probs, np.abs(psi) ** 2, atol=1e-12)


def test_measure_povm_seeded_sampling_reproducible():
    b = compile_povm(validate_povm(trine()))
    r1 = measure_povm(b, [1.0, 0.0], shots=1000, seed=11)
    r2 = measure_povm(b, [1.0, 0.0], shots=1000, seed=11)
    assert np.array_equal(r1.counts, r2.counts) and r1.counts.sum() == 1000
    r3 = measure_povm(b, [1.0, 0.0], shots=10)
    assert r3.seed is not None
    np.testing.assert_array_equal(sample_counts(r3.outcome_probs, 10, r3.seed), r3.counts)


@settings(max_examples=25, deadline=None)
@given(n=st.integers(2, 4), dim=st.integers(1, 4), seed=seeds)
def test_measure_povm_born_rule(n, dim, seed):
    rng = np.random.default_rng(seed)
    els = random_povm(n, dim, rng)
    b = compile_povm(validate_povm(els))
    psi = random_state(dim, rng)
    rec = measure_povm(b, psi)
    expected = [np.vdot(psi, e @ psi).real for e in els]
    np.testing.assert_allclose(rec.outcome_probs, expected, atol=1e-9)
    assert abs(rec.outcome_probs.sum() - 1) < 1e-9


def test_dephase_and_mix_is_average_of_kraus_outputs(rng):
    els = random_povm(3, 3, rng)
    p = validate_povm(els)
    b = compile_povm(p)
    psi = random_state(3, rng)
    rho = np.outer(psi, psi.conj())
    out = dephase_and_mix(b, rho)
    dets = [d.a for d in detection_operators(p)]
    expected = sum(a @ rho @ a.conj().T for a in dets) / 3
    assert np.abs(out.rho - expected).max() < 1e-10
    assert out.trace == pytest.approx(1 / 3, abs=1e-10)
    assert out.normalized().trace == pytest.approx(1.0, abs=1e-12)


def test_prepare_qudit_column():
    target = np.array([0.6, 0.8j])
    circ = prepare_qudit(target)
    out = propagate(circ, [1.0]).amplitudes
    np.testing.assert_allclose(out[:2], target, atol=1e-14)


def test_prepare_subnormalised_leaks():
    circ = prepare_qudit([0.5, 0.5])
    out = propagate(circ, [1.0]).amplitudes
    assert np.sum(np.abs(out[2:]) ** 2) == pytest.approx(0.5, abs=1e-14)


def test_entanglement_filter_two_level():
    c = np.sqrt([0.8, 0.2])
    k, p = entanglement_filter(c)
    np.testing.assert_allclose(k.k, np.diag([0.5, 1.0]), atol=1e-15)
    assert p == pytest.approx(0.4, abs=1e-15)
    amp = filtered_state(k, c)
    assert np.linalg.norm(amp) ** 2 == pytest.approx(0.4, abs=1e-15)
    np.testing.assert_allclose(schmidt_coefficients(amp), [1 / np.sqrt(2)] * 2, atol=1e-12)


def test_entanglement_filter_three_level():
    k, p = entanglement_filter(np.sqrt([0.5, 0.3, 0.2]))
    assert p == pytest.approx(0.6, abs=1e-15)


def test_entanglement_filter_rejects_zero_coefficient():
    with pytest.raises(DegenerateInput):
        entanglement_filter([1.0, 0.0])


def test_density_matrix_validation():
    with pytest.raises(ValueError):
        DensityMatrix([[1.0, 0.5], [0.0, 0.0]])
    with pytest.raises(ValueError):
        DensityMatrix(np.eye(2))
