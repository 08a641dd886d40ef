import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dilatic.dilation import dilate
from dilatic.errors import NotUnitary
from dilatic.interferometer import (
    OpticalCircuit,
    beam_splitter,
    beam_splitter_bound,
    dilation_to_circuit,
    element_matrix,
    phase_shifter,
    reck_decompose,
    recompose,
    wrap_phase,
)

from conftest import haar_unitary, random_contraction

seeds = st.integers(0, 2**32 - 1)


def test_beam_splitter_block_convention():
    e = beam_splitter(0, 1, np.arccos(0.6), 0.0)
    np.testing.assert_allclose(element_matrix(e, 2), [[0.6, -0.8], [0.8, 0.6]], atol=1e-15)
    assert e.reflectivity == pytest.approx(0.64, abs=1e-15)


def test_beam_splitter_with_phase():
    t, p = 0.3, 1.1
    blk = beam_splitter(0, 1, t, p).block()
    c, s = np.cos(t), np.sin(t)
    np.testing.assert_allclose(
        blk, [[c, -s * np.exp(1j * p)], [s * np.exp(-1j * p), c]], atol=1e-15
    )
    assert np.abs(blk.conj().T @ blk - np.eye(2)).max() < 1e-15


def test_phase_shifter_embedding():
    m = element_matrix(phase_shifter(1, np.pi / 2), 3)
    np.testing.assert_allclose(m, np.diag([1, 1j, 1]), atol=1e-15)


def test_wrap_phase_interval():
    assert wrap_phase(np.pi) == pytest.approx(np.pi)
    assert wrap_phase(-np.pi) == pytest.approx(np.pi)
    assert wrap_phase(3 * np.pi / 2) == pytest.approx(-np.pi / 2)
    assert wrap_phase(0.25) == 0.25


@given(st.floats(-50, 50))
def test_wrap_phase_property(phi):
    w = wrap_phase(phi)
    assert -np.pi < w <= np.pi
    assert abs(np.exp(1j * w) - np.exp(1j * phi)) < 1e-12


def test_element_rejects_bad_modes():
    with pytest.raises(ValueError):
        beam_splitter(2, 1, 0.1)
    with pytest.raises(ValueError):
        OpticalCircuit(2, (beam_splitter(0, 2, 0.1),))


def test_recompose_order_is_first_element_rightmost():
    a, b = beam_splitter(0, 1, 0.4), phase_shifter(0, 0.7)
    u = recompose(OpticalCircuit(2, (a, b)))
    np.testing.assert_allclose(u, element_matrix(b, 2) @ element_matrix(a, 2), atol=1e-15)


def test_reck_identity_is_empty():
    assert reck_decompose(np.eye(4)).elements == ()


def test_reck_rotation_single_splitter():
    c = np.cos(np.pi / 4)
    u = np.array([[c, -c], [c, c]])
    circ = reck_decompose(u)
    assert len(circ.elements) == 1
    e = circ.elements[0]
    assert e.modes == (0, 1)
    assert e.theta == pytest.approx(np.pi / 4, abs=1e-15)
    assert e.phi == pytest.approx(0.0, abs=1e-15)


def test_reck_swap():
    circ = reck_decompose([[0, 1], [1, 0]])
    assert circ.beam_splitter_count() == 1
    np.testing.assert_allclose(recompose(circ), [[0, 1], [1, 0]], atol=1e-15)


def test_reck_diagonal_phases_only():
    u = np.diag(np.exp(1j * np.array([0.1, -0.2, 0.3])))
    circ = reck_decompose(u)
    assert circ.beam_splitter_count() == 0
    np.testing.assert_allclose(recompose(circ), u, atol=1e-15)


def test_reck_rejects_non_unitary():
    with pytest.raises(NotUnitary):
        reck_decompose([[1, 1], [0, 1]])


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 12), seed=seeds)
def test_reck_round_trip_property(n, seed):
    u = haar_unitary(n, np.random.default_rng(seed))
    circ = reck_decompose(u)
    assert np.abs(recompose(circ) - u).max() < 1e-10
    assert circ.beam_splitter_count() == n * (n - 1) // 2
    for e in circ.elements:
        assert 0 <= e.theta <= np.pi / 2 and -np.pi < e.phi <= np.pi


def test_beam_splitter_bound_values():
    assert beam_splitter_bound(1, 1) == 1
    assert beam_splitter_bound(2, 2) == 4
    assert beam_splitter_bound(3, 1) == 4
    assert beam_splitter_bound(1, 3) == 4


def test_dilation_circuit_scalar():
    circ = dilation_to_circuit(dilate([[0.6]]))
    assert circ.beam_splitter_count() == 1
    np.testing.assert_allclose(recompose(circ), [[0.6, 0.8], [0.8, -0.6]], atol=1e-15)
    g = [e for e in circ.module("G") if e.kind == "beam_splitter"]
    assert np.cos(g[0].theta) == pytest.approx(0.6, abs=1e-15)


def test_dilation_circuit_module_names():
    circ = dilation_to_circuit(dilate(np.diag([0.6, 1.0])))
    assert [m.name for m in circ.module_labels] == ["V^H", "G", "U"]
    # sigma = 1 needs no beam splitter in G
    assert circ.module_beam_splitters()["G"] == 1


@settings(max_examples=60, deadline=None)
@given(n_in=st.integers(1, 8), n_out=st.integers(1, 8), seed=seeds)
def test_dilation_circuit_matches_dense_and_bound(n_in, n_out, seed):
    k = random_contraction(n_out, n_in, np.random.default_rng(seed))
    d = dilate(k)
    circ = dilation_to_circuit(d)
    u = recompose(circ)
    assert np.abs(u - d.u_big).max() < 1e-10
    assert np.abs(u[:n_out, :n_in] - k).max() < 1e-10
    assert circ.beam_splitter_count() <= beam_splitter_bound(n_in, n_out)
    if n_in == n_out:
        # a generic square map reaches the bound exactly
        assert circ.beam_splitter_count() == beam_splitter_bound(n_in, n_out)
