import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dilatic.dilation import apply_dilation, build_g, dilate, extend_sigma, validate_contraction
from dilatic.errors import NotContraction
from dilatic.linalg import unitarity_residual

from conftest import random_contraction

seeds = st.integers(0, 2**32 - 1)


def test_build_g_single_value():
    np.testing.assert_allclose(build_g([0.6]), [[0.6, 0.8], [0.8, -0.6]])


def test_build_g_with_padding_one():
    g = build_g([0.6, 1.0])
    expected = np.array(
        [[0.6, 0, 0.8, 0], [0, 1, 0, 0], [0.8, 0, -0.6, 0], [0, 0, 0, -1]], dtype=float
    )
    np.testing.assert_allclose(g, expected, atol=1e-16)
    assert unitarity_residual(g) < 1e-15


def test_build_g_rejects_out_of_range():
    with pytest.raises(ValueError):
        build_g([1.2])


def test_extend_sigma_pads_with_ones():
    np.testing.assert_allclose(extend_sigma([0.3], 1, 3), [0.3, 1.0, 1.0])
    np.testing.assert_allclose(extend_sigma([0.5, 0.2], 2, 2), [0.5, 0.2])


def test_dilate_scalar():
    d = dilate([[0.6]])
    np.testing.assert_allclose(d.u_big, [[0.6, 0.8], [0.8, -0.6]], atol=1e-15)
    assert d.thetas[0] == pytest.approx(0.9272952180016122, abs=1e-15)
    assert d.mode_count == 2


def test_dilate_zero_map():
    d = dilate(np.zeros((2, 2)))
    assert np.abs(d.u_big[:2, :2]).max() < 1e-15
    assert unitarity_residual(d.u_big) < 1e-14


def test_dilate_state_preparation_column():
    k = np.array([[1.0], [1.0]]) / np.sqrt(2)
    d = dilate(k)
    assert d.mode_count == 4
    np.testing.assert_allclose(d.u_big[:2, 0], k[:, 0], atol=1e-15)
    np.testing.assert_allclose(d.singular_values, [1.0], atol=1e-15)


def test_dilate_diag_example():
    d = dilate(np.diag([0.6, 1.0]))
    np.testing.assert_allclose(sorted(d.singular_values), [0.6, 1.0], atol=1e-15)
    np.testing.assert_allclose(d.u_big[:2, :2], np.diag([0.6, 1.0]), atol=1e-15)


def test_validate_contraction_reject_and_rescale():
    with pytest.raises(NotContraction):
        validate_contraction([[2.0]])
    k = validate_contraction([[2.0, 0.0], [0.0, 1.0]], policy="rescale")
    assert k.scale == pytest.approx(2.0)
    np.testing.assert_allclose(k.k, np.diag([1.0, 0.5]))


def test_validate_contraction_accepts_within_slack():
    k = validate_contraction([[1.0 + 5e-10]])
    d = dilate(k)
    assert d.singular_values[0] == 1.0
    assert unitarity_residual(d.u_big) < 1e-14


def test_apply_dilation_pads_vacuum():
    d = dilate([[0.6]])
    np.testing.assert_allclose(apply_dilation(d, [1.0]), [0.6, 0.8], atol=1e-15)


@settings(max_examples=80, deadline=None)
@given(n_in=st.integers(1, 8), n_out=st.integers(1, 8), seed=seeds)
def test_dilation_invariants(n_in, n_out, seed):
    k = random_contraction(n_out, n_in, np.random.default_rng(seed))
    d = dilate(k)
    assert d.mode_count == 2 * max(n_in, n_out)
    assert unitarity_residual(d.u_big) < 1e-10
    assert np.abs(d.u_big[:n_out, :n_in] - k).max() < 1e-10
    assert np.abs(d.u @ d.g @ d.v.conj().T - d.u_big).max() < 1e-14
    assert np.all((d.singular_values >= 0) & (d.singular_values <= 1))
    assert np.all(d.sigma_prime[min(n_in, n_out):] == 1.0)
    # blocks beyond the map's own ports only see the ancilla vacuum
    np.testing.assert_allclose(d.u[:n_out, n_out:], 0)
    np.testing.assert_allclose(d.v[:n_in, n_in:], 0)


@settings(max_examples=40, deadline=None)
@given(n_in=st.integers(1, 6), n_out=st.integers(1, 6), seed=seeds)
def test_dilation_preserves_norm(n_in, n_out, seed):
    rng = np.random.default_rng(seed)
    k = random_contraction(n_out, n_in, rng)
    x = rng.normal(size=n_in) + 1j * rng.normal(size=n_in)
    y = apply_dilation(dilate(k), x)
    assert abs(np.linalg.norm(y) - np.linalg.norm(x)) < 1e-12 * max(1.0, np.linalg.norm(x))
    np.testing.assert_allclose(y[:n_out], k @ x, atol=1e-10 * max(1.0, np.linalg.norm(x)))
