import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adft.transforms import (
    GaussianMatrix,
    TransformDimensionError,
    adft32_matrix,
    apply_dense,
    dft_matrix,
    round_half_away,
    round_scaled_dft,
)


def test_adft_entries_are_trivial_gaussian_integers():
    m = adft32_matrix()
    assert m.shape == (32, 32)
    assert m.is_exact and m.denom == 1
    assert m.part_values() <= {-1, 0, 1}


def test_adft_known_entries():
    m = adft32_matrix()
    assert m.entry(0, 0) == 1
    assert m.entry(1, 3) == 1 - 1j
    # first row and column are all ones
    assert np.all(m.to_complex()[0] == 1)
    assert np.all(m.to_complex()[:, 0] == 1)


def test_adft_is_rounded_dft():
    assert round_scaled_dft(1.0) == adft32_matrix()


def test_adft_shares_dft_symmetry():
    m = adft32_matrix().to_complex()
    np.testing.assert_array_equal(m, m.T)
    # row 32 - k is the conjugate of row k
    np.testing.assert_array_equal(m[1:][::-1], m[1:].conj())


@pytest.mark.parametrize("n", [1, 2, 4, 8, 16, 32])
def test_dft_unitary_up_to_scale(n):
    f = dft_matrix(n).to_complex()
    np.testing.assert_allclose(f @ f.conj().T, n * np.eye(n), atol=1e-12)


def test_dft_quarter_turn_twiddles_exact():
    f = dft_matrix(32).to_complex()
    assert f[8, 1] == -1j
    assert f[16, 1] == -1
    assert f[24, 1] == 1j


def test_dft_rejects_bad_size():
    with pytest.raises(ValueError):
        dft_matrix(0)


@pytest.mark.parametrize(
    "x, expected",
    [(0.5, 1.0), (-0.5, -1.0), (1.5, 2.0), (-2.5, -3.0), (0.49, 0.0), (0.0, 0.0)],
)
def test_round_half_away(x, expected):
    assert round_half_away(np.array([x]))[0] == expected


@pytest.mark.parametrize("beta", [0.0, -1.0, float("nan")])
def test_round_scaled_rejects_nonpositive_beta(beta):
    with pytest.raises(ValueError):
        round_scaled_dft(beta)


def test_round_scaled_tiny_beta_gives_zero():
    assert round_scaled_dft(0.01) == GaussianMatrix.zeros(32, 32)


def test_round_scaled_large_beta_approaches_dft():
    beta = 1000.0
    m = round_scaled_dft(beta).to_complex() / beta
    assert np.abs(m - dft_matrix(32).to_complex()).max() < 1e-3


def test_exact_matmul_and_identity():
    a = adft32_matrix()
    assert a @ GaussianMatrix.identity(32) == a
    prod = a @ a
    np.testing.assert_array_equal(prod.to_complex(), a.to_complex() @ a.to_complex())


def test_matmul_shape_mismatch():
    with pytest.raises(TransformDimensionError):
        GaussianMatrix.identity(3) @ GaussianMatrix.identity(4)


def test_fractional_entries_reduce():
    m = GaussianMatrix(np.array([[2, 4]]), np.array([[0, 6]]), denom=4)
    assert m.denom == 2
    assert m.entry(0, 1) == 1 + 1.5j


def test_json_round_trip():
    m = adft32_matrix()
    data = json.loads(m.to_json())
    assert data["rows"] == 32 and len(data["entries"]) == 1024
    assert GaussianMatrix.from_json(m.to_json()) == m


def test_json_round_trip_fraction():
    m = GaussianMatrix(np.array([[1, 3]]), np.array([[-1, 0]]), denom=2)
    back = GaussianMatrix.from_json(m.to_json())
    assert back == m
    assert "1/2" in m.to_json()


def test_dft_json_reload_is_unitary():
    f = GaussianMatrix.from_json(dft_matrix(32).to_json()).to_complex()
    np.testing.assert_allclose(f @ f.conj().T, 32 * np.eye(32), atol=1e-9)


def test_differing_entries():
    a = adft32_matrix()
    b = -a
    assert a.differing_entries(b)[0] == (0, 0)
    assert a.differing_entries(a) == []


def test_csv_export_has_32_rows():
    lines = adft32_matrix().to_csv().strip().splitlines()
    assert sum(not ln.startswith("#") for ln in lines) >= 32


def test_apply_dense_shapes():
    m = adft32_matrix()
    x = np.arange(32)
    assert apply_dense(m, x).shape == (32,)
    assert apply_dense(m, np.ones((32, 5))).shape == (32, 5)
    with pytest.raises(TransformDimensionError):
        apply_dense(m, np.ones(31))


def test_apply_dense_impulse_selects_column():
    m = adft32_matrix()
    x = np.zeros(32)
    x[7] = 1
    np.testing.assert_array_equal(apply_dense(m, x), m.to_complex()[:, 7])


@settings(max_examples=50, deadline=None)
@given(st.floats(min_value=0.001, max_value=10.0, allow_nan=False))
def test_round_scaled_error_bounded(beta):
    m = round_scaled_dft(beta).to_complex()
    target = beta * dft_matrix(32).to_complex()
    assert np.abs(m.real - target.real).max() <= 0.5 + 1e-9
    assert np.abs(m.imag - target.imag).max() <= 0.5 + 1e-9


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-5, 5), min_size=8, max_size=8), st.integers(1, 6))
def test_gaussian_matrix_hash_eq_consistent(vals, denom):
    re = np.array(vals[:4]).reshape(2, 2)
    im = np.array(vals[4:]).reshape(2, 2)
    a = GaussianMatrix(re, im, denom)
    b = GaussianMatrix(re * 3, im * 3, denom * 3)
    assert a == b and hash(a) == hash(b)
