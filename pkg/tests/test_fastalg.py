import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from adft.fastalg import (
    FactorizationError,
    FactorizedTransform,
    SparseStage,
    apply_fast,
    builtin_adft32_factorization,
    complexity_table,
    count_dense_operations,
    count_operations,
    flip_coefficient,
    parse_stage_table,
    stage_product,
)
from adft.transforms import GaussianMatrix, TransformDimensionError, adft32_matrix, apply_dense, dft_matrix

STAGE_ADDS = (60, 60, 28, 28, 60, 28, 24, 60)


@pytest.fixture(scope="module")
def fact():
    return builtin_adft32_factorization()


def test_eight_stages_of_size_32(fact):
    assert len(fact.stages) == 8
    assert fact.size == 32


def test_product_equals_adft(fact):
    assert stage_product(fact) == adft32_matrix()


def test_stage_entries_are_unit_coefficients(fact):
    for stage in fact.stages:
        assert stage.to_matrix().part_values() <= {-1, 0, 1}
        assert np.all(stage.row_counts() >= 1)


def test_complex_op_counts(fact):
    rep = count_operations(fact)
    assert tuple(rep.per_stage_real_additions) == STAGE_ADDS
    assert rep.total_real_additions == 348
    assert rep.real_multiplications == 0


def test_real_input_counts_halve(fact):
    rep = count_operations(fact, "real")
    assert rep.total_real_additions < 348
    assert rep.real_multiplications == 0


def test_dense_counts():
    adft = count_dense_operations(adft32_matrix())
    assert adft.real_multiplications == 0
    assert adft.total_real_additions == 2624
    dft = count_dense_operations(dft_matrix(32))
    assert dft.real_multiplications > 0


def test_bad_input_kind(fact):
    with pytest.raises(ValueError):
        count_operations(fact, "quaternion")


def test_complexity_table_rows(fact):
    rows = {r["method"]: r for r in complexity_table(fact)}
    assert rows["Fast Algorithm ADFT-32"]["additions"] == 348
    assert rows["Fast Algorithm ADFT-32"]["multiplications"] == 0
    assert rows["Radix-2 FFT"]["additions"] == 408


def test_apply_fast_matches_dense_integers(fact):
    rng = np.random.default_rng(1)
    x = rng.integers(-128, 128, (32, 200)) + 1j * rng.integers(-128, 128, (32, 200))
    np.testing.assert_array_equal(apply_fast(fact, x), apply_dense(adft32_matrix(), x))


def test_apply_fast_vector_and_impulse(fact):
    for j in (0, 5, 31):
        e = np.zeros(32)
        e[j] = 1
        np.testing.assert_array_equal(apply_fast(fact, e), adft32_matrix().to_complex()[:, j])


def test_apply_fast_rejects_wrong_length(fact):
    with pytest.raises(TransformDimensionError):
        apply_fast(fact, np.ones(16))


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, 32, elements=st.floats(-1e6, 1e6)), arrays(np.float64, 32, elements=st.floats(-1e6, 1e6)))
def test_apply_fast_close_to_dense_floats(re, im):
    x = re + 1j * im
    fast = apply_fast(builtin_adft32_factorization(), x)
    dense = apply_dense(adft32_matrix(), x)
    np.testing.assert_allclose(fast, dense, rtol=0, atol=1e-9 * max(1.0, np.abs(x).max()))


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_linearity(data):
    f = builtin_adft32_factorization()
    a = np.array(data.draw(st.lists(st.integers(-1000, 1000), min_size=32, max_size=32)))
    b = np.array(data.draw(st.lists(st.integers(-1000, 1000), min_size=32, max_size=32)))
    np.testing.assert_array_equal(apply_fast(f, a + 1j * b), apply_fast(f, a) + 1j * apply_fast(f, b))


def test_every_single_mutation_is_detected(fact):
    target = adft32_matrix()
    for s, stage in enumerate(fact.stages):
        for i in range(len(stage.triples)):
            assert stage_product(flip_coefficient(fact, s, i)) != target


def test_mutation_index_bounds(fact):
    with pytest.raises((IndexError, FactorizationError)):
        flip_coefficient(fact, 0, 10_000)


def test_json_round_trip(fact):
    back = FactorizedTransform.from_json(fact.to_json())
    assert back == fact
    assert stage_product(back) == adft32_matrix()


def test_parse_small_table():
    f = parse_stage_table("W1\n  +1: (1,1), (1,2), (2,1)\n  -1: (2,2)\n", size=2)
    m = stage_product(f).to_complex()
    np.testing.assert_array_equal(m, [[1, 1], [1, -1]])
    assert count_operations(f).total_real_additions == 4


def test_parse_j_coefficients():
    f = parse_stage_table("W1\n +j: (1,1)\n -j: (2,2)\n", size=2)
    np.testing.assert_array_equal(stage_product(f).to_complex(), [[1j, 0], [0, -1j]])
    assert count_operations(f).total_real_additions == 0


@pytest.mark.parametrize(
    "text",
    [
        "+1: (1,1)",  # no stage header
        "W1\n +2: (1,1)",  # bad coefficient
        "W1\n +1: (1,1), (1,1)\n -1: (2,2)",  # duplicate
        "W1\n +1: (3,1)\n +1: (1,1), (2,2)",  # out of range
        "W1\n +1: (1,1)",  # empty row 2
        "W1\n garbage",
    ],
)
def test_parse_errors(text):
    with pytest.raises(FactorizationError):
        parse_stage_table(text, size=2)


def test_identity_stage():
    s = SparseStage.identity(4)
    assert s.to_matrix() == GaussianMatrix.identity(4)
    x = np.arange(4) + 1j
    np.testing.assert_array_equal(s.apply(x), x)


def test_empty_factorization_rejected():
    with pytest.raises(FactorizationError):
        FactorizedTransform(())
