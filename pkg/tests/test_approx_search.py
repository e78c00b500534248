import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from adft.approx_search import (
    BetaRoundingSearch,
    MetricVector,
    avg_percent_abs_error,
    beta_grid,
    dominates,
    evaluate_metrics,
    frobenius_per_element,
    orthogonality_deviation,
    pareto_mask,
    pareto_search,
    search_report_csv,
    total_error_energy,
)
from adft.transforms import GaussianMatrix, TransformDimensionError, adft32_matrix, dft_matrix

F = dft_matrix(32).to_complex()
A = adft32_matrix().to_complex()


def test_error_energy_anchor():
    assert total_error_energy(A, F) == pytest.approx(332.231, abs=1e-3)
    assert abs(total_error_energy(A, F) - 332) < 1


def test_error_energy_zero_and_closed_forms():
    assert total_error_energy(F, F) == 0
    assert total_error_energy(np.zeros((32, 32)), F) == pytest.approx(1024 * np.pi)


def test_error_energy_matches_response_integral():
    # pi * ||D||_F^2 equals half the integrated squared response error
    w = np.linspace(-np.pi, np.pi, 4096, endpoint=False)
    d = (A - F) @ np.exp(-1j * np.outer(np.arange(32), w))
    integral = 0.5 * np.sum(np.abs(d) ** 2) * (2 * np.pi / w.size)
    assert integral == pytest.approx(total_error_energy(A, F), rel=1e-12)


def test_frobenius_anchor():
    assert abs(frobenius_per_element(A, F) - 1.004e-2) < 5e-5
    assert frobenius_per_element(F, F) == 0


def test_frobenius_closed_form():
    delta = 0.001
    assert frobenius_per_element(F + delta, F) == pytest.approx(delta / 32)


def test_avg_percent_error():
    assert avg_percent_abs_error(F, F) == pytest.approx(0, abs=1e-9)
    assert avg_percent_abs_error(-F, F) == pytest.approx(0, abs=1e-9)
    coarse = avg_percent_abs_error(A, F, 1024)
    fine = avg_percent_abs_error(A, F, 4096)
    assert coarse == pytest.approx(33.446, abs=1e-3)
    assert abs(coarse - fine) / fine < 0.01


def test_orthogonality():
    assert orthogonality_deviation(F) == pytest.approx(0, abs=1e-15)
    assert orthogonality_deviation(np.eye(32)) == 0
    assert orthogonality_deviation(A) == pytest.approx(17 / 240, abs=1e-12)
    assert orthogonality_deviation(np.zeros((32, 32))) == 1.0


def test_metric_shape_mismatch():
    with pytest.raises(TransformDimensionError):
        total_error_energy(np.eye(3), np.eye(4))


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, (4, 4), elements=st.floats(-10, 10)))
def test_orthogonality_in_unit_interval(m):
    v = orthogonality_deviation(m)
    assert 0.0 <= v <= 1.0


def test_dominates():
    assert dominates([1, 1], [1, 2])
    assert not dominates([1, 1], [1, 1])
    assert not dominates([0, 2], [1, 1])


def test_pareto_mask():
    pts = np.array([[1, 3], [2, 2], [3, 1], [3, 3], [2, 2]])
    np.testing.assert_array_equal(pareto_mask(pts), [True, True, True, False, True])


@settings(max_examples=30, deadline=None)
@given(arrays(np.float64, (12, 3), elements=st.floats(0, 10)))
def test_pareto_front_is_nonempty_and_nondominated(pts):
    mask = pareto_mask(pts)
    assert mask.any()
    for i in np.flatnonzero(mask):
        assert not any(dominates(pts[j], pts[i]) for j in range(len(pts)))


def test_beta_grid():
    g = beta_grid(0.01, 5.0, 0.01)
    assert len(g) == 500 and g[0] == 0.01 and g[-1] == 5.0
    with pytest.raises(ValueError):
        beta_grid(0.0, 1.0, 0.1)


def test_default_sweep_minimum_energy_is_adft():
    results = pareto_search()
    best = min(results, key=lambda r: r.metrics.total_error_energy)
    assert best.matrix == adft32_matrix()
    assert best.pareto_efficient
    assert 1.0 in best.betas
    assert sum(len(r.betas) for r in results) == 500
    assert len({r.matrix for r in results}) == len(results)


def test_single_beta_sweep():
    (r,) = pareto_search(1.0, 1.0, 0.01)
    assert r.matrix == adft32_matrix()
    assert r.pareto_efficient


def test_collapse_to_zero_matrix():
    results = pareto_search(0.01, 0.4, 0.01)
    assert len(results) == 1
    assert results[0].matrix == GaussianMatrix.zeros(32, 32)
    assert results[0].metrics.orthogonality_deviation == 1.0


def test_report_csv_one_row_per_beta():
    results = pareto_search(0.5, 1.5, 0.1)
    lines = search_report_csv(results).strip().splitlines()
    assert lines[0].startswith("beta,")
    assert len(lines) == 1 + 11


def test_estimator_wrapper():
    est = BetaRoundingSearch(beta_min=0.8, beta_max=1.2, step=0.05).fit()
    assert est.best_.matrix == adft32_matrix()
    assert all(r.pareto_efficient for r in est.pareto_front_)
    assert est.get_params()["step"] == 0.05
    assert est.report_csv().startswith("beta,")


def test_evaluate_metrics_vector():
    mv = evaluate_metrics(A, F)
    assert isinstance(mv, MetricVector)
    assert mv.as_array().shape == (4,)
