"""Scalar-scale rounding search for DFT approximations.

Candidates are ``round(beta * F)`` for ``beta`` on a uniform grid.  Each
distinct candidate is scored on four matrix metrics and the non-dominated
set is flagged.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .beampattern import omega_grid
from .transforms import GaussianMatrix, TransformDimensionError, dft_matrix, round_half_away

__all__ = [
    "BetaRoundingSearch",
    "MetricVector",
    "SearchResult",
    "avg_percent_abs_error",
    "beta_grid",
    "dominates",
    "evaluate_metrics",
    "frobenius_per_element",
    "orthogonality_deviation",
    "pareto_mask",
    "pareto_search",
    "search_report_csv",
    "total_error_energy",
]


def _pair(candidate, exact) -> tuple[np.ndarray, np.ndarray]:
    c = np.asarray(candidate, dtype=np.complex128)
    e = np.asarray(exact, dtype=np.complex128)
    if c.shape != e.shape:
        raise TransformDimensionError(f"shape mismatch {c.shape} vs {e.shape}")
    return c, e


def total_error_energy(candidate, exact) -> float:
    """``pi * ||candidate - exact||_F**2``.

    Equals half the squared row-filter response differences integrated over
    one period, ``0.5 * sum_k int_{-pi}^{pi} |H_k^c(w) - H_k^e(w)|**2 dw``.
    """
    c, e = _pair(candidate, exact)
    return float(np.pi * np.sum(np.abs(c - e) ** 2))


def frobenius_per_element(candidate, exact) -> float:
    c, e = _pair(candidate, exact)
    return float(np.linalg.norm(c - e) / c.size)


def avg_percent_abs_error(candidate, exact, grid_points: int = 1024) -> float:
    """Mean over bins of the integrated magnitude-response error, in percent of the exact response."""
    c, e = _pair(candidate, exact)
    w = omega_grid(grid_points)
    kernel = np.exp(-1j * np.outer(np.arange(c.shape[1]), w))
    hc, he = np.abs(c @ kernel), np.abs(e @ kernel)
    per_bin = np.abs(hc - he).sum(axis=1) / he.sum(axis=1)
    return float(100 * per_bin.mean())


def orthogonality_deviation(candidate) -> float:
    """``1 - ||diag(M M^H)||^2 / ||M M^H||_F^2``; 1 for matrices with a zero row."""
    m = np.asarray(candidate, dtype=np.complex128)
    if not np.all(np.any(m != 0, axis=1)):
        return 1.0
    g = m @ m.conj().T
    total = np.sum(np.abs(g) ** 2)
    return float(max(0.0, 1.0 - np.sum(np.abs(np.diag(g)) ** 2) / total))


@dataclass(frozen=True)
class MetricVector:
    frobenius_diff: float
    total_error_energy: float
    avg_percent_abs_error: float
    orthogonality_deviation: float

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.frobenius_diff, self.total_error_energy, self.avg_percent_abs_error, self.orthogonality_deviation]
        )


def evaluate_metrics(candidate, exact, grid_points: int = 1024) -> MetricVector:
    return MetricVector(
        frobenius_per_element(candidate, exact),
        total_error_energy(candidate, exact),
        avg_percent_abs_error(candidate, exact, grid_points),
        orthogonality_deviation(candidate),
    )


def dominates(a, b) -> bool:
    """``a`` is no worse than ``b`` everywhere and strictly better somewhere (minimization)."""
    a, b = np.asarray(a), np.asarray(b)
    return bool(np.all(a <= b) and np.any(a < b))


def pareto_mask(points) -> np.ndarray:
    """Boolean mask of non-dominated rows of a ``(n, m)`` objective array."""
    pts = np.asarray(points, dtype=float)
    le = np.all(pts[:, None, :] <= pts[None, :, :], axis=2)
    lt = np.any(pts[:, None, :] < pts[None, :, :], axis=2)
    dominated_by = le & lt  # [i, j]: i dominates j
    return ~dominated_by.any(axis=0)


@dataclass(frozen=True)
class SearchResult:
    beta: float
    matrix: GaussianMatrix
    metrics: MetricVector
    pareto_efficient: bool
    betas: tuple[float, ...] = field(default=())


def beta_grid(beta_min: float, beta_max: float, step: float) -> np.ndarray:
    """``beta_min, beta_min + step, ...`` up to and including ``beta_max``."""
    if not (step > 0 and 0 < beta_min <= beta_max):
        raise ValueError("need 0 < beta_min <= beta_max and step > 0")
    count = int(np.floor((beta_max - beta_min) / step + 1e-9)) + 1
    return np.round(beta_min + step * np.arange(count), 12)


def pareto_search(
    beta_min: float = 0.01,
    beta_max: float = 5.0,
    step: float = 0.01,
    exact: GaussianMatrix | None = None,
    grid_points: int = 1024,
) -> list[SearchResult]:
    """Sweep ``round(beta * F)`` and flag the Pareto-efficient candidates.

    Grid points that round to the same matrix collapse into one result whose
    ``beta`` is the smallest such scale; ``betas`` lists all of them.
    """
    exact = dft_matrix(32) if exact is None else exact
    f = exact.to_complex()
    seen: dict[GaussianMatrix, list[float]] = {}
    for beta in beta_grid(beta_min, beta_max, step):
        scaled = beta * f
        cand = GaussianMatrix(
            round_half_away(scaled.real).astype(np.int64), round_half_away(scaled.imag).astype(np.int64)
        )
        seen.setdefault(cand, []).append(float(beta))
    mats = list(seen)
    metrics = [evaluate_metrics(m.to_complex(), f, grid_points) for m in mats]
    mask = pareto_mask([mv.as_array() for mv in metrics])
    return [
        SearchResult(seen[m][0], m, mv, bool(flag), tuple(seen[m]))
        for m, mv, flag in zip(mats, metrics, mask)
    ]


def search_report_csv(results: list[SearchResult]) -> str:
    """One row per swept beta with the metrics of its candidate."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(
        ["beta", "frobenius_diff", "total_error_energy", "avg_percent_abs_error", "orthogonality_deviation", "pareto", "candidate"]
    )
    rows = []
    for idx, r in enumerate(results):
        for b in r.betas or (r.beta,):
            rows.append((b, r, idx))
    for b, r, idx in sorted(rows, key=lambda t: t[0]):
        m = r.metrics
        w.writerow(
            [f"{b:.2f}", f"{m.frobenius_diff:.8e}", f"{m.total_error_energy:.8e}",
             f"{m.avg_percent_abs_error:.8e}", f"{m.orthogonality_deviation:.8e}", int(r.pareto_efficient), idx]
        )
    return buf.getvalue()


class BetaRoundingSearch(BaseEstimator):
    """Estimator wrapper around :func:`pareto_search`.

    ``fit(X)`` takes the exact transform to approximate (the 32-point DFT when
    omitted).  After fitting, ``results_`` holds every distinct candidate,
    ``pareto_front_`` the efficient ones and ``best_`` the candidate of
    smallest total error energy.
    """

    def __init__(self, beta_min=0.01, beta_max=5.0, step=0.01, grid_points=1024):
        self.beta_min = beta_min
        self.beta_max = beta_max
        self.step = step
        self.grid_points = grid_points

    def fit(self, X=None, y=None):
        exact = None
        if X is not None:
            exact = X if isinstance(X, GaussianMatrix) else GaussianMatrix.from_complex(X)
        self.results_ = pareto_search(self.beta_min, self.beta_max, self.step, exact, self.grid_points)
        self.pareto_front_ = [r for r in self.results_ if r.pareto_efficient]
        self.best_ = min(self.results_, key=lambda r: r.metrics.total_error_energy)
        return self

    def report_csv(self) -> str:
        check_is_fitted(self, "results_")
        return search_report_csv(self.results_)
