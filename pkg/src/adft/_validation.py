"""Input checks for the estimator layer (sklearn's check_array rejects complex data)."""

from __future__ import annotations

import numpy as np


def check_snapshots(X, n_features: int | None = None, dtype=np.complex128, name: str = "X") -> np.ndarray:
    """Validate a 2-D ``(n_samples, n_features)`` array and return it as ``dtype``."""
    arr = np.asarray(X)
    if arr.ndim == 1:
        raise ValueError(
            f"Expected 2D array for {name}, got 1D array instead. "
            "Reshape with X.reshape(1, -1) for a single snapshot."
        )
    if arr.ndim != 2:
        raise ValueError(f"Expected 2D array for {name}, got {arr.ndim}D")
    if arr.shape[0] == 0:
        raise ValueError(f"{name} has no samples")
    if np.issubdtype(dtype, np.floating) and np.iscomplexobj(arr):
        raise ValueError(f"{name} must be real-valued")
    arr = arr.astype(dtype, copy=False)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or infinity")
    if n_features is not None and arr.shape[1] != n_features:
        raise ValueError(f"{name} has {arr.shape[1]} features, expected {n_features}")
    return arr
