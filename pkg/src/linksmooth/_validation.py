"""Input validation helpers shared by the functional core and the estimators."""

from __future__ import annotations

import numpy as np


def as_points(x, name: str = "X") -> np.ndarray:
    """Coerce to a float (n, d) array; 1-D input becomes a single column."""
    pts = np.asarray(getattr(x, "points", x), dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError(f"{name} must be a nonempty (n, d) array, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise ValueError(f"{name} contains non-finite entries")
    return pts


def as_query_point(q, dim: int, name: str = "query") -> np.ndarray:
    q = np.atleast_1d(np.asarray(q, dtype=float))
    if q.shape != (dim,):
        raise ValueError(f"{name} must be a length-{dim} point, got shape {q.shape}")
    return q


def check_symmetric_outcomes(outcomes, n: int) -> np.ndarray:
    """Validate an (n, n) outcome array with mirrored off-diagonal entries."""
    y = np.asarray(outcomes, dtype=float)
    if y.shape != (n, n):
        raise ValueError(f"outcomes must be an ({n}, {n}) array, got shape {y.shape}")
    iu, ju = np.triu_indices(n, k=1)
    if not np.array_equal(y[iu, ju], y[ju, iu]):
        raise ValueError("outcomes must satisfy Y[i, j] == Y[j, i] exactly")
    if not np.all(np.isfinite(y[iu, ju])):
        raise ValueError("outcomes contain non-finite off-diagonal entries")
    return y


def check_vector(y, n: int, name: str = "y") -> np.ndarray:
    y = np.asarray(y, dtype=float).reshape(-1)
    if y.shape != (n,):
        raise ValueError(f"{name} must have length {n}, got {y.shape[0]}")
    return y
