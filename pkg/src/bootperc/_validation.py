"""Argument checks shared by the estimator wrappers and the CLI."""

from __future__ import annotations

import numbers

import numpy as np

from bootperc.lattice import Model


def check_probability(p, name: str = "p", closed: bool = False) -> float:
    if not isinstance(p, numbers.Real) or isinstance(p, bool):
        raise TypeError(f"{name} must be a real number")
    p = float(p)
    ok = 0.0 <= p <= 1.0 if closed else 0.0 < p < 1.0
    if not ok:
        raise ValueError(f"{name} must lie in {'[0, 1]' if closed else '(0, 1)'}, got {p}")
    return p


def check_positive_int(v, name: str) -> int:
    if isinstance(v, bool) or not isinstance(v, numbers.Integral):
        raise TypeError(f"{name} must be an integer")
    if v < 1:
        raise ValueError(f"{name} must be positive, got {v}")
    return int(v)


def check_seed(v) -> int:
    if isinstance(v, bool) or not isinstance(v, numbers.Integral) or not 0 <= v < 2 ** 64:
        raise ValueError("seed must be an integer in [0, 2^64)")
    return int(v)


def check_model(m) -> Model:
    try:
        return Model(m.value if isinstance(m, Model) else str(m).lower())
    except ValueError:
        raise ValueError(f"model must be 'standard' or 'modified', got {m!r}") from None


def check_probabilities(X, name: str = "X") -> np.ndarray:
    """1-d float array of probabilities in (0, 1); a column vector is flattened."""
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{name} must be a nonempty 1-d array or a single column")
    if np.any(~((arr > 0) & (arr < 1))):
        raise ValueError(f"{name} entries must lie in (0, 1)")
    return arr


def check_grid_stack(X) -> np.ndarray:
    """Boolean array of shape (n_samples, width, height); a single grid is promoted."""
    arr = np.asarray(X)
    if arr.ndim == 2:
        arr = arr[None]
    if arr.ndim != 3 or 0 in arr.shape:
        raise ValueError("expected grids of shape (n_samples, width, height)")
    if arr.dtype != bool:
        if not np.isin(arr, (0, 1)).all():
            raise ValueError("grid entries must be 0/1 or boolean")
        arr = arr.astype(bool)
    return arr
