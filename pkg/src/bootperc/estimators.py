"""scikit-learn style wrappers around the simulation and closure routines.

These are thin adapters: the fitted state is a Monte Carlo table, and
``predict`` reads it back through a monotone fit. Hyperparameters are stored
verbatim in ``__init__`` and validated in ``fit``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.isotonic import IsotonicRegression
from sklearn.utils.validation import check_is_fitted

from bootperc import _kernels
from bootperc._validation import (check_grid_stack, check_model, check_positive_int, check_probabilities,
                                  check_seed)
from bootperc.montecarlo import default_scan_grid, estimate_I, threshold_scan


class ClosureTransformer(TransformerMixin, BaseEstimator):
    """Map occupancy grids to their bootstrap closures.

    Parameters
    ----------
    model : {"standard", "modified"}
        Update rule.
    output : {"closure", "spanned", "times"}
        Return closed grids, a per-grid spanning flag, or activation times
        (-1 for sites that never activate).
    """

    def __init__(self, model="standard", output="closure"):
        self.model = model
        self.output = output

    def fit(self, X=None, y=None):
        self.model_ = check_model(self.model)
        if self.output not in ("closure", "spanned", "times"):
            raise ValueError("output must be 'closure', 'spanned' or 'times'")
        return self

    def transform(self, X):
        check_is_fitted(self, "model_")
        grids = check_grid_stack(X)
        modified = self.model_.value == "modified"
        times = np.stack([_kernels.activation_times(np.ascontiguousarray(g), modified) for g in grids])
        if self.output == "times":
            return times
        active = times != _kernels.NEVER
        return active.reshape(len(active), -1).all(axis=1) if self.output == "spanned" else active


class SpanningProbabilityEstimator(BaseEstimator):
    """Monte Carlo estimate of I(L, p) on a set of probabilities.

    ``fit(X)`` takes the probabilities (1-d or one column) and simulates each;
    ``predict`` evaluates an isotonic fit through the estimated means.

    Attributes
    ----------
    estimates_ : list of Estimate
        One per fitted probability, in input order.
    """

    def __init__(self, L=32, trials=1000, seed=0, model="standard", workers=None):
        self.L = L
        self.trials = trials
        self.seed = seed
        self.model = model
        self.workers = workers

    def fit(self, X, y=None):
        ps = check_probabilities(X)
        L = check_positive_int(self.L, "L")
        trials = check_positive_int(self.trials, "trials")
        seed = check_seed(self.seed)
        model = check_model(self.model)
        self.estimates_ = [estimate_I(L, float(p), trials, seed, model, self.workers) for p in ps]
        self.p_ = ps
        self.iso_ = IsotonicRegression(y_min=0.0, y_max=1.0, out_of_bounds="clip").fit(
            ps, [e.mean for e in self.estimates_])
        return self

    def predict(self, X):
        check_is_fitted(self, "iso_")
        return self.iso_.predict(check_probabilities(X))


class ThresholdEstimator(BaseEstimator):
    """p_half(L), the level where the spanning probability crosses 1/2.

    Attributes
    ----------
    p_half_ : dict
        ``L -> p_half``.
    scan_ : ScanResult
    """

    def __init__(self, L_list=(32, 64), trials=1000, seed=0, model="standard", grid_points=161,
                 workers=None):
        self.L_list = L_list
        self.trials = trials
        self.seed = seed
        self.model = model
        self.grid_points = grid_points
        self.workers = workers

    def fit(self, X=None, y=None):
        Ls = [check_positive_int(L, "L") for L in self.L_list]
        if not Ls or min(Ls) < 2:
            raise ValueError("L_list needs side lengths of at least 2")
        points = check_positive_int(self.grid_points, "grid_points")
        self.scan_ = threshold_scan(Ls, {L: default_scan_grid(L, points) for L in Ls},
                                    check_positive_int(self.trials, "trials"), check_seed(self.seed),
                                    check_model(self.model), self.workers)
        self.p_half_ = dict(self.scan_.p_half)
        return self

    def predict(self, X):
        """p_half for each side length in ``X`` (must have been fitted)."""
        check_is_fitted(self, "p_half_")
        try:
            return np.array([self.p_half_[int(L)] for L in np.ravel(X)])
        except KeyError as exc:
            raise ValueError(f"L = {exc.args[0]} was not part of the fit") from None
