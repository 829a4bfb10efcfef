"""scikit-learn style wrappers.

The core API is functional. These classes adapt the parts that have a natural
estimator shape: the n-diameter of a point cloud, the regular diameters of a
single series, and a transformer that maps a batch of series to their ratio
profiles. Parameters follow the ``get_params``/``set_params`` protocol and are
validated at ``fit`` time.
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import functionals as fn
from .geometry import EXACT_BUDGET, PointCloud, n_diameter_exact, n_diameter_exchange
from .optimize import OptimizerConfig
from .series import RegularSeries

__all__ = ["NDiameter", "RegularDiameter", "PhiProfileTransformer"]


class _OptimizerParams:
    def _config(self) -> OptimizerConfig:
        return OptimizerConfig(sphere_grid=self.sphere_grid, multistarts=self.multistarts,
                               refinement_iterations=self.refinement_iterations,
                               tolerance=self.tolerance, seed=self.seed)


def _series_from_rows(X) -> RegularSeries:
    X = check_array(X, ensure_min_samples=1)
    if X.shape[1] != 4:
        raise ValueError(f"series coefficients need 4 columns, got {X.shape[1]}")
    return RegularSeries(X)


class NDiameter(_OptimizerParams, BaseEstimator):
    """n-diameter of the rows of ``X``, each row a quaternion ``(w, x, y, z)``.

    ``method="auto"`` enumerates all subsets when that fits the budget and uses
    the exchange heuristic otherwise.
    """

    def __init__(self, n: int = 2, method: str = "auto", multistarts: int = 8, sphere_grid: int = 64,
                 refinement_iterations: int = 500, tolerance: float = 1e-6, seed: int = 0):
        self.n = n
        self.method = method
        self.multistarts = multistarts
        self.sphere_grid = sphere_grid
        self.refinement_iterations = refinement_iterations
        self.tolerance = tolerance
        self.seed = seed

    def fit(self, X, y=None):
        X = check_array(X, ensure_min_samples=2)
        if X.shape[1] != 4:
            raise ValueError(f"points need 4 columns, got {X.shape[1]}")
        if self.method not in ("auto", "exact", "exchange"):
            raise ValueError(f"unknown method {self.method!r}")
        cloud = PointCloud(X)
        exact = self.method == "exact" or (
            self.method == "auto" and math.comb(len(cloud), self.n) <= EXACT_BUDGET)
        res = n_diameter_exact(cloud, self.n) if exact else n_diameter_exchange(cloud, self.n, self._config())
        self.value_ = res.value
        self.witnesses_ = res.witnesses
        self.method_ = res.method
        self.n_features_in_ = X.shape[1]
        return self


class RegularDiameter(_OptimizerParams, BaseEstimator):
    """Regular n-diameter (``kind="d"``) or slice 3-diameter (``kind="d_hat"``) of
    ``f(rB)``, where ``X`` holds the coefficients ``a_0, ..., a_N`` as rows."""

    def __init__(self, kind: str = "d", n: int = 2, r: float = 0.5, multistarts: int = 8,
                 sphere_grid: int = 64, refinement_iterations: int = 500, tolerance: float = 1e-6,
                 seed: int = 0):
        self.kind = kind
        self.n = n
        self.r = r
        self.multistarts = multistarts
        self.sphere_grid = sphere_grid
        self.refinement_iterations = refinement_iterations
        self.tolerance = tolerance
        self.seed = seed

    def fit(self, X, y=None):
        f = _series_from_rows(X)
        cfg = self._config()
        if self.kind == "d":
            report = fn.regular_n_diameter(f, self.n, self.r, cfg)
        elif self.kind == "d_hat":
            report = fn.slice_3_diameter(f, self.r, cfg)
        else:
            raise ValueError(f"unknown kind {self.kind!r}")
        self.report_ = report
        self.value_ = report.value
        self.n_features_in_ = 4
        return self


class PhiProfileTransformer(_OptimizerParams, TransformerMixin, BaseEstimator):
    """Maps each row of flattened coefficients ``(a_0, ..., a_N)`` to its ratio
    profile on ``r_values``; the output has one column per radius."""

    def __init__(self, r_values=(0.25, 0.5, 0.75), kind: str = "phi", n: int = 2, multistarts: int = 8,
                 sphere_grid: int = 64, refinement_iterations: int = 500, tolerance: float = 1e-6,
                 seed: int = 0):
        self.r_values = r_values
        self.kind = kind
        self.n = n
        self.multistarts = multistarts
        self.sphere_grid = sphere_grid
        self.refinement_iterations = refinement_iterations
        self.tolerance = tolerance
        self.seed = seed

    def fit(self, X, y=None):
        X = check_array(X)
        if X.shape[1] % 4:
            raise ValueError("row length must be a multiple of 4")
        if self.kind not in ("phi", "phi_hat"):
            raise ValueError(f"unknown kind {self.kind!r}")
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} columns, got {X.shape[1]}")
        cfg = self._config()
        out = np.empty((X.shape[0], len(self.r_values)))
        for i, row in enumerate(X):
            f = RegularSeries(row.reshape(-1, 4))
            if self.kind == "phi":
                prof = fn.phi_profile(f, self.n, self.r_values, cfg)
            else:
                prof = fn.phi_hat_3_profile(f, self.r_values, cfg)
            out[i] = prof.values
        return out

    def get_feature_names_out(self, input_features=None):
        return np.array([f"{self.kind}_{r!r}" for r in self.r_values], dtype=object)
