"""Slice regular power series over the quaternions and their regular diameters.

Submodules:

``quaternion``   arithmetic, imaginary units, slice coordinates
``series``       truncated series, *-product, regular composition, splitting
``geometry``     n-diameters of point clouds and reference constants
``optimize``     multistart compass search used by every functional
``functionals``  regular diameters, slice 3-diameter, ratio profiles
``verify``       theorem checks and the ensemble suite
``estimators``   scikit-learn style wrappers (imported on demand)
"""

from .functionals import (
    FunctionalReport,
    RadialProfile,
    phi_hat_3_profile,
    phi_profile,
    regular_diameter,
    regular_n_diameter,
    slice_3_diameter,
)
from .geometry import PointCloud, ball_n_diameter, disc_n_diameter, n_diameter_exact
from .optimize import OptimizerConfig
from .quaternion import DomainError, ImaginaryUnit, Quaternion
from .series import (
    DegenerateInputError,
    RegularSeries,
    TruncationError,
    evaluate,
    normalize_hat,
    star_product,
)
from .verify import EnsembleSpec, TheoremVerdict, random_series, run_suite

__version__ = "0.1.0"

__all__ = [
    "Quaternion",
    "ImaginaryUnit",
    "DomainError",
    "RegularSeries",
    "TruncationError",
    "DegenerateInputError",
    "evaluate",
    "star_product",
    "normalize_hat",
    "PointCloud",
    "n_diameter_exact",
    "disc_n_diameter",
    "ball_n_diameter",
    "OptimizerConfig",
    "FunctionalReport",
    "RadialProfile",
    "regular_diameter",
    "regular_n_diameter",
    "slice_3_diameter",
    "phi_profile",
    "phi_hat_3_profile",
    "EnsembleSpec",
    "TheoremVerdict",
    "random_series",
    "run_suite",
]
