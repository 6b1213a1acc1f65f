"""Multiple change-point detection in means and variances with the ridge-ratio
("pulse") criterion."""

from ._validation import (
    InvalidDataError,
    InvalidRidgeError,
    InvalidWindowError,
    PulseError,
    UnsupportedGeometryError,
)
from .config import DetectorConfig, default_config
from .criterion import (
    ChangePointEstimate,
    ThresholdInterval,
    detect,
    detect_iterative,
    locate_changepoints,
    refine_ridge,
    threshold_intervals,
)
from .curves import (
    PulseCurve,
    double_average,
    mean_difference_curve,
    moving_sums,
    pulse_curve,
    ridge_ratio_curve,
    variance_difference_curve,
)
from .estimator import PulseDetector
from .harness import ReplicationReport, run_replications, tabulate
from .population import (
    PiecewiseSignal,
    closed_form_dtilde,
    population_curves,
    pulse_pattern_check,
)
from .simulate import (
    ErrorDistribution,
    ModelSpec,
    cp_local_model,
    cp_model,
    sample_series,
    variance_model,
)

__all__ = [
    "ChangePointEstimate",
    "DetectorConfig",
    "ErrorDistribution",
    "InvalidDataError",
    "InvalidRidgeError",
    "InvalidWindowError",
    "ModelSpec",
    "PiecewiseSignal",
    "PulseCurve",
    "PulseDetector",
    "PulseError",
    "ReplicationReport",
    "ThresholdInterval",
    "UnsupportedGeometryError",
    "closed_form_dtilde",
    "cp_local_model",
    "cp_model",
    "default_config",
    "detect",
    "detect_iterative",
    "double_average",
    "locate_changepoints",
    "mean_difference_curve",
    "moving_sums",
    "population_curves",
    "pulse_curve",
    "pulse_pattern_check",
    "refine_ridge",
    "ridge_ratio_curve",
    "run_replications",
    "sample_series",
    "tabulate",
    "threshold_intervals",
    "variance_difference_curve",
    "variance_model",
]
