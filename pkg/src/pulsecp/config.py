"""Detector configuration and the data-driven default parameter rule."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from ._validation import (
    InvalidWindowError,
    PulseError,
    check_ridge,
    check_target,
    check_tau,
    check_window,
    min_length_for_window,
)

RIDGE_SCALINGS = ("literal", "scaled")


@dataclass(frozen=True)
class DetectorConfig:
    """Tuning parameters of the ridge-ratio detector.

    Parameters
    ----------
    alpha : int
        Moving-window length. Must be even and at least 4 so that the
        ``3*alpha/2`` ratio offset is an integer.
    ridge : float
        Positive constant added to numerator and denominator of the ratio.
    tau : float, default=0.5
        Threshold in (0, 1) below which ratio values form candidate intervals.
    target : {"mean", "variance"}, default="mean"
    ridge_scaling : {"literal", "scaled"}, default="literal"
        How the ridge is rescaled by the average segment standard deviation
        during refinement: divided (``literal``) or multiplied (``scaled``).
    """

    alpha: int
    ridge: float
    tau: float = 0.5
    target: str = "mean"
    ridge_scaling: str = "literal"

    def __post_init__(self):
        alpha = check_window(self.alpha, even=True)
        if alpha < 4:
            raise InvalidWindowError(f"window must be at least 4, got {alpha}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "ridge", check_ridge(self.ridge))
        object.__setattr__(self, "tau", check_tau(self.tau))
        check_target(self.target)
        if self.ridge_scaling not in RIDGE_SCALINGS:
            raise PulseError(
                f"ridge_scaling must be one of {RIDGE_SCALINGS}, got {self.ridge_scaling!r}"
            )

    def replace(self, **changes) -> "DetectorConfig":
        return DetectorConfig(**{**asdict(self), **changes})

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "DetectorConfig":
        return cls(**data)


def default_window(n: int) -> int:
    """Largest even integer not exceeding ``n**0.6 / 3``, floored at 4."""
    alpha = int(math.floor(n**0.6 / 3.0))
    alpha -= alpha % 2
    return max(alpha, 4)


def default_ridge(n: int, alpha: int) -> float:
    return math.sqrt(math.log(n) / alpha)


def default_config(
    n: int, target: str = "mean", tau: float = 0.5, ridge_scaling: str = "literal"
) -> DetectorConfig:
    """Data-driven parameters: ``alpha = n**0.6/3`` (even), ``c = sqrt(ln n / alpha)``.

    Raises
    ------
    InvalidWindowError
        If `n` is too short for even the minimal window of 4.
    """
    n = int(n)
    alpha = default_window(n)
    if n < min_length_for_window(alpha):
        raise InvalidWindowError(
            f"series of length {n} is too short; need at least "
            f"{min_length_for_window(alpha)} observations for window {alpha}"
        )
    return DetectorConfig(
        alpha=alpha,
        ridge=default_ridge(n, alpha),
        tau=tau,
        target=target,
        ridge_scaling=ridge_scaling,
    )
