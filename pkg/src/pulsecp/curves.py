"""Moving-sum difference, double-average and ridge-ratio curves.

All curves use 1-based positions in their documentation: entry ``k`` of a
returned array holds the curve value at index ``i = k + 1``. Every operation
runs in O(n) time through prefix sums.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import (
    InvalidWindowError,
    check_ridge,
    check_series,
    check_target,
    check_window,
    min_length_for_window,
)
from .config import DetectorConfig

# Series longer than this get Kahan-compensated prefix sums.
COMPENSATED_THRESHOLD = 1_000_000


def _kahan_cumsum(x: np.ndarray) -> np.ndarray:
    out = np.empty(x.size + 1)
    out[0] = 0.0
    total = 0.0
    comp = 0.0
    for k, value in enumerate(x.tolist(), start=1):
        y = value - comp
        t = total + y
        comp = (t - total) - y
        total = t
        out[k] = total
    return out


def _prefix_sums(x: np.ndarray, compensated: bool | None = None) -> np.ndarray:
    if compensated is None:
        compensated = x.size > COMPENSATED_THRESHOLD
    if compensated:
        return _kahan_cumsum(x)
    out = np.empty(x.size + 1)
    out[0] = 0.0
    np.cumsum(x, out=out[1:])
    return out


def _window_sums(x: np.ndarray, alpha: int, compensated: bool | None = None) -> np.ndarray:
    prefix = _prefix_sums(x, compensated)
    return prefix[alpha:] - prefix[:-alpha]


def moving_sums(x, alpha: int, *, compensated: bool | None = None) -> np.ndarray:
    """Sums of `alpha` consecutive observations.

    Returns ``S(i) = x_i + ... + x_{i+alpha-1}`` for ``i = 1..n-alpha+1``.

    Parameters
    ----------
    x : array-like of shape (n,)
    alpha : int
        Window length, ``1 <= alpha <= n``.
    compensated : bool, optional
        Force (or disable) Kahan-compensated accumulation. By default it is
        used only for series longer than ``COMPENSATED_THRESHOLD``.

    Examples
    --------
    >>> moving_sums([1, 2, 3, 4], 2)
    array([3., 5., 7.])
    """
    x = check_series(x)
    alpha = check_window(alpha, x.size)
    return _window_sums(x, alpha, compensated)


def _require_pair_window(n: int, alpha: int) -> int:
    alpha = check_window(alpha)
    if 2 * alpha > n:
        raise InvalidWindowError(
            f"two adjacent windows of {alpha} need at least {2 * alpha} "
            f"observations, got {n}"
        )
    return alpha


def mean_difference_curve(x, alpha: int, *, compensated: bool | None = None) -> np.ndarray:
    """Difference of adjacent window means, ``D(i) = (S(i) - S(i+alpha)) / alpha``.

    Defined for ``i = 1..n-2*alpha+1``. The series is centred on its first
    value before accumulation, which leaves the result unchanged but keeps
    the prefix sums small.
    """
    x = check_series(x)
    alpha = _require_pair_window(x.size, alpha)
    sums = _window_sums(x - x[0], alpha, compensated)
    return (sums[:-alpha] - sums[alpha:]) / alpha


def window_variances(x, alpha: int, *, compensated: bool | None = None) -> np.ndarray:
    """Per-window mean squared deviation from the global sample mean."""
    x = check_series(x)
    alpha = check_window(alpha, x.size)
    centred = x - x.mean()
    var = _window_sums(centred * centred, alpha, compensated) / alpha
    # cancellation in prefix differences can leave tiny negatives
    return np.maximum(var, 0.0)


def variance_difference_curve(x, alpha: int, *, compensated: bool | None = None) -> np.ndarray:
    """Difference of adjacent window standard deviations.

    The deviations are taken around the global sample mean (the mean is
    assumed constant), so ``D(i) = sqrt(v(i)) - sqrt(v(i+alpha))`` with
    ``v(i) = mean((x_t - xbar)**2 for t in i..i+alpha-1)``.
    """
    x = check_series(x)
    alpha = _require_pair_window(x.size, alpha)
    sd = np.sqrt(window_variances(x, alpha, compensated=compensated))
    return sd[:-alpha] - sd[alpha:]


def double_average(d, alpha: int) -> np.ndarray:
    """Moving average of a difference curve over `alpha` consecutive entries."""
    d = check_series(d, "d")
    alpha = check_window(alpha, d.size)
    return _window_sums(d, alpha) / alpha


def ridge_ratio_curve(dtilde, alpha: int, ridge: float) -> np.ndarray:
    """Ridge ratio ``T(i) = (|Dt(i)| + c) / (|Dt(i + 3*alpha/2)| + c)``.

    Defined for ``i = 1..len(dtilde) - 3*alpha/2``; every value is strictly
    positive and equals 1 wherever both averaged differences vanish.
    """
    dtilde = check_series(dtilde, "dtilde")
    alpha = check_window(alpha, even=True)
    ridge = check_ridge(ridge)
    offset = 3 * alpha // 2
    if offset >= dtilde.size:
        raise InvalidWindowError(
            f"ratio offset {offset} leaves no values for an averaged curve of "
            f"length {dtilde.size}"
        )
    mag = np.abs(dtilde)
    return (mag[:-offset] + ridge) / (mag[offset:] + ridge)


@dataclass(frozen=True)
class PulseCurve:
    """Aligned difference, double-average and ridge-ratio curves of a series.

    ``d[k]``, ``dtilde[k]`` and ``t[k]`` all refer to index ``i = k + 1``;
    the three arrays have lengths ``n-2a+1``, ``n-3a+2`` and ``n-9a/2+2``.
    """

    d: np.ndarray
    dtilde: np.ndarray
    t: np.ndarray
    alpha: int
    target: str
    ridge: float

    @property
    def n(self) -> int:
        return self.d.size + 2 * self.alpha - 1


def pulse_curve(x, config: DetectorConfig) -> PulseCurve:
    """Compute all three curves for `x` under `config`.

    Raises
    ------
    InvalidWindowError
        If the series is shorter than ``9*alpha/2``; the message names the
        minimal admissible length.
    """
    x = check_series(x)
    check_target(config.target)
    alpha = config.alpha
    need = min_length_for_window(alpha)
    if x.size < need:
        raise InvalidWindowError(
            f"series of length {x.size} is too short for window {alpha}; "
            f"need at least {need} observations"
        )
    if config.target == "mean":
        d = mean_difference_curve(x, alpha)
    else:
        d = variance_difference_curve(x, alpha)
    dtilde = double_average(d, alpha)
    t = ridge_ratio_curve(dtilde, alpha, config.ridge)
    return PulseCurve(
        d=d, dtilde=dtilde, t=t, alpha=alpha, target=config.target, ridge=config.ridge
    )
