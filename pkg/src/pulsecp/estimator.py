"""scikit-learn compatible wrapper around the ridge-ratio detector."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_series
from .config import DetectorConfig, default_ridge, default_window
from .criterion import detect, detect_iterative
from .curves import pulse_curve


class PulseDetector(BaseEstimator):
    """Multiple change-point detector based on the ridge ratio of doubly
    averaged moving-sum differences.

    Parameters
    ----------
    alpha : int or None, default=None
        Even moving-window length. ``None`` picks the largest even integer
        below ``n**0.6 / 3`` (at least 4) from the series length at fit time.
    ridge : float or None, default=None
        Ridge constant of the first pass; ``None`` means ``sqrt(ln n / alpha)``.
    tau : float, default=0.5
        Threshold in (0, 1) on the ratio curve.
    target : {"mean", "variance"}, default="mean"
    ridge_scaling : {"literal", "scaled"}, default="literal"
        Whether refinement divides or multiplies the ridge by the average
        segment standard deviation.
    refine : bool, default=True
        Run the second pass with the rescaled ridge.
    iterative : bool, default=False
        Re-run detection inside every estimated segment.

    Attributes
    ----------
    changepoints_ : ndarray of int
        Estimated change points (1-based first index of each new segment).
    estimate_ : ChangePointEstimate
    curve_ : PulseCurve
        Curves of the final pass.
    config_ : DetectorConfig
        Configuration of the final pass.
    n_features_in_ : int

    Examples
    --------
    >>> import numpy as np
    >>> x = np.r_[np.zeros(300), np.ones(300) * 2]
    >>> PulseDetector(alpha=20, ridge=0.5, refine=False).fit(x).changepoints_
    array([281])
    """

    def __init__(
        self,
        alpha=None,
        ridge=None,
        tau=0.5,
        target="mean",
        ridge_scaling="literal",
        refine=True,
        iterative=False,
    ):
        self.alpha = alpha
        self.ridge = ridge
        self.tau = tau
        self.target = target
        self.ridge_scaling = ridge_scaling
        self.refine = refine
        self.iterative = iterative

    def _config_for(self, n: int) -> DetectorConfig:
        alpha = default_window(n) if self.alpha is None else self.alpha
        ridge = default_ridge(n, alpha) if self.ridge is None else self.ridge
        return DetectorConfig(alpha, ridge, self.tau, self.target, self.ridge_scaling)

    def _detect(self, x):
        config = self._config_for(x.size)
        fn = detect_iterative if self.iterative else detect
        return fn(x, config, refine=self.refine)

    def fit(self, X, y=None):
        """Detect change points in `X`, a series of shape (n,) or (n, 1)."""
        x = check_series(X, "X")
        self.estimate_ = self._detect(x)
        self.config_ = self.estimate_.config_used
        self.curve_ = pulse_curve(x, self.config_)
        self.changepoints_ = np.asarray(self.estimate_.locations, dtype=int)
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        """Segment label (0, 1, ..., K_hat) of every observation of `X`.

        Change points are detected on `X` itself with the estimator's
        parameters; a series carries no information about another one.
        """
        x = check_series(X, "X")
        locations = self._detect(x).locations
        return segment_labels(x.size, locations)

    def fit_predict(self, X, y=None):
        self.fit(X)
        return segment_labels(self.curve_.n, self.changepoints_)

    def transform(self, X):
        """Curves ``(D, Dt, T)`` aligned to the observations, NaN where undefined.

        Uses the fitted configuration; returns shape (n, 3).
        """
        check_is_fitted(self, "config_")
        x = check_series(X, "X")
        curve = pulse_curve(x, self.config_)
        out = np.full((x.size, 3), np.nan)
        out[: curve.d.size, 0] = curve.d
        out[: curve.dtilde.size, 1] = curve.dtilde
        out[: curve.t.size, 2] = curve.t
        return out

    def fit_transform(self, X, y=None):
        return self.fit(X).transform(X)


def segment_labels(n: int, locations) -> np.ndarray:
    """Label observations ``1..n`` by the segment they fall in."""
    idx = np.arange(1, n + 1)
    return np.searchsorted(np.asarray(locations, dtype=int), idx, side="right")
