"""Thresholding and minimisation of the ridge-ratio curve.

Sub-threshold runs of the ratio curve are candidate intervals; inside each
run the leftmost minimiser, shifted by ``2*alpha``, is the estimated change
point. `detect` wraps this in the two-pass data-driven procedure (default
window and ridge, then a ridge rescaled by the average segment standard
deviation) and `detect_iterative` reapplies it inside estimated segments.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ._validation import InvalidWindowError, check_series, check_tau, min_length_for_window
from .config import DetectorConfig, default_config, default_ridge
from .curves import pulse_curve

__all__ = [
    "ThresholdInterval",
    "ChangePointEstimate",
    "threshold_intervals",
    "locate_changepoints",
    "refine_ridge",
    "detect",
    "detect_iterative",
    "default_config",
]


class ThresholdInterval(NamedTuple):
    """Maximal run ``[m, M]`` (1-based, inclusive) of sub-threshold ratios."""

    m: int
    M: int


@dataclass
class ChangePointEstimate:
    """Estimated change points and the evidence behind them.

    Attributes
    ----------
    locations : list of int
        Estimated change points, ascending, 1-based.
    intervals : list of ThresholdInterval
        The sub-threshold run each location was taken from.
    minima : list of float
        Ratio value at each run's minimiser.
    config_used : DetectorConfig
        Parameters of the pass that produced the estimate.
    """

    locations: list = field(default_factory=list)
    intervals: list = field(default_factory=list)
    minima: list = field(default_factory=list)
    config_used: DetectorConfig | None = None

    @property
    def k_hat(self) -> int:
        return len(self.locations)

    def to_dict(self) -> dict:
        return {
            "k_hat": self.k_hat,
            "locations": [int(z) for z in self.locations],
            "intervals": [[int(iv.m), int(iv.M)] for iv in self.intervals],
            "minima": [float(v) for v in self.minima],
            "config_used": None if self.config_used is None else self.config_used.to_dict(),
        }


def threshold_intervals(t, tau: float = 0.5) -> list:
    """Maximal runs of consecutive indices with ``t_i < tau``.

    Examples
    --------
    >>> threshold_intervals([1, 1, 0.2, 0.3, 1, 1], 0.5)
    [ThresholdInterval(m=3, M=4)]
    """
    tau = check_tau(tau)
    below = np.asarray(t, dtype=float) < tau
    if not below.any():
        return []
    edges = np.diff(np.concatenate(([0], below.astype(np.int8), [0])))
    starts = np.flatnonzero(edges == 1) + 1
    ends = np.flatnonzero(edges == -1)
    return [ThresholdInterval(int(a), int(b)) for a, b in zip(starts, ends)]


def _interval_minima(t: np.ndarray, intervals) -> tuple:
    positions, values = [], []
    for iv in intervals:
        seg = t[iv.m - 1 : iv.M]
        j = int(np.argmin(seg))  # argmin returns the first occurrence
        positions.append(iv.m + j)
        values.append(float(seg[j]))
    return positions, values


def locate_changepoints(t, intervals, alpha: int) -> list:
    """Leftmost minimiser of `t` inside each interval, plus ``2*alpha``."""
    t = np.asarray(t, dtype=float)
    positions, _ = _interval_minima(t, intervals)
    return [p + 2 * int(alpha) for p in positions]


def _estimate_from_curve(t: np.ndarray, config: DetectorConfig) -> ChangePointEstimate:
    intervals = threshold_intervals(t, config.tau)
    positions, values = _interval_minima(t, intervals)
    return ChangePointEstimate(
        locations=[p + 2 * config.alpha for p in positions],
        intervals=intervals,
        minima=values,
        config_used=config,
    )


def segment_sd_mean(x: np.ndarray, locations) -> float:
    """Average sample standard deviation over the segments cut at `locations`.

    Segments run ``[1, z_1 - 1], [z_1, z_2 - 1], ..., [z_K, n]``; those with
    fewer than two observations are skipped. Returns 0.0 if none qualify.
    """
    cuts = [0] + [int(z) - 1 for z in locations] + [x.size]
    sds = [np.std(x[a:b], ddof=1) for a, b in zip(cuts, cuts[1:]) if b - a >= 2]
    return float(np.mean(sds)) if sds else 0.0


def refine_ridge(
    x, estimate: ChangePointEstimate, alpha: int, mode: str = "literal",
    base_ridge: float | None = None,
) -> float:
    """Rescale the ridge by the average within-segment standard deviation.

    With ``c = base_ridge`` (default ``sqrt(ln n / alpha)``) and ``s`` the
    mean segment standard deviation, returns ``c / s`` in ``literal`` mode
    and ``c * s`` in ``scaled`` mode. If ``s`` is zero, `c` is returned.
    """
    x = check_series(x)
    c = default_ridge(x.size, alpha) if base_ridge is None else float(base_ridge)
    sigma_bar = segment_sd_mean(x, estimate.locations)
    if sigma_bar <= 0.0:
        return c
    if mode == "literal":
        return c / sigma_bar
    if mode == "scaled":
        return c * sigma_bar
    raise ValueError(f"unknown ridge scaling mode {mode!r}")


def detect(x, config: DetectorConfig | None = None, *, refine: bool = True) -> ChangePointEstimate:
    """Estimate the number and locations of change points.

    Runs a preliminary pass with `config` (or the data-driven default), then,
    when `refine` is set, rescales the ridge by the average segment standard
    deviation of the preliminary segmentation and runs a second pass. The
    returned estimate carries the configuration of the final pass.
    """
    x = check_series(x)
    if config is None:
        config = default_config(x.size)
    first = _estimate_from_curve(pulse_curve(x, config).t, config)
    if not refine:
        return first
    ridge = refine_ridge(x, first, config.alpha, config.ridge_scaling, base_ridge=config.ridge)
    final_config = config.replace(ridge=ridge)
    return _estimate_from_curve(pulse_curve(x, final_config).t, final_config)


def _merge_close(found: list, gap: int) -> list:
    """Collapse locations closer than `gap`, keeping the deeper minimum."""
    merged = []
    for item in sorted(found, key=lambda f: f[0]):
        if merged and item[0] - merged[-1][0] <= gap:
            if item[1] < merged[-1][1]:
                merged[-1] = item
            continue
        merged.append(item)
    return merged


def detect_iterative(
    x, config: DetectorConfig | None = None, *, refine: bool = True, max_depth: int = 32
) -> ChangePointEstimate:
    """Detect, then repeat inside every estimated segment until nothing is found.

    Sub-segments get their own data-driven window and ridge. Recursion on a
    segment stops when no ratio value falls below the threshold or when the
    segment is too short for the minimal window. Locations found at any depth
    are pooled; two within ``alpha`` (the top-level window) of each other are
    merged into the one with the smaller ratio minimum. Intervals found inside
    a sub-segment are reported shifted to whole-series positions.
    """
    x = check_series(x)
    top = detect(x, config, refine=refine)
    cfg = top.config_used
    found = list(zip(top.locations, top.minima, top.intervals))

    def recurse(start: int, stop: int, depth: int):
        # start/stop: 0-based half-open slice of x
        length = stop - start
        if depth >= max_depth or length < min_length_for_window(4):
            return
        try:
            sub_cfg = default_config(length, cfg.target, cfg.tau, cfg.ridge_scaling)
        except InvalidWindowError:
            return
        est = detect(x[start:stop], sub_cfg, refine=refine)
        if not est.k_hat:
            return
        locs = [start + z for z in est.locations]
        shifted = [ThresholdInterval(iv.m + start, iv.M + start) for iv in est.intervals]
        found.extend(zip(locs, est.minima, shifted))
        cuts = [start] + [z - 1 for z in locs] + [stop]
        for a, b in zip(cuts, cuts[1:]):
            recurse(a, b, depth + 1)

    if top.k_hat:
        cuts = [0] + [z - 1 for z in top.locations] + [x.size]
        for a, b in zip(cuts, cuts[1:]):
            recurse(a, b, 1)

    merged = _merge_close(found, cfg.alpha)
    return ChangePointEstimate(
        locations=[z for z, _, _ in merged],
        intervals=[iv for _, _, iv in merged],
        minima=[v for _, v, _ in merged],
        config_used=cfg,
    )
