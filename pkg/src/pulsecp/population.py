"""Exact population-level curves for piecewise-constant signals.

These are used as test oracles: `population_curves` evaluates the curve
definitions by brute force, `closed_form_dtilde` evaluates the piecewise
polynomial shape of the averaged difference around each isolated change,
and `pulse_pattern_check` verifies the dip-then-spike signature of the
ridge ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._validation import (
    InvalidWindowError,
    PulseError,
    UnsupportedGeometryError,
    check_ridge,
    check_target,
    check_window,
    min_length_for_window,
)
from .curves import PulseCurve


@dataclass(frozen=True)
class PiecewiseSignal:
    """Ground truth of a piecewise-constant mean or standard-deviation profile.

    Parameters
    ----------
    n : int
        Series length.
    boundaries : tuple of int
        Change points ``z_1 < ... < z_K``, 1-based; ``z_k`` is the first index
        of segment ``k + 1``.
    levels : tuple of float
        ``K + 1`` segment levels: means for ``target="mean"``, standard
        deviations for ``target="variance"``.
    target : {"mean", "variance"}
    """

    n: int
    boundaries: tuple
    levels: tuple
    target: str = "mean"

    def __post_init__(self):
        n = int(self.n)
        bounds = tuple(int(z) for z in self.boundaries)
        levels = tuple(float(v) for v in self.levels)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "boundaries", bounds)
        object.__setattr__(self, "levels", levels)
        check_target(self.target)
        if len(levels) != len(bounds) + 1:
            raise PulseError(
                f"{len(bounds)} boundaries need {len(bounds) + 1} levels, got {len(levels)}"
            )
        edges = (1,) + bounds + (n,)
        if any(a >= b for a, b in zip(edges, edges[1:])):
            raise PulseError(f"boundaries must satisfy 1 < z_1 < ... < z_K < n={n}")
        if not all(math.isfinite(v) for v in levels):
            raise PulseError("levels must be finite")
        if any(a == b for a, b in zip(levels, levels[1:])):
            raise PulseError("consecutive levels must differ")
        if self.target == "variance" and min(levels) <= 0:
            raise PulseError("standard-deviation levels must be positive")

    @classmethod
    def merged(cls, n, boundaries, levels, target="mean") -> "PiecewiseSignal":
        """Build a signal after dropping boundaries between equal levels."""
        boundaries = [int(z) for z in boundaries]
        levels = [float(v) for v in levels]
        if len(levels) != len(boundaries) + 1:
            raise PulseError(
                f"{len(boundaries)} boundaries need {len(boundaries) + 1} levels, "
                f"got {len(levels)}"
            )
        keep_z, keep_v = [], [levels[0]]
        for z, v in zip(boundaries, levels[1:]):
            if v != keep_v[-1]:
                keep_z.append(z)
                keep_v.append(v)
        return cls(n, tuple(keep_z), tuple(keep_v), target)

    @property
    def k(self) -> int:
        return len(self.boundaries)

    @property
    def jumps(self) -> np.ndarray:
        return np.abs(np.diff(self.levels))

    @property
    def min_jump(self) -> float:
        """Smallest jump magnitude (``nu``); ``inf`` without change points."""
        return float(self.jumps.min()) if self.k else math.inf

    @property
    def segment_lengths(self) -> np.ndarray:
        """Differences ``z_{k+1} - z_k`` with ``z_0 = 0`` and ``z_{K+1} = n``."""
        return np.diff((0,) + self.boundaries + (self.n,))

    @property
    def min_segment_length(self) -> int:
        return int(self.segment_lengths.min())

    def expand(self) -> np.ndarray:
        """Per-observation level, length `n`."""
        idx = np.arange(1, self.n + 1)
        seg = np.searchsorted(np.asarray(self.boundaries, dtype=int), idx, side="right")
        return np.asarray(self.levels)[seg]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "boundaries": list(self.boundaries),
            "levels": list(self.levels),
            "target": self.target,
        }


def population_curves(signal: PiecewiseSignal, alpha: int, ridge: float) -> PulseCurve:
    """Brute-force population curves of `signal`.

    Each window sum is formed directly from the expanded level sequence, with
    no running sums shared between indices. For the variance target the window
    scale is the root mean square of the per-observation standard deviations,
    which is what the sample window standard deviation estimates.
    """
    alpha = check_window(alpha, even=True)
    ridge = check_ridge(ridge)
    n = signal.n
    if n < min_length_for_window(alpha):
        raise InvalidWindowError(
            f"signal of length {n} is too short for window {alpha}; "
            f"need at least {min_length_for_window(alpha)}"
        )
    mu = signal.expand()

    def scale(i):  # 0-based start
        w = mu[i : i + alpha]
        if signal.target == "mean":
            return np.sum(w) / alpha
        return math.sqrt(np.sum(w * w) / alpha)

    n_d = n - 2 * alpha + 1
    d = np.array([scale(i) - scale(i + alpha) for i in range(n_d)])
    n_dt = n_d - alpha + 1
    dtilde = np.array([np.sum(d[i : i + alpha]) / alpha for i in range(n_dt)])
    off = 3 * alpha // 2
    t = np.array(
        [
            (abs(dtilde[i]) + ridge) / (abs(dtilde[i + off]) + ridge)
            for i in range(n_dt - off)
        ]
    )
    return PulseCurve(d=d, dtilde=dtilde, t=t, alpha=alpha, target=signal.target, ridge=ridge)


def _dtilde_shape(u: np.ndarray, alpha: int) -> np.ndarray:
    # |Dt| per unit jump, u measured from the peak of |D| (the index where
    # the second window starts at the change)
    a = float(alpha)
    out = np.zeros(u.shape)
    rise = (u > -2 * a) & (u <= -a)
    top = (u > -a) & (u <= 0)
    fall = (u > 0) & (u <= a)
    ur = u[rise]
    out[rise] = (ur + 2 * a) * (ur + 2 * a - 1) / (2 * a * a)
    ut = u[top]
    out[top] = (a * a / 2 - a * ut - ut * ut + ut + a / 2) / (a * a)
    uf = u[fall]
    out[fall] = (a - uf) * (a - uf + 1) / (2 * a * a)
    return out


def closed_form_dtilde(
    signal: PiecewiseSignal, alpha: int, convention: str = "display"
) -> np.ndarray:
    """Closed-form ``|Dt(i)|`` for a mean signal with well-separated changes.

    Around each change the curve is a quadratic rise over ``alpha`` indices,
    a concave cap peaking at ``3/4`` of the jump, and a quadratic fall.

    Parameters
    ----------
    signal : PiecewiseSignal
        Mean-target signal whose segments are all longer than ``4*alpha``.
    alpha : int
        Even window length.
    convention : {"display", "segment"}
        ``"display"`` places the peak of ``|D|`` at ``z_k`` itself, so the
        cap is centred on ``z_k - alpha/2``. ``"segment"`` uses the
        first-index-of-new-regime meaning of ``z_k`` and lines up with
        `population_curves` index for index (the cap then sits ``alpha``
        earlier).

    Returns
    -------
    ndarray of shape (n - 3*alpha + 2,)
    """
    alpha = check_window(alpha, even=True)
    if signal.target != "mean":
        raise PulseError("closed-form averaged differences exist for the mean target only")
    if convention not in ("display", "segment"):
        raise PulseError(f"unknown convention {convention!r}")
    if signal.k and signal.segment_lengths.min() <= 4 * alpha:
        raise UnsupportedGeometryError(
            f"segments of length {signal.min_segment_length} do not exceed "
            f"4*alpha={4 * alpha}; the closed-form regions overlap"
        )
    n_dt = signal.n - 3 * alpha + 2
    if n_dt < 1:
        raise InvalidWindowError(f"signal of length {signal.n} is too short for window {alpha}")
    i = np.arange(1, n_dt + 1, dtype=float)
    shift = 0 if convention == "display" else alpha
    out = np.zeros(n_dt)
    for z, beta in zip(signal.boundaries, signal.jumps):
        out += beta * _dtilde_shape(i - (z - shift), alpha)
    return out


@dataclass
class PatternReport:
    """Outcome of `pulse_pattern_check`.

    ``failures`` holds ``(change_index, message, offending_indices)`` tuples
    with 1-based curve indices; ``dips`` and ``peaks`` record the located
    extremum index and value per change point.
    """

    passed: bool = True
    failures: list = field(default_factory=list)
    dips: list = field(default_factory=list)
    peaks: list = field(default_factory=list)

    def fail(self, k, message, indices=()):
        self.passed = False
        self.failures.append((k, message, list(indices)))


def _plateau_minima(values: np.ndarray, atol: float) -> list:
    """Start positions of local-minimum plateaus (ties within `atol`)."""
    starts = []
    k = 0
    m = values.size
    while k < m:
        j = k
        while j + 1 < m and abs(values[j + 1] - values[k]) <= atol:
            j += 1
        left_higher = k > 0 and values[k - 1] > values[k] + atol
        right_higher = j + 1 < m and values[j + 1] > values[j] + atol
        if left_higher and right_higher:
            starts.append(k)
        k = j + 1
    return starts


def pulse_pattern_check(
    curves: PulseCurve, signal: PiecewiseSignal, alpha: int, ridge: float, eps: float = 1e-9
) -> PatternReport:
    """Verify the dip-then-spike shape of the ridge ratio at every change.

    For each change ``z`` the ratio must have exactly one local minimum in
    the dip region ``[z - 9a/2 + 1, z - 3a/2]``, no larger than
    ``c / (3/4 nu + c) + eps``; a value of at least ``(3/4 nu + c)/c - eps``
    must follow within ``3a/2 + 1`` indices; and the ratio must equal 1
    outside the windows ``(z - 9a/2 + 1, z)`` around all changes.
    """
    alpha = check_window(alpha, even=True)
    ridge = check_ridge(ridge)
    if signal.target != "mean":
        raise PulseError("the pulse pattern bounds are stated for the mean target")
    t = np.asarray(curves.t)
    m = t.size
    idx = np.arange(1, m + 1)
    report = PatternReport()
    tol = 1e-12 * max(1.0, float(np.max(t)))
    nu = signal.min_jump
    half = 3 * alpha // 2

    busy = np.zeros(m, dtype=bool)
    for k, z in enumerate(signal.boundaries, start=1):
        busy |= (idx > z - 9 * alpha // 2 + 1) & (idx < z)

        lo, hi = z - 9 * alpha // 2 + 1, z - half
        if lo < 1 or hi > m:
            report.fail(k, "dip region falls outside the ratio curve", [lo, hi])
            continue
        region = t[lo - 1 : hi]
        minima = _plateau_minima(region, tol)
        if len(minima) != 1:
            report.fail(k, f"expected one local minimum, found {len(minima)}",
                        [lo + s for s in minima])
            continue
        i_min = lo + minima[0]
        t_min = float(t[i_min - 1])
        report.dips.append((k, i_min, t_min))
        if t_min > ridge / (0.75 * nu + ridge) + eps:
            report.fail(k, f"minimum {t_min:.6g} is not deep enough", [i_min])
        window = t[i_min - 1 : min(m, i_min + half + 1)]
        j = int(np.flatnonzero(window >= window.max() - tol)[0])
        i_max, t_max = i_min + j, float(window[j])
        report.peaks.append((k, i_max, t_max))
        if t_max < (0.75 * nu + ridge) / ridge - eps:
            report.fail(k, f"maximum {t_max:.6g} after the dip is too low", [i_max])

    off_flat = ~busy & (np.abs(t - 1.0) > tol)
    if np.any(off_flat):
        report.fail(0, "ratio differs from 1 away from every change",
                    idx[off_flat][:20].tolist())
    return report
