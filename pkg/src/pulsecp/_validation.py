"""Input validation helpers and the package's exception types."""

from __future__ import annotations

import numbers

import numpy as np


class PulseError(ValueError):
    """Base class for validation errors raised by pulsecp."""


class InvalidDataError(PulseError):
    """The series is empty, not one-dimensional, or contains NaN/inf."""


class InvalidWindowError(PulseError):
    """The moving window does not fit the data or has the wrong parity."""


class InvalidRidgeError(PulseError):
    """The ridge constant is not strictly positive."""


class UnsupportedGeometryError(PulseError):
    """A closed-form evaluation was requested on overlapping change regions."""


def check_series(x, name: str = "x") -> np.ndarray:
    """Return `x` as a finite 1-D float64 array.

    A single-column 2-D input of shape ``(n, 1)`` is accepted and flattened so
    that sklearn-style column vectors can be passed straight through.
    """
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise InvalidDataError(
            f"{name} must be one-dimensional, got shape {arr.shape}"
        )
    if arr.size == 0:
        raise InvalidDataError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        bad = int(np.flatnonzero(~np.isfinite(arr))[0]) + 1
        raise InvalidDataError(f"{name} contains a non-finite value at index {bad}")
    return arr


def check_window(alpha, length: int | None = None, *, even: bool = False) -> int:
    if isinstance(alpha, bool) or not isinstance(alpha, numbers.Integral):
        raise InvalidWindowError(f"window must be an integer, got {alpha!r}")
    alpha = int(alpha)
    if alpha < 1:
        raise InvalidWindowError(f"window must be positive, got {alpha}")
    if even and alpha % 2:
        raise InvalidWindowError(f"window must be even, got {alpha}")
    if length is not None and alpha > length:
        raise InvalidWindowError(
            f"window {alpha} exceeds the input length {length}"
        )
    return alpha


def check_ridge(ridge) -> float:
    ridge = float(ridge)
    if not (np.isfinite(ridge) and ridge > 0):
        raise InvalidRidgeError(f"ridge must be a positive finite number, got {ridge}")
    return ridge


def check_tau(tau) -> float:
    tau = float(tau)
    if not 0.0 < tau < 1.0:
        raise PulseError("tau must be in (0,1)")
    return tau


def check_target(target: str) -> str:
    if target not in ("mean", "variance"):
        raise PulseError(f"target must be 'mean' or 'variance', got {target!r}")
    return target


def min_length_for_window(alpha: int) -> int:
    """Smallest series length whose ridge-ratio curve is non-empty for `alpha`."""
    return (9 * alpha + 1) // 2
