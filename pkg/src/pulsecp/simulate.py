"""Synthetic piecewise-constant models with seeded error draws."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from ._validation import PulseError
from .population import PiecewiseSignal

CP_BOUNDARIES = (161, 323, 485, 638, 801, 967, 1132, 1299, 1465, 1632, 1794)
CP_LEVELS = (1, 3, 2, -1, 1, 3, 2, 5, 1, -2, 3, 0)
CP_LOCAL_LEVELS = (0, 0.7, 0, -0.7, 0.7, 0, 2, 2.7, 0, -2.7, -2, 0)
CP_N = 2048

# Not taken from any published table: the standard-deviation levels of the
# variance experiment are unpublished, so this alternating pattern is a
# stand-in on the same boundaries.
DEFAULT_VARIANCE_LEVELS = tuple(1.0 if k % 2 == 0 else 3.0 for k in range(len(CP_BOUNDARIES) + 1))

ERROR_KINDS = ("gauss_unit", "gauss_var3", "uniform_scaled", "t3_scaled", "t3_unit")

# (base multiplier, variance of one base draw)
_ERROR_TABLE = {
    "gauss_unit": (1.0, 1.0),
    "gauss_var3": (math.sqrt(3.0), 3.0),
    "uniform_scaled": (7.0, 49.0 / 3.0),
    "t3_scaled": (3.0, 27.0),
    "t3_unit": (1.0, 3.0),
}

MEAN_SCENARIOS = {1: "gauss_unit", 2: "gauss_var3", 3: "uniform_scaled", 4: "t3_scaled"}
LOCAL_SCENARIOS = {1: "gauss_unit", 2: "gauss_var3", 3: "uniform_scaled", 4: "t3_unit"}
VARIANCE_SCENARIOS = MEAN_SCENARIOS

SEED_RULE = "seedsequence-spawn-key-v1"


@dataclass(frozen=True)
class ErrorDistribution:
    """IID error law. `scale` multiplies every draw; 0 gives noiseless data."""

    kind: str
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in ERROR_KINDS:
            raise PulseError(f"unknown error kind {self.kind!r}; expected one of {ERROR_KINDS}")
        if not (math.isfinite(self.scale) and self.scale >= 0):
            raise PulseError(f"error scale must be finite and non-negative, got {self.scale}")

    @property
    def variance(self) -> float:
        return self.scale**2 * _ERROR_TABLE[self.kind][1]

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        mult = _ERROR_TABLE[self.kind][0] * self.scale
        if self.kind in ("gauss_unit", "gauss_var3"):
            base = rng.standard_normal(size)
        elif self.kind == "uniform_scaled":
            base = rng.uniform(-1.0, 1.0, size)
        else:
            base = rng.standard_t(3, size)
        return mult * base


FORMS = ("additive_mean", "multiplicative_variance")


@dataclass(frozen=True)
class ModelSpec:
    """A signal, an error law, and how they combine.

    ``additive_mean`` draws ``X_i = mu_i + e_i``; ``multiplicative_variance``
    draws ``X_i = sigma_i * e_i``.
    """

    signal: PiecewiseSignal
    error: ErrorDistribution
    form: str = "additive_mean"

    def __post_init__(self):
        if self.form not in FORMS:
            raise PulseError(f"unknown model form {self.form!r}")
        expected = "mean" if self.form == "additive_mean" else "variance"
        if self.signal.target != expected:
            raise PulseError(f"form {self.form!r} needs a {expected} signal")

    @property
    def target(self) -> str:
        return self.signal.target

    def with_error_scale(self, scale: float) -> "ModelSpec":
        return ModelSpec(self.signal, ErrorDistribution(self.error.kind, scale), self.form)

    def to_dict(self) -> dict:
        return {
            "n": self.signal.n,
            "boundaries": list(self.signal.boundaries),
            "levels": list(self.signal.levels),
            "form": self.form,
            "error": self.error.kind,
            "error_scale": self.error.scale,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ModelSpec":
        try:
            form = data["form"]
            target = "mean" if form == "additive_mean" else "variance"
            signal = PiecewiseSignal(data["n"], data["boundaries"], data["levels"], target)
            error = ErrorDistribution(data["error"], float(data.get("error_scale", 1.0)))
        except KeyError as exc:
            raise PulseError(f"model spec is missing field {exc.args[0]!r}") from None
        return cls(signal, error, form)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ModelSpec":
        return cls.from_dict(json.loads(text))


def _scenario_kind(table: dict, scenario: int) -> str:
    if scenario not in table:
        raise PulseError(f"scenario must be one of {sorted(table)}, got {scenario!r}")
    return table[scenario]


def cp_model(scenario: int) -> ModelSpec:
    """Eleven mean changes on ``n = 2048`` with errors of scenario 1-4."""
    kind = _scenario_kind(MEAN_SCENARIOS, scenario)
    signal = PiecewiseSignal(CP_N, CP_BOUNDARIES, CP_LEVELS, "mean")
    return ModelSpec(signal, ErrorDistribution(kind), "additive_mean")


def cp_local_model(scenario: int) -> ModelSpec:
    """Weak-signal variant of `cp_model`; scenario 4 uses unscaled t3 errors."""
    kind = _scenario_kind(LOCAL_SCENARIOS, scenario)
    signal = PiecewiseSignal(CP_N, CP_BOUNDARIES, CP_LOCAL_LEVELS, "mean")
    return ModelSpec(signal, ErrorDistribution(kind), "additive_mean")


def variance_model(levels=None, boundaries=None, n: int = CP_N, scenario: int = 1) -> ModelSpec:
    """Multiplicative standard-deviation model ``X_i = sigma_i * e_i``.

    Without arguments the levels alternate 1, 3, 1, ... on the `cp_model`
    boundaries. Boundaries between equal levels are dropped from the truth.
    """
    kind = _scenario_kind(VARIANCE_SCENARIOS, scenario)
    if levels is None:
        levels = DEFAULT_VARIANCE_LEVELS
    if boundaries is None:
        boundaries = CP_BOUNDARIES
    if any(float(v) <= 0 for v in levels):
        raise PulseError("standard-deviation levels must be positive")
    signal = PiecewiseSignal.merged(n, boundaries, levels, "variance")
    return ModelSpec(signal, ErrorDistribution(kind), "multiplicative_variance")


def replication_rng(base_seed: int, replication: int) -> np.random.Generator:
    """Generator for one replication.

    Identical to the `replication`-th child of ``SeedSequence(base_seed).spawn``,
    so streams are independent across replications and do not depend on the
    order in which replications are run.
    """
    ss = np.random.SeedSequence(int(base_seed), spawn_key=(int(replication),))
    return np.random.default_rng(ss)


def sample_series(model: ModelSpec, seed=None) -> tuple:
    """Draw one series from `model`.

    Parameters
    ----------
    model : ModelSpec
    seed : int, numpy Generator or SeedSequence

    Returns
    -------
    x : ndarray of shape (n,)
    truth : PiecewiseSignal
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    level = model.signal.expand()
    eps = model.error.sample(rng, model.signal.n)
    if model.form == "additive_mean":
        x = level + eps
    else:
        x = level * eps
    return x, model.signal
