"""Seeded Monte-Carlo replications and ``K_hat - K`` tabulation."""

from __future__ import annotations

import csv
import io
import logging
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .config import default_config
from .criterion import detect, detect_iterative
from .simulate import SEED_RULE, ModelSpec, replication_rng, sample_series

logger = logging.getLogger(__name__)

BUCKETS = ("<=-3", "-2", "-1", "0", "1", "2", ">=3")
POLICIES = ("plain", "iterative")
MAX_FAILURE_RATE = 0.01


class HarnessError(RuntimeError):
    """Too many replications failed."""


def bucket_of(diff: int) -> int:
    """Column position of ``K_hat - K`` in `BUCKETS`."""
    return min(max(diff, -3), 3) + 3


@dataclass
class ReplicationReport:
    """Aggregated outcome of `run_replications`.

    `histogram` counts ``K_hat - K`` in the columns of `BUCKETS`. Location
    errors (largest ``|z_hat_k - z_k|``) are kept only for replications with
    ``K_hat == K``. Failed replications appear in `failures` as
    ``(replication, message)`` and are excluded from the histogram.
    """

    reps: int
    histogram: list = field(default_factory=lambda: [0] * len(BUCKETS))
    location_errors: list = field(default_factory=list)
    runtimes: list = field(default_factory=list)
    base_seed: int = 0
    seed_rule: str = SEED_RULE
    policy: str = "plain"
    failures: list = field(default_factory=list)
    alpha: int | None = None

    @property
    def exact_fraction(self) -> float:
        return self.histogram[3] / self.reps if self.reps else 0.0

    @property
    def median_location_error(self) -> float | None:
        return statistics.median(self.location_errors) if self.location_errors else None

    def to_dict(self, include_timing: bool = False) -> dict:
        """JSON-ready dict. Timings are omitted by default to keep output reproducible."""
        out = {
            "reps": self.reps,
            "policy": self.policy,
            "base_seed": self.base_seed,
            "seed_rule": self.seed_rule,
            "alpha": self.alpha,
            "buckets": list(BUCKETS),
            "histogram": list(self.histogram),
            "exact_fraction": self.exact_fraction,
            "median_location_error": self.median_location_error,
            "location_errors": list(self.location_errors),
            "failures": [list(f) for f in self.failures],
        }
        if include_timing:
            out["runtimes"] = list(self.runtimes)
        return out


def _one_replication(args):
    model, policy, base_seed, r = args
    start = time.perf_counter()
    try:
        x, truth = sample_series(model, replication_rng(base_seed, r))
        fn = detect_iterative if policy == "iterative" else detect
        est = fn(x, default_config(x.size, model.target))
        if est.k_hat == truth.k:
            err = max((abs(a - b) for a, b in zip(est.locations, truth.boundaries)), default=0)
        else:
            err = None
        return r, est.k_hat - truth.k, err, est.config_used.alpha, None, time.perf_counter() - start
    except Exception as exc:  # recorded per replication, judged in aggregate
        return r, None, None, None, f"{type(exc).__name__}: {exc}", time.perf_counter() - start


def worker_count(workers: int | None = None) -> int:
    """Resolve the worker count; ``PULSE_THREADS`` caps it when set."""
    if workers is None:
        workers = 1
    cap = os.environ.get("PULSE_THREADS")
    if cap:
        workers = min(workers, max(1, int(cap)))
    return max(1, int(workers))


def run_replications(
    model: ModelSpec,
    policy: str = "plain",
    reps: int = 200,
    base_seed: int = 0,
    workers: int | None = None,
) -> ReplicationReport:
    """Simulate `reps` series from `model`, detect, and score each against truth.

    Replication ``r`` always uses the stream ``replication_rng(base_seed, r)``
    and results are merged by replication index, so the report does not
    depend on `workers`.
    """
    if policy not in POLICIES:
        raise ValueError(f"policy must be one of {POLICIES}, got {policy!r}")
    if reps < 1:
        raise ValueError(f"reps must be at least 1, got {reps}")
    jobs = [(model, policy, base_seed, r) for r in range(reps)]
    n_workers = worker_count(workers)
    if n_workers == 1:
        results = [_one_replication(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(_one_replication, jobs, chunksize=max(1, reps // (4 * n_workers))))
    results.sort(key=lambda res: res[0])

    report = ReplicationReport(reps=reps, base_seed=base_seed, policy=policy)
    for r, diff, err, alpha, failure, elapsed in results:
        report.runtimes.append(elapsed)
        if failure is not None:
            report.failures.append((r, failure))
            continue
        report.alpha = alpha
        report.histogram[bucket_of(diff)] += 1
        if err is not None:
            report.location_errors.append(int(err))
    if len(report.failures) > MAX_FAILURE_RATE * reps:
        raise HarnessError(
            f"{len(report.failures)} of {reps} replications failed; first: {report.failures[0][1]}"
        )
    for r, msg in report.failures:
        logger.warning("replication %d failed: %s", r, msg)
    return report


TABLE_HEADER = list(BUCKETS) + ["exact_fraction", "median_location_error"]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    return format(float(value), ".12g")


def tabulate(report: ReplicationReport, header: bool = False) -> str:
    """CSV row: the seven bucket counts, the exact fraction, the median location error.

    Examples
    --------
    >>> tabulate(ReplicationReport(reps=200, histogram=[0, 0, 0, 200, 0, 0, 0]))
    '0,0,0,200,0,0,0,1,\\n'
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if header:
        writer.writerow(TABLE_HEADER)
    row = [str(c) for c in report.histogram]
    row += [_fmt(report.exact_fraction), _fmt(report.median_location_error)]
    writer.writerow(row)
    return buf.getvalue()


def read_table(text: str) -> list:
    """Parse `tabulate` output back into dicts keyed by `TABLE_HEADER`."""
    rows = list(csv.reader(io.StringIO(text)))
    if rows and rows[0] == TABLE_HEADER:
        rows = rows[1:]
    out = []
    for row in rows:
        counts = [int(v) for v in row[:7]]
        rec = dict(zip(BUCKETS, counts))
        rec["exact_fraction"] = float(row[7])
        rec["median_location_error"] = float(row[8]) if row[8] else None
        out.append(rec)
    return out
