import numpy as np
import pytest

from pulsecp import ReplicationReport, run_replications, tabulate
from pulsecp import harness
from pulsecp.harness import BUCKETS, HarnessError, bucket_of, read_table, worker_count
from pulsecp.simulate import cp_local_model, cp_model


@pytest.mark.parametrize("diff, col", [(-7, 0), (-3, 0), (-2, 1), (-1, 2), (0, 3), (1, 4),
                                       (2, 5), (3, 6), (40, 6)])
def test_bucket_of(diff, col):
    assert bucket_of(diff) == col


def test_zero_noise_single_rep():
    rep = run_replications(cp_model(1).with_error_scale(0.0), reps=1, base_seed=0)
    assert rep.histogram == [0, 0, 0, 1, 0, 0, 0]
    assert len(rep.location_errors) == 1
    assert rep.location_errors[0] <= 32
    assert rep.alpha == 32


def test_report_invariants():
    rep = run_replications(cp_model(2), reps=40, base_seed=3)
    assert sum(rep.histogram) + len(rep.failures) == rep.reps == 40
    assert len(rep.location_errors) == rep.histogram[3]
    assert len(rep.runtimes) == 40
    assert rep.exact_fraction == rep.histogram[3] / 40


def test_same_call_same_report():
    a = run_replications(cp_local_model(1), reps=30, base_seed=11)
    b = run_replications(cp_local_model(1), reps=30, base_seed=11)
    assert a.to_dict() == b.to_dict()


def test_workers_do_not_change_report():
    one = run_replications(cp_model(3), reps=24, base_seed=5, workers=1)
    four = run_replications(cp_model(3), reps=24, base_seed=5, workers=4)
    assert one.to_dict() == four.to_dict()
    assert tabulate(one) == tabulate(four)


def test_prefix_of_replications_is_stable():
    # replication r depends only on (base_seed, r)
    short = run_replications(cp_model(1), reps=10, base_seed=2)
    long = run_replications(cp_model(1), reps=20, base_seed=2)
    assert sum(short.histogram) == 10
    errs_short = short.location_errors
    assert long.location_errors[: len(errs_short)] == errs_short


def test_iterative_policy_runs():
    rep = run_replications(cp_model(1), policy="iterative", reps=5, base_seed=1)
    assert rep.policy == "iterative" and sum(rep.histogram) == 5


def test_bad_arguments():
    with pytest.raises(ValueError):
        run_replications(cp_model(1), reps=0)
    with pytest.raises(ValueError):
        run_replications(cp_model(1), policy="greedy", reps=1)


def test_worker_count_env_cap(monkeypatch):
    monkeypatch.setenv("PULSE_THREADS", "2")
    assert worker_count(8) == 2
    monkeypatch.delenv("PULSE_THREADS")
    assert worker_count(8) == 8
    assert worker_count(None) == 1


# -- failures ----------------------------------------------------------------

def _flaky(fail_on):
    real = harness.detect

    def fake(x, config=None, **kw):
        if fake.calls in fail_on:
            fake.calls += 1
            raise FloatingPointError("boom")
        fake.calls += 1
        return real(x, config, **kw)

    fake.calls = 0
    return fake


def test_single_failure_is_recorded(monkeypatch):
    monkeypatch.setattr(harness, "detect", _flaky({3}))
    rep = run_replications(cp_model(1), reps=200, base_seed=0)
    assert rep.failures == [(3, "FloatingPointError: boom")]
    assert sum(rep.histogram) == 199


def test_too_many_failures_raise(monkeypatch):
    monkeypatch.setattr(harness, "detect", _flaky({0, 1, 2}))
    with pytest.raises(HarnessError, match="3 of 200"):
        run_replications(cp_model(1), reps=200, base_seed=0)


# -- tabulate ----------------------------------------------------------------

def test_tabulate_all_exact():
    rep = ReplicationReport(reps=200, histogram=[0, 0, 0, 200, 0, 0, 0])
    line = tabulate(rep)
    assert line.startswith("0,0,0,200,0,0,0")
    assert line == "0,0,0,200,0,0,0,1,\n"


def test_tabulate_column_order():
    rep = ReplicationReport(reps=1000, histogram=[0, 2, 46, 645, 264, 39, 4],
                            location_errors=[3, 5, 9])
    assert tabulate(rep) == "0,2,46,645,264,39,4,0.645,5\n"


def test_tabulate_header():
    text = tabulate(ReplicationReport(reps=1, histogram=[0, 0, 0, 1, 0, 0, 0]), header=True)
    assert text.splitlines()[0] == ",".join(BUCKETS) + ",exact_fraction,median_location_error"


def test_table_round_trip():
    rep = run_replications(cp_model(2), reps=25, base_seed=8)
    (back,) = read_table(tabulate(rep, header=True))
    assert [back[b] for b in BUCKETS] == rep.histogram
    assert back["exact_fraction"] == rep.exact_fraction
    assert back["median_location_error"] == rep.median_location_error
    again = ReplicationReport(reps=rep.reps, histogram=[back[b] for b in BUCKETS],
                              location_errors=rep.location_errors)
    assert tabulate(again) == tabulate(rep)


def test_to_dict_omits_timing():
    rep = run_replications(cp_model(1), reps=3, base_seed=0)
    assert "runtimes" not in rep.to_dict()
    assert len(rep.to_dict(include_timing=True)["runtimes"]) == 3
    assert rep.to_dict()["seed_rule"] == "seedsequence-spawn-key-v1"


def test_median_location_error():
    rep = ReplicationReport(reps=4, location_errors=[1, 10, 3])
    assert rep.median_location_error == 3
    assert ReplicationReport(reps=1).median_location_error is None
    assert np.isclose(ReplicationReport(reps=4, histogram=[0, 0, 1, 3, 0, 0, 0]).exact_fraction,
                      0.75)
