import pytest

from dhtrng.circuit import CircuitConfig
from dhtrng.stats import restart_test
from dhtrng.stats.report import Verdict


def test_six_restarts_distinct():
    r = restart_test(CircuitConfig(), trials=6, prefix_bits=32)
    assert r.verdict == Verdict.PASS and r.statistic == 6
    assert r.details["seeds"] == [1, 2, 3, 4, 5, 6]
    assert all(len(w) == 10 and w.startswith("0x") for w in r.details["prefixes"])


def test_identical_seeds_fail():
    r = restart_test(CircuitConfig(), trials=2, prefix_bits=32, seeds=[5, 5])
    assert r.verdict == Verdict.FAIL
    assert r.details["prefixes"][0] == r.details["prefixes"][1]


def test_single_trial_passes():
    assert restart_test(CircuitConfig(), trials=1).passed


def test_restart_rejections():
    with pytest.raises(ValueError):
        restart_test(CircuitConfig(), trials=0)
    with pytest.raises(ValueError):
        restart_test(CircuitConfig(), prefix_bits=4)
    with pytest.raises(ValueError):
        restart_test(CircuitConfig(), trials=2, seeds=[1])
