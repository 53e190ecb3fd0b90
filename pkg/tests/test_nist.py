import math

import numpy as np
import pytest

from conftest import prng_bits
from dhtrng.circuit.bitstream import BitStream
from dhtrng.stats.nist import (NIST_TESTS, cusum_p_value, nist_approx_entropy, nist_battery,
                               nist_block_frequency, nist_cusum, nist_frequency,
                               nist_longest_run, nist_runs, nist_serial, proportion_interval)
from dhtrng.stats.report import InsufficientData, Verdict

# worked-example inputs from SP 800-22 (first 100 binary digits of pi)
PI100 = ("1100100100001111110110101010001000100001011010001100001000110100"
         "110001001100011001100010100010111000")
LR128 = ("11001100000101010110110001001100111000000000001001001101010100010001001111010110"
         "100000001101011111001100111001101101100010110010")


def s(text):
    return BitStream.from_text(text)


def test_frequency_worked_examples():
    assert nist_frequency(s("1011010101")).p_value == pytest.approx(0.527089, abs=1e-6)
    assert nist_frequency(s(PI100)).p_value == pytest.approx(0.109599, abs=1e-6)


def test_block_frequency_worked_examples():
    assert nist_block_frequency(s("0110011010"), M=3).p_value == pytest.approx(0.801252, abs=1e-6)
    assert nist_block_frequency(s(PI100), M=10).p_value == pytest.approx(0.706438, abs=1e-6)


def test_runs_worked_examples():
    assert nist_runs(s("1001101011")).p_value == pytest.approx(0.147232, abs=1e-6)
    assert nist_runs(s(PI100)).p_value == pytest.approx(0.500798, abs=1e-6)


def test_longest_run_worked_example():
    r = nist_longest_run(s(LR128))
    # the published 4.882605 was computed from rounded class probabilities
    assert r.statistic == pytest.approx(4.882605, abs=2e-4)
    assert r.p_value == pytest.approx(0.180609, abs=1e-4)
    assert r.details["counts"] == [4, 9, 3, 0]


def test_serial_worked_example():
    r = nist_serial(s("0011011101"), m=3)
    assert r.details["p_values"] == pytest.approx([0.808792, 0.670320], abs=1e-6)
    assert r.p_value == min(r.details["p_values"])


def test_approx_entropy_worked_examples():
    assert nist_approx_entropy(s("0100110101"), m=3).p_value == pytest.approx(0.261961, abs=1e-6)
    assert nist_approx_entropy(s(PI100), m=2).p_value == pytest.approx(0.235301, abs=1e-6)


def test_cusum_worked_examples():
    assert cusum_p_value(s("1011010111").bits) == (4, pytest.approx(0.4116588, abs=1e-6))
    z, p = cusum_p_value(s(PI100).bits, "forward")
    assert z == 16 and p == pytest.approx(0.219194, abs=1e-6)
    z, p = cusum_p_value(s(PI100).bits, "backward")
    assert z == 19 and p == pytest.approx(0.114866, abs=1e-6)
    r = nist_cusum(s(PI100))
    assert r.p_value == pytest.approx(0.114866, abs=1e-6)
    assert r.details["p_value_mean"] == pytest.approx((0.219194 + 0.114866) / 2, abs=1e-6)


def test_alternating_stream():
    alt = np.tile([0, 1], 500_000).astype(np.uint8)
    assert nist_frequency(alt).p_value == 1.0
    assert nist_runs(alt).verdict == Verdict.FAIL


def test_all_zero_stream():
    z = np.zeros(1_000_000, np.uint8)
    assert nist_frequency(z).p_value < 1e-100
    r = nist_runs(z)
    assert r.p_value == 0.0 and r.details["prerequisite"] == "frequency"
    assert all(r.verdict == Verdict.FAIL for r in nist_battery(z))


def test_minimum_lengths():
    with pytest.raises(InsufficientData):
        nist_longest_run(np.zeros(127, np.uint8))
    with pytest.raises(InsufficientData):
        nist_runs(np.zeros(1, np.uint8))
    res = nist_battery(prng_bits(99))
    assert all(r.verdict == Verdict.NOT_APPLICABLE for r in res)


def test_battery_uses_largest_longest_run_table(ideal_stream):
    assert nist_longest_run(ideal_stream).details["M"] == 10_000
    assert nist_longest_run(ideal_stream[:6272]).details["M"] == 128


def test_p_values_in_unit_interval(ideal_stream):
    for r in nist_battery(ideal_stream[:100_000]):
        assert 0.0 <= r.p_value <= 1.0


def test_prng_pass_proportion():
    # 100 disjoint 10**6-bit reference streams: each test passes >= 96 of them
    k = 100
    passes = dict.fromkeys(NIST_TESTS, 0)
    for i in range(k):
        for r in nist_battery(prng_bits(1_000_000, seed=1000 + i)):
            passes[r.test_name] += r.passed
    for name, n in passes.items():
        assert n >= 96, (name, n)


def test_proportion_interval():
    lo, hi = proportion_interval(30)
    assert lo == pytest.approx(0.99 - 3 * math.sqrt(0.99 * 0.01 / 30))
    assert hi == 1.0
