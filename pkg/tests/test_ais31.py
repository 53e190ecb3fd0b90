import numpy as np
import pytest

from conftest import prng_bits
from dhtrng.stats import ais31
from dhtrng.stats.ais31 import (_run_table, _shift_xor_counts, autocorr_t5, disjointness_t0,
                                longrun_t4, monobit_t1, poker_t2, procedure_a, runs_t3)
from dhtrng.stats.report import InsufficientData, Verdict

ALT = np.tile([0, 1], 10000).astype(np.uint8)


def test_constants_match_fixture(ais_bounds):
    f = ais_bounds
    assert ais31.BLOCK == f["block_bits"]
    assert (ais31.T0_WORDS, ais31.T0_WORD_BITS) == (f["t0"]["words"], f["t0"]["word_bits"])
    assert ais31.T1_BOUNDS == (f["t1"]["low_exclusive"], f["t1"]["high_exclusive"])
    assert ais31.T2_BOUNDS == (f["t2"]["low_exclusive"], f["t2"]["high_exclusive"])
    for k in range(1, 6):
        assert list(ais31.T3_BOUNDS[k]) == f["t3"][str(k)]
    assert list(ais31.T3_BOUNDS[6]) == f["t3"]["6+"]
    assert ais31.T4_LIMIT == f["t4"]["fail_run_length"]
    t5 = f["t5"]
    assert (ais31.T5_TAU_MAX, ais31.T5_WINDOW) == (t5["tau_max"], t5["window_bits"])
    assert ais31.T5_BOUNDS == (t5["low_exclusive"], t5["high_exclusive"])


def test_monobit_examples():
    assert monobit_t1(ALT).verdict == Verdict.PASS
    assert monobit_t1(np.zeros(20000, np.uint8)).verdict == Verdict.FAIL


def test_monobit_bounds_are_open():
    b = np.zeros(20000, np.uint8)
    b[:9654] = 1
    assert not monobit_t1(b).passed
    b[9654] = 1
    assert monobit_t1(b).passed


def test_short_stream_rejected():
    for fn in (monobit_t1, poker_t2, runs_t3, longrun_t4, autocorr_t5, disjointness_t0):
        with pytest.raises(InsufficientData):
            fn(np.zeros(19999, np.uint8))


def test_alternating_fails_runs():
    r = runs_t3(ALT)
    assert r.verdict == Verdict.FAIL


def test_run_table_counts():
    t = _run_table(np.array([1, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 1], np.uint8))
    assert t[1, 1] == 1 and t[0, 0] == 1 and t[0, 1] == 2 and t[5, 0] == 1
    assert t.sum() == 5


def test_longrun():
    b = prng_bits(20000, 1)
    assert longrun_t4(b).passed
    b = b.copy()
    b[1000:1034] = 1
    r = longrun_t4(b)
    assert r.verdict == Verdict.FAIL and r.statistic >= 34


def test_shift_xor_counts_brute_force():
    b = prng_bits(12000, 4)
    taus = np.array([1, 2, 17, 999, 5000])
    got = _shift_xor_counts(b, taus)
    want = [int(np.sum(b[:5000] != b[t:t + 5000])) for t in taus]
    assert got.tolist() == want


def test_t5_fails_on_periodic():
    b = np.tile(prng_bits(100, 3), 200)
    assert autocorr_t5(b).verdict == Verdict.FAIL


def test_poker_on_constant_fails():
    assert poker_t2(np.ones(20000, np.uint8)).verdict == Verdict.FAIL


def test_t0_counter_words_pass():
    words = np.arange(65536, dtype=np.uint64)
    bits = ((words[:, None] >> np.arange(47, -1, -1, dtype=np.uint64)) & 1).astype(np.uint8).ravel()
    assert disjointness_t0(bits).passed
    bits[48:96] = bits[:48]
    r = disjointness_t0(bits)
    assert r.verdict == Verdict.FAIL and r.details["repeats"] == 1


def test_worst_block_reported():
    b = np.concatenate([prng_bits(40000, 9), np.zeros(20000, np.uint8)])
    r = monobit_t1(b)
    assert r.details == {"blocks": 3, "blocks_passed": 2, "first_failing_block": 2}
    assert r.statistic == 0


def test_prng_passes_procedure_a():
    res = procedure_a(prng_bits(ais31.T0_BITS, 11))
    assert [r.verdict for r in res] == [Verdict.PASS] * 6


def test_procedure_a_marks_short_t0_not_applicable():
    res = procedure_a(prng_bits(40000, 12))
    assert res[0].verdict == Verdict.NOT_APPLICABLE
    assert all(r.verdict != Verdict.NOT_APPLICABLE for r in res[1:])
