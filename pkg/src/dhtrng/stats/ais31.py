"""AIS-31 procedure A tests T0 to T5.

T1 to T5 operate on 20000-bit blocks and use the FIPS 140-1 acceptance
constants; a stream is cut into as many whole blocks as it holds and
passes only if every block passes. T0 checks that 2**16 consecutive
48-bit words are pairwise distinct.
"""

from __future__ import annotations

import numpy as np

from ..circuit.bitstream import as_bits
from .report import InsufficientData, TestReport, Verdict

BLOCK = 20000
T0_WORDS = 1 << 16
T0_WORD_BITS = 48
T0_BITS = T0_WORDS * T0_WORD_BITS

T1_BOUNDS = (9654, 10346)
T2_BOUNDS = (1.03, 57.4)
# inclusive intervals for runs of length 1..5 and >= 6, counted per symbol
T3_BOUNDS = {1: (2267, 2733), 2: (1079, 1421), 3: (502, 748), 4: (223, 402),
             5: (90, 223), 6: (90, 223)}
T4_LIMIT = 34
T5_TAU_MAX = 5000
T5_WINDOW = 5000
T5_BOUNDS = (2326, 2674)


def _blocks(stream, name: str) -> np.ndarray:
    bits = as_bits(stream)
    if len(bits) < BLOCK:
        raise InsufficientData(name, BLOCK, len(bits))
    n = len(bits) // BLOCK
    return bits[:n * BLOCK].reshape(n, BLOCK)


def _report(name: str, stats: np.ndarray, ok: np.ndarray, bounds, n_bits: int, **details):
    worst = int(np.argmin(ok)) if not ok.all() else 0
    return TestReport(name, stats[worst].item() if stats.ndim == 1 else stats[worst].tolist(),
                      bounds=bounds, verdict=Verdict.PASS if ok.all() else Verdict.FAIL,
                      sample_bits=n_bits,
                      details={"blocks": len(ok), "blocks_passed": int(ok.sum()),
                               "first_failing_block": None if ok.all() else worst, **details})


def monobit_t1(stream) -> TestReport:
    b = _blocks(stream, "monobit_t1")
    ones = b.sum(axis=1, dtype=np.int64)
    ok = (ones > T1_BOUNDS[0]) & (ones < T1_BOUNDS[1])
    return _report("monobit_t1", ones, ok, T1_BOUNDS, b.size)


def poker_t2(stream) -> TestReport:
    b = _blocks(stream, "poker_t2")
    nib = b.reshape(len(b), BLOCK // 4, 4).astype(np.int64) @ np.array([8, 4, 2, 1])
    counts = np.stack([np.bincount(row, minlength=16) for row in nib])
    x = 16.0 / 5000.0 * (counts.astype(float) ** 2).sum(axis=1) - 5000.0
    ok = (x > T2_BOUNDS[0]) & (x < T2_BOUNDS[1])
    return _report("poker_t2", x, ok, T2_BOUNDS, b.size)


def run_lengths(bits: np.ndarray):
    """(values, lengths) of the maximal runs of ``bits``."""
    bits = np.asarray(bits)
    if len(bits) == 0:
        return np.zeros(0, np.uint8), np.zeros(0, np.int64)
    change = np.flatnonzero(np.diff(bits)) + 1
    starts = np.concatenate(([0], change))
    ends = np.concatenate((change, [len(bits)]))
    return bits[starts], ends - starts


def _run_table(block: np.ndarray) -> np.ndarray:
    """6x2 table: row k-1 counts runs of length k (6 means >= 6), column = symbol."""
    vals, lens = run_lengths(block)
    table = np.zeros((6, 2), dtype=np.int64)
    np.add.at(table, (np.minimum(lens, 6) - 1, vals.astype(np.int64)), 1)
    return table


def runs_t3(stream) -> TestReport:
    b = _blocks(stream, "runs_t3")
    lo = np.array([T3_BOUNDS[k][0] for k in range(1, 7)])[:, None]
    hi = np.array([T3_BOUNDS[k][1] for k in range(1, 7)])[:, None]
    tables = np.stack([_run_table(row) for row in b])
    ok = ((tables >= lo) & (tables <= hi)).all(axis=(1, 2))
    return _report("runs_t3", tables, ok, tuple(T3_BOUNDS[k] for k in range(1, 7)), b.size)


def longrun_t4(stream) -> TestReport:
    b = _blocks(stream, "longrun_t4")
    longest = np.array([run_lengths(row)[1].max() for row in b])
    ok = longest < T4_LIMIT
    return _report("longrun_t4", longest, ok, (0, T4_LIMIT), b.size)


def _shift_xor_counts(bits: np.ndarray, taus: np.ndarray) -> np.ndarray:
    """Z_tau = #{j < 5000 : b_j != b_(j+tau)} for each tau, via one FFT correlation."""
    s = bits.astype(np.float64)
    x = s[:T5_WINDOW]
    n = 1 << int(np.ceil(np.log2(len(s) + T5_WINDOW)))
    corr = np.fft.irfft(np.conj(np.fft.rfft(x, n)) * np.fft.rfft(s, n), n)
    xy = np.rint(corr[taus]).astype(np.int64)
    csum = np.concatenate(([0], np.cumsum(bits, dtype=np.int64)))
    y = csum[taus + T5_WINDOW] - csum[taus]
    return int(x.sum()) + y - 2 * xy


def autocorr_t5(stream) -> TestReport:
    """Pick the worst lag on the first half of each block and test it on the second half."""
    b = _blocks(stream, "autocorr_t5")
    taus = np.arange(1, T5_TAU_MAX + 1)
    z = np.empty(len(b), dtype=np.int64)
    chosen = np.empty(len(b), dtype=np.int64)
    for k, row in enumerate(b):
        first = _shift_xor_counts(row[:2 * T5_WINDOW], taus)
        tau = int(taus[np.argmax(np.abs(first - T5_WINDOW // 2))])
        z[k] = _shift_xor_counts(row[2 * T5_WINDOW:], np.array([tau]))[0]
        chosen[k] = tau
    ok = (z > T5_BOUNDS[0]) & (z < T5_BOUNDS[1])
    worst = int(np.argmin(ok)) if not ok.all() else 0
    return _report("autocorr_t5", z, ok, T5_BOUNDS, b.size, tau=int(chosen[worst]))


def disjointness_t0(stream) -> TestReport:
    bits = as_bits(stream)
    if len(bits) < T0_BITS:
        raise InsufficientData("disjointness_t0", T0_BITS, len(bits))
    words = bits[:T0_BITS].reshape(T0_WORDS, T0_WORD_BITS).astype(np.uint64)
    values = words @ (np.uint64(1) << np.arange(T0_WORD_BITS - 1, -1, -1, dtype=np.uint64))
    distinct = len(np.unique(values))
    return TestReport("disjointness_t0", distinct, bounds=(T0_WORDS, T0_WORDS),
                      verdict=Verdict.PASS if distinct == T0_WORDS else Verdict.FAIL,
                      sample_bits=T0_BITS, details={"repeats": T0_WORDS - distinct})


def procedure_a(stream) -> list[TestReport]:
    """T0 on the leading 2**16 * 48 bits, T1 to T5 on every whole block of the stream."""
    out = []
    for fn in (disjointness_t0, monobit_t1, poker_t2, runs_t3, longrun_t4, autocorr_t5):
        try:
            out.append(fn(stream))
        except InsufficientData as err:
            out.append(TestReport.not_applicable(fn.__name__, err))
    return out
