"""Seven tests from the SP 800-22 battery.

Each function takes a bit stream and returns a :class:`TestReport` whose
p-value comes from ``erfc`` or the regularized upper incomplete gamma
function. Tests with several sub-statistics (cumulative sums, serial)
report the smallest sub-p-value as ``p_value`` so the pass rule stays
"every p >= 0.01"; all sub-p-values and their mean are in ``details``.

``MIN_BITS`` holds the smallest inputs the formulas accept (small enough
for textbook worked examples). ``RECOMMENDED_BITS`` holds the sizes below
which a battery run reports "not applicable".
"""

from __future__ import annotations

import math

import numpy as np

from ..circuit.bitstream import as_bits
from .report import InsufficientData, TestReport
from .special import erfc, igamc, normal_cdf

MIN_BITS = {"frequency": 1, "block_frequency": 1, "cusum": 1, "runs": 2,
            "longest_run": 128, "serial": 3, "approximate_entropy": 3}
RECOMMENDED_BITS = {"frequency": 100, "block_frequency": 100, "cusum": 100, "runs": 100,
                    "longest_run": 128, "serial": 100, "approximate_entropy": 100}

# (block length M, class boundaries v_min..v_max, class probabilities)
_LONGEST_RUN_TABLES = (
    (750_000, 10_000, 10, 16, (0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727)),
    (6_272, 128, 4, 9, (0.1174035788, 0.242955959, 0.249363483, 0.17517706,
                        0.102701071, 0.112398847)),
    (128, 8, 1, 4, (0.21484375, 0.3671875, 0.23046875, 0.1875)),
)


def _bits(stream, name: str, minimum: int | None = None) -> np.ndarray:
    bits = as_bits(stream)
    need = MIN_BITS[name] if minimum is None else minimum
    if len(bits) < need:
        raise InsufficientData(name, need, len(bits))
    return bits


def nist_frequency(stream) -> TestReport:
    """Monobit frequency test."""
    b = _bits(stream, "frequency")
    n = len(b)
    s = 2 * int(b.sum(dtype=np.int64)) - n
    s_obs = abs(s) / math.sqrt(n)
    return TestReport.from_p("frequency", s_obs, erfc(s_obs / math.sqrt(2.0)), n, sum=s)


def nist_block_frequency(stream, M: int = 128) -> TestReport:
    """Frequency within non-overlapping blocks of M bits."""
    if M < 1:
        raise ValueError("M must be >= 1")
    b = _bits(stream, "block_frequency", max(M, MIN_BITS["block_frequency"]))
    N = len(b) // M
    pi = b[:N * M].reshape(N, M).mean(axis=1)
    chi2 = 4.0 * M * float(((pi - 0.5) ** 2).sum())
    return TestReport.from_p("block_frequency", chi2, igamc(N / 2.0, chi2 / 2.0), len(b),
                             M=M, blocks=N)


def _cusum_p(n: int, z: int) -> float:
    # summation limits truncate toward zero, as in the reference implementation
    sq = math.sqrt(n)
    total = 1.0
    for k in range(int((-n / z + 1) / 4), int((n / z - 1) / 4) + 1):
        total -= normal_cdf((4 * k + 1) * z / sq) - normal_cdf((4 * k - 1) * z / sq)
    for k in range(int((-n / z - 3) / 4), int((n / z - 1) / 4) + 1):
        total += normal_cdf((4 * k + 3) * z / sq) - normal_cdf((4 * k + 1) * z / sq)
    return min(1.0, max(0.0, total))


def cusum_p_value(bits, mode: str = "forward") -> tuple[int, float]:
    """(z, p) for one direction of the cumulative sums test."""
    x = 2 * np.asarray(bits, dtype=np.int64) - 1
    if mode == "backward":
        x = x[::-1]
    elif mode != "forward":
        raise ValueError("mode must be 'forward' or 'backward'")
    z = int(np.abs(np.cumsum(x)).max())
    return z, (_cusum_p(len(x), z) if z > 0 else 1.0)


def nist_cusum(stream) -> TestReport:
    """Cumulative sums, forward and backward."""
    b = _bits(stream, "cusum")
    zf, pf = cusum_p_value(b, "forward")
    zb, pb = cusum_p_value(b, "backward")
    return TestReport.from_p("cusum", (zf, zb), min(pf, pb), len(b),
                             p_values={"forward": pf, "backward": pb}, p_value_mean=(pf + pb) / 2)


def nist_runs(stream) -> TestReport:
    """Total number of runs; fails outright when the frequency prerequisite fails."""
    b = _bits(stream, "runs")
    n = len(b)
    pi = float(b.mean())
    if abs(pi - 0.5) >= 2.0 / math.sqrt(n):
        return TestReport.from_p("runs", None, 0.0, n, prerequisite="frequency", pi=pi)
    v = 1 + int(np.count_nonzero(np.diff(b)))
    p = erfc(abs(v - 2 * n * pi * (1 - pi)) / (2 * math.sqrt(2 * n) * pi * (1 - pi)))
    return TestReport.from_p("runs", v, p, n, pi=pi)


def _longest_runs(blocks: np.ndarray) -> np.ndarray:
    """Longest run of ones in each row."""
    N, M = blocks.shape
    padded = np.zeros((N, M + 2), dtype=np.int8)
    padded[:, 1:-1] = blocks
    d = np.diff(padded, axis=1)
    rows_s, cols_s = np.nonzero(d == 1)
    _, cols_e = np.nonzero(d == -1)
    out = np.zeros(N, dtype=np.int64)
    np.maximum.at(out, rows_s, cols_e - cols_s)
    return out


def nist_longest_run(stream) -> TestReport:
    """Longest run of ones within M-bit blocks, M chosen from the stream length."""
    b = _bits(stream, "longest_run")
    n = len(b)
    for n_min, M, vmin, vmax, pis in _LONGEST_RUN_TABLES:
        if n >= n_min:
            break
    N = n // M
    longest = _longest_runs(b[:N * M].reshape(N, M))
    classes = np.clip(longest, vmin, vmax) - vmin
    counts = np.bincount(classes, minlength=len(pis))
    pis = np.asarray(pis)
    chi2 = float(((counts - N * pis) ** 2 / (N * pis)).sum())
    K = len(pis) - 1
    return TestReport.from_p("longest_run", chi2, igamc(K / 2.0, chi2 / 2.0), n,
                             M=M, blocks=N, counts=counts.tolist())


def _pattern_counts(b: np.ndarray, m: int) -> np.ndarray:
    """Counts of all 2**m overlapping m-bit patterns, the sequence wrapped around."""
    if m == 0:
        return np.array([len(b)])
    ext = np.concatenate((b, b[:m - 1])).astype(np.int64)
    n = len(b)
    v = np.zeros(n, dtype=np.int64)
    for j in range(m):
        v = (v << 1) | ext[j:j + n]
    return np.bincount(v, minlength=1 << m)


def _psi2(b: np.ndarray, m: int) -> float:
    if m <= 0:
        return 0.0
    n = len(b)
    c = _pattern_counts(b, m).astype(np.float64)
    return float((1 << m) / n * (c ** 2).sum() - n)


def nist_serial(stream, m: int = 2) -> TestReport:
    """Serial test on overlapping m-bit patterns (two sub-p-values)."""
    if m < 2:
        raise ValueError("serial test needs m >= 2")
    b = _bits(stream, "serial", max(MIN_BITS["serial"], m))
    p0, p1, p2 = _psi2(b, m), _psi2(b, m - 1), _psi2(b, m - 2)
    d1 = p0 - p1
    d2 = p0 - 2 * p1 + p2
    pv1 = igamc(2.0 ** (m - 2), d1 / 2.0) if d1 > 0 else 1.0
    pv2 = igamc(2.0 ** (m - 3), d2 / 2.0) if d2 > 0 else 1.0
    return TestReport.from_p("serial", (d1, d2), min(pv1, pv2), len(b), m=m,
                             p_values=[pv1, pv2], p_value_mean=(pv1 + pv2) / 2)


def _phi(b: np.ndarray, m: int) -> float:
    c = _pattern_counts(b, m)
    c = c[c > 0] / len(b)
    return float((c * np.log(c)).sum())


def nist_approx_entropy(stream, m: int = 2) -> TestReport:
    """Approximate entropy of overlapping m- and (m+1)-bit patterns."""
    if m < 1:
        raise ValueError("approximate entropy needs m >= 1")
    b = _bits(stream, "approximate_entropy", max(MIN_BITS["approximate_entropy"], m + 1))
    n = len(b)
    apen = _phi(b, m) - _phi(b, m + 1)
    chi2 = 2.0 * n * (math.log(2.0) - apen)
    return TestReport.from_p("approximate_entropy", chi2, igamc(2.0 ** (m - 1), chi2 / 2.0), n,
                             m=m, apen=apen)


NIST_TESTS = {
    "frequency": nist_frequency,
    "block_frequency": nist_block_frequency,
    "cusum": nist_cusum,
    "runs": nist_runs,
    "longest_run": nist_longest_run,
    "serial": nist_serial,
    "approximate_entropy": nist_approx_entropy,
}


def nist_battery(stream) -> list[TestReport]:
    """All seven tests with default parameters; short streams give "not applicable"."""
    n = len(as_bits(stream))
    out = []
    for name, fn in NIST_TESTS.items():
        if n < RECOMMENDED_BITS[name]:
            out.append(TestReport.not_applicable(name, InsufficientData(name, RECOMMENDED_BITS[name], n)))
            continue
        out.append(fn(stream))
    return out


def proportion_interval(k: int, alpha: float = 0.01) -> tuple[float, float]:
    """Acceptance interval for the fraction of K streams passing one test."""
    if k < 1:
        raise ValueError("k must be >= 1")
    p = 1.0 - alpha
    half = 3.0 * math.sqrt(p * (1 - p) / k)
    return p - half, min(1.0, p + half)
