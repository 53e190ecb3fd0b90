"""Proportion of ones versus zeros."""

from __future__ import annotations

import math

import numpy as np

from ..analytic import bias_percent
from ..circuit.bitstream import as_bits
from .report import TestReport, Verdict


def bias_report(stream, max_percent: float | None = None) -> TestReport:
    """Bias |N1 - N0| / n in percent.

    Without ``max_percent`` the bound is what a fair coin stays under with
    99% probability for this length, 100 * 2.576 / sqrt(n).
    """
    b = as_bits(stream)
    n = len(b)
    ones = int(b.sum(dtype=np.int64))
    pct = bias_percent(ones, n - ones)
    bound = 100.0 * 2.576 / math.sqrt(n) if max_percent is None else float(max_percent)
    return TestReport("bias", pct, bounds=(0.0, bound),
                      verdict=Verdict.PASS if pct < bound else Verdict.FAIL,
                      sample_bits=n, details={"ones": ones, "zeros": n - ones})
