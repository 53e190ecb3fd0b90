"""Autocorrelation of a bit stream mapped to +-1."""

from __future__ import annotations

import numpy as np

from ..circuit.bitstream import as_bits
from .report import AcfSeries, InsufficientData

DEFAULT_MAX_LAG = 100
ACF_THRESHOLD = 0.3


def acf(stream, max_lag: int = DEFAULT_MAX_LAG) -> AcfSeries:
    """Pearson correlation between x[:-k] and x[k:] for k = 1..max_lag.

    A constant stream has no defined coefficients and is flagged degenerate.
    A lag whose shifted halves happen to be constant is reported as 0.
    """
    if max_lag < 1:
        raise ValueError("max_lag must be >= 1")
    b = as_bits(stream)
    if len(b) < 10 * max_lag:
        raise InsufficientData("acf", 10 * max_lag, len(b))
    lags = tuple(range(1, max_lag + 1))
    if b.min() == b.max():
        return AcfSeries(lags, tuple([float("nan")] * max_lag), len(b), degenerate=True,
                         threshold=ACF_THRESHOLD)
    x = 2.0 * b.astype(np.float64) - 1.0
    csum = np.concatenate(([0.0], np.cumsum(x)))
    n = len(x)
    coeffs = []
    for k in lags:
        m = n - k
        a, c = x[:m], x[k:]
        sa, sc = csum[m], csum[n] - csum[k]
        # x**2 == 1, so the sums of squares are just m
        va = m - sa * sa / m
        vc = m - sc * sc / m
        cov = float(a @ c) - sa * sc / m
        r = cov / np.sqrt(va * vc) if va > 0 and vc > 0 else 0.0
        coeffs.append(float(np.clip(r, -1.0, 1.0)))
    return AcfSeries(lags, tuple(coeffs), len(b), threshold=ACF_THRESHOLD)
