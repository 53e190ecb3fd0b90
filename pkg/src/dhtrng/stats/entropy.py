"""Min-entropy estimators for binary sources: most common value, collision and Markov."""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from ..circuit.bitstream import as_bits
from .report import InsufficientData, MinEntropyEstimate

Z_99 = 2.576

MCV_MIN_BITS = 4096
COLLISION_MIN_BITS = 20_000
MARKOV_MIN_BITS = 1_000_000

MARKOV_STEPS = 128


def _bits(stream, name: str, need: int) -> np.ndarray:
    b = as_bits(stream)
    if len(b) < need:
        raise InsufficientData(name, need, len(b))
    return b


def mcv_estimate(stream, min_bits: int = MCV_MIN_BITS) -> MinEntropyEstimate:
    """Upper 99% bound on the most common value's probability."""
    b = _bits(stream, "mcv", min_bits)
    L = len(b)
    ones = int(b.sum(dtype=np.int64))
    p_hat = max(ones, L - ones) / L
    p_u = min(1.0, p_hat + Z_99 * math.sqrt(p_hat * (1.0 - p_hat) / (L - 1)))
    return MinEntropyEstimate.from_p("MCV", p_u, L, p_hat=p_hat)


@njit(cache=True)
def collision_times(b: np.ndarray) -> np.ndarray:
    """Lengths (2 or 3) of successive windows ending at the first repeated value."""
    L = len(b)
    out = np.empty(L // 2 + 1, dtype=np.int64)
    v = 0
    i = 0
    # a pair repeats at once, otherwise the third binary value repeats one of them
    while i + 1 < L:
        if b[i] == b[i + 1]:
            out[v] = 2
        elif i + 2 < L:
            out[v] = 3
        else:
            break
        i += out[v]
        v += 1
    return out[:v]


def collision_mean(p: float) -> float:
    """Expected collision time of a binary source with P(most likely) = p."""
    q = 1.0 - p
    f = q + 2.0 * q * q + 2.0 * q ** 3  # Gamma(3, 1/q) q^3 e^(1/q)
    d = 0.5 * (1.0 / p - 1.0 / q)
    return p / (q * q) * (1.0 + d) * f - p / q * d


def collision_estimate(stream, min_bits: int = COLLISION_MIN_BITS) -> MinEntropyEstimate:
    b = _bits(stream, "collision", min_bits)
    t = collision_times(np.ascontiguousarray(b, dtype=np.uint8))
    v = len(t)
    mean = float(t.mean())
    sd = float(t.std(ddof=1))
    x = mean - Z_99 * sd / math.sqrt(v)
    if x <= 2.0:
        p = 1.0
    elif x >= collision_mean(0.5):
        p = 0.5  # no solution: report full entropy
    else:
        lo, hi = 0.5, 1.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if collision_mean(mid) > x:
                lo = mid
            else:
                hi = mid
        p = 0.5 * (lo + hi)
    return MinEntropyEstimate.from_p("Collision", p, len(b), mean=mean, sd=sd, bound=x, windows=v)


def _markov_logs(b: np.ndarray):
    L = len(b)
    ones = int(b.sum(dtype=np.int64))
    p = np.array([(L - ones) / L, ones / L])
    pair = b[:-1].astype(np.int64) * 2 + b[1:]
    o = np.bincount(pair, minlength=4).reshape(2, 2).astype(float)
    row = o.sum(axis=1, keepdims=True)
    T = np.divide(o, row, out=np.zeros_like(o), where=row > 0)
    with np.errstate(divide="ignore"):
        return np.log2(p), np.log2(T)


def markov_estimate(stream, min_bits: int = MARKOV_MIN_BITS) -> MinEntropyEstimate:
    """First-order Markov bound over the six most likely 128-bit sequences.

    ``p_max`` is the per-bit equivalent ``2**-h``; the probability of the
    most likely sequence is in ``details``.
    """
    b = _bits(stream, "markov", min_bits)
    lp, lT = _markov_logs(b)
    k = MARKOV_STEPS
    seqs = {
        "0" * k: lp[0] + (k - 1) * lT[0, 0],
        "01" * (k // 2): lp[0] + (k // 2) * lT[0, 1] + (k // 2 - 1) * lT[1, 0],
        "0" + "1" * (k - 1): lp[0] + lT[0, 1] + (k - 2) * lT[1, 1],
        "1" + "0" * (k - 1): lp[1] + lT[1, 0] + (k - 2) * lT[0, 0],
        "10" * (k // 2): lp[1] + (k // 2) * lT[1, 0] + (k // 2 - 1) * lT[0, 1],
        "1" * k: lp[1] + (k - 1) * lT[1, 1],
    }
    best = max(seqs, key=lambda s: seqs[s])
    log_pmax = float(seqs[best])
    h = min(max(-log_pmax / k, 0.0), 1.0) + 0.0
    return MinEntropyEstimate("Markov", 2.0 ** -h, h, len(b),
                              {"log2_sequence_p_max": log_pmax, "sequence": best[:4] + "..."})


ESTIMATORS = {"mcv": mcv_estimate, "collision": collision_estimate, "markov": markov_estimate}


def entropy_battery(stream):
    """Every estimator whose minimum length is met; others are returned as InsufficientData."""
    out = []
    for fn in ESTIMATORS.values():
        try:
            out.append(fn(stream))
        except InsufficientData as err:
            out.append(err)
    return out
