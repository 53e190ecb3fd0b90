"""Closed-form models of the entropy source.

These are used as oracles for the Monte-Carlo simulation and in reports:
the ring-oscillator phase-noise floor, the expected value of XOR-combined
biased bits, the randomness coverage of cascaded hybrid units and the
percentage bias of a finished stream.

On the n-input XOR: the exact probability that the parity of independent
bits with P(1) = mu_i equals one is ``(1 - prod(1 - 2 mu_i)) / 2`` (the
piling-up lemma). A frequently printed variant for n inputs drawn from two
unit outputs, ``(1 + ((1 - 2 mu1)(1 - 2 mu2))**(n/2)) / 2``, gives the
complement of the two-input form at n = 2 and disagrees with enumeration;
:func:`xor_n_expectation_printed` keeps it for comparison only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

ATOL = 1e-12

BOLTZMANN = 1.380649e-23


def _check_prob(name: str, p: float) -> float:
    p = float(p)
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"{name} must lie in [0, 1], got {p}")
    return p


@dataclass(frozen=True)
class PhaseNoiseParams:
    """Ring-oscillator phase-noise inputs, SI units throughout."""

    N: float
    f0: float
    delta_f: float
    P: float
    K: float = BOLTZMANN
    T: float = 300.0
    eta: float = 1.0
    Vdd: float = 1.0
    V: float = 1.0
    I: float = 1e-3
    R: float = 1e3

    def __post_init__(self):
        for name in ("N", "f0", "delta_f", "P", "K", "T", "eta", "Vdd", "V", "I", "R"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and > 0, got {v}")


def phase_noise_floor(p: PhaseNoiseParams) -> float:
    """(8N / 3eta) (KT / P) (Vdd/V + Vdd/(IR)) (f0 / delta_f)^2."""
    return (8.0 * p.N / (3.0 * p.eta)) * (p.K * p.T / p.P) \
        * (p.Vdd / p.V + p.Vdd / (p.I * p.R)) * (p.f0 / p.delta_f) ** 2


def xor2_expectation(mu1: float, mu2: float) -> float:
    """P(Q1 xor Q2 = 1) for independent bits with P(Qi = 1) = mu_i."""
    mu1 = _check_prob("mu1", mu1)
    mu2 = _check_prob("mu2", mu2)
    return 0.5 - 2.0 * (mu1 - 0.5) * (mu2 - 0.5)


def xor_n_expectation(mus: Sequence[float]) -> float:
    """P(parity = 1) for independent bits, exact (piling-up lemma)."""
    mus = [_check_prob("mu", m) for m in mus]
    if not mus:
        raise ValueError("need at least one probability")
    prod = 1.0
    for m in mus:
        prod *= 1.0 - 2.0 * m
    return 0.5 * (1.0 - prod)


def xor_n_expectation_printed(mu1: float, mu2: float, n: int) -> float:
    """The commonly printed n-XOR form; equals ``1 - xor2_expectation`` at n = 2.

    Kept only to document the discrepancy, not used as a probability.
    """
    mu1 = _check_prob("mu1", mu1)
    mu2 = _check_prob("mu2", mu2)
    if int(n) != n or n < 1:
        raise ValueError("n must be a positive integer")
    base = (1.0 - 2.0 * mu1) * (1.0 - 2.0 * mu2)
    if base < 0 and n % 2:
        raise ValueError("odd n with a negative base has no real value")
    power = base ** (n // 2) if n % 2 == 0 else base ** (n / 2.0)
    return 0.5 * (1.0 + power)


def xor_enumerate(mus: Sequence[float]) -> float:
    """Parity-one probability by summing over all 2**n joint outcomes."""
    mus = np.asarray(mus, dtype=float)
    n = len(mus)
    if n == 0:
        raise ValueError("need at least one probability")
    if n > 20:
        raise ValueError("enumeration is limited to n <= 20")
    outcomes = (np.arange(2**n)[:, None] >> np.arange(n)) & 1
    probs = np.where(outcomes == 1, mus, 1.0 - mus).prod(axis=1)
    return float(probs[outcomes.sum(axis=1) % 2 == 1].sum())


def xor_monte_carlo(mus: Sequence[float], trials: int, rng: np.random.Generator):
    """Monte-Carlo estimate of the parity-one probability; returns (estimate, standard error)."""
    mus = np.asarray([_check_prob("mu", m) for m in mus])
    if trials < 1:
        raise ValueError("trials must be >= 1")
    parity = np.zeros(trials, dtype=np.uint8)
    for m in mus:
        parity ^= (rng.random(trials) < m).astype(np.uint8)
    est = float(parity.mean())
    return est, math.sqrt(max(est * (1.0 - est), 1e-300) / trials)


@dataclass(frozen=True)
class CoverageParams:
    """Inputs of the multi-unit randomness coverage.

    a: probability of a jitter event per edge; w: jitter widths (s);
    T_ro: RO1 periods (s); tau: probability of sampling the hold region's
    subthreshold level; epsilon: transition edge width (s); f: RO2
    oscillation frequencies (Hz). w, T_ro and f have one entry per unit.
    """

    n: int
    a: float
    w: Sequence[float]
    T_ro: Sequence[float]
    tau: float
    epsilon: float
    f: Sequence[float]

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        for name in ("w", "T_ro", "f"):
            if len(getattr(self, name)) != self.n:
                raise ValueError(f"{name} must have n={self.n} entries")
        _check_prob("a", self.a)
        _check_prob("tau", self.tau)
        if self.epsilon < 0 or any(x < 0 for x in self.w):
            raise ValueError("widths must be >= 0")
        if any(not x > 0 for x in self.T_ro) or any(not x > 0 for x in self.f):
            raise ValueError("periods and frequencies must be > 0")
        for jit, hyb in self.factors():
            _check_prob("2*a*w/T_ro", jit)
            _check_prob("tau + 2*epsilon*f", hyb)

    def factors(self):
        return [(2.0 * self.a * w / T, self.tau + 2.0 * self.epsilon * f)
                for w, T, f in zip(self.w, self.T_ro, self.f)]


def randomness_coverage(p: CoverageParams) -> float:
    """1 - prod_i (1 - 2 a w_i / T_ro_i) (1 - (tau + 2 epsilon f_i))."""
    prod = 1.0
    for jit, hyb in p.factors():
        prod *= (1.0 - jit) * (1.0 - hyb)
    return 1.0 - prod


def bias_percent(n_ones: int, n_zeros: int) -> float:
    """|N1 - N0| / (N1 + N0) in percent."""
    if n_ones < 0 or n_zeros < 0:
        raise ValueError("counts must be non-negative")
    total = n_ones + n_zeros
    if total == 0:
        raise ValueError("need at least one bit")
    return abs(n_ones - n_zeros) / total * 100.0
