"""Stochastic device models shared by every circuit element.

Gate delays carry independent Gaussian jitter, flip-flops resolve
metastability through the Gaussian tail function, and operating conditions
rescale the delay/jitter parameters linearly around 20 C / 1.0 V.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

NOMINAL_TEMPERATURE_C = 20.0
NOMINAL_VOLTAGE_V = 1.0

# first-order PVT coefficients, relative change per unit
TEMP_COEFF_DELAY = 0.002
TEMP_COEFF_JITTER = 0.003
VOLT_COEFF_DELAY = -1.5

# samplers treat anything outside +-META_WINDOW * meta_sigma as settled
META_WINDOW = 6.0


@dataclass(frozen=True)
class NoiseParams:
    """Per-gate timing noise.

    delay_mean and jitter_sigma are in seconds, as is meta_sigma (the scale
    of the flip-flop setup/hold window). hold_bias is the probability that a
    MUX latch caught mid-transition settles to 1.
    """

    delay_mean: float = 1.0e-10
    jitter_sigma: float = 5.0e-12
    meta_sigma: float = 2.0e-12
    hold_bias: float = 0.5

    def __post_init__(self):
        if not self.delay_mean > 0:
            raise ValueError(f"delay_mean must be > 0, got {self.delay_mean}")
        if not self.jitter_sigma >= 0:
            raise ValueError(f"jitter_sigma must be >= 0, got {self.jitter_sigma}")
        if not self.meta_sigma >= 0:
            raise ValueError(f"meta_sigma must be >= 0, got {self.meta_sigma}")
        if not 0.0 <= self.hold_bias <= 1.0:
            raise ValueError(f"hold_bias must lie in [0, 1], got {self.hold_bias}")

    @property
    def delay_floor(self) -> float:
        return self.delay_mean / 100.0

    @classmethod
    def noiseless(cls, delay_mean: float = 1.0e-10, hold_bias: float = 0.0) -> "NoiseParams":
        return cls(delay_mean=delay_mean, jitter_sigma=0.0, meta_sigma=0.0, hold_bias=hold_bias)


@dataclass(frozen=True)
class PvtCondition:
    temperature_c: float = NOMINAL_TEMPERATURE_C
    voltage_v: float = NOMINAL_VOLTAGE_V

    def __post_init__(self):
        if not -55.0 <= self.temperature_c <= 125.0:
            raise ValueError(f"temperature_c must lie in [-55, 125], got {self.temperature_c}")
        if not self.voltage_v > 0:
            raise ValueError(f"voltage_v must be > 0, got {self.voltage_v}")

    @property
    def is_nominal(self) -> bool:
        return self.temperature_c == NOMINAL_TEMPERATURE_C and self.voltage_v == NOMINAL_VOLTAGE_V


NOMINAL_PVT = PvtCondition()


def q_function(x: float) -> float:
    """Upper tail of the standard normal distribution, P(Z > x)."""
    if not math.isfinite(x):
        raise ValueError(f"q_function needs a finite argument, got {x}")
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def sample_gate_delay(params: NoiseParams, rng: np.random.Generator) -> float:
    """One propagation delay: Gaussian around delay_mean, floored at delay_mean/100."""
    if params.jitter_sigma == 0.0:
        return params.delay_mean
    d = params.delay_mean + params.jitter_sigma * rng.standard_normal()
    return max(params.delay_floor, d)


def settle_probability(delta: float, meta_sigma: float, rising: bool) -> float:
    """P(sampled bit == 1) for a data edge ``delta`` seconds after the clock edge.

    Outside the +-6 sigma window (or with meta_sigma == 0) the result is 0 or 1.
    A transition exactly on the clock edge counts as already taken when
    meta_sigma == 0.
    """
    if meta_sigma == 0.0 or abs(delta) > META_WINDOW * meta_sigma:
        settled_new = delta <= 0.0
        return float(settled_new == rising)
    p_rise = q_function(delta / meta_sigma)
    return p_rise if rising else 1.0 - p_rise


def metastable_resolve(delta: float, params: NoiseParams, rng: np.random.Generator,
                       rising: bool = True) -> int:
    """Resolve a flip-flop sampling a data transition ``delta`` seconds after its clock edge.

    ``delta`` > 0 means the data edge arrives after the clock. ``rising``
    selects the direction of that data edge.
    """
    p1 = settle_probability(delta, params.meta_sigma, rising)
    if p1 == 0.0 or p1 == 1.0:
        return int(p1)
    return int(rng.random() < p1)


def hold_latch(params: NoiseParams, rng: np.random.Generator) -> int:
    """Level captured by a hold loop that closes in the middle of a transition."""
    return int(rng.random() < params.hold_bias)


def apply_pvt(params: NoiseParams, cond: PvtCondition,
              temp_coeff_delay: float = TEMP_COEFF_DELAY,
              temp_coeff_jitter: float = TEMP_COEFF_JITTER,
              volt_coeff_delay: float = VOLT_COEFF_DELAY) -> NoiseParams:
    """Rescale delay and jitter for an operating condition.

    Linear in temperature (relative to 20 C) and in supply (relative to 1.0 V);
    scale factors are clamped at 1% so delays stay positive.
    """
    if cond.is_nominal:
        return params
    dt = cond.temperature_c - NOMINAL_TEMPERATURE_C
    dv = cond.voltage_v - NOMINAL_VOLTAGE_V
    delay_scale = max(0.01, (1.0 + temp_coeff_delay * dt) * (1.0 + volt_coeff_delay * dv))
    jitter_scale = max(0.0, 1.0 + temp_coeff_jitter * dt)
    return replace(params,
                   delay_mean=params.delay_mean * delay_scale,
                   jitter_sigma=params.jitter_sigma * jitter_scale)


def spawn_generators(seed: int, n: int) -> list[np.random.Generator]:
    """``n`` independent Philox substreams derived from one 64-bit seed."""
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    children = np.random.SeedSequence(seed).spawn(n)
    return [np.random.Generator(np.random.Philox(c)) for c in children]
