"""Restart test: independent power-ups must not repeat their first output bits."""

from __future__ import annotations

from dataclasses import replace

from ..circuit.trng import CircuitConfig, generate
from .report import TestReport, Verdict


def restart_test(config: CircuitConfig, trials: int = 6, prefix_bits: int = 32,
                 seeds=None) -> TestReport:
    """Generate ``trials`` streams and require pairwise-distinct prefixes.

    Seeds default to config.seed + i. Pass ``seeds`` explicitly (for example
    a repeated seed as a negative control) to override. One trial passes
    trivially.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if prefix_bits < 8:
        raise ValueError("prefix_bits must be >= 8")
    if seeds is None:
        seeds = [(config.seed + i) % 2**64 for i in range(trials)]
    seeds = list(seeds)
    if len(seeds) != trials:
        raise ValueError("need one seed per trial")
    words = [generate(replace(config, seed=s), prefix_bits).to_int() for s in seeds]
    distinct = len(set(words))
    width = (prefix_bits + 3) // 4
    return TestReport("restart", distinct, bounds=(trials, trials),
                      verdict=Verdict.PASS if distinct == trials else Verdict.FAIL,
                      sample_bits=trials * prefix_bits,
                      details={"seeds": seeds, "prefixes": [f"0x{w:0{width}X}" for w in words]})
