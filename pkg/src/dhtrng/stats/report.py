"""Result records shared by every statistical test."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any

ALPHA = 0.01


class Verdict(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    NOT_APPLICABLE = "not applicable"


class InsufficientData(ValueError):
    """The stream is shorter than the test's documented minimum."""

    def __init__(self, test: str, need: int, have: int):
        super().__init__(f"{test} needs at least {need} bits, got {have}")
        self.test = test
        self.need = need
        self.have = have


@dataclass(frozen=True)
class TestReport:
    """Outcome of one test on one stream.

    Exactly one of ``p_value`` and ``bounds`` is set. For p-value tests the
    verdict is pass iff p >= 0.01; bounded tests pass iff ``statistic``
    lies inside ``bounds`` (open interval unless the test says otherwise).
    """

    __test__ = False  # keep pytest from collecting this class

    test_name: str
    statistic: Any
    p_value: float | None = None
    bounds: tuple | None = None
    verdict: Verdict = Verdict.PASS
    sample_bits: int = 0
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict != Verdict.NOT_APPLICABLE and (self.p_value is None) == (self.bounds is None):
            raise ValueError("exactly one of p_value and bounds must be given")
        if self.p_value is not None and not 0.0 <= self.p_value <= 1.0:
            raise ValueError(f"p-value {self.p_value} outside [0, 1]")

    @property
    def passed(self) -> bool:
        return self.verdict == Verdict.PASS

    @classmethod
    def from_p(cls, name: str, statistic, p: float, n: int, **details) -> "TestReport":
        p = min(1.0, max(0.0, float(p)))
        return cls(name, statistic, p_value=p, verdict=Verdict.PASS if p >= ALPHA else Verdict.FAIL,
                   sample_bits=n, details=details)

    @classmethod
    def not_applicable(cls, name: str, err: InsufficientData) -> "TestReport":
        return cls(name, None, verdict=Verdict.NOT_APPLICABLE, sample_bits=err.have,
                   details={"reason": str(err)})

    def to_dict(self) -> dict:
        d = asdict(self)
        d["verdict"] = self.verdict.value
        if self.bounds is not None:
            d["bounds"] = list(self.bounds)
        return d


@dataclass(frozen=True)
class MinEntropyEstimate:
    estimator: str
    p_max: float
    h_min: float
    sample_bits: int = 0
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 <= self.p_max <= 1.0:
            raise ValueError(f"p_max {self.p_max} outside [0, 1]")

    @classmethod
    def from_p(cls, estimator: str, p_max: float, n: int, **details) -> "MinEntropyEstimate":
        p_max = min(1.0, max(0.0, float(p_max)))
        h = -math.log2(p_max) if p_max > 0 else 1.0
        return cls(estimator, p_max, min(1.0, max(0.0, h)) + 0.0, n, details)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class AcfSeries:
    lags: tuple
    coefficients: tuple
    sample_bits: int = 0
    degenerate: bool = False
    threshold: float = 0.3

    @property
    def max_abs(self) -> float:
        if self.degenerate:
            return math.nan
        return max((abs(c) for c in self.coefficients), default=0.0)

    @property
    def verdict(self) -> Verdict:
        if self.degenerate:
            return Verdict.FAIL
        return Verdict.PASS if self.max_abs < self.threshold else Verdict.FAIL

    def to_dict(self) -> dict:
        return {"lags": list(self.lags), "coefficients": list(self.coefficients),
                "sample_bits": self.sample_bits, "degenerate": self.degenerate,
                "max_abs": self.max_abs, "verdict": self.verdict.value}
