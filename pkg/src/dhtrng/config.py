"""Flat ``section.key=value`` experiment files.

Example::

    # default circuit, hotter
    circuit.ro1_stages = 3
    circuit.seed = 7
    noise.jitter_sigma = 5e-12
    pvt.temperature_c = 80
    experiment.bits_per_stream = 1000000
    sweep.axis = voltage
    sweep.values = 0.8, 1.0, 1.2

Blank lines and ``#`` comments are ignored. Unknown keys are errors.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .circuit.trng import CircuitConfig, ConfigError
from .noise import NoiseParams, PvtCondition

SEED_ENV = "DHTRNG_SEED"

TEST_IDS = ("t0", "t1", "t2", "t3", "t4", "t5", "frequency", "block_frequency", "cusum", "runs",
            "longest_run", "serial", "approximate_entropy", "mcv", "collision", "markov",
            "acf", "bias")
BATTERIES = {
    "ais": ("t0", "t1", "t2", "t3", "t4", "t5"),
    "nist": ("frequency", "block_frequency", "cusum", "runs", "longest_run", "serial",
             "approximate_entropy"),
    "entropy": ("mcv", "collision", "markov"),
    "acf": ("acf",),
    "bias": ("bias",),
}
BATTERIES["all"] = tuple(t for k in ("ais", "nist", "entropy", "acf", "bias") for t in BATTERIES[k])

SWEEP_AXES = ("temperature", "voltage", "xor_count", "ro1_stages")
REPORT_FORMATS = ("json", "csv")


def parse_tests(spec: str | list) -> tuple[str, ...]:
    """Expand a comma list of battery names and test ids, keeping order, dropping repeats."""
    items = spec.split(",") if isinstance(spec, str) else list(spec)
    out: list[str] = []
    for item in (s.strip().lower() for s in items):
        if not item:
            continue
        if item in BATTERIES:
            out += BATTERIES[item]
        elif item in TEST_IDS:
            out.append(item)
        else:
            raise ConfigError(f"unknown test or battery {item!r}")
    if not out:
        raise ConfigError("no tests selected")
    return tuple(dict.fromkeys(out))


@dataclass(frozen=True)
class ExperimentConfig:
    circuit: CircuitConfig = field(default_factory=CircuitConfig)
    tests: tuple = BATTERIES["all"]
    streams: int = 1
    bits_per_stream: int = 1_000_000
    output_dir: Path = Path(".")
    report_format: str = "json"

    def __post_init__(self):
        if self.streams < 1:
            raise ConfigError("streams must be >= 1")
        if self.bits_per_stream < 1:
            raise ConfigError("bits_per_stream must be >= 1")
        if self.report_format not in REPORT_FORMATS:
            raise ConfigError(f"report_format must be one of {REPORT_FORMATS}")
        parse_tests(list(self.tests))

    def stream_seeds(self) -> list[int]:
        return [(self.circuit.seed + i) % 2**64 for i in range(self.streams)]


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    values: tuple
    repeats: int = 1

    def __post_init__(self):
        if self.axis not in SWEEP_AXES:
            raise ConfigError(f"sweep axis must be one of {SWEEP_AXES}, got {self.axis!r}")
        if not self.values:
            raise ConfigError("sweep needs at least one value")
        if self.repeats < 1:
            raise ConfigError("repeats must be >= 1")
        v = list(self.values)
        inc = all(a < b for a, b in zip(v, v[1:]))
        dec = all(a > b for a, b in zip(v, v[1:]))
        if len(v) > 1 and not (inc or dec):
            raise ConfigError("sweep values must be strictly monotone")
        if self.axis in ("xor_count", "ro1_stages") and any(int(x) != x or x < 1 for x in v):
            raise ConfigError(f"{self.axis} values must be positive integers")

    def point_config(self, base: CircuitConfig, value) -> CircuitConfig:
        """The circuit for one axis value. Raises ConfigError for invalid points."""
        try:
            if self.axis == "temperature":
                return replace(base, pvt=PvtCondition(float(value), base.pvt.voltage_v))
            if self.axis == "voltage":
                return replace(base, pvt=PvtCondition(base.pvt.temperature_c, float(value)))
            if self.axis == "ro1_stages":
                return replace(base, ro1_stages=int(value))
            n = int(value)
            # n parallel hybrid units XORed together, nothing else
            return replace(base, coupling_sets=1, entropy_units_per_set=n, edge_rings_per_set=2 * n,
                           central_rings_per_set=0, coupling_enabled=False, feedback_enabled=False)
        except ValueError as err:
            raise ConfigError(f"invalid {self.axis} value {value!r}: {err}") from err

    def configs(self, base: CircuitConfig) -> list[CircuitConfig]:
        return [self.point_config(base, v) for v in self.values]


def _parse_bool(s: str) -> bool:
    low = s.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _parse_int(s: str) -> int:
    return int(s.strip(), 0)


def _caster(cls, name):
    typ = {f.name: f.type for f in fields(cls)}[name]
    typ = typ if isinstance(typ, str) else typ.__name__
    if typ == "bool":
        return _parse_bool
    if typ == "int":
        return _parse_int
    if typ == "float":
        return float
    raise KeyError(name)


_CIRCUIT_KEYS = {f.name for f in fields(CircuitConfig)} - {"noise", "pvt"}
_NOISE_KEYS = {f.name for f in fields(NoiseParams)}
_PVT_KEYS = {f.name for f in fields(PvtCondition)}


def read_key_values(text: str) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key or "." not in key:
            raise ConfigError(f"line {lineno}: keys look like section.name, got {key!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def build_configs(kv: dict[str, str], env=None):
    """(ExperimentConfig, SweepSpec or None) from parsed key-values."""
    env = os.environ if env is None else env
    circ, noise, pvt, exp, sweep = {}, {}, {}, {}, {}
    try:
        for key, value in kv.items():
            section, name = key.split(".", 1)
            if section == "circuit" and name in _CIRCUIT_KEYS:
                circ[name] = _caster(CircuitConfig, name)(value)
            elif section == "noise" and name in _NOISE_KEYS:
                noise[name] = float(value)
            elif section == "pvt" and name in _PVT_KEYS:
                pvt[name] = float(value)
            elif section == "experiment" and name in ("streams", "bits_per_stream"):
                exp[name] = _parse_int(value)
            elif section == "experiment" and name == "tests":
                exp[name] = parse_tests(value)
            elif section == "experiment" and name == "output_dir":
                exp[name] = Path(value)
            elif section == "experiment" and name == "report_format":
                exp[name] = value.lower()
            elif section == "sweep" and name == "axis":
                sweep[name] = value
            elif section == "sweep" and name == "values":
                sweep[name] = tuple(float(v) for v in value.split(",") if v.strip())
            elif section == "sweep" and name == "repeats":
                sweep[name] = _parse_int(value)
            else:
                raise ConfigError(f"unknown config key {key!r}")
        if SEED_ENV in env and env[SEED_ENV] != "":
            circ["seed"] = _parse_int(env[SEED_ENV])
        circuit = CircuitConfig(noise=NoiseParams(**noise), pvt=PvtCondition(**pvt), **circ)
        experiment = ExperimentConfig(circuit=circuit, **exp)
        spec = None
        if sweep:
            if "axis" not in sweep or "values" not in sweep:
                raise ConfigError("a sweep needs sweep.axis and sweep.values")
            spec = SweepSpec(**sweep)
    except ConfigError:
        raise
    except (ValueError, TypeError) as err:
        raise ConfigError(str(err)) from err
    return experiment, spec


def load_config(path=None, env=None):
    """Read an experiment file (or defaults when ``path`` is None)."""
    text = ""
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as err:
            raise ConfigError(f"cannot read config {path}: {err}") from err
    return build_configs(read_key_values(text), env)
