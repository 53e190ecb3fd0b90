"""The dynamic hybrid TRNG netlist and its bit generators.

Topology per coupling set:

* entropy units: a free-running ring RO1 whose tap R1 drives the select of
  a MUX ring RO2 (select 0 closes an inverter loop, select 1 a hold loop);
  RO1 and RO2 are the set's first edge rings
* any remaining edge rings are plain rings of ``ro1_stages`` stages
* central rings: loops of ``central_ring_xor_stages`` XOR gates; gate i taps
  an edge ring, the last gate also listens to the registered output

Every edge and central ring tap is sampled by its own flip-flop, the samples
are XOR-reduced into the output flip-flop and a feedback flip-flop presents
that output to the central rings one clock later.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from ..noise import (META_WINDOW, NoiseParams, PvtCondition, apply_pvt, settle_probability,
                     spawn_generators)
from .bitstream import BitStream
from .engine import EventSimulator, SimulationFault
from .netlist import Gate, Netlist

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class CircuitConfig:
    coupling_sets: int = 2
    edge_rings_per_set: int = 4
    central_rings_per_set: int = 2
    central_ring_xor_stages: int = 2
    entropy_units_per_set: int = 2
    ro1_stages: int = 3
    sample_clock_hz: float = 6.2e8
    noise: NoiseParams = field(default_factory=NoiseParams)
    pvt: PvtCondition = field(default_factory=PvtCondition)
    seed: int = 1
    feedback_enabled: bool = True
    coupling_enabled: bool = True
    warmup_edges: int = 64

    def __post_init__(self):
        counts = dict(coupling_sets=self.coupling_sets, edge_rings_per_set=self.edge_rings_per_set,
                      central_rings_per_set=self.central_rings_per_set,
                      central_ring_xor_stages=self.central_ring_xor_stages,
                      entropy_units_per_set=self.entropy_units_per_set,
                      ro1_stages=self.ro1_stages, warmup_edges=self.warmup_edges)
        for name, v in counts.items():
            if int(v) != v or v < 0:
                raise ConfigError(f"{name} must be a non-negative integer, got {v}")
        if self.coupling_sets < 1:
            raise ConfigError("need at least one coupling set")
        if self.ro1_stages < 1:
            raise ConfigError("ro1_stages must be >= 1")
        if self.edge_rings_per_set + self.central_rings_per_set < 1:
            raise ConfigError("a coupling set needs at least one ring")
        if 2 * self.entropy_units_per_set > self.edge_rings_per_set:
            raise ConfigError("each entropy unit occupies two edge rings (RO1, RO2): "
                              f"{self.entropy_units_per_set} units need "
                              f"{2 * self.entropy_units_per_set} edge rings, got {self.edge_rings_per_set}")
        if self.central_rings_per_set and self.central_ring_xor_stages < 1:
            raise ConfigError("central rings need at least one XOR stage")
        if self.central_rings_per_set and self.coupling_enabled and self.edge_rings_per_set < 1:
            raise ConfigError("coupled central rings need edge rings to tap")
        if self.feedback_enabled and not self.central_rings_per_set:
            raise ConfigError("feedback is injected into central rings, but there are none")
        if not self.sample_clock_hz > 0:
            raise ConfigError("sample_clock_hz must be > 0")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")

    @property
    def sampled_rings(self) -> int:
        return self.coupling_sets * (self.edge_rings_per_set + self.central_rings_per_set)

    @property
    def clock_period(self) -> float:
        return 1.0 / self.sample_clock_hz

    @property
    def effective_noise(self) -> NoiseParams:
        return apply_pvt(self.noise, self.pvt)

    @property
    def is_plain(self) -> bool:
        """True when every sampled ring is an isolated free-running ring."""
        return (not self.coupling_enabled and not self.feedback_enabled
                and self.entropy_units_per_set == 0)

    def with_seed(self, seed: int) -> "CircuitConfig":
        return replace(self, seed=seed)


class RingState(NamedTuple):
    name: str
    level: int
    next_event_time: float
    mode: str  # "oscillating" or "holding"
    last_transition_time: float


class SamplerState(NamedTuple):
    sampled_bits: tuple
    feedback_bit: int
    output_bit: int


@dataclass
class _Layout:
    netlist: Netlist
    sampled: list = field(default_factory=list)  # (name, node)
    muxes: list = field(default_factory=list)  # (mux node, select node)
    feedback: int = -1
    central_xors: list = field(default_factory=list)


def _entropy_unit(net: Netlist, ro1_stages: int, prefix: str, select: int | None = None):
    """Add RO1 + MUX ring RO2; returns (R1 tap, R2 tap = MUX output)."""
    if select is None:
        r1 = net.ring(ro1_stages, f"{prefix}.ro1")[-1]
    else:
        r1 = select
    mux = net.add(Gate.MUX, name=f"{prefix}.ro2.mux")
    inv = net.add(Gate.INV, [mux], name=f"{prefix}.ro2.inv")
    net.connect(mux, [r1, inv, mux])
    return r1, mux


def _layout(cfg: CircuitConfig) -> _Layout:
    net = Netlist()
    lay = _Layout(net)
    if cfg.feedback_enabled:
        lay.feedback = net.add(Gate.SOURCE, name="feedback_dff")
    tie1 = net.const(1) if (cfg.central_rings_per_set and not cfg.coupling_enabled) else None

    for s in range(cfg.coupling_sets):
        edge = []
        for u in range(cfg.entropy_units_per_set):
            r1, mux = _entropy_unit(net, cfg.ro1_stages, f"set{s}.unit{u}")
            edge += [(f"set{s}.unit{u}.R1", r1), (f"set{s}.unit{u}.R2", mux)]
            lay.muxes.append((mux, r1))
        for e in range(cfg.edge_rings_per_set - 2 * cfg.entropy_units_per_set):
            edge.append((f"set{s}.ring{e}", net.ring(cfg.ro1_stages, f"set{s}.ring{e}")[-1]))

        central = []
        U = cfg.entropy_units_per_set
        for j in range(cfg.central_rings_per_set):
            xs = [net.add(Gate.XOR, name=f"set{s}.central{j}.x{i}")
                  for i in range(cfg.central_ring_xor_stages)]
            for i, x in enumerate(xs):
                ins = [xs[i - 1]]
                if cfg.coupling_enabled:
                    if U:
                        # units enter the two central rings in opposite order:
                        # ring j takes RO1 of unit j and RO2 of unit j+1, ...
                        tap = 2 * ((j + i) % U) + (i % 2)
                    else:
                        tap = (j + i) % len(edge)
                    ins.append(edge[tap][1])
                elif i == 0:
                    ins.append(tie1)
                if i == len(xs) - 1 and lay.feedback >= 0:
                    ins.append(lay.feedback)
                net.connect(x, ins)
            lay.central_xors += xs
            central.append((f"set{s}.central{j}", xs[-1]))
        lay.sampled += edge + central
    net.check()
    return lay


class DHTRNGCircuit:
    """A built netlist plus its simulation state."""

    def __init__(self, config: CircuitConfig):
        self.config = config
        self._lay = _layout(config)
        self.netlist = self._lay.netlist
        self.noise = config.effective_noise
        self.sampled_nodes = np.array([n for _, n in self._lay.sampled], dtype=np.int64)
        self.sampled_names = [name for name, _ in self._lay.sampled]
        self.sim = EventSimulator(self.netlist.compile(), self.noise, config.seed,
                                  n_samplers=len(self.sampled_nodes))
        self.last_edge = 0.0
        self.output_bit = 0
        self.edges_done = 0

    # structure ---------------------------------------------------------
    @property
    def n_sampled_rings(self) -> int:
        return len(self.sampled_nodes)

    @property
    def n_dffs(self) -> int:
        return self.n_sampled_rings + 1 + (1 if self.has_feedback_arc else 0)

    @property
    def n_muxes(self) -> int:
        return self.netlist.count(Gate.MUX)

    @property
    def has_feedback_arc(self) -> bool:
        fb = self._lay.feedback
        return fb >= 0 and bool(self.netlist.fanout_of(fb))

    @property
    def feedback_bit(self) -> int:
        fb = self._lay.feedback
        return int(self.sim.level[fb]) if fb >= 0 else 0

    def ring_states(self) -> list[RingState]:
        sim = self.sim
        holding = {mux: sel for mux, sel in self._lay.muxes}
        out = []
        for name, node in self._lay.sampled:
            mode = "holding" if node in holding and sim.level[holding[node]] == 1 else "oscillating"
            nxt = float(sim.pend_time[node]) if sim.pending[node] >= 0 else float("inf")
            out.append(RingState(name, int(sim.level[node]), nxt, mode, float(sim.last_change[node])))
        return out

    # clocking ----------------------------------------------------------
    def _clock(self, edges: np.ndarray, keep_samples: bool = False):
        out, samples = self.sim.run_edges(edges, self.sampled_nodes, self._lay.feedback,
                                          self.output_bit, keep_samples)
        if len(edges):
            self.last_edge = float(edges[-1])
            self.output_bit = int(out[-1])
            self.edges_done += len(edges)
        return out, samples

    def advance_to_clock_edge(self, edge_time: float) -> SamplerState:
        if not edge_time > self.last_edge:
            raise ValueError(f"clock edge {edge_time!r} does not follow the previous edge {self.last_edge!r}")
        fb_before = self.output_bit
        out, samples = self._clock(np.array([edge_time]), keep_samples=True)
        return SamplerState(tuple(int(b) for b in samples[0]), fb_before, int(out[0]))

    def run(self, n_edges: int, keep_samples: bool = False, chunk: int = 1 << 16):
        """Clock ``n_edges`` further periods; returns (output bits, samples or None)."""
        T = self.config.clock_period
        outs, samps = [], []
        done = 0
        while done < n_edges:
            m = min(chunk, n_edges - done)
            k = np.arange(self.edges_done + 1, self.edges_done + m + 1, dtype=np.float64)
            out, samples = self._clock(k * T, keep_samples)
            outs.append(out)
            if keep_samples:
                samps.append(samples)
            done += m
        out = np.concatenate(outs) if outs else np.zeros(0, dtype=np.int8)
        if keep_samples:
            return out, (np.concatenate(samps) if samps else np.zeros((0, self.n_sampled_rings), np.int8))
        return out, None


def build_circuit(config: CircuitConfig) -> DHTRNGCircuit:
    return DHTRNGCircuit(config)


def advance_to_clock_edge(circuit: DHTRNGCircuit, edge_time: float) -> SamplerState:
    return circuit.advance_to_clock_edge(edge_time)


def generate(config: CircuitConfig, n_bits: int) -> BitStream:
    """Event-driven generation of ``n_bits`` output bits after the warm-up edges."""
    if n_bits < 1:
        raise ValueError("n_bits must be >= 1")
    t0 = time.perf_counter()
    circ = build_circuit(config)
    circ.run(config.warmup_edges)
    out, _ = circ.run(n_bits)
    dt = time.perf_counter() - t0
    log.debug("generated %d bits, simulation rate %.3g bit/s", n_bits, n_bits / max(dt, 1e-9))
    return BitStream.from_bits(out)


# ------------------------------------------------------------ fast path

def _ring_transitions(rng, stages, noise, t_end):
    """Tap transition times of an isolated ring (accumulated stage delays)."""
    mean_half = stages * noise.delay_mean
    n = int(t_end / mean_half * 1.05) + 64
    times = []
    t = 0.0
    while t <= t_end:
        if noise.jitter_sigma == 0.0:
            d = np.full((n, stages), noise.delay_mean)
        else:
            d = noise.delay_mean + noise.jitter_sigma * rng.standard_normal((n, stages))
            np.maximum(d, noise.delay_floor, out=d)
        tt = t + np.cumsum(d.sum(axis=1))
        times.append(tt)
        t = tt[-1]
    return np.concatenate(times)


def generate_fast(config: CircuitConfig, n_bits: int) -> BitStream:
    """Behavioural generator for configurations made only of isolated rings.

    Each ring's tap is an alternating sequence of edges whose spacing is the
    sum of the stage delays; samplers are evaluated directly against those
    edge times. Statistically equivalent to :func:`generate` for such
    configurations, not bit-identical.
    """
    if config.coupling_enabled or config.feedback_enabled:
        raise ConfigError("generate_fast only handles uncoupled rings without feedback")
    if config.entropy_units_per_set:
        raise ConfigError("generate_fast cannot model entropy units (MUX rings are not free-running)")
    if n_bits < 1:
        raise ValueError("n_bits must be >= 1")
    noise = config.effective_noise
    stages = ([config.ro1_stages] * config.edge_rings_per_set
              + [config.central_ring_xor_stages] * config.central_rings_per_set) * config.coupling_sets
    n_edges = config.warmup_edges + n_bits
    edges = np.arange(1, n_edges + 1, dtype=np.float64) * config.clock_period
    t_end = edges[-1] + META_WINDOW * noise.meta_sigma + noise.delay_mean
    gens = spawn_generators(config.seed, 2 * len(stages))
    out = np.zeros(n_edges, dtype=np.uint8)
    for r, n_st in enumerate(stages):
        tr = _ring_transitions(gens[2 * r], n_st, noise, t_end)
        # tap level after transition i is 1 for even i (starts low, first edge rises)
        idx = np.searchsorted(tr, edges, side="right")  # transitions at or before the edge
        level_at = (idx % 2).astype(np.uint8)
        prev_t = np.where(idx > 0, tr[np.maximum(idx - 1, 0)], -np.inf)
        next_t = tr[np.minimum(idx, len(tr) - 1)]
        use_next = np.abs(next_t - edges) < np.abs(prev_t - edges)
        near = np.where(use_next, idx, idx - 1)
        delta = np.where(use_next, next_t, prev_t) - edges
        bits = level_at
        if noise.meta_sigma > 0:
            win = np.abs(delta) <= META_WINDOW * noise.meta_sigma
            if np.any(win):
                rising = (near[win] % 2) == 0
                p1 = np.array([settle_probability(d, noise.meta_sigma, bool(ri))
                               for d, ri in zip(delta[win], rising)])
                u = gens[2 * r + 1].random(p1.size)
                bits = bits.copy()
                bits[win] = (u < p1).astype(np.uint8)
        out ^= bits
    return BitStream.from_bits(out[config.warmup_edges:])


# ------------------------------------------------------- entropy unit

@dataclass(frozen=True)
class EntropyUnitState:
    time: float
    r1: int
    r2: int
    mode: str
    r2_transitions: int


class EntropyUnit:
    """A single hybrid unit simulated on its own.

    With ``select=None`` RO1 drives the MUX; otherwise ``select`` is a list of
    (time, level) pairs forcing R1 (the RO1 ring is then left out).
    """

    def __init__(self, noise: NoiseParams | None = None, ro1_stages: int = 3, seed: int = 1,
                 select=None):
        self.noise = noise or NoiseParams()
        net = Netlist()
        src = None
        if select is not None:
            src = net.add(Gate.SOURCE, name="R1")
        self.r1, self.r2 = _entropy_unit(net, ro1_stages, "unit", select=src)
        self.sim = EventSimulator(net.compile(), self.noise, seed)
        self._src = src
        self._stimuli = sorted((float(t), int(v)) for t, v in select) if select is not None else []

    def state(self) -> EntropyUnitState:
        sim = self.sim
        return EntropyUnitState(sim.now, int(sim.level[self.r1]), int(sim.level[self.r2]),
                                "holding" if sim.level[self.r1] else "oscillating",
                                int(sim.tcount[self.r2]))

    def step(self, now: float) -> EntropyUnitState:
        # a SOURCE holds one pending change, so stimuli are applied in order
        while self._stimuli and self._stimuli[0][0] <= now:
            t, level = self._stimuli.pop(0)
            self.sim.run_until(max(t, self.sim.now))
            self.sim.drive(self._src, t, level)
        self.sim.run_until(now)
        return self.state()


def step_entropy_unit(unit: EntropyUnit, now: float) -> EntropyUnitState:
    return unit.step(now)


__all__ = ["CircuitConfig", "ConfigError", "DHTRNGCircuit", "EntropyUnit", "EntropyUnitState",
           "RingState", "SamplerState", "SimulationFault", "advance_to_clock_edge",
           "build_circuit", "generate", "generate_fast", "step_entropy_unit"]
