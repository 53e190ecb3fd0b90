"""Event-driven timing simulation of a :class:`CompiledNetlist`.

Gates use inertial delays: each gate holds at most one pending output
change, and an input change that restores the current output cancels it, so
pulses shorter than a gate delay are swallowed. Because of that one-slot
rule the event queue is a tournament tree over the gates, keyed by
(pending time, insertion sequence): equal timestamps pop in FIFO order and
cancelling an event is a leaf update rather than a lazy deletion.

The numba kernels draw their noise from per-element buffers. Whenever a
buffer runs low the kernel stops between two events and returns
``REFILL``; the Python side tops the buffers up from each element's own
Philox stream and calls back in. The draw sequence of every element is
therefore independent of how the run is chunked.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from ..noise import META_WINDOW, NoiseParams, spawn_generators
from .netlist import CompiledNetlist, Gate

DONE = 0
REFILL = 1
STARVED = 2

_CONST = int(Gate.CONST)
_SOURCE = int(Gate.SOURCE)
_INV = int(Gate.INV)
_BUF = int(Gate.BUF)
_XOR = int(Gate.XOR)
_MUX = int(Gate.MUX)

HIST = 4  # transitions remembered per node
BUF_LEN = 8192
MARGIN = 32

# counters layout
C_REFILL = 0
C_PENDING = 1
C_SEQ = 2
C_EVENTS = 3
# fp layout
P_DMEAN = 0
P_DSIG = 1
P_DFLOOR = 2
P_MSIG = 3
P_HOLD = 4
P_WINDOW = 5


class SimulationFault(RuntimeError):
    pass


# ------------------------------------------------------------ event queue

@njit(cache=True, _nrt=False)
def _fix(g, tree, pend_time, pend_seq):
    """Replay the tournament from leaf ``g`` up to the root."""
    P = tree.shape[0] >> 1
    i = (P + g) >> 1
    while i >= 1:
        a = tree[2 * i]
        b = tree[2 * i + 1]
        ta = pend_time[a]
        tb = pend_time[b]
        tree[i] = a if (ta < tb or (ta == tb and pend_seq[a] < pend_seq[b])) else b
        i >>= 1


@njit(cache=True, _nrt=False)
def _schedule(g, t, val, q, cnt):
    pending, pend_time, pend_seq, tree = q
    if pending[g] < 0:
        cnt[C_PENDING] += 1
    pending[g] = val
    pend_time[g] = t
    pend_seq[g] = cnt[C_SEQ]
    cnt[C_SEQ] += 1
    _fix(g, tree, pend_time, pend_seq)


@njit(cache=True, _nrt=False)
def _cancel(g, q, cnt):
    pending, pend_time, pend_seq, tree = q
    if pending[g] >= 0:
        cnt[C_PENDING] -= 1
        pending[g] = -1
        pend_time[g] = np.inf
        _fix(g, tree, pend_time, pend_seq)


# ------------------------------------------------------------------ noise

@njit(cache=True, _nrt=False)
def _delay(g, noise, fp, cnt):
    sig = fp[P_DSIG]
    if sig == 0.0:
        return fp[P_DMEAN]
    nbuf, npos, ubuf, upos = noise
    i = npos[g]
    npos[g] = i + 1
    if i + 1 >= nbuf.shape[1] - MARGIN:
        cnt[C_REFILL] = 1
    return max(fp[P_DMEAN] + sig * nbuf[g, i], fp[P_DFLOOR])


@njit(cache=True, _nrt=False)
def _uniform(row, noise, cnt):
    nbuf, npos, ubuf, upos = noise
    i = upos[row]
    upos[row] = i + 1
    if i + 1 >= ubuf.shape[1] - MARGIN:
        cnt[C_REFILL] = 1
    return ubuf[row, i]


# ------------------------------------------------------------------ gates

@njit(cache=True, _nrt=False)
def _evaluate(f, now, net, st, q, noise, fp, cnt):
    kind, fin_ptr, fin, fout_ptr, fout = net
    level, aux, last_change, hist_t, hist_v, hist_p, tcount = st
    pending, pend_time, pend_seq, tree = q

    k = kind[f]
    if k == _CONST or k == _SOURCE:
        return
    a = fin_ptr[f]
    if k == _INV:
        target = 1 - level[fin[a]]
    elif k == _BUF:
        target = level[fin[a]]
    elif k == _XOR:
        target = 0
        for j in range(a, fin_ptr[f + 1]):
            target ^= level[fin[j]]
    else:
        sel = level[fin[a]]
        if sel == 1 and aux[f] == 0:
            # closing the hold loop: race the in-flight edge against the select
            aux[f] = 1
            if pending[f] >= 0:
                t_eff = now + _delay(f, noise, fp, cnt)
                tp = pend_time[f]
                msig = fp[P_MSIG]
                if msig > 0.0 and abs(tp - t_eff) <= msig:
                    latched = 1 if _uniform(f, noise, cnt) < fp[P_HOLD] else 0
                    if latched == level[f]:
                        _cancel(f, q, cnt)
                    else:
                        _schedule(f, t_eff, latched, q, cnt)
                elif tp >= t_eff:
                    _cancel(f, q, cnt)
            return
        aux[f] = sel
        target = level[fin[a + 2]] if sel == 1 else level[fin[a + 1]]

    if target == level[f]:
        _cancel(f, q, cnt)
    elif pending[f] < 0:
        _schedule(f, now + _delay(f, noise, fp, cnt), target, q, cnt)


@njit(cache=True, _nrt=False)
def _process(t_limit, net, st, q, noise, fp, cnt):
    """Apply every queued change with time <= t_limit."""
    kind, fin_ptr, fin, fout_ptr, fout = net
    level, aux, last_change, hist_t, hist_v, hist_p, tcount = st
    pending, pend_time, pend_seq, tree = q
    while True:
        if cnt[C_REFILL] != 0:
            return REFILL
        g = tree[1]
        t = pend_time[g]
        if t > t_limit:
            return DONE
        val = pending[g]
        pending[g] = -1
        pend_time[g] = np.inf
        cnt[C_PENDING] -= 1
        _fix(g, tree, pend_time, pend_seq)
        if level[g] == val:
            continue
        cnt[C_EVENTS] += 1
        level[g] = val
        last_change[g] = t
        tcount[g] += 1
        p = hist_p[g]
        hist_t[g, p % HIST] = t
        hist_v[g, p % HIST] = val
        hist_p[g] = p + 1
        for j in range(fout_ptr[g], fout_ptr[g + 1]):
            _evaluate(fout[j], t, net, st, q, noise, fp, cnt)


@njit(cache=True, _nrt=False)
def _sample(node, te, dff_row, st, noise, fp, cnt):
    """Flip-flop capture of ``node`` at clock edge ``te``."""
    level, aux, last_change, hist_t, hist_v, hist_p, tcount = st
    n = min(hist_p[node], HIST)
    best = -1
    best_d = np.inf
    first_after = -1
    first_after_t = np.inf
    for i in range(n):
        tr = hist_t[node, i]
        d = abs(tr - te)
        if d < best_d:
            best_d = d
            best = i
        if tr > te and tr < first_after_t:
            first_after_t = tr
            first_after = i
    msig = fp[P_MSIG]
    if msig > 0.0 and best >= 0 and best_d <= fp[P_WINDOW]:
        delta = hist_t[node, best] - te
        p_rise = 0.5 * math.erfc(delta / (msig * math.sqrt(2.0)))
        p1 = p_rise if hist_v[node, best] == 1 else 1.0 - p_rise
        return 1 if _uniform(dff_row, noise, cnt) < p1 else 0
    if first_after >= 0:
        return 1 - hist_v[node, first_after]
    return level[node]


@njit(cache=True, _nrt=False)
def _run_edges(edges, sampled, fb_node, dff_row0, out, samples, ist,
               net, st, q, noise, fp, cnt):
    """Clock the sampling array over ``edges[ist[0]:]``.

    ist = [next edge, feedback already queued for it, previous output bit].
    Returns a status code; after REFILL the call is simply repeated.
    """
    level = st[0]
    n_s = sampled.shape[0]
    keep = samples.shape[0] == edges.shape[0]
    while ist[0] < edges.shape[0]:
        if cnt[C_REFILL] != 0:
            return REFILL
        k = ist[0]
        te = edges[k]
        if fb_node >= 0 and ist[1] == 0:
            # let the previous feedback change land before queueing the next one
            status = _process(te, net, st, q, noise, fp, cnt)
            if status != DONE:
                return status
            # the delay is drawn every cycle so noise streams do not depend on the data
            d = _delay(fb_node, noise, fp, cnt)
            target = q[0][fb_node] if q[0][fb_node] >= 0 else level[fb_node]
            if target != ist[2]:
                _schedule(fb_node, te + d, ist[2], q, cnt)
            ist[1] = 1
        status = _process(te + fp[P_WINDOW], net, st, q, noise, fp, cnt)
        if status != DONE:
            return status
        parity = 0
        for s in range(n_s):
            b = _sample(sampled[s], te, dff_row0 + s, st, noise, fp, cnt)
            parity ^= b
            if keep:
                samples[k, s] = b
        out[k] = parity
        ist[0] = k + 1
        ist[1] = 0
        ist[2] = parity
        if cnt[C_PENDING] == 0 and (fb_node < 0 or level[fb_node] == parity):
            return STARVED
    return DONE


@njit(cache=True, _nrt=False)
def _evaluate_all(now, net, st, q, noise, fp, cnt):
    for g in range(net[0].shape[0]):
        _evaluate(g, now, net, st, q, noise, fp, cnt)


# ----------------------------------------------------------------- wrapper

class EventSimulator:
    """Owns the mutable state of one netlist simulation.

    ``n_samplers`` extra uniform streams are reserved for sampling flip-flops.
    """

    def __init__(self, netlist: CompiledNetlist, noise: NoiseParams, seed: int,
                 n_samplers: int = 0):
        self.netlist = netlist
        self.noise = noise
        self.n_samplers = n_samplers
        n = netlist.n_nodes
        self._net = (netlist.kind, netlist.fanin_ptr, netlist.fanin,
                     netlist.fanout_ptr, netlist.fanout)

        self.level = netlist.init.copy()
        self.aux = np.zeros(n, dtype=np.int8)
        self.last_change = np.full(n, -np.inf)
        self.hist_t = np.full((n, HIST), -np.inf)
        self.hist_v = np.zeros((n, HIST), dtype=np.int8)
        self.hist_p = np.zeros(n, dtype=np.int64)
        self.tcount = np.zeros(n, dtype=np.int64)
        self._st = (self.level, self.aux, self.last_change, self.hist_t, self.hist_v,
                    self.hist_p, self.tcount)

        # slot n is a sentinel that never fires
        P = 1
        while P < n + 1:
            P *= 2
        self.pending = np.full(n + 1, -1, dtype=np.int8)
        self.pend_time = np.full(n + 1, np.inf)
        self.pend_seq = np.zeros(n + 1, dtype=np.int64)
        tree = np.full(2 * P, n, dtype=np.int64)
        tree[P:P + n] = np.arange(n)
        self._q = (self.pending, self.pend_time, self.pend_seq, tree)

        gens = spawn_generators(seed, 2 * n + n_samplers)
        self._normal_gens = gens[:n]
        self._uniform_gens = gens[n:]
        self._nbuf = np.empty((n, BUF_LEN))
        self._ubuf = np.empty((n + n_samplers, BUF_LEN))
        self._npos = np.full(n, BUF_LEN, dtype=np.int64)
        self._upos = np.full(n + n_samplers, BUF_LEN, dtype=np.int64)
        self._noise = (self._nbuf, self._npos, self._ubuf, self._upos)
        self._cnt = np.zeros(4, dtype=np.int64)
        self._refill()

        self.fp = np.array([noise.delay_mean, noise.jitter_sigma, noise.delay_floor,
                            noise.meta_sigma, noise.hold_bias, META_WINDOW * noise.meta_sigma])
        self.now = 0.0
        _evaluate_all(0.0, self._net, self._st, self._q, self._noise, self.fp, self._cnt)

    @property
    def pending_events(self) -> int:
        return int(self._cnt[C_PENDING])

    @property
    def events_processed(self) -> int:
        return int(self._cnt[C_EVENTS])

    def _refill(self):
        half = BUF_LEN // 2
        for buf, pos, gens, draw in ((self._nbuf, self._npos, self._normal_gens, "standard_normal"),
                                     (self._ubuf, self._upos, self._uniform_gens, "random")):
            for row in np.nonzero(pos >= half)[0]:
                p = pos[row]
                rest = BUF_LEN - p
                buf[row, :rest] = buf[row, p:]
                buf[row, rest:] = getattr(gens[row], draw)(p)
                pos[row] = 0
        self._cnt[C_REFILL] = 0

    def _loop(self, call):
        while True:
            status = call()
            if status == DONE:
                return
            if status == REFILL:
                self._refill()
            elif status == STARVED:
                raise SimulationFault("event queue starved: no gate activity left")

    def drive(self, node: int, t: float, level: int) -> None:
        """Force a level change on a SOURCE node at time ``t``."""
        if self.netlist.kind[node] != int(Gate.SOURCE):
            raise ValueError("only SOURCE nodes can be driven")
        if t < self.now:
            raise ValueError("cannot drive a node in the past")
        _schedule(node, float(t), int(level), self._q, self._cnt)

    def run_until(self, t: float) -> None:
        if t < self.now:
            raise ValueError("time only moves forward")
        self._loop(lambda: _process(t, self._net, self._st, self._q, self._noise, self.fp, self._cnt))
        self.now = t

    def run_edges(self, edges: np.ndarray, sampled: np.ndarray, fb_node: int = -1,
                  out_prev: int = 0, keep_samples: bool = False):
        """Clock ``sampled`` nodes at every time in ``edges``; returns (outputs, samples)."""
        edges = np.ascontiguousarray(edges, dtype=np.float64)
        if len(edges) and edges[0] <= self.now:
            raise ValueError("clock edges must lie after the current simulation time")
        if np.any(np.diff(edges) <= 0):
            raise ValueError("clock edges must be strictly increasing")
        sampled = np.ascontiguousarray(sampled, dtype=np.int64)
        if len(sampled) > self.n_samplers:
            raise ValueError("more sampled nodes than reserved sampler streams")
        out = np.zeros(len(edges), dtype=np.int8)
        samples = np.zeros((len(edges) if keep_samples else 0, len(sampled)), dtype=np.int8)
        ist = np.array([0, 0, out_prev], dtype=np.int64)
        dff_row0 = self.netlist.n_nodes
        self._loop(lambda: _run_edges(edges, sampled, fb_node, dff_row0, out, samples, ist,
                                      self._net, self._st, self._q, self._noise, self.fp,
                                      self._cnt))
        if len(edges):
            self.now = float(edges[-1] + self.fp[P_WINDOW])
        return out, samples
