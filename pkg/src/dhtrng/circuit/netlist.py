"""Flat gate-level netlists.

Every node is the output of exactly one gate. Loops are built by adding the
gates first and wiring their inputs afterwards with :meth:`Netlist.connect`.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np


class Gate(IntEnum):
    CONST = 0
    SOURCE = 1  # driven from outside the netlist (stimulus, feedback flip-flop)
    INV = 2
    BUF = 3
    XOR = 4
    MUX = 5  # inputs (select, in0, in1)


_ARITY = {Gate.CONST: (0, 0), Gate.SOURCE: (0, 0), Gate.INV: (1, 1),
          Gate.BUF: (1, 1), Gate.XOR: (1, 64), Gate.MUX: (3, 3)}


@dataclass(frozen=True)
class CompiledNetlist:
    kind: np.ndarray
    init: np.ndarray
    fanin_ptr: np.ndarray
    fanin: np.ndarray
    fanout_ptr: np.ndarray
    fanout: np.ndarray

    @property
    def n_nodes(self) -> int:
        return len(self.kind)


class Netlist:
    def __init__(self):
        self.kinds: list[Gate] = []
        self.inputs: list[list[int]] = []
        self.names: list[str] = []
        self.init: list[int] = []

    def __len__(self):
        return len(self.kinds)

    def add(self, kind: Gate, inputs=(), name: str = "", init: int = 0) -> int:
        self.kinds.append(Gate(kind))
        self.inputs.append(list(inputs))
        self.names.append(name or f"n{len(self.kinds) - 1}")
        self.init.append(int(init))
        return len(self.kinds) - 1

    def connect(self, node: int, inputs) -> None:
        self.inputs[node] = list(inputs)

    def const(self, level: int, name: str = "") -> int:
        return self.add(Gate.CONST, name=name or f"tie{level}", init=level)

    def ring(self, stages: int, prefix: str) -> list[int]:
        """Free-running ring: one inverting stage followed by ``stages - 1`` buffers.

        A single inversion keeps exactly one wavefront in flight from the
        all-zero reset state; the last node is the ring's tap.
        """
        nodes = [self.add(Gate.INV, name=f"{prefix}.s0")]
        nodes += [self.add(Gate.BUF, name=f"{prefix}.s{i}") for i in range(1, stages)]
        self.connect(nodes[0], [nodes[-1]])
        for i in range(1, stages):
            self.connect(nodes[i], [nodes[i - 1]])
        return nodes

    def fanout_of(self, node: int) -> list[int]:
        return [g for g, ins in enumerate(self.inputs) if node in ins]

    def count(self, kind: Gate) -> int:
        return sum(1 for k in self.kinds if k == kind)

    def check(self) -> None:
        n = len(self)
        for g, (k, ins) in enumerate(zip(self.kinds, self.inputs)):
            lo, hi = _ARITY[k]
            if not lo <= len(ins) <= hi:
                raise ValueError(f"{self.names[g]}: {k.name} takes {lo}..{hi} inputs, got {len(ins)}")
            if any(not 0 <= i < n for i in ins):
                raise ValueError(f"{self.names[g]}: dangling input")

    def compile(self) -> CompiledNetlist:
        self.check()
        n = len(self)
        fanin_ptr = np.zeros(n + 1, dtype=np.int64)
        fanin_ptr[1:] = np.cumsum([len(ins) for ins in self.inputs])
        fanin = np.array([i for ins in self.inputs for i in ins], dtype=np.int64)

        outs: list[list[int]] = [[] for _ in range(n)]
        for g, ins in enumerate(self.inputs):
            for i in dict.fromkeys(ins):  # a gate listening twice to one node is evaluated once
                outs[i].append(g)
        fanout_ptr = np.zeros(n + 1, dtype=np.int64)
        fanout_ptr[1:] = np.cumsum([len(o) for o in outs])
        fanout = np.array([g for o in outs for g in o], dtype=np.int64)
        return CompiledNetlist(
            kind=np.array([int(k) for k in self.kinds], dtype=np.int64),
            init=np.array(self.init, dtype=np.int8),
            fanin_ptr=fanin_ptr, fanin=fanin,
            fanout_ptr=fanout_ptr, fanout=fanout,
        )
