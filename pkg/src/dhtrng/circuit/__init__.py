from .bitstream import BitStream, as_bits
from .engine import EventSimulator, SimulationFault
from .netlist import Gate, Netlist
from .trng import (CircuitConfig, ConfigError, DHTRNGCircuit, EntropyUnit, EntropyUnitState,
                   RingState, SamplerState, advance_to_clock_edge, build_circuit, generate,
                   generate_fast, step_entropy_unit)
