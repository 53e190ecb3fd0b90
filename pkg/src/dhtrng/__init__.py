"""Gate-level simulation and statistical evaluation of a dynamic hybrid TRNG."""

from .circuit import BitStream, CircuitConfig, build_circuit, generate, generate_fast
from .noise import NoiseParams, PvtCondition

__version__ = "0.1.0"
