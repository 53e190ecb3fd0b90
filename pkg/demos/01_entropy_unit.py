"""One hybrid entropy unit on its own.

RO1's tap drives the select of a two-gate MUX ring (RO2). While the select
is low RO2 runs as an inverter loop; while it is high the MUX feeds its own
output back and RO2 holds whatever level it had. A select edge that lands
while RO2 is mid-transition leaves the latch undecided, and the model
resolves that race with a coin weighted by hold_bias.
"""

from dhtrng.circuit import EntropyUnit
from dhtrng.noise import NoiseParams

quiet = NoiseParams.noiseless()
window = 100e-9

# select held low: RO2 toggles every two gate delays
free = EntropyUnit(quiet, select=[]).step(window)
print(f"select low : {free.r2_transitions} RO2 transitions in {window * 1e9:.0f} ns")

# select raised at 1 ns: RO2 freezes one gate delay later
held = EntropyUnit(quiet, select=[(1e-9, 1)]).step(window)
print(f"select high: {held.r2_transitions} RO2 transitions, mode {held.mode}")

# the real unit: RO1 switches RO2 between the two regions
for sigma in (0.0, 5e-12, 2e-11):
    unit = EntropyUnit(NoiseParams(jitter_sigma=sigma), ro1_stages=3, seed=1)
    s = unit.step(window)
    print(f"RO1-driven, jitter {sigma * 1e12:4.0f} ps: {s.r2_transitions} RO2 transitions")
