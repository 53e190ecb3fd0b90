"""Controls: what the circuit does without noise, and with feedback removed.

With every noise source off the two coupling sets are exact copies, their
parities cancel in the final XOR and the output is constant. Restoring
jitter alone (no metastability) is enough to decorrelate them.
"""

from dataclasses import replace

from dhtrng.circuit import CircuitConfig, build_circuit, generate
from dhtrng.noise import NoiseParams
from dhtrng.stats import find_period, mcv_estimate, nist_frequency

base = CircuitConfig()

s = generate(replace(base, noise=NoiseParams.noiseless()), 1 << 16)
print(f"noiseless: period {find_period(s, 1 << 14)}, frequency p {nist_frequency(s).p_value:.2e}")

s = generate(replace(base, noise=NoiseParams(meta_sigma=0.0)), 1 << 16)
print(f"jitter only: period {find_period(s, 1 << 14)}, MCV h {mcv_estimate(s).h_min:.4f}")

for fb in (True, False):
    c = build_circuit(replace(base, feedback_enabled=fb))
    c.run(64)
    out, samples = c.run(50_000, keep_samples=True)
    means = " ".join(f"{m:.2f}" for m in samples.mean(axis=0))
    print(f"feedback {'on ' if fb else 'off'}: output mean {out.mean():.4f}; ring means {means}")
