"""Narrated single decode: encode, corrupt, list-decode, then refine.

Run:  python demos/two_stage_walkthrough.py
"""

import numpy as np

from feclab.binlin import BitVector
from feclab.channel import awgn, ebno_to_sigma, gaussian_stream, modulate, squared_distance
from feclab.codebook import build_ca_polar_code, encode
from feclab.complexity import OpCounter, to_ed_units
from feclab.decoders import SclStage, WsdParams, two_stage_decode
from feclab.wsphere import build_sphere

code = build_ca_polar_code(64, 16)
sphere = build_sphere(code, 2)
print(f"code {code.label()}, sphere r=2 with {sphere.size} members "
      f"(shells {sphere.shell_table()})")

seed = 7  # a draw where the CRC gate fails and the refinement stage saves it
msg = BitVector.from_bits(gaussian_stream(seed, 1).integers(0, 2, 16, dtype=np.uint8))
codeword = encode(code, msg)
x = modulate(codeword)
sigma = ebno_to_sigma(1.5, 16 / 64)
y = awgn(x, sigma, seed, 0)
print(f"message {msg.bits().tolist()}")
print(f"Eb/N0 = 1.5 dB -> sigma = {sigma:.3f}; "
      f"transmitted ED anchor ||y - x||^2 = {squared_distance(y, x):.3f}")

params = WsdParams(radius_index=2, max_iterations=4, num_paths=4)
counters = OpCounter()
result = two_stage_decode(y, code, SclStage(4), params, sphere,
                          sigma=sigma, counters=counters)

print(f"\nresolved at stage: {result.stage}")
for trace in result.traces:
    hops = " -> ".join(f"{ed:.3f}" for ed in trace.squared_eds)
    print(f"  path {trace.path_index}: ED {hops}  "
          f"({trace.iterations_used} iterations attempted)")
print(f"\nfinal ED {result.squared_ed:.3f}, "
      f"decoded correctly: {result.best_message == msg}")
print(f"measured cost: {to_ed_units(counters, code.n):.1f} ED units")
