"""Closed-form decoder cost models next to measured counter output.

Run:  python demos/complexity_models.py
"""

import numpy as np

from feclab.binlin import BitVector
from feclab.channel import gaussian_stream, modulate
from feclab.codebook import build_ca_polar_code, encode
from feclab.complexity import OpCounter, c_mp_wsd, c_osd, c_scl, c_wsd, to_ed_units
from feclab.decoders import WsdParams, wsd_trajectory
from feclab.wsphere import build_sphere

print("closed-form values (ED units):")
print(f"  scl  L=16 N=256          : {c_scl(16, 256):10.3f}")
print(f"  scl  L=32 N=256          : {c_scl(32, 256):10.3f}")
print(f"  osd  k=2  K=29           : {c_osd(2, 29):10.0f}")
print(f"  osd  k=4  K=29           : {c_osd(4, 29):10.0f}")
print(f"  mld  K=16                : {float(2**16):10.0f}")

code = build_ca_polar_code(256, 16)
sphere = build_sphere(code, 3)
m = max(10, int(np.ceil(0.02 * sphere.size)))
bound = c_wsd(4, m, 256, sphere.size, sphere.mean_nonzero_weight)
print(f"\nsingle trajectory bound (J=4, m={m}, |S|={sphere.size}, "
      f"w_bar={sphere.mean_nonzero_weight:.2f}): {bound:.1f}")

rng = gaussian_stream(0, 0)
y = modulate(encode(code, BitVector.from_bits(
    rng.integers(0, 2, 16, dtype=np.uint8)))) + 1.5 * rng.standard_normal(256)
anchor = encode(code, BitVector.from_bits(rng.integers(0, 2, 16, dtype=np.uint8)))
counters = OpCounter()
wsd_trajectory(y, anchor, sphere, WsdParams(radius_index=3, filter_size=m),
               counters, force_full_iterations=True)
measured = to_ed_units(counters, 256)
print(f"measured worst-case trajectory: {measured:.1f} "
      f"(ratio {measured / bound:.4f})")

print("\ntwo-stage totals at a few activation rates (L_init = 16):")
for p_act in (1.0, 0.3, 0.05, 0.0):
    total = c_mp_wsd(c_scl(16, 256), p_act, 16, bound)
    print(f"  p_act = {p_act:4.2f}: {total:10.1f}")
