"""Build the code-weight spheres used throughout and print their shell
tables, both with and without the zero codeword.

Run:  python demos/sphere_tables.py
"""

import time

from feclab.codebook import build_ca_polar_code, build_rm_code
from feclab.wsphere import build_sphere, enumerate_spectrum

print("=== (256,16) CRC-aided polar code ===")
ca = build_ca_polar_code(256, 16)
t0 = time.time()
spectrum = enumerate_spectrum(ca)
print(f"weight spectrum (first shells): {spectrum.entries[:6]}  "
      f"[{time.time() - t0:.2f}s]")
cumulative = 0
for r, (weight, count) in enumerate(spectrum.entries[:5]):
    cumulative += count
    print(f"  r={r}:  d_r={weight:3d}  shell={count:6d}  "
          f"|S_r(0)|={cumulative:6d}  (without zero: {cumulative - 1})")

sphere = build_sphere(ca, 3)
print(f"r=3 sphere: {sphere.size} members, "
      f"mean nonzero weight {sphere.mean_nonzero_weight:.3f}")

print()
print("=== (128,29) Reed-Muller code, full 2^29 enumeration ===")
rm = build_rm_code(7, 2)
t0 = time.time()
spectrum = enumerate_spectrum(rm)
print(f"enumerated 2^29 codewords in {time.time() - t0:.1f}s")
for r, (weight, count) in enumerate(spectrum.entries[:4]):
    print(f"  shell {r}: weight {weight:3d}  count {count}")
d1_count = spectrum.entries[1][1]
print(f"|S_1(0)| = {1 + d1_count} including the zero codeword "
      f"({d1_count} minimum-weight codewords)")
