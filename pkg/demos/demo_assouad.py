#!/usr/bin/env python3
"""Assouad dimension, the upper spectrum, and quasi-Assouad extrapolation.

All three ask how thick the set can look locally: the largest r-mesh count
inside a ball B(x, R), maximized over centers, regressed against log(R/r).
The spectrum constrains r = R**(1/alpha); its alpha -> 1 trend extrapolates
to the quasi-Assouad value.
"""

import numpy as np

import dimlab as dl
from dimlab.assouad import spectrum_pairs, usable_alphas
from dimlab.theorems import default_scale_pairs

cantor = dl.middle_third_cantor(12)
f1 = dl.gen_sequence_set(1.0, 10_000)

# Homogeneous sets: every localization looks alike, so Assouad = box.
pairs = default_scale_pairs(cantor)
est = dl.estimate_assouad(cantor, pairs)
print(f"cantor Assouad: {est.value:.4f} (box dimension log2/log3 = 0.6309)")
print(f"  sample pair counts: "
      f"{[(row['R'], row['count']) for row in est.diagnostics.table[:4]]}")

# The sequence set is the classic inhomogeneous example: box dim 1/2 but
# Assouad dimension 1, driven by the accumulation at 0. The default pairs
# shrink R together with the gap, which is what exposes it.
est = dl.estimate_assouad(f1, default_scale_pairs(f1))
print(f"\nF_1 Assouad: {est.value:.4f} (true value 1, box dimension only 1/2)")

# The spectrum interpolates: for F_1 it already reaches 1 at alpha = 1/2.
print("\nF_1 upper Assouad spectrum:")
for alpha in (0.5, 0.65):
    est = dl.estimate_assouad_spectrum(f1, alpha)
    n_pairs = len(spectrum_pairs(f1, alpha))
    print(f"  alpha={alpha}: {est.value:.4f} from {n_pairs} constrained pairs")

# Quasi-Assouad: extrapolate the spectrum linearly in 1 - alpha. The alpha
# grid is capped by the resolution; usable_alphas picks the largest grid
# whose constrained pairs still span enough count ratio.
alphas = usable_alphas(cantor)
qa = dl.estimate_quasi_assouad(cantor, alphas)
print(f"\ncantor quasi-Assouad over alphas {alphas}: {qa.value:.4f}")
print(f"  raw spectrum curve: {[round(v, 4) for v in qa.diagnostics.quantities]}")
