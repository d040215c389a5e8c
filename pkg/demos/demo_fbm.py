#!/usr/bin/env python3
"""Fractional Brownian images and the dimension rescaling law.

An index-alpha fractional Brownian field over the cloud has increments of
variance |x - y|**(2 alpha) and is pinned to 0 at the origin. Images
rescale dimension profiles by 1/alpha: dim_theta B(E) = profile(m*alpha)/alpha.
"""

import numpy as np

import dimlab as dl
from dimlab.covering import ScaleGrid

# Increment statistics: sample the same cloud under many seeds.
cloud = dl.PointCloud.from_array(np.linspace(0.0, 1.0, 17), 1 / 16)
alpha = 0.6
sampler = dl.FbmSampler(cloud, alpha)
draws = np.array([sampler.sample(1, 5, index=(i,)).image.points[:, 0]
                  for i in range(5000)])
i, j = 3, 12
inc_var = (draws[:, i] - draws[:, j]).var()
target = abs(cloud.points[i, 0] - cloud.points[j, 0]) ** (2 * alpha)
print(f"increment variance {inc_var:.4f} vs |x-y|^(2a) = {target:.4f}")
print(f"B(0) is pinned: max |B(0)| over seeds = {abs(draws[:, 0]).max():.1e}")

# The image of the interval under alpha = 1/2 (Brownian motion) has
# dimension min(m, 1/alpha * profile) = 1 almost surely.
grid_src = ScaleGrid.dyadic(6, 10)
interval = dl.unit_interval_grid(2.0 ** -12)
prof = dl.estimate_profile(interval, 0.5, 1.0, grid_src)
print(f"\nprofile of [0,1] at t = m*alpha = 0.5: {prof.value:.4f} (theory 0.5)")

grid_img = ScaleGrid.dyadic(2, 6)
vals = []
for i in range(6):
    image = dl.sample_fbm(interval, 0.5, 1, seed=42, index=(i,)).image
    vals.append(dl.estimate_box_dim(image, grid_img).value)
print(f"image box dims over 6 seeds: {[round(v, 3) for v in vals]}")
print(f"median {np.median(vals):.4f} vs profile/alpha = {prof.value / 0.5:.4f}")

# The packaged checker compares the median against the rescaled profile.
verdict = dl.check_fbm(interval, alpha=0.5, m=1, theta=1.0, n_seeds=6,
                       grid=grid_src, seed=42)
print(f"fbm image check: passed={verdict.passed}, "
      f"lhs {verdict.lhs:.4f}, rhs {verdict.rhs:.4f}")
