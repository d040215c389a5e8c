#!/usr/bin/env python3
"""Tour of the canonical test sets and the geometric utilities.

Every generator records a resolution: the smallest inter-point scale the
finite cloud faithfully represents. Estimators refuse to look below it.
"""

import numpy as np

import dimlab as dl

# The polynomial sequence set {1/n} accumulates at 0 with gaps ~ 1/n^2, so
# the resolution is tiny even for modest truncations.
f1 = dl.gen_sequence_set(p=1.0, n_max=10_000)
print(f"F_1: {f1.size} points, resolution {f1.resolution:.3e}, "
      f"diameter {dl.diameter(f1):.3f}")

# The logarithmic sequence set decays so slowly that its box dimension is 1.
logset = dl.gen_log_set(20_000)
print(f"log set: {logset.size} points, largest element {logset.points.max():.4f}")

# Iterated function systems: the middle-third Cantor set via two maps.
cantor = dl.middle_third_cantor(10)
print(f"cantor depth 10: {cantor.size} points, min gap {cantor.resolution:.3e} "
      f"(= 2 * 3^-10 = {2 * 3.0 ** -10:.3e})")

# Products build planar sets; the resolution is the finer of the factors.
small = dl.middle_third_cantor(6)
cc = dl.product(small, small)
print(f"cantor x cantor: {cc.size} points in R^{cc.dim}, "
      f"diameter {dl.diameter(cc):.4f} (just under sqrt 2)")

# A generic self-similar system: three maps with unequal ratios.
spec = dl.IfsSpec(maps=((0.25, (0.0, 0.0)), (0.25, (0.75, 0.0)), (0.5, (0.25, 0.5))),
                  depth=6)
sponge = dl.gen_ifs(spec)
print(f"3-map IFS depth 6: {sponge.size} points, resolution {sponge.resolution:.3e}")

# Clouds serialize to CSV plus a JSON metadata sidecar.
csv_path, meta_path = dl.write_cloud_csv(cantor, "/tmp/dimlab_demo_cantor")
back = dl.read_cloud_csv(csv_path)
print(f"round trip via {csv_path}: {back.size} points, "
      f"identical={np.array_equal(back.points, cantor.points)}")
