"""
Resampling kernels and the resize engine
========================================

Walks the six kernels (nearest, box, bilinear, bicubic, lanczos2,
lanczos3), shows their closed-form weights, and demonstrates shrinking
and enlarging a tiny image, including the anti-alias kernel widening
used when shrinking.
"""

import numpy as np

from corescale import GrayImage, METHOD_NAMES, coarsen, kernel_weight, method, refine

# kernel weights at a few offsets: support and negative lobes at a glance
offsets = [0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 2.5]
print(f"{'offset':>8} " + " ".join(f"{n:>9}" for n in METHOD_NAMES))
for t in offsets:
    row = " ".join(f"{kernel_weight(method(n), t):9.4f}" for n in METHOD_NAMES)
    print(f"{t:8.2f} {row}")

# a 4x4 ramp image, shrunk by 2 with each method
img = GrayImage(np.arange(16, dtype=float).reshape(4, 4) / 15.0)
print("\ninput:")
print(np.array2string(img.pixels, precision=3))
for name in METHOD_NAMES:
    out = coarsen(img, 2, method(name))
    print(f"\ncoarsen x2 with {name}:")
    print(np.array2string(out.pixels, precision=3))

# enlarging inverts the pitch: a 2x2 image refined by 3
small = GrayImage(np.array([[0.0, 1.0], [1.0, 0.0]]))
up = refine(small, 3, method("bicubic"))
print("\nrefine x3 with bicubic (note the overshoot beyond [0,1]):")
print(np.array2string(up.pixels, precision=3))
print(f"value range: [{up.pixels.min():.3f}, {up.pixels.max():.3f}]")

# constant images always resample to themselves (weights sum to 1)
const = GrayImage(np.full((10, 10), 0.37))
for name in METHOD_NAMES:
    assert abs(coarsen(const, 3, method(name)).pixels - 0.37).max() < 1e-12
print("\npartition of unity holds for all six methods")
