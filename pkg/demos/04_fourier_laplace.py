"""Period-indexed Fourier-Laplace transform on a half-line.

    python demos/04_fourier_laplace.py
"""

import math

import numpy as np

from qdelaunay.fourier_laplace import (fl_roundtrip, fl_transform, geometric_closed_form,
                                       geometric_sample, transform_norm_sq, weighted_norm_sq)

g = geometric_sample(1.0)  # w(t) = e^{-t}, period 1
xi = 0.7 - 0.4j
t = np.linspace(0, 0.9, 4)

print("transform against the closed geometric sum")
for a, b in zip(fl_transform(g, t, xi), geometric_closed_form(t, xi)):
    print(f"  {a:.15f}   |diff| = {abs(a - b):.1e}")

# Shifting t by one period multiplies by e^{i xi}.
hol = np.abs(fl_transform(g, t + 1, xi) - np.exp(1j * xi) * fl_transform(g, t, xi)).max()
print(f"\nholonomy defect: {hol:.1e}")

s = np.linspace(0, 4, 9)
back = fl_roundtrip(g, s, nu=-0.3)
print(f"roundtrip error on [0, 4]: {np.abs(back - np.exp(-s)).max():.1e}")

# Parseval holds exactly against the floor(t/T) weight; e^{2 nu t/T} is within e^{2|nu|} of it.
for nu in (0.0, -0.5, 0.5):
    lhs = transform_norm_sq(g, nu)
    fl = 2 * math.pi * weighted_norm_sq(g, nu, floor_weight=True)
    sm = 2 * math.pi * weighted_norm_sq(g, nu)
    print(f"nu = {nu:+.1f}: ||w_hat||^2 = {lhs:.12f}, floor weight {fl:.12f}, smooth weight {sm:.6f}")
