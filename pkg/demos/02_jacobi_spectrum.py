"""Jacobi operators of a Delaunay profile: indicial roots, Jacobi fields and bands.

    python demos/02_jacobi_spectrum.py
"""

import numpy as np

from qdelaunay import cyl_indicial, make_params, solve_delaunay
from qdelaunay import bands, floquet

p = make_params(6)
prof = solve_delaunay(p, 0.5)
cyl = solve_delaunay(p, p.eps_n)

# Indicial roots per spherical-harmonic degree, against the cylinder closed forms.
print(" k   roots at eps=0.5                                 roots at the cylinder")
for k in range(5):
    g = floquet.monodromy(prof, k).indicial_roots
    print(f"{k:2d}  {np.array2string(g, precision=6):48s} {np.array2string(cyl_indicial(6, k), precision=6)}")

# Translations and the neck derivative give explicit Jacobi fields.
w0 = floquet.jacobi_w0(prof)
wp, wm = floquet.jacobi_wk1(prof)
print(f"\nw0 = v': residual {w0.rel_residual:.1e}, multiplier {w0.multiplier_found:.12f}")
print(f"   the two multipliers nearest 1 are {w0.extra['jordan_pair_dist']:.1e} apart (Jordan pair)")
for r in (wp, wm):
    print(f"{r.name}: residual {r.rel_residual:.1e}, multiplier {r.multiplier_found.real:.10g}"
          f" (expected {r.multiplier_expected:.10g})")

gs = floquet.gamma_set(prof, 3)
print(f"smallest positive indicial root: {gs.gap:.12f}")

# Band functions of the degree-0 operator on a phase grid.
tab = bands.band_edges(prof, 0, m_max=4, n_phi=5)
print("\n  phi     " + "  ".join(f"sigma_{j:<6d}" for j in range(5)))
for ph, row in zip(tab.phi, tab.sigma):
    print(f"{ph:6.3f}  " + "  ".join(f"{x:12.6f}" for x in row))

# The bottom of the degree-0 spectrum sits well below the integral bound
# -(n(n^2-4)/2) (mean v^(2n/(n-4)))^(4/n); equality only holds at the cylinder.
print(f"\nsigma_0(0) = {tab.edge(0, '0'):.6f}, integral bound = {bands.bottom_bound(prof):.6f}")
print(f"cylinder:   sigma_0(0) = {bands.band_eigs(cyl, 0, 0.0, m_max=0)[0]:.9f},"
      f" bound = {bands.bottom_bound(cyl):.9f}")

# Band edges are Floquet multipliers e^{i phi} of the ODE, computed independently.
d = max(bands.multiplier_distance(prof, 0, tab.edge(j, "0"), 0.0) for j in range(5))
print(f"largest multiplier distance over the phase-0 edges: {d:.1e}")
