"""Delaunay profiles in dimension 6: shooting, invariants, period and energy.

    python demos/01_delaunay_profiles.py
"""

import numpy as np

from qdelaunay import eval_profile, hamiltonian, make_params, solve_delaunay
from qdelaunay.delaunay import verify_profile

p = make_params(6)
print(f"n = 6: v_cyl = {p.v_cyl:.10f}, H_cyl = {p.H_cyl:.10f}, T_cyl = {p.T_cyl:.10f}")

# One profile.  b_star is the second derivative at the neck that closes the orbit.
prof = solve_delaunay(p, 0.5)
print(f"\neps = 0.5: b* = {prof.b_star:.12f}, T = {prof.period:.12f}, H = {prof.energy:.12f}")
print("verification failures:", verify_profile(prof) or "none")

H = hamiltonian(p, prof.samples[:, 1:].T)
t = np.linspace(0, prof.period, 9)
print(f"first integral spread over the samples: {np.ptp(H):.2e}")
print("v on a coarse grid:", np.round(eval_profile(prof, t), 6))

# The neck at t = 0 and the bulge at T/2.
print(f"min v = {prof.samples[:, 1].min():.12f}, max v = {prof.samples[:, 1].max():.12f}")

# The family: period and energy both decrease towards the cylinder values.
print("\n   eps        T            H")
for e in np.linspace(0.1, p.eps_n, 8):
    q = solve_delaunay(p, float(e))
    print(f"{e:8.5f}  {q.period:10.6f}  {q.energy:12.8f}")
