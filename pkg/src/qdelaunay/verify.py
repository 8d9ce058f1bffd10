"""Invariant suite behind ``qdelaunay verify``.

Each check is either an internal consistency invariant (status PASS/FAIL)
or an expected property of the solutions.  A property the numerics
contradict is reported as REFUTED with the offending numbers, so a
correct computation is never presented as a failure of the code; pass
``strict=True`` to count refutations as failures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import bands, floquet
from .cache import ProfileCache
from .core import hamiltonian, make_params
from .cylinder import cyl_indicial, sph_state
from .delaunay import verify_profile
from .families import (AxisymField, TranslationSpec, expansion_error, h_rad_family,
                       pde_residual)
from .fourier_laplace import (fl_roundtrip, fl_transform, geometric_closed_form,
                              geometric_sample, transform_norm_sq, weighted_norm_sq)


@dataclass(frozen=True)
class Check:
    name: str
    status: str  # PASS | FAIL | REFUTED
    detail: str

    def line(self) -> str:
        return f"{self.status:<7} {self.name}: {self.detail}"


def _inv(name, ok, detail):
    return Check(name, "PASS" if ok else "FAIL", detail)


def _claim(name, ok, detail):
    return Check(name, "PASS" if ok else "REFUTED", detail)


def run_checks(n: int = 6, quick: bool = True, cache: ProfileCache | None = None) -> list[Check]:
    cache = cache or ProfileCache(enabled=False)
    p = make_params(n)
    out: list[Check] = []

    # closed forms
    err = max(abs(hamiltonian(p, sph_state(n, t))) for t in (-2, -1, 0, 1, 2))
    out.append(_inv("spherical_energy", err < 1e-12, f"max |H| = {err:.3e}"))
    out.append(_inv("cylinder_constants", 0 < p.v_cyl < 1 and p.H_cyl < 0,
                    f"v_cyl = {p.v_cyl:.10f}, H_cyl = {p.H_cyl:.10f}, T_cyl = {p.T_cyl:.10f}"))

    # profiles
    frac = (0.64,) if quick else (0.38, 0.64, 0.9)
    eps_list = [round(f * p.eps_n, 2) for f in frac]
    profiles = [cache.get(p, e) for e in eps_list]
    for pr in profiles:
        bad = verify_profile(pr)
        out.append(_inv(f"profile_invariants eps={pr.epsilon:.6g}", not bad,
                        "ok" if not bad else "; ".join(bad)))

    grid = np.linspace(0.2 * p.eps_n, p.eps_n, 6 if quick else 20)
    TH = [(pr.period, pr.energy) for pr in (cache.get(p, float(e)) for e in grid)]
    T_ = np.array([a for a, _ in TH])
    H_ = np.array([b for _, b in TH])
    out.append(_claim("period_energy_monotone", bool(np.all(np.diff(T_) < 0) and np.all(np.diff(H_) < 0)),
                      f"{len(grid)}-point grid, T from {T_[0]:.6f} to {T_[-1]:.6f}"))
    near = cache.get(p, 0.99 * p.eps_n)
    rel = abs(near.period / p.T_cyl - 1)
    out.append(_claim("period_near_cylinder", rel < 0.01, f"|T(0.99 eps_n)/T_cyl - 1| = {rel:.3e}"))

    # Floquet
    cyl = cache.get(p, p.eps_n)
    worst = 0.0
    for k in range(0, 4 if quick else 7):
        m = floquet.monodromy(cyl, k)
        ref = cyl_indicial(n, k)
        worst = max(worst, float(np.max(np.abs(m.indicial_roots - ref) / np.maximum(np.abs(ref), 1.0))))
    out.append(_inv("cylinder_indicial_roots", worst < 1e-6, f"max rel err = {worst:.3e}"))
    det_err = 0.0
    for pr in profiles:
        for k in range(0, 3 if quick else 5):
            det_err = max(det_err, abs(floquet.monodromy(pr, k).det - 1))
    out.append(_inv("monodromy_det", det_err < 1e-8, f"max |det A - 1| = {det_err:.3e}"))
    for pr in profiles:
        w0 = floquet.jacobi_w0(pr)
        wp, wm = floquet.jacobi_wk1(pr)
        res = max(w0.rel_residual, wp.rel_residual, wm.rel_residual)
        mult = max(wp.multiplier_rel_err, wm.multiplier_rel_err)
        jordan = w0.extra["jordan_pair_dist"]
        out.append(_inv(f"jacobi_fields eps={pr.epsilon:.6g}",
                        res < 1e-6 and mult < 1e-6 and jordan < 1e-4 and wp.positive and wm.positive,
                        f"residual {res:.2e}, multiplier err {mult:.2e}, Jordan pair {jordan:.2e}"))
        gs = floquet.gamma_set(pr, 2)
        out.append(_claim(f"indicial_gap eps={pr.epsilon:.6g}", abs(gs.gap - 1) < 1e-6,
                          f"gap = {gs.gap:.9f}"))

    # bands
    for pr in profiles:
        ref = bands.band_edges(pr, 0)
        rep0 = bands.verify_band_props(ref, ref, pr)
        v = rep0.values
        out.append(_claim(f"bottom_band_upper eps={pr.epsilon:.6g}", v["sigma00"] < 0,
                          f"sigma_0 = {v['sigma00']:.8f}"))
        out.append(_claim(f"bottom_band_lower eps={pr.epsilon:.6g}", v["sigma00"] >= v["bottom_bound"] - 1e-6,
                          f"sigma_0 = {v['sigma00']:.8f}, bound = {v['bottom_bound']:.8f}"))
        out.append(_claim(f"zero_eigenvalue eps={pr.epsilon:.6g}", v["zero_eig_dist"] < 1e-4,
                          f"min |sigma_1,2(0)| = {v['zero_eig_dist']:.2e} (case sigma_{v['zero_case']})"))
        order = bands.check_ordering(ref)
        out.append(_claim(f"band_ordering k=0 eps={pr.epsilon:.6g}", not order,
                          "ok" if not order else order[0]))
        for k in (1, 2, 3):
            rep = bands.verify_band_props(bands.band_edges(pr, k), ref, pr)
            out.append(_claim(f"higher_bands k={k} eps={pr.epsilon:.6g}", rep.ok,
                              f"min sigma {rep.values['min_sigma']:.6f}, margin {rep.values['higher_band_margin']:.6f}"
                              if rep.ok else "; ".join(rep.failures)))
        worst = 0.0
        for j in range(ref.m_max + 1):
            for col, phi in ((0, 0.0), (-1, math.pi)):
                worst = max(worst, bands.multiplier_distance(pr, 0, ref.sigma[col, j], phi))
        out.append(_inv(f"band_edges_vs_discriminant eps={pr.epsilon:.6g}", worst < 1e-4,
                        f"max multiplier distance = {worst:.2e}"))

    # families
    pr = profiles[0]
    e1 = expansion_error(TranslationSpec(pr, 0.1))
    e2 = expansion_error(TranslationSpec(pr, 0.05))
    ratio = e1.E / e2.E
    out.append(_claim("expansion_rate", e1.beta >= 1.9, f"beta = {e1.beta:.4f}"))
    out.append(_inv("expansion_quadratic_in_a", bool(np.all((ratio > 3.5) & (ratio < 4.5))),
                    f"E(|a|)/E(|a|/2) in [{ratio.min():.4f}, {ratio.max():.4f}]"))
    fam = TranslationSpec(pr, 0.1)
    hs = np.array([h_rad_family(fam, t) for t in (3.0, 5.0, 7.0)])
    target = p.sphere_area * pr.energy
    spread = float(np.ptp(hs) / abs(hs.mean()))
    out.append(_claim("pohozaev_constant", spread < 1e-4 and abs(hs.mean() / target - 1) < 1e-3,
                      f"spread {spread:.2e}, H_rad/(n w_n H) - 1 = {hs.mean() / target - 1:.2e}"))
    res = []
    for h in (0.1, 0.05):
        t = np.arange(2.0, 6.0 + 1e-9, 0.4)
        s = np.linspace(-1, 1, 11)
        res.append(pde_residual(AxisymField.from_family(fam, t, s, h, h), p))
    fac = res[0] / res[1]
    out.append(_inv("pde_residual_order4", 8 <= fac <= 32, f"residual ratio on halving h = {fac:.3f}"))

    # Fourier-Laplace
    g = geometric_sample(1.0)
    t = np.linspace(0, 0.95, 5)
    xi = 0.7 + 0.3j
    hol = float(np.max(np.abs(fl_transform(g, t + 1, xi) - np.exp(1j * xi) * fl_transform(g, t, xi))))
    cf = float(np.max(np.abs(fl_transform(g, t, xi) - geometric_closed_form(t, xi))))
    rt = float(np.max(np.abs(fl_roundtrip(g, np.linspace(0, 4, 9), 0.0) - np.exp(-np.linspace(0, 4, 9)))))
    pars = abs(transform_norm_sq(g, 0.0) - 2 * math.pi * weighted_norm_sq(g, 0.0))
    out.append(_inv("fourier_laplace", hol < 1e-12 and cf < 1e-10 and rt < 1e-8 and pars < 1e-8,
                    f"holonomy {hol:.1e}, closed form {cf:.1e}, roundtrip {rt:.1e}, Parseval {pars:.1e}"))
    return out


def exit_status(checks: list[Check], strict: bool = False) -> int:
    bad = {"FAIL", "REFUTED"} if strict else {"FAIL"}
    return 3 if any(c.status in bad for c in checks) else 0
