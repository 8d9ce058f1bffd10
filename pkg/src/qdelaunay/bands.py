"""Quasi-periodic spectral bands of the Fourier-mode Jacobi operators.

For a Floquet phase ``phi`` the operator ``L_k`` acts on functions with
``w(t + T) = e^{i phi} w(t)``.  In the basis ``exp(i (2 pi m + phi) t / T)``
its symbol is ``omega^4 + (C2 + 2 lam) omega^2 + c0_const`` on the diagonal
plus the Toeplitz matrix of the Fourier coefficients of the periodic part
``-K_lin v^(8/(n-4))``.  The matrix is Hermitian, so a dense Hermitian
eigensolver gives the band functions ``sigma_j(phi)``.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .delaunay import DelaunayProfile, eval_profile
from .floquet import FourierMode, _mode, linear_potential, product_eigenvalues, segment_propagators

DEFAULT_M = 64
DEFAULT_MMAX = 8
ORDER_SLACK = 1e-8


class TruncationWarning(UserWarning):
    """The Galerkin cutoff is too low for the requested eigenvalues."""


def potential_coefficients(profile: DelaunayProfile) -> np.ndarray:
    """Fourier coefficients ``q_m``, ``m = 0..S-1`` (FFT order), of ``-K_lin v^(8/(n-4))``.

    Computed on the stored sample grid; exact for trigonometric polynomials
    below the Nyquist index.
    """
    p = profile.params
    v = profile.samples[:, 1]
    q = -p.K_lin * np.exp(p.lin_exp * np.log(v))
    return np.fft.fft(q) / len(q)


def galerkin_matrix(profile: DelaunayProfile, mode, phi: float, M: int = DEFAULT_M) -> np.ndarray:
    mode = _mode(profile, mode)
    if M < 16:
        raise ValueError("Galerkin truncation M must be >= 16")
    if 2 * M >= profile.n_samples // 2:
        raise ValueError("truncation exceeds the Nyquist limit of the profile samples")
    pot = linear_potential(profile, mode)
    T = profile.period
    m = np.arange(-M, M + 1)
    omega = (2 * math.pi * m + phi) / T
    diag = omega**4 - pot.c2 * omega**2 + pot.c0_const
    qhat = potential_coefficients(profile)
    idx = (m[:, None] - m[None, :]) % profile.n_samples
    H = qhat[idx].astype(complex)
    H[np.diag_indices_from(H)] += diag
    return 0.5 * (H + H.conj().T)


def band_eigs(profile: DelaunayProfile, mode, phi: float, M: int = DEFAULT_M,
              m_max: int | None = None, eigvecs: bool = False):
    """Ascending quasi-periodic eigenvalues of ``L_k`` at phase ``phi`` in ``[0, pi]``.

    Warns with :class:`TruncationWarning` when the symbol at the cutoff is
    below 10 times the largest requested eigenvalue.
    """
    if not -1e-12 <= phi <= math.pi + 1e-12:
        raise ValueError("phi must lie in [0, pi]")
    H = galerkin_matrix(profile, mode, phi, M)
    w, V = scipy.linalg.eigh(H)
    # The dense solver is accurate to eps * ||H|| ~ eps * omega_M^4 in absolute
    # terms.  Rayleigh-Ritz on the computed eigenvectors recovers the low
    # eigenvalues to relative accuracy, since the large diagonal entries only
    # multiply tiny eigenvector components.
    K = min(len(w), (16 if m_max is None else m_max) + 3)
    S = V[:, :K].conj().T @ (H @ V[:, :K])
    wr, U = scipy.linalg.eigh(0.5 * (S + S.conj().T))
    w = np.concatenate([wr, w[K:]])
    V = np.concatenate([V[:, :K] @ U, V[:, K:]], axis=1)
    top = w[m_max] if m_max is not None else w[-1]
    edge = min(H[0, 0].real, H[-1, -1].real)
    if m_max is not None and edge < 10 * abs(top):
        warnings.warn(f"cutoff symbol {edge:.3g} below 10x sigma_{m_max} = {top:.3g}",
                      TruncationWarning, stacklevel=2)
    if m_max is not None:
        w = w[: m_max + 1]
        V = V[:, : m_max + 1] if V is not None else None
    return (w, V) if eigvecs else w


def reconstruct(profile: DelaunayProfile, coeffs: np.ndarray, phi: float, t) -> np.ndarray:
    """Evaluate the Galerkin function with coefficients ``coeffs`` at ``t``."""
    M = (len(coeffs) - 1) // 2
    m = np.arange(-M, M + 1)
    omega = (2 * math.pi * m + phi) / profile.period
    return np.exp(1j * np.outer(np.atleast_1d(t), omega)) @ coeffs


@dataclass
class BandTable:
    n: int
    epsilon: float
    k: int
    lam: float
    phi: np.ndarray
    sigma: np.ndarray  # (len(phi), m_max + 1)
    M: int
    period: float
    degenerate: list = field(default_factory=list)

    @property
    def m_max(self) -> int:
        return self.sigma.shape[1] - 1

    def edge(self, j: int, at: str) -> float:
        return float(self.sigma[0 if at == "0" else -1, j])

    @property
    def bands(self) -> list[tuple[float, float]]:
        """Band intervals ``B_j = [min_phi sigma_j, max_phi sigma_j]``."""
        return [(float(self.sigma[:, j].min()), float(self.sigma[:, j].max()))
                for j in range(self.sigma.shape[1])]

    def ordering_chain(self) -> list[float]:
        """Edges in the expected order ``s0(0), s0(pi), s1(pi), s1(0), s2(0), s2(pi), ...``."""
        chain = []
        for j in range(self.sigma.shape[1]):
            a, b = self.sigma[0, j], self.sigma[-1, j]
            chain += [a, b] if j % 2 == 0 else [b, a]
        return [float(x) for x in chain]

    def to_dict(self) -> dict:
        return {"n": self.n, "epsilon": self.epsilon, "k": self.k, "lambda": self.lam,
                "M": self.M, "period": self.period, "phi": self.phi.tolist(),
                "sigma": self.sigma.tolist(), "bands": self.bands, "degenerate": self.degenerate}

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def csv_rows(self) -> list[list]:
        return [[self.n, self.epsilon, self.k, float(ph), *map(float, row)]
                for ph, row in zip(self.phi, self.sigma)]


def band_edges(profile: DelaunayProfile, mode, m_max: int = DEFAULT_MMAX, M: int = DEFAULT_M,
               n_phi: int = 9) -> BandTable:
    """Band functions ``sigma_0..sigma_{m_max}`` on an ``n_phi``-point grid of ``[0, pi]``."""
    mode = _mode(profile, mode)
    if n_phi < 2:
        raise ValueError("need at least the two edge phases")
    phis = np.linspace(0.0, math.pi, n_phi)
    sig = np.array([band_eigs(profile, mode, ph, M, m_max) for ph in phis])
    degenerate = []
    for i, ph in enumerate(phis):
        for j in range(m_max):
            gap = sig[i, j + 1] - sig[i, j]
            if gap < 1e-6 * max(1.0, abs(sig[i, j])):
                degenerate.append((float(ph), j, j + 1))
    return BandTable(profile.params.n, profile.epsilon, mode.k, mode.lam, phis, sig, M,
                     profile.period, degenerate)


def multiplier_distance(profile: DelaunayProfile, mode, sigma: float, phi: float,
                        ode_tol: float = 1e-12) -> float:
    """Distance from ``e^{i phi}`` to the nearest Floquet multiplier of ``L_k - sigma``."""
    pot = linear_potential(profile, mode)
    eig = product_eigenvalues(segment_propagators(pot, ode_tol, sigma))
    return float(np.min(np.abs(eig - np.exp(1j * phi))))


def discriminant_check(profile: DelaunayProfile, mode, sigma: float, phi: float,
                       tol: float = 1e-4, ode_tol: float = 1e-12) -> bool:
    """True if ``(L_k - sigma) w = 0`` has a Floquet multiplier within ``tol`` of ``e^{i phi}``."""
    return multiplier_distance(profile, mode, sigma, phi, ode_tol) < tol


def bottom_bound(profile: DelaunayProfile) -> float:
    """Lower bound ``-(n(n^2-4)/2) ((1/T) int v^(2n/(n-4)))^(4/n)`` for ``sigma_0`` at degree 0."""
    p = profile.params
    n = p.n
    mean = float(np.mean(np.exp(p.energy_exp * np.log(profile.samples[:, 1]))))
    return -(n * (n * n - 4) / 2.0) * mean ** (4.0 / n)


@dataclass
class BandReport:
    failures: list[str] = field(default_factory=list)
    values: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures


def check_ordering(table: BandTable, slack: float = ORDER_SLACK) -> list[str]:
    out = []
    chain = table.ordering_chain()
    for i in range(len(chain) - 1):
        if chain[i] > chain[i + 1] + slack * max(1.0, abs(chain[i])):
            out.append(f"k={table.k}: edge ordering violated at position {i}: "
                       f"{chain[i]:.10g} > {chain[i + 1]:.10g}")
    for j in range(table.sigma.shape[1]):
        lo, hi = table.bands[j]
        if hi - lo < 1e-10:
            out.append(f"k={table.k}: band {j} degenerate (length {hi - lo:.2e})")
        d = np.diff(table.sigma[:, j]) * (1 if j % 2 == 0 else -1)
        if np.any(d < -slack * max(1.0, abs(hi))):
            out.append(f"k={table.k}: band function {j} not monotone in phi")
    return out


def verify_band_props(table: BandTable, reference: BandTable, profile: DelaunayProfile | None = None,
                      slack: float = ORDER_SLACK) -> BandReport:
    """Ordering of ``table`` plus, against the degree-0 ``reference``,
    ``sigma_j(phi=0) > sigma_0^{(0)}(0) + n(n-4)/2 lam + lam^2`` for degree >= 1.

    With ``profile`` given, degree 0 is also checked against the
    bottom-of-spectrum bounds and degree >= 1 for positivity.
    """
    rep = BandReport()
    rep.failures += check_ordering(table, slack)
    if reference.k != 0:
        rep.failures.append("reference table must be degree 0")
        return rep
    n = table.n
    s00 = reference.edge(0, "0")
    if table.k >= 1:
        bound = s00 + n * (n - 4) / 2.0 * table.lam + table.lam**2
        margin = float(np.min(table.sigma[0]) - bound)
        rep.values["higher_band_margin"] = margin
        # equality holds at the cylinder, where every sigma is an explicit symbol value
        if margin < -slack * max(1.0, abs(bound)):
            rep.failures.append(f"k={table.k}: lower bound from degree 0 violated (margin {margin:.3g})")
        lo = float(table.sigma.min())
        rep.values["min_sigma"] = lo
        if not lo > 0:
            rep.failures.append(f"k={table.k}: band not contained in (0, inf), min {lo:.3g}")
    elif profile is not None:
        lb = bottom_bound(profile)
        rep.values["sigma00"] = s00
        rep.values["bottom_bound"] = lb
        if not (lb - 1e-6 <= s00 < 0):
            rep.failures.append(f"sigma_0(0) = {s00:.10g} outside [{lb:.10g} - 1e-6, 0)")
        z = min(abs(table.edge(1, "0")), abs(table.edge(2, "0")))
        rep.values["zero_eig_dist"] = z
        rep.values["zero_case"] = 1 if abs(table.edge(1, "0")) <= abs(table.edge(2, "0")) else 2
        if z >= 1e-4:
            rep.failures.append(f"no eigenvalue 0 among sigma_1(0), sigma_2(0): distance {z:.3g}")
    return rep


def zero_mode_error(profile: DelaunayProfile, M: int = DEFAULT_M) -> float:
    """Relative L2 error between ``v'`` and the degree-0, phase-0 eigenvector nearest 0,
    after the optimal complex rescaling."""
    w, V = band_eigs(profile, 0, 0.0, M, eigvecs=True)
    j = int(np.argmin(np.abs(w)))
    t = profile.t
    f = reconstruct(profile, V[:, j], 0.0, t)
    g = eval_profile(profile, t, 1)
    c = np.vdot(f, g) / np.vdot(f, f)
    return float(np.linalg.norm(c * f - g) / np.linalg.norm(g))
