"""Dimension constants, the radial fourth-order ODE, its first integral and
an event-aware adaptive integrator.

The ODE on the cylinder is

    v'''' = C2 v'' - C0 v + K_nl v^p,      p = (n + 4) / (n - 4),

written as a first-order system on the 4-jet ``(v, v', v'', v''')``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

V_CAPMAX = 1.5


class IntegrationError(RuntimeError):
    """Raised when the adaptive integrator cannot continue."""


def _mu_squared(n: int, lam: float) -> tuple[float, float]:
    # Roots mu^2 of mu^4 - (C2 + 2 lam) mu^2 + c0(lam) = 0 at the cylinder.
    b = (n * (n - 4) + 8 + 4 * lam) / 2.0
    disc = math.sqrt(n**4 / 4.0 - 16.0 * (n - 1 - lam))
    return 0.5 * (b + disc), 0.5 * (b - disc)


@dataclass(frozen=True)
class DimensionParams:
    n: int
    p: float
    K_nl: float
    C2: float
    C0: float
    K_lin: float
    v_cyl: float
    eps_n: float
    H_cyl: float
    T_cyl: float
    omega_n: float
    sphere_area: float
    sphere_area_nm2: float

    @property
    def energy_exp(self) -> float:
        """Exponent 2n/(n-4) of the potential term in the first integral."""
        return 2.0 * self.n / (self.n - 4)

    @property
    def lin_exp(self) -> float:
        """Exponent 8/(n-4) of v in the linearized potential."""
        return 8.0 / (self.n - 4)

    def eigenvalue(self, k: int) -> float:
        """Eigenvalue k(n-2+k) of -Laplacian on the unit (n-1)-sphere."""
        return float(k * (self.n - 2 + k))


def make_params(n: int) -> DimensionParams:
    if not isinstance(n, (int, np.integer)) or n <= 4:
        raise ValueError(f"dimension must be an integer n >= 5, got {n!r}")
    n = int(n)
    ratio = n * (n - 4) / (n * n - 4)
    v_cyl = ratio ** ((n - 4) / 8.0)
    H_cyl = -n * (n - 4) ** 2 / 8.0 * v_cyl**2
    _, mt0 = _mu_squared(n, 0.0)
    omega_n = math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)
    return DimensionParams(
        n=n,
        p=(n + 4) / (n - 4),
        K_nl=n * (n - 4) * (n * n - 4) / 16.0,
        C2=(n * (n - 4) + 8) / 2.0,
        C0=n * n * (n - 4) ** 2 / 16.0,
        K_lin=n * (n + 4) * (n * n - 4) / 16.0,
        v_cyl=v_cyl,
        eps_n=v_cyl,
        H_cyl=H_cyl,
        T_cyl=2.0 * math.pi / math.sqrt(-mt0),
        omega_n=omega_n,
        sphere_area=n * omega_n,
        sphere_area_nm2=2.0 * math.pi ** ((n - 1) / 2.0) / math.gamma((n - 1) / 2.0),
    )


@dataclass(frozen=True)
class CylState:
    t: float
    v: float
    v1: float
    v2: float
    v3: float

    def __post_init__(self):
        if not all(math.isfinite(x) for x in (self.t, self.v, self.v1, self.v2, self.v3)):
            raise ValueError(f"non-finite state {self}")

    @property
    def jet(self) -> np.ndarray:
        return np.array([self.v, self.v1, self.v2, self.v3])

    @classmethod
    def from_jet(cls, t: float, jet: Sequence[float]) -> "CylState":
        return cls(float(t), *(float(x) for x in jet))


def _pow(v, p):
    # Odd extension of v^p; only reached at v <= 0 inside trial RK stages.
    return np.sign(v) * np.exp(p * np.log(np.maximum(np.abs(v), 1e-300)))


def _rhs_raw(params: DimensionParams, y: np.ndarray) -> np.ndarray:
    v, v1, v2, v3 = y
    return np.array([v1, v2, v3, params.C2 * v2 - params.C0 * v + params.K_nl * _pow(v, params.p)])


def rhs(params: DimensionParams, state: CylState) -> np.ndarray:
    if state.v <= 0:
        raise ValueError(f"rhs requires v > 0, got v = {state.v}")
    return _rhs_raw(params, state.jet)


def hamiltonian(params: DimensionParams, state) -> float | np.ndarray:
    """First integral of the ODE evaluated on a state or on an array of jets.

    ``state`` is either a :class:`CylState` or an array whose leading axis
    holds ``(v, v1, v2, v3)``.
    """
    y = state.jet if isinstance(state, CylState) else np.asarray(state, dtype=float)
    v, v1, v2, v3 = y
    if np.any(np.asarray(v) <= 0):
        raise ValueError("hamiltonian requires v > 0")
    n = params.n
    return (
        -v1 * v3
        + 0.5 * v2**2
        + (n * (n - 4) + 8) / 4.0 * v1**2
        - n * n * (n - 4) ** 2 / 32.0 * v**2
        + (n - 4) ** 2 * (n * n - 4) / 32.0 * np.exp(params.energy_exp * np.log(v))
    )


def check_pos_laplacian(params: DimensionParams, v, v1, v2, lap_theta_v):
    """Cylindrical form of the condition -Laplacian(u) > 0."""
    n = params.n
    return -v2 + 2.0 * v1 + n * (n - 4) / 4.0 * v - lap_theta_v > 0


@dataclass(frozen=True)
class Event:
    """Root of ``fn(t, y)`` that stops (or is recorded by) :func:`integrate`.

    ``direction`` follows :func:`scipy.integrate.solve_ivp`: +1 fires on an
    upward crossing, -1 on a downward one, 0 on either.
    """

    name: str
    fn: Callable[[float, np.ndarray], float]
    direction: float = 0.0
    terminal: bool = True

    @classmethod
    def crossing(cls, name: str, component: int, value: float = 0.0,
                 direction: float = 0.0, terminal: bool = True) -> "Event":
        return cls(name, lambda t, y: y[component] - value, direction, terminal)


@dataclass
class Trajectory:
    params: DimensionParams
    t: np.ndarray
    y: np.ndarray
    events: list[tuple[float, str]]
    status: str
    sol: object = field(repr=False)

    @property
    def samples(self) -> list[CylState]:
        return [CylState.from_jet(ti, yi) for ti, yi in zip(self.t, self.y.T)]

    @property
    def t_final(self) -> float:
        return float(self.t[-1])

    def jet(self, t) -> np.ndarray:
        """4-jet from the dense output at time(s) ``t``."""
        return self.sol(t)

    def state(self, t: float) -> CylState:
        return CylState.from_jet(t, self.sol(t))


def integrate(params: DimensionParams, state0: CylState, t_end: float, tol: float,
              events: Sequence[Event] = (), v_capmax: float = V_CAPMAX) -> Trajectory:
    """Integrate the ODE from ``state0`` to ``t_end`` (which may lie before ``state0.t``).

    Uses the Dormand-Prince 8(5,3) pair with dense output; ``rtol = atol = tol``.
    Integration stops at ``t_end``, at the first terminal event in ``events``,
    or when ``v`` leaves ``(0, v_capmax)``; the latter two are recorded in
    ``Trajectory.events`` and ``Trajectory.status``.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if state0.v <= 0:
        raise ValueError("initial state must have v > 0")
    bounds = [
        Event("v_nonpositive", lambda t, y: y[0], -1.0),
        Event("v_capmax", lambda t, y: y[0] - v_capmax, 1.0),
    ]
    all_events = list(events) + bounds
    fns = []
    for ev in all_events:
        def g(t, y, _f=ev.fn):
            return _f(t, y)
        g.terminal = ev.terminal
        g.direction = ev.direction
        fns.append(g)

    res = solve_ivp(lambda t, y: _rhs_raw(params, y), (state0.t, t_end), state0.jet,
                    method="DOP853", rtol=tol, atol=tol, dense_output=True,
                    events=fns)
    if res.status < 0:
        raise IntegrationError(res.message)

    hits = []
    for ev, times in zip(all_events, res.t_events):
        hits.extend((float(tt), ev.name) for tt in times)
    hits.sort(key=lambda h: h[0] * np.sign(t_end - state0.t))
    status = "completed"
    if res.status == 1:
        t_stop = res.t[-1]
        terminal = {e.name for e in all_events if e.terminal}
        cands = [(abs(tt - t_stop), name) for tt, name in hits if name in terminal]
        status = min(cands)[1]
    return Trajectory(params, res.t, res.y, hits, status, res.sol)
