"""Periodic 1D grids and the Dual, Virtual, Central and Upwind Hermite steppers.

Every step is interpolate -> evolve -> restrict, evaluated synchronously for
all nodes from the frozen previous state.  Node data live in arrays of shape
``(K, F, N+1)``: node, field, scaled derivative.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import interpolation as interp
from .jets import LinearOperator1D, taylor_evolve

SCHEMES = ("dual", "virtual", "central", "upwind")

# roundoff slack on the CFL check so that C = 1 is accepted
CFL_SLACK = 1e-12


class CFLError(ValueError):
    """A step was requested with a time step beyond the scheme's restriction."""


class UnsupportedError(NotImplementedError):
    pass


@dataclass(frozen=True)
class Grid1D:
    a: float
    b: float
    K: int

    def __post_init__(self):
        if self.K < 3:
            raise ValueError(f"need at least 3 nodes, got K={self.K}")
        if not self.b > self.a:
            raise ValueError("need b > a")

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.K

    @property
    def nodes(self) -> np.ndarray:
        return self.a + np.arange(self.K) * self.h

    @property
    def dual_nodes(self) -> np.ndarray:
        return self.a + (np.arange(self.K) + 0.5) * self.h


@dataclass(frozen=True)
class GridState1D:
    grid: Grid1D
    jets: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        U = np.array(self.jets, dtype=float)
        if U.ndim == 2:
            U = U[:, None, :]
        if U.ndim != 3 or U.shape[0] != self.grid.K:
            raise ValueError(f"jets must have shape (K, F, N+1) with K={self.grid.K}, got {U.shape}")
        U.setflags(write=False)
        object.__setattr__(self, "jets", U)

    @property
    def N(self) -> int:
        return self.jets.shape[-1] - 1

    @property
    def nfields(self) -> int:
        return self.jets.shape[1]

    def with_jets(self, jets, t: float) -> GridState1D:
        return GridState1D(self.grid, jets, t)


@dataclass(frozen=True)
class Pde1D:
    """Constant-coefficient system ``u_t = A u_x``.

    Scalar advection ``u_t + c u_x = 0`` is the 1x1 case ``A = [[-c]]``.
    """

    A: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        if A.shape[0] != A.shape[1]:
            raise ValueError("system matrix must be square")
        A.setflags(write=False)
        object.__setattr__(self, "A", A)

    @classmethod
    def advection(cls, c: float) -> Pde1D:
        return cls(np.array([[-float(c)]]))

    @classmethod
    def system(cls, A) -> Pde1D:
        return cls(A)

    @property
    def is_scalar(self) -> bool:
        return self.A.shape == (1, 1)

    @property
    def speed(self) -> float:
        """Advection velocity of the scalar equation."""
        if not self.is_scalar:
            raise UnsupportedError("speed is defined for scalar advection only")
        return -float(self.A[0, 0])

    @property
    def spectral_radius(self) -> float:
        return float(np.max(np.abs(np.linalg.eigvals(self.A))))

    def operator(self, h: float) -> LinearOperator1D:
        return LinearOperator1D(self.A, h)


@dataclass(frozen=True)
class SchemeConfig:
    kind: str
    N: int
    C: float = 0.9
    H2: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        kind = self.kind.lower()
        if kind not in SCHEMES:
            raise ValueError(f"unknown scheme {self.kind!r}; expected one of {SCHEMES}")
        object.__setattr__(self, "kind", kind)
        if self.N < 0:
            raise ValueError(f"N must be non-negative, got {self.N}")
        if not 0 < self.C <= 1:
            raise ValueError(f"CFL constant must lie in (0, 1], got {self.C}")
        if self.H2 is not None and kind != "virtual":
            raise ValueError("an extended reconstruction (H2) applies to the Virtual scheme only")


def cfl_fraction(kind: str) -> float:
    """Interpolation half-width in units of h_x: 1/2 for Dual/Virtual, 1 otherwise."""
    return 0.5 if kind in ("dual", "virtual") else 1.0


def max_timestep(cfg: SchemeConfig, pde: Pde1D, h: float) -> float:
    """Time step ``C h / rho`` (Central, Upwind) or ``C h / (2 rho)`` (Dual per stage, Virtual)."""
    rho = pde.spectral_radius
    if rho == 0:
        raise ValueError("zero wave speed: no finite CFL time step")
    return cfg.C * cfl_fraction(cfg.kind) * h / rho


def _check_cfl(pde: Pde1D, dt: float, limit: float):
    if dt < 0:
        raise CFLError(f"negative time step {dt}")
    if pde.spectral_radius * dt > limit * (1 + CFL_SLACK):
        raise CFLError(f"rho*dt = {pde.spectral_radius * dt:.6g} exceeds the limit {limit:.6g}")


# ---------------------------------------------------------------------------
# array kernels: U has shape (K, F, N+1)


def _evolve_restrict(W, op, dt, N, order=None):
    return taylor_evolve(W, op, dt, order)[..., : N + 1]


def dual_stage(U, op, dt, N):
    """Primal -> dual: ``Q[m]`` lives at x_{m+1/2}, built from U[m], U[m+1]."""
    W = interp.hermite_matrix(*interp.DUAL_OFFSETS, N)(U, np.roll(U, -1, axis=0))
    return _evolve_restrict(W, op, dt, N)


def primal_stage(Q, op, dt, N):
    """Dual -> primal: ``U[m]`` from Q at x_{m-1/2}, x_{m+1/2}."""
    W = interp.hermite_matrix(*interp.DUAL_OFFSETS, N)(np.roll(Q, 1, axis=0), Q)
    return _evolve_restrict(W, op, dt, N)


def central_kernel(U, op, dt, N):
    W = interp.central_reconstruct(np.roll(U, 1, axis=0), np.roll(U, -1, axis=0))
    return _evolve_restrict(W, op, dt, N)


def virtual_kernel(U, op, dt, N, H2=None):
    um1, up1 = np.roll(U, 1, axis=0), np.roll(U, -1, axis=0)
    if H2 is None:
        W = interp.virtual_reconstruct(um1, U, up1)
        return _evolve_restrict(W, op, dt, N)
    W = interp.extended_reconstruct(um1, U, up1, H2)
    return _evolve_restrict(W, op, dt, N, order=3 * N + 2)


def upwind_kernel(U, op, dt, N, right_moving=True):
    """Reconstruct from the left neighbour when information moves right, else mirror."""
    if right_moving:
        W = interp.upwind_reconstruct(np.roll(U, 1, axis=0), U)
    else:
        W = interp.upwind_reconstruct(np.roll(U, -1, axis=0), U, downwind=True)
    return _evolve_restrict(W, op, dt, N)


# ---------------------------------------------------------------------------
# state-level steps


def step_central(state: GridState1D, pde: Pde1D, dt: float) -> GridState1D:
    h = state.grid.h
    _check_cfl(pde, dt, h)
    U = central_kernel(state.jets, pde.operator(h), dt, state.N)
    return state.with_jets(U, state.t + dt)


def step_dual(state: GridState1D, pde: Pde1D, dt_stage: float,
              dt_dual: float | None = None) -> GridState1D:
    """Two staggered stages; the state advances by ``dt_dual + dt_stage``.

    ``dt_dual`` is the step on the staggered grid and defaults to ``dt_stage``;
    ``dt_dual = 0`` gives the Virtual scheme evaluated through the dual grid.
    """
    if dt_dual is None:
        dt_dual = dt_stage
    h = state.grid.h
    _check_cfl(pde, dt_stage, h / 2)
    _check_cfl(pde, dt_dual, h / 2)
    op = pde.operator(h)
    Q = dual_stage(state.jets, op, dt_dual, state.N)
    U = primal_stage(Q, op, dt_stage, state.N)
    return state.with_jets(U, state.t + dt_dual + dt_stage)


def step_virtual(state: GridState1D, pde: Pde1D, dt: float, H2=None) -> GridState1D:
    """One Virtual step; with ``H2`` the extended degree 3N+2 reconstruction is used."""
    h = state.grid.h
    _check_cfl(pde, dt, h / 2)
    U = virtual_kernel(state.jets, pde.operator(h), dt, state.N, H2)
    return state.with_jets(U, state.t + dt)


def step_upwind(state: GridState1D, pde: Pde1D, dt: float, downwind: bool = False,
                characteristic: bool = False) -> GridState1D:
    """One Upwind step.

    Scalar advection picks the neighbour from the sign of the speed; ``downwind``
    deliberately takes the wrong side.  Systems need ``characteristic=True``,
    which upwinds each characteristic variable of ``A = V diag(lam) V^-1``.
    """
    h = state.grid.h
    _check_cfl(pde, dt, h)
    op = pde.operator(h)
    N = state.N
    if pde.is_scalar:
        right = (pde.speed >= 0) != downwind
        U = upwind_kernel(state.jets, op, dt, N, right_moving=right)
        return state.with_jets(U, state.t + dt)
    if not characteristic:
        raise UnsupportedError("Upwind for systems requires characteristic=True")
    lam, V = np.linalg.eig(pde.A)
    if np.any(np.abs(lam.imag) > 1e-12):
        raise UnsupportedError("system is not hyperbolic (complex eigenvalues)")
    lam, V = lam.real, V.real
    Vinv = np.linalg.inv(V)
    Wc = np.einsum("fg,kgj->kfj", Vinv, state.jets)
    n = 2 * N + 2
    R = np.empty(Wc.shape[:-1] + (n,))
    for f, lf in enumerate(lam):
        # w_t = lf w_x moves with velocity -lf
        right = (-lf >= 0) != downwind
        w = Wc[:, f:f + 1, :]
        if right:
            R[:, f:f + 1] = interp.upwind_reconstruct(np.roll(w, 1, axis=0), w)
        else:
            R[:, f:f + 1] = interp.upwind_reconstruct(np.roll(w, -1, axis=0), w, downwind=True)
    W = np.einsum("fg,kgj->kfj", V, R)
    U = _evolve_restrict(W, op, dt, N)
    return state.with_jets(U, state.t + dt)


def step(cfg: SchemeConfig, state: GridState1D, pde: Pde1D, advance: float) -> GridState1D:
    """Advance by ``advance`` physical time with one step of the configured scheme.

    For Dual the advance is split across its two stages.
    """
    if cfg.kind == "central":
        return step_central(state, pde, advance)
    if cfg.kind == "upwind":
        return step_upwind(state, pde, advance)
    if cfg.kind == "virtual":
        return step_virtual(state, pde, advance, cfg.H2)
    return step_dual(state, pde, advance / 2)


def step_advance(cfg: SchemeConfig, pde: Pde1D, h: float) -> float:
    """Physical time covered by one full step at the configured CFL constant."""
    dt = max_timestep(cfg, pde, h)
    return 2 * dt if cfg.kind == "dual" else dt


@dataclass(frozen=True)
class StepRecord:
    index: int
    t: float
    dt: float


@dataclass
class RunResult:
    state: GridState1D
    records: list[StepRecord]


STEP_POLICIES = ("shorten-last", "uniform")


def step_times(t0: float, T: float, dt: float, policy: str = "shorten-last") -> list[float]:
    """End times of the steps from ``t0`` to ``T``.

    ``shorten-last`` takes steps of exactly ``dt`` and shortens only the final
    one; ``uniform`` takes the fewest equal steps no longer than ``dt``.
    """
    if policy not in STEP_POLICIES:
        raise ValueError(f"unknown step policy {policy!r}")
    span = T - t0
    if span < 0:
        raise ValueError("final time precedes the current time")
    if span == 0:
        return []
    n = max(1, math.ceil(span / dt * (1 - 1e-12)))
    if policy == "uniform":
        dt = span / n
    times = [t0 + k * dt for k in range(1, n)]
    times.append(T)
    return times


def run(state: GridState1D, pde: Pde1D, cfg: SchemeConfig, T_final: float,
        observer: Callable[[float, GridState1D], None] | None = None,
        stepper: Callable | None = None, policy: str = "shorten-last") -> RunResult:
    """March to ``T_final``; ``observer(t, state)`` is called after each step.

    ``policy`` selects how steps are fitted to the interval (see :func:`step_times`).
    """
    if stepper is None:
        stepper = step
    advance = step_advance(cfg, pde, state.grid.h)
    records = []
    t = state.t
    for i, t_next in enumerate(step_times(state.t, T_final, advance, policy)):
        dt = t_next - t
        state = stepper(cfg, state, pde, dt)
        state = replace(state, t=t_next)
        t = t_next
        records.append(StepRecord(i, t, dt))
        if observer is not None:
            observer(t, state)
    return RunResult(state, records)
