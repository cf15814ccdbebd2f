"""Tensor-product Hermite steppers on doubly periodic grids.

Node data have shape ``(Kx, Ky, F, N+1, N+1)``: x node, y node, field, then
scaled derivatives in x and in y.  Every 2D reconstruction is the 1D one
applied along x (coefficient axis -2, nodes axis 0) and then along y
(coefficient axis -1, nodes axis 1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from . import interpolation as interp
from .jets import LinearOperator2D, acoustic_operator, advection_operator_2d, taylor_evolve_2d
from .schemes1d import (CFL_SLACK, CFLError, Grid1D, RunResult, SchemeConfig, StepRecord,
                        UnsupportedError, cfl_fraction, step_times)


@dataclass(frozen=True)
class Grid2D:
    gx: Grid1D
    gy: Grid1D

    @classmethod
    def square(cls, a: float, b: float, K: int) -> Grid2D:
        return cls(Grid1D(a, b, K), Grid1D(a, b, K))

    @property
    def Kx(self) -> int:
        return self.gx.K

    @property
    def Ky(self) -> int:
        return self.gy.K

    @property
    def hx(self) -> float:
        return self.gx.h

    @property
    def hy(self) -> float:
        return self.gy.h

    @property
    def x_nodes(self) -> np.ndarray:
        return self.gx.nodes

    @property
    def y_nodes(self) -> np.ndarray:
        return self.gy.nodes


@dataclass(frozen=True)
class GridState2D:
    grid: Grid2D
    jets: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        U = np.array(self.jets, dtype=float)
        if U.ndim == 4:
            U = U[:, :, None]
        g = self.grid
        if U.ndim != 5 or U.shape[:2] != (g.Kx, g.Ky) or U.shape[-1] != U.shape[-2]:
            raise ValueError(f"jets must have shape ({g.Kx}, {g.Ky}, F, N+1, N+1), got {U.shape}")
        U.setflags(write=False)
        object.__setattr__(self, "jets", U)

    @property
    def N(self) -> int:
        return self.jets.shape[-1] - 1

    @property
    def nfields(self) -> int:
        return self.jets.shape[2]

    def with_jets(self, jets, t: float) -> GridState2D:
        return GridState2D(self.grid, jets, t)


@dataclass(frozen=True)
class Pde2D:
    kind: str
    cx: float = 0.0
    cy: float = 0.0
    c: float = 1.0

    @classmethod
    def advection2d(cls, cx: float, cy: float) -> Pde2D:
        return cls("advection", float(cx), float(cy))

    @classmethod
    def acoustic(cls, c: float = 1.0) -> Pde2D:
        if c <= 0:
            raise ValueError("wave speed must be positive")
        return cls("acoustic", c=float(c))

    @property
    def nfields(self) -> int:
        return 1 if self.kind == "advection" else 3

    @property
    def spectral_radius(self) -> float:
        if self.kind == "advection":
            return math.hypot(self.cx, self.cy)
        return self.c

    def operator(self, hx: float, hy: float) -> LinearOperator2D:
        if self.kind == "advection":
            return advection_operator_2d(self.cx, self.cy, hx, hy)
        return acoustic_operator(self.c, hx, hy)

    def swapped(self) -> Pde2D:
        """The same PDE with the roles of x and y exchanged."""
        return replace(self, cx=self.cy, cy=self.cx)


def acoustic_rhs(jets, c: float, hx: float, hy: float) -> np.ndarray:
    """Time derivatives of ``(p, u, v)`` tensor jets (field axis -3)."""
    return acoustic_operator(c, hx, hy)(np.asarray(jets, dtype=float))


# ---------------------------------------------------------------------------
# per-axis application of the 1D reconstructions


def _along_x(fn, *arrays):
    """Apply a 1D reconstruction to the x coefficients (axis -2)."""
    out = fn(*(np.swapaxes(a, -1, -2) for a in arrays))
    return np.swapaxes(out, -1, -2)


def _roll(U, shift, axis):
    return np.roll(U, shift, axis=axis)


def reconstruct_2d(kind: str, U: np.ndarray, velocity: tuple[float, float] | None = None) -> np.ndarray:
    """Degree (2N+1, 2N+1) reconstruction for every node of a periodic array.

    For Dual, entry ``[m, n]`` is centred at the dual node ``(m+1/2, n+1/2)``;
    for the others it is centred at ``(m, n)``.  Upwind needs the advection
    velocity to pick the neighbour along each axis.
    """
    U = np.asarray(U, dtype=float)
    if U.ndim < 4 or U.shape[-1] != U.shape[-2]:
        raise ValueError(f"expected (Kx, Ky, ..., N+1, N+1) data, got shape {U.shape}")
    if kind == "dual":
        W = _along_x(interp.dual_reconstruct, U, _roll(U, -1, 0))
        return interp.dual_reconstruct(W, _roll(W, -1, 1))
    if kind == "central":
        W = _along_x(interp.central_reconstruct, _roll(U, 1, 0), _roll(U, -1, 0))
        return interp.central_reconstruct(_roll(W, 1, 1), _roll(W, -1, 1))
    if kind == "virtual":
        W = _along_x(interp.virtual_reconstruct, _roll(U, 1, 0), U, _roll(U, -1, 0))
        return interp.virtual_reconstruct(_roll(W, 1, 1), W, _roll(W, -1, 1))
    if kind == "upwind":
        if velocity is None:
            raise ValueError("Upwind reconstruction needs the advection velocity")
        cx, cy = velocity
        W = _upwind_axis(U, cx, 0, along_x=True)
        return _upwind_axis(W, cy, 1, along_x=False)
    raise ValueError(f"unknown scheme {kind!r}")


def _upwind_axis(U, c, axis, along_x):
    if c >= 0:
        fn = interp.upwind_reconstruct
        args = (_roll(U, 1, axis), U)
    else:
        def fn(a, b):
            return interp.upwind_reconstruct(a, b, downwind=True)
        args = (_roll(U, -1, axis), U)
    return _along_x(fn, *args) if along_x else fn(*args)


def _undual(Q: np.ndarray) -> np.ndarray:
    """Reconstruction at primal nodes from dual data: ``Q[m, n]`` at ``(m+1/2, n+1/2)``."""
    W = _along_x(interp.dual_reconstruct, _roll(Q, 1, 0), Q)
    return interp.dual_reconstruct(_roll(W, 1, 1), W)


def _evolve_restrict(W, op, dt, N, order):
    return taylor_evolve_2d(W, op, dt, order)[..., : N + 1, : N + 1]


def default_order(N: int) -> int:
    """Temporal Taylor order 2(2N+1), exact for the degree (2N+1, 2N+1) reconstruction."""
    return 2 * (2 * N + 1)


def max_timestep_2d(cfg: SchemeConfig, pde: Pde2D, grid: Grid2D) -> float:
    """``C h / rho`` with ``h = min(hx, hy)``, halved for Dual (per stage) and Virtual."""
    return cfg.C * cfl_fraction(cfg.kind) * min(grid.hx, grid.hy) / pde.spectral_radius


def _check_cfl(kind, pde, grid, dt):
    if dt < 0:
        raise CFLError(f"negative time step {dt}")
    limit = cfl_fraction(kind) * min(grid.hx, grid.hy)
    if pde.spectral_radius * dt > limit * (1 + CFL_SLACK):
        raise CFLError(f"rho*dt = {pde.spectral_radius * dt:.6g} exceeds the limit {limit:.6g}")


def step_2d(kind: str, state: GridState2D, pde: Pde2D, dt: float,
            order: int | None = None) -> GridState2D:
    """One step of the named scheme.  Dual covers ``2 dt`` (two stages of ``dt``)."""
    if kind == "upwind" and pde.kind != "advection":
        raise UnsupportedError("the 2D Upwind scheme is implemented for advection only")
    if state.nfields != pde.nfields:
        raise ValueError(f"state has {state.nfields} fields, PDE needs {pde.nfields}")
    _check_cfl(kind, pde, state.grid, dt)
    g = state.grid
    N = state.N
    order = default_order(N) if order is None else order
    op = pde.operator(g.hx, g.hy)
    U = state.jets
    if kind == "dual":
        Q = _evolve_restrict(reconstruct_2d("dual", U), op, dt, N, order)
        U = _evolve_restrict(_undual(Q), op, dt, N, order)
        return state.with_jets(U, state.t + 2 * dt)
    W = reconstruct_2d(kind, U, velocity=(pde.cx, pde.cy))
    return state.with_jets(_evolve_restrict(W, op, dt, N, order), state.t + dt)


def step_advance_2d(cfg: SchemeConfig, pde: Pde2D, grid: Grid2D) -> float:
    dt = max_timestep_2d(cfg, pde, grid)
    return 2 * dt if cfg.kind == "dual" else dt


def step(cfg: SchemeConfig, state: GridState2D, pde: Pde2D, advance: float,
         order: int | None = None) -> GridState2D:
    """Advance by ``advance`` physical time (split across the Dual stages)."""
    if cfg.H2 is not None:
        raise UnsupportedError("extended reconstructions are 1D only")
    if cfg.kind == "dual":
        return step_2d("dual", state, pde, advance / 2, order)
    return step_2d(cfg.kind, state, pde, advance, order)


def run2d(state: GridState2D, pde: Pde2D, cfg: SchemeConfig, T_final: float,
          observer: Callable[[float, GridState2D], None] | None = None,
          policy: str = "shorten-last", order: int | None = None) -> RunResult:
    advance = step_advance_2d(cfg, pde, state.grid)
    records = []
    t = state.t
    for i, t_next in enumerate(step_times(state.t, T_final, advance, policy)):
        dt = t_next - t
        state = replace(step(cfg, state, pde, dt, order), t=t_next)
        t = t_next
        records.append(StepRecord(i, t, dt))
        if observer is not None:
            observer(t, state)
    return RunResult(state, records)


def transpose_state(state: GridState2D, acoustic: bool = False) -> GridState2D:
    """Swap the x and y axes (and u, v for the acoustic fields)."""
    U = np.swapaxes(np.swapaxes(state.jets, 0, 1), -1, -2)
    if acoustic:
        U = U[:, :, [0, 2, 1]]
    return GridState2D(Grid2D(state.grid.gy, state.grid.gx), U, state.t)
