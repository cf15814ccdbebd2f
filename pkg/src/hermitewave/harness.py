"""Experiment drivers: initial data, error measurement, convergence studies
and CSV output."""
from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import schemes1d as s1
from . import schemes2d as s2
from .norms import l2_error_1d, l2_error_2d
from .solutions import SOLUTIONS_1D, SOLUTIONS_2D, Solution1D, Solution2D, get_solution

log = logging.getLogger(__name__)

EQUATIONS = ("advection1d", "advection2d", "wave2d")
DEFAULT_SOLUTION = {"advection1d": "sine1d", "advection2d": "sine2d", "wave2d": "standing-wave2d"}
DOMAIN = (-1.0, 1.0)


@dataclass(frozen=True)
class ExperimentConfig:
    equation: str = "advection1d"
    scheme: str = "dual"
    N: int = 2
    K: tuple[int, ...] = (16, 32, 64)
    C: float = 0.9
    T: float = 10.0
    solution: str | None = None
    out: str | None = None
    policy: str = "shorten-last"

    def __post_init__(self):
        if self.equation not in EQUATIONS:
            raise ValueError(f"unknown equation {self.equation!r}; expected one of {EQUATIONS}")
        if self.scheme not in s1.SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; expected one of {s1.SCHEMES}")
        if self.N < 0:
            raise ValueError("N must be non-negative")
        if not 0 < self.C <= 1:
            raise ValueError(f"CFL constant must lie in (0, 1], got {self.C}")
        if self.T < 0:
            raise ValueError("final time must be non-negative")
        K = tuple(int(k) for k in np.atleast_1d(self.K))
        if not K or min(K) < 3:
            raise ValueError("grid sizes must be at least 3")
        object.__setattr__(self, "K", K)
        sol = self.solution or DEFAULT_SOLUTION[self.equation]
        allowed = SOLUTIONS_1D if self.equation == "advection1d" else SOLUTIONS_2D
        if sol not in allowed:
            raise ValueError(f"solution {sol!r} does not fit equation {self.equation!r}")
        if self.equation == "advection2d" and sol != "sine2d":
            raise ValueError("advection2d uses the sine2d solution")
        if self.equation == "wave2d" and sol != "standing-wave2d":
            raise ValueError("wave2d uses the standing-wave2d solution")
        if self.equation == "wave2d" and self.scheme == "upwind":
            raise ValueError("the Upwind scheme is not available for the wave system")
        if self.policy not in s1.STEP_POLICIES:
            raise ValueError(f"unknown step policy {self.policy!r}")
        object.__setattr__(self, "solution", sol)

    @property
    def is_2d(self) -> bool:
        return self.equation != "advection1d"

    @property
    def scheme_config(self) -> s1.SchemeConfig:
        return s1.SchemeConfig(self.scheme, self.N, self.C)


def make_pde(cfg: ExperimentConfig):
    sol = get_solution(cfg.solution)
    if cfg.equation == "advection1d":
        return s1.Pde1D.advection(sol.c)
    if cfg.equation == "advection2d":
        return s2.Pde2D.advection2d(*sol.velocity)
    return s2.Pde2D.acoustic(1.0)


def project_initial_condition(solution: str, grid, N: int, t: float = 0.0):
    """Exact node jets of a named solution at time ``t``."""
    sol = get_solution(solution)
    if isinstance(sol, Solution1D):
        if not isinstance(grid, s1.Grid1D):
            raise ValueError(f"{solution} needs a 1D grid")
        return s1.GridState1D(grid, sol.node_jets(grid.nodes, t, N, grid.h), t)
    if not isinstance(grid, s2.Grid2D):
        raise ValueError(f"{solution} needs a 2D grid")
    U = sol.node_jets(grid.x_nodes, grid.y_nodes, t, N, grid.hx, grid.hy)
    return s2.GridState2D(grid, U, t)


def l2_error(state, solution: str, t: float | None = None) -> float:
    """L2 error of the measured field (u, or p for the wave system)."""
    sol = get_solution(solution)
    if isinstance(sol, Solution2D):
        return l2_error_2d(state, sol.value, t, field=0)
    return l2_error_1d(state, sol.value, t, field=0)


def make_grid(cfg: ExperimentConfig, K: int):
    a, b = DOMAIN
    return s2.Grid2D.square(a, b, K) if cfg.is_2d else s1.Grid1D(a, b, K)


def simulate(cfg: ExperimentConfig, K: int | None = None, trace: bool = False):
    """One run to ``cfg.T``; returns ``(error, trace)`` where the trace lists
    ``(step, t, error)`` after every step when requested."""
    K = cfg.K[0] if K is None else K
    grid = make_grid(cfg, K)
    state = project_initial_condition(cfg.solution, grid, cfg.N)
    pde = make_pde(cfg)
    rows = []

    def record(t, st):
        rows.append((len(rows), t, l2_error(st, cfg.solution, t)))

    observer = record if trace else None
    if cfg.is_2d:
        res = s2.run2d(state, pde, cfg.scheme_config, cfg.T, observer, policy=cfg.policy)
    else:
        res = s1.run(state, pde, cfg.scheme_config, cfg.T, observer, policy=cfg.policy)
    err = l2_error(res.state, cfg.solution, cfg.T)
    if not math.isfinite(err):
        raise FloatingPointError(f"non-finite error for K={K}")
    return err, rows


def pairwise_rates(errors) -> np.ndarray:
    """``log2(e_K / e_2K)`` for successive refinements."""
    e = np.asarray(errors, dtype=float)
    return np.log2(e[:-1] / e[1:])


def fitted_rate(Ks, errors) -> float:
    """Least-squares slope of ``-log2 e`` against ``log2 K``."""
    x = np.log2(np.asarray(Ks, dtype=float))
    y = -np.log2(np.asarray(errors, dtype=float))
    return float(np.polyfit(x, y, 1)[0])


@dataclass
class ErrorReport:
    N: int
    C: float
    K: tuple[int, ...]
    errors: list[float]
    rates: list[float] = field(default_factory=list)
    fitted: float = float("nan")
    trace: list | None = None

    def rows(self):
        """``(K, N, C, error, rate)`` with an empty rate on the coarsest grid."""
        out = []
        for i, (K, e) in enumerate(zip(self.K, self.errors)):
            out.append((K, self.N, self.C, e, self.rates[i - 1] if i else None))
        return out


def converge(cfg: ExperimentConfig) -> ErrorReport:
    if len(cfg.K) < 2:
        raise ValueError("a convergence study needs at least two grid sizes")
    if any(b != 2 * a for a, b in zip(cfg.K, cfg.K[1:])):
        raise ValueError(f"grid sizes must double, got {cfg.K}")
    errors = []
    for K in cfg.K:
        e, _ = simulate(cfg, K)
        log.info("%s %s N=%d C=%g K=%d error %.6e", cfg.equation, cfg.scheme, cfg.N, cfg.C, K, e)
        errors.append(e)
    return ErrorReport(cfg.N, cfg.C, cfg.K, errors, [float(r) for r in pairwise_rates(errors)],
                       fitted_rate(cfg.K, errors))


def sweep(cfg: ExperimentConfig, Ns, Cs) -> list[ErrorReport]:
    return [converge(replace(cfg, N=N, C=C)) for N in Ns for C in Cs]


# ---------------------------------------------------------------------------
# CSV


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def write_csv(path, header, rows) -> None:
    Path(path).write_text(csv_text(header, rows), encoding="utf-8")


CONVERGENCE_HEADER = ("K", "N", "C", "error", "rate")


def convergence_rows(reports) -> list:
    rows = [r for rep in reports for r in rep.rows()]
    return sorted(rows, key=lambda r: (r[0], r[1], r[2]))
