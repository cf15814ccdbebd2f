"""Closed-form solutions used as initial data and references.

Each solution knows its PDE, its domain, how to evaluate the measured field
pointwise, and how to produce exact node jets (via truncated Taylor
arithmetic, so no finite differences are involved).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import jets as J

ANGLE_2D = math.pi / 3


def _shifted_sin_cos(x0: float, shift: float, N: int, h: float, k: float = math.pi):
    """Jets of sin(k (x - shift)) and cos(k (x - shift)) about ``x0``."""
    arg = J.scale(J.add(J.Jet.variable(x0, N, h), J.Jet.constant(-shift, N, h)), k)
    return J.sin_cos(arg)


def sine_jet(x0, t, N, h, c=1.0):
    return _shifted_sin_cos(x0, c * t, N, h)[0]


def gaussian_jet(x0, t, N, h, c=1.0):
    s = _shifted_sin_cos(x0, c * t, N, h)[0]
    return J.exp(J.scale(J.multiply(s, s), -4.0))


@dataclass(frozen=True)
class Solution1D:
    name: str
    c: float = 1.0
    a: float = -1.0
    b: float = 1.0

    def value(self, x, t):
        x = np.asarray(x, dtype=float)
        s = np.sin(np.pi * (x - self.c * t))
        if self.name == "sine1d":
            return s
        return np.exp(-4.0 * s ** 2)

    def jet(self, x0, t, N, h) -> J.Jet:
        f = sine_jet if self.name == "sine1d" else gaussian_jet
        return f(x0, t, N, h, self.c)

    def node_jets(self, nodes, t, N, h) -> np.ndarray:
        """Array ``(K, 1, N+1)`` of exact jets."""
        return np.array([self.jet(x, t, N, h).coeffs for x in nodes])[:, None, :]


@dataclass(frozen=True)
class Solution2D:
    """sine2d: advected product of sines; standing-wave2d: acoustic standing wave (c = 1)."""

    name: str
    a: float = -1.0
    b: float = 1.0
    angle: float = ANGLE_2D

    @property
    def velocity(self) -> tuple[float, float]:
        return math.cos(self.angle), math.sin(self.angle)

    @property
    def nfields(self) -> int:
        return 1 if self.name == "sine2d" else 3

    def value(self, x, y, t):
        """Measured field: u for advection, p for the wave system."""
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        if self.name == "sine2d":
            cx, cy = self.velocity
            return np.sin(np.pi * (x - cx * t)) * np.sin(np.pi * (y - cy * t))
        return np.sin(np.pi * x) * np.sin(np.pi * y) * math.cos(math.sqrt(2) * math.pi * t)

    def fields(self, x, y, t):
        """All fields (p, u, v) of the standing wave at points."""
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        w = math.sqrt(2) * math.pi
        p = np.sin(np.pi * x) * np.sin(np.pi * y) * math.cos(w * t)
        u = -np.cos(np.pi * x) * np.sin(np.pi * y) * math.sin(w * t) / math.sqrt(2)
        v = -np.sin(np.pi * x) * np.cos(np.pi * y) * math.sin(w * t) / math.sqrt(2)
        return p, u, v

    def node_jets(self, xs, ys, t, N, hx, hy) -> np.ndarray:
        """Array ``(Kx, Ky, F, N+1, N+1)`` of exact tensor jets."""
        out = np.zeros((len(xs), len(ys), self.nfields, N + 1, N + 1))
        if self.name == "sine2d":
            cx, cy = self.velocity
            jx = [sine_jet(x, t, N, hx, cx).coeffs for x in xs]
            jy = [sine_jet(y, t, N, hy, cy).coeffs for y in ys]
            out[:, :, 0] = np.einsum("ij,kl->ikjl", jx, jy)
            return out
        sx, cxj = zip(*(_shifted_sin_cos(x, 0.0, N, hx) for x in xs))
        sy, cyj = zip(*(_shifted_sin_cos(y, 0.0, N, hy) for y in ys))
        sx = np.array([j.coeffs for j in sx])
        cxj = np.array([j.coeffs for j in cxj])
        sy = np.array([j.coeffs for j in sy])
        cyj = np.array([j.coeffs for j in cyj])
        w = math.sqrt(2) * math.pi
        out[:, :, 0] = math.cos(w * t) * np.einsum("ij,kl->ikjl", sx, sy)
        out[:, :, 1] = -math.sin(w * t) / math.sqrt(2) * np.einsum("ij,kl->ikjl", cxj, sy)
        out[:, :, 2] = -math.sin(w * t) / math.sqrt(2) * np.einsum("ij,kl->ikjl", sx, cyj)
        return out


SOLUTIONS_1D = ("sine1d", "gaussian1d")
SOLUTIONS_2D = ("sine2d", "standing-wave2d")


def get_solution(name: str):
    if name in SOLUTIONS_1D:
        return Solution1D(name)
    if name in SOLUTIONS_2D:
        return Solution2D(name)
    raise KeyError(f"unknown solution id {name!r}")
