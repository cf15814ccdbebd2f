"""Jets: scaled Taylor coefficients about a node, and their time evolution.

A jet of degree ``d`` about a center ``x0`` with length scale ``h`` stores

    u_j = h**j / j! * d^j u / dx^j (x0),    j = 0..d

so that ``u(x) ~ sum_j u_j * ((x - x0) / h)**j``.  Everything in this module
works on the dimensionless coefficients; the scale is carried alongside and
only enters through the derivative matrix.

Grid-level code stores jets as plain numpy arrays whose trailing axis (1D) or
two trailing axes (2D) hold coefficients and whose preceding axis holds the
fields of a system.  The :class:`Jet` dataclass is the single-node, scalar
convenience wrapper used for initial data and tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class JetError(ValueError):
    """Invalid arguments to a jet operation."""


@dataclass(frozen=True)
class Jet:
    """Scaled Taylor coefficients of a scalar function about one point."""

    coeffs: np.ndarray
    h: float = 1.0

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.ndim != 1 or c.size == 0:
            raise JetError("jet coefficients must be a non-empty 1D sequence")
        if not np.all(np.isfinite(c)):
            raise JetError("jet coefficients must be finite")
        if not self.h > 0:
            raise JetError(f"jet scale must be positive, got {self.h}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coeffs, dtype=dtype)

    def __len__(self):
        return self.coeffs.size

    def __getitem__(self, i):
        return self.coeffs[i]

    @classmethod
    def variable(cls, center: float, degree: int, h: float = 1.0) -> Jet:
        """Jet of the identity function ``x`` about ``center``."""
        c = np.zeros(degree + 1)
        c[0] = center
        if degree >= 1:
            c[1] = h
        return cls(c, h)

    @classmethod
    def constant(cls, value: float, degree: int, h: float = 1.0) -> Jet:
        c = np.zeros(degree + 1)
        c[0] = value
        return cls(c, h)

    def __add__(self, other):
        return add(self, other)

    def __mul__(self, other):
        if isinstance(other, Jet):
            return multiply(self, other)
        return scale(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return scale(self, -1.0)

    def __sub__(self, other):
        return add(self, scale(other, -1.0))


@dataclass(frozen=True)
class TensorJet2D:
    """Tensor-product jet: ``coeffs[j, k]`` multiplies ``xi**j * eta**k``."""

    coeffs: np.ndarray
    hx: float = 1.0
    hy: float = 1.0

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.ndim != 2:
            raise JetError("tensor jet coefficients must be a 2D array")
        if not np.all(np.isfinite(c)):
            raise JetError("jet coefficients must be finite")
        if not (self.hx > 0 and self.hy > 0):
            raise JetError("jet scales must be positive")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> tuple[int, int]:
        return self.coeffs.shape[0] - 1, self.coeffs.shape[1] - 1

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coeffs, dtype=dtype)

    @classmethod
    def outer(cls, jx: Jet, jy: Jet) -> TensorJet2D:
        """Separable jet of ``f(x) * g(y)``."""
        return cls(np.outer(jx.coeffs, jy.coeffs), jx.h, jy.h)


def as_coeffs(u) -> np.ndarray:
    """Coefficient array of a Jet, TensorJet2D or array-like."""
    if isinstance(u, (Jet, TensorJet2D)):
        return u.coeffs
    return np.asarray(u, dtype=float)


# ---------------------------------------------------------------------------
# derivative matrix and evaluation


def make_derivative_matrix(d: int, h: float) -> np.ndarray:
    """Matrix ``D`` with ``D[i, i+1] = (i+1)/h`` mapping a jet to its derivative's jet."""
    if d < 0:
        raise JetError(f"degree must be non-negative, got {d}")
    if not h > 0:
        raise JetError(f"scale must be positive, got {h}")
    D = np.zeros((d + 1, d + 1))
    i = np.arange(d)
    D[i, i + 1] = (i + 1) / h
    return D


def differentiate(u: np.ndarray, h: float, axis: int = -1) -> np.ndarray:
    """Apply the derivative matrix along ``axis`` (same result as ``D @ u``)."""
    u = np.moveaxis(np.asarray(u, dtype=float), axis, -1)
    out = np.zeros_like(u)
    n = u.shape[-1]
    if n > 1:
        out[..., :-1] = u[..., 1:] * (np.arange(1, n) / h)
    return np.moveaxis(out, -1, axis)


def jet_evaluate(j, x, center: float = 0.0, h: float | None = None):
    """Evaluate a jet at ``x`` by Horner's rule.  ``x`` may be an array."""
    c = as_coeffs(j)
    if h is None:
        h = j.h if isinstance(j, Jet) else 1.0
    xi = (np.asarray(x, dtype=float) - center) / h
    acc = np.zeros_like(xi) + c[-1]
    for a in c[-2::-1]:
        acc = acc * xi + a
    return acc if acc.ndim else float(acc)


# ---------------------------------------------------------------------------
# truncated Taylor arithmetic


def _check_pair(a: Jet, b: Jet):
    if a.degree != b.degree:
        raise JetError(f"degree mismatch: {a.degree} vs {b.degree}")
    if not math.isclose(a.h, b.h, rel_tol=1e-14):
        raise JetError(f"scale mismatch: {a.h} vs {b.h}")


def add(a: Jet, b: Jet) -> Jet:
    _check_pair(a, b)
    return Jet(a.coeffs + b.coeffs, a.h)


def scale(a: Jet, alpha: float) -> Jet:
    return Jet(alpha * a.coeffs, a.h)


def multiply(a: Jet, b: Jet) -> Jet:
    """Cauchy product truncated at the common degree."""
    _check_pair(a, b)
    n = a.degree + 1
    return Jet(np.convolve(a.coeffs, b.coeffs)[:n], a.h)


def exp(a: Jet) -> Jet:
    # k e_k = sum_{j=1..k} j a_j e_{k-j}
    x = a.coeffs
    e = np.zeros_like(x)
    e[0] = math.exp(x[0])
    for k in range(1, x.size):
        j = np.arange(1, k + 1)
        e[k] = np.dot(j * x[j], e[k - j]) / k
    return Jet(e, a.h)


def sin_cos(a: Jet) -> tuple[Jet, Jet]:
    """Jets of ``sin(a)`` and ``cos(a)`` from the coupled recurrences."""
    x = a.coeffs
    s = np.zeros_like(x)
    c = np.zeros_like(x)
    s[0], c[0] = math.sin(x[0]), math.cos(x[0])
    for k in range(1, x.size):
        j = np.arange(1, k + 1)
        s[k] = np.dot(j * x[j], c[k - j]) / k
        c[k] = -np.dot(j * x[j], s[k - j]) / k
    return Jet(s, a.h), Jet(c, a.h)


def sin(a: Jet) -> Jet:
    return sin_cos(a)[0]


def cos(a: Jet) -> Jet:
    return sin_cos(a)[1]


# ---------------------------------------------------------------------------
# linear operators and temporal Taylor evolution


@dataclass(frozen=True)
class LinearOperator1D:
    """Right-hand side ``A d/dx`` of ``u_t = A u_x`` acting on stacked jets.

    Jets are arrays of shape ``(..., F, d+1)`` with ``F`` the number of fields.
    """

    A: np.ndarray
    h: float

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        if A.shape[0] != A.shape[1]:
            raise JetError("system matrix must be square")
        A.setflags(write=False)
        object.__setattr__(self, "A", A)

    @property
    def nfields(self) -> int:
        return self.A.shape[0]

    @property
    def spectral_radius(self) -> float:
        return float(np.max(np.abs(np.linalg.eigvals(self.A))))

    def __call__(self, w: np.ndarray) -> np.ndarray:
        dw = differentiate(w, self.h, axis=-1)
        return np.einsum("fg,...gj->...fj", self.A, dw)


@dataclass(frozen=True)
class LinearOperator2D:
    """Right-hand side ``Ax d/dx + Ay d/dy`` on jets of shape ``(..., F, dx+1, dy+1)``."""

    Ax: np.ndarray
    Ay: np.ndarray
    hx: float
    hy: float
    rho: float | None = field(default=None, compare=False)

    def __post_init__(self):
        for name in ("Ax", "Ay"):
            M = np.atleast_2d(np.asarray(getattr(self, name), dtype=float))
            M.setflags(write=False)
            object.__setattr__(self, name, M)
        if self.Ax.shape != self.Ay.shape:
            raise JetError("Ax and Ay must have the same shape")

    @property
    def nfields(self) -> int:
        return self.Ax.shape[0]

    @property
    def spectral_radius(self) -> float:
        if self.rho is not None:
            return float(self.rho)
        # max over unit directions of rho(nx Ax + ny Ay), sampled
        th = np.linspace(0, np.pi, 181)
        return float(max(np.max(np.abs(np.linalg.eigvals(np.cos(t) * self.Ax + np.sin(t) * self.Ay)))
                         for t in th))

    def __call__(self, w: np.ndarray) -> np.ndarray:
        dx = differentiate(w, self.hx, axis=-2)
        dy = differentiate(w, self.hy, axis=-1)
        return (np.einsum("fg,...gjk->...fjk", self.Ax, dx)
                + np.einsum("fg,...gjk->...fjk", self.Ay, dy))


def advection_operator(c: float, h: float) -> LinearOperator1D:
    """Operator for ``u_t + c u_x = 0``."""
    return LinearOperator1D(np.array([[-float(c)]]), h)


def advection_operator_2d(cx: float, cy: float, hx: float, hy: float) -> LinearOperator2D:
    """Operator for ``u_t + cx u_x + cy u_y = 0``; its CFL speed is ``|(cx, cy)|``."""
    return LinearOperator2D([[-float(cx)]], [[-float(cy)]], hx, hy, rho=math.hypot(cx, cy))


def acoustic_operator(c: float, hx: float, hy: float) -> LinearOperator2D:
    """First-order isotropic wave system on fields ``(p, u, v)``.

    ``p_t = -c**2 (u_x + v_y)``, ``u_t = -p_x``, ``v_t = -p_y``.
    """
    c2 = float(c) ** 2
    Ax = np.array([[0.0, -c2, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
    Ay = np.array([[0.0, 0.0, -c2], [0.0, 0.0, 0.0], [-1.0, 0.0, 0.0]])
    return LinearOperator2D(Ax, Ay, hx, hy, rho=abs(float(c)))


def _horner(u: np.ndarray, op, dt: float, order: int) -> np.ndarray:
    if order < 0:
        raise JetError(f"Taylor order must be non-negative, got {order}")
    if dt < 0:
        raise JetError(f"time step must be non-negative, got {dt}")
    if dt == 0 or order == 0:
        return u.copy()
    # w <- u + dt/l * op(w), l = order..1, sums (dt op)^k / k! for k <= order
    w = u
    for ell in range(order, 0, -1):
        w = u + (dt / ell) * op(w)
    return w


def taylor_evolve(jets, op, dt: float, order: int | None = None) -> np.ndarray:
    """Advance stacked 1D jets by ``dt`` with a temporal Taylor series.

    ``jets`` has shape ``(..., F, d+1)``; ``order`` defaults to ``d``, which is
    exact for constant-coefficient operators since ``D`` is nilpotent.
    """
    u = np.asarray(as_coeffs(jets), dtype=float)
    if order is None:
        order = u.shape[-1] - 1
    return _horner(u, op, dt, order)


def taylor_evolve_2d(jets, op, dt: float, order: int | None = None) -> np.ndarray:
    """2D analogue of :func:`taylor_evolve`; ``order`` defaults to ``dx + dy``."""
    u = np.asarray(as_coeffs(jets), dtype=float)
    if order is None:
        order = u.shape[-2] + u.shape[-1] - 2
    return _horner(u, op, dt, order)


def truncated_exponential(u: np.ndarray, op, dt: float, order: int) -> np.ndarray:
    """Explicit sum of ``(dt op)^k u / k!`` for ``k <= order`` (reference for Horner)."""
    u = np.asarray(u, dtype=float)
    term = u.copy()
    total = u.copy()
    for k in range(1, order + 1):
        term = (dt / k) * op(term)
        total = total + term
    return total
