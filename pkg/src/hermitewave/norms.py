"""L2 errors of Hermite grid functions measured on their piecewise
degree-(2N+1) reconstruction with Gauss-Legendre quadrature."""
from __future__ import annotations

import numpy as np

from . import interpolation as interp


def _gauss01(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def _vander(xi: np.ndarray, degree: int) -> np.ndarray:
    return xi[:, None] ** np.arange(degree + 1)


def cell_polynomials(jets: np.ndarray, N: int, axis: int = 0) -> np.ndarray:
    """Degree 2N+1 jets about each cell's left node (offsets 0 and 1)."""
    H = interp.hermite_matrix(0.0, 1.0, N)
    return H(jets, np.roll(jets, -1, axis=axis))


def l2_error_1d(state, exact, t: float | None = None, field: int = 0) -> float:
    """``||u_h - u||_2`` over the periodic interval.

    ``exact(x, t)`` evaluates the reference pointwise.
    """
    grid = state.grid
    t = state.t if t is None else t
    N = state.N
    P = cell_polynomials(state.jets[:, field, :], N)
    xi, w = _gauss01(2 * N + 4)
    uh = P @ _vander(xi, 2 * N + 1).T
    x = grid.nodes[:, None] + grid.h * xi[None, :]
    err = uh - exact(x, t)
    cells = (err ** 2) @ w * grid.h
    return float(np.sqrt(np.sum(cells)))


def l2_error_2d(state, exact, t: float | None = None, field: int = 0) -> float:
    """Tensor-product analogue of :func:`l2_error_1d`; ``exact(x, y, t)``."""
    grid = state.grid
    t = state.t if t is None else t
    N = state.N
    U = state.jets[:, :, field]
    H = interp.hermite_matrix(0.0, 1.0, N).H
    # x-direction: pair (m, m+1) along coefficient axis -2
    Wx = np.concatenate([U, np.roll(U, -1, axis=0)], axis=-2)
    Wx = np.einsum("ij,abjk->abik", H, Wx)
    Wxy = np.concatenate([Wx, np.roll(Wx, -1, axis=1)], axis=-1)
    P = np.einsum("kl,abil->abik", H, Wxy)
    xi, w = _gauss01(2 * N + 4)
    V = _vander(xi, 2 * N + 1)
    uh = np.einsum("pi,abik,qk->abpq", V, P, V)
    X = grid.x_nodes[:, None, None, None] + grid.hx * xi[None, None, :, None]
    Y = grid.y_nodes[None, :, None, None] + grid.hy * xi[None, None, None, :]
    err = uh - exact(X, Y, t)
    cells = np.einsum("abpq,p,q->ab", err ** 2, w, w) * grid.hx * grid.hy
    return float(np.sqrt(np.sum(cells)))
