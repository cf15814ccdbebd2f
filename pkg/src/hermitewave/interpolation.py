"""Hermite constraint and interpolation matrices, restriction, and the
reconstructions used by the Dual, Virtual, Central and Upwind schemes.

All offsets are in units of the grid spacing, so every matrix here is
independent of the grid.  Functions taking node data accept arrays whose last
axis holds the coefficients; leading axes broadcast (fields, nodes, ...).
"""
from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from .jets import as_coeffs

# offsets of the two interpolation points about the reconstruction node
DUAL_OFFSETS = (-0.5, 0.5)
CENTRAL_OFFSETS = (-1.0, 1.0)
UPWIND_OFFSETS = (-1.0, 0.0)
DOWNWIND_OFFSETS = (0.0, 1.0)

COND_LIMIT = 1e14


class InterpolationError(ValueError):
    pass


def constraint_matrix(zeta: float, n_derivs: int, width: int) -> np.ndarray:
    """Rows ``m < n_derivs`` of the map from a degree ``width-1`` jet about 0
    to its scaled derivatives at offset ``zeta``: ``C[m, n] = binom(n, m) zeta**(n-m)``."""
    if n_derivs < 1 or width < n_derivs:
        raise InterpolationError(f"need 1 <= n_derivs <= width, got {n_derivs}, {width}")
    C = np.zeros((n_derivs, width))
    for m in range(n_derivs):
        for n in range(m, width):
            C[m, n] = comb(n, m) * zeta ** (n - m)
    return C


@dataclass(frozen=True)
class InterpolationOperator:
    """``H = [C_L; C_R]^{-1}``: endpoint jets of degree N -> degree 2N+1 jet at the center."""

    H: np.ndarray
    zeta_l: float
    zeta_r: float
    N: int

    def __call__(self, left, right) -> np.ndarray:
        data = np.concatenate([as_coeffs(left), as_coeffs(right)], axis=-1)
        return data @ self.H.T

    @property
    def constraints(self) -> np.ndarray:
        n = self.N + 1
        return np.vstack([constraint_matrix(self.zeta_l, n, 2 * n),
                          constraint_matrix(self.zeta_r, n, 2 * n)])


def _exact_inverse(offsets, N: int) -> np.ndarray:
    """Inverse of the stacked constraint matrix by Gauss-Jordan elimination in
    rational arithmetic, rounded once to float.

    Offsets are binary fractions, so the stack is exact; float LU loses up to
    1e-11 for the one-sided offsets at N = 5.
    """
    n = N + 1
    w = len(offsets) * n
    zs = [Fraction(z) for z in offsets]
    A = [[Fraction(comb(k, m)) * z ** (k - m) if k >= m else Fraction(0) for k in range(w)]
         + [Fraction(int(i == j)) for j in range(w)]
         for i, (z, m) in enumerate((z, m) for z in zs for m in range(n))]
    for col in range(w):
        piv = max(range(col, w), key=lambda r: abs(A[r][col]))
        if A[piv][col] == 0:
            raise InterpolationError(f"singular constraint stack for offsets {tuple(offsets)}")
        A[col], A[piv] = A[piv], A[col]
        p = A[col][col]
        A[col] = [x / p for x in A[col]]
        for r in range(w):
            f = A[r][col]
            if r != col and f:
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    return np.array([[float(x) for x in row[w:]] for row in A])


@functools.lru_cache(maxsize=None)
def _hermite_matrix(zeta_l: float, zeta_r: float, N: int) -> InterpolationOperator:
    n = N + 1
    M = np.vstack([constraint_matrix(zeta_l, n, 2 * n), constraint_matrix(zeta_r, n, 2 * n)])
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise InterpolationError(f"singular constraint stack for offsets ({zeta_l}, {zeta_r})")
    H = _exact_inverse((zeta_l, zeta_r), N)
    H.setflags(write=False)
    return InterpolationOperator(H, zeta_l, zeta_r, N)


def hermite_matrix(zeta_l: float, zeta_r: float, N: int) -> InterpolationOperator:
    """Two-point Hermite interpolation matrix for offsets ``zeta_l``, ``zeta_r``."""
    if N < 0:
        raise InterpolationError(f"N must be non-negative, got {N}")
    if zeta_l == zeta_r:
        raise InterpolationError("interpolation offsets must be distinct")
    return _hermite_matrix(float(zeta_l), float(zeta_r), int(N))


def restrict(j, N: int) -> np.ndarray:
    """Keep the first N+1 coefficients."""
    c = as_coeffs(j)
    if c.shape[-1] < N + 1:
        raise InterpolationError(f"cannot restrict degree {c.shape[-1] - 1} jet to degree {N}")
    return c[..., : N + 1]


def pad(j, degree: int) -> np.ndarray:
    """Zero-pad a jet to the given degree (right inverse of :func:`restrict`)."""
    c = as_coeffs(j)
    out = np.zeros(c.shape[:-1] + (degree + 1,))
    out[..., : c.shape[-1]] = c
    return out


def _degree_N(*jets) -> int:
    sizes = {as_coeffs(u).shape[-1] for u in jets}
    if len(sizes) != 1:
        raise InterpolationError("stencil jets must share a degree")
    return sizes.pop() - 1


def dual_reconstruct(left, right) -> np.ndarray:
    """Degree 2N+1 jet at the midpoint of two nodes (Dual stages)."""
    N = _degree_N(left, right)
    return hermite_matrix(*DUAL_OFFSETS, N)(left, right)


def central_reconstruct(left, right) -> np.ndarray:
    """Degree 2N+1 jet at x_m from the jets at x_{m-1} and x_{m+1}."""
    N = _degree_N(left, right)
    return hermite_matrix(*CENTRAL_OFFSETS, N)(left, right)


def virtual_reconstruct(um1, u0, up1) -> np.ndarray:
    """Fused Virtual reconstruction at x_m from three neighbouring degree-N jets.

    Interpolates to both half nodes, truncates there, and interpolates back:
    the Dual scheme with a zero step on the staggered grid.
    """
    N = _degree_N(um1, u0, up1)
    Hd = hermite_matrix(*DUAL_OFFSETS, N)
    q_left = restrict(Hd(um1, u0), N)
    q_right = restrict(Hd(u0, up1), N)
    return Hd(q_left, q_right)


@functools.lru_cache(maxsize=None)
def _virtual_matrix(N: int) -> np.ndarray:
    n = N + 1
    RH = hermite_matrix(*DUAL_OFFSETS, N).H[:n]
    B = np.zeros((2 * n, 3 * n))
    B[:n, : 2 * n] = RH
    B[n:, n:] = RH
    F = hermite_matrix(*DUAL_OFFSETS, N).H @ B
    F.setflags(write=False)
    return F


def virtual_matrix(N: int) -> np.ndarray:
    """The (2N+2) x (3N+3) matrix of :func:`virtual_reconstruct`."""
    return _virtual_matrix(int(N))


def upwind_reconstruct(um1, u0, downwind: bool = False) -> np.ndarray:
    """One-sided reconstruction at x_m.

    The first N+1 coefficients are ``u0`` itself; the tail comes from the last
    N+1 rows of the Hermite matrix on ``(x_{m-1}, x_m)``.  With ``downwind``
    the second argument is read as the jet at x_{m+1} and offsets are mirrored.
    """
    u0 = as_coeffs(u0)
    other = as_coeffs(um1)
    N = _degree_N(other, u0)
    n = N + 1
    if downwind:
        H = hermite_matrix(*DOWNWIND_OFFSETS, N).H
        data = np.concatenate([u0, other], axis=-1)
    else:
        H = hermite_matrix(*UPWIND_OFFSETS, N).H
        data = np.concatenate([other, u0], axis=-1)
    tail = data @ H[n:].T
    return np.concatenate([u0, tail], axis=-1)


@functools.lru_cache(maxsize=None)
def _three_point_matrix(N: int) -> np.ndarray:
    H = _exact_inverse((-1.0, 0.0, 1.0), N)
    H.setflags(write=False)
    return H


def three_point_hermite_matrix(N: int) -> np.ndarray:
    """(3N+3)-square matrix interpolating three nodes' degree-N jets to a degree 3N+2 jet."""
    return _three_point_matrix(int(N))


def default_h2(N: int) -> np.ndarray:
    """Tail rows of the three-point interpolation matrix (DRP starting point)."""
    return np.array(three_point_hermite_matrix(N)[2 * N + 2:])


def extended_matrix(H2) -> np.ndarray:
    """``[F; H2]`` with ``F`` the fused Virtual map."""
    H2 = np.asarray(H2, dtype=float)
    N = H2.shape[0] - 1
    if H2.shape != (N + 1, 3 * N + 3):
        raise InterpolationError(f"H2 must have shape (N+1, 3N+3), got {H2.shape}")
    return np.vstack([virtual_matrix(N), H2])


def extended_reconstruct(um1, u0, up1, H2) -> np.ndarray:
    """Degree 3N+2 jet: Virtual reconstruction followed by ``H2`` on the stacked data."""
    N = _degree_N(um1, u0, up1)
    H2 = np.asarray(H2, dtype=float)
    if H2.shape != (N + 1, 3 * N + 3):
        raise InterpolationError(f"H2 must have shape ({N + 1}, {3 * N + 3}), got {H2.shape}")
    head = virtual_reconstruct(um1, u0, up1)
    data = np.concatenate([as_coeffs(um1), as_coeffs(u0), as_coeffs(up1)], axis=-1)
    return np.concatenate([head, data @ H2.T], axis=-1)
