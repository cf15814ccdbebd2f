"""Update-matrix spectra and Bloch/Floquet dispersion analysis of the 1D
schemes for scalar advection, plus dispersion-relation-preserving (DRP)
tuning of the extended Virtual reconstruction.

The one-step map ``U^{n+1}_m = sum_j S_j U^n_{m+j}`` is read off by stepping
unit impulses on a small periodic grid, so the blocks always agree with the
steppers in :mod:`hermitewave.schemes1d`.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy import optimize

from . import interpolation as interp
from . import schemes1d as s1

log = logging.getLogger(__name__)

# translation-invariance and band-limit tolerance on probed blocks
PROBE_TOL = 1e-13


class AnalysisError(RuntimeError):
    pass


class FloquetAmbiguityError(AnalysisError):
    """Two symbol eigenvectors correlate equally well with the exact Bloch mode."""


@dataclass(frozen=True)
class UpdateBlocks:
    """Banded blocks of the normalized update map."""

    offsets: tuple[int, ...]
    blocks: np.ndarray  # (len(offsets), N+1, N+1)
    kind: str
    N: int
    C: float
    c: float
    h: float
    advance: float  # physical time covered by one application
    precision: int | None = None  # decimal digits when blocks hold mpmath numbers

    def block(self, j: int) -> np.ndarray:
        if j in self.offsets:
            return self.blocks[self.offsets.index(j)]
        return np.zeros((self.N + 1, self.N + 1))

    @property
    def bandwidth(self) -> int:
        return max(abs(j) for j in self.offsets)

    def nonzero_offsets(self, tol: float = 1e-14) -> list[int]:
        return [j for j, B in zip(self.offsets, self.blocks) if np.max(np.abs(B)) > tol]


def normalized_map(kind: str, N: int, C: float, c: float = 1.0, H2=None):
    """Return ``(apply, bandwidth)`` for one normalized update of a grid state.

    Dual is one full two-stage step, Virtual is two steps (``S**2``), Central
    and Upwind are one step; each covers ``C h / |c|`` of physical time.
    """
    cfg = s1.SchemeConfig(kind, N, C, H2=H2)
    pde = s1.Pde1D.advection(c)

    def apply(state):
        dt = s1.max_timestep(cfg, pde, state.grid.h)
        if kind == "virtual":
            state = s1.step_virtual(state, pde, dt, H2)
            return s1.step_virtual(state, pde, dt, H2)
        if kind == "dual":
            return s1.step_dual(state, pde, dt)
        if kind == "central":
            return s1.step_central(state, pde, dt)
        return s1.step_upwind(state, pde, dt)

    band = 2 if kind == "virtual" else 1
    return apply, band


def probe_update_blocks(kind: str, N: int, C: float, c: float = 1.0, h: float = 1.0,
                        H2=None, K: int | None = None) -> UpdateBlocks:
    """Blocks ``S_j`` of the normalized update, probed with unit impulses."""
    if not 0 < C <= 1:
        raise ValueError(f"CFL constant must lie in (0, 1], got {C}")
    apply, band = normalized_map(kind, N, C, c, H2)
    if K is None:
        K = 2 * band + 5
    if K < 2 * band + 3:
        raise ValueError(f"probing needs K >= {2 * band + 3}")
    grid = s1.Grid1D(0.0, K * h, K)
    n = N + 1
    offsets = tuple(range(-band, band + 1))

    def probe(p):
        # response[m] = S_{p-m} e_i, stacked over i
        resp = np.zeros((K, n, n))
        for i in range(n):
            U = np.zeros((K, 1, n))
            U[p, 0, i] = 1.0
            resp[:, :, i] = apply(s1.GridState1D(grid, U)).jets[:, 0, :]
        blocks = np.array([resp[(p - j) % K] for j in offsets])
        far = [m for m in range(K) if (p - m) % K not in [j % K for j in offsets]]
        leak = np.max(np.abs(resp[far])) if far else 0.0
        return blocks, leak

    blocks, leak = probe(band)
    scale = max(1.0, np.max(np.abs(blocks)))
    if leak > PROBE_TOL * scale:
        raise AnalysisError(f"update response is not banded (leak {leak:.3e})")
    again, _ = probe(K - 1 - band)
    if np.max(np.abs(again - blocks)) > PROBE_TOL * scale:
        raise AnalysisError("update response is not translation invariant")
    advance = C * h / abs(c)
    return UpdateBlocks(offsets, blocks, kind, N, C, c, h, advance)


def assemble_global(ub: UpdateBlocks, K: int) -> np.ndarray:
    """Dense block-circulant update matrix of size K(N+1)."""
    if K < 2 * ub.bandwidth + 1:
        raise ValueError(f"need K >= {2 * ub.bandwidth + 1} for a banded assembly")
    n = ub.N + 1
    S = np.zeros((K * n, K * n))
    for m in range(K):
        for j, B in zip(ub.offsets, ub.blocks):
            col = (m + j) % K
            S[m * n:(m + 1) * n, col * n:(col + 1) * n] += B
    return S


def spectrum(S: np.ndarray, check: bool = True) -> np.ndarray:
    """Eigenvalues of a dense matrix, with a residual check ``|Sv - lam v| <= 1e-8 |v|``."""
    lam, V = np.linalg.eig(S)
    if check:
        res = np.linalg.norm(S @ V - V * lam, axis=0) / np.linalg.norm(V, axis=0)
        if np.any(~np.isfinite(res)) or np.max(res) > 1e-8:
            raise AnalysisError(f"eigenvalue residual too large ({np.max(res):.3e})")
    return lam


def spectral_radius(S: np.ndarray) -> float:
    return float(np.max(np.abs(spectrum(S))))


def block_shift_matrix(K: int, n: int, shift: int = 1) -> np.ndarray:
    """Permutation taking node m's block from node m - shift."""
    P = np.zeros((K, K))
    P[np.arange(K), (np.arange(K) - shift) % K] = 1.0
    return np.kron(P, np.eye(n))


def bloch_symbol(ub: UpdateBlocks, kh: float) -> np.ndarray:
    """``sum_j exp(i j kh) S_j``."""
    if ub.precision:
        with mpmath.workdps(ub.precision):
            G = sum(mpmath.expj(j * mpmath.mpf(kh)) * B for j, B in zip(ub.offsets, ub.blocks))
        return G
    ph = np.exp(1j * kh * np.array(ub.offsets))
    return np.einsum("j,jab->ab", ph, ub.blocks)


def bloch_jet(kh: float, N: int) -> np.ndarray:
    """Scaled derivatives of ``exp(i k x)`` about a node, normalized to value 1."""
    j = np.arange(N + 1)
    return (1j * kh) ** j / np.array([math.factorial(int(i)) for i in j])


@dataclass(frozen=True)
class FloquetResult:
    kh: float
    lam: complex
    exact: complex
    error: float


def floquet_error(ub: UpdateBlocks, kh: float, c: float | None = None,
                  dt: float | None = None) -> FloquetResult:
    """Relative error of the physical Floquet multiplier over one normalized update.

    The physical eigenvalue is the one whose eigenvector correlates best with
    the exact Bloch jet.
    """
    c = ub.c if c is None else c
    dt = ub.advance if dt is None else dt
    if ub.precision:
        return _floquet_error_mp(ub, kh, c, dt)
    G = bloch_symbol(ub, kh)
    lam, V = np.linalg.eig(G)
    b = bloch_jet(kh, ub.N)
    corr = np.abs(V.conj().T @ b) / (np.linalg.norm(V, axis=0) * np.linalg.norm(b))
    order = np.argsort(corr)[::-1]
    if len(corr) > 1 and corr[order[0]] - corr[order[1]] < 1e-12:
        raise FloquetAmbiguityError(f"ambiguous physical mode at kh={kh}")
    k = kh / ub.h
    exact = np.exp(-1j * k * c * dt)
    lh = lam[order[0]]
    return FloquetResult(kh, complex(lh), complex(exact), float(abs(lh - exact) / abs(exact)))


def _floquet_error_mp(ub, kh, c, dt):
    with mpmath.workdps(ub.precision):
        kh_ = mpmath.mpf(kh)
        G = bloch_symbol(ub, kh_)
        lam, V = mpmath.eig(mpmath.matrix(G.tolist()))
        n = ub.N + 1
        b = [(1j * kh_) ** j / mpmath.factorial(j) for j in range(n)]
        bn = mpmath.sqrt(sum(abs(x) ** 2 for x in b))
        corr = []
        for i in range(n):
            v = [V[r, i] for r in range(n)]
            vn = mpmath.sqrt(sum(abs(x) ** 2 for x in v))
            corr.append(abs(sum(mpmath.conj(x) * y for x, y in zip(v, b))) / (vn * bn))
        order = sorted(range(n), key=lambda i: corr[i], reverse=True)
        if n > 1 and corr[order[0]] - corr[order[1]] < 1e-12:
            raise FloquetAmbiguityError(f"ambiguous physical mode at kh={kh}")
        exact = mpmath.expj(-kh_ / mpmath.mpf(ub.h) * mpmath.mpf(c) * mpmath.mpf(dt))
        lh = lam[order[0]]
        err = abs(lh - exact) / abs(exact)
        return FloquetResult(float(kh), complex(lh), complex(exact), float(err))


def dispersion_curve(ub: UpdateBlocks, khs) -> np.ndarray:
    """Rows ``(kh, E, Re lam, Im lam)``."""
    rows = []
    for kh in khs:
        r = floquet_error(ub, kh)
        rows.append((kh, r.error, r.lam.real, r.lam.imag))
    return np.array(rows)


def fit_slope(x, y) -> float:
    """Least-squares slope of log y against log x."""
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])



# ---------------------------------------------------------------------------
# algebraic block assembly (independent of the steppers)


class _Arith:
    """Float or mpmath arithmetic on numpy arrays (object dtype for mpmath)."""

    def __init__(self, dps: int | None):
        self.dps = dps

    def num(self, x):
        return mpmath.mpf(x) if self.dps else float(x)

    def zeros(self, shape):
        if self.dps:
            return np.full(shape, mpmath.mpf(0), dtype=object)
        return np.zeros(shape)

    def eye(self, n):
        E = self.zeros((n, n))
        for i in range(n):
            E[i, i] = self.num(1)
        return E

    def inv(self, M):
        if self.dps:
            return np.array(mpmath.inverse(mpmath.matrix(M.tolist())).tolist(), dtype=object)
        return np.linalg.inv(M)

    def constraint(self, zeta, n_derivs, width):
        C = self.zeros((n_derivs, width))
        z = self.num(zeta)
        for m in range(n_derivs):
            for k in range(m, width):
                C[m, k] = math.comb(k, m) * z ** (k - m)
        return C

    def hermite(self, offsets, N):
        n = N + 1
        w = len(offsets) * n
        return self.inv(np.vstack([self.constraint(z, n, w) for z in offsets]))

    def taylor(self, d, dt, c, h, order):
        """Matrix of the truncated exponential of ``-c dt D`` on degree-d jets."""
        L = self.zeros((d + 1, d + 1))
        for i in range(d):
            L[i, i + 1] = -self.num(c) * (i + 1) / self.num(h)
        T = self.eye(d + 1)
        dt = self.num(dt)
        for ell in range(order, 0, -1):
            T = self.eye(d + 1) + (dt / ell) * L.dot(T)
        return T


def _split(M, offsets, n):
    return {j: M[:, i * n:(i + 1) * n] for i, j in enumerate(offsets)}


def _compose(outer: dict, inner: dict) -> dict:
    """Stencil composition: (outer o inner)_k = sum_{i+j=k} outer_i inner_j."""
    out = {}
    for i, A in outer.items():
        for j, B in inner.items():
            out[i + j] = out.get(i + j, 0) + A.dot(B)
    return out


def algebraic_blocks(kind: str, N: int, C: float, c: float = 1.0, h: float = 1.0, H2=None,
                     dps: int | None = None) -> UpdateBlocks:
    """Blocks of the normalized update formed from ``R T H`` products.

    With ``dps`` the arithmetic is carried out in mpmath at that many digits,
    which resolves dispersion errors far below double precision.
    """
    ar = _Arith(dps)
    ctx = mpmath.workdps(dps) if dps else _nullctx()
    with ctx:
        n = N + 1
        frac = 0.5 if kind in ("dual", "virtual") else 1.0
        dt = ar.num(C) * frac * ar.num(h) / abs(ar.num(c))
        d = 2 * N + 1
        if kind == "central":
            RT = ar.taylor(d, dt, c, h, d)[:n]
            step = _split(RT.dot(ar.hermite((-1, 1), N)), (-1, 1), n)
            S = step
        elif kind == "upwind":
            if c < 0:
                raise ValueError("algebraic upwind blocks assume c > 0")
            W = ar.hermite((-1, 0), N)
            W[:n, :] = 0
            for i in range(n):
                W[i, n + i] = ar.num(1)
            RT = ar.taylor(d, dt, c, h, d)[:n]
            S = _split(RT.dot(W), (-1, 0), n)
        elif kind == "dual":
            RT = ar.taylor(d, dt, c, h, d)[:n]
            Hd = ar.hermite((-0.5, 0.5), N)
            to_dual = _split(RT.dot(Hd), (0, 1), n)
            to_primal = _split(RT.dot(Hd), (-1, 0), n)
            S = _compose(to_primal, to_dual)
        elif kind == "virtual":
            Hd = ar.hermite((-0.5, 0.5), N)
            RH = Hd[:n]
            B = ar.zeros((2 * n, 3 * n))
            B[:n, :2 * n] = RH
            B[n:, n:] = RH
            F = Hd.dot(B)
            order = d
            if H2 is not None:
                H2 = np.asarray(H2, dtype=float)
                F = np.vstack([F, np.vectorize(ar.num, otypes=[object if dps else float])(H2)])
                d = 3 * N + 2
                order = d
            RT = ar.taylor(d, dt, c, h, order)[:n]
            one = _split(RT.dot(F), (-1, 0, 1), n)
            S = _compose(one, one)
        else:
            raise ValueError(f"unknown scheme {kind!r}")
        band = max(abs(j) for j in S)
        offsets = tuple(range(-band, band + 1))
        blocks = [S.get(j, ar.zeros((n, n))) for j in offsets]
        blocks = np.array(blocks, dtype=object) if dps else np.array(blocks, dtype=float)
        advance = C * h / abs(c)
    return UpdateBlocks(offsets, blocks, kind, N, C, c, h, advance, precision=dps)


class _nullctx:
    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False


# ---------------------------------------------------------------------------
# DRP tuning of the extended Virtual reconstruction


def drp_samples(K_coarse: int, C: float, c: float = 1.0) -> np.ndarray:
    """``kh = 2 pi m / K`` for ``m = 1..K/2``, minus points where the exact
    multiplier has a (nearly) vanishing real or imaginary part."""
    m = np.arange(1, K_coarse // 2 + 1)
    kh = 2 * np.pi * m / K_coarse
    ex = np.exp(-1j * kh * C * np.sign(c))
    keep = (np.abs(ex.real) >= 1e-3) & (np.abs(ex.imag) >= 1e-3)
    return kh[keep]


def drp_objective(H2, N: int, C: float, khs, c: float = 1.0) -> float:
    """Sum over ``khs`` of the squared relative errors in the real and
    imaginary parts of the normalized Virtual multiplier."""
    ub = algebraic_blocks("virtual", N, C, c, H2=H2)
    total = 0.0
    for kh in khs:
        try:
            r = floquet_error(ub, kh)
        except FloquetAmbiguityError:
            return float("inf")
        diff = r.lam - r.exact
        total += (diff.real / r.exact.real) ** 2 + (diff.imag / r.exact.imag) ** 2
    return float(total)


@dataclass
class DrpResult:
    H2: np.ndarray
    H2_init: np.ndarray
    N: int
    C: float
    kh_samples: np.ndarray
    objective: float
    objective_init: float
    iterations: int
    converged: bool
    spectral_radius: float | None = None


def drp_optimize(N: int = 1, C: float = 0.9, c: float = 1.0, K_coarse: int = 8, khs=None,
                 H2_init=None, maxiter: int = 20000, stall: int = 200,
                 K_check: int | None = 16) -> DrpResult:
    """Tune ``H2`` with Nelder-Mead, starting from the three-point interpolation tail rows.

    Stops early with a warning when the best objective has not improved for
    ``stall`` iterations.  The spectral radius of the tuned update on
    ``K_check`` nodes is reported but not constrained.
    """
    if N < 1:
        raise ValueError("DRP tuning needs N >= 1")
    khs = drp_samples(K_coarse, C, c) if khs is None else np.asarray(khs, dtype=float)
    if khs.size == 0:
        raise ValueError("empty wavenumber sample set")
    H0 = interp.default_h2(N) if H2_init is None else np.asarray(H2_init, dtype=float)
    shape = H0.shape

    def fun(x):
        return drp_objective(x.reshape(shape), N, C, khs, c)

    f0 = fun(H0.ravel())
    best = {"f": f0, "x": H0.ravel().copy(), "since": 0, "it": 0}

    def callback(xk):
        best["it"] += 1
        fk = fun(xk)
        if fk < best["f"] * (1 - 1e-12):
            best.update(f=fk, x=xk.copy(), since=0)
        else:
            best["since"] += 1
        if best["since"] >= stall:
            raise StopIteration

    converged = True
    if maxiter > 0:
        res = optimize.minimize(fun, H0.ravel(), method="Nelder-Mead", callback=callback,
                                options={"maxiter": maxiter, "xatol": 1e-10, "fatol": 1e-14,
                                         "adaptive": True})
        if res.fun < best["f"]:
            best.update(f=float(res.fun), x=res.x.copy())
        stalled = best["since"] >= stall
        converged = bool(res.success) and not stalled
        if stalled:
            warnings.warn(f"DRP optimizer stalled after {best['it']} iterations; "
                          "returning the best point found", RuntimeWarning, stacklevel=2)
    H2 = best["x"].reshape(shape)
    log.info("DRP objective %.3e -> %.3e in %d iterations", f0, best["f"], best["it"])
    result = DrpResult(H2, H0, N, C, khs, best["f"], f0, best["it"], converged)
    if K_check:
        ub = probe_update_blocks("virtual", N, C, c, H2=H2)
        result.spectral_radius = spectral_radius(assemble_global(ub, K_check))
    return result
