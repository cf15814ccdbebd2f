"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line; the lines are printed at the end of the
pytest run (see conftest.py) and by ``python tests/test_acceptance.py``.
Reference rates are the published convergence tables.
"""
import functools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hermitewave import analysis as A
from hermitewave import harness as H
from hermitewave import interpolation as I
from hermitewave import schemes1d as S

RESULTS = {}

SCHEMES = ("dual", "virtual", "central", "upwind")
NS = (1, 2, 3)
CS = (0.1, 0.5, 0.9)

# rows: scheme; columns: (C, N) in the order C=.1 N=1..3, C=.5 ..., C=.9 ...
TABLE_1D = {
    "dual": (2.72, 4.99, 7.02, 2.93, 5.0, 6.98, 3.02, 5.02, 7.01),
    "virtual": (2.67, 5.0, 7.00, 2.96, 5.0, 7.02, 2.99, 5.01, 7.07),
    "central": (1.71, 4.94, 7.06, 2.62, 4.98, 6.92, 2.92, 4.98, 6.99),
    "upwind": (2.94, 4.99, 6.98, 2.96, 5.0, 7.02, 3.02, 5.03, 7.03),
}
TABLE_ADVECTION_2D = {
    "dual": (2.90, 5.00, 7.01, 2.97, 5.02, 7.02, 3.05, 5.15, 7.00),
    "virtual": (2.83, 5.00, 7.01, 2.95, 5.02, 7.03, 3.04, 5.04, 7.06),
    "central": (2.43, 4.96, 7.03, 2.79, 5.00, 7.04, 2.95, 5.08, 7.04),
    "upwind": (2.96, 4.98, 6.99, 2.98, 5.02, 7.01, 3.07, 5.14, 7.14),
}
TABLE_WAVE_2D = {
    "dual": (2.86, 4.93, 6.79, 2.84, 4.73, 6.92, 2.91, 4.77, 7.02),
    "virtual": (2.85, 4.93, 6.84, 2.75, 4.96, 7.03, 2.82, 5.07, 6.83),
    "central": (2.51, 4.71, 6.05, 2.56, 4.22, 6.82, 3.05, 4.95, 6.84),
}


def reference(table, scheme, N, C):
    return table[scheme][CS.index(C) * 3 + N - 1]


def record(key, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {key}: {detail}"
    RESULTS[key] = line
    print(line)
    return ok


def rate_sweep(equation, schemes, Ks, T):
    out = {}
    for scheme in schemes:
        for N in NS:
            for C in CS:
                rep = H.converge(H.ExperimentConfig(equation=equation, scheme=scheme, N=N, C=C, K=Ks, T=T))
                out[scheme, N, C] = rep.fitted
    return out


def compare(table, rates, tol):
    worst = max(rates, key=lambda k: abs(rates[k] - reference(table, *k)))
    dev = abs(rates[worst] - reference(table, *worst))
    bad = [k for k in rates if abs(rates[k] - reference(table, *k)) > tol]
    return bad, worst, dev


def describe(bad, worst, dev, rates, table):
    s, N, C = worst
    text = f"worst {s} N={N} C={C}: {rates[worst]:.2f} vs {reference(table, *worst):.2f} (|d|={dev:.2f})"
    if bad:
        text += "; outside tolerance: " + ", ".join(
            f"{s}/N={N}/C={C} {rates[s, N, C]:.2f} vs {reference(table, s, N, C):.2f}" for s, N, C in bad)
    return text


# ---------------------------------------------------------------------------
# 1. one-dimensional rates


@functools.lru_cache(maxsize=None)
def sweep_1d(Ks):
    return rate_sweep("advection1d", SCHEMES, Ks, 10.0)


def test_c01_table_rates_1d_literal_grids():
    """Grids 16, 32, 64 as listed in the criterion."""
    rates = sweep_1d((16, 32, 64))
    bad, worst, dev = compare(TABLE_1D, rates, 0.35)
    ok = record("1  1D rates, K=16/32/64 (+-0.35)", not bad, describe(bad, worst, dev, rates, TABLE_1D))
    assert ok


def test_c01b_table_rates_1d_coarse_grids():
    """Grids 8, 16, 32: the refinement the published rates are consistent with."""
    rates = sweep_1d((8, 16, 32))
    bad, worst, dev = compare(TABLE_1D, rates, 0.35)
    ok = record("1b 1D rates, K=8/16/32 (+-0.35)", not bad, describe(bad, worst, dev, rates, TABLE_1D))
    assert ok


# ---------------------------------------------------------------------------
# 2, 3. two-dimensional rates


def test_c02_table_rates_2d_advection():
    rates = rate_sweep("advection2d", SCHEMES, (8, 16, 32), 1.0)
    bad, worst, dev = compare(TABLE_ADVECTION_2D, rates, 0.35)
    ok = record("2  2D advection rates (+-0.35)", not bad, describe(bad, worst, dev, rates, TABLE_ADVECTION_2D))
    assert ok


def test_c03_table_rates_2d_wave():
    rates = rate_sweep("wave2d", ("dual", "virtual", "central"), (8, 16, 32), 1.0)
    bad, worst, dev = compare(TABLE_WAVE_2D, rates, 0.45)
    ok = record("3  2D wave rates (+-0.45)", not bad, describe(bad, worst, dev, rates, TABLE_WAVE_2D))
    assert ok


# ---------------------------------------------------------------------------
# 4. Gaussian pulse after five periods


def test_c04_gaussian_pulse():
    quotes = {("dual", 8): 0.0839913, ("central", 16): 0.0841903}
    errs = {}
    for (scheme, K) in quotes:
        for C in CS:
            cfg = H.ExperimentConfig(scheme=scheme, N=2, K=(K,), C=C, T=10.0, solution="gaussian1d",
                                     policy="uniform")
            errs[scheme, K, C] = H.simulate(cfg)[0]
    hits = {}
    for (scheme, K), q in quotes.items():
        rel = {C: abs(errs[scheme, K, C] / q - 1) for C in CS}
        hits[scheme] = min(rel, key=rel.get), min(rel.values())
    equiv = min(abs(errs["central", 16, C] / errs["dual", 8, C] - 1) for C in CS)
    ok = all(r <= 0.02 for _, r in hits.values()) and equiv <= 0.05
    detail = (f"Dual K=8 best C={hits['dual'][0]} off {hits['dual'][1]:.2%}; "
              f"Central K=16 best C={hits['central'][0]} off {hits['central'][1]:.2%}; "
              f"Central(16)/Dual(8) within {equiv:.2%}")
    record("4  Gaussian pulse quotes (2%, 5%)", ok, detail)
    assert ok


# ---------------------------------------------------------------------------
# 5, 6. update-matrix spectra


def test_c05_unit_cfl_is_circulant_shift():
    worst = 0.0
    for kind in ("dual", "central", "upwind"):
        for N in NS:
            ub = A.probe_update_blocks(kind, N, 1.0)
            Sg = A.assemble_global(ub, 16)
            worst = max(worst, np.abs(Sg - A.block_shift_matrix(16, N + 1, 1)).max())
    ok = record("5  C=1 update equals block shift (1e-12)", worst <= 1e-12, f"max deviation {worst:.2e}")
    assert ok


def test_c06_stability():
    worst = 0.0
    for kind in SCHEMES:
        for N in NS:
            for C in CS:
                rho = A.spectral_radius(A.assemble_global(A.probe_update_blocks(kind, N, C), 16))
                worst = max(worst, rho - 1)
    ok = record("6  spectral radius <= 1+1e-10", worst <= 1e-10, f"max rho-1 = {worst:.2e}")
    assert ok


# ---------------------------------------------------------------------------
# 7. dispersion scaling and ordering


def test_c07_dispersion_scaling():
    khs = np.geomspace(0.05, 0.5, 12)
    slope_dev = 0.0
    order_bad = []
    for C in CS:
        for N in NS:
            E = {}
            for kind in SCHEMES:
                ub = A.algebraic_blocks(kind, N, C, dps=40)
                E[kind] = np.array([A.floquet_error(ub, kh).error for kh in khs])
                slope_dev = max(slope_dev, abs(A.fit_slope(khs, E[kind]) - (2 * N + 2)))
            for i, kh in enumerate(khs):
                vals = {k: E[k][i] for k in SCHEMES}
                top, low = max(vals, key=vals.get), min(vals, key=vals.get)
                if top != "central" or low != "upwind":
                    order_bad.append(f"C={C} N={N} kh={kh:.3f} largest={top} smallest={low} "
                                     f"(upwind/{low} = {vals['upwind'] / vals[low]:.4f})")
    ok = slope_dev <= 0.4 and not order_bad
    detail = f"max |slope-(2N+2)| = {slope_dev:.3f}; ordering violations: {'; '.join(order_bad) or 'none'}"
    record("7  dispersion slope 2N+2 (+-0.4), Central largest, Upwind smallest", ok, detail)
    assert ok


# ---------------------------------------------------------------------------
# 8, 9. equivalences and exactness


_dev8 = []


@settings(max_examples=100, deadline=None, derandomize=True)
@given(st.integers(0, 4), st.integers(3, 12), st.floats(0.0, 1.0), st.data())
def _virtual_vs_dual(N, K, C, data):
    U = data.draw(arrays(float, (K, 1, N + 1), elements=st.floats(-10, 10)))
    s = S.GridState1D(S.Grid1D(-1, 1, K), U)
    dt = C * s.grid.h / 2
    pde = S.Pde1D.advection(1.0)
    a = S.step_virtual(s, pde, dt)
    b = S.step_dual(s, pde, dt, dt_dual=0.0)
    _dev8.append(np.abs(a.jets - b.jets).max())


def test_c08_virtual_is_dual_with_zero_step():
    _dev8.clear()
    _virtual_vs_dual()
    worst = max(_dev8)
    ok = record("8  Virtual == Dual with zero staggered step (1e-14)", worst <= 1e-14,
                f"{len(_dev8)} trials, max deviation {worst:.1e}")
    assert ok


def _poly_jet(coef, center, N):
    p = np.polynomial.Polynomial(coef)(np.polynomial.Polynomial([center, 1.0]))
    out = np.zeros(N + 1)
    c = p.coef[: N + 1]
    out[: c.size] = c
    return out


_rel9 = []


@settings(max_examples=200, deadline=None, derandomize=True)
@given(st.integers(0, 5), st.data())
def _exactness(N, data):
    coef = data.draw(arrays(float, 2 * N + 2, elements=st.floats(-1, 1)))
    coef[-1] = data.draw(st.sampled_from([-1.0, 1.0]))
    j = lambda z: _poly_jet(coef, z, N)  # noqa: E731
    exact = _poly_jet(coef, 0, 2 * N + 1)
    outs = [
        I.hermite_matrix(-0.5, 0.5, N)(j(-0.5), j(0.5)),
        I.central_reconstruct(j(-1), j(1)),
        I.upwind_reconstruct(j(-1), j(0)),
        I.upwind_reconstruct(j(1), j(0), downwind=True),
        I.virtual_reconstruct(j(-1), j(0), j(1)),
    ]
    # the extended reconstruction is exact to degree 3N+2 in its tail
    c3 = data.draw(arrays(float, 3 * N + 3, elements=st.floats(-1, 1)))
    ext = I.extended_reconstruct(*(_poly_jet(c3, z, N) for z in (-1, 0, 1)), I.default_h2(N))
    tail = _poly_jet(c3, 0, 3 * N + 2)[2 * N + 2:]
    scale = np.abs(exact).max()
    rel = max(np.abs(o - exact).max() for o in outs) / scale
    rel = max(rel, np.abs(ext[2 * N + 2:] - tail).max() / max(np.abs(tail).max(), np.abs(c3).max(), 1e-300))
    _rel9.append(rel)


def test_c09_interpolation_exactness():
    _rel9.clear()
    _exactness()
    worst = max(_rel9)
    ok = record("9  reconstruction exactness, N=0..5 (rel 1e-10)", worst <= 1e-10,
                f"{len(_rel9)} trials, max relative error {worst:.1e}")
    assert ok


# ---------------------------------------------------------------------------
# 10. dispersion-relation-preserving tuning


@functools.lru_cache(maxsize=None)
def drp():
    res = A.drp_optimize(N=1, C=0.9, c=1.0, K_coarse=8, K_check=16)
    before = A.probe_update_blocks("virtual", 1, 0.9, H2=None)
    after = A.probe_update_blocks("virtual", 1, 0.9, H2=res.H2)
    return res, before, after


def _drp_compare(khs):
    res, before, after = drp()
    rows = [(kh, A.floquet_error(before, kh).error, A.floquet_error(after, kh).error) for kh in khs]
    worse = [(round(kh, 4), b, a) for kh, b, a in rows if not a < b]
    return res, rows, worse


def test_c10_drp_all_fine_grid_wavenumbers():
    khs = 2 * np.pi * np.arange(1, 9) / 16
    khs = khs[khs <= np.pi / 2 + 1e-12]
    res, rows, worse = _drp_compare(khs)
    rho_ok = res.spectral_radius <= 1.01
    detail = (f"rho={res.spectral_radius:.5f}; objective {res.objective_init:.2e} -> {res.objective:.2e}; "
              + "; ".join(f"kh={kh:.3f}: {b:.2e} -> {a:.2e}" for kh, b, a in rows))
    ok = record("10 DRP: tuned < untuned at every K=16 kh <= pi/2, rho <= 1.01", rho_ok and not worse, detail)
    assert ok


def test_c10b_drp_at_tuning_wavenumbers():
    khs = A.drp_samples(8, 0.9)
    khs = khs[khs <= np.pi / 2 + 1e-12]
    res, rows, worse = _drp_compare(khs)
    ok = res.spectral_radius <= 1.01 and not worse
    detail = f"rho={res.spectral_radius:.5f}; " + "; ".join(f"kh={kh:.3f}: {b:.2e} -> {a:.2e}" for kh, b, a in rows)
    record("10b DRP: tuned < untuned at the K=8 tuning kh <= pi/2, rho <= 1.01", ok, detail)
    assert ok


# ---------------------------------------------------------------------------
# 11. error growth in time


def test_c11_linear_error_growth():
    per_scheme = {}
    for scheme in SCHEMES:
        for C in (0.1, 0.5):
            a = H.simulate(H.ExperimentConfig(scheme=scheme, N=3, K=(16,), C=C, T=1.0))[0]
            b = H.simulate(H.ExperimentConfig(scheme=scheme, N=3, K=(16,), C=C, T=10.0))[0]
            per_scheme[scheme, C] = b / a
    worst = max(per_scheme, key=per_scheme.get)
    ok = max(per_scheme.values()) <= 20
    record("11 error(T=10) <= 20 x error(T=1), N=3 K=16", ok,
           f"worst {worst[0]} C={worst[1]}: ratio {per_scheme[worst]:.2f}")
    assert ok


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
