import math

import numpy as np
import pytest

from hermitewave import harness as H
from hermitewave import schemes1d as S
from hermitewave import schemes2d as S2
from hermitewave.norms import cell_polynomials, l2_error_1d


def test_sine_projection():
    g = S.Grid1D(-1, 1, 16)  # h = 0.125, node 12 sits at x = 0.5
    s = H.project_initial_condition("sine1d", g, 2)
    assert g.nodes[12] == 0.5
    assert np.allclose(s.jets[12, 0], [1, 0, -math.pi ** 2 * 0.125 ** 2 / 2], atol=1e-15)


def richardson_derivatives(f, x0, h):
    """Second-order central differences with one Richardson step (oracle)."""
    def d1(s):
        return (f(x0 + s) - f(x0 - s)) / (2 * s)

    def d2(s):
        return (f(x0 + s) - 2 * f(x0) + f(x0 - s)) / s ** 2

    s = 1e-3
    return (4 * d1(s / 2) - d1(s)) / 3, (4 * d2(s / 2) - d2(s)) / 3


def test_gaussian_projection_against_finite_differences():
    g = S.Grid1D(-1, 1, 16)
    s = H.project_initial_condition("gaussian1d", g, 2)
    m = 8  # x = 0
    f = lambda x: math.exp(-4 * math.sin(math.pi * x) ** 2)  # noqa: E731
    du, d2u = richardson_derivatives(f, 0.0, 1e-3)
    h = g.h
    assert np.allclose(s.jets[m, 0], [1.0, du * h, d2u * h * h / 2], atol=1e-7)
    assert s.jets[m, 0, 2] == pytest.approx(-4 * math.pi ** 2 * h ** 2, rel=1e-12)


def test_standing_wave_velocities_vanish():
    s = H.project_initial_condition("standing-wave2d", S2.Grid2D.square(-1, 1, 4), 2)
    assert not s.jets[:, :, 1:].any()


def test_projection_errors():
    with pytest.raises(KeyError):
        H.project_initial_condition("square-wave", S.Grid1D(-1, 1, 4), 1)
    with pytest.raises(ValueError):
        H.project_initial_condition("sine2d", S.Grid1D(-1, 1, 4), 1)


def test_norm_of_zero_state_against_sine():
    g = S.Grid1D(-1, 1, 16)
    zero = S.GridState1D(g, np.zeros((16, 1, 4)))
    assert H.l2_error(zero, "sine1d", 0.0) == pytest.approx(1.0, abs=1e-12)


def test_norm_vanishes_on_represented_functions():
    g = S.Grid1D(-1, 1, 8)
    U = np.zeros((8, 1, 3))
    U[:, 0, 0] = 0.75
    assert l2_error_1d(S.GridState1D(g, U), lambda x, t: 0.75 + 0 * x) <= 1e-14


def test_cell_polynomials_reproduce_cubics():
    g = S.Grid1D(-1, 1, 8)
    poly = lambda x: 0.5 * x ** 3 - x  # noqa: E731
    U = np.array([[poly(x), (1.5 * x ** 2 - 1) * g.h, 1.5 * x * g.h ** 2, 0.5 * g.h ** 3] for x in g.nodes])
    P = cell_polynomials(U, 3)
    xi = np.linspace(0, 1, 7)
    # the last cell straddles the periodic seam, where the cubic is not periodic
    for m in range(g.K - 1):
        vals = np.polynomial.polynomial.polyval(xi, P[m])
        assert np.allclose(vals, poly(g.nodes[m] + g.h * xi), atol=1e-14)


def test_rates():
    assert H.pairwise_rates([1e-2, 1.25e-3]) == pytest.approx([3.0])
    assert H.fitted_rate([8, 16, 32], [1.0, 2.0 ** -5, 2.0 ** -10]) == pytest.approx(5.0)


def test_config_validation():
    with pytest.raises(ValueError):
        H.ExperimentConfig(scheme="bogus")
    with pytest.raises(ValueError):
        H.ExperimentConfig(equation="wave2d", scheme="upwind")
    with pytest.raises(ValueError):
        H.ExperimentConfig(equation="advection2d", solution="sine1d")
    with pytest.raises(ValueError):
        H.ExperimentConfig(C=0)
    assert H.ExperimentConfig(equation="wave2d").solution == "standing-wave2d"


def test_converge_requires_doubling():
    with pytest.raises(ValueError):
        H.converge(H.ExperimentConfig(K=(8, 12)))
    with pytest.raises(ValueError):
        H.converge(H.ExperimentConfig(K=(8,)))


def test_converge_small_sweep():
    rep = H.converge(H.ExperimentConfig(scheme="central", N=2, C=0.5, K=(8, 16, 32), T=2.0))
    assert len(rep.errors) == 3 and rep.errors[0] > rep.errors[1] > rep.errors[2]
    assert rep.rows()[0][-1] is None
    assert rep.fitted == pytest.approx(np.mean(rep.rates), abs=1e-12)


def test_simulate_trace_lands_on_final_time():
    cfg = H.ExperimentConfig(scheme="dual", N=1, K=(8,), T=0.7, C=0.9)
    err, trace = H.simulate(cfg, trace=True)
    assert trace[-1][1] == 0.7 and trace[-1][2] == pytest.approx(err)


def test_csv_is_deterministic_and_sorted():
    reps = [H.ErrorReport(2, 0.5, (16, 8), [1e-3, 2e-3], [0.5]), H.ErrorReport(1, 0.9, (8,), [0.1])]
    rows = H.convergence_rows(reps)
    assert [r[:3] for r in rows] == [(8, 1, 0.9), (8, 2, 0.5), (16, 2, 0.5)]
    a = H.csv_text(H.CONVERGENCE_HEADER, rows)
    assert a == H.csv_text(H.CONVERGENCE_HEADER, H.convergence_rows(reps))
    assert a.splitlines()[0] == "K,N,C,error,rate"


def test_converge_reruns_bit_identically():
    cfg = H.ExperimentConfig(scheme="virtual", N=1, C=0.5, K=(8, 16), T=0.5)
    a = H.csv_text(H.CONVERGENCE_HEADER, H.converge(cfg).rows())
    b = H.csv_text(H.CONVERGENCE_HEADER, H.converge(cfg).rows())
    assert a == b


def _central_over_dual(N, C, K=16, T=2.0):
    d, _ = H.simulate(H.ExperimentConfig(scheme="dual", N=N, C=C, K=(K,), T=T))
    c, _ = H.simulate(H.ExperimentConfig(scheme="central", N=N, C=C, K=(K,), T=T))
    return c / d


@pytest.mark.parametrize("N", [2, 3])
@pytest.mark.parametrize("C", [0.5, 0.9])
def test_central_to_dual_ratio_follows_interval_width(N, C):
    # Central on K nodes uses Dual's interval at K/2, so the ratio is 2**(2N+1)
    r = _central_over_dual(N, C)
    assert 2 ** (2 * N) <= r <= 2 ** (2 * N + 2)


@pytest.mark.xfail(strict=True, reason="measured ratio is about 2**(2N+1); see the decisions ledger")
@pytest.mark.parametrize("N", [2, 3])
def test_central_to_dual_ratio_near_two_to_the_n(N):
    assert 2 ** (N - 1) <= _central_over_dual(N, 0.9) <= 2 ** (N + 1)
