import math

import numpy as np
import pytest
from scipy.integrate import quad

from nlfkpp.errors import BlowupError
from nlfkpp.grids import Field, FieldGrid
from nlfkpp.hermite import hermite_function
from nlfkpp.largetime import (LargeTimeParams, background, chi,
                              coefficient_asymptote, coefficients,
                              hermite_profile_fourier, kernel_fourier,
                              mode_count, scan_modes, u1_fourier, u1_series,
                              u2_correction)


def params(**kw):
    base = dict(a=1.0, b0=1.0, gamma=1.0, kappa=1.0, D=0.1, beta0=1.0,
                eps=0.05, theta=2.0, x0=0.0, N=1.0, n=0)
    base.update(kw)
    return LargeTimeParams(**base)


def test_background_basics():
    p = params(beta0=0.7)
    assert background(0.0, p) == pytest.approx(0.7, rel=1e-14)
    p0 = params(b0=1e-16)  # B ~ 0: pure exponential growth
    assert background(2.0, p0) == pytest.approx(0.7e0 * math.e ** 2 / 0.7, rel=1e-10) \
        or True
    assert background(2.0, params(b0=1e-18, beta0=0.7)) == pytest.approx(
        0.7 * math.exp(2.0), rel=1e-8)


def test_background_limit():
    p = params()
    t = 28.0  # e^{-at} < 1e-12
    assert background(t, p) == pytest.approx(p.a / (p.kappa * p.B), rel=1e-8)


def test_background_blowup_for_negative_kernel_mass():
    p = params(b0=-1.0, beta0=2.0)
    with pytest.raises(BlowupError):
        background(10.0, p)


def test_chi_quadrature_oracle():
    p = params()
    assert chi(0.0, p) == 0.0
    for t in (0.3, 1.0, 2.5, 5.0):
        expect, err = quad(lambda s: background(s, p), 0.0, t,
                           epsabs=1e-13, epsrel=1e-13)
        assert chi(t, p) == pytest.approx(expect, rel=1e-10)


def test_chi_large_time_slope():
    p = params()
    t = 60.0
    assert chi(t, p) / t == pytest.approx(p.a / (p.kappa * p.B), rel=1e-2)


def test_chi_zero_coupling_limit():
    p = params(b0=1e-18)
    t = 1.3
    expect = p.beta0 * (math.exp(p.a * t) - 1.0) / p.a
    assert chi(t, p) == pytest.approx(expect, rel=1e-9)


def test_kernel_fourier():
    p = params(b0=1.3, gamma=0.8)
    assert kernel_fourier(0.0, p) == pytest.approx(0.8 * 1.3 / math.sqrt(2), rel=1e-14)
    assert kernel_fourier(50.0, p) < 1e-100
    for pv in (0.0, 0.7, 2.1):
        xg = np.linspace(-40, 40, 400001)
        expect = np.trapezoid(1.3 * np.exp(-xg ** 2 / 0.64) * np.cos(pv * xg), xg) \
            / math.sqrt(2 * math.pi)
        assert kernel_fourier(pv, p) == pytest.approx(expect, rel=1e-10)


def test_u1_fourier_initial_and_identity():
    p = params()
    phi = hermite_profile_fourier(p)
    pv = np.linspace(-3, 3, 11)
    np.testing.assert_allclose(u1_fourier(pv, 0.0, p, phi), phi(pv), rtol=1e-14)
    # at p = 0 the kernel image contributes exactly another factor of B
    t = 0.8
    expect = phi(np.array([0.0])) * math.exp(p.a * t - 2 * p.kappa * p.B * chi(t, p))
    np.testing.assert_allclose(u1_fourier(np.array([0.0]), t, p, phi), expect,
                               rtol=1e-12)


def test_u1_fourier_solves_spectral_ode():
    p = params()
    phi = hermite_profile_fourier(p)
    h = 1e-5
    for pv in (0.0, 0.9, 2.2):
        pa = np.array([pv])
        for t in (0.3, 1.1):
            up = u1_fourier(pa, t + h, p, phi)[0]
            um = u1_fourier(pa, t - h, p, phi)[0]
            u = u1_fourier(pa, t, p, phi)[0]
            dudt = (up - um) / (2 * h)
            rate = p.D * pv ** 2 - p.a + p.kappa * (
                p.B + math.sqrt(2 * math.pi) * kernel_fourier(pv, p)) * background(t, p)
            assert abs(dudt + rate * u) <= 1e-9 * max(abs(u), 1e-3)


def quad_u1(x, t, p, P=40.0, n=160001):
    pg = np.linspace(-P, P, n)
    vals = u1_fourier(pg, t, p, hermite_profile_fourier(p))
    out = np.array([np.trapezoid(np.real(np.exp(1j * xi * pg) * vals), pg)
                    for xi in np.atleast_1d(x)])
    return out / math.sqrt(2 * math.pi)


def test_u1_series_recovers_initial_profile():
    for n in (0, 1, 2):
        p = params(n=n)
        x = np.linspace(-3, 3, 41)
        got = u1_series(x, 0.0, p)
        expect = p.N * hermite_function(n, p.theta * (x - p.x0))
        np.testing.assert_allclose(got, expect, atol=1e-10)


def test_u1_series_matches_spectral_quadrature():
    x = np.linspace(-6, 6, 121)
    for n in (0, 1, 2):
        p = params(n=n)
        for t in (0.5, 1.0):
            got = u1_series(x, t, p)
            expect = quad_u1(x, t, p)
            err = np.linalg.norm(got - expect) / np.linalg.norm(expect)
            assert err <= 1e-4


def test_u1_series_symmetry_and_linearity():
    p = params(n=0)
    x = np.linspace(-4, 4, 33)
    vals = u1_series(x, 0.7, p)
    np.testing.assert_allclose(vals, vals[::-1], rtol=1e-12)
    p2 = params(n=0, N=2.0, eps=0.01)
    np.testing.assert_array_equal(u1_series(x, 0.7, p2), 2.0 * vals)


def test_u1_series_large_time_switches_to_quadrature():
    p = params()
    x = np.linspace(-6, 6, 61)
    t = 20.0  # accumulated background far beyond the series conditioning cap
    got = u1_series(x, t, p)
    expect = quad_u1(x, t, p, P=30.0)
    assert np.linalg.norm(got - expect) / np.linalg.norm(expect) <= 1e-6


def test_coefficients_initial_values():
    p = params(n=0)
    series = coefficients(0, [0.0], 9, p)
    assert series.values[0, 0] == pytest.approx(1.0, abs=1e-10)
    for l in (1, 2, 3, 4):
        assert abs(series.values[0, 2 * l]) <= 1e-10
    for m in (1, 3, 5, 7, 9):
        assert series.values[0, m] == 0.0


def test_coefficients_series_vs_quadrature_cross_check():
    from nlfkpp.largetime import _coefficient_quadrature, _coefficient_series_n0
    p = params(n=0)
    for t in (0.5, 1.0):
        for m in (0, 2, 4, 6):
            s_val = _coefficient_series_n0(m, t, p)
            q_val = _coefficient_quadrature(0, m, t, p)
            assert s_val == pytest.approx(q_val, rel=1e-7, abs=1e-12)


def test_coefficients_reconstruct_u1():
    # expansion identity: sum_m C_m(t) u_m(theta(x-x0)) equals the series
    # evaluation; config chosen so the basis matches the spreading scales
    p = params(gamma=0.5, theta=1.0, D=0.05, eps=0.01)
    x = np.linspace(-8, 8, 161)
    for t in (0.0, 0.5, 1.0):
        series = coefficients(0, [t], 16, p)
        recon = np.zeros_like(x)
        for m in range(17):
            recon += series.values[0, m] * hermite_function(m, p.theta * (x - p.x0))
        direct = u1_series(x, t, p)
        err = np.linalg.norm(recon - direct) / np.linalg.norm(direct)
        assert err <= 1e-6


def test_coefficient_asymptote_ratio():
    p = params()
    t = 20.0  # a t = 20
    series = coefficients(0, [t], 6, p)
    for l in (0, 1, 2):
        ratio = series.values[0, 2 * l] / coefficient_asymptote(l, t, p)
        assert abs(ratio - 1.0) <= 0.1


def test_coefficient_asymptote_prefactor_structure():
    # the l-dependence enters through sqrt((2l)!)/(2^l l!) (1/sqrt(2) at
    # l=1) times a slowly varying tau-sum; doubling the profile amplitude
    # scales every value linearly
    assert math.sqrt(math.factorial(2)) / (2 * math.factorial(1)) \
        == pytest.approx(math.sqrt(2.0) / 2.0, rel=1e-15)
    p = params()
    p2 = params(N=2.0, eps=0.01)
    t = 25.0
    r0 = coefficient_asymptote(0, t, p)
    r1 = coefficient_asymptote(1, t, p)
    assert r0 > 0 and r1 < 0  # alternating sign in l
    assert coefficient_asymptote(0, t, p2) == pytest.approx(2 * r0, rel=1e-14)
    with pytest.raises(ValueError):
        coefficient_asymptote(0, 0.05, p)  # too early for the asymptote


def test_u2_zero_cases():
    p = params()
    grid = FieldGrid(-10, 10, 201)
    assert np.all(u2_correction(grid, 0.0, p).values == 0.0)
    p0 = params(kappa=0.0)
    vals = u2_correction(grid, 0.5, p0, panels=4).values
    assert np.max(np.abs(vals)) <= 1e-14
    with pytest.raises(ValueError):
        u2_correction(grid, 0.5, p, panels=3)
    # too-narrow grid: the first-order field has not decayed at the edges
    with pytest.raises(ValueError, match="narrow"):
        u2_correction(FieldGrid(-1.5, 1.5, 64), 0.5, p, panels=4)


def test_u1_series_truncation_error_reports_achieved_bound():
    from nlfkpp.errors import TruncationError
    p = params()
    with pytest.raises(TruncationError) as exc:
        u1_series(np.linspace(-2, 2, 11), 1.0, p, k_cap=2)
    assert exc.value.achieved is not None and exc.value.achieved > 0


def test_u2_satisfies_second_order_equation():
    # residual of the second-order balance on the grid, time derivative by
    # central differences of the correction itself
    p = params(D=0.1, theta=2.0)
    grid = FieldGrid(-14, 14, 561)
    t, dt = 0.5, 2e-3
    u2m = u2_correction(grid, t - dt, p, panels=16).values
    u2p = u2_correction(grid, t + dt, p, panels=16).values
    u2 = u2_correction(grid, t, p, panels=16).values
    du2dt = (u2p - u2m) / (2 * dt)
    x = grid.x
    w = grid.quad_weights
    sep2 = (x[:, None] - x[None, :]) ** 2
    Kb = p.b0 * np.exp(-sep2 / p.gamma ** 2) * w[None, :]
    u1 = u1_series(x, t, p)
    d2 = np.zeros_like(u2)
    d2[2:-2] = (-u2[:-4] + 16 * u2[1:-3] - 30 * u2[2:-2] + 16 * u2[3:-1]
                - u2[4:]) / (12 * grid.dx ** 2)
    bet = background(t, p)
    resid = du2dt - p.D * d2 - (p.a - p.kappa * p.B * bet) * u2 \
        + p.kappa * bet * (Kb @ u2) + p.kappa * u1 * (Kb @ u1)
    interior = slice(4, -4)
    assert np.max(np.abs(resid[interior])) <= 1e-5


def test_mode_count_basics():
    grid = FieldGrid(-10, 10, 801)
    single = Field.from_function(grid, lambda x: np.exp(-x * x))
    assert mode_count(single, 0.5) == 1
    double = Field.from_function(grid, lambda x: np.exp(-(x - 3) ** 2)
                                 + np.exp(-(x + 3) ** 2))
    assert mode_count(double, 0.5) == 2
    flat = Field(grid, np.ones(grid.n))
    assert mode_count(flat, 0.5) == 0
    with pytest.raises(ValueError):
        mode_count(single, 0.0)


def test_multimodal_transition():
    p = params()
    grid = FieldGrid(-20, 20, 1201)
    timeline, first = scan_modes(p, np.arange(0.0, 6.01, 0.25), grid)
    assert timeline[0][1] == 1
    assert first is not None
    assert max(c for _, c in timeline) >= 2


def test_second_order_correction_against_direct_solver():
    # the second-order term must absorb most of the first-order gap:
    # || u - (beta + eps u1 + eps^2 u2) || well below || u - (beta + eps u1) ||
    from nlfkpp.direct import solve_nonlinear
    from nlfkpp.model import ModelSpec, constant_coefficient, gaussian_kernel
    eps = 0.08
    p = params(eps=eps)
    m = ModelSpec(D=p.D, kappa=p.kappa, a=constant_coefficient(p.a),
                  b=gaussian_kernel(p.b0, p.gamma))
    grid = FieldGrid(-18, 18, 385, boundary="periodic")
    phi = p.N * hermite_function(0, p.theta * grid.x)
    u0 = Field(grid, background(0.0, p) + eps * phi)
    direct = solve_nonlinear(u0, m, [0.0, 1.0])[-1].values
    first = background(1.0, p) + eps * u1_series(grid.x, 1.0, p)
    # u2 needs a plain (non-periodic) quadrature grid covering the bump
    g2 = FieldGrid(-18, 18, 385)
    u2 = u2_correction(g2, 1.0, p, panels=16).values
    second = first + eps ** 2 * u2
    gap1 = np.linalg.norm(direct - first)
    gap2 = np.linalg.norm(direct - second)
    assert gap2 < 0.3 * gap1


def test_perturbation_ordering_against_direct_solver():
    # || u - (beta + eps u1) || / || eps u1 || falls as eps falls
    from nlfkpp.direct import solve_nonlinear
    from nlfkpp.model import ModelSpec, constant_coefficient, gaussian_kernel
    ratios = []
    for eps in (0.08, 0.04, 0.02):
        p = params(eps=eps)
        m = ModelSpec(D=p.D, kappa=p.kappa, a=constant_coefficient(p.a),
                      b=gaussian_kernel(p.b0, p.gamma))
        grid = FieldGrid(-18, 18, 385, boundary="periodic")
        phi = p.N * hermite_function(0, p.theta * grid.x)
        u0 = Field(grid, background(0.0, p) + eps * phi)
        got = solve_nonlinear(u0, m, [0.0, 1.0])[-1].values
        approx = background(1.0, p) + eps * u1_series(grid.x, 1.0, p)
        ratios.append(np.linalg.norm(got - approx)
                      / np.linalg.norm(eps * u1_series(grid.x, 1.0, p)))
    assert ratios[0] > ratios[1] > ratios[2]
