"""End-to-end checks with convection switched on: the assembled state and
the moment predictions against the direct solver."""

import math

import numpy as np
import pytest

from nlfkpp.coherent import assemble_solution
from nlfkpp.direct import solve_nonlinear
from nlfkpp.grids import Field, FieldGrid
from nlfkpp.model import (ModelSpec, callback_kernel, constant_coefficient,
                          gaussian_kernel, polynomial_coefficient)
from nlfkpp.moments import MomentState, integrate_ee, moments_of_field


def test_contracting_local_drift_full_pipeline():
    # V = -x^2/4 gives the drift velocity V_x = -x/2: the center relaxes
    # toward the origin while the variance balances drift against diffusion.
    # The assembled state must track the direct solve.
    def model_of(D):
        return ModelSpec(D=D, kappa=1.0, a=constant_coefficient(1.0),
                         b=gaussian_kernel(1.0, 2.0),
                         V=polynomial_coefficient([0.0, 0.0, -0.25]))

    errs = []
    for D in (0.02, 0.01):
        m = model_of(D)
        sol = assemble_solution(0, m, (0.0, 1.0), x0=0.3)
        # center follows dx/dt = -x/2 to leading order
        assert sol.traj.x(1.0) == pytest.approx(0.3 * math.exp(-0.5), rel=1e-3)
        width = math.sqrt(sol.traj.alpha(1.0))
        grid = FieldGrid(-9 * width + 0.0, 9 * width + 0.45, 601)
        u0 = sol.initial_field(grid)
        direct = solve_nonlinear(u0, m, [0.0, 1.0])[-1]
        expect = sol(grid.x, 1.0)
        errs.append(np.linalg.norm(direct.values - expect)
                    / np.linalg.norm(direct.values))
        # direct-solve center agrees with the moment trajectory
        assert direct.center() == pytest.approx(sol.traj.x(1.0), abs=5e-3)
    assert errs[0] <= 0.05
    assert errs[1] < errs[0]


def test_nonlocal_convection_self_advection():
    # odd potential kernel W(x-y) = c (x-y) exp(-(x-y)^2/g^2): the drift
    # velocity field W_x is even with W_x(0) = c, so a localized bump
    # self-advects at speed ~ kappa sigma c; mass is conserved (divergence
    # form) since competition is switched off
    c, g = 0.4, 2.0

    def Wfun(x, y, t):
        s = x - y
        return c * s * np.exp(-s * s / g ** 2)

    D = 0.01
    m = ModelSpec(D=D, kappa=1.0, a=constant_coefficient(0.0),
                  b=gaussian_kernel(0.0, 1.0),
                  W=callback_kernel(Wfun, time_dependent=False))
    sigma0 = 0.8
    var0 = 2 * D
    theta0 = MomentState(sigma0, 0.0, (var0,))
    traj = integrate_ee(theta0, (0.0, 1.0), m)
    # the drift velocity carries a variance correction:
    # dx/dt = kappa sigma [W_x(0) + (W_{0,2} + W_{2,0}) alpha2(t) / 2]
    # with sigma frozen (a = 0, no competition) and alpha2 = var0 + 2 D t
    assert traj.sigma(1.0) == pytest.approx(sigma0, rel=1e-9)
    w00 = m.taylor_w(0, 0, 0.0, 0.0)
    w_corr = 0.5 * (m.taylor_w(0, 2, 0.0, 0.0) + m.taylor_w(2, 0, 0.0, 0.0))
    x_expect = sigma0 * (w00 * 1.0 + w_corr * (var0 * 1.0 + D * 1.0))
    assert traj.x(1.0) == pytest.approx(x_expect, rel=1e-4)

    peak = sigma0 / math.sqrt(2 * math.pi * var0)
    grid = FieldGrid(-8 * math.sqrt(var0 + 2 * D), 0.4 + 8 * math.sqrt(var0 + 2 * D), 513)
    u0 = Field.from_function(grid, lambda x: peak * np.exp(-x * x / (2 * var0)))
    res = solve_nonlinear(u0, m, [0.0, 1.0])
    final = res[-1]
    assert final.mass() == pytest.approx(u0.mass(), rel=1e-8)
    got = moments_of_field(final)
    assert got.x == pytest.approx(traj.x(1.0), abs=2e-3)
