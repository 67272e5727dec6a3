"""Trajectory-coherent states: the Gaussian vacuum attached to the germ,
the Hermite tower above it, the biorthogonal dual family, and the assembly
of leading-order asymptotic solutions of the nonlinear equation.

The n-th state is, up to normalization, a scaled Hermite polynomial in the
trajectory offset times the vacuum Gaussian. The printed closed form pairs
a (Z+/Z-)^(n/2) prefactor with a Hermite argument ~ (Z- Z+)^(-1/2); past
the focal time of the plus branch both factors turn imaginary while their
product stays real. We evaluate the product directly through a coupled
recurrence in which only the real combinations sqrt(b/D) dx / Z- and
Z+/Z- appear, which is exactly the analytic continuation of the closed
form and is regular through Z+ = 0.

Symbol collision to keep straight: the germ normalization parameter b
(free, positive; enters the initial data of the variation system) is not
the influence kernel b(x,y). Types keep them apart: the germ b lives on
GermState, kernel data on the model.
"""

import math

import numpy as np

from .errors import FocalPointError
from .grids import Field
from .moments import MomentState, integrate_ee
from .germ import integrate_variations

STATE_INDEX_CAP = 50


def _scaled_hermite(n, u, r):
    """p_n with p_0 = 1, p_1 = 2u, p_{k+1} = 2 u p_k - 2 k r p_{k-1}.

    Equals tau^n H_n(xi) whenever tau^2 = r and tau * xi = u; both
    combinations are real for the state and dual-state evaluations.
    """
    p_prev = np.ones_like(u)
    if n == 0:
        return p_prev
    p = 2.0 * u
    for k in range(1, n):
        p_prev, p = p, 2.0 * u * p - 2.0 * k * r * p_prev
    return p


class CoherentState:
    """Evaluator bundle for one trajectory + germ pair.

    `n` is the default excitation index used by `assemble_solution`'s
    returned callable; `vacuum`, `state`, `dual_state` take any index.
    """

    def __init__(self, germ, n=0):
        if germ.traj is None:
            raise ValueError("coherent states need a germ carrying its trajectory")
        if not (0 <= n <= STATE_INDEX_CAP):
            raise ValueError(f"state index must lie in 0..{STATE_INDEX_CAP}, got {n}")
        self.germ = germ
        self.traj = germ.traj
        self.n = n
        self.D = self.traj.model.D
        self.normalizer = (germ.b / (math.pi * self.D)) ** 0.25

    @property
    def x0(self):
        return self.traj.x(self.traj.t0)

    def _germ_values(self, t):
        g = self.germ
        wp, zp, wm, zm = g.wp(t), g.zp(t), g.wm(t), g.zm(t)
        if wm * zm >= 0.0:
            raise FocalPointError(
                f"sign condition W- Z- < 0 violated at t = {t}", t_focal=t)
        return wp, zp, wm, zm


def vacuum(x, t, s):
    """Ground Gaussian state: peak at the trajectory center, width set by
    the germ ratio, mass carried by sigma(t)/sigma(0)."""
    wp, zp, wm, zm = s._germ_values(t)
    dx = np.asarray(x, dtype=float) - s.traj.x(t)
    mass = s.traj.sigma(t) / s.traj.sigma(s.traj.t0)
    out = s.normalizer * math.sqrt(-wm / (s.germ.b * zm)) * mass \
        * np.exp(wm * dx * dx / (2.0 * s.D * zm))
    return out[()] if np.ndim(out) == 0 else out


def state(n, x, t, s):
    """n-th coherent state: scaled-Hermite polynomial times the vacuum."""
    if not (0 <= n <= STATE_INDEX_CAP):
        raise ValueError(f"state index must lie in 0..{STATE_INDEX_CAP}, got {n}")
    vac = vacuum(x, t, s)
    if n == 0:
        return vac
    wp, zp, wm, zm = s._germ_values(t)
    dx = np.asarray(x, dtype=float) - s.traj.x(t)
    u = math.sqrt(s.germ.b / s.D) * dx / zm
    pn = _scaled_hermite(n, u, zp / zm)
    out = (-1.0) ** n / math.sqrt(2.0 ** n * math.factorial(n)) * pn * vac
    return out[()] if np.ndim(out) == 0 else out


def dual_state(n, x, t, s):
    """Biorthogonal partner family; integrates against the states to the
    identity. Undefined at focal points of the plus branch."""
    if not (0 <= n <= STATE_INDEX_CAP):
        raise ValueError(f"state index must lie in 0..{STATE_INDEX_CAP}, got {n}")
    wp, zp, wm, zm = s._germ_values(t)
    if abs(zp) < 1e-12:
        raise FocalPointError(
            f"Z+ vanished at t = {t}: dual states are singular there", t_focal=t)
    dx = np.asarray(x, dtype=float) - s.traj.x(t)
    mass_inv = s.traj.sigma(s.traj.t0) / s.traj.sigma(t)
    w0 = s.normalizer * mass_inv * math.sqrt(-s.germ.b / (wm * zp)) \
        * np.exp(-wp * dx * dx / (2.0 * s.D * zp))
    if n == 0:
        out = w0
    else:
        u = math.sqrt(s.germ.b / s.D) * dx / zp
        pn = _scaled_hermite(n, u, zm / zp)
        out = (-1.0) ** n / math.sqrt(2.0 ** n * math.factorial(n)) * pn * w0
    return out[()] if np.ndim(out) == 0 else out


def initial_moment_constants(n, D, b, x0):
    """Order-2 moment constants matching the n-th state at the initial time:
    mass (4 pi D / b)^(1/4) sqrt(n!)/(2^(n/2) (n/2)!), center x0, variance
    D (1 + 2n) / b ... with n even. Odd states carry zero mass and admit no
    positive-mass normalization; they are refused.
    """
    if n % 2 != 0:
        raise ValueError(
            f"odd state index {n}: odd states have zero total mass, so no "
            "moment normalization exists (the assembled odd solutions vanish)")
    if n < 0 or n > STATE_INDEX_CAP:
        raise ValueError(f"state index must lie in 0..{STATE_INDEX_CAP}, got {n}")
    l = n // 2
    sigma = (4.0 * math.pi * D / b) ** 0.25 * math.sqrt(math.factorial(n)) \
        / (2.0 ** l * math.factorial(l))
    alpha2 = D * (1.0 + 4.0 * l) / b
    return MomentState(sigma, x0, (alpha2,))


class AssembledSolution:
    """Leading-order asymptotic solution u_n(x, t) of the nonlinear equation:
    the n-th coherent state over the trajectory whose constants match the
    state's own initial moments."""

    def __init__(self, coherent_state, n):
        self.state = coherent_state
        self.n = n
        self.traj = coherent_state.traj
        self.germ = coherent_state.germ

    def __call__(self, x, t):
        return state(self.n, x, t, self.state)

    def initial_field(self, grid):
        return Field(grid, self(grid.x, self.traj.t0))

    def field(self, grid, t):
        return Field(grid, self(grid.x, t))


class _ZeroSolution:
    n = None

    def __call__(self, x, t):
        z = np.zeros_like(np.asarray(x, dtype=float))
        return z[()] if z.ndim == 0 else z

    def field(self, grid, t):
        return Field(grid, np.zeros(grid.n))


def assemble_solution(n, model, t_span, germ_b=1.0, x0=0.0,
                      allow_odd_zero=False, rtol=1e-10, atol=1e-10):
    """Run the full pipeline for the n-th asymptotic solution: moment
    constants -> moment trajectory -> variation system -> evaluable state.

    Odd n is refused (the assembled odd solutions are identically zero);
    pass allow_odd_zero=True to get the zero function explicitly.
    """
    if n % 2 != 0:
        if allow_odd_zero:
            return _ZeroSolution()
        raise ValueError(
            f"odd state index {n} assembles to the zero function; pass "
            "allow_odd_zero=True to opt into receiving it")
    constants = initial_moment_constants(n, model.D, germ_b, x0)
    traj = integrate_ee(constants, t_span, model, rtol=rtol, atol=atol)
    germ = integrate_variations(traj, germ_b)
    return AssembledSolution(CoherentState(germ, n), n)
