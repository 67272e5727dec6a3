"""The system in variations attached to a moment trajectory, its conserved
pairing, and the phase/mass ingredients of the leading-order states.

Two solutions (W, Z) of

    dW/dt = -lam(t) W,   dZ/dt = -2 W + lam(t) Z,

with initial data W(0) = +/- b, Z(0) = 1, span the (real) germ attached to
the trajectory; lam(t) is the on-trajectory x-derivative of the drift
coefficient of the associated linear equation. Their skew pairing
W+ Z- - Z+ W- = 2b is conserved, the ratio Q = W-/Z- < 0 fixes the Gaussian
width of the vacuum state, and the plus branch supplies the dual family.

The minus branch provably never reaches a focal point (Z- stays positive),
so the window of an integration ends only at the requested time; the plus
branch generically crosses Z+ = 0 at a finite focal time, which is recorded
and only matters for dual-state evaluation.
"""

import math

import numpy as np
from scipy.integrate import solve_ivp

from .errors import FocalPointError, WindowError
from .moments import MomentState, ee_rhs


def lambda_x_on_trajectory(t, traj, model):
    """On-trajectory x-derivative of the drift coefficient:
    V_1(t) + kappa sigma(t) sum_l W_{1,l}(t) alpha^(l)(t) / l!."""
    st = traj.state(t)
    return _lambda_x_from_state(st, t, model)


def _lambda_x_from_state(state, t, model):
    M = state.order
    val = model.taylor_v(1, t, state.x)
    if model.W is not None and model.kappa != 0.0:
        acc = 0.0
        for l in range(M + 1):
            ml = state.moment(l)
            if ml != 0.0:
                acc += model.taylor_w(1, l, t, state.x) * ml / math.factorial(l)
        val += model.kappa * state.sigma * acc
    return val


class GermState:
    """Both variation branches over a time window, with dense output.

    Accessors interpolate; `skew(t)` monitors the conserved pairing, and
    `plus_focal_times` lists the recorded zeros of Z+ inside the window.
    """

    def __init__(self, sol, b, t0, t1, traj=None, plus_focal_times=()):
        self._sol = sol
        self.b = b
        self.t0 = t0
        self.t1 = t1
        self.traj = traj
        self.plus_focal_times = tuple(plus_focal_times)
        ts = np.linspace(t0, t1, 512)
        vals = sol(ts)
        self.skew_drift_max = float(np.max(np.abs(
            vals[0] * vals[3] - vals[2] * vals[1] - 2.0 * b)))

    def _check(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < self.t0 - 1e-12) or np.any(t > self.t1 + 1e-12):
            raise WindowError(f"time {t} outside germ window [{self.t0}, {self.t1}]")
        return t

    def wp(self, t):
        return self._sol(self._check(t))[0]

    def zp(self, t):
        return self._sol(self._check(t))[1]

    def wm(self, t):
        return self._sol(self._check(t))[2]

    def zm(self, t):
        return self._sol(self._check(t))[3]

    def skew(self, t):
        v = self._sol(self._check(t))
        return v[0] * v[3] - v[1] * v[2]

    def sign_condition_ok(self, t):
        return bool(np.all(self.wm(t) * self.zm(t) < 0.0))

    def write_csv(self, path, n_points=201):
        from .reporting import write_csv
        ts = np.linspace(self.t0, self.t1, n_points)
        rows = []
        for t in ts:
            wp, zp, wm, zm = self._sol(t)
            rows.append((t, wm, zm, wp, zp, wp * zm - zp * wm,
                         wm / zm if zm != 0 else float("nan")))
        write_csv(path, ["t", "Wm", "Zm", "Wp", "Zp", "skew", "Q"], rows)


def q_ratio(germ, t):
    """Width ratio Q(t) = W-(t)/Z-(t); negative wherever the germ is valid."""
    zm = germ.zm(t)
    if np.any(np.abs(zm) < 1e-300):
        raise FocalPointError("Z- vanished (focal point of the minus branch)",
                              t_focal=float(np.atleast_1d(t)[0]))
    return germ.wm(t) / zm


SKEW_DRIFT_TOL = 1e-9  # relative to the conserved value 2b


def _check_skew(germ, skew_tol):
    if germ.skew_drift_max > skew_tol * 2.0 * germ.b:
        raise FocalPointError(
            f"skew-product drift {germ.skew_drift_max:.2e} exceeds "
            f"{skew_tol:g} x 2b: variation integration not trustworthy")
    return germ


def integrate_variations_from_lambda(lam, b, t_span, rtol=1e-12, atol=1e-14,
                                     skew_tol=SKEW_DRIFT_TOL):
    """Integrate both variation branches for an explicit coefficient lam(t).

    Used directly in tests with synthetic profiles; the trajectory-driven
    entry point below shares this machinery with the moment system coupled
    on the fly.
    """
    if not b > 0:
        raise ValueError(f"germ parameter must be positive, got {b}")
    t0, t1 = float(t_span[0]), float(t_span[1])

    def rhs(t, y):
        wp, zp, wm, zm = y
        lx = lam(t)
        return [-lx * wp, -2.0 * wp + lx * zp, -lx * wm, -2.0 * wm + lx * zm]

    def ev_plus(t, y):
        return y[1]

    def ev_minus(t, y):
        return y[3]

    ev_plus.terminal = False
    ev_minus.terminal = True

    sol = solve_ivp(rhs, (t0, t1), [b, 1.0, -b, 1.0], method="DOP853",
                    rtol=rtol, atol=atol, dense_output=True,
                    events=(ev_plus, ev_minus))
    if sol.status == 1:
        raise FocalPointError(
            f"Z- vanished at t = {sol.t[-1]:.6g}; sign condition lost",
            t_focal=float(sol.t[-1]))
    if not sol.success:
        raise FocalPointError(f"variation integration failed: {sol.message}")
    return _check_skew(GermState(sol.sol, b, t0, t1, traj=None,
                                 plus_focal_times=[float(t) for t in sol.t_events[0]]),
                       skew_tol)


def integrate_variations(traj, b, t_span=None, rtol=1e-12, atol=1e-14,
                         skew_tol=SKEW_DRIFT_TOL):
    """Integrate the variations jointly with the moment system.

    The coefficient lam depends on the instantaneous moments, so the joint
    integration shares step control with them instead of interpolating a
    precomputed trajectory. The result carries the trajectory for the
    coherent-state constructors.
    """
    if not b > 0:
        raise ValueError(f"germ parameter must be positive, got {b}")
    if t_span is None:
        t_span = (traj.t0, traj.t1)
    t0, t1 = float(t_span[0]), float(t_span[1])
    if t0 < traj.t0 - 1e-12 or t1 > traj.t1 + 1e-12:
        raise WindowError("germ window extends beyond the trajectory window")
    model = traj.model
    n_m = traj.M + 1  # moment vector length

    def rhs(t, y):
        state = MomentState.from_vector(y[:n_m])
        dm = ee_rhs(state, t, model)
        lx = _lambda_x_from_state(state, t, model)
        wp, zp, wm, zm = y[n_m:]
        return np.concatenate([dm, [-lx * wp, -2.0 * wp + lx * zp,
                                    -lx * wm, -2.0 * wm + lx * zm]])

    def ev_plus(t, y):
        return y[n_m + 1]

    def ev_minus(t, y):
        return y[n_m + 3]

    ev_plus.terminal = False
    ev_minus.terminal = True

    y0 = np.concatenate([traj.state(t0).as_vector(), [b, 1.0, -b, 1.0]])
    sol = solve_ivp(rhs, (t0, t1), y0, method="DOP853", rtol=rtol, atol=atol,
                    dense_output=True, events=(ev_plus, ev_minus))
    if sol.status == 1:
        raise FocalPointError(
            f"Z- vanished at t = {sol.t[-1]:.6g}; sign condition lost",
            t_focal=float(sol.t[-1]))
    if not sol.success:
        raise FocalPointError(f"variation integration failed: {sol.message}")

    full = sol.sol

    def germ_part(t):
        return np.asarray(full(t))[n_m:]

    return _check_skew(GermState(germ_part, b, t0, t1, traj=traj,
                                 plus_focal_times=[float(t) for t in sol.t_events[0]]),
                       skew_tol)


def action_and_mass_factor(traj, t):
    """Leading-order mass factor exp(S(t)/D) = sigma(t)/sigma(0); the order-D
    correction to the action rate is deliberately dropped."""
    return traj.sigma(t) / traj.sigma(traj.t0)


def phase_factor(germ, t, branch="minus"):
    """Accumulated phase exp(phi(t)) = sqrt|Z(0) W(t) / (Z(t) W(0))| for the
    selected branch."""
    if branch == "minus":
        w, z = germ.wm(t), germ.zm(t)
        w0, z0 = -germ.b, 1.0
    elif branch == "plus":
        w, z = germ.wp(t), germ.zp(t)
        w0, z0 = germ.b, 1.0
    else:
        raise ValueError(f"branch must be 'minus' or 'plus', got {branch!r}")
    if np.any(np.abs(z) < 1e-300) or np.any(np.abs(w0) < 1e-300):
        raise FocalPointError("phase factor undefined at a focal point")
    return np.sqrt(np.abs(z0 * w / (z * w0)))
