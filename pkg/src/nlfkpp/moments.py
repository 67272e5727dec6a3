"""The closed moment system (mass, center, central moments) attached to the
nonlocal Fisher-KPP model, truncated at order M.

The solution's mass sigma, center x, and central moments alpha^(k) obey an
autonomous ODE system once every product of central moments whose total
order exceeds M is dropped (each alpha^(k) carries k/2 powers of the small
diffusion D, and D itself counts as one full power). Its solution drives
everything downstream: the associated linear operator, the variation
system, and the assembled asymptotic states.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import BlowupError, WindowError

M_MIN = 2
M_MAX = 5

_SIGMA_CAP = 1e9


@dataclass(frozen=True)
class MomentState:
    """Aggregate moment vector (sigma, x, alpha^(2..M)).

    alpha holds the central moments of order 2..M, so the truncation order
    is M = len(alpha) + 1. alpha^(0) = 1 and alpha^(1) = 0 are implicit.
    """

    sigma: float
    x: float
    alpha: tuple

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(float(a) for a in self.alpha))
        if not np.isfinite(self.sigma) or not np.isfinite(self.x) \
                or not all(np.isfinite(a) for a in self.alpha):
            raise ValueError("moment state contains non-finite entries")
        if self.sigma <= 0:
            raise ValueError(f"zeroth moment must be positive, got {self.sigma}")
        if not M_MIN - 1 <= len(self.alpha) <= M_MAX - 1:
            raise ValueError(
                f"central moments for orders 2..{M_MAX} only (factorial term "
                f"growth beyond); got {len(self.alpha) + 1}")
        if self.alpha[0] < 0:
            raise ValueError(f"variance must be nonnegative, got {self.alpha[0]}")

    @property
    def order(self):
        return len(self.alpha) + 1

    @property
    def alpha2(self):
        return self.alpha[0]

    def moment(self, k):
        """alpha^(k) with the implicit alpha^(0)=1, alpha^(1)=0; zero beyond M."""
        if k == 0:
            return 1.0
        if k == 1:
            return 0.0
        if k <= self.order:
            return self.alpha[k - 2]
        return 0.0

    def as_vector(self):
        return np.array([self.sigma, self.x, *self.alpha])

    @classmethod
    def from_vector(cls, v):
        return cls(float(v[0]), float(v[1]), tuple(v[2:]))


def moments_of_field(f, M=2):
    """Moment state of a sampled field by composite trapezoid quadrature.

    The field may change sign (excited states do); only a positive total
    mass is required. Centering at the first moment makes alpha^(1) = 0 by
    construction.
    """
    if not (M_MIN <= M <= M_MAX):
        raise ValueError(f"truncation order must lie in {M_MIN}..{M_MAX}, got {M}")
    vals = f.values
    if not np.all(np.isfinite(vals)):
        raise ValueError("field contains non-finite values")
    w = f.grid.quad_weights
    x = f.grid.x
    sigma = float(np.dot(w, vals))
    tol = 1e-12 * float(np.dot(w, np.abs(vals))) + 1e-300
    if sigma <= tol:
        raise ValueError(f"nonpositive total mass {sigma:.3e}")
    center = float(np.dot(w, x * vals) / sigma)
    dx = x - center
    alpha = tuple(float(np.dot(w, dx ** k * vals) / sigma) for k in range(2, M + 1))
    return MomentState(sigma, center, alpha)


def match_constants(phi, M=2):
    """Integration constants in Cauchy form for initial data phi.

    With the constants chosen as the initial values themselves the matching
    condition is the identity, so this is exactly the moment extraction.
    """
    return moments_of_field(phi, M)


def ee_rhs(state, t, model):
    """Right-hand side of the order-M moment system at time t.

    The truncation keeps a product alpha^(k1)...alpha^(ks) iff
    k1+...+ks <= M, counting the explicit diffusion D as order 2; moments
    of index beyond M are zero. For M = 2 this reproduces the classical
    closed forms for (sigma, x, alpha^(2)).
    """
    M = state.order
    sig = state.sigma
    X = state.x
    kap = model.kappa
    m = [state.moment(k) for k in range(M + 1)]

    a_k = [model.taylor_a(k, t, X) for k in range(M + 1)]
    v_k = [model.taylor_v(k, t, X) for k in range(M + 1)]
    b_kl = [[model.taylor_b(k, l, t, X) if k + l <= M else 0.0
             for l in range(M + 1)] for k in range(M + 1)]
    w_kl = [[model.taylor_w(k, l, t, X) if k + l <= M else 0.0
             for l in range(M + 1)] for k in range(M + 1)]
    inv_f = [1.0 / math.factorial(k) for k in range(M + 1)]

    # mass
    ds = 0.0
    for k in range(M + 1):
        ds += inv_f[k] * a_k[k] * m[k]
        for l in range(M + 1 - k):
            ds -= inv_f[k] * inv_f[l] * sig * kap * b_kl[k][l] * m[k] * m[l]
    ds *= sig

    # center
    dx = 0.0
    for k in range(M):
        dx += inv_f[k] * m[k + 1] * a_k[k]
        for l in range(M - k):
            dx -= inv_f[k] * inv_f[l] * sig * kap * b_kl[k][l] * m[k + 1] * m[l]
    for k in range(M + 1):
        dx += inv_f[k] * m[k] * v_k[k]
        for l in range(M + 1 - k):
            dx += inv_f[k] * inv_f[l] * sig * kap * w_kl[k][l] * m[k] * m[l]

    # central moments
    dal = []
    for n in range(2, M + 1):
        acc = model.D * n * (n - 1) * m[n - 2]
        for k in range(M + 2 - n):
            acc += inv_f[k] * n * v_k[k] * (m[k + n - 1] - m[k] * m[n - 1]) \
                if k + n - 1 <= M else 0.0
        for k in range(M + 1 - n):
            acc += inv_f[k] * a_k[k] * (m[k + n] - m[k] * m[n] - n * m[k + 1] * m[n - 1])
        for k in range(M + 1):
            for l in range(M + 1):
                if k + l + n - 1 <= M:
                    acc += kap * sig * inv_f[k] * inv_f[l] * n * w_kl[k][l] * m[l] \
                        * (m[k + n - 1] - m[k] * m[n - 1])
                if k + l + n <= M:
                    acc += kap * sig * inv_f[k] * inv_f[l] * b_kl[k][l] * m[l] \
                        * (-m[n + k] + n * m[k + 1] * m[n - 1] + m[k] * m[n])
        dal.append(acc)

    return np.array([ds, dx, *dal])


class EETrajectory:
    """Dense solution of the moment system over a time window."""

    def __init__(self, sol, t0, t1, M, model, initial):
        self._sol = sol
        self.t0 = t0
        self.t1 = t1
        self.M = M
        self.model = model
        self.initial = initial

    def _check(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < self.t0 - 1e-12) or np.any(t > self.t1 + 1e-12):
            raise WindowError(
                f"time {t} outside the computed window [{self.t0}, {self.t1}]")
        return t

    def state(self, t):
        self._check(t)
        return MomentState.from_vector(self._sol(float(t)))

    def sigma(self, t):
        return self._sol(self._check(t))[0]

    def x(self, t):
        return self._sol(self._check(t))[1]

    def alpha(self, t, k=2):
        """Central moment alpha^(k)(t); zero beyond the truncation order."""
        if k == 0:
            return np.ones_like(np.asarray(t, dtype=float))[()]
        if k == 1 or k > self.M:
            return np.zeros_like(np.asarray(t, dtype=float))[()]
        return self._sol(self._check(t))[k]

    def moments(self, t):
        """List [alpha^(0..M)](t) with the implicit entries filled in."""
        v = self._sol(self._check(t))
        return [1.0, 0.0] + [v[k] for k in range(2, self.M + 1)]

    def sample(self, times):
        return np.stack([self._sol(self._check(t)) for t in np.atleast_1d(times)])

    def write_csv(self, path, n_points=201):
        from .reporting import write_csv
        ts = np.linspace(self.t0, self.t1, n_points)
        header = ["t", "sigma", "x"] + [f"alpha{k}" for k in range(2, self.M + 1)]
        rows = [(t, *self._sol(t)) for t in ts]
        write_csv(path, header, rows)


def integrate_ee(theta0, t_span, model, rtol=1e-10, atol=1e-10, method="RK45"):
    """Integrate the order-M moment system with embedded error control.

    Raises BlowupError (with the reached time) if the mass leaves
    (0, ~1e9 sigma_0) before the end of the window.
    """
    t0, t1 = float(t_span[0]), float(t_span[1])
    M = theta0.order
    if t1 == t0:
        # degenerate window: constant trajectory
        y0 = theta0.as_vector()

        def const_sol(t):
            t = np.asarray(t, dtype=float)
            if t.ndim == 0:
                return y0.copy()
            return np.repeat(y0[:, None], t.size, axis=1)

        return EETrajectory(const_sol, t0, t1, M, model, theta0)
    floor = 1e-12 * theta0.sigma
    cap = _SIGMA_CAP * max(1.0, theta0.sigma)

    def rhs(t, y):
        return ee_rhs(MomentState.from_vector(y), t, model)

    def ev_floor(t, y):
        return y[0] - floor

    def ev_cap(t, y):
        return cap - y[0]

    ev_floor.terminal = True
    ev_cap.terminal = True

    sol = solve_ivp(rhs, (t0, t1), theta0.as_vector(), method=method,
                    rtol=rtol, atol=atol, dense_output=True,
                    events=(ev_floor, ev_cap))
    if sol.status == 1:  # an event fired
        t_hit = float(sol.t[-1])
        which = "vanished" if len(sol.t_events[0]) else "blew up"
        raise BlowupError(f"mass {which} at t = {t_hit:.6g} before t_end = {t1}",
                          t_reached=t_hit)
    if not sol.success:
        raise BlowupError(f"moment integration failed: {sol.message}",
                          t_reached=float(sol.t[-1]))
    return EETrajectory(sol.sol, t0, t1, M, model, theta0)


@dataclass(frozen=True)
class SpecialCaseParams:
    """Data of the exactly solvable order-2 case: constant growth rate a,
    no convection, symmetric translation-invariant kernel with value bval
    and curvature beta at zero separation."""

    a: float
    kappa: float
    D: float
    bval: float
    beta: float
    sigma0: float
    x0: float
    alpha0: float


def closed_form_m2(params, t):
    """Closed-form order-2 moments for the special case: generalized
    logistic mass, fixed center, linearly growing variance.

    Singular at a = 0 (use integrate_ee there).
    """
    p = params
    if p.a == 0.0:
        raise ValueError("closed form is singular at a = 0; integrate instead")
    t = np.asarray(t, dtype=float)
    w = p.bval + p.beta * (p.alpha0 - 2.0 * p.D / p.a)
    denom = (np.exp(-p.a * t) * (p.a / p.sigma0 - p.kappa * w)
             + 2.0 * p.D * p.kappa * p.beta * t + p.kappa * w)
    sigma = p.a / denom
    x = np.full_like(t, p.x0)
    alpha = 2.0 * p.D * t + p.alpha0
    if t.ndim == 0:
        return MomentState(float(sigma), float(x), (float(alpha),))
    return sigma, x, alpha
