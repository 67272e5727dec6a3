"""The associated linear equation: the variable-coefficient linear PDE

    v_t = D v_xx - d/dx (Lambda(x,t) v) + A(x,t) v

obtained by replacing the nonlocal terms of the nonlinear equation with
their moment-trajectory evaluations, truncated at the moment order M. Its
solutions approximate the nonlinear ones to the truncation accuracy, which
is what the direct solver cross-checks.

Also exposed: the residual evaluator for gridded candidate solutions and
the scalar coefficients of the first two correction operators in the
small-diffusion expansion of the generator (monomials p, p dx^2, dx at
order one; p, p dx^3, dx^2 at order two, with p = D d/dx and dx the offset
from the trajectory).
"""

import math
from dataclasses import dataclass

import numpy as np

from .direct import first_derivative, second_derivative
from .grids import Field


@dataclass
class AssociatedOperator:
    """Coefficient provider bound to a moment trajectory and model."""

    traj: object
    model: object

    @property
    def M(self):
        return self.traj.M

    def lambda_field(self, x, t):
        """Drift coefficient Lambda(x,t) =
        V_x(x,t) + kappa sigma(t) sum_l W_l(x, x(t), t) alpha^(l)(t)/l!."""
        m = self.model
        st = self.traj.state(t)
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        if m.V is not None:
            out = out + m.V.derivative(1, x, t)
        if m.W is not None and m.kappa != 0.0:
            acc = np.zeros_like(x)
            for l in range(st.order + 1):
                ml = st.moment(l)
                if ml != 0.0:
                    acc = acc + m.partial_kernel_y("W", l, x, st.x, t) * ml / math.factorial(l)
            out = out + m.kappa * st.sigma * acc
        return out[()] if out.ndim == 0 else out

    def a_field(self, x, t):
        """Reaction coefficient A(x,t) =
        a(x,t) - kappa sigma(t) sum_l b_l(x, x(t), t) alpha^(l)(t)/l!."""
        m = self.model
        st = self.traj.state(t)
        x = np.asarray(x, dtype=float)
        out = np.asarray(m.a(x, t), dtype=float) * np.ones_like(x)
        if m.kappa != 0.0:
            acc = np.zeros_like(x)
            for l in range(st.order + 1):
                ml = st.moment(l)
                if ml != 0.0:
                    acc = acc + m.partial_kernel_y("b", l, x, st.x, t) * ml / math.factorial(l)
            out = out - m.kappa * st.sigma * acc
        return out[()] if out.ndim == 0 else out

    def lambda_deriv(self, l, t):
        """l-th x-derivative of Lambda at x = x(t)."""
        m = self.model
        st = self.traj.state(t)
        val = m.taylor_v(l, t, st.x)
        if m.W is not None and m.kappa != 0.0:
            acc = 0.0
            for lp in range(st.order + 1):
                mlp = st.moment(lp)
                if mlp != 0.0:
                    acc += m.taylor_w(l, lp, t, st.x) * mlp / math.factorial(lp)
            val += m.kappa * st.sigma * acc
        return val

    def a_deriv(self, l, t):
        """l-th x-derivative of A at x = x(t)."""
        m = self.model
        st = self.traj.state(t)
        val = m.taylor_a(l, t, st.x)
        if m.kappa != 0.0:
            acc = 0.0
            for lp in range(st.order + 1):
                mlp = st.moment(lp)
                if mlp != 0.0:
                    acc += m.taylor_b(l, lp, t, st.x) * mlp / math.factorial(lp)
            val -= m.kappa * st.sigma * acc
        return val

    def mass_rate_gap(self, t):
        """A(x(t),t) - sigma'(t)/sigma(t): the order-D identity offset left
        by writing the leading state's mass factor as sigma(t)/sigma(0)."""
        from .moments import ee_rhs
        st = self.traj.state(t)
        rate = ee_rhs(st, t, self.model)[0] / st.sigma
        return self.a_deriv(0, t) - rate


def coeff_lambda(x, t, op):
    return op.lambda_field(x, t)


def coeff_A(x, t, op):
    return op.a_field(x, t)


def apply_operator(v, t, op, dvdt):
    """Residual field [-d/dt + D d2/dx2 - d/dx(Lambda .) + A] v with the time
    derivative supplied by the caller (companion field or snapshot stencil).

    Spatial derivatives are 4th-order central; the candidate must decay at
    the grid boundary (the ghost nodes are zero), so a grid that truncates
    the state is rejected.
    """
    if not v.boundary_ok():
        raise ValueError(
            f"grid too narrow: boundary carries {v.boundary_fraction():.1e} "
            "of the peak (needs < 1e-12)")
    grid = v.grid
    x = grid.x
    vals = v.values
    res = -dvdt.values + op.model.D * second_derivative(vals, grid.dx, grid.boundary) \
        + op.a_field(x, t) * vals
    lam = op.lambda_field(x, t)
    if np.any(lam != 0.0):
        res = res - first_derivative(lam * vals, grid.dx, grid.boundary, order=4)
    return Field(grid, res)


def residual_from_snapshots(v0, v1, t0, t1, op):
    """Midpoint residual from two adjacent snapshots: 2nd-order d/dt stencil
    (v1 - v0)/dt and midpoint average for the spatial part. Returns
    (t_mid, residual Field)."""
    dt = t1 - t0
    grid = v0.grid
    dvdt = Field(grid, (v1.values - v0.values) / dt)
    vmid = Field(grid, 0.5 * (v0.values + v1.values))
    tm = 0.5 * (t0 + t1)
    return tm, apply_operator(vmid, tm, op, dvdt)


@dataclass(frozen=True)
class ExpansionCoefficients:
    """Scalar multipliers of the operator monomials at one time.

    order 1: p_coeff * p + p_dx2_coeff * (p dx^2) + dx_coeff * dx
    order 2: p_coeff * p + p_dx3_coeff * (p dx^3) + dx2_coeff * dx^2
    """

    order: int
    p_coeff: float
    p_dxk_coeff: float
    dxk_coeff: float


def expansion_coefficients(order, t, op):
    """Coefficients of the order-one / order-two correction operators.

    Central moments beyond the trajectory's truncation order count as zero,
    so at M = 2 the order-two p-coefficient (which carries alpha^(3)) drops.
    """
    if order not in (1, 2):
        raise ValueError(f"expansion order must be 1 or 2, got {order}")
    m = op.model
    st = op.traj.state(t)
    kap = m.kappa

    def kernel_sum(table_order):
        acc = 0.0
        for l in range(st.order + 1):
            ml = st.moment(l)
            if ml != 0.0:
                acc += m.taylor_b(table_order, l, t, st.x) * ml / math.factorial(l)
        return acc

    def wkernel_sum(table_order):
        if m.W is None or kap == 0.0:
            return 0.0
        acc = 0.0
        for l in range(st.order + 1):
            ml = st.moment(l)
            if ml != 0.0:
                acc += m.taylor_w(table_order, l, t, st.x) * ml / math.factorial(l)
        return acc

    if order == 1:
        p_c = st.moment(2) * (
            m.taylor_a(1, t, st.x) - kap * st.sigma * kernel_sum(1)
            + 0.5 * m.taylor_v(2, t, st.x) + 0.5 * kap * st.sigma * wkernel_sum(2))
        return ExpansionCoefficients(1, p_c, -0.5 * op.lambda_deriv(2, t),
                                     m.D * op.a_deriv(1, t))
    p_c = 0.5 * st.moment(3) * (
        m.taylor_a(2, t, st.x) - kap * st.sigma * kernel_sum(2)
        + (m.taylor_v(3, t, st.x) + kap * st.sigma * wkernel_sum(3)) / 3.0)
    return ExpansionCoefficients(2, p_c, -op.lambda_deriv(3, t) / 6.0,
                                 0.5 * m.D * op.a_deriv(2, t))


def apply_expansion(coeffs, v, t, op):
    """Apply the reconstructed correction operator to a gridded field.

    The p-monomials act as written: p dx^k multiplies by the trajectory
    offset to the k-th power first, then applies p = D d/dx.
    """
    grid = v.grid
    dx_off = grid.x - op.traj.x(t)
    D = op.model.D
    k = 2 if coeffs.order == 1 else 3

    def p_of(w):
        return D * first_derivative(w, grid.dx, grid.boundary, order=4)

    out = coeffs.p_coeff * p_of(v.values) \
        + coeffs.p_dxk_coeff * p_of(dx_off ** k * v.values) \
        + coeffs.dxk_coeff * dx_off ** (k - 1) * v.values
    return Field(grid, out)


def residual_report_csv(path, rows):
    """rows of (t, residual_L2, residual_over_norm)."""
    from .reporting import write_csv
    write_csv(path, ["t", "residual_L2", "residual_over_norm"], rows)
