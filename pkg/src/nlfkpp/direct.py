"""Direct numerical solver for the nonlocal Fisher-KPP equation and its
linear variants: the brute-force ground truth the asymptotic constructions
are tested against.

Method of lines on a uniform grid: 4th-order central differences for the
diffusion term, 2nd-order central for the convection divergence, composite
trapezoid for both nonlocal integrals (direct O(n^2) kernel products, no
acceleration), classic fixed-step RK4 in time with the step chosen from the
diffusion stability bound and adjusted for convection.
"""

import numpy as np
from dataclasses import dataclass, field

from .errors import BlowupError
from .grids import BOUNDARY_MASS_TOL, Field

GROWTH_CAP = 1e6


def _padded(u, boundary):
    if boundary == "periodic":
        return np.concatenate([u[-2:], u, u[:2]])
    return np.concatenate([[0.0, 0.0], u, [0.0, 0.0]])


def second_derivative(u, dx, boundary="dirichlet"):
    """4th-order central second derivative with ghost nodes per boundary type."""
    p = _padded(u, boundary)
    return (-p[:-4] + 16.0 * p[1:-3] - 30.0 * p[2:-2] + 16.0 * p[3:-1] - p[4:]) \
        / (12.0 * dx * dx)


def first_derivative(u, dx, boundary="dirichlet", order=2):
    p = _padded(u, boundary)
    if order == 2:
        return (p[3:-1] - p[1:-3]) / (2.0 * dx)
    if order == 4:
        return (p[:-4] - 8.0 * p[1:-3] + 8.0 * p[3:-1] - p[4:]) / (12.0 * dx)
    raise ValueError(f"unsupported derivative order {order}")


def kernel_matrix(kernel, grid, t, derivative=None):
    """Quadrature matrix K[i,j] = kernel(x_i, x_j, t) w_j (trapezoid weights),
    so K @ u approximates the nonlocal integral at every node.

    On periodic grids the kernel is periodized with its two nearest images
    (adequate once the box is much wider than the kernel range), so every
    node sees the full integral of a translation-invariant kernel."""
    x = grid.x

    def evaluate(y):
        if derivative is None:
            return kernel(x[:, None], y[None, :], t)
        k, l = derivative
        return kernel.derivative(k, l, x[:, None], y[None, :], t)

    vals = evaluate(x)
    if grid.boundary == "periodic":
        period = grid.x_max - grid.x_min
        vals = vals + evaluate(x - period) + evaluate(x + period)
    return vals * grid.quad_weights[None, :]


@dataclass
class SolveReport:
    dt: float
    n_steps: int = 0
    boundary_fraction_max: float = 0.0
    min_value: float = 0.0
    warnings: list = field(default_factory=list)


@dataclass
class SolveResult:
    times: np.ndarray
    snapshots: list
    report: SolveReport

    def __iter__(self):
        return iter(self.snapshots)

    def __getitem__(self, i):
        return self.snapshots[i]


def _stability_dt(D, dx, vmax=0.0):
    dt = 0.4 * dx * dx / (2.0 * D)
    if vmax > 0:
        dt = min(dt, 0.5 * dx / vmax)
    return dt


def _march(u0_field, rhs, times, dt, report):
    """Fixed-step RK4 from times[0] through each requested output time."""
    grid = u0_field.grid
    u = u0_field.values.copy()
    peak0 = max(float(np.max(np.abs(u))), 1e-300)
    snapshots = [Field(grid, u.copy())]
    report.min_value = float(np.min(u))
    t = float(times[0])
    for t_next in times[1:]:
        span = float(t_next) - t
        n = max(1, int(np.ceil(span / dt)))
        h = span / n
        for _ in range(n):
            k1 = rhs(u, t)
            k2 = rhs(u + 0.5 * h * k1, t + 0.5 * h)
            k3 = rhs(u + 0.5 * h * k2, t + 0.5 * h)
            k4 = rhs(u + h * k3, t + h)
            u = u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            t += h
            report.n_steps += 1
            if not np.all(np.isfinite(u)) or np.max(np.abs(u)) > GROWTH_CAP * peak0:
                raise BlowupError(f"solution norm grew beyond {GROWTH_CAP:g} x initial "
                                  f"at t = {t:.6g}", t_reached=t)
        t = float(t_next)
        snap = Field(grid, u.copy())
        snapshots.append(snap)
        report.min_value = min(report.min_value, float(np.min(u)))
        if grid.boundary == "dirichlet":
            report.boundary_fraction_max = max(report.boundary_fraction_max,
                                               snap.boundary_fraction())
    if report.boundary_fraction_max > BOUNDARY_MASS_TOL:
        report.warnings.append(
            f"boundary mass fraction reached {report.boundary_fraction_max:.2e} "
            f"(monitor threshold {BOUNDARY_MASS_TOL:g}); widen the grid")
    return snapshots


def solve_nonlinear(u0, model, times, dt=None):
    """Integrate the full nonlinear equation from u0 (a Field) and return
    snapshots at the requested times (the first of which is the start time).
    """
    grid = u0.grid
    x = grid.x
    dx = grid.dx
    times = np.asarray(times, dtype=float)

    static_b = not model.b.time_dependent
    Kb = kernel_matrix(model.b, grid, times[0]) if static_b else None
    has_w = model.W is not None and model.kappa != 0.0
    static_w = has_w and not model.W.time_dependent
    KW = kernel_matrix(model.W, grid, times[0], derivative=(1, 0)) if static_w else None
    static_a = not model.a.time_dependent
    a_vals = np.asarray(model.a(x, times[0]), dtype=float) * np.ones_like(x) \
        if static_a else None
    has_v = model.V is not None

    def rhs(u, t):
        kb = Kb if static_b else kernel_matrix(model.b, grid, t)
        a_arr = a_vals if static_a else np.asarray(model.a(x, t), dtype=float) * np.ones_like(x)
        du = model.D * second_derivative(u, dx, grid.boundary) + a_arr * u \
            - model.kappa * u * (kb @ u)
        if has_v or has_w:
            flux = np.zeros_like(u)
            if has_v:
                flux = flux + np.asarray(model.V.derivative(1, x, t), dtype=float) * u
            if has_w:
                kw = KW if static_w else kernel_matrix(model.W, grid, t, derivative=(1, 0))
                flux = flux + model.kappa * u * (kw @ u)
            du = du - first_derivative(flux, dx, grid.boundary, order=2)
        return du

    if dt is None:
        vmax = 0.0
        if has_v:
            vmax += float(np.max(np.abs(model.V.derivative(1, x, times[0]))))
        if has_w:
            kw0 = KW if static_w else kernel_matrix(model.W, grid, times[0], derivative=(1, 0))
            vmax += model.kappa * float(np.max(np.abs(kw0 @ u0.values)))
        dt = _stability_dt(model.D, dx, vmax)
    report = SolveReport(dt=dt)
    snaps = _march(u0, rhs, times, dt, report)
    return SolveResult(times, snaps, report)


def solve_linear_associated(u0, op, times, dt=None):
    """Integrate the associated linear equation with coefficient fields
    supplied by an AssociatedOperator."""
    grid = u0.grid
    x = grid.x
    dx = grid.dx
    times = np.asarray(times, dtype=float)
    D = op.model.D

    def rhs(u, t):
        du = D * second_derivative(u, dx, grid.boundary) + op.a_field(x, t) * u
        lam = op.lambda_field(x, t)
        if np.any(lam != 0.0):
            du = du - first_derivative(lam * u, dx, grid.boundary, order=2)
        return du

    if dt is None:
        vmax = float(np.max(np.abs(op.lambda_field(x, times[0]))))
        dt = _stability_dt(D, dx, vmax)
    report = SolveReport(dt=dt)
    snaps = _march(u0, rhs, times, dt, report)
    return SolveResult(times, snaps, report)


def solve_linear_perturbation(phi, params, times, dt=None):
    """Integrate the linearized equation around the homogeneous background:
    du/dt = D u_xx + (a - kappa B beta(t)) u - kappa beta(t) (b * u)."""
    from .largetime import background

    grid = phi.grid
    dx = grid.dx
    times = np.asarray(times, dtype=float)
    x = grid.x
    sep = x[:, None] - x[None, :]
    gauss = params.b0 * np.exp(-sep * sep / params.gamma ** 2)
    if grid.boundary == "periodic":
        period = grid.x_max - grid.x_min
        for shift in (-period, period):
            gauss = gauss + params.b0 * np.exp(-(sep + shift) ** 2 / params.gamma ** 2)
    Kb = gauss * grid.quad_weights[None, :]
    B = params.B

    def rhs(u, t):
        bet = background(t, params)
        return params.D * second_derivative(u, dx, grid.boundary) \
            + (params.a - params.kappa * B * bet) * u \
            - params.kappa * bet * (Kb @ u)

    if dt is None:
        dt = _stability_dt(params.D, dx)
    report = SolveReport(dt=dt)
    snaps = _march(phi, rhs, times, dt, report)
    return SolveResult(times, snaps, report)


def trajectory_csv(result, path):
    """Write mass/center/variance of each snapshot: t, mass, center, variance."""
    from .reporting import write_csv
    rows = []
    for t, f in zip(result.times, result.snapshots):
        rows.append((t, f.mass(), f.center(), f.variance()))
    write_csv(path, ["t", "mass", "center", "variance"], rows)


def snapshot_csv(f, path):
    from .reporting import write_csv
    write_csv(path, ["x", "u"], zip(f.grid.x, f.values))
