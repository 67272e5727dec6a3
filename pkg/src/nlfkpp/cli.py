"""Config-driven command line frontend.

    nlfkpp <command> --config experiment.ini [--out DIR] [--seed N]
                     [--jobs N] [--strict]

Commands: ee, germ, coherent, residual, direct, largetime, compare,
acceptance. Each reads the sections it needs from the config, writes CSV
artifacts plus a JSON metadata sidecar recording the fully resolved
configuration, and emits a small matplotlib script per plot so figures can
be regenerated anywhere.

Exit codes: 0 success, 2 configuration error, 3 numeric failure,
4 acceptance failure.
"""

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .config import (ConfigError, build_largetime_params, build_model,
                     load_config)
from .errors import NlfkppError
from .grids import Field, FieldGrid
from .reporting import write_csv, write_sidecar

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_ACCEPTANCE = 4


def _meta(cfg, args, extra=None):
    meta = {"command": args.command, "seed": args.seed,
            "version": __version__, "config": cfg.resolved()}
    if extra:
        meta.update(extra)
    return meta


def _plot_script(out_dir, name, body):
    path = os.path.join(out_dir, f"plot_{name}.py")
    with open(path, "w") as fh:
        fh.write("#!/usr/bin/env python3\n"
                 "# regenerate the figure from the CSV artifacts next to this script\n"
                 "import csv\nimport os.path as _p\n"
                 "import matplotlib.pyplot as plt\n\n"
                 "HERE = _p.dirname(_p.abspath(__file__))\n\n"
                 "def load(name):\n"
                 "    with open(_p.join(HERE, name)) as fh:\n"
                 "        rows = list(csv.reader(fh))\n"
                 "    head, data = rows[0], rows[1:]\n"
                 "    cols = {h: [float(r[i]) for r in data] for i, h in enumerate(head)}\n"
                 "    return cols\n\n" + body)
    return path


def _ee_pipeline(cfg):
    from .moments import MomentState, integrate_ee
    model = build_model(cfg)
    ee = cfg.section("ee", "ee")
    theta0 = MomentState(ee["sigma0"], ee["x0"], tuple(ee["alpha0"]))
    traj = integrate_ee(theta0, (0.0, ee["t_end"]), model,
                        rtol=ee["rtol"], atol=ee["atol"])
    return model, traj


def cmd_ee(cfg, out, args):
    model, traj = _ee_pipeline(cfg)
    path = os.path.join(out, "ee_trajectory.csv")
    traj.write_csv(path)
    write_sidecar(path, _meta(cfg, args))
    _plot_script(out, "ee",
                 "c = load('ee_trajectory.csv')\n"
                 "fig, ax = plt.subplots(3, 1, sharex=True)\n"
                 "ax[0].plot(c['t'], c['sigma']); ax[0].set_ylabel('mass')\n"
                 "ax[1].plot(c['t'], c['x']); ax[1].set_ylabel('center')\n"
                 "ax[2].plot(c['t'], c['alpha2']); ax[2].set_ylabel('variance')\n"
                 "ax[2].set_xlabel('t')\nplt.savefig(_p.join(HERE, 'ee.png'), dpi=150)\n")
    print(f"wrote {path}")
    return []


def cmd_germ(cfg, out, args):
    from .germ import integrate_variations
    model, traj = _ee_pipeline(cfg)
    g = cfg.section("germ", "germ")
    germ = integrate_variations(traj, g["b"])
    path = os.path.join(out, "germ.csv")
    germ.write_csv(path)
    write_sidecar(path, _meta(cfg, args, {
        "skew_drift_max": germ.skew_drift_max,
        "plus_focal_times": list(germ.plus_focal_times),
        "branch": g["branch"],
    }))
    _plot_script(out, "germ",
                 "c = load('germ.csv')\n"
                 "fig, ax = plt.subplots(2, 1, sharex=True)\n"
                 "for k in ('Wm', 'Zm', 'Wp', 'Zp'):\n"
                 "    ax[0].plot(c['t'], c[k], label=k)\n"
                 "ax[0].legend(); ax[1].plot(c['t'], c['Q'], label='Q')\n"
                 "ax[1].legend(); ax[1].set_xlabel('t')\n"
                 "plt.savefig(_p.join(HERE, 'germ.png'), dpi=150)\n")
    print(f"wrote {path} (skew drift max {germ.skew_drift_max:.2e})")
    return []


def _state_grid(sol, t_end, n=1201, margin=8.0):
    width0 = math.sqrt(max(sol.traj.alpha(0.0), 1e-12))
    width1 = math.sqrt(max(sol.traj.alpha(t_end), width0 ** 2))
    c0, c1 = sol.traj.x(0.0), sol.traj.x(t_end)
    lo = min(c0, c1) - margin * width1
    hi = max(c0, c1) + margin * width1
    return FieldGrid(lo, hi, n)


def cmd_coherent(cfg, out, args):
    from .coherent import assemble_solution
    model = build_model(cfg)
    coh = cfg.section("coherent", "coherent")
    ee = cfg.sections.get("ee", {})
    germ_b = cfg.sections.get("germ", {}).get("b", 1.0)
    x0 = ee.get("x0", 0.0)
    times = coh["times"]
    odd = [n for n in coh["n_list"] if n % 2]
    if odd:
        raise ConfigError([f"[coherent] odd state indices {odd} assemble to "
                           "the zero function; list even indices only"])
    const_rows = []
    for n in coh["n_list"]:
        sol = assemble_solution(n, model, (0.0, max(times)), germ_b=germ_b, x0=x0)
        st0 = sol.traj.initial
        const_rows.append((n, st0.sigma, st0.x, st0.alpha2))
        grid = _state_grid(sol, max(times))
        for i, t in enumerate(times):
            path = os.path.join(out, f"state_n{n}_t{i}.csv")
            write_csv(path, ["x", "u"], zip(grid.x, sol(grid.x, t)))
            write_sidecar(path, _meta(cfg, args, {"n": n, "t": t}))
            print(f"wrote {path}")
    cpath = os.path.join(out, "constants.csv")
    write_csv(cpath, ["n", "sigma0", "x0", "alpha2_0"], const_rows,
              meta=_meta(cfg, args))
    _plot_script(out, "coherent",
                 f"ns = {list(coh['n_list'])}\n"
                 f"nt = {len(times)}\n"
                 "for n in ns:\n"
                 "    for i in range(nt):\n"
                 "        c = load(f'state_n{n}_t{i}.csv')\n"
                 "        plt.plot(c['x'], c['u'], label=f'n={n}, t index {i}')\n"
                 "plt.legend(); plt.xlabel('x')\n"
                 "plt.savefig(_p.join(HERE, 'coherent.png'), dpi=150)\n")
    print(f"wrote {cpath}")
    return []


def _residual_for_d(cfg, D, t_probe):
    from .coherent import CoherentState, initial_moment_constants, vacuum
    from .germ import integrate_variations
    from .linearized import AssociatedOperator, residual_from_snapshots
    from .moments import integrate_ee
    base = build_model(cfg)
    model = type(base)(D=D, kappa=base.kappa, a=base.a, b=base.b,
                       V=base.V, W=base.W)
    germ_b = cfg.sections.get("germ", {}).get("b", 1.0)
    constants = initial_moment_constants(0, D, germ_b, 0.0)
    traj = integrate_ee(constants, (0.0, t_probe + 0.1), model)
    germ = integrate_variations(traj, germ_b)
    cs = CoherentState(germ, 0)
    op = AssociatedOperator(traj, model)
    width = math.sqrt(traj.alpha(t_probe))
    grid = FieldGrid(traj.x(t_probe) - 10 * width,
                     traj.x(t_probe) + 10 * width, 1001)
    dt = 1e-4
    v0 = Field(grid, vacuum(grid.x, t_probe - dt, cs))
    v1 = Field(grid, vacuum(grid.x, t_probe + dt, cs))
    _, resid = residual_from_snapshots(v0, v1, t_probe - dt, t_probe + dt, op)
    vm = Field(grid, vacuum(grid.x, t_probe, cs))
    return resid.norm_l2(), resid.norm_l2() / vm.norm_l2()


def cmd_residual(cfg, out, args):
    res = cfg.section("residual", "residual")
    ds = res["d_values"]
    t_probe = res["t_probe"]
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        rows = list(pool.map(lambda D: _residual_for_d(cfg, D, t_probe), ds))
    from .linearized import residual_report_csv
    for i, (d, r) in enumerate(zip(ds, rows)):
        sub = os.path.join(out, f"residual_d{i}.csv")
        residual_report_csv(sub, [(t_probe, r[0], r[1])])
        write_sidecar(sub, _meta(cfg, args, {"d": d}))
    table = [(d, t_probe, r[0], r[1]) for d, r in zip(ds, rows)]
    slope = float(np.polyfit(np.log(ds), np.log([r[1] for r in rows]), 1)[0])
    path = os.path.join(out, "residual_vs_d.csv")
    write_csv(path, ["d", "t", "residual_L2", "residual_over_norm"], table,
              meta=_meta(cfg, args, {"fitted_slope": slope}))
    _plot_script(out, "residual",
                 "c = load('residual_vs_d.csv')\n"
                 "plt.loglog(c['d'], c['residual_over_norm'], 'o-')\n"
                 "plt.xlabel('D'); plt.ylabel('relative residual')\n"
                 "plt.savefig(_p.join(HERE, 'residual.png'), dpi=150)\n")
    print(f"wrote {path} (residual slope {slope:.3f})")
    return []


def cmd_direct(cfg, out, args):
    from .direct import solve_nonlinear, trajectory_csv
    model = build_model(cfg)
    o = cfg.section("oracle", "direct")
    grid = FieldGrid(o["x_min"], o["x_max"], o["n_nodes"], o["boundary"])
    times = list(o["snapshots"])
    if o["initial"] == "vacuum":
        from .coherent import CoherentState, initial_moment_constants, vacuum
        from .germ import integrate_variations
        from .moments import integrate_ee
        germ_b = cfg.sections.get("germ", {}).get("b", 1.0)
        x0 = cfg.sections.get("ee", {}).get("x0", 0.0)
        constants = initial_moment_constants(0, model.D, germ_b, x0)
        traj = integrate_ee(constants, (0.0, max(times)), model)
        cs = CoherentState(integrate_variations(traj, germ_b), 0)
        u0 = Field(grid, vacuum(grid.x, times[0], cs))
    else:
        ee = cfg.section("ee", "direct (gaussian initial data)")
        var = ee["alpha0"][0]
        amp = ee["sigma0"] / math.sqrt(2 * math.pi * var)
        u0 = Field.from_function(grid, lambda x: amp * np.exp(
            -(x - ee["x0"]) ** 2 / (2 * var)))
    dt = o["dt"] if o["dt"] > 0 else None
    result = solve_nonlinear(u0, model, times, dt=dt)
    for w in result.report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    if args.strict and result.report.warnings:
        raise NlfkppError("warnings promoted to errors (--strict): "
                          + "; ".join(result.report.warnings))
    for i, (t, f) in enumerate(zip(result.times, result.snapshots)):
        path = os.path.join(out, f"direct_t{i}.csv")
        write_csv(path, ["x", "u"], zip(f.grid.x, f.values),
                  meta=_meta(cfg, args, {"t": float(t)}))
        print(f"wrote {path}")
    tpath = os.path.join(out, "direct_trajectory.csv")
    trajectory_csv(result, tpath)
    write_sidecar(tpath, _meta(cfg, args, {
        "dt": result.report.dt, "n_steps": result.report.n_steps,
        "boundary_fraction_max": result.report.boundary_fraction_max,
        "min_value": result.report.min_value,
        "warnings": result.report.warnings}))
    _plot_script(out, "direct",
                 f"nt = {len(times)}\n"
                 "for i in range(nt):\n"
                 "    c = load(f'direct_t{i}.csv')\n"
                 "    plt.plot(c['x'], c['u'], label=f'snapshot {i}')\n"
                 "plt.legend(); plt.xlabel('x'); plt.ylabel('u')\n"
                 "plt.savefig(_p.join(HERE, 'direct.png'), dpi=150)\n")
    print(f"wrote {tpath}")
    return []


def cmd_largetime(cfg, out, args):
    from .largetime import (background, chi, coefficients, mode_count,
                            scan_modes, u1_series, u2_correction)
    p = build_largetime_params(cfg)
    lt = cfg.section("largetime")
    t_grid = np.arange(0.0, lt["t_scan_end"] + 1e-12, lt["t_scan_step"])
    bpath = os.path.join(out, "background.csv")
    write_csv(bpath, ["t", "beta", "chi"],
              [(t, background(t, p), chi(t, p)) for t in t_grid],
              meta=_meta(cfg, args))
    series = coefficients(p.n, list(lt["times"]), lt["m_max"], p)
    cpath = os.path.join(out, "coefficients.csv")
    series.write_csv(cpath)
    write_sidecar(cpath, _meta(cfg, args))
    grid = FieldGrid(p.x0 - 20, p.x0 + 20, 1201)
    for i, t in enumerate(lt["times"]):
        u = background(t, p) + p.eps * u1_series(grid.x, t, p)
        spath = os.path.join(out, f"perturbed_t{i}.csv")
        write_csv(spath, ["x", "u"], zip(grid.x, u),
                  meta=_meta(cfg, args, {"t": float(t)}))
        print(f"wrote {spath}")
        if lt["with_u2"] == "yes":
            u2 = u2_correction(grid, t, p)
            u2path = os.path.join(out, f"u2_t{i}.csv")
            write_csv(u2path, ["x", "u2"], zip(grid.x, u2.values),
                      meta=_meta(cfg, args, {"t": float(t)}))
            print(f"wrote {u2path}")
    timeline, first = scan_modes(p, t_grid, grid, lt["mode_threshold"])
    mpath = os.path.join(out, "modes.csv")
    write_csv(mpath, ["t", "mode_count"], timeline,
              meta=_meta(cfg, args, {"first_multimodal_time": first}))
    _plot_script(out, "largetime",
                 "c = load('background.csv')\n"
                 "fig, ax = plt.subplots(2, 1)\n"
                 "ax[0].plot(c['t'], c['beta']); ax[0].set_ylabel('background')\n"
                 "m = load('modes.csv')\n"
                 "ax[1].step(m['t'], m['mode_count']); ax[1].set_ylabel('modes')\n"
                 "ax[1].set_xlabel('t')\n"
                 "plt.savefig(_p.join(HERE, 'largetime.png'), dpi=150)\n")
    print(f"wrote {bpath}, {cpath}, {mpath} "
          f"(first multimodal time: {first})")
    return []


def _compare_for_d(cfg, D, t_eval, n_state):
    from .coherent import assemble_solution
    from .direct import solve_nonlinear
    base = build_model(cfg)
    model = type(base)(D=D, kappa=base.kappa, a=base.a, b=base.b,
                       V=base.V, W=base.W)
    germ_b = cfg.sections.get("germ", {}).get("b", 1.0)
    x0 = cfg.sections.get("ee", {}).get("x0", 0.0)
    sol = assemble_solution(n_state, model, (0.0, t_eval), germ_b=germ_b, x0=x0)
    width = math.sqrt(sol.traj.alpha(t_eval))
    grid = FieldGrid(sol.traj.x(t_eval) - 9 * width,
                     sol.traj.x(t_eval) + 9 * width, 481)
    u0 = sol.initial_field(grid)
    got = solve_nonlinear(u0, model, [0.0, t_eval])[-1].values
    expect = sol(grid.x, t_eval)
    return float(np.linalg.norm(got - expect) / np.linalg.norm(got))


def cmd_compare(cfg, out, args):
    comp = cfg.section("compare", "compare")
    ds = comp["d_values"]
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        errs = list(pool.map(
            lambda D: _compare_for_d(cfg, D, comp["t_eval"], comp["n_state"]),
            ds))
    order = float(np.polyfit(np.log(ds), np.log(errs), 1)[0])
    path = os.path.join(out, "compare.csv")
    write_csv(path, ["d", "rel_l2_error"], list(zip(ds, errs)),
              meta=_meta(cfg, args, {"fitted_order": order,
                                     "threshold": comp["order_threshold"]}))
    _plot_script(out, "compare",
                 "c = load('compare.csv')\n"
                 "plt.loglog(c['d'], c['rel_l2_error'], 'o-')\n"
                 "plt.xlabel('D'); plt.ylabel('relative L2 error')\n"
                 "plt.savefig(_p.join(HERE, 'compare.png'), dpi=150)\n")
    ok = order >= comp["order_threshold"]
    print(f"wrote {path}")
    print(f"[{'PASS' if ok else 'FAIL'}] fitted order {order:.3f} "
          f"(threshold {comp['order_threshold']})")
    if not ok and args.strict:
        raise NlfkppError(f"convergence order {order:.3f} below threshold")
    return []


def cmd_acceptance(cfg, out, args):
    from .acceptance import run_all
    results = run_all(seed=args.seed)
    rows = [(r.number, r.name, "PASS" if r.passed else "FAIL",
             round(r.seconds, 2), r.detail.replace(",", ";"))
            for r in results]
    path = os.path.join(out, "acceptance.csv")
    write_csv(path, ["number", "name", "status", "seconds", "detail"], rows,
              meta=_meta(cfg, args))
    for r in results:
        print(r.line)
    n_fail = sum(0 if r.passed else 1 for r in results)
    print(f"wrote {path}; {len(results) - n_fail}/{len(results)} criteria passed")
    return EXIT_ACCEPTANCE if n_fail else EXIT_OK


COMMANDS = {
    "ee": cmd_ee,
    "germ": cmd_germ,
    "coherent": cmd_coherent,
    "residual": cmd_residual,
    "direct": cmd_direct,
    "largetime": cmd_largetime,
    "compare": cmd_compare,
    "acceptance": cmd_acceptance,
}


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="nlfkpp",
        description="Asymptotic and direct solvers for the 1D nonlocal "
                    "Fisher-KPP equation")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, help="experiment INI file")
    parser.add_argument("--out", default=None, help="output directory "
                        "(overrides [output] dir)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--strict", action="store_true",
                        help="promote warnings to errors")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        json.dump({"errors": exc.errors}, sys.stderr, indent=2)
        sys.stderr.write("\n")
        return EXIT_CONFIG

    out = args.out or cfg.sections.get("output", {}).get("dir", "out")
    try:
        os.makedirs(out, exist_ok=True)
        status = COMMANDS[args.command](cfg, out, args)
    except ConfigError as exc:
        json.dump({"errors": exc.errors}, sys.stderr, indent=2)
        sys.stderr.write("\n")
        return EXIT_CONFIG
    except NlfkppError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return status if isinstance(status, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
