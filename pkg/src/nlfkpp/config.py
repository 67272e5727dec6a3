"""Declarative experiment configuration.

INI-style sections of key = value pairs (parsed by configparser, so the
grammar is: `[section]` headers, one `key = value` per line, `#` or `;`
comments). Every key is validated against the schema below before any
computation runs; unknown sections or keys are rejected, as are values of
the wrong type or out of range. Lists are comma separated.

The full grammar, with each command's required sections, is documented in
the README.
"""

import configparser
from dataclasses import dataclass, field

from .model import (ModelSpec, constant_coefficient, cosine_gaussian_kernel,
                    constant_kernel, gaussian_kernel, polynomial_coefficient)


class ConfigError(Exception):
    """Invalid configuration; carries a machine-readable error list."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


def _parse_float(s):
    return float(s)


def _parse_positive(s):
    v = float(s)
    if not v > 0:
        raise ValueError("must be positive")
    return v


def _parse_nonneg(s):
    v = float(s)
    if v < 0:
        raise ValueError("must be nonnegative")
    return v


def _parse_int(s):
    return int(s)


def _parse_pos_int(s):
    v = int(s)
    if v <= 0:
        raise ValueError("must be a positive integer")
    return v


def _parse_floats(s):
    return tuple(float(tok) for tok in s.split(",") if tok.strip())


def _parse_ints(s):
    return tuple(int(tok) for tok in s.split(",") if tok.strip())


def _choice(*opts):
    def parse(s):
        v = s.strip()
        if v not in opts:
            raise ValueError(f"must be one of {opts}")
        return v

    return parse


SCHEMA = {
    "model": {
        "d": _parse_positive,
        "kappa": _parse_nonneg,
        "a_family": _choice("constant", "polynomial"),
        "a_value": _parse_float,
        "a_coeffs": _parse_floats,
        "kernel_family": _choice("gaussian", "cosine_gaussian", "constant"),
        "b0": _parse_float,
        "gamma": _parse_positive,
        "k0": _parse_float,
        "v_coeffs": _parse_floats,
        "w_family": _choice("none", "gaussian", "cosine_gaussian"),
        "w_b0": _parse_float,
        "w_gamma": _parse_positive,
        "w_k0": _parse_float,
    },
    "ee": {
        "m": _parse_pos_int,
        "sigma0": _parse_positive,
        "x0": _parse_float,
        "alpha0": _parse_floats,
        "t_end": _parse_positive,
        "rtol": _parse_positive,
        "atol": _parse_positive,
    },
    "germ": {
        "b": _parse_positive,
        "branch": _choice("minus", "plus"),
    },
    "coherent": {
        "n_list": _parse_ints,
        "times": _parse_floats,
    },
    "largetime": {
        "a": _parse_positive,
        "b0": _parse_float,
        "gamma": _parse_positive,
        "kappa": _parse_nonneg,
        "d": _parse_positive,
        "beta0": _parse_positive,
        "eps": _parse_positive,
        "theta": _parse_positive,
        "x0": _parse_float,
        "amplitude": _parse_positive,
        "n_profile": _parse_int,
        "m_max": _parse_pos_int,
        "times": _parse_floats,
        "t_scan_end": _parse_positive,
        "t_scan_step": _parse_positive,
        "mode_threshold": _parse_positive,
        "with_u2": _choice("yes", "no"),
    },
    "oracle": {
        "x_min": _parse_float,
        "x_max": _parse_float,
        "n_nodes": _parse_pos_int,
        "boundary": _choice("dirichlet", "periodic"),
        "dt": _parse_float,
        "snapshots": _parse_floats,
        "initial": _choice("vacuum", "gaussian"),
    },
    "compare": {
        "d_values": _parse_floats,
        "t_eval": _parse_positive,
        "n_state": _parse_int,
        "order_threshold": _parse_positive,
    },
    "residual": {
        "d_values": _parse_floats,
        "t_probe": _parse_positive,
    },
    "output": {
        "dir": str,
    },
}

DEFAULTS = {
    "model": {"kappa": 1.0, "a_family": "constant", "a_value": 1.0,
              "kernel_family": "gaussian", "b0": 1.0, "gamma": 1.0,
              "k0": 0.0, "w_family": "none", "w_b0": 0.0, "w_gamma": 1.0,
              "w_k0": 0.0},
    "ee": {"m": 2, "x0": 0.0, "t_end": 1.0, "rtol": 1e-10, "atol": 1e-10},
    "germ": {"b": 1.0, "branch": "minus"},
    "coherent": {"n_list": (0,), "times": (0.0, 0.5, 1.0)},
    "largetime": {"x0": 0.0, "amplitude": 1.0, "n_profile": 0, "m_max": 8,
                  "times": (0.5, 1.0), "t_scan_end": 6.0, "t_scan_step": 0.25,
                  "mode_threshold": 0.5, "with_u2": "no"},
    "oracle": {"boundary": "dirichlet", "dt": 0.0, "initial": "vacuum"},
    "compare": {"d_values": (0.02, 0.01, 0.005, 0.0025), "t_eval": 1.0,
                "n_state": 0, "order_threshold": 1.2},
    "residual": {"d_values": (0.02, 0.01, 0.005), "t_probe": 0.5},
    "output": {"dir": "out"},
}


@dataclass
class ExperimentConfig:
    sections: dict = field(default_factory=dict)
    path: str = "<memory>"

    def section(self, name, command=""):
        if name not in self.sections:
            raise ConfigError(
                [f"section [{name}] is required"
                 + (f" by command '{command}'" if command else "")])
        return self.sections[name]

    def get(self, section, key):
        return self.sections.get(section, {}).get(key)

    def resolved(self):
        """JSON-friendly dump of every resolved value (for sidecars)."""
        return {s: {k: (list(v) if isinstance(v, tuple) else v)
                    for k, v in kv.items()}
                for s, kv in self.sections.items()}


def load_config(path):
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    errors = []
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError([f"cannot read config: {exc}"])
    except configparser.Error as exc:
        raise ConfigError([f"config syntax: {exc}"])

    sections = {}
    for name in parser.sections():
        if name not in SCHEMA:
            errors.append(f"unknown section [{name}]")
            continue
        schema = SCHEMA[name]
        out = dict(DEFAULTS.get(name, {}))
        for key, raw in parser.items(name):
            if key not in schema:
                errors.append(f"unknown key '{key}' in [{name}]")
                continue
            try:
                out[key] = schema[key](raw)
            except ValueError as exc:
                errors.append(f"[{name}] {key} = {raw!r}: {exc}")
        sections[name] = out
    if errors:
        raise ConfigError(errors)
    cfg = ExperimentConfig(sections, path)
    _cross_validate(cfg)
    return cfg


def _cross_validate(cfg):
    errors = []
    model = cfg.sections.get("model")
    if model is not None:
        if "d" not in model:
            errors.append("[model] d is required")
        if model.get("a_family") == "polynomial" and "a_coeffs" not in model:
            errors.append("[model] a_family = polynomial needs a_coeffs")
        if model.get("kernel_family") == "cosine_gaussian" and model.get("k0") == 0.0:
            errors.append("[model] cosine_gaussian kernel needs a nonzero k0")
    ee = cfg.sections.get("ee")
    if ee is not None:
        if "sigma0" not in ee:
            errors.append("[ee] sigma0 is required")
        if "alpha0" not in ee:
            errors.append("[ee] alpha0 is required")
        else:
            m = ee.get("m", 2)
            if not 2 <= m <= 5:
                errors.append("[ee] m must lie in 2..5")
            elif len(ee["alpha0"]) != m - 1:
                errors.append(f"[ee] alpha0 needs {m - 1} entries for m = {m}")
    lt = cfg.sections.get("largetime")
    if lt is not None:
        for req in ("a", "b0", "gamma", "kappa", "d", "beta0", "eps", "theta"):
            if req not in lt:
                errors.append(f"[largetime] {req} is required")
    oracle = cfg.sections.get("oracle")
    if oracle is not None:
        for req in ("x_min", "x_max", "n_nodes", "snapshots"):
            if req not in oracle:
                errors.append(f"[oracle] {req} is required")
        if "x_min" in oracle and "x_max" in oracle \
                and not oracle["x_min"] < oracle["x_max"]:
            errors.append("[oracle] x_min must be below x_max")
    coh = cfg.sections.get("coherent")
    if coh is not None:
        if any(n < 0 for n in coh["n_list"]):
            errors.append("[coherent] state indices must be nonnegative")
    if errors:
        raise ConfigError(errors)


def build_model(cfg):
    """ModelSpec from the [model] section."""
    m = cfg.section("model")
    if m["a_family"] == "constant":
        a = constant_coefficient(m.get("a_value", 1.0))
    else:
        a = polynomial_coefficient(m["a_coeffs"])
    fam = m["kernel_family"]
    if fam == "gaussian":
        b = gaussian_kernel(m["b0"], m["gamma"])
    elif fam == "cosine_gaussian":
        b = cosine_gaussian_kernel(m["b0"], m["gamma"], m["k0"])
    else:
        b = constant_kernel(m["b0"])
    V = polynomial_coefficient(m["v_coeffs"]) if "v_coeffs" in m else None
    W = None
    if m["w_family"] == "gaussian":
        W = gaussian_kernel(m["w_b0"], m["w_gamma"])
    elif m["w_family"] == "cosine_gaussian":
        W = cosine_gaussian_kernel(m["w_b0"], m["w_gamma"], m["w_k0"])
    return ModelSpec(D=m["d"], kappa=m["kappa"], a=a, b=b, V=V, W=W)


def build_largetime_params(cfg):
    from .largetime import LargeTimeParams
    lt = cfg.section("largetime")
    return LargeTimeParams(a=lt["a"], b0=lt["b0"], gamma=lt["gamma"],
                           kappa=lt["kappa"], D=lt["d"], beta0=lt["beta0"],
                           eps=lt["eps"], theta=lt["theta"], x0=lt["x0"],
                           N=lt["amplitude"], n=lt["n_profile"])
