"""Command-line interface: spectrum, wavefunction, bound and verify subcommands.

Exit codes: 0 success, 1 I/O error, 2 validation error, 3 convergence or
verification failure.  ``--config`` reads a flat JSON object whose keys are
long flag names (``n-r`` or ``n_r``); explicit flags take precedence.
"""
from __future__ import annotations

import argparse
import io
import json
import logging
import math
import os
import sys

import numpy as np

from . import verify as verify_mod
from .angular import (
    angular_wavefunction,
    azimuthal,
    energy_upper_bound,
    solve_angular_params,
    theta_domain,
)
from .assembler import solve_coupled
from .model import (
    AngularSpec,
    Constants,
    ConvergenceError,
    Family,
    RadialKind,
    RadialSpec,
    SpectraError,
    ValidationError,
    require_valid,
)
from .radial import radial_energy, radial_wavefunction

log = logging.getLogger("spinor_spectra")

EXIT_OK, EXIT_IO, EXIT_VALIDATION, EXIT_CONVERGENCE = 0, 1, 2, 3
LOG_LEVELS = {"quiet": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}

DEFAULTS = {
    "radial": "coulomb", "v0lambda": 1.0, "k": 1.0, "angular": "f1",
    "alpha": 0.0, "beta": 0.0, "gamma": 0.0, "m": 0, "n_r": 0, "n_theta": 0,
    "mass": 1.0, "c": 1.0, "factor": "radial", "samples": 200, "out": None,
    "format": None, "tol": None, "suite": "all", "l": None, "eta": None,
    "xmin": None, "xmax": None,
}
FORMAT_DEFAULT = {"spectrum": "json", "bound": "json", "wavefunction": "csv",
                  "verify": "csv"}
HEADERS = {"radial": ("r", "u_re", "u_im"), "angular": ("theta", "theta_re", "theta_im"),
           "azimuthal": ("phi", "phi_re", "phi_im")}


class CliIOError(SpectraError):
    pass


def _add_common(p):
    # defaults are None so config values can fill anything not given explicitly
    p.add_argument("--config", help="JSON file with flag values")
    p.add_argument("--radial", choices=[k.value for k in RadialKind])
    p.add_argument("--v0lambda", type=float, help="Coulomb strength V0*lambda")
    p.add_argument("--k", type=float, help="oscillator strength K")
    p.add_argument("--angular", choices=[f.value for f in Family])
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float, help="for f3: the imaginary coefficient b")
    p.add_argument("--gamma", type=float)
    p.add_argument("--m", type=int)
    p.add_argument("--n-r", dest="n_r", type=int)
    p.add_argument("--n-theta", dest="n_theta", type=int)
    p.add_argument("--mass", type=float)
    p.add_argument("--c", type=float)
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--tol", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spinor-spectra", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sp = sub.add_parser("spectrum", help="self-consistent bound-state energy")
    _add_common(sp)
    wf = sub.add_parser("wavefunction", help="sample one factor of the upper spinor")
    _add_common(wf)
    wf.add_argument("--factor", choices=tuple(HEADERS))
    wf.add_argument("--samples", type=int)
    wf.add_argument("--l", type=float, help="radial factor at this l, skipping the coupling")
    wf.add_argument("--eta", type=float, help="angular factor at this eta, skipping the coupling")
    wf.add_argument("--xmin", type=float)
    wf.add_argument("--xmax", type=float)
    bd = sub.add_parser("bound", help="family energy upper bound")
    _add_common(bd)
    bd.add_argument("--eta", type=float, help="evaluate at this eta instead of the bound state")
    vf = sub.add_parser("verify", help="run the verification suite")
    _add_common(vf)
    vf.add_argument("--suite", choices=verify_mod.SUITES)
    return parser


def _load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliIOError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise CliIOError(f"config {path} must hold a JSON object")
    out = {}
    for key, value in data.items():
        name = key.replace("-", "_")
        if name not in DEFAULTS:
            raise ValidationError(f"unknown config key {key!r}", [f"unknown key {key}"])
        out[name] = value
    return out


def resolve(args) -> dict:
    """Merge defaults < config file < explicit flags."""
    cfg = dict(DEFAULTS)
    if args.config:
        cfg.update(_load_config(args.config))
    for key, value in vars(args).items():
        if key in cfg and value is not None:
            cfg[key] = value
    if cfg["format"] is None:
        cfg["format"] = FORMAT_DEFAULT[args.command]
    if cfg["format"] not in ("csv", "json"):
        raise ValidationError("format must be csv or json", ["format in {csv, json} required"])
    return cfg


def _constants(cfg):
    const = Constants(float(cfg["mass"]), float(cfg["c"]))
    require_valid(const)
    return const


def _angular_spec(cfg):
    spec = AngularSpec(Family(cfg["angular"]), float(cfg["alpha"]), float(cfg["beta"]),
                       float(cfg["gamma"]), int(cfg["m"]), int(cfg["n_theta"]))
    require_valid(spec)
    return spec


def _strength(cfg):
    return float(cfg["v0lambda"] if cfg["radial"] == "coulomb" else cfg["k"])


def _bound_state(cfg):
    kwargs = {"tol": cfg["tol"]} if cfg["tol"] is not None else {}
    return solve_coupled(_constants(cfg), cfg["radial"], _strength(cfg), _angular_spec(cfg),
                         int(cfg["n_r"]), **kwargs)


def _spectrum(cfg):
    state = _bound_state(cfg)
    en = state.energy
    tau_or_omega = en.tau if state.radial.kind is RadialKind.COULOMB else en.omega
    lam = complex(state.solution.lam)
    return {
        "epsilon": state.epsilon, "rho": state.rho, "l_effective": state.l_effective,
        "s": state.solution.s, "lambda": [lam.real, lam.imag],
        "tau_or_omega": tau_or_omega, "converged": state.converged,
        "iterations": state.iterations,
    }


def _bound(cfg):
    const, spec = _constants(cfg), _angular_spec(cfg)
    if cfg["eta"] is not None:
        sol, eps = solve_angular_params(const, spec, float(cfg["eta"])), None
    else:
        state = _bound_state(cfg)
        sol, eps = state.solution, state.epsilon
    try:
        bound = energy_upper_bound(spec, sol, const)
    except ZeroDivisionError as exc:
        raise ValidationError(str(exc), [str(exc)]) from exc
    out = {"family": spec.family.value, "bound": bound, "eta": sol.eta}
    if eps is not None:
        out.update(epsilon=eps, satisfied=bool(eps <= bound))
    return out


def _mesh(lo, hi, n, open_left=True, open_right=True):
    full = np.linspace(lo, hi, n + int(open_left) + int(open_right))
    return full[int(open_left):full.size - int(open_right)]


def _wavefunction(cfg):
    const, factor, n = _constants(cfg), cfg["factor"], int(cfg["samples"])
    if n < 1:
        raise ValidationError("samples must be positive", ["samples >= 1 required"])
    xmin, xmax = cfg["xmin"], cfg["xmax"]
    if factor == "azimuthal":
        lo = 0.0 if xmin is None else float(xmin)
        hi = 2 * math.pi if xmax is None else float(xmax)
        return azimuthal(int(cfg["m"]), _mesh(lo, hi, n, False, True))
    if factor == "radial":
        if cfg["l"] is not None:
            spec = RadialSpec(RadialKind(cfg["radial"]), _strength(cfg), int(cfg["n_r"]),
                              float(cfg["l"]))
            energy = radial_energy(const, spec)
        else:
            state = _bound_state(cfg)
            spec, energy = state.radial, state.energy
        if spec.kind is RadialKind.COULOMB:
            default_hi = 40.0 * (spec.n_r + 1) / energy.k_scale
        else:
            default_hi = math.sqrt(16.0 * (spec.n_r + 2) / energy.omega)
        lo = 0.0 if xmin is None else float(xmin)
        hi = default_hi if xmax is None else float(xmax)
        r = _mesh(lo, hi, n, xmin is None or lo <= 0.0, False)
        return radial_wavefunction(const, spec, energy, r)
    spec = _angular_spec(cfg)
    if cfg["eta"] is not None:
        sol = solve_angular_params(const, spec, float(cfg["eta"]))
    else:
        sol = _bound_state(cfg).solution
    lo, hi = theta_domain(spec.family)
    th = _mesh(lo if xmin is None else float(xmin), hi if xmax is None else float(xmax), n,
               xmin is None, xmax is None)
    return angular_wavefunction(sol, spec, th)


def _fmt(x) -> str:
    return format(float(x), ".17g")


def grid_csv(g, factor) -> str:
    buf = io.StringIO(newline="")
    buf.write(",".join(HEADERS[factor]) + "\n")
    for x, v in zip(g.abscissae, g.values):
        buf.write(f"{_fmt(x)},{_fmt(v.real)},{_fmt(v.imag)}\n")
    return buf.getvalue()


def grid_json(g, factor) -> dict:
    keys = HEADERS[factor]
    return {keys[0]: g.abscissae.tolist(), keys[1]: g.values.real.tolist(),
            keys[2]: g.values.imag.tolist()}


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _record_csv(record) -> str:
    flat = {}
    for k, v in record.items():
        if isinstance(v, list):
            flat[f"{k}_re"], flat[f"{k}_im"] = v
        else:
            flat[k] = v
    cells = [_fmt(v) if isinstance(v, float) else str(v).lower() if isinstance(v, bool)
             else str(v) for v in flat.values()]
    return ",".join(flat) + "\n" + ",".join(cells) + "\n"


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    try:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliIOError(f"cannot write {out}: {exc}") from exc


def _dispatch(command, cfg) -> int:
    fmt = cfg["format"]
    if command == "spectrum" or command == "bound":
        record = _spectrum(cfg) if command == "spectrum" else _bound(cfg)
        _emit(dumps(record) if fmt == "json" else _record_csv(record), cfg["out"])
        return EXIT_OK
    if command == "wavefunction":
        g = _wavefunction(cfg)
        text = dumps(grid_json(g, cfg["factor"])) if fmt == "json" else grid_csv(g, cfg["factor"])
        _emit(text, cfg["out"])
        return EXIT_OK
    tol = verify_mod.ENERGY_TOL if cfg["tol"] is None else float(cfg["tol"])
    results = verify_mod.run_suite(cfg["suite"], tol)
    if fmt == "json":
        text = dumps([{"key": r.key, "name": r.name, "passed": r.passed, "detail": r.detail,
                       "seconds": round(r.seconds, 3)} for r in results])
    else:
        text = "".join(r.line() + "\n" for r in results)
    _emit(text, cfg["out"])
    return EXIT_OK if all(r.passed for r in results) else EXIT_CONVERGENCE


def _configure_logging():
    level = os.environ.get("SPINOR_SPECTRA_LOG", "quiet").lower()
    logging.basicConfig(stream=sys.stderr, level=LOG_LEVELS.get(level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _fail(code, kind, message, fmt, violations=()):
    sys.stderr.write(f"error: {message}\n")
    if fmt == "json":
        sys.stdout.write(dumps({"error": kind, "message": message, "exit_code": code,
                                "violations": list(violations)}))
    return code


def run(argv=None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    fmt = args.format
    try:
        cfg = resolve(args)
        fmt = cfg["format"]
        return _dispatch(args.command, cfg)
    except CliIOError as exc:
        return _fail(EXIT_IO, "io", str(exc), fmt)
    except ValidationError as exc:
        return _fail(EXIT_VALIDATION, "validation", str(exc), fmt, exc.violations)
    except ConvergenceError as exc:
        return _fail(EXIT_CONVERGENCE, "convergence", str(exc), fmt)
    except (ValueError, TypeError) as exc:
        # bad config values that slipped past the parser
        return _fail(EXIT_VALIDATION, "validation", str(exc), fmt)


def main() -> None:
    sys.exit(run())
