"""Experiment runner: reproduce the convergence studies from a config file.

Subcommands
-----------
run <config>      sweep (method, theta, window) combinations, write one CSV
                  row per iteration plus a summary JSON with measured
                  iteration counts next to the theory predictions.
compare <config>  run several methods on the same windows at their
                  finite-step-optimal weights and write one aligned CSV.
theory ...        print the finite-step bound, symmetric rate, and minimum
                  delay for a geometry.
version           print the package version.

Configs are flat INI files.  Values that stand for functions come from a
small named whitelist (zero, poly:..., xexp:..., ramp_from_v0) rather than
an expression parser, so a config fully determines a run.  Every default is
written back out as an effective config next to the results.

Exit codes: 0 success, 2 config error, 3 numerical failure in some
combination (remaining combinations still run and are reported).
"""

from __future__ import annotations

import argparse
import configparser
import json
import os
import re
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import __version__
from .benchmark import default_discretization
from .core import SpaceTimeField, WaveProblem
from .stepper import FluxMode, StartMode
from .theory import SymbolSpec, finite_step_bound, symbol_power, symmetric_rate
from .waveform import MONODOMAIN_TRACE, Method, WrConfig, monodomain_solve, poly_t2, run_method

__all__ = ["main", "run_experiment", "compare_methods", "ConfigError"]

CSV_HEADER = "method,theta,T,dx,dt,iteration,error_linf_l2,trace_error_l2,wallclock_ms"

_METHODS = {
    "dnwr": Method.DNWR,
    "nnwr": Method.NNWR,
    "swr_classical": Method.SWR_CLASSICAL,
    "swr_optimized": Method.SWR_OPTIMIZED,
}
_OPTIMAL_THETA = {Method.DNWR: 0.5, Method.NNWR: 0.25}

_KNOWN_KEYS = {
    "problem": {"x_left", "x_right", "interface", "wave_speed", "u0", "v0", "f", "g_left", "g_right"},
    "discretization": {"dx", "dt"},
    "run": {
        "methods", "thetas", "windows", "max_iterations", "tolerance",
        "flux_mode", "start_mode", "overlap_cells", "initial_guess",
    },
    "output": {"dir"},
}

_DEFAULTS = {
    "problem": {
        "x_left": "-3", "x_right": "2", "interface": "0", "wave_speed": "1",
        "u0": "zero", "v0": "xexp:1,-1", "f": "zero",
        "g_left": "ramp_from_v0", "g_right": "ramp_from_v0",
    },
    "discretization": {"dx": "0.02", "dt": "0.02"},
    "run": {
        "methods": "dnwr nnwr", "thetas": "0.5", "windows": "16",
        "max_iterations": "25", "tolerance": "1e-10",
        "flux_mode": "scheme_consistent", "start_mode": "exact_dalembert",
        "overlap_cells": "24", "initial_guess": "poly_t2",
    },
    "output": {"dir": "waverelax_out"},
}


class ConfigError(Exception):
    """Invalid configuration; the message carries a file/line diagnostic."""


def _line_of(path: Path, key: str) -> Optional[int]:
    try:
        for lineno, line in enumerate(path.read_text().splitlines(), start=1):
            if re.match(rf"\s*{re.escape(key)}\s*[=:]", line):
                return lineno
    except OSError:
        pass
    return None


def _fail(path: Path, section: str, key: str, message: str) -> None:
    lineno = _line_of(path, key)
    where = f"{path}:{lineno}" if lineno else f"{path} [{section}] {key}"
    raise ConfigError(f"{where}: {key}: {message}")


def _parse_space_function(text: str):
    """Whitelisted functions of x: zero | poly:c0,c1,... | xexp:A,alpha."""
    text = text.strip()
    if text == "zero":
        return None
    if text.startswith("poly:"):
        coeffs = [float(c) for c in text[5:].split(",")]
        return lambda x: np.polynomial.polynomial.polyval(np.asarray(x, dtype=float), coeffs)
    if text.startswith("xexp:"):
        amp, rate = (float(c) for c in text[5:].split(","))
        return lambda x: amp * np.asarray(x, dtype=float) * np.exp(rate * np.asarray(x, dtype=float))
    raise ValueError(f"unknown function form {text!r} (expected zero, poly:..., or xexp:...)")


def _parse_boundary_function(text: str, endpoint: float, v0):
    """Whitelisted functions of t; ramp_from_v0 is t * v0(endpoint)."""
    text = text.strip()
    if text == "ramp_from_v0":
        slope = 0.0 if v0 is None else float(v0(np.asarray(endpoint)))
        return lambda t: slope * np.asarray(t, dtype=float)
    return _parse_space_function(text)


@dataclass
class ExperimentConfig:
    problem: WaveProblem
    dx: float
    dt: float
    methods: List[Method]
    thetas: List[float]
    windows: List[float]
    max_iterations: int
    tolerance: float
    flux_mode: FluxMode
    start_mode: StartMode
    overlap_cells: int
    initial_guess: object
    initial_guess_name: str
    out_dir: Path
    raw: configparser.ConfigParser


def load_config(path: Path) -> ExperimentConfig:
    cp = configparser.ConfigParser()
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc

    for section in cp.sections():
        if section not in _KNOWN_KEYS:
            raise ConfigError(f"{path}: unknown section [{section}]")
        for key in cp[section]:
            if key not in _KNOWN_KEYS[section]:
                _fail(path, section, key, "unknown key")

    merged = configparser.ConfigParser()
    for section, defaults in _DEFAULTS.items():
        merged[section] = dict(defaults)
        if cp.has_section(section):
            merged[section].update(cp[section])

    def get_float(section: str, key: str) -> float:
        try:
            return float(merged[section][key])
        except ValueError:
            _fail(path, section, key, f"not a number: {merged[section][key]!r}")

    def get_floats(section: str, key: str) -> List[float]:
        raw = merged[section][key].replace(",", " ").split()
        try:
            return [float(v) for v in raw]
        except ValueError:
            _fail(path, section, key, f"not a number list: {merged[section][key]!r}")

    try:
        v0 = _parse_space_function(merged["problem"]["v0"])
        u0 = _parse_space_function(merged["problem"]["u0"])
        f = merged["problem"]["f"].strip()
        if f != "zero":
            _fail(path, "problem", "f", "only the zero source is whitelisted")
        x_left = get_float("problem", "x_left")
        x_right = get_float("problem", "x_right")
        g_left = _parse_boundary_function(merged["problem"]["g_left"], x_left, v0)
        g_right = _parse_boundary_function(merged["problem"]["g_right"], x_right, v0)
        problem = WaveProblem(
            x_left=x_left,
            x_right=x_right,
            interface=get_float("problem", "interface"),
            wave_speed=get_float("problem", "wave_speed"),
            u0=u0,
            v0=v0,
            g_left=g_left,
            g_right=g_right,
            f=None,
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{path}: [problem]: {exc}") from exc

    method_names = merged["run"]["methods"].replace(",", " ").split()
    if not method_names:
        _fail(path, "run", "methods", "empty method list")
    methods = []
    for name in method_names:
        if name.lower() not in _METHODS:
            _fail(path, "run", "methods", f"unknown method {name!r}")
        methods.append(_METHODS[name.lower()])

    thetas = sorted(get_floats("run", "thetas"))
    if any(m in (Method.DNWR, Method.NNWR) for m in methods) and not thetas:
        _fail(path, "run", "thetas", "theta list must be nonempty for dnwr/nnwr runs")
    windows = sorted(get_floats("run", "windows"))
    if not windows:
        _fail(path, "run", "windows", "window list must be nonempty")

    flux_name = merged["run"]["flux_mode"].strip().lower()
    start_name = merged["run"]["start_mode"].strip().lower()
    try:
        flux_mode = FluxMode(flux_name)
    except ValueError:
        _fail(path, "run", "flux_mode", f"unknown flux mode {flux_name!r}")
    try:
        start_mode = StartMode(start_name)
    except ValueError:
        _fail(path, "run", "start_mode", f"unknown start mode {start_name!r}")

    guess_name = merged["run"]["initial_guess"].strip().lower()
    guesses = {"poly_t2": poly_t2, "zero": None, "monodomain_trace": MONODOMAIN_TRACE}
    if guess_name not in guesses:
        _fail(path, "run", "initial_guess", f"unknown selector {guess_name!r}")

    try:
        max_iterations = int(merged["run"]["max_iterations"])
    except ValueError:
        _fail(path, "run", "max_iterations", "not an integer")
    try:
        overlap_cells = int(merged["run"]["overlap_cells"])
    except ValueError:
        _fail(path, "run", "overlap_cells", "not an integer")

    out_dir = Path(os.environ.get("WAVERELAX_OUTPUT_DIR", merged["output"]["dir"]))
    return ExperimentConfig(
        problem=problem,
        dx=get_float("discretization", "dx"),
        dt=get_float("discretization", "dt"),
        methods=methods,
        thetas=thetas,
        windows=windows,
        max_iterations=max_iterations,
        tolerance=get_float("run", "tolerance"),
        flux_mode=flux_mode,
        start_mode=start_mode,
        overlap_cells=overlap_cells,
        initial_guess=guesses[guess_name],
        initial_guess_name=guess_name,
        out_dir=out_dir,
        raw=merged,
    )


def _fmt(v: float) -> str:
    # errors carry 17 significant digits so CSV values round-trip exactly
    return f"{float(v):.17g}"


def _fmt_param(v: float) -> str:
    # shortest round-trip form for parameter columns (0.9 stays "0.9")
    return repr(float(v))


def _theory_block(method: Method, theta: float, problem: WaveProblem, t_final: float) -> Optional[dict]:
    if method not in (Method.DNWR, Method.NNWR):
        return None
    return {
        "finite_step_bound": finite_step_bound(
            method, problem.a, problem.b, problem.wave_speed, t_final
        ),
        "symmetric_rate": symmetric_rate(method, theta),
    }


def _run_combinations(
    cfg: ExperimentConfig, combos: List[Tuple[Method, float, float]]
) -> Tuple[List[str], List[dict], bool]:
    """Execute combinations in order; returns CSV rows, summaries, failure flag."""
    rows: List[str] = []
    summaries: List[dict] = []
    failed = False
    reference_cache: Dict[Tuple[float, float, float], SpaceTimeField] = {}
    for method, theta, t_final in combos:
        entry = {
            "method": method.value,
            "theta": theta,
            "T": t_final,
            "dx": cfg.dx,
            "dt": cfg.dt,
            "tolerance": cfg.tolerance,
            "theory": _theory_block(method, theta, cfg.problem, t_final),
        }
        try:
            disc = default_discretization(t_final, cfg.dx, cfg.dt, cfg.problem.wave_speed)
            key = (cfg.dx, cfg.dt, t_final)
            if key not in reference_cache:
                reference_cache[key] = monodomain_solve(cfg.problem, disc, cfg.start_mode)
            wr_cfg = WrConfig(
                method=method,
                theta=theta if theta > 0 else 0.5,
                max_iterations=cfg.max_iterations,
                tolerance=cfg.tolerance,
                initial_guess=cfg.initial_guess,
                overlap_cells=cfg.overlap_cells,
                flux_mode=cfg.flux_mode,
                start_mode=cfg.start_mode,
            )
            result = run_method(cfg.problem, disc, wr_cfg, reference=reference_cache[key])
        except Exception as exc:
            entry.update(status="failed", message=str(exc))
            summaries.append(entry)
            failed = True
            continue
        errors = result.history.field_errors()
        if not np.all(np.isfinite(errors)):
            entry.update(status="failed", message="nonfinite error (solver blew up)")
            summaries.append(entry)
            failed = True
            continue
        for r in result.history:
            rows.append(
                ",".join(
                    [
                        method.value,
                        _fmt_param(theta),
                        _fmt_param(t_final),
                        _fmt_param(cfg.dx),
                        _fmt_param(cfg.dt),
                        str(r.iteration),
                        _fmt(r.field_error),
                        _fmt(r.trace_error),
                        f"{r.wallclock_ms:.3f}",
                    ]
                )
            )
        entry.update(
            status="ok",
            converged=result.converged,
            iterations_run=result.iterations_run,
            iterations_to_tolerance=result.iterations_to(cfg.tolerance),
            final_error=float(errors[-1]),
        )
        summaries.append(entry)
    return rows, summaries, failed


def _write_outputs(
    cfg: ExperimentConfig, csv_name: str, rows: List[str], summaries: List[dict], command: str
) -> None:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    (cfg.out_dir / csv_name).write_text("\n".join([CSV_HEADER] + rows) + "\n")
    summary = {
        "command": command,
        "tolerance": cfg.tolerance,
        "initial_guess": cfg.initial_guess_name,
        "flux_mode": cfg.flux_mode.value,
        "start_mode": cfg.start_mode.value,
        "combinations": summaries,
    }
    (cfg.out_dir / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    with open(cfg.out_dir / "effective_config.ini", "w") as fh:
        cfg.raw.write(fh)


def run_experiment(config_path: Path) -> int:
    """The ``run`` subcommand: sweep every (method, theta, window) combination."""
    cfg = load_config(config_path)
    combos: List[Tuple[Method, float, float]] = []
    for method in cfg.methods:
        if method in (Method.DNWR, Method.NNWR):
            combos += [(method, th, T) for th in cfg.thetas for T in cfg.windows]
        else:
            # the Schwarz variants take no relaxation weight; theta column reads 0
            combos += [(method, 0.0, T) for T in cfg.windows]
    rows, summaries, failed = _run_combinations(cfg, combos)
    _write_outputs(cfg, "convergence.csv", rows, summaries, "run")
    return 3 if failed else 0


def compare_methods(config_path: Path) -> int:
    """The ``compare`` subcommand: all listed methods at their optimal weights."""
    cfg = load_config(config_path)
    if len(cfg.methods) < 2:
        raise ConfigError(f"{config_path}: [run] methods: compare needs at least 2 methods")
    combos = [
        (method, _OPTIMAL_THETA.get(method, 0.0), T)
        for method in cfg.methods
        for T in cfg.windows
    ]
    rows, summaries, failed = _run_combinations(cfg, combos)
    _write_outputs(cfg, "comparison.csv", rows, summaries, "compare")
    return 3 if failed else 0


def theory_report(method_name: str, a: float, b: float, c: float, t_final: float, theta: float) -> int:
    name = method_name.strip().lower()
    if name not in ("dnwr", "nnwr"):
        print(f"theory subcommand supports dnwr and nnwr, not {method_name!r}", file=sys.stderr)
        return 2
    method = _METHODS[name]
    try:
        bound = finite_step_bound(method, a, b, c, t_final)
        rate = symmetric_rate(method, theta)
        spec = SymbolSpec(method, theta, a, b, c)
        min_delay = symbol_power(spec, 1, t_final).min_delay()
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    print(f"method: {name}")
    print(f"finite_step_bound: {bound}")
    print(f"symmetric_rate: {_fmt(rate)}")
    print(f"min_delay: {'none' if min_delay is None else _fmt(min_delay)}")
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="waverelax",
        description="waveform-relaxation convergence experiments for the 1D wave equation",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run the (method, theta, window) sweep of a config")
    p_run.add_argument("config", type=Path)
    p_cmp = sub.add_parser("compare", help="compare several methods at optimal weights")
    p_cmp.add_argument("config", type=Path)
    p_th = sub.add_parser("theory", help="print finite-step bound, rate, and minimum delay")
    for arg, typ in (("method", str), ("a", float), ("b", float), ("c", float), ("T", float), ("theta", float)):
        p_th.add_argument(arg, type=typ)
    sub.add_parser("version", help="print the package version")

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return run_experiment(args.config)
        if args.command == "compare":
            return compare_methods(args.config)
        if args.command == "theory":
            return theory_report(args.method, args.a, args.b, args.c, args.T, args.theta)
        if args.command == "version":
            print(__version__)
            return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
