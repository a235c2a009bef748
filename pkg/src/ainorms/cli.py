"""Command-line entry point for figure reproduction, sweeps and simulation.

Subcommands:

* ``fig1``  - stationary frequencies vs reflection reward r (4 strategies)
* ``fig2``  - RR frequency vs r for several peer sensitivities beta
* ``fig3``  - 2D design-space grid of RR frequency over (r, kappa)
* ``sweep`` - generic 1D/2D sweep, analytic or Monte Carlo engine
* ``stationary`` - single-point stationary analysis (extended or baseline)
* ``simulate``   - one Monte Carlo run: occupancy trace + frequency estimate

Every default of the fig commands is the corresponding figure's parameter
set, so a bare invocation reproduces the experiment. Flags override a
JSON config file (--config), which overrides the built-in defaults; config
keys mirror flag names (game parameters use the standard notation
L, C, S, delta, a, b, c, d, r, kappa, sigma, tau). Each invocation appends
a manifest line (command, argv, resolved parameters, seed, outputs,
duration) to <out-dir>/manifests.jsonl; analytic CSV outputs are
byte-identical across reruns with the same parameters.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

from . import __version__
from .finite_population import DynamicsConfig
from .game_model import (
    BaselineParams,
    ExtendedParams,
    ParameterError,
    baseline_matrix,
    extended_matrix,
)
from .monte_carlo import SimulationRun, occupancy_trace, simulate
from .small_mutation_chain import build_chain, stationary_distribution
from .sweeps import (
    COLUMNS,
    Axis,
    SweepSpec,
    SweepTable,
    design_space_grid,
    find_threshold,
    run_sweep,
    write_csv,
)

GAME_KEYS = ("a", "b", "c", "d", "delta", "r", "kappa", "sigma", "tau")
BASELINE_KEYS = ("L", "C", "S", "delta")

# Common payoff/population defaults of all three experiments.
_FIG_BASE: dict[str, Any] = {
    "a": 1.0, "b": 0.0, "c": 1.0, "d": 2.0, "delta": 1.0,
    "kappa": 1.0, "sigma": 0.4, "tau": 1.0, "r": 0.0,
    "N": 100, "beta": 0.1, "out_dir": "out",
}
FIG1_DEFAULTS = {**_FIG_BASE, "r_min": 0.0, "r_max": 3.0, "r_steps": 61}
# The slow-learning (beta = 0.01) transition stretches far beyond r = 3, so
# the beta-comparison sweep uses a wider reward range by default.
FIG2_DEFAULTS = {**_FIG_BASE, "beta": [0.01, 0.1, 0.5],
                 "r_min": 0.0, "r_max": 6.0, "r_steps": 121}
FIG3_DEFAULTS = {**_FIG_BASE, "r_min": 0.0, "r_max": 3.0, "r_steps": 31,
                 "kappa_min": 0.0, "kappa_max": 3.0, "kappa_steps": 31}
SWEEP_DEFAULTS = {**_FIG_BASE, "engine": "analytic",
                  "mu": None, "steps": 10_000_000, "burn_in": 1_000_000,
                  "seed": None,
                  "r_min": None, "r_max": None, "r_steps": None,
                  "kappa_min": None, "kappa_max": None, "kappa_steps": None}
POINT_DEFAULTS = {**_FIG_BASE, "r": None, "baseline": None,
                  "L": None, "C": None, "S": None}
SIMULATE_DEFAULTS = {**POINT_DEFAULTS, "mu": None, "steps": 1_000_000,
                     "burn_in": 100_000, "thinning": 1_000, "seed": None}


def _add_game_flags(p: argparse.ArgumentParser, with_r: bool) -> None:
    g = p.add_argument_group("game parameters")
    for flag in ("a", "b", "c", "d"):
        g.add_argument(f"--{flag}", type=float, help=f"base payoff {flag}")
    g.add_argument("--delta", type=float, help="legitimacy cost of norm mismatch")
    g.add_argument("--kappa", type=float, help="effort cost of meaningful reflection")
    g.add_argument("--sigma", type=float, help="superficial reflection fraction in [0,1]")
    g.add_argument("--tau", type=float, help="misconduct cost of misuse")
    if with_r:
        g.add_argument("--r", type=float, help="reflection reward")


def _add_baseline_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("baseline game (2 strategies)")
    g.add_argument("--baseline", action="store_true", default=None,
                   help="use the 2-strategy game parameterised by L, C, S, delta")
    g.add_argument("--L", type=float, help="learning benefit of responsible use")
    g.add_argument("--C", type=float, help="effort cost of responsible use")
    g.add_argument("--S", type=float, help="short-term advantage of opportunistic use")


def _add_axis_flags(p: argparse.ArgumentParser, names: Sequence[str]) -> None:
    g = p.add_argument_group("sweep axes")
    for name in names:
        g.add_argument(f"--{name}-min", type=float, help=f"{name} axis lower bound")
        g.add_argument(f"--{name}-max", type=float, help=f"{name} axis upper bound")
        g.add_argument(f"--{name}-steps", type=int, help=f"{name} axis point count")


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--N", type=int, help="population size")
    p.add_argument("--config", type=Path, help="JSON config file mirroring flag names")
    p.add_argument("--out-dir", type=Path, help="output directory (default: out)")


def _add_mc_flags(p: argparse.ArgumentParser, with_thinning: bool = False) -> None:
    g = p.add_argument_group("Monte Carlo")
    g.add_argument("--mu", type=float, help="exploration (mutation) probability")
    g.add_argument("--steps", type=int, help="number of update steps")
    g.add_argument("--burn-in", type=int, help="discarded initial steps")
    if with_thinning:
        g.add_argument("--thinning", type=int, help="record every k-th step")
    g.add_argument("--seed", type=int, help="RNG seed (generated and recorded if omitted)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ainorms",
        description="Stationary AI-use norm frequencies under reflective "
                    "assessment incentives.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p1 = sub.add_parser("fig1", help="stationary frequencies vs reflection reward")
    _add_game_flags(p1, with_r=False)
    p1.add_argument("--beta", type=float, help="peer sensitivity")
    _add_axis_flags(p1, ["r"])
    _add_common_flags(p1)
    p1.set_defaults(func=_cmd_fig1)

    p2 = sub.add_parser("fig2", help="RR frequency vs reward at several peer sensitivities")
    _add_game_flags(p2, with_r=False)
    p2.add_argument("--beta", type=float, action="append",
                    help="peer sensitivity (repeatable)")
    _add_axis_flags(p2, ["r"])
    _add_common_flags(p2)
    p2.set_defaults(func=_cmd_fig2)

    p3 = sub.add_parser("fig3", help="design-space grid of RR frequency over (r, kappa)")
    _add_game_flags(p3, with_r=False)
    p3.add_argument("--beta", type=float, help="peer sensitivity")
    _add_axis_flags(p3, ["r", "kappa"])
    _add_common_flags(p3)
    p3.set_defaults(func=_cmd_fig3)

    ps = sub.add_parser("sweep", help="generic 1D/2D sweep over r and/or kappa")
    _add_game_flags(ps, with_r=True)
    ps.add_argument("--beta", type=float, help="peer sensitivity")
    ps.add_argument("--engine", choices=["analytic", "mc"], help="evaluation engine")
    _add_axis_flags(ps, ["r", "kappa"])
    _add_mc_flags(ps)
    _add_common_flags(ps)
    ps.set_defaults(func=_cmd_sweep)

    pst = sub.add_parser("stationary", help="single-point stationary analysis")
    _add_game_flags(pst, with_r=True)
    _add_baseline_flags(pst)
    pst.add_argument("--beta", type=float, help="peer sensitivity")
    _add_common_flags(pst)
    pst.set_defaults(func=_cmd_stationary)

    psim = sub.add_parser("simulate", help="Monte Carlo run: trace + estimate")
    _add_game_flags(psim, with_r=True)
    _add_baseline_flags(psim)
    psim.add_argument("--beta", type=float, help="peer sensitivity")
    _add_mc_flags(psim, with_thinning=True)
    _add_common_flags(psim)
    psim.set_defaults(func=_cmd_simulate)

    return parser


def _load_config(ns: argparse.Namespace, parser: argparse.ArgumentParser,
                 allowed: Sequence[str]) -> dict:
    if ns.config is None:
        return {}
    try:
        with open(ns.config, "r", encoding="utf-8") as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"cannot read config {ns.config}: {exc}")
    if not isinstance(config, dict):
        parser.error(f"config {ns.config} must be a JSON object")
    unknown = sorted(set(config) - set(allowed))
    if unknown:
        parser.error(f"unknown config keys for this command: {', '.join(unknown)}")
    return config


def _resolve(ns: argparse.Namespace, config: Mapping[str, Any],
             defaults: Mapping[str, Any]) -> dict:
    """Merge flag > config > default for every known key."""
    out = {}
    for key, default in defaults.items():
        value = getattr(ns, key, None)
        if value is None:
            value = config.get(key, default)
        out[key] = value
    return out


def _axis(vals: Mapping[str, Any], name: str,
          parser: argparse.ArgumentParser) -> Axis:
    try:
        return Axis(name, float(vals[f"{name}_min"]), float(vals[f"{name}_max"]),
                    int(vals[f"{name}_steps"]))
    except (ParameterError, TypeError, ValueError) as exc:
        parser.error(f"invalid {name} axis: {exc}")


def _extended_params(vals: Mapping[str, Any],
                     parser: argparse.ArgumentParser) -> ExtendedParams:
    try:
        return ExtendedParams.from_mapping({k: vals[k] for k in GAME_KEYS})
    except (ParameterError, TypeError) as exc:
        parser.error(f"invalid game parameters: {exc}")


def _jsonable(vals: Mapping[str, Any]) -> dict:
    return {k: (str(v) if isinstance(v, Path) else v) for k, v in vals.items()}


def _append_manifest(out_dir: Path, command: str, argv: Sequence[str],
                     vals: Mapping[str, Any], seed: int | None,
                     outputs: Sequence[Path], started: float) -> None:
    record = {
        "command": command,
        "argv": list(argv),
        "parameters": _jsonable(vals),
        "seed": seed,
        "tool_version": __version__,
        "outputs": [str(p) for p in outputs],
        "duration_seconds": round(time.perf_counter() - started, 6),
    }
    with open(out_dir / "manifests.jsonl", "a", encoding="utf-8") as fh:
        fh.write(json.dumps(record) + "\n")


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _finish_sweep_command(command: str, ns: argparse.Namespace, vals: dict,
                          tables: Sequence[SweepTable], meta: dict,
                          seed: int | None, started: float) -> int:
    out_dir = Path(vals["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{command}.csv"
    meta_path = out_dir / f"{command}.meta.json"
    write_csv(tables, csv_path)
    meta = {**meta, "columns": list(COLUMNS), "tool_version": __version__}
    _write_json(meta_path, meta)
    _append_manifest(out_dir, command, ns._argv, vals, seed,
                     [csv_path, meta_path], started)
    print(f"wrote {csv_path}")
    print(f"wrote {meta_path}")
    failed = [(i, msg) for t in tables for (i, msg) in t.failures]
    if failed:
        for index, msg in failed:
            print(f"grid point {index} failed: {msg}", file=sys.stderr)
        return 1
    return 0


def _cmd_fig1(ns: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    started = time.perf_counter()
    config = _load_config(ns, parser, FIG1_DEFAULTS)
    vals = _resolve(ns, config, FIG1_DEFAULTS)
    spec = SweepSpec(
        params=_extended_params(vals, parser),
        dynamics=DynamicsConfig(vals["N"], vals["beta"]),
        axes=(_axis(vals, "r", parser),),
    )
    table = run_sweep(spec)
    threshold = None if table.failures else find_threshold(table, "RR", 0.5)
    if threshold is None:
        print("RR frequency never reaches 0.5 in the sweep range")
    else:
        note = "" if threshold.monotone else " (non-monotone crossing)"
        print(f"RR frequency reaches 0.5 at r = {threshold.coordinate:.4f}{note}")
    meta = {
        "spec": spec.as_dict(),
        "thresholds": [threshold.as_dict()] if threshold else [],
    }
    return _finish_sweep_command("fig1", ns, vals, [table], meta, None, started)


def _cmd_fig2(ns: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    started = time.perf_counter()
    config = _load_config(ns, parser, FIG2_DEFAULTS)
    vals = _resolve(ns, config, FIG2_DEFAULTS)
    betas = vals["beta"]
    if not isinstance(betas, (list, tuple)) or not betas:
        parser.error("fig2 needs a non-empty list of beta values")
    params = _extended_params(vals, parser)
    axis = _axis(vals, "r", parser)
    tables = [
        run_sweep(SweepSpec(params=params,
                            dynamics=DynamicsConfig(vals["N"], beta),
                            axes=(axis,)))
        for beta in betas
    ]
    meta = {"sweeps": [t.spec.as_dict() for t in tables]}
    return _finish_sweep_command("fig2", ns, vals, tables, meta, None, started)


def _cmd_fig3(ns: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    started = time.perf_counter()
    config = _load_config(ns, parser, FIG3_DEFAULTS)
    vals = _resolve(ns, config, FIG3_DEFAULTS)
    spec = SweepSpec(
        params=_extended_params(vals, parser),
        dynamics=DynamicsConfig(vals["N"], vals["beta"]),
        axes=(_axis(vals, "r", parser), _axis(vals, "kappa", parser)),
    )
    table = design_space_grid(spec)
    meta = {"spec": spec.as_dict()}
    return _finish_sweep_command("fig3", ns, vals, [table], meta, None, started)


def _cmd_sweep(ns: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    started = time.perf_counter()
    config = _load_config(ns, parser, SWEEP_DEFAULTS)
    vals = _resolve(ns, config, SWEEP_DEFAULTS)
    axes = []
    for name in ("r", "kappa"):
        keys = [f"{name}_min", f"{name}_max", f"{name}_steps"]
        given = [k for k in keys if vals[k] is not None]
        if not given:
            continue
        if len(given) < len(keys):
            parser.error(f"{name} axis needs all of --{name}-min/--{name}-max/--{name}-steps")
        axes.append(_axis(vals, name, parser))
    if not axes:
        parser.error("sweep needs at least one axis (r and/or kappa)")

    engine = vals["engine"]
    seed = vals["seed"]
    if engine == "analytic":
        if vals["mu"] is not None:
            parser.error("--mu applies only to the Monte Carlo engine (--engine mc)")
        mu = 0.0
    else:
        if vals["mu"] is None or vals["mu"] <= 0:
            parser.error("the Monte Carlo engine needs --mu > 0")
        mu = vals["mu"]
        if seed is None:
            seed = int.from_bytes(os.urandom(8), "little")
            vals["seed"] = seed
    try:
        spec = SweepSpec(
            params=_extended_params(vals, parser),
            dynamics=DynamicsConfig(vals["N"], vals["beta"], mu),
            axes=tuple(axes),
            engine=engine,
            seed=seed,
            mc_steps=vals["steps"],
            mc_burn_in=vals["burn_in"],
        )
    except ParameterError as exc:
        parser.error(str(exc))
    table = run_sweep(spec)
    meta = {"spec": spec.as_dict()}
    return _finish_sweep_command("sweep", ns, vals, [table], meta, seed, started)


def _point_payoffs(vals: Mapping[str, Any], parser: argparse.ArgumentParser):
    """Payoff matrix plus JSON-able game description for point commands."""
    if vals["baseline"]:
        missing = [k for k in BASELINE_KEYS if vals[k] is None]
        if missing:
            parser.error(f"baseline mode needs --{', --'.join(missing)}")
        try:
            params = BaselineParams.from_mapping({k: vals[k] for k in BASELINE_KEYS})
        except ParameterError as exc:
            parser.error(f"invalid baseline parameters: {exc}")
        return baseline_matrix(params), {"game": "baseline",
                                         "params": {k: vals[k] for k in BASELINE_KEYS}}
    if vals["r"] is None:
        parser.error("extended game needs --r (or --baseline with --L/--C/--S/--delta)")
    params = _extended_params(vals, parser)
    return extended_matrix(params), {"game": "extended",
                                     "params": {k: vals[k] for k in GAME_KEYS}}


def _cmd_stationary(ns: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    started = time.perf_counter()
    config = _load_config(ns, parser, POINT_DEFAULTS)
    vals = _resolve(ns, config, POINT_DEFAULTS)
    payoffs, game_info = _point_payoffs(vals, parser)
    chain = build_chain(payoffs, vals["N"], vals["beta"])
    result = stationary_distribution(chain)
    payload = {
        **game_info,
        "population_size": vals["N"],
        "beta": vals["beta"],
        **result.as_record(),
        "transition_matrix": chain.transition_matrix.tolist(),
        "tool_version": __version__,
    }
    print(json.dumps(payload, indent=2))
    if ns.out_dir is not None or "out_dir" in config:
        out_dir = Path(vals["out_dir"])
        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / "stationary.json"
        _write_json(path, payload)
        _append_manifest(out_dir, "stationary", ns._argv, vals, None, [path], started)
        print(f"wrote {path}", file=sys.stderr)
    return 0


def _cmd_simulate(ns: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    started = time.perf_counter()
    config = _load_config(ns, parser, SIMULATE_DEFAULTS)
    vals = _resolve(ns, config, SIMULATE_DEFAULTS)
    if vals["mu"] is None or vals["mu"] <= 0:
        parser.error("simulate needs --mu > 0")
    seed = vals["seed"]
    if seed is None:
        seed = int.from_bytes(os.urandom(8), "little")
        vals["seed"] = seed
    payoffs, game_info = _point_payoffs(vals, parser)
    try:
        run = SimulationRun(
            config=DynamicsConfig(vals["N"], vals["beta"], vals["mu"]),
            payoffs=payoffs,
            steps=vals["steps"],
            seed=seed,
            burn_in=vals["burn_in"],
            thinning=vals["thinning"],
        )
        estimate = simulate(run)
        trace = occupancy_trace(run)
    except ParameterError as exc:
        parser.error(str(exc))
    out_dir = Path(vals["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    trace_path = out_dir / "trace.csv"
    estimate_path = out_dir / "estimate.json"
    trace.write_csv(trace_path)
    payload = {
        **game_info,
        "dynamics": {"population_size": vals["N"], "beta": vals["beta"],
                     "mu": vals["mu"]},
        "steps": vals["steps"],
        "burn_in": vals["burn_in"],
        "thinning": vals["thinning"],
        "seed": seed,
        **estimate.as_record(),
        "tool_version": __version__,
    }
    _write_json(estimate_path, payload)
    _append_manifest(out_dir, "simulate", ns._argv, vals, seed,
                     [trace_path, estimate_path], started)
    print(f"wrote {trace_path}")
    print(f"wrote {estimate_path}")
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    ns._argv = list(argv) if argv is not None else sys.argv[1:]
    try:
        return ns.func(ns, parser)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
