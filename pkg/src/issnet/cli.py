"""Command line: simulate, certify, wellposed, truncate, traffic-demo.

Configuration comes from an optional JSON file plus flag overrides.
The fully resolved configuration is echoed into the output directory,
and a rerun with the echoed file reproduces every CSV/JSON artifact
byte for byte.  Exit codes: 0 when every verdict in the run passed,
2 when a verdict failed (reports are still written), 1 for usage,
schema, or IO errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Sequence

from . import figures, zoo
from .certify import (
    StateGridSpec,
    check_M_step_decrease,
    check_storage_bounds,
    necessity_construct,
    small_gain_check,
)
from .comparison import Exponential, Linear
from .errors import CertificateRefused, SpecError
from .network import InputSignal, NetworkSpec, StateWindow, spec_from_json
from .report import CertificateReport, Tolerances, write_json, write_witness_csv
from .rng import uniform01_at
from .sim import simulate, write_trajectory_csv
from .traffic import (
    TrafficParams,
    build_traffic_network,
    intermediate_bound_check,
    run_scaling_experiment,
    traffic_certificate,
)
from .truncate import (
    build_truncation,
    check_truncated_decay,
    consistency_check,
    record_interface_signal,
    simulate_truncated,
)
from .wellposed import (
    SET_FORM_1,
    SET_FORM_2,
    STATE_NORM,
    KBoundEstimate,
    SamplePlan,
    check_growth_bound,
    falsify_uniformity,
)


class UsageError(Exception):
    """Bad flags, bad config file, or unusable referenced paths."""


# ---------------------------------------------------------------------------
# Config schema and resolution.

_ANY = object()  # schema leaf whose shape is validated at the use site

_TOLERANCES_SCHEMA = {"atol": None, "rtol": None}
_TRAFFIC_PARAMS_SCHEMA = {
    "period": None,
    "inflow_share": None,
    "exit_share": None,
    "entry_rate": None,
    "gain_margin": None,
    "speed_min": None,
    "speed_max": None,
    "length_min": None,
    "length_max": None,
}
_INITIAL_SCHEMA = {"kind": None, "low": None, "high": None, "value": None, "values": _ANY, "default": None}
_INPUT_SCHEMA = {"kind": None, "level": None}

_COMMON_SCHEMA = {
    "command": None,
    "out": None,
    "seed": None,
    "figures": None,
    "tolerances": _TOLERANCES_SCHEMA,
}
_NETWORK_SCHEMA = {
    "network": None,
    "network_path": None,
    "traffic_params": _TRAFFIC_PARAMS_SCHEMA,
}

_SCHEMAS: dict[str, dict] = {
    "simulate": {
        **_COMMON_SCHEMA,
        **_NETWORK_SCHEMA,
        "horizon": None,
        "observed": _ANY,
        "initial": _INITIAL_SCHEMA,
        "input": _INPUT_SCHEMA,
    },
    "certify": {
        **_COMMON_SCHEMA,
        **_NETWORK_SCHEMA,
        "m_steps": None,
        "decay": None,
        "input_gain_slope": None,
        "window": None,
        "state_grid": {"radius": None, "target_points": None, "max_enumeration": None, "seed": None},
        "input_grid": _ANY,
        "gain_radius": None,
        "gain_grid_n": None,
    },
    "wellposed": {
        **_COMMON_SCHEMA,
        **_NETWORK_SCHEMA,
        "variant": None,
        "constant": None,
        "kappa_slope": None,
        "kappa1_slope": None,
        "kappa2_slope": None,
        "m_steps": None,
        "plan": {"index_window": None, "state_radius": None, "input_radius": None, "samples": None},
        "radii": _ANY,
        "cap": None,
    },
    "truncate": {
        **_COMMON_SCHEMA,
        **_NETWORK_SCHEMA,
        "n": None,
        "horizon": None,
        "initial": _INITIAL_SCHEMA,
        "input": _INPUT_SCHEMA,
        "beta": {"scale": None, "rate": None},
        "gamma_slope": None,
    },
    "traffic-demo": {
        **_COMMON_SCHEMA,
        "traffic_params": _TRAFFIC_PARAMS_SCHEMA,
        "sizes": _ANY,
        "horizon": None,
        "observed_cap": None,
    },
}

_DEFAULTS: dict[str, dict] = {
    "simulate": {
        "horizon": 20,
        "observed": {"first": 8},
        "initial": {"kind": "uniform", "low": 0.0, "high": 20.0},
        "input": {"kind": "zero"},
    },
    "certify": {
        "m_steps": 1,
        "decay": 0.5,
        "input_gain_slope": 1.0,
        "window": 64,
        "state_grid": {"radius": 20.0, "target_points": 1000},
        "input_grid": [0.0, 1.0],
        "gain_radius": 10.0,
        "gain_grid_n": 256,
    },
    "wellposed": {
        "variant": "state-norm",
        "constant": 0.0,
        "kappa_slope": 1.0,
        "m_steps": 1,
        "plan": {"index_window": 32, "state_radius": 10.0, "input_radius": 1.0, "samples": 32},
        "radii": [0.25, 0.5, 1.0],
        "cap": 100.0,
    },
    "truncate": {
        "n": 100,
        "horizon": 50,
        "initial": {"kind": "uniform", "low": 0.0, "high": 20.0},
        "input": {"kind": "zero"},
    },
    "traffic-demo": {
        "sizes": [100, 1000, 10000],
        "horizon": 500,
        "observed_cap": 40,
    },
}

_COMMON_DEFAULTS = {
    "out": "issnet-out",
    "seed": 0,
    "figures": True,
    "tolerances": {"atol": 1e-9, "rtol": 1e-9},
}


def _validate_fields(data: Any, schema: Mapping[str, Any], where: str) -> None:
    if not isinstance(data, dict):
        raise UsageError(f"{where or '/'}: expected an object")
    for key in data:
        if key not in schema:
            raise UsageError(f"{where}/{key}: unknown field")
        sub = schema[key]
        if isinstance(sub, dict):
            _validate_fields(data[key], sub, f"{where}/{key}")


def _merge(base: dict, override: Mapping) -> dict:
    out = dict(base)
    for key, value in override.items():
        if isinstance(value, Mapping) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


@dataclass
class RunConfig:
    """Fully resolved run: command plus every option with defaults applied."""

    command: str
    options: dict
    out: Path
    seed: int
    tolerances: Tolerances
    figures: bool


def parse_config(command: str, config_path: str | None = None, overrides: Mapping | None = None) -> RunConfig:
    """Resolve defaults <- config file <- flag overrides, then validate."""
    schema = _SCHEMAS.get(command)
    if schema is None:
        raise UsageError(f"unknown command {command!r}")
    options = _merge(_COMMON_DEFAULTS, _DEFAULTS[command])
    if config_path is not None:
        try:
            with open(config_path, "r", encoding="utf-8") as fh:
                loaded = json.load(fh)
        except OSError as e:
            raise UsageError(f"cannot read config {config_path}: {e}") from e
        except json.JSONDecodeError as e:
            raise UsageError(f"config {config_path} is not valid JSON: {e}") from e
        _validate_fields(loaded, schema, "")
        stated = loaded.get("command")
        if stated is not None and stated != command:
            raise UsageError(f"config file is for command {stated!r}, invoked as {command!r}")
        options = _merge(options, loaded)
    if overrides:
        options = _merge(options, {k: v for k, v in overrides.items() if v is not None})
    options.pop("command", None)
    _validate_fields(options, schema, "")
    if options.get("network") and options.get("network_path"):
        raise UsageError("give either a built-in network name or a network file, not both")
    tol = options["tolerances"]
    try:
        tolerances = Tolerances(atol=float(tol["atol"]), rtol=float(tol["rtol"]))
    except (KeyError, TypeError, ValueError) as e:
        raise UsageError(f"/tolerances: {e}") from e
    if tolerances.atol <= 0 or tolerances.rtol < 0:
        raise UsageError("/tolerances: atol must be positive and rtol nonnegative")
    path = options.get("network_path")
    if path is not None and not Path(path).is_file():
        raise UsageError(f"/network_path: no such file: {path}")
    return RunConfig(
        command=command,
        options=options,
        out=Path(options["out"]),
        seed=int(options["seed"]),
        tolerances=tolerances,
        figures=bool(options["figures"]),
    )


# ---------------------------------------------------------------------------
# Shared builders.

_BUILTIN_NAMES = ("traffic", "scalar-chain", "two-class-pair", "index-scaled", "decoupled-doubling")


def _network_from(cfg: RunConfig) -> NetworkSpec:
    path = cfg.options.get("network_path")
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as e:
                raise UsageError(f"network file {path} is not valid JSON: {e}") from e
        try:
            return spec_from_json(data)
        except SpecError as e:
            raise UsageError(f"network file {path}: {e}") from e
    name = cfg.options.get("network") or "traffic"
    if name == "traffic":
        return build_traffic_network(_traffic_params(cfg))
    if name == "scalar-chain":
        return zoo.scalar_chain()
    if name == "two-class-pair":
        return zoo.two_class_pair()
    if name == "index-scaled":
        return zoo.index_scaled_family()
    if name == "decoupled-doubling":
        return zoo.decoupled(2.0)
    raise UsageError(f"unknown built-in network {name!r}; available: {', '.join(_BUILTIN_NAMES)}")


def _traffic_params(cfg: RunConfig) -> TrafficParams:
    raw = cfg.options.get("traffic_params") or {}
    try:
        return TrafficParams(**raw)
    except (TypeError, SpecError) as e:
        raise UsageError(f"/traffic_params: {e}") from e


def _observed_list(value: Any) -> list[int]:
    if isinstance(value, Mapping):
        first = int(value.get("first", 0))
        if first < 1:
            raise UsageError("/observed/first must be >= 1")
        return list(range(1, first + 1))
    if isinstance(value, Sequence) and not isinstance(value, (str, bytes)):
        got = sorted({int(i) for i in value})
        if not got or got[0] < 1:
            raise UsageError("/observed must list indices >= 1")
        return got
    raise UsageError('/observed must be a list of indices or {"first": n}')


def _initial_window(spec: NetworkSpec, cfg: Mapping, seed: int) -> StateWindow:
    kind = cfg.get("kind", "uniform")
    if kind == "uniform":
        low = float(cfg.get("low", 0.0))
        high = float(cfg.get("high", 20.0))
        if not high >= low:
            raise UsageError("/initial: need high >= low")

        def rule(i: int):
            return tuple(low + (high - low) * uniform01_at(seed, i, c) for c in range(spec.state_dim(i)))

        return StateWindow(default_rule=rule)
    if kind == "zero":
        return StateWindow(default_rule=lambda i: (0.0,) * spec.state_dim(i))
    if kind == "constant":
        value = float(cfg.get("value", 0.0))
        return StateWindow(default_rule=lambda i: (value,) * spec.state_dim(i))
    if kind == "map":
        values = cfg.get("values")
        if not isinstance(values, Mapping):
            raise UsageError('/initial/values must map indices to state lists')
        entries = {int(i): tuple(float(c) for c in v) for i, v in values.items()}
        default = cfg.get("default")
        if default == "zero":
            return StateWindow(entries, default_rule=lambda i: (0.0,) * spec.state_dim(i))
        if default is None:
            return StateWindow(entries)
        raise UsageError('/initial/default must be "zero" or omitted')
    raise UsageError(f"/initial/kind: unknown kind {kind!r}")


def _input_signal(spec: NetworkSpec, cfg: Mapping) -> InputSignal:
    kind = cfg.get("kind", "zero")
    if kind == "zero":
        return InputSignal.zero(spec)
    if kind == "constant":
        return InputSignal.constant(spec, float(cfg.get("level", 1.0)))
    raise UsageError(f"/input/kind: unknown kind {kind!r}")


def _echo_config(cfg: RunConfig) -> None:
    cfg.out.mkdir(parents=True, exist_ok=True)
    write_json(cfg.out / "config.json", {"command": cfg.command, **cfg.options})


def _verdict(passed: bool) -> str:
    return "pass" if passed else "fail"


def _series_from_states(states: Sequence[Mapping[int, tuple]], indices: Sequence[int]) -> dict[int, list[float]]:
    # first state component only; enough for the fan figure
    return {i: [float(w[i][0]) for w in states if i in w] for i in indices}


# ---------------------------------------------------------------------------
# Commands.


def _cmd_simulate(cfg: RunConfig) -> int:
    spec = _network_from(cfg)
    horizon = int(cfg.options["horizon"])
    observed = _observed_list(cfg.options["observed"])
    initial = _initial_window(spec, cfg.options["initial"], cfg.seed)
    signal = _input_signal(spec, cfg.options["input"])
    traj = simulate(spec, initial, signal, horizon, observed)
    restricted = [{i: w[i] for i in observed if i in w} for w in traj.states]
    write_trajectory_csv(cfg.out / "trajectories.csv", restricted)
    report = {
        "command": "simulate",
        "verdict": "pass",
        "horizon": horizon,
        "observed": observed,
        "cone_size_at_start": len(traj.states[0]),
        "input_sup_norm": signal.declared_sup_norm,
        "artifacts": ["trajectories.csv"],
    }
    write_json(cfg.out / "report.json", report)
    if cfg.figures:
        figures.trajectory_fan(_series_from_states(traj.states, observed), cfg.out / "trajectories.png", title="observed states")
    return 0


def _cmd_certify(cfg: RunConfig) -> int:
    spec = _network_from(cfg)
    opts = cfg.options
    m_steps = int(opts["m_steps"])
    grid = StateGridSpec(
        radius=float(opts["state_grid"].get("radius", 20.0)),
        target_points=int(opts["state_grid"].get("target_points", 1000)),
        max_enumeration=int(opts["state_grid"].get("max_enumeration", 20000)),
        seed=int(opts["state_grid"].get("seed", cfg.seed)),
    )
    input_grid = [float(v) for v in opts["input_grid"]]
    is_traffic = opts.get("network_path") is None and (opts.get("network") or "traffic") == "traffic"
    checks: list[CertificateReport] = []
    extra: dict[str, Any] = {}
    try:
        if is_traffic:
            params = _traffic_params(cfg)
            family, gains, alpha, gub = traffic_certificate(params)
            extra["alpha"] = alpha
            extra["gamma_u_bar"] = gub
            checks.append(intermediate_bound_check(params, radius=grid.radius, tolerances=cfg.tolerances))
        else:
            family, gains = necessity_construct(spec, float(opts["decay"]), Linear(float(opts["input_gain_slope"])), m_steps)
    except CertificateRefused as e:
        write_json(
            cfg.out / "report.json",
            {"command": "certify", "verdict": "refused", "reason": str(e), "margin": e.margin},
        )
        return 2
    checks.append(small_gain_check(gains, float(opts["gain_radius"]), int(opts["gain_grid_n"]), cfg.tolerances))
    checks.append(check_storage_bounds(family, spec, grid, int(opts["window"]), cfg.tolerances))
    checks.append(
        check_M_step_decrease(
            spec, family, gains, m_steps, grid, input_grid, int(opts["window"]), tolerances=cfg.tolerances
        )
    )
    passed = all(c.passed for c in checks)
    write_json(
        cfg.out / "report.json",
        {
            "command": "certify",
            "verdict": _verdict(passed),
            **extra,
            "checks": [c.to_dict() for c in checks],
            "artifacts": ["witnesses.csv"],
        },
    )
    write_witness_csv(cfg.out / "witnesses.csv", checks)
    if cfg.figures:
        figures.gain_margin_figure(gains.alpha, float(opts["gain_radius"]), cfg.out / "gains.png")
    return 0 if passed else 2


def _cmd_wellposed(cfg: RunConfig) -> int:
    spec = _network_from(cfg)
    opts = cfg.options
    variant_names = {"state-norm": STATE_NORM, "set-form-1": SET_FORM_1, "set-form-2": SET_FORM_2}
    variant = variant_names.get(opts["variant"])
    if variant is None:
        raise UsageError(f"/variant: choose one of {sorted(variant_names)}")
    kappa1 = Linear(float(opts["kappa1_slope"])) if opts.get("kappa1_slope") is not None else None
    kappa2 = Linear(float(opts["kappa2_slope"])) if opts.get("kappa2_slope") is not None else None
    estimate = KBoundEstimate(
        constant=float(opts["constant"]),
        kappa=Linear(float(opts["kappa_slope"])),
        variant=variant,
        kappa1=kappa1,
        kappa2=kappa2,
    )
    plan_cfg = opts["plan"]
    plan = SamplePlan(
        index_window=int(plan_cfg.get("index_window", 32)),
        state_radius=float(plan_cfg.get("state_radius", 10.0)),
        input_radius=float(plan_cfg.get("input_radius", 1.0)),
        samples=int(plan_cfg.get("samples", 32)),
        seed=cfg.seed,
    )
    bound = check_growth_bound(spec, estimate, plan, M=int(opts["m_steps"]), tolerances=cfg.tolerances)
    radii = tuple(float(r) for r in opts["radii"])
    profile = falsify_uniformity(spec, plan, radii, float(opts["cap"]))
    profile.to_csv(cfg.out / "growth_profile.csv")
    write_json(
        cfg.out / "report.json",
        {
            "command": "wellposed",
            "verdict": _verdict(bound.passed),
            "growth_bound": bound.to_dict(),
            "uniformity": {
                "diverges": profile.diverges,
                "cap": profile.cap,
                "cap_witness": list(profile.cap_witness) if profile.cap_witness else None,
                "radii": list(profile.radii),
                "sup_per_radius": list(profile.sup_per_radius),
            },
            "artifacts": ["growth_profile.csv"],
        },
    )
    if cfg.figures:
        figures.growth_profile_figure(profile, cfg.out / "growth_profile.png")
    return 0 if bound.passed else 2


def _cmd_truncate(cfg: RunConfig) -> int:
    spec = _network_from(cfg)
    opts = cfg.options
    n = int(opts["n"])
    horizon = int(opts["horizon"])
    initial = _initial_window(spec, opts["initial"], cfg.seed)
    signal = _input_signal(spec, opts["input"])
    beta = None
    gamma = None
    if "beta" in opts:
        beta = Exponential(float(opts["beta"].get("scale", 1.0)), float(opts["beta"].get("rate", 0.5)))
    if opts.get("gamma_slope") is not None:
        gamma = Linear(float(opts["gamma_slope"]))
    traj, recording = record_interface_signal(
        spec, n, initial, signal, horizon, beta=beta, gamma=gamma, tolerances=cfg.tolerances
    )
    consistency = consistency_check(spec, n, initial, signal, horizon)
    keep = set(range(1, n + 1)) | set(recording.interface)
    restricted = [{i: w[i] for i in sorted(keep) if i in w} for w in traj.states]
    write_trajectory_csv(cfg.out / "trajectories.csv", restricted)
    recording.to_csv(cfg.out / "interface.csv")
    checks_passed = consistency.passed
    report: dict[str, Any] = {
        "command": "truncate",
        "n": n,
        "horizon": horizon,
        "interface": list(recording.interface),
        "consistency": consistency.to_dict(),
        "artifacts": ["trajectories.csv", "interface.csv"],
    }
    if recording.bound_report is not None:
        report["interface_bound"] = recording.bound_report.to_dict()
        checks_passed = checks_passed and recording.bound_report.passed
    is_traffic = opts.get("network_path") is None and (opts.get("network") or "traffic") == "traffic"
    if is_traffic:
        family, _, alpha, gub = traffic_certificate(_traffic_params(cfg))
        tn = build_truncation(spec, n)
        replay = simulate_truncated(tn, initial, signal, horizon, recording.signal())
        decay = check_truncated_decay(
            tn, family, Linear(alpha), Linear(1.0), Linear(gub), replay, cfg.tolerances
        )
        report["truncated_decay"] = decay.to_dict()
        checks_passed = checks_passed and decay.passed
    report["verdict"] = _verdict(checks_passed)
    write_json(cfg.out / "report.json", report)
    if cfg.figures:
        figures.interface_figure(recording, cfg.out / "interface.png")
        shown = [i for i in range(1, min(n, 12) + 1)]
        figures.trajectory_fan(_series_from_states(traj.states, shown), cfg.out / "trajectories.png", title="retained states")
    return 0 if checks_passed else 2


def _cmd_traffic_demo(cfg: RunConfig) -> int:
    opts = cfg.options
    params = _traffic_params(cfg)
    sizes = [int(nv) for nv in opts["sizes"]]
    if not sizes or any(nv < 1 for nv in sizes):
        raise UsageError("/sizes must list sizes >= 1")
    try:
        result = run_scaling_experiment(
            params,
            sizes,
            horizon=int(opts["horizon"]),
            seed=cfg.seed,
            out_dir=cfg.out,
            observed_cap=int(opts["observed_cap"]),
            tolerances=cfg.tolerances,
        )
    except CertificateRefused as e:
        write_json(
            cfg.out / "report.json",
            {"command": "traffic-demo", "verdict": "refused", "reason": str(e), "margin": e.margin},
        )
        return 2
    write_json(
        cfg.out / "report.json",
        {
            "command": "traffic-demo",
            "verdict": _verdict(result.passed),
            "alpha": result.alpha,
            "gamma_u_bar": result.gamma_u_bar,
            "sizes": [r.n for r in result.runs],
            "artifacts": ["summary.json"] + [f"size-{r.n}/summary.json" for r in result.runs],
        },
    )
    if cfg.figures:
        for run in result.runs:
            size_dir = cfg.out / f"size-{run.n}"
            figures.trajectory_fan(run.observed_series, size_dir / "trajectories.png", title=f"cell densities, n={run.n}")
            figures.decay_with_envelope(
                run.v_series, result.alpha, run.ultimate_bound, size_dir / "v-decay.png",
                title=f"network storage decay, n={run.n}",
            )
    return 0 if result.passed else 2


_COMMANDS = {
    "simulate": _cmd_simulate,
    "certify": _cmd_certify,
    "wellposed": _cmd_wellposed,
    "truncate": _cmd_truncate,
    "traffic-demo": _cmd_traffic_demo,
}


def run(cfg: RunConfig) -> int:
    """Echo the resolved config and dispatch; returns the exit code."""
    handler = _COMMANDS.get(cfg.command)
    if handler is None:
        raise UsageError(f"unknown command {cfg.command!r}")
    _echo_config(cfg)
    return handler(cfg)


# ---------------------------------------------------------------------------
# Flag plumbing.


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route argparse's own failures to exit 1
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="issnet", description="simulate and certify infinite subsystem networks")
    sub = parser.add_subparsers(dest="command", metavar="command")
    for name in _COMMANDS:
        p = sub.add_parser(name, help=f"run {name}")
        p.add_argument("--config", metavar="PATH", help="JSON config file")
        p.add_argument("--out", metavar="DIR", help="output directory")
        p.add_argument("--seed", metavar="N", type=int, help="seed for all derived randomness")
        p.add_argument("--tolerance", metavar="X", type=float, help="absolute and relative residual tolerance")
        p.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
        if name != "traffic-demo":
            p.add_argument("--network", metavar="NAME", help=f"built-in network ({', '.join(_BUILTIN_NAMES)})")
            p.add_argument("--network-path", metavar="PATH", help="network description JSON")
        if name in ("simulate", "truncate", "traffic-demo"):
            p.add_argument("--horizon", metavar="K", type=int, help="number of steps")
        if name == "traffic-demo":
            p.add_argument("--sizes", metavar="N,N,...", help="comma-separated network sizes")
        if name == "truncate":
            p.add_argument("--n", metavar="N", type=int, help="truncation size")
    return parser


def _overrides_from_args(args: argparse.Namespace) -> dict:
    overrides: dict[str, Any] = {
        "out": args.out,
        "seed": args.seed,
        "network": getattr(args, "network", None),
        "network_path": getattr(args, "network_path", None),
        "horizon": getattr(args, "horizon", None),
        "n": getattr(args, "n", None),
    }
    if args.tolerance is not None:
        if args.tolerance <= 0:
            raise UsageError("--tolerance must be positive")
        overrides["tolerances"] = {"atol": args.tolerance, "rtol": args.tolerance}
    if args.no_figures:
        overrides["figures"] = False
    sizes = getattr(args, "sizes", None)
    if sizes is not None:
        try:
            overrides["sizes"] = [int(part) for part in sizes.split(",") if part.strip()]
        except ValueError as e:
            raise UsageError(f"--sizes: {e}") from e
    return {k: v for k, v in overrides.items() if v is not None}


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("choose a command: " + ", ".join(_COMMANDS))
        cfg = parse_config(args.command, args.config, _overrides_from_args(args))
        return run(cfg)
    except UsageError as e:
        print(f"issnet: error: {e}", file=sys.stderr)
        return 1
    except (SpecError, OSError) as e:
        print(f"issnet: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
