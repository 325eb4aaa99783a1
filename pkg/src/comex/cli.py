"""Configuration-driven experiment runner.

Commands:
  comex run <config.json> | --preset <name>   run simulations, write CSV/JSON
  comex bounds <config.json> | --preset <name>   print theorem bound table

Config is flat JSON; see ``DEFAULTS`` for the schema and ``PRESETS`` for
ready-made experiment definitions.  ``COMEX_THREADS`` caps run
parallelism.  Exit codes: 0 ok, 1 runtime failure, 2 parse failure,
3 validation failure.
"""

from __future__ import annotations

import argparse
import copy
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bounds import (
    SURROGATE_NOTE,
    bound_inputs,
    comm_bound,
    comm_bound_capped,
    comm_cap,
    regret_bound,
)
from .engine import (
    GATES,
    VARIANTS,
    AggregateResult,
    SimConfig,
    aggregate_runs,
    build_world,
    graph_rng,
)
from .env import ArmSpec, make_env
from .graph import GraphSpec, bfs_distances, generate_topology

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_PARSE = 2
EXIT_VALIDATION = 3

CSV_HEADER = "run,t,regret,comm_cost,control_msgs"

SHORT_NAMES = {
    "ucb_share": "ucb",
    "mp_ucb": "mpucb",
    "lf_ucb": "lfucb",
    "est_ucb": "estucb",
    "mp_thompson": "mpthompson",
}

DEFAULTS = {
    "label": "exp",
    "arms": None,  # required: list of arm spec objects
    "sigma": None,
    "graph": None,  # required: graph spec object
    "variants": None,  # required: non-empty list
    "gates": None,  # required: non-empty list
    "horizon": None,  # required
    "gamma": 1,
    "xi": 1.1,
    "runs": 1,
    "seed": 0,
    "out_dir": "results",
    "checkpoints": None,  # default: [T/4, T/2, T]
    "bound_report": False,
    "prior_mean": 0.0,
    "prior_var": 1e6,
}

_BENCH_GAUSSIAN = [{"kind": "gaussian", "mean": 11.0, "variance": 1.0}] + [
    {"kind": "gaussian", "mean": 10.0, "variance": 1.0} for _ in range(9)
]
_BENCH_TRIANGLE = [{"kind": "triangular01", "mode": 1.0}] + [
    {"kind": "triangular01", "mode": 0.0} for _ in range(9)
]
_BENCH_BASE = {
    "graph": {"kind": "erdos_renyi", "n": 100, "p": 0.7, "require_connected": True},
    "gates": ["comex", "full"],
    "horizon": 500,
    "xi": 1.01,
    "runs": 100,
    "seed": 7,
}

PRESETS = {
    "paper-fig2a": {
        **_BENCH_BASE,
        "label": "fig2a",
        "arms": _BENCH_TRIANGLE,
        "variants": ["ucb_share"],
        "gamma": 1,
    },
    "paper-fig2b": {
        **_BENCH_BASE,
        "label": "fig2b",
        "arms": _BENCH_GAUSSIAN,
        "variants": ["mp_ucb"],
        "gamma": 5,
    },
    "paper-fig2c": {
        **_BENCH_BASE,
        "label": "fig2c",
        "arms": _BENCH_GAUSSIAN,
        "variants": ["est_ucb"],
        "gamma": 1,
    },
    "paper-fig2d": {
        **_BENCH_BASE,
        "label": "fig2d",
        "arms": _BENCH_TRIANGLE,
        "variants": ["lf_ucb"],
        "gamma": 5,
    },
    "paper-fig2e": {
        **_BENCH_BASE,
        "label": "fig2e",
        "arms": _BENCH_GAUSSIAN,
        "variants": ["mp_thompson"],
        "gamma": 5,
    },
}


class ConfigParseError(Exception):
    pass


class ConfigValidationError(Exception):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    label: str
    arms: tuple[ArmSpec, ...]
    sigma: float | None
    graph: GraphSpec
    variants: tuple[str, ...]
    gates: tuple[str, ...]
    horizon: int
    gamma: int
    xi: float
    runs: int
    seed: int
    out_dir: str
    checkpoints: tuple[int, ...]
    bound_report: bool
    prior_mean: float
    prior_var: float

    def sim_config(self, variant: str, gate: str) -> SimConfig:
        return SimConfig(
            arms=self.arms,
            graph=self.graph,
            variant=variant,
            gate=gate,
            horizon=self.horizon,
            gamma=self.gamma,
            xi=self.xi,
            sigma=self.sigma,
            prior_mean=self.prior_mean,
            prior_var=self.prior_var,
            runs=self.runs,
            seed=self.seed,
        )

    def echo(self) -> dict:
        """JSON-serializable form that re-validates to an equal config."""
        return {
            "label": self.label,
            "arms": [
                {k: v for k, v in vars(a).items() if v is not None} for a in self.arms
            ],
            "sigma": self.sigma,
            "graph": {k: v for k, v in vars(self.graph).items() if v is not None},
            "variants": list(self.variants),
            "gates": list(self.gates),
            "horizon": self.horizon,
            "gamma": self.gamma,
            "xi": self.xi,
            "runs": self.runs,
            "seed": self.seed,
            "out_dir": self.out_dir,
            "checkpoints": list(self.checkpoints),
            "bound_report": self.bound_report,
            "prior_mean": self.prior_mean,
            "prior_var": self.prior_var,
        }


def load_raw_config(path: str) -> dict:
    try:
        with open(path) as f:
            raw = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigParseError(f"cannot parse config {path}: {e}") from e
    if not isinstance(raw, dict):
        raise ConfigParseError(f"config {path} must be a JSON object")
    return raw


def validate_config(raw: dict) -> ExperimentConfig:
    """Check the raw config dict and fill defaults; errors name the field."""
    merged = dict(DEFAULTS)
    unknown = set(raw) - set(DEFAULTS)
    if unknown:
        raise ConfigValidationError(f"unknown config fields: {sorted(unknown)}")
    merged.update(raw)

    def need(field, typ):
        v = merged[field]
        if v is None:
            raise ConfigValidationError(f"field '{field}' is required")
        if typ is float and isinstance(v, int):
            v = float(v)
        if not isinstance(v, typ):
            raise ConfigValidationError(f"field '{field}' has wrong type: {type(v).__name__}")
        return v

    try:
        arms = tuple(ArmSpec(**a) for a in need("arms", list))
    except (TypeError, ValueError) as e:
        raise ConfigValidationError(f"field 'arms' invalid: {e}") from e
    try:
        graph = GraphSpec(**need("graph", dict))
    except (TypeError, ValueError) as e:
        raise ConfigValidationError(f"field 'graph' invalid: {e}") from e

    variants = tuple(need("variants", list))
    gates = tuple(need("gates", list))
    if not variants or any(v not in VARIANTS for v in variants):
        raise ConfigValidationError(f"field 'variants' must be a non-empty subset of {VARIANTS}")
    if not gates or any(g not in GATES for g in gates):
        raise ConfigValidationError(f"field 'gates' must be a non-empty subset of {GATES}")

    horizon = need("horizon", int)
    if horizon < 1:
        raise ConfigValidationError("field 'horizon' must be >= 1")
    gamma = need("gamma", int)
    if gamma < 1:
        raise ConfigValidationError("field 'gamma' must be >= 1")
    runs = need("runs", int)
    if runs < 1:
        raise ConfigValidationError("field 'runs' must be >= 1")
    xi = need("xi", float)
    if xi <= 0:
        raise ConfigValidationError("field 'xi' must be > 0")

    sigma = merged["sigma"]
    if sigma is not None:
        sigma = float(sigma)
    try:
        make_env(arms, sigma_override=sigma)
    except ValueError as e:
        raise ConfigValidationError(f"fields 'arms'/'sigma' invalid: {e}") from e

    checkpoints = merged["checkpoints"]
    if checkpoints is None:
        checkpoints = sorted({max(1, horizon // 4), max(1, horizon // 2), horizon})
    checkpoints = tuple(int(c) for c in checkpoints)
    if any(not 1 <= c <= horizon for c in checkpoints):
        raise ConfigValidationError("field 'checkpoints' entries must lie in [1, horizon]")

    bound_report = bool(merged["bound_report"])
    if bound_report and xi < 1.1:
        raise ConfigValidationError("field 'bound_report' requires xi >= 1.1 (theorem precondition)")

    return ExperimentConfig(
        label=str(need("label", str)),
        arms=arms,
        sigma=sigma,
        graph=graph,
        variants=variants,
        gates=gates,
        horizon=horizon,
        gamma=gamma,
        xi=xi,
        runs=runs,
        seed=need("seed", int),
        out_dir=str(need("out_dir", str)),
        checkpoints=checkpoints,
        bound_report=bound_report,
        prior_mean=need("prior_mean", float),
        prior_var=need("prior_var", float),
    )


def resolve_config(path: str | None, preset: str | None, overrides: dict) -> ExperimentConfig:
    if (path is None) == (preset is None):
        raise ConfigValidationError("give exactly one of a config path or --preset")
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigValidationError(f"unknown preset {preset!r}; available: {sorted(PRESETS)}")
        raw = copy.deepcopy(PRESETS[preset])
    else:
        raw = load_raw_config(path)
    raw.update({k: v for k, v in overrides.items() if v is not None})
    return validate_config(raw)


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def write_trajectories_csv(path: Path, agg: AggregateResult) -> None:
    runs, horizon = agg.regret.shape
    with open(path, "w") as f:
        f.write(CSV_HEADER + "\n")
        for r in range(runs):
            for t in range(horizon):
                f.write(
                    f"{r},{t + 1},{_fmt(agg.regret[r, t])},"
                    f"{agg.comm_cost[r, t]},{agg.control_msgs[r, t]}\n"
                )


def _checkpoint_stats(agg: AggregateResult, checkpoints) -> dict:
    out = {}
    for c in checkpoints:
        i = c - 1
        out[str(c)] = {
            "regret_mean": float(agg.regret_mean[i]),
            "regret_std": float(agg.regret_std[i]),
            "comm_mean": float(agg.comm_mean[i]),
            "comm_std": float(agg.comm_std[i]),
            "control_mean": float(agg.control_mean[i]),
            "control_std": float(agg.control_std[i]),
        }
    return out


def bound_table(cfg: ExperimentConfig) -> dict:
    """Evaluate the regret/cost bounds for the configured instance."""
    if cfg.xi < 1.1:
        raise ConfigValidationError(f"bounds require xi >= 1.1, got xi={cfg.xi}")
    env = make_env(cfg.arms, sigma_override=cfg.sigma)
    topo = generate_topology(cfg.graph, graph_rng(cfg.seed))
    dist = bfs_distances(topo)
    finite = dist[np.isfinite(dist)]
    diameter = int(finite.max()) if finite.size else 0
    if cfg.gamma > max(diameter, 1):
        raise ConfigValidationError(
            f"gamma={cfg.gamma} exceeds the graph diameter {diameter}"
        )
    share_inputs = bound_inputs(env, topo, 1, cfg.xi, cfg.horizon)
    relay_inputs = bound_inputs(env, topo, cfg.gamma, cfg.xi, cfg.horizon)
    table = {}
    for variant in ("ucb_share", "mp_ucb", "lf_ucb"):
        b = share_inputs if variant == "ucb_share" else relay_inputs
        table[variant] = {
            "regret_bound": regret_bound(variant, b),
            "comm_bound": comm_bound(variant, b),
            "comm_cap": comm_cap(b),
            "comm_bound_capped": comm_bound_capped(variant, b),
        }
    return table


def cmd_bounds(cfg: ExperimentConfig) -> int:
    table = bound_table(cfg)
    n, k = cfg.graph.n, len(cfg.arms)
    print(f"Bound report: N={n} agents, K={k} arms, T={cfg.horizon}, "
          f"gamma={cfg.gamma}, xi={cfg.xi}, seed={cfg.seed}")
    print(f"note: {SURROGATE_NOTE}")
    print(f"{'variant':<12} {'regret bound':>16} {'cost bound':>16} {'cost cap':>14} {'cost (capped)':>16}")
    for variant, row in table.items():
        print(
            f"{variant:<12} {_fmt(row['regret_bound']):>16} {_fmt(row['comm_bound']):>16} "
            f"{_fmt(row['comm_cap']):>14} {_fmt(row['comm_bound_capped']):>16}"
        )
    return EXIT_OK


def cmd_run(cfg: ExperimentConfig) -> int:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    results = {}
    for variant in cfg.variants:
        for gate in cfg.gates:
            agg = aggregate_runs(cfg.sim_config(variant, gate))
            name = f"{cfg.label}_{gate}_{SHORT_NAMES[variant]}"
            write_trajectories_csv(out / f"{name}.csv", agg)
            entry = {"csv": f"{name}.csv", "checkpoints": _checkpoint_stats(agg, cfg.checkpoints)}
            if agg.comm_cost_per_arm is not None:
                entry["comm_per_arm_mean_final"] = float(agg.comm_cost_per_arm.mean(axis=0)[-1])
            results[f"{variant}_{gate}"] = entry
            print(f"wrote {out / (name + '.csv')}")
    summary = {"config": cfg.echo(), "results": results}
    with open(out / f"{cfg.label}_summary.json", "w") as f:
        json.dump(summary, f, indent=2, sort_keys=True)
    print(f"wrote {out / (cfg.label + '_summary.json')}")
    if cfg.bound_report:
        report = {"note": SURROGATE_NOTE, "variants": {}, "inputs": cfg.echo()}
        table = bound_table(cfg)
        for variant in cfg.variants:
            if variant in table:
                report["variants"][variant] = table[variant]
        with open(out / f"{cfg.label}_bounds.json", "w") as f:
            json.dump(report, f, indent=2, sort_keys=True)
        print(f"wrote {out / (cfg.label + '_bounds.json')}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="comex",
        description="Cooperative bandit simulator with explore-gated communication. "
        "Set COMEX_THREADS to parallelize Monte-Carlo runs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (("run", "run an experiment"), ("bounds", "print theorem bound table")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", nargs="?", default=None, help="path to JSON config")
        p.add_argument("--preset", default=None, help=f"built-in config, one of {sorted(PRESETS)}")
        p.add_argument("--seed", type=int, default=None, help="override base seed")
        p.add_argument("--runs", type=int, default=None, help="override Monte-Carlo run count")
        p.add_argument("--out", default=None, help="override output directory")
    args = parser.parse_args(argv)

    overrides = {"seed": args.seed, "runs": args.runs, "out_dir": args.out}
    try:
        cfg = resolve_config(args.config, args.preset, overrides)
        if args.command == "bounds":
            return cmd_bounds(cfg)
        return cmd_run(cfg)
    except ConfigParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except ConfigValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as e:  # noqa: BLE001 - report any runtime failure
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
