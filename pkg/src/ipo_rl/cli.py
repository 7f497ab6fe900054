"""Command-line harness: train / compare / gap-check / t-search / plot / eval.

Run configs are YAML documents with flat keys; every key can also be
passed as a ``--key value`` flag, which wins over the file. Unknown keys
(file or flag) are hard errors. Outputs land under the directory named by
the ``IPO_RL_OUTPUT_ROOT`` environment variable (default ``runs``).

Exit codes: 0 success, 2 configuration error, 3 training abort
(non-finite loss).
"""

import argparse
import csv
import json
import os
import sys
import time
from dataclasses import asdict, dataclass, field, fields

import numpy as np
import yaml

from .envs.scenarios import load_scenario
from .errors import ConfigError, TrainingAbort
from .gap import duality_gap_check
from .nn import load_checkpoint, save_checkpoint
from .rollout import run_episode
from .train import ALGORITHMS, TrainConfig, train
from .tsearch import TSearchFailure, t_search, training_probe

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ABORT = 3


@dataclass
class RunConfig:
    algorithm: str = "ipo"
    algorithms: tuple = ()        # used by `compare`
    scenario: str = ""
    seeds: tuple = (0,)
    output_dir: str = "run"
    noise_sigma: float = -1.0     # <0 -> use the scenario default
    train: TrainConfig = field(default_factory=TrainConfig)


_TRAIN_FIELDS = {f.name: f for f in fields(TrainConfig)}
_RUN_FIELDS = {"algorithm", "algorithms", "scenario", "seeds",
               "output_dir", "noise_sigma"}


def _coerce(name, value, target_example):
    """Parse a CLI string into the type of the config default."""
    if isinstance(target_example, bool):
        return value in ("1", "true", "True")
    if isinstance(target_example, int):
        return int(value)
    if isinstance(target_example, float):
        return float(value)
    if isinstance(target_example, (tuple, list)):
        items = [v for v in str(value).replace(",", " ").split() if v]
        elem = target_example[0] if len(target_example) else ""
        if isinstance(elem, int) and not isinstance(elem, bool):
            return tuple(int(v) for v in items)
        if isinstance(elem, float):
            return tuple(float(v) for v in items)
        return tuple(items)
    return value


def load_run_config(path=None, overrides=None):
    """Defaults <- scenario overrides <- YAML file <- CLI flags."""
    doc = {}
    if path:
        if not os.path.isfile(path):
            raise ConfigError(f"config file not found: {path}")
        with open(path) as fh:
            doc = yaml.safe_load(fh) or {}
    merged = dict(doc)
    for key, value in (overrides or {}).items():
        merged[key] = value

    unknown = set(merged) - _RUN_FIELDS - set(_TRAIN_FIELDS)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if not merged.get("scenario"):
        raise ConfigError("missing required config key: scenario")

    run = RunConfig()
    scenario = load_scenario(str(merged["scenario"]))
    train_values = asdict(run.train)
    train_values.update(scenario.train_overrides)

    defaults = RunConfig()
    for key, value in merged.items():
        if key in _TRAIN_FIELDS:
            current = train_values[key]
            train_values[key] = (_coerce(key, value, current)
                                 if isinstance(value, str) else
                                 tuple(value) if isinstance(current, tuple) and
                                 isinstance(value, list) else value)
        else:
            current = getattr(defaults, key)
            parsed = (_coerce(key, value, current)
                      if isinstance(value, str) and not isinstance(current, str)
                      else value)
            if key in ("seeds", "algorithms") and isinstance(parsed, list):
                parsed = tuple(parsed)
            if key == "seeds" and isinstance(parsed, int):
                parsed = (parsed,)
            setattr(run, key, parsed)

    run.scenario = str(merged["scenario"])
    run.train = TrainConfig().with_overrides(train_values)
    run.train.validate()
    if run.algorithm not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm {run.algorithm!r}")
    for a in run.algorithms:
        if a not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {a!r}")
    return run, scenario


def output_root():
    return os.environ.get("IPO_RL_OUTPUT_ROOT", "runs")


def _noise(run):
    return None if run.noise_sigma < 0 else run.noise_sigma


# --- metrics files -------------------------------------------------------


def metrics_header(m):
    cols = ["iteration", "trajectories_so_far", "J_R"]
    cols += [f"J_C_{i+1}" for i in range(m)]
    cols += [f"J_C_ema_{i+1}" for i in range(m)]
    cols += ["L_clip", "barrier_sum", "approx_kl"]
    cols += [f"lambda_{i+1}" for i in range(m)]
    return cols


def write_metrics(path, metrics, m):
    """Deterministic CSV; floats serialized with shortest round-trip repr.

    Wall-clock timing goes to a sidecar file so that metrics files are
    byte-identical across reruns of the same (config, seed).
    """
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(metrics_header(m))
        for row in metrics:
            lambdas = list(row.lambdas) + [""] * (m - len(row.lambdas))
            w.writerow([row.iteration, row.trajectories_so_far, repr(float(row.j_r))]
                       + [repr(float(v)) for v in row.j_c]
                       + [repr(float(v)) for v in row.j_c_ema]
                       + [repr(float(row.l_clip)), repr(float(row.barrier_sum)),
                          repr(float(row.approx_kl))]
                       + [repr(float(v)) if v != "" else "" for v in lambdas])
    timing = os.path.splitext(path)[0] + ".timing.csv"
    with open(timing, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["iteration", "wall_time_s"])
        for row in metrics:
            w.writerow([row.iteration, f"{row.wall_time_s:.3f}"])


def read_metrics(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    data = {}
    for j, col in enumerate(header):
        vals = [r[j] for r in rows]
        data[col] = np.array([float(v) if v != "" else np.nan for v in vals])
    return header, data


# --- subcommands ---------------------------------------------------------


def cmd_train(args):
    run, scenario = load_run_config(args.config, args.overrides)
    out_dir = os.path.join(output_root(), run.output_dir)
    os.makedirs(out_dir, exist_ok=True)
    m = scenario.spec.num_constraints
    for seed in run.seeds:
        result = train(scenario, run.algorithm, run.train, seed,
                       noise_sigma=_noise(run))
        stem = f"{run.algorithm}_{scenario.name}_seed{seed}"
        write_metrics(os.path.join(out_dir, stem + ".csv"), result.metrics, m)
        save_checkpoint(os.path.join(out_dir, stem + ".npz"),
                        result.policy, result.critics)
        final = result.metrics[-1]
        print(f"{stem}: J_R={final.j_r:.4f} "
              f"J_C={','.join(f'{v:.4f}' for v in final.j_c)} "
              f"({final.iteration + 1} iterations)")
    print(f"outputs in {out_dir}")
    return EXIT_OK


def cmd_compare(args):
    run, scenario = load_run_config(args.config, args.overrides)
    algorithms = run.algorithms or (run.algorithm,)
    out_dir = os.path.join(output_root(), run.output_dir)
    os.makedirs(out_dir, exist_ok=True)
    m = scenario.spec.num_constraints
    limits = scenario.spec.limits

    summary = []
    for algorithm in algorithms:
        finals_r, finals_c = [], []
        for seed in run.seeds:
            result = train(scenario, algorithm, run.train, seed,
                           noise_sigma=_noise(run))
            stem = f"{algorithm}_{scenario.name}_seed{seed}"
            write_metrics(os.path.join(out_dir, stem + ".csv"),
                          result.metrics, m)
            finals_r.append(result.metrics[-1].j_r)
            finals_c.append(result.metrics[-1].j_c)
        finals_c = np.array(finals_c)
        row = {
            "algorithm": algorithm,
            "J_R_mean": float(np.mean(finals_r)),
            "J_R_std": float(np.std(finals_r)),
        }
        for i in range(m):
            mean_c = float(finals_c[:, i].mean())
            row[f"J_C_{i+1}_mean"] = mean_c
            row[f"J_C_{i+1}_std"] = float(finals_c[:, i].std())
            row[f"J_C_{i+1}_satisfied"] = mean_c <= limits[i]
            row[f"J_C_{i+1}_seed_fraction"] = float(
                (finals_c[:, i] <= limits[i]).mean())
        summary.append(row)

    cols = list(summary[0].keys())
    print("  ".join(cols))
    for row in summary:
        print("  ".join(str(row[c]) for c in cols))
    with open(os.path.join(out_dir, "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2)
    return EXIT_OK


def cmd_gap_check(args):
    t_values = [float(v) for v in args.t.split(",")]
    print("m  t  p_star  barrier_value  gap  bound  verdict")
    prev_gap = None
    for t in t_values:
        r = duality_gap_check(args.m, t, resolution=args.resolution)
        verdict = "pass" if r.passed else "FAIL"
        print(f"{r.m}  {r.t:g}  {r.p_star:.6f}  {r.barrier_opt_value:.6f}  "
              f"{r.gap:.6f}  {r.bound:.6f}  {verdict}")
        if prev_gap is not None and r.gap > prev_gap + 1e-9:
            print("note: gap increased with larger t")
        prev_gap = r.gap
    return EXIT_OK


def cmd_t_search(args):
    run, scenario = load_run_config(args.config, args.overrides)
    t_hi = args.t_hi if args.t_hi is not None else scenario.t_init_hint
    t_lo = args.t_lo
    probe = training_probe(scenario, run.train, run.seeds[0],
                           probe_iterations=args.probe_iterations)
    try:
        result = t_search(probe, t_lo, t_hi, budget=args.budget)
    except TSearchFailure as exc:
        print(f"t-search failed: {exc}")
        for p in exc.probes:
            print(f"  probe t={p.t:g}: J_C={p.j_c:.5f} limit={p.limit:g} "
                  f"{'feasible' if p.feasible else 'violated'}")
        return 1
    for p in result.probes:
        print(f"probe t={p.t:g}: J_C={p.j_c:.5f} limit={p.limit:g} "
              f"{'feasible' if p.feasible else 'violated'}")
    print(f"recommended t = {result.recommended:g}")
    return EXIT_OK


def cmd_plot(args):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    headers_data = [read_metrics(p) for p in args.metrics]
    header0 = headers_data[0][0]
    for h, _ in headers_data[1:]:
        if h != header0:
            raise ConfigError("metrics files have inconsistent columns")

    limits = ()
    if args.scenario:
        limits = load_scenario(args.scenario).spec.limits
    m = sum(1 for c in header0 if c.startswith("J_C_")
            and not c.startswith("J_C_ema"))
    metric_cols = ["J_R"] + [f"J_C_{i+1}" for i in range(m)]

    os.makedirs(args.output, exist_ok=True)
    written = []
    for col in metric_cols:
        fig, ax = plt.subplots(figsize=(5, 3.5))
        x = headers_data[0][1]["trajectories_so_far"]
        ys = np.stack([d[col] for _, d in headers_data])
        ax.plot(x, ys.mean(axis=0), label=f"mean ({len(headers_data)} run(s))")
        if len(headers_data) > 1:
            ax.fill_between(x, ys.min(axis=0), ys.max(axis=0), alpha=0.25)
        if col.startswith("J_C_") and limits:
            i = int(col.split("_")[-1]) - 1
            if i < len(limits):
                ax.axhline(limits[i], linestyle="--", color="k",
                           label=f"limit {limits[i]:g}")
        ax.set_xlabel("trajectories")
        ax.set_ylabel(col)
        ax.legend(loc="best", fontsize=8)
        fig.tight_layout()
        path = os.path.join(args.output, f"{col}.svg")
        fig.savefig(path, format="svg")
        plt.close(fig)
        written.append(path)
    print("wrote " + ", ".join(written))
    return EXIT_OK


def cmd_eval(args):
    policy, critics = load_checkpoint(args.checkpoint)
    scenario = load_scenario(args.scenario)
    sigma = None if args.noise_sigma < 0 else args.noise_sigma
    env = scenario.make_env(noise_sigma=sigma)
    seeds = np.random.SeedSequence(args.seed).generate_state(args.episodes,
                                                             dtype=np.uint64)
    returns, cvals = [], []
    for s in seeds:
        traj = run_episode(env, policy, int(s))
        returns.append(traj.discounted_return)
        cvals.append(traj.constraint_values)
    cvals = np.array(cvals)
    print(f"episodes: {args.episodes}")
    print(f"J_R = {np.mean(returns):.5f} +- {np.std(returns):.5f}")
    for i in range(cvals.shape[1]):
        print(f"J_C_{i+1} = {cvals[:, i].mean():.5f} +- {cvals[:, i].std():.5f} "
              f"(limit {env.spec.limits[i]:g})")
    return EXIT_OK


# --- argument parsing ----------------------------------------------------


class _OverrideAction(argparse.Action):
    def __call__(self, parser, namespace, values, option_string=None):
        namespace.overrides[option_string.lstrip("-").replace("-", "_")] = values


def _add_override_flags(parser):
    parser.set_defaults(overrides={})
    for name in sorted(_RUN_FIELDS | set(_TRAIN_FIELDS)):
        parser.add_argument(f"--{name.replace('_', '-')}", action=_OverrideAction,
                            metavar="V", help=argparse.SUPPRESS)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ipo-rl",
        description="Constrained policy optimization toolkit "
                    "(barrier, Lagrangian, and unconstrained trainers).")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train one algorithm over a seed list")
    p.add_argument("config", nargs="?", default=None)
    _add_override_flags(p)
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("compare", help="run an algorithm x seed sweep")
    p.add_argument("config", nargs="?", default=None)
    _add_override_flags(p)
    p.set_defaults(fn=cmd_compare)

    p = sub.add_parser("gap-check", help="verify the barrier duality gap bound")
    p.add_argument("--m", type=int, default=1, choices=(1, 2))
    p.add_argument("--t", default="10,50,100", help="comma-separated t values")
    p.add_argument("--resolution", type=int, default=2001)
    p.set_defaults(fn=cmd_gap_check)

    p = sub.add_parser("t-search", help="binary search the barrier coefficient")
    p.add_argument("config", nargs="?", default=None)
    p.add_argument("--t-lo", type=float, default=1.0)
    p.add_argument("--t-hi", type=float, default=None,
                   help="default: scenario's t_init_hint "
                        "(max discounted return estimate)")
    p.add_argument("--budget", type=int, default=6)
    p.add_argument("--probe-iterations", type=int, default=30)
    _add_override_flags(p)
    p.set_defaults(fn=cmd_t_search)

    p = sub.add_parser("plot", help="render metric curves as SVG")
    p.add_argument("metrics", nargs="+")
    p.add_argument("--output", default="plots")
    p.add_argument("--scenario", default=None,
                   help="scenario name, used to draw constraint-limit lines")
    p.set_defaults(fn=cmd_plot)

    p = sub.add_parser("eval", help="roll out a checkpoint and report J_R/J_C")
    p.add_argument("checkpoint")
    p.add_argument("--scenario", required=True)
    p.add_argument("--episodes", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise-sigma", type=float, default=-1.0)
    p.set_defaults(fn=cmd_eval)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TrainingAbort as exc:
        print(f"training aborted: {exc}", file=sys.stderr)
        print(f"diagnostics: {exc.diagnostics}", file=sys.stderr)
        return EXIT_ABORT


if __name__ == "__main__":
    sys.exit(main())
