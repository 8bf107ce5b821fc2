"""Command-line entry point.

Exit codes: 0 on success, 1 on usage errors, 2 on data/config/file errors.
"""

import argparse
import logging
import sys
from pathlib import Path

from . import settings
from .config import load_config
from .environment import coverage, greedy_oracle
from .exceptions import CascadeError, UsageError
from .features import build_features, split_rows, write_features
from .harness import SWEEP_PARAMETERS, read_trace, run_experiment, run_sweep, summarize_traces, theorem_bound, write_runs, write_trace
from .ingestion import DELIMITERS, binarize, load_ratings, read_matrix, select_top_indices
from .items import BINARIZE_KINDS, BinarizeRule, FeedbackMatrix
from .policies import ALGORITHMS

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class CliParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


def build_parser():
    parser = CliParser(prog="cascade_bandits", description="Cascading bandit simulations with linear generalization.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment from a JSON config")
    run.add_argument("--config", required=True, type=Path)
    run.add_argument("--algo", choices=ALGORITHMS)
    run.add_argument("--out", type=Path, help="output directory (overrides out_dir)")
    run.add_argument("--seed", type=int, help="master seed (overrides master_seed)")
    run.add_argument("--workers", type=int)

    sweep = sub.add_parser("sweep", help="vary one parameter of a config")
    sweep.add_argument("--config", required=True, type=Path)
    sweep.add_argument("--param", required=True, choices=SWEEP_PARAMETERS)
    sweep.add_argument("--values", required=True, help="comma-separated values")
    sweep.add_argument("--out", type=Path)
    sweep.add_argument("--seed", type=int)

    features = sub.add_parser("features", help="SVD item features from a rating file")
    features.add_argument("--input", required=True, type=Path)
    features.add_argument("--format", required=True, choices=tuple(DELIMITERS))
    features.add_argument("--rule", required=True, choices=BINARIZE_KINDS)
    features.add_argument("--threshold", type=float, default=3.0)
    features.add_argument("-d", type=int, required=True)
    features.add_argument("--out", required=True, type=Path)
    features.add_argument("--split-seed", type=int, default=0)
    features.add_argument("--l-max", type=int)
    features.add_argument("--m-max", type=int)

    oracle = sub.add_parser("oracle", help="greedy A* of a 0/1 matrix CSV")
    oracle.add_argument("--input", required=True, type=Path)
    oracle.add_argument("-K", type=int, required=True)

    bound = sub.add_parser("bound", help="confidence constant c and regret bound of CascadeLinUCB")
    bound.add_argument("-n", type=int, required=True)
    bound.add_argument("-K", type=int, required=True)
    bound.add_argument("-d", type=int, required=True)
    bound.add_argument("--sigma", type=float, default=settings.DEFAULT_SIGMA)
    bound.add_argument("--theta-norm", type=float, default=settings.DEFAULT_THETA_NORM)

    compare = sub.add_parser("compare", help="summarize trace CSV files")
    compare.add_argument("traces", nargs="+", type=Path)
    return parser


# ---------- COMMANDS ----------
def cmd_run(args):
    cfg = load_config(args.config).replace(algo=args.algo, out_dir=args.out, master_seed=args.seed, workers=args.workers)
    trace = run_experiment(cfg)
    write_trace(trace, cfg.out_dir / settings.TRACE_FILE)
    write_runs(trace, cfg.out_dir / settings.RUNS_FILE)
    print(f"final mean regret {trace.mean_regret[-1]:.6g} (stderr {trace.stderr[-1]:.6g}) -> {cfg.out_dir}")


def cmd_sweep(args):
    cfg = load_config(args.config).replace(out_dir=args.out, master_seed=args.seed)
    values = [v.strip() for v in args.values.split(",") if v.strip()]
    if args.param != "algo":
        try:
            values = [int(v) for v in values]
        except ValueError:
            raise UsageError(f"--values for {args.param} must be integers, got {args.values!r}")
    if not values:
        raise UsageError("--values is empty")
    traces = run_sweep(cfg, args.param, values)
    for value, trace in traces.items():
        write_trace(trace, cfg.out_dir / f"trace_{args.param}_{value}.csv")
    print(summarize_traces({t.label: t for t in traces.values()}).to_string(index=False))


def cmd_features(args):
    triples = load_ratings(args.input, args.format)
    binarized = binarize(triples, BinarizeRule(args.rule, args.threshold))
    W, item_ids = binarized.matrix, list(binarized.item_index)
    if args.l_max is not None or args.m_max is not None:
        L_max = args.l_max if args.l_max is not None else W.items
        m_max = args.m_max if args.m_max is not None else W.users
        rows, cols = select_top_indices(W, L_max, m_max)
        W = FeedbackMatrix(W.bits[rows][:, cols])
        item_ids = [item_ids[j] for j in cols]
    features = build_features(split_rows(W, args.split_seed), args.d)
    write_features(features, args.out, item_ids)
    print(f"wrote {features.n_items} x {features.dim} features (scale {features.scale:.6g}) to {args.out}")


def cmd_oracle(args):
    W, item_ids = read_matrix(args.input)
    optimal = greedy_oracle(W, args.K)
    print("A* = " + " ".join(item_ids[e] for e in optimal))
    print(f"coverage = {coverage(W, optimal):.10g}")


def cmd_bound(args):
    c, bound = theorem_bound(args.n, args.K, args.d, args.sigma, args.theta_norm)
    print(f"c = {c:.10g}")
    print(f"bound = {bound:.10g}")


def cmd_compare(args):
    traces = {path.stem: read_trace(path) for path in args.traces}
    print(summarize_traces(traces).to_string(index=False))


COMMANDS = {
    "run": cmd_run,
    "sweep": cmd_sweep,
    "features": cmd_features,
    "oracle": cmd_oracle,
    "bound": cmd_bound,
    "compare": cmd_compare,
}


def main(argv=None):
    settings.configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        COMMANDS[args.command](args)
    except SystemExit as e:
        # --help
        return e.code or EXIT_OK
    except UsageError as e:
        print(str(e), file=sys.stderr)
        return EXIT_USAGE
    except (CascadeError, OSError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK
