"""Experiment engine: build a problem, run a policy on it over several seeded runs,
and aggregate cumulative regret and reward at checkpoints.
"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from tqdm import tqdm

from . import settings
from .config import SyntheticSpec
from .environment import BernoulliEnvironment, MatrixEnvironment
from .exceptions import ConfigError, DataError
from .features import build_features, split_rows
from .ingestion import binarize, load_ratings, read_matrix, select_top_indices
from .items import BinarizeRule, FeedbackMatrix, ItemFeatures, RecommendationList, RegretTrace
from .numerics import make_rng
from .policies import CascadeLinUCB, OraclePolicy, make_policy

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ["step", "mean_regret", "stderr", "mean_reward"]
SWEEP_PARAMETERS = ("algo", "L", "d", "K")


@dataclass
class Problem:
    env: object
    features: ItemFeatures
    item_ids: Sequence[str]
    theta_norm: Optional[float] = None
    description: str = ""


# ---------- THEORY ----------
def theorem_bound(n, K, d, sigma, theta_norm):
    """Confidence constant c and regret bound for CascadeLinUCB on a perfectly linear problem.

    c = sqrt(d ln(1 + nK / (d sigma^2)) + 2 ln(nK)) / sigma + ||theta*||
    R(n) <= 2 c K sqrt(d n ln(1 + nK / (d sigma^2)) / ln(1 + 1 / sigma^2)) + 1
    """
    for name, value in (("n", n), ("K", K), ("d", d), ("sigma", sigma), ("theta_norm", theta_norm)):
        if not value > 0:
            raise DataError(f"{name} must be positive, got {value}")
    log_det = math.log(1.0 + n * K / (d * sigma**2))
    c = math.sqrt(d * log_det + 2.0 * math.log(n * K)) / sigma + theta_norm
    bound = 2.0 * c * K * math.sqrt(d * n * log_det / math.log(1.0 + 1.0 / sigma**2)) + 1.0
    return c, bound


# ---------- PROBLEMS ----------
def synthetic_env(L, d, K, theta_seed):
    """Perfectly linear problem: w-bar(e) = x_e^T theta* with every w-bar in [WBAR_LOW, WBAR_HIGH].

    The first feature is a constant so the affine rescaling of the scores stays
    linear in theta*; all feature vectors have unit norm.
    """
    if d > L:
        raise DataError(f"d={d} must not exceed L={L}")
    lo, hi = settings.WBAR_LOW, settings.WBAR_HIGH
    rng = np.random.default_rng(theta_seed)

    if d == 1:
        X = np.ones((L, 1))
        theta = np.array([rng.uniform(lo, hi)])
    else:
        for _ in range(settings.SYNTHETIC_MAX_RESAMPLES):
            z = rng.standard_normal((L, d - 1))
            norms = np.linalg.norm(z, axis=1, keepdims=True)
            u = rng.standard_normal(d - 1)
            if (norms == 0).any() or not u.any():
                continue
            z /= norms
            u /= np.linalg.norm(u)
            scores = z @ u
            spread = scores.max() - scores.min()
            if spread > 1e-9:
                break
        else:
            raise DataError(f"could not draw a non-degenerate theta* after {settings.SYNTHETIC_MAX_RESAMPLES} attempts")
        beta = (hi - lo) / spread
        alpha = lo - beta * scores.min()
        X = np.hstack([np.ones((L, 1)), z]) / math.sqrt(2.0)
        theta = math.sqrt(2.0) * np.concatenate([[alpha], beta * u])

    wbar = np.clip(X @ theta, lo, hi)
    features = ItemFeatures(X)
    env = BernoulliEnvironment(wbar, K)
    logger.info(f"Synthetic problem L={L}, d={d}: ||theta*||={np.linalg.norm(theta):.4f}, f(A*, wbar)={env.optimal_reward():.4f}")
    return Problem(
        env=env,
        features=features,
        item_ids=[str(e) for e in range(L)],
        theta_norm=float(np.linalg.norm(theta)),
        description=f"synthetic L={L} d={d} seed={theta_seed}",
    )


def matrix_problem(W, K, d, split_seed, item_ids=None):
    """Features from the train half of W; the test half is the environment."""
    if K > W.items:
        raise ConfigError(f"K={K} exceeds the number of items L={W.items}")
    split = split_rows(W, split_seed)
    features = build_features(split, d)
    env = MatrixEnvironment(split.test, K)
    logger.info(f"Greedy A* on {split.test.users} test users covers {env.optimal_reward():.4f}")
    return Problem(
        env=env,
        features=features,
        item_ids=list(item_ids) if item_ids is not None else [str(e) for e in range(W.items)],
        description=f"matrix {W.users}x{W.items}",
    )


def load_feedback(dataset):
    """Feedback matrix and item ids for a DatasetSpec."""
    if dataset.matrix:
        return read_matrix(dataset.path)
    triples = load_ratings(dataset.path, dataset.format)
    binarized = binarize(triples, BinarizeRule(dataset.rule, dataset.threshold))
    return binarized.matrix, list(binarized.item_index)


def build_problem(cfg):
    if cfg.synthetic is not None:
        return synthetic_env(cfg.synthetic.L, cfg.d, cfg.K, cfg.synthetic.theta_seed)

    W, item_ids = load_feedback(cfg.dataset)
    if cfg.L_max is not None or cfg.m_max is not None:
        rows, cols = select_top_indices(
            W,
            cfg.L_max if cfg.L_max is not None else W.items,
            cfg.m_max if cfg.m_max is not None else W.users,
        )
        W = FeedbackMatrix(W.bits[np.ix_(rows, cols)])
        item_ids = [item_ids[j] for j in cols]
        logger.info(f"Reduced feedback matrix to {W.users} users x {W.items} items")
    if cfg.d > min(W.users // 2, W.items):
        raise ConfigError(f"d={cfg.d} is too large for a {W.users // 2} x {W.items} training matrix")
    return matrix_problem(W, cfg.K, cfg.d, cfg.split_seed, item_ids)


def resolve_c(cfg, problem):
    """Confidence constant for CascadeLinUCB: the configured c, or the one from the regret bound."""
    if cfg.algo != CascadeLinUCB.name or cfg.c is not None:
        return cfg.c
    theta_norm = cfg.theta_norm or problem.theta_norm or settings.DEFAULT_THETA_NORM
    c, bound = theorem_bound(cfg.n_steps, cfg.K, cfg.d, cfg.sigma, theta_norm)
    logger.info(f"c not set for {cfg.algo}; using c={c:.6g} from the regret bound (theta_norm={theta_norm:.6g}, bound={bound:.6g})")
    return c


def uniform_baseline_regret(env, draws=2000, seed=0):
    """Expected per-step regret of the uniform-random policy, f(A*) - f(A) averaged over random lists A."""
    rng = make_rng(seed)
    best = env.optimal_reward()
    gaps = [
        best - env.list_reward(RecommendationList(tuple(rng.choice(env.n_items, size=env.K, replace=False))))
        for _ in range(draws)
    ]
    return float(np.mean(gaps))


# ---------- RUNS ----------
def run_rngs(master_seed, run):
    """Independent (environment, policy) streams derived from SeedSequence([master_seed, run])."""
    env_seq, policy_seq = np.random.SeedSequence([master_seed, run]).spawn(2)
    return np.random.Generator(np.random.PCG64(env_seq)), np.random.Generator(np.random.PCG64(policy_seq))


def checkpoint_steps(n_steps, count=settings.CHECKPOINT_COUNT):
    interval = max(1, n_steps // count)
    steps = np.arange(interval, n_steps + 1, interval)
    if steps[-1] != n_steps:
        steps = np.append(steps, n_steps)
    return steps


def run_single(problem, cfg, c, steps, run):
    """One run; returns cumulative (regret, reward) at every checkpoint."""
    env_rng, policy_rng = run_rngs(cfg.master_seed, 0 if cfg.same_seed_runs else run)
    if cfg.oracle_replay:
        policy = OraclePolicy(problem.env.optimal, problem.env.n_items, policy_rng)
    else:
        policy = make_policy(cfg.algo, problem.features, cfg.K, cfg.sigma, c, policy_rng)

    regrets = np.zeros(len(steps))
    rewards = np.zeros(len(steps))
    total_regret = total_reward = 0.0
    checkpoint = 0
    for t in range(1, cfg.n_steps + 1):
        A_t = policy.select()
        outcome = problem.env.step(A_t, env_rng)
        policy.update(A_t, outcome.click)
        total_regret += outcome.regret
        total_reward += outcome.reward
        if t == steps[checkpoint]:
            regrets[checkpoint] = total_regret
            rewards[checkpoint] = total_reward
            checkpoint += 1
    logger.debug(f"Run {run} of {policy.name}: regret {total_regret:.3f}, reward {total_reward:.3f}")
    return regrets, rewards


def aggregate(steps, regrets, rewards, label=""):
    runs = regrets.shape[0]
    if runs > 1:
        stderr = regrets.std(axis=0, ddof=1) / math.sqrt(runs)
    else:
        stderr = np.zeros(regrets.shape[1])
    return RegretTrace(
        steps=np.asarray(steps, dtype=np.int64),
        mean_regret=regrets.mean(axis=0),
        stderr=stderr,
        mean_reward=rewards.mean(axis=0),
        per_run_final=regrets[:, -1].copy(),
        per_run_regret=regrets,
        per_run_reward=rewards,
        label=label,
    )


def run_experiment(cfg, problem=None):
    """Run cfg.runs independent runs of cfg.algo and aggregate them by run index."""
    if problem is None:
        problem = build_problem(cfg)
    if cfg.K > problem.env.n_items:
        raise ConfigError(f"K={cfg.K} exceeds the number of items L={problem.env.n_items}")
    if cfg.d != problem.features.dim:
        raise ConfigError(f"d={cfg.d} does not match the problem's feature dimension {problem.features.dim}")
    c = resolve_c(cfg, problem)
    steps = checkpoint_steps(cfg.n_steps, cfg.checkpoints)

    label = "oracle" if cfg.oracle_replay else cfg.algo
    logger.info(f"Running {label} on {problem.description}: {cfg.runs} runs x {cfg.n_steps} steps")
    runs = tqdm(range(cfg.runs), desc=label, disable=not settings.progress_enabled())
    results = Parallel(n_jobs=cfg.workers)(delayed(run_single)(problem, cfg, c, steps, run) for run in runs)

    trace = aggregate(steps, np.vstack([r for r, _ in results]), np.vstack([w for _, w in results]), label)
    baseline = cfg.n_steps * uniform_baseline_regret(problem.env)
    logger.info(
        f"{label}: final regret {trace.mean_regret[-1]:.4f} +/- {trace.stderr[-1]:.4f}, reward {trace.mean_reward[-1]:.4f} "
        f"(uniform-random baseline {baseline:.4f})"
    )
    return trace


def run_sweep(cfg, parameter, values):
    """The experiment grid: vary one of algo, L, d or K and keep everything else fixed."""
    if parameter not in SWEEP_PARAMETERS:
        raise ConfigError(f"cannot sweep {parameter!r}, expected one of {SWEEP_PARAMETERS}")
    shared = build_problem(cfg) if parameter == "algo" else None
    traces = {}
    for value in values:
        if parameter == "algo":
            variant = cfg.replace(algo=value)
        elif parameter == "L" and cfg.synthetic is not None:
            variant = cfg.replace(synthetic=SyntheticSpec(L=int(value), theta_seed=cfg.synthetic.theta_seed))
        elif parameter == "L":
            variant = cfg.replace(L_max=int(value))
        else:
            variant = cfg.replace(**{parameter: int(value)})
        trace = run_experiment(variant, shared)
        trace.label = f"{parameter}={value}"
        traces[value] = trace
    return traces


# ---------- OUTPUT ----------
def trace_frame(trace):
    return pd.DataFrame({
        "step": np.asarray(trace.steps, dtype=np.int64),
        "mean_regret": np.asarray(trace.mean_regret, dtype=float),
        "stderr": np.asarray(trace.stderr, dtype=float),
        "mean_reward": np.asarray(trace.mean_reward, dtype=float),
    }, columns=TRACE_COLUMNS)


def _write_frame(df, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(path, index=False, float_format=settings.CSV_FLOAT_FORMAT, lineterminator="\n")
    return path


def write_trace(trace, path):
    """CSV step,mean_regret,stderr,mean_reward with one row per checkpoint."""
    path = _write_frame(trace_frame(trace), path)
    logger.info(f"Wrote {len(trace.steps)} checkpoints to {path}")
    return path


def write_runs(trace, path):
    final_reward = trace.per_run_reward[:, -1] if trace.per_run_reward.size else np.zeros(trace.runs)
    df = pd.DataFrame({
        "run": np.arange(trace.runs),
        "final_regret": trace.per_run_final,
        "final_reward": final_reward,
    })
    return _write_frame(df, path)


def read_trace(path, label=None):
    df = pd.read_csv(path)
    missing = [c for c in TRACE_COLUMNS if c not in df.columns]
    if missing:
        raise DataError(f"{path} is not a trace file (missing columns {missing})")
    return RegretTrace(
        steps=df["step"].to_numpy(),
        mean_regret=df["mean_regret"].to_numpy(),
        stderr=df["stderr"].to_numpy(),
        mean_reward=df["mean_reward"].to_numpy(),
        per_run_final=np.zeros(0),
        label=label or Path(path).stem,
    )


def summarize_traces(traces):
    """One row per trace: final regret, its stderr, final reward, and regret relative to the best."""
    rows = []
    for label, trace in traces.items():
        if len(trace.steps) == 0:
            continue
        rows.append({
            "label": str(label),
            "steps": int(trace.steps[-1]),
            "final_regret": float(trace.mean_regret[-1]),
            "stderr": float(trace.stderr[-1]),
            "final_reward": float(trace.mean_reward[-1]),
        })
    df = pd.DataFrame(rows, columns=["label", "steps", "final_regret", "stderr", "final_reward"])
    if not df.empty:
        best = df["final_regret"].min()
        df["regret_ratio"] = df["final_regret"] / best if best > 0 else np.nan
    return df
