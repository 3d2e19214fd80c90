"""Experiment harness: seeded repeated runs with CSV regret logs.

Each run writes one CSV (schema
``run_id,iter,elapsed_ns,loss_eval,cum_loss,avg_regret``) plus a JSON
manifest that pins everything needed to reproduce the non-timing columns:
config echo, tree hash, normalization constants, per-run seeds.  Runs are
independent (seeded substreams) and execute in a process pool.
"""

from __future__ import annotations

import csv
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .bandit import BanditRegretMinimizer, default_step_size
from .games import (
    Environment,
    ExtensiveFormGame,
    goofspiel,
    kuhn_poker,
    leduc_poker,
    matrix_game,
)
from .mccfr import OutcomeSamplingMccfr
from .sampling import make_rng, substream_seed
from .strategy_io import load_strategy
from .tree import linear_min_max

CSV_HEADER = ["run_id", "iter", "elapsed_ns", "loss_eval", "cum_loss", "avg_regret"]

GAMES = {
    "matrix": matrix_game,
    "kuhn": kuhn_poker,
    "leduc": leduc_poker,
    "goofspiel": goofspiel,
}

ALGORITHMS = ("bandit-omd", "mccfr")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    game: str
    algo: str
    iters: int
    runs: int
    seed: int
    eta_multiplier: float = 5.0
    opponent_path: str = ""
    out_dir: str = "runs"
    game_params: dict = field(default_factory=dict)
    workers: int = 0  # 0: one per cpu (capped by runs)

    def validate(self) -> None:
        if self.game not in GAMES:
            raise ConfigError(f"unknown game {self.game!r}")
        if self.algo not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algo!r}")
        if self.iters < 1 or self.runs < 1:
            raise ConfigError("iters and runs must be >= 1")
        if self.eta_multiplier <= 0:
            raise ConfigError("step-size multiplier must be positive")
        if not self.opponent_path:
            raise ConfigError("opponent strategy file is required")


def make_game(name: str, params: dict | None = None) -> ExtensiveFormGame:
    return GAMES[name](**(params or {}))


def _build_environment(config: ExperimentConfig) -> Environment:
    game = make_game(config.game, config.game_params)
    opp_tree = game.reduction(2).tree
    if not os.path.exists(config.opponent_path):
        raise ConfigError(f"opponent file {config.opponent_path!r} not found")
    opponent = load_strategy(config.opponent_path, opp_tree)
    return Environment(game, 1, opponent)


def run_rows(env: Environment, config: ExperimentConfig, run_id: int):
    """Rows of one run (list of column tuples)."""
    seed = substream_seed(config.seed, run_id)
    rng = make_rng(seed)
    min_eval, _, _ = linear_min_max(env.tree, env.loss)
    rows = []
    cum = 0.0
    start = time.perf_counter_ns()
    if config.algo == "bandit-omd":
        eta = default_step_size(env.tree.n_seq, config.iters, config.eta_multiplier)
        learner = BanditRegretMinimizer(env.tree, eta, rng)
        for t in range(1, config.iters + 1):
            y = learner.next_strategy()
            loss_eval = env.evaluate(y)
            learner.observe_loss_evaluation(loss_eval)
            cum += loss_eval
            rows.append(
                (
                    run_id,
                    t,
                    time.perf_counter_ns() - start,
                    loss_eval,
                    cum,
                    (cum - t * min_eval) / t,
                )
            )
    else:
        learner = OutcomeSamplingMccfr(env.tree)
        for t in range(1, config.iters + 1):
            loss_eval = learner.step(env, rng)
            cum += loss_eval
            rows.append(
                (
                    run_id,
                    t,
                    time.perf_counter_ns() - start,
                    loss_eval,
                    cum,
                    (cum - t * min_eval) / t,
                )
            )
    return rows


def _write_csv(path: str, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for run_id, t, ns, loss_eval, cum, avg in rows:
            writer.writerow(
                [run_id, t, ns, repr(float(loss_eval)), repr(float(cum)), repr(float(avg))]
            )


def _worker(args) -> str:
    config_dict, run_id = args
    config = ExperimentConfig(**config_dict)
    env = _build_environment(config)
    rows = run_rows(env, config, run_id)
    path = os.path.join(config.out_dir, f"run_{run_id:03d}.csv")
    _write_csv(path, rows)
    return path


def run_experiment(config: ExperimentConfig) -> dict:
    """Run all repetitions; returns the manifest (also written to disk)."""
    config.validate()
    env = _build_environment(config)  # fail fast on game/opponent mismatch
    os.makedirs(config.out_dir, exist_ok=True)

    workers = config.workers or min(config.runs, os.cpu_count() or 1)
    args = [(asdict(config), run_id) for run_id in range(config.runs)]
    if workers > 1 and config.runs > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            paths = list(pool.map(_worker, args))
    else:
        paths = [_worker(a) for a in args]

    manifest = {
        "config": asdict(config),
        "tree_hash": env.tree.tree_hash,
        "num_sequences": env.tree.n_seq,
        "normalization": {
            "raw_min": env.raw_min,
            "raw_max": env.raw_max,
            "constant": env.constant,
        },
        "run_seeds": [
            substream_seed(config.seed, run_id) for run_id in range(config.runs)
        ],
        "csv_files": [os.path.basename(p) for p in paths],
        "csv_header": CSV_HEADER,
    }
    manifest_path = os.path.join(config.out_dir, "manifest.json")
    with open(manifest_path, "w") as fh:
        json.dump(manifest, fh, indent=2)
    manifest["manifest_path"] = manifest_path
    return manifest
