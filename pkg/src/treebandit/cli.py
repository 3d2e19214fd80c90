"""Command-line harness.

``treebandit run`` replays a configured experiment into per-run CSV files;
``treebandit equilibrium`` precomputes a self-play opponent strategy file.
Exit codes: 0 ok, 1 configuration error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import sys

from .experiment import (
    ALGORITHMS,
    ConfigError,
    ExperimentConfig,
    GAMES,
    make_game,
    run_experiment,
)
from .games import compute_equilibrium
from .strategy_io import StrategyFileError, save_strategy


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="treebandit", exit_on_error=False)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a seeded experiment", exit_on_error=False)
    run.add_argument("--game", required=True, choices=sorted(GAMES))
    run.add_argument("--algo", required=True, choices=ALGORITHMS)
    run.add_argument("--iters", type=int, required=True)
    run.add_argument("--runs", type=int, default=1)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--eta-mult", type=float, default=5.0)
    run.add_argument("--opponent", required=True, help="opponent strategy file")
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--goofspiel-k", type=int, default=3)
    run.add_argument("--workers", type=int, default=0)

    eq = sub.add_parser(
        "equilibrium",
        help="precompute a self-play opponent strategy file",
        exit_on_error=False,
    )
    eq.add_argument("--game", required=True, choices=sorted(GAMES))
    eq.add_argument("--iters", type=int, required=True)
    eq.add_argument("--player", type=int, default=2, choices=(1, 2))
    eq.add_argument("--out", required=True, help="strategy file path")
    eq.add_argument("--goofspiel-k", type=int, default=3)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except (argparse.ArgumentError, SystemExit) as exc:
        if isinstance(exc, SystemExit) and exc.code in (0, None):
            return 0
        print(f"error: {exc}", file=sys.stderr)
        return 1

    game_params = {}
    if args.game == "goofspiel":
        game_params["k"] = args.goofspiel_k

    try:
        if args.command == "run":
            config = ExperimentConfig(
                game=args.game,
                algo=args.algo,
                iters=args.iters,
                runs=args.runs,
                seed=args.seed,
                eta_multiplier=args.eta_mult,
                opponent_path=args.opponent,
                out_dir=args.out,
                game_params=game_params,
                workers=args.workers,
            )
            manifest = run_experiment(config)
            print(f"wrote {len(manifest['csv_files'])} runs to {args.out}")
        else:
            if args.iters < 1:
                raise ConfigError("iters must be >= 1")
            game = make_game(args.game, game_params)
            result = compute_equilibrium(game, args.iters)
            tree = game.reduction(args.player).tree
            save_strategy(
                args.out,
                tree,
                result.strategies[args.player],
                meta={
                    "game": args.game,
                    "player": args.player,
                    "iterations": args.iters,
                    "exploitability": repr(result.exploitability),
                },
            )
            print(
                f"wrote {args.out} (exploitability "
                f"{result.exploitability:.6f})"
            )
    except (ConfigError, StrategyFileError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - runtime failures exit 2
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
