from .builders import goofspiel, kuhn_poker, leduc_poker, matrix_game
from .efg import (
    Chance,
    Decision,
    ExtensiveFormGame,
    ImperfectRecallError,
    NormalizedLoss,
    PlayerReduction,
    Terminal,
    loss_vector,
    normalize_loss,
    raise_to_nonnegative,
    tfsdm_for_player,
)
from .environment import Environment, Trajectory, TrajectoryStep, make_environment
from .equilibrium import EquilibriumResult, compute_equilibrium, exploitability

__all__ = [
    "Chance",
    "Decision",
    "Environment",
    "EquilibriumResult",
    "ExtensiveFormGame",
    "ImperfectRecallError",
    "NormalizedLoss",
    "PlayerReduction",
    "Terminal",
    "Trajectory",
    "TrajectoryStep",
    "compute_equilibrium",
    "exploitability",
    "goofspiel",
    "kuhn_poker",
    "leduc_poker",
    "loss_vector",
    "make_environment",
    "matrix_game",
    "normalize_loss",
    "raise_to_nonnegative",
    "tfsdm_for_player",
]
