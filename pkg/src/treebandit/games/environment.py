"""Fixed-opponent environments with normalized linear losses.

The default environment is deterministic: the opponent plays a fixed
sequence-form strategy, so the loss vector is constant across rounds and
``evaluate`` returns the exact expected loss of the submitted pure
strategy, guaranteed to lie in [0, 1].  ``sample_trajectory`` additionally
realizes chance and opponent moves for baselines that consume the path of
play; the bandit algorithm never needs it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..tree import TfsdmTree, _as_vector, padded
from .efg import (
    Chance,
    Decision,
    ExtensiveFormGame,
    NormalizedLoss,
    PlayerReduction,
    Terminal,
    loss_vector,
    normalize_loss,
)

_EVAL_SLACK = 1e-9


@dataclass
class TrajectoryStep:
    dp: int            # learner decision point index
    action: int        # local action offset
    seq: int           # global sequence index


@dataclass
class Trajectory:
    steps: list[TrajectoryStep]
    env_probs: list[float]  # chance / opponent sampling probabilities
    loss: float             # normalized terminal loss


class Environment:
    """Learner-side view of a game against a fixed opponent strategy."""

    def __init__(
        self,
        game: ExtensiveFormGame,
        player: int,
        opponent_strategy,
    ):
        self.game = game
        self.player = player
        self.reduction: PlayerReduction = game.reduction(player)
        self.tree: TfsdmTree = self.reduction.tree
        self.opp_reduction: PlayerReduction = game.reduction(3 - player)
        self.opponent = _as_vector(self.opp_reduction.tree, opponent_strategy)
        raw = loss_vector(game, player, self.opponent)
        norm: NormalizedLoss = normalize_loss(self.tree, raw)
        self.loss = norm.loss
        self.raw_min = norm.raw_min
        self.raw_max = norm.raw_max
        self.constant = norm.constant
        self._opp_behavioral = self._behavioral_cache()

    def _behavioral_cache(self) -> dict[str, np.ndarray]:
        x = self.opponent
        tree = self.opp_reduction.tree
        out = {}
        for key, seqs in self.opp_reduction.infoset_seqs.items():
            parent = tree.seq_parent[seqs[0]]
            denom = x[parent] if parent >= 0 else 1.0
            if denom <= 0.0:
                probs = np.full(len(seqs), 1.0 / len(seqs))
            else:
                probs = x[seqs] / denom
                probs = probs / probs.sum()
            out[key] = probs
        return out

    def evaluate(self, y) -> float:
        """Exact loss evaluation of a pure strategy, in [0, 1]."""
        y = _as_vector(self.tree, y)
        value = float(np.dot(self.loss, y))
        if value < -_EVAL_SLACK or value > 1.0 + _EVAL_SLACK:
            raise ValueError(f"loss evaluation {value} escaped [0, 1]")
        return min(1.0, max(0.0, value))

    def _normalized_terminal_loss(self, payoff: float) -> float:
        if self.constant:
            return 0.0
        raw = -payoff if self.player == 1 else payoff
        return (raw - self.raw_min) / (self.raw_max - self.raw_min)

    def sample_trajectory(
        self, y, rng: np.random.Generator
    ) -> Trajectory:
        """Play one game: chance and opponent sampled, learner follows y."""
        y = _as_vector(self.tree, y)
        yp = padded(y)
        steps: list[TrajectoryStep] = []
        env_probs: list[float] = []
        node = self.game.root
        while not isinstance(node, Terminal):
            if isinstance(node, Chance):
                probs = np.asarray([p for _, p, _ in node.outcomes])
                pick = _draw(rng, probs)
                env_probs.append(float(probs[pick]))
                node = node.outcomes[pick][2]
            elif node.player == self.player:
                key = node.infoset
                dp = self.reduction.infoset_dp[key]
                seqs = self.reduction.infoset_seqs[key]
                chosen = np.flatnonzero(y[seqs] > 0.5)
                if len(chosen) != 1:
                    raise ValueError(
                        f"pure strategy does not choose an action at {key!r}"
                    )
                offset = int(chosen[0])
                steps.append(TrajectoryStep(dp=dp, action=offset, seq=int(seqs[offset])))
                node = node.actions[offset][1]
            else:
                probs = self._opp_behavioral[node.infoset]
                pick = _draw(rng, probs)
                env_probs.append(float(probs[pick]))
                node = node.actions[pick][1]
        return Trajectory(
            steps=steps,
            env_probs=env_probs,
            loss=self._normalized_terminal_loss(node.payoff),
        )


def _draw(rng: np.random.Generator, probs: np.ndarray) -> int:
    u = rng.random()
    total = 0.0
    for i, p in enumerate(probs):
        total += p
        if u < total:
            return i
    return len(probs) - 1


def make_environment(
    game: ExtensiveFormGame, player: int, opponent_strategy
) -> Environment:
    return Environment(game, player, opponent_strategy)
