"""The assembled bandit regret minimizer.

Each round samples a pure strategy from the internal mirror-descent
iterate, plays it, and converts the scalar loss evaluation into an
unbiased loss-estimate vector that drives the mirror-descent update.  The
interface strictly alternates ``next_strategy`` / ``observe_loss_evaluation``.
"""

from __future__ import annotations

import numpy as np

from . import dgf
from .estimator import loss_estimate
from .omd import OnlineMirrorDescent
from .sampling import make_rng, sample_pure
from .tree import TfsdmTree


def default_step_size(
    num_sequences: int, horizon: int, multiplier: float = 5.0
) -> float:
    """Horizon-tuned step size: multiplier / (2 |Sigma|^{3/2} sqrt(T)).

    The multiplier defaults to 5, the value used for the benchmark runs; 1
    recovers the theoretical tuning.
    """
    if num_sequences <= 0 or horizon <= 0 or multiplier <= 0:
        raise ValueError("step-size inputs must be positive")
    return multiplier / (2.0 * num_sequences**1.5 * horizon**0.5)


class ProtocolError(RuntimeError):
    """next_strategy / observe_loss_evaluation called out of order."""


class BanditRegretMinimizer:
    """Bandit learner: sample, play, estimate, feed mirror descent."""

    def __init__(
        self,
        tree: TfsdmTree,
        step_size: float,
        seed: int | np.random.Generator = 0,
        weights: dgf.DgfWeights | None = None,
    ):
        self.tree = tree
        self.omd = OnlineMirrorDescent(tree, step_size, weights)
        self.rng = seed if isinstance(seed, np.random.Generator) else make_rng(seed)
        self.last_mixed: np.ndarray | None = None
        self.last_pure: np.ndarray | None = None
        self._awaiting_feedback = False

    def next_strategy(self) -> np.ndarray:
        if self._awaiting_feedback:
            raise ProtocolError("next_strategy called twice without feedback")
        self.last_mixed = self.omd.next_strategy()
        self.last_pure = sample_pure(self.tree, self.last_mixed, self.rng)
        self._awaiting_feedback = True
        return self.last_pure

    def observe_loss_evaluation(self, evaluation: float) -> None:
        if not self._awaiting_feedback:
            raise ProtocolError("feedback received before a strategy was played")
        if not 0.0 <= evaluation <= 1.0:
            raise ValueError(f"loss evaluation {evaluation} outside [0, 1]")
        estimate = loss_estimate(
            self.tree, self.last_mixed, self.last_pure, evaluation
        )
        self.omd.observe_loss(estimate)
        self._awaiting_feedback = False

    @property
    def iteration(self) -> int:
        return self.omd.iteration
