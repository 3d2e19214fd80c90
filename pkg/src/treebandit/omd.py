"""Full-information online mirror descent with the dilated entropy regularizer.

The update is multiplicative-weights-like but tree-aware: feed the observed
nonnegative loss estimate, form g = gradient(x) - eta * loss, and project
back through the conjugate argmax.  Iterates stay strictly positive and
flow-feasible at all times, starting from the uniform strategy.
"""

from __future__ import annotations

import numpy as np

from . import dgf
from .tree import TfsdmTree, _as_vector, uniform_strategy


class OnlineMirrorDescent:
    """Sequential regret minimizer over one decision process."""

    def __init__(
        self,
        tree: TfsdmTree,
        step_size: float,
        weights: dgf.DgfWeights | None = None,
    ):
        if step_size <= 0:
            raise ValueError("step size must be positive")
        self.tree = tree
        self.step_size = float(step_size)
        self.weights = weights if weights is not None else dgf.compute_weights(tree)
        self.current = uniform_strategy(tree)
        self.iteration = 0

    def next_strategy(self) -> np.ndarray:
        """The strategy for the coming round; does not advance state."""
        return self.current.copy()

    def observe_loss(self, loss_estimate) -> None:
        """Advance one round given a nonnegative loss (estimate) vector."""
        loss_estimate = _as_vector(self.tree, loss_estimate)
        if np.any(loss_estimate < 0):
            raise ValueError("loss estimate must be entrywise nonnegative")
        z = dgf.gradient(self.tree, self.weights, self.current)
        z -= self.step_size * loss_estimate
        self.current = dgf.arg_conjugate(self.tree, self.weights, z)
        self.iteration += 1
