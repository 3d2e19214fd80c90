"""Online outcome-sampling regret-matching baseline.

This baseline is *not* a bandit algorithm: it consumes the realized path
of play from the environment (which information sets were visited and the
terminal loss), information the bandit learner never sees.  Sampling is
on-policy with no exploration mixing; the estimated counterfactual value
of an unsampled action is taken to be zero.  Run this way the method has
no known sublinear-regret guarantee; it is the strong trajectory-feedback
baseline the bandit algorithm is compared against.

Reported round losses use the environment's deterministic loss vector
against the current mixed strategy, so every algorithm shares one regret
yardstick.
"""

from __future__ import annotations

import numpy as np

from .sampling import sample_pure
from .tree import TfsdmTree, padded


def regret_matching(regrets) -> np.ndarray:
    """Normalized positive part; uniform when no regret is positive."""
    regrets = np.asarray(regrets, dtype=np.float64)
    if regrets.size == 0:
        raise ValueError("empty regret vector")
    plus = np.maximum(regrets, 0.0)
    total = plus.sum()
    if total <= 0.0:
        return np.full(regrets.size, 1.0 / regrets.size)
    return plus / total


class OutcomeSamplingMccfr:
    """Per-information-set cumulative regrets and strategy sums."""

    def __init__(self, tree: TfsdmTree):
        self.tree = tree
        self.cumulative_regret = np.zeros(tree.n_seq)
        self.strategy_sum = np.zeros(tree.n_seq)
        self.iteration = 0

    def behavioral(self) -> np.ndarray:
        """Current regret-matched local distribution, one block per
        decision point."""
        out = np.empty(self.tree.n_seq)
        for d in range(self.tree.n_dp):
            lo, hi = self.tree.dp_lo[d], self.tree.dp_hi[d]
            out[lo:hi] = regret_matching(self.cumulative_regret[lo:hi])
        return out

    def _sequence_form(self, behavioral: np.ndarray) -> np.ndarray:
        x = np.empty(self.tree.n_seq)
        for level in self.tree.dp_levels:
            for d in level:
                lo, hi = self.tree.dp_lo[d], self.tree.dp_hi[d]
                p = self.tree.dp_parent_seq[d]
                x[lo:hi] = behavioral[lo:hi] * (x[p] if p >= 0 else 1.0)
        return x

    def current_sequence_form(self) -> np.ndarray:
        return self._sequence_form(self.behavioral())

    def average_sequence_form(self) -> np.ndarray:
        tree = self.tree
        if self.strategy_sum.sum() <= 0.0:
            return self._sequence_form(np.full(tree.n_seq, 1.0))
        behav = np.empty(tree.n_seq)
        for d in range(tree.n_dp):
            lo, hi = tree.dp_lo[d], tree.dp_hi[d]
            block = self.strategy_sum[lo:hi]
            total = block.sum()
            if total <= 0.0:
                behav[lo:hi] = 1.0 / (hi - lo)
            else:
                behav[lo:hi] = block / total
        return self._sequence_form(behav)

    def step(self, env, rng: np.random.Generator) -> float:
        """One on-policy round against ``env``; returns the round loss
        (deterministic loss vector against the current mixed strategy)."""
        behavioral = self.behavioral()
        x = self._sequence_form(behavioral)
        round_loss = float(np.dot(env.loss, x))

        y = sample_pure(self.tree, x, rng)
        trajectory = env.sample_trajectory(y, rng)
        l_hat = trajectory.loss

        reach = 1.0
        for step in trajectory.steps:
            lo, hi = self.tree.dp_lo[step.dp], self.tree.dp_hi[step.dp]
            sigma = behavioral[lo:hi]
            p_a = sigma[step.action]
            # importance-weighted estimated values: the sampled action's
            # estimate is l / (reach * p_a); unsampled actions estimate 0
            v_infoset = l_hat / reach if reach > 0 else 0.0
            self.cumulative_regret[lo:hi] += v_infoset
            if p_a > 0 and reach > 0:
                self.cumulative_regret[lo + step.action] -= l_hat / (reach * p_a)
            self.strategy_sum[lo:hi] += reach * sigma
            reach *= p_a
        self.iteration += 1
        return round_loss

    def full_information_step(self, loss: np.ndarray) -> None:
        """Exact counterfactual update from a full loss vector (test mode)."""
        tree = self.tree
        behavioral = self.behavioral()
        action_value = np.zeros(tree.n_seq)
        node_value = np.zeros(tree.n_nodes)
        for nid in range(tree.n_nodes - 1, -1, -1):
            children = tree.node_children[nid]
            if tree.node_kind[nid] == 0:
                lo = tree.node_seq_lo[nid]
                for offset, cid in enumerate(children):
                    seq = lo + offset
                    action_value[seq] = loss[seq] + (
                        node_value[cid] if cid >= 0 else 0.0
                    )
                hi = lo + len(children)
                node_value[nid] = float(
                    np.dot(behavioral[lo:hi], action_value[lo:hi])
                )
            else:
                node_value[nid] = sum(node_value[c] for c in children)

        x = self._sequence_form(behavioral)
        xp = padded(x)
        for d in range(tree.n_dp):
            lo, hi = tree.dp_lo[d], tree.dp_hi[d]
            nid = tree.dp_node[d]
            reach = xp[tree.dp_parent_seq[d]]
            self.cumulative_regret[lo:hi] += node_value[nid] - action_value[lo:hi]
            self.strategy_sum[lo:hi] += reach * behavioral[lo:hi]
        self.iteration += 1
