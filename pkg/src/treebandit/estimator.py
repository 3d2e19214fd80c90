"""Linear-time unbiased loss estimates from scalar bandit feedback.

Given the mixed strategy x that was sampled from, the pure strategy y that
was played, and the scalar loss evaluation l = loss . y in [0, 1], a single
top-down traversal produces a nonnegative vector whose conditional
expectation matches the true loss vector on every difference of pure
strategies.  The traversal carries an exploration budget ``alpha`` per
node:

* observation point v with n signals: every child receives
  alpha/n + (1 - l) * (n - 1)/n * y_parent(v);
* decision point v: a terminal action (v, a) gets
  alpha / x_parent(v) + (y_va / x_va) (l + N_v - 1), a non-terminal action
  gets (y_va / x_va) (N_v - N_child) and its child receives
  alpha * x_va / x_parent(v),

where N counts decision points in a subtree.  The dense-matrix oracle in
:mod:`treebandit.oracle` reproduces the same vector from its algebraic
definition and arbitrates this recursion in the tests.
"""

from __future__ import annotations

import numpy as np

from .tree import OBSERVATION, TfsdmTree, _as_vector, padded


def loss_estimate(tree: TfsdmTree, x, y, l: float) -> np.ndarray:
    """Estimate the loss vector from the evaluation ``l`` of pure ``y``."""
    if not 0.0 <= l <= 1.0:
        raise ValueError(f"loss evaluation {l} outside [0, 1]")
    x = _as_vector(tree, x)
    y = _as_vector(tree, y)
    if np.any(x <= 0.0):
        raise ValueError("loss estimate requires a strictly positive strategy")

    xp = padded(x)
    yp = padded(y)
    alpha = np.zeros(tree.n_nodes, dtype=np.float64)
    for level_nodes, edges in zip(tree.node_levels, tree._level_edges):
        src, dst, nsig, seq = edges
        if len(src) == 0:
            continue
        if tree.node_kind[level_nodes[0]] == OBSERVATION:
            y_par = yp[tree.node_parent_seq[src]]
            alpha[dst] = alpha[src] / nsig + (nsig - 1.0) / nsig * (1.0 - l) * y_par
        else:
            alpha[dst] = alpha[src] * x[seq] / xp[tree.seq_parent[seq]]

    ratio = y / x
    xpar = xp[tree.seq_parent]
    est = np.where(
        tree.seq_terminal,
        alpha[tree.seq_node] / xpar + ratio * (l + tree.seq_num_decisions - 1.0),
        ratio * (tree.seq_num_decisions - tree.seq_child_num_decisions),
    )
    return est
