"""Dilated entropy distance-generating function over sequence-form strategies.

Weight recursion: each decision point gets 2 + 2 * (max weight among the
nodes its actions lead to); an observation point gets the sum of its
children's weights; the end of the process weighs 0.

All production-path operations (value, gradient, conjugate argmax, local
norms) run in O(|Sigma|) using the contiguous-subtree layout of
:class:`~treebandit.tree.TfsdmTree`.  The dense Hessian and inverse Hessian
are test oracles for small trees.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tree import DECISION, TfsdmTree, _as_vector, padded


@dataclass(frozen=True)
class DgfWeights:
    node_w: np.ndarray       # weight per node (0 kept for terminal links)
    dp_w: np.ndarray         # weight per decision point
    dp_log_actions: np.ndarray
    seq_w: np.ndarray        # weight of the owning decision point, per sequence
    seq_w_after: np.ndarray  # weight of the node the sequence leads to (0 if end)


def compute_weights(tree: TfsdmTree) -> DgfWeights:
    node_w = np.zeros(tree.n_nodes, dtype=np.float64)
    for nid in range(tree.n_nodes - 1, -1, -1):
        children = tree.node_children[nid]
        if tree.node_kind[nid] == DECISION:
            best = 0.0
            for cid in children:
                if cid >= 0:
                    best = max(best, node_w[cid])
            node_w[nid] = 2.0 + 2.0 * best
        else:
            node_w[nid] = sum(node_w[c] for c in children)
    dp_w = node_w[tree.dp_node]
    seq_w = node_w[tree.seq_node]
    seq_w_after = np.where(
        tree.seq_child_node >= 0, node_w[np.maximum(tree.seq_child_node, 0)], 0.0
    )
    return DgfWeights(
        node_w=node_w,
        dp_w=dp_w,
        dp_log_actions=np.log(tree.dp_n_actions.astype(np.float64)),
        seq_w=seq_w,
        seq_w_after=seq_w_after,
    )


def _dp_sums(tree: TfsdmTree, v: np.ndarray) -> np.ndarray:
    """Per-decision-point sums of a per-sequence vector."""
    cs = np.concatenate(([0.0], np.cumsum(v)))
    return cs[tree.dp_hi] - cs[tree.dp_lo]


def value(tree: TfsdmTree, w: DgfWeights, x) -> float:
    """Evaluate the regularizer at ``x`` (entrywise >= 0).

    Zero entries use the continuous extension (0 log 0 = 0), which is what
    evaluating at pure comparators in regret bounds requires.  Entries must
    be nonnegative and no entry may exceed a zero parent.
    """
    x = _as_vector(tree, x)
    if np.any(x < 0):
        raise ValueError("regularizer requires nonnegative entries")
    xp = padded(x)[tree.seq_parent]
    if np.any((x > 0) & (xp == 0)):
        raise ValueError("positive entry below a zero parent sequence")
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(x > 0, x * (np.log(x) - np.log(xp)), 0.0)
    dp_parent = padded(x)[tree.dp_parent_seq]
    return float(
        np.dot(w.seq_w, terms) + np.dot(w.dp_w * w.dp_log_actions, dp_parent)
    )


def gradient(tree: TfsdmTree, w: DgfWeights, z) -> np.ndarray:
    """Gradient of the regularizer at ``z`` (entrywise > 0), O(|Sigma|)."""
    z = _as_vector(tree, z)
    if np.any(z <= 0):
        raise ValueError("gradient requires strictly positive entries")
    zp = padded(z)
    g = w.seq_w * (1.0 + np.log(z) - np.log(zp[tree.seq_parent]))
    has_parent = tree.dp_parent_seq >= 0
    if np.any(has_parent):
        sums = _dp_sums(tree, z)[has_parent]
        parent = tree.dp_parent_seq[has_parent]
        dpw = w.dp_w[has_parent]
        contrib = dpw * w.dp_log_actions[has_parent] - dpw * sums / z[parent]
        g += np.bincount(parent, weights=contrib, minlength=tree.n_seq)
    return g


# exponent / product floors keep conjugate outputs strictly positive within
# float64; the induced distortion (< 1e-300 absolute) is far below every
# tolerance in the package
_EXP_FLOOR = -700.0
_PROB_FLOOR = 1e-300


def arg_conjugate(tree: TfsdmTree, w: DgfWeights, z) -> np.ndarray:
    """Argmax of z.x - value(x) over the strategy polytope, O(|Sigma|).

    Bottom-up per decision point: a local softmax of z / w_j (max-shifted
    and floored for overflow/underflow safety), whose conjugate value
    w_j * (logsumexp(z/w_j) - log |A_j|) accumulates onto the parent
    sequence entry; a final top-down pass multiplies local distributions
    into sequence form.  Output is strictly positive and flow-feasible.
    """
    z = _as_vector(tree, z).copy()
    behav = np.empty(tree.n_seq, dtype=np.float64)
    for level in reversed(tree.dp_levels):
        idx = tree.dp_action_index[level]
        zp = np.append(z, -np.inf)
        t = zp[idx] / w.dp_w[level][:, None]
        m = t.max(axis=1)
        e = np.exp(np.maximum(t - m[:, None], _EXP_FLOOR))
        total = e.sum(axis=1)
        local = e / total[:, None]
        mask = tree.dp_action_mask[level]
        behav[idx[mask]] = local[mask]
        v = w.dp_w[level] * (m + np.log(total) - w.dp_log_actions[level])
        parents = tree.dp_parent_seq[level]
        has_parent = parents >= 0
        if np.any(has_parent):
            np.add.at(z, parents[has_parent], v[has_parent])
    x = np.empty(tree.n_seq, dtype=np.float64)
    for level in tree.dp_levels:
        idx = tree.dp_action_index[level]
        mask = tree.dp_action_mask[level]
        seqs = idx[mask]
        x[seqs] = np.maximum(
            behav[seqs] * padded(x)[tree.seq_parent[seqs]], _PROB_FLOOR
        )
    return x


def hessian(tree: TfsdmTree, w: DgfWeights, z) -> np.ndarray:
    """Dense Hessian at a flow-feasible z > 0 (test-oracle scale only).

    Diagonal (w_j + w_after) / z_ja; the parent sequence of a decision
    point couples to each of its actions with -w_j / z_parent.
    """
    z = _as_vector(tree, z)
    if np.any(z <= 0):
        raise ValueError("hessian requires strictly positive entries")
    out = np.zeros((tree.n_seq, tree.n_seq))
    diag = (w.seq_w + w.seq_w_after) / z
    out[np.arange(tree.n_seq), np.arange(tree.n_seq)] = diag
    for d in range(tree.n_dp):
        p = tree.dp_parent_seq[d]
        if p < 0:
            continue
        lo, hi = tree.dp_lo[d], tree.dp_hi[d]
        out[p, lo:hi] = -w.dp_w[d] / z[p]
        out[lo:hi, p] = -w.dp_w[d] / z[p]
    return out


def inverse_hessian(tree: TfsdmTree, w: DgfWeights, x) -> np.ndarray:
    """Dense inverse Hessian via the subtree dyad sum (oracle scale only)."""
    x = _as_vector(tree, x)
    if np.any(x <= 0):
        raise ValueError("inverse hessian requires strictly positive entries")
    out = np.zeros((tree.n_seq, tree.n_seq))
    for i in range(tree.n_seq):
        v = np.zeros(tree.n_seq)
        v[i] = x[i]
        lo, hi = tree.seq_child_lo[i], tree.seq_child_hi[i]
        v[lo:hi] = x[lo:hi]
        out += np.outer(v, v) / (w.seq_w[i] * x[i])
    return out


def _subtree_sums(tree: TfsdmTree, v: np.ndarray) -> np.ndarray:
    """For each sequence, the sum of ``v`` over its descendant-or-self set."""
    cs = np.concatenate(([0.0], np.cumsum(v)))
    return v + cs[tree.seq_child_hi] - cs[tree.seq_child_lo]


def local_dual_norm_sq(tree: TfsdmTree, w: DgfWeights, x, z) -> float:
    """Squared dual local norm of z at x: sum of (subtree sums of z*x)^2
    over w_j * x_ja, computed in O(|Sigma|)."""
    x = _as_vector(tree, x)
    z = _as_vector(tree, z)
    if np.any(x <= 0):
        raise ValueError("local norms require a strictly positive strategy")
    s = _subtree_sums(tree, z * x)
    return float(np.sum(s * s / (w.seq_w * x)))


def local_primal_norm_sq(tree: TfsdmTree, w: DgfWeights, x, z) -> float:
    """Squared primal local norm of z at x (Hessian quadratic form), O(|Sigma|)."""
    x = _as_vector(tree, x)
    z = _as_vector(tree, z)
    if np.any(x <= 0):
        raise ValueError("local norms require a strictly positive strategy")
    total = float(np.sum((w.seq_w + w.seq_w_after) * z * z / x))
    has_parent = tree.dp_parent_seq >= 0
    if np.any(has_parent):
        sums = _dp_sums(tree, z)[has_parent]
        parent = tree.dp_parent_seq[has_parent]
        total -= 2.0 * float(
            np.sum(w.dp_w[has_parent] * z[parent] * sums / x[parent])
        )
    return total
