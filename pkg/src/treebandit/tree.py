"""Tree-form sequential decision processes and sequence-form strategies.

A decision process alternates decision points (the agent picks an action)
and observation points (the environment reveals a signal) along a tree.
``build_tree`` normalizes arbitrary input trees into that strict alternating
form: consecutive same-kind nodes are consolidated, and a terminal signal is
replaced by a single-action decision point.

Sequences are (decision point, action) pairs.  They are indexed in
depth-first preorder so that every subtree occupies a contiguous index
range; all linear-time passes and the dense test oracles rely on this
layout.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

DECISION = 0
OBSERVATION = 1

FLOW_TOLERANCE = 1e-9
DEFAULT_ENUMERATION_CAP = 100_000


class TreeStructureError(ValueError):
    """Raised when an input tree description is malformed."""


@dataclass
class _RawNode:
    node_id: str
    kind: int
    edges: list  # list of (label, child_id_or_None)


def _parse_spec(spec: dict) -> tuple[str, dict[str, _RawNode]]:
    if "root" not in spec or "nodes" not in spec:
        raise TreeStructureError("tree spec needs 'root' and 'nodes'")
    nodes: dict[str, _RawNode] = {}
    for entry in spec["nodes"]:
        nid = entry["id"]
        if nid in nodes:
            raise TreeStructureError(f"duplicate node id {nid!r}")
        kind = {"decision": DECISION, "observation": OBSERVATION}.get(entry["kind"])
        if kind is None:
            raise TreeStructureError(f"unknown node kind {entry['kind']!r}")
        raw_edges = entry["edges"]
        if isinstance(raw_edges, dict):
            edges = [(str(k), v) for k, v in raw_edges.items()]
        else:
            edges = [(str(label), child) for label, child in raw_edges]
        if not edges:
            what = "action set" if kind == DECISION else "signal set"
            raise TreeStructureError(f"empty {what} at node {nid!r}")
        nodes[nid] = _RawNode(nid, kind, edges)
    root = spec["root"]
    if root not in nodes:
        raise TreeStructureError(f"root {root!r} not among nodes")
    return root, nodes


def _check_tree_shape(root: str, nodes: dict[str, _RawNode]) -> None:
    seen: set[str] = set()
    stack = [root]
    while stack:
        nid = stack.pop()
        if nid in seen:
            raise TreeStructureError(f"node {nid!r} reached twice (cycle or DAG)")
        seen.add(nid)
        for label, child in nodes[nid].edges:
            if child is None:
                continue
            if child not in nodes:
                raise TreeStructureError(f"dangling edge {nid!r} -> {child!r}")
            stack.append(child)


def _normalize(root: str, nodes: dict[str, _RawNode]) -> _RawNode:
    """Consolidate same-kind chains and replace terminal signals."""

    dummy_counter = itertools.count()
    memo: dict[str, _RawNode] = {}

    def norm(nid: str) -> _RawNode:
        if nid in memo:
            return memo[nid]
        node = nodes[nid]
        edges = []
        for label, child in node.edges:
            if child is None:
                if node.kind == OBSERVATION:
                    # terminal signal: simulate with a one-action decision point
                    did = f"__end{next(dummy_counter)}"
                    edges.append((label, _RawNode(did, DECISION, [("end", None)])))
                else:
                    edges.append((label, None))
                continue
            sub = norm(child)
            if sub.kind == node.kind:
                # same-kind chain: splice the child's edges, combining labels
                for sub_label, sub_child in sub.edges:
                    edges.append((f"{label}/{sub_label}", sub_child))
            else:
                edges.append((label, sub))
        out = _RawNode(node.node_id, node.kind, edges)
        memo[nid] = out
        return out

    return norm(root)


class TfsdmTree:
    """Immutable normalized decision process with precomputed index arrays.

    Nodes are numbered in depth-first preorder (parents before children);
    sequences likewise, so ``seq_child_lo[i]:seq_child_hi[i]`` is exactly the
    set of descendant sequences of sequence ``i`` (empty for terminal
    actions).
    """

    def __init__(self, root: _RawNode):
        node_kind: list[int] = []
        node_label: list[str] = []
        node_depth: list[int] = []
        node_parent_seq: list[int] = []
        node_children: list[list[int]] = []
        node_seq_lo: list[int] = []
        node_seq_hi: list[int] = []

        seq_node: list[int] = []
        seq_parent: list[int] = []
        seq_child_node: list[int] = []
        seq_label: list[str] = []

        def visit(raw: _RawNode, depth: int, parent_seq: int) -> int:
            nid = len(node_kind)
            node_kind.append(raw.kind)
            node_label.append(raw.node_id)
            node_depth.append(depth)
            node_parent_seq.append(parent_seq)
            node_children.append([])
            node_seq_lo.append(len(seq_node))
            node_seq_hi.append(-1)
            if raw.kind == DECISION:
                base = len(seq_node)
                for label, child in raw.edges:
                    seq_node.append(nid)
                    seq_parent.append(parent_seq)
                    seq_child_node.append(-1)
                    seq_label.append(label)
                for offset, (label, child) in enumerate(raw.edges):
                    if child is not None:
                        cid = visit(child, depth + 1, base + offset)
                        seq_child_node[base + offset] = cid
                        node_children[nid].append(cid)
                    else:
                        node_children[nid].append(-1)
            else:
                for label, child in raw.edges:
                    cid = visit(child, depth + 1, parent_seq)
                    node_children[nid].append(cid)
            node_seq_hi[nid] = len(seq_node)
            return nid

        visit(root, 1, -1)

        n_nodes = len(node_kind)
        n_seq = len(seq_node)
        self.n_nodes = n_nodes
        self.n_seq = n_seq
        self.root = 0
        self.node_kind = np.asarray(node_kind, dtype=np.int8)
        self.node_label = node_label
        self.node_depth = np.asarray(node_depth, dtype=np.int64)
        self.node_parent_seq = np.asarray(node_parent_seq, dtype=np.int64)
        self.node_children = [np.asarray(c, dtype=np.int64) for c in node_children]
        self.node_seq_lo = np.asarray(node_seq_lo, dtype=np.int64)
        self.node_seq_hi = np.asarray(node_seq_hi, dtype=np.int64)
        self.seq_node = np.asarray(seq_node, dtype=np.int64)
        self.seq_parent = np.asarray(seq_parent, dtype=np.int64)
        self.seq_child_node = np.asarray(seq_child_node, dtype=np.int64)
        self.seq_label = seq_label
        self.max_depth = int(self.node_depth.max())

        # number of decision points per subtree
        num_dec = np.zeros(n_nodes, dtype=np.int64)
        for nid in range(n_nodes - 1, -1, -1):
            total = 1 if node_kind[nid] == DECISION else 0
            for cid in self.node_children[nid]:
                if cid >= 0:
                    total += num_dec[cid]
            num_dec[nid] = total
        self.node_num_decisions = num_dec

        # decision-point view
        dp_node = np.flatnonzero(self.node_kind == DECISION)
        self.dp_node = dp_node
        self.n_dp = len(dp_node)
        self.node_dp_index = np.full(n_nodes, -1, dtype=np.int64)
        self.node_dp_index[dp_node] = np.arange(self.n_dp)
        self.dp_lo = self.node_seq_lo[dp_node]
        self.dp_n_actions = np.asarray(
            [len(self.node_children[n]) for n in dp_node], dtype=np.int64
        )
        self.dp_hi = self.dp_lo + self.dp_n_actions
        self.dp_parent_seq = self.node_parent_seq[dp_node]
        self.dp_depth = self.node_depth[dp_node]

        self.seq_dp = self.node_dp_index[self.seq_node]
        child = self.seq_child_node
        self.seq_child_lo = np.where(child >= 0, self.node_seq_lo[child], 0)
        self.seq_child_hi = np.where(child >= 0, self.node_seq_hi[child], 0)
        self.seq_terminal = child < 0
        self.seq_num_decisions = self.node_num_decisions[self.seq_node]
        self.seq_child_num_decisions = np.where(
            child >= 0, self.node_num_decisions[np.maximum(child, 0)], 0
        )

        # padded (n_dp, max_actions) gather matrix; the sentinel column index
        # n_seq points at a padding slot appended by callers
        max_a = int(self.dp_n_actions.max()) if self.n_dp else 0
        self.max_actions = max_a
        idx = np.full((self.n_dp, max_a), n_seq, dtype=np.int64)
        for d in range(self.n_dp):
            lo, hi = self.dp_lo[d], self.dp_hi[d]
            idx[d, : hi - lo] = np.arange(lo, hi)
        self.dp_action_index = idx
        self.dp_action_mask = idx < n_seq

        # depth levels (strict alternation makes each level single-kind)
        self.dp_levels: list[np.ndarray] = []
        for depth in np.unique(self.dp_depth):
            self.dp_levels.append(np.flatnonzero(self.dp_depth == depth))
        self.node_levels: list[np.ndarray] = []
        for depth in range(1, self.max_depth + 1):
            self.node_levels.append(np.flatnonzero(self.node_depth == depth))

        # per-level flattened edges, used by the linear-time traversals
        self._level_edges = []
        for level in self.node_levels:
            src, dst, nsig, seq = [], [], [], []
            for nid in level:
                children = self.node_children[nid]
                if self.node_kind[nid] == OBSERVATION:
                    for cid in children:
                        src.append(nid)
                        dst.append(cid)
                        nsig.append(len(children))
                        seq.append(-1)
                else:
                    lo = self.node_seq_lo[nid]
                    for offset, cid in enumerate(children):
                        if cid >= 0:
                            src.append(nid)
                            dst.append(cid)
                            nsig.append(0)
                            seq.append(lo + offset)
            self._level_edges.append(
                (
                    np.asarray(src, dtype=np.int64),
                    np.asarray(dst, dtype=np.int64),
                    np.asarray(nsig, dtype=np.float64),
                    np.asarray(seq, dtype=np.int64),
                )
            )

        self.tree_hash = self._structure_hash(root)

    @staticmethod
    def _structure_hash(root: _RawNode) -> str:
        def encode(raw: _RawNode):
            kind = "d" if raw.kind == DECISION else "o"
            return [
                kind,
                raw.node_id,
                [
                    [label, encode(child) if child is not None else None]
                    for label, child in raw.edges
                ],
            ]

        payload = json.dumps(encode(root), separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()

    # -- convenience -------------------------------------------------------

    def sequence_id(self, i: int) -> tuple[str, str]:
        return self.node_label[self.seq_node[i]], self.seq_label[i]

    def sequence_index(self, node_label: str, action_label: str) -> int:
        if not hasattr(self, "_seq_lookup"):
            self._seq_lookup = {self.sequence_id(i): i for i in range(self.n_seq)}
        return self._seq_lookup[(node_label, action_label)]

    def root_decision_points(self) -> np.ndarray:
        """Decision points whose parent sequence is the empty sequence."""
        return np.flatnonzero(self.dp_parent_seq < 0)

    def __repr__(self):
        return (
            f"TfsdmTree(|J|={self.n_dp}, |Sigma|={self.n_seq}, "
            f"D={self.max_depth})"
        )


def build_tree(spec: dict) -> TfsdmTree:
    """Build and normalize a decision process from a JSON-shaped description.

    ``spec`` is ``{"root": id, "nodes": [{"id", "kind", "edges"}, ...]}``
    where ``edges`` maps labels to child ids (``None`` marks the end of the
    process).  See the repository README for the documented schema.
    """
    root, nodes = _parse_spec(spec)
    _check_tree_shape(root, nodes)
    return TfsdmTree(_normalize(root, nodes))


def load_tree(path) -> TfsdmTree:
    with open(path) as fh:
        return build_tree(json.load(fh))


def _as_vector(tree: TfsdmTree, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (tree.n_seq,):
        raise ValueError(
            f"expected vector of length {tree.n_seq}, got shape {x.shape}"
        )
    return x


def padded(x: np.ndarray, pad_value: float = 1.0) -> np.ndarray:
    """Append a sentinel so index -1 (empty sequence) gathers ``pad_value``."""
    return np.append(x, pad_value)


def validate_strategy(tree: TfsdmTree, x, tol: float = FLOW_TOLERANCE) -> bool:
    """True iff ``x`` is nonnegative and satisfies the flow constraints."""
    x = _as_vector(tree, x)
    if np.any(x < -tol):
        return False
    xp = padded(x)
    cs = np.concatenate(([0.0], np.cumsum(x)))
    sums = cs[tree.dp_hi] - cs[tree.dp_lo]
    return bool(np.all(np.abs(sums - xp[tree.dp_parent_seq]) <= tol))


def uniform_strategy(tree: TfsdmTree) -> np.ndarray:
    """The strategy that randomizes uniformly at every decision point."""
    x = np.empty(tree.n_seq, dtype=np.float64)
    inv_n = 1.0 / tree.dp_n_actions
    for level in tree.dp_levels:
        seqs = np.concatenate(
            [np.arange(tree.dp_lo[d], tree.dp_hi[d]) for d in level]
        )
        b = np.repeat(inv_n[level], tree.dp_n_actions[level])
        xp = padded(x)[tree.seq_parent[seqs]]
        x[seqs] = b * xp
    return x


def random_strategy(
    tree: TfsdmTree, rng: np.random.Generator, floor: float = 0.0
) -> np.ndarray:
    """Random interior strategy; local action probabilities are >= ``floor``."""
    x = np.empty(tree.n_seq, dtype=np.float64)
    for level in tree.dp_levels:
        for d in level:
            lo, hi = tree.dp_lo[d], tree.dp_hi[d]
            n = hi - lo
            while True:
                b = rng.dirichlet(np.ones(n))
                if b.min() >= floor:
                    break
            p = tree.dp_parent_seq[d]
            x[lo:hi] = b * (x[p] if p >= 0 else 1.0)
    return x


def count_pure_strategies(tree: TfsdmTree) -> int:
    counts = np.zeros(tree.n_nodes, dtype=object)
    for nid in range(tree.n_nodes - 1, -1, -1):
        if tree.node_kind[nid] == DECISION:
            total = 0
            for cid in tree.node_children[nid]:
                total += 1 if cid < 0 else counts[cid]
            counts[nid] = total
        else:
            prod = 1
            for cid in tree.node_children[nid]:
                prod *= counts[cid]
            counts[nid] = prod
    return int(counts[tree.root])


def enumerate_pure_strategies(
    tree: TfsdmTree, cap: int = DEFAULT_ENUMERATION_CAP
) -> list[np.ndarray]:
    """All vertices of the strategy polytope (test-oracle use only)."""
    total = count_pure_strategies(tree)
    if total > cap:
        raise ValueError(f"{total} pure strategies exceed cap {cap}")

    def collect(nid: int) -> list[tuple[int, ...]]:
        if tree.node_kind[nid] == DECISION:
            out = []
            lo = tree.node_seq_lo[nid]
            for offset, cid in enumerate(tree.node_children[nid]):
                own = (lo + offset,)
                if cid < 0:
                    out.append(own)
                else:
                    out.extend(own + sub for sub in collect(cid))
            return out
        parts = [collect(cid) for cid in tree.node_children[nid]]
        return [
            tuple(itertools.chain.from_iterable(combo))
            for combo in itertools.product(*parts)
        ]

    strategies = []
    for support in collect(tree.root):
        y = np.zeros(tree.n_seq, dtype=np.float64)
        y[list(support)] = 1.0
        strategies.append(y)
    return strategies


def pure_strategy_probability(tree: TfsdmTree, x, y) -> float:
    """Probability that the natural sampling scheme draws ``y`` from ``x``."""
    x = _as_vector(tree, x)
    y = _as_vector(tree, y)
    support = y > 0.5
    parents = tree.seq_parent[support]
    xp = padded(x)[parents]
    if np.any(xp <= 0.0):
        raise ValueError("strategy has zero mass on a parent of y's support")
    return float(np.prod(x[support] / xp))


def linear_min_max(tree: TfsdmTree, loss) -> tuple[float, np.ndarray, float]:
    """Exact min/max of ``loss . y`` over pure strategies, with an argmin.

    One bottom-up pass: decision points minimize (resp. maximize) over
    actions, observation points sum over children.
    """
    loss = _as_vector(tree, loss)
    lo_val = np.zeros(tree.n_nodes)
    hi_val = np.zeros(tree.n_nodes)
    argmin_action = np.zeros(tree.n_nodes, dtype=np.int64)
    for nid in range(tree.n_nodes - 1, -1, -1):
        children = tree.node_children[nid]
        if tree.node_kind[nid] == DECISION:
            base = tree.node_seq_lo[nid]
            best_lo, best_hi, best_a = math.inf, -math.inf, 0
            for offset, cid in enumerate(children):
                v_lo = loss[base + offset] + (lo_val[cid] if cid >= 0 else 0.0)
                v_hi = loss[base + offset] + (hi_val[cid] if cid >= 0 else 0.0)
                if v_lo < best_lo:
                    best_lo, best_a = v_lo, offset
                best_hi = max(best_hi, v_hi)
            lo_val[nid], hi_val[nid], argmin_action[nid] = best_lo, best_hi, best_a
        else:
            lo_val[nid] = sum(lo_val[c] for c in children)
            hi_val[nid] = sum(hi_val[c] for c in children)

    y = np.zeros(tree.n_seq)
    stack = [tree.root]
    while stack:
        nid = stack.pop()
        if tree.node_kind[nid] == DECISION:
            a = argmin_action[nid]
            y[tree.node_seq_lo[nid] + a] = 1.0
            cid = tree.node_children[nid][a]
            if cid >= 0:
                stack.append(cid)
        else:
            stack.extend(tree.node_children[nid])
    return float(lo_val[tree.root]), y, float(hi_val[tree.root])
