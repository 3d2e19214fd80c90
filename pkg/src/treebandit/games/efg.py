"""Two-player zero-sum extensive-form games and their per-player reduction.

A game is a tree of chance nodes (fixed outcome probabilities), decision
nodes for players 1 and 2 (grouped into information sets by string key),
and terminals carrying player 1's payoff.  ``reduction`` turns the online
decision problem faced by one player into a :class:`TfsdmTree`:

* decision points are the player's information sets;
* after a sequence (infoset, action), an observation point branches over
  the information sets the player can find itself in next (branches along
  which the player never acts again are not part of the player's process);
* when the player's process would begin with an observation (for example a
  private deal), a single-action root decision point is prepended so the
  tree has a unique root sequence.

Loss vectors fold chance and the opponent's sequence-form reach into one
real vector per learner sequence, so expected loss is the plain inner
product with a sequence-form strategy.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..tree import TfsdmTree, _as_vector, build_tree, padded, validate_strategy
from ..tree import linear_min_max

PROB_TOLERANCE = 1e-9
ROOT_LABEL = "·root"
ROOT_ACTION = "start"


class ImperfectRecallError(ValueError):
    """The information-set partition violates perfect recall."""


@dataclass
class Terminal:
    payoff: float  # to player 1
    index: int = -1


@dataclass
class Chance:
    outcomes: list  # (label, probability, child)


@dataclass
class Decision:
    player: int  # 1 or 2
    infoset: str
    actions: list  # (label, child)


class ExtensiveFormGame:
    def __init__(self, name: str, root):
        self.name = name
        self.root = root
        payoffs: list[float] = []
        reach: list[float] = []

        def walk(node, chance_reach):
            if isinstance(node, Terminal):
                node.index = len(payoffs)
                payoffs.append(node.payoff)
                reach.append(chance_reach)
            elif isinstance(node, Chance):
                total = sum(p for _, p, _ in node.outcomes)
                if abs(total - 1.0) > PROB_TOLERANCE:
                    raise ValueError(f"chance probabilities sum to {total}")
                for _, p, child in node.outcomes:
                    walk(child, chance_reach * p)
            elif isinstance(node, Decision):
                if node.player not in (1, 2):
                    raise ValueError("players are 1 and 2")
                for _, child in node.actions:
                    walk(child, chance_reach)
            else:
                raise TypeError(f"unexpected node {node!r}")

        walk(root, 1.0)
        self.terminal_payoffs = np.asarray(payoffs)
        self.terminal_chance_reach = np.asarray(reach)
        self.n_terminals = len(payoffs)
        self._reductions: dict[int, PlayerReduction] = {}

    def max_abs_payoff(self) -> float:
        return float(np.max(np.abs(self.terminal_payoffs)))

    def reduction(self, player: int) -> "PlayerReduction":
        if player not in self._reductions:
            self._reductions[player] = _reduce(self, player)
        return self._reductions[player]


@dataclass
class PlayerReduction:
    player: int
    tree: TfsdmTree
    terminal_seq: np.ndarray       # learner sequence leading to each terminal
    infoset_dp: dict[str, int]     # infoset key -> decision point index
    infoset_seqs: dict[str, np.ndarray]  # infoset key -> its sequence indices


def _reduce(game: ExtensiveFormGame, player: int) -> PlayerReduction:
    first: list[str] = []
    infoset_actions: dict[str, list[str]] = {}
    infoset_parent: dict[str, tuple[str, str] | None] = {}
    next_sets: dict[tuple[str, str], list[str]] = {}
    terminal_last: list[tuple[str, str] | None] = [None] * game.n_terminals
    early_terminal = False

    def visit(node, last):
        nonlocal early_terminal
        if isinstance(node, Terminal):
            terminal_last[node.index] = last
            if last is None:
                early_terminal = True
            return
        if isinstance(node, Chance):
            for _, _, child in node.outcomes:
                visit(child, last)
            return
        if node.player != player:
            for _, child in node.actions:
                visit(child, last)
            return
        key = node.infoset
        labels = [a for a, _ in node.actions]
        if key in infoset_actions:
            if infoset_actions[key] != labels:
                raise ImperfectRecallError(
                    f"infoset {key!r} has inconsistent action sets"
                )
            if infoset_parent[key] != last:
                raise ImperfectRecallError(
                    f"infoset {key!r} reached with different own histories"
                )
        else:
            infoset_actions[key] = labels
            infoset_parent[key] = last
            if last is None:
                first.append(key)
            else:
                next_sets.setdefault(last, []).append(key)
        for label, child in node.actions:
            visit(child, (key, label))

    visit(game.root, None)
    if not infoset_actions:
        raise ValueError(f"player {player} never acts in {game.name}")

    nodes = []
    for key, labels in infoset_actions.items():
        edges = []
        for label in labels:
            nxt = next_sets.get((key, label))
            edges.append([label, f"obs:{key}:{label}" if nxt else None])
        nodes.append({"id": key, "kind": "decision", "edges": edges})
    for (key, label), nxt in next_sets.items():
        nodes.append(
            {
                "id": f"obs:{key}:{label}",
                "kind": "observation",
                "edges": [[j, j] for j in nxt],
            }
        )

    use_dummy = len(first) != 1 or early_terminal
    if use_dummy:
        if ROOT_LABEL in infoset_actions:
            raise ValueError(f"infoset key {ROOT_LABEL!r} is reserved")
        nodes.append(
            {
                "id": ROOT_LABEL,
                "kind": "decision",
                "edges": [[ROOT_ACTION, "obs:" + ROOT_LABEL]],
            }
        )
        nodes.append(
            {
                "id": "obs:" + ROOT_LABEL,
                "kind": "observation",
                "edges": [[j, j] for j in first],
            }
        )
        root = ROOT_LABEL
    else:
        root = first[0]

    tree = build_tree({"root": root, "nodes": nodes})

    terminal_seq = np.empty(game.n_terminals, dtype=np.int64)
    for tid, last in enumerate(terminal_last):
        if last is None:
            terminal_seq[tid] = tree.sequence_index(ROOT_LABEL, ROOT_ACTION)
        else:
            terminal_seq[tid] = tree.sequence_index(*last)

    infoset_dp = {}
    infoset_seqs = {}
    for key in infoset_actions:
        nid = tree.seq_node[tree.sequence_index(key, infoset_actions[key][0])]
        d = int(tree.node_dp_index[nid])
        infoset_dp[key] = d
        infoset_seqs[key] = np.arange(tree.dp_lo[d], tree.dp_hi[d])
    if use_dummy:
        root_seq = tree.sequence_index(ROOT_LABEL, ROOT_ACTION)
        infoset_dp[ROOT_LABEL] = int(tree.seq_dp[root_seq])
        infoset_seqs[ROOT_LABEL] = np.asarray([root_seq])

    return PlayerReduction(
        player=player,
        tree=tree,
        terminal_seq=terminal_seq,
        infoset_dp=infoset_dp,
        infoset_seqs=infoset_seqs,
    )


def tfsdm_for_player(
    game: ExtensiveFormGame, player: int
) -> tuple[TfsdmTree, np.ndarray]:
    """The decision process one player faces, and the terminal->sequence map."""
    red = game.reduction(player)
    return red.tree, red.terminal_seq


def loss_vector(
    game: ExtensiveFormGame, player: int, opponent_strategy
) -> np.ndarray:
    """Raw loss vector over the player's sequences against a fixed opponent.

    Entry (j, a) sums -payoff * chance reach * opponent sequence-form reach
    over the terminals whose last learner sequence is (j, a); expected loss
    of any mixed strategy x is then loss . x.
    """
    red = game.reduction(player)
    opp = game.reduction(3 - player)
    opponent_strategy = _as_vector(opp.tree, opponent_strategy)
    if not validate_strategy(opp.tree, opponent_strategy):
        raise ValueError("invalid opponent sequence-form strategy")
    sign = 1.0 if player == 1 else -1.0
    weights = (
        -sign
        * game.terminal_payoffs
        * game.terminal_chance_reach
        * opponent_strategy[opp.terminal_seq]
    )
    return np.bincount(
        red.terminal_seq, weights=weights, minlength=red.tree.n_seq
    )


@dataclass
class NormalizedLoss:
    loss: np.ndarray
    raw_min: float
    raw_max: float
    constant: bool = False


def normalize_loss(tree: TfsdmTree, raw) -> NormalizedLoss:
    """Affine rescaling so pure-strategy evaluations span exactly [0, 1].

    Uses the one-vector tau of the root decision points (tau . y = 1 for
    every pure y), so the rescaled evaluations attain 0 at the minimizer
    and 1 at the maximizer.  A constant raw loss maps to zero with a flag.
    """
    raw = _as_vector(tree, raw)
    m, _, big = linear_min_max(tree, raw)
    if big - m <= 1e-300:
        return NormalizedLoss(np.zeros(tree.n_seq), m, big, constant=True)
    roots = tree.root_decision_points()
    tau = np.zeros(tree.n_seq)
    for d in roots:
        tau[tree.dp_lo[d] : tree.dp_hi[d]] = 1.0 / len(roots)
    loss = raw / (big - m) - (m / (big - m)) * tau
    return NormalizedLoss(loss, m, big, constant=False)


def raise_to_nonnegative(tree: TfsdmTree, loss) -> np.ndarray:
    """Shift a loss vector entrywise nonnegative without changing any
    pure-strategy evaluation difference.

    Adds a constant to one decision point's actions while subtracting it
    from the parent sequence (a flow vector orthogonal to all strategy
    differences), bottom-up; residual negativity at root decision points is
    absorbed by a plain shift, which moves all evaluations equally.
    """
    loss = _as_vector(tree, loss).copy()
    for level in reversed(tree.dp_levels):
        for d in level:
            lo, hi = tree.dp_lo[d], tree.dp_hi[d]
            c = -min(0.0, float(loss[lo:hi].min()))
            if c > 0.0:
                loss[lo:hi] += c
                p = tree.dp_parent_seq[d]
                if p >= 0:
                    loss[p] -= c
    return loss
