import numpy as np
import pytest

from conftest import make_t1
from treebandit.games import (
    Chance,
    Decision,
    Environment,
    ImperfectRecallError,
    Terminal,
    compute_equilibrium,
    exploitability,
    goofspiel,
    kuhn_poker,
    leduc_poker,
    loss_vector,
    matrix_game,
    normalize_loss,
    tfsdm_for_player,
)
from treebandit.games.efg import ExtensiveFormGame, raise_to_nonnegative
from treebandit.sampling import make_rng
from treebandit.tree import (
    enumerate_pure_strategies,
    linear_min_max,
    random_strategy,
    uniform_strategy,
    validate_strategy,
)


def expected_payoff(game, x1, x2):
    """Independent oracle: recursive expected-value traversal of the game
    tree under behavioral strategies derived from sequence form."""
    red = {1: game.reduction(1), 2: game.reduction(2)}
    xs = {1: np.asarray(x1), 2: np.asarray(x2)}

    def behavioral(player, infoset):
        r = red[player]
        seqs = r.infoset_seqs[infoset]
        parent = r.tree.seq_parent[seqs[0]]
        denom = xs[player][parent] if parent >= 0 else 1.0
        if denom <= 0:
            return np.zeros(len(seqs))
        return xs[player][seqs] / denom

    def walk(node):
        if isinstance(node, Terminal):
            return node.payoff
        if isinstance(node, Chance):
            return sum(p * walk(child) for _, p, child in node.outcomes)
        probs = behavioral(node.player, node.infoset)
        return sum(
            p * walk(child) for p, (_, child) in zip(probs, node.actions)
        )

    return walk(game.root)


def test_matrix_game_payoffs():
    game = matrix_game()
    tree1, _ = tfsdm_for_player(game, 1)
    tree2, _ = tfsdm_for_player(game, 2)
    assert tree1.n_seq == 3
    assert tree2.n_seq == 2
    # row 3 / column 1 payoff pin
    e3 = np.array([0.0, 0.0, 1.0])
    c1 = np.array([1.0, 0.0])
    assert expected_payoff(game, e3, c1) == pytest.approx(0.9)


def test_sequence_count_pins():
    assert tfsdm_for_player(kuhn_poker(), 1)[0].n_seq == 13
    assert tfsdm_for_player(leduc_poker(), 1)[0].n_seq == 337
    assert tfsdm_for_player(goofspiel(), 1)[0].n_seq == 262


def test_reduction_trees_validate():
    for game in (matrix_game(), kuhn_poker()):
        for player in (1, 2):
            tree, leaf_map = tfsdm_for_player(game, player)
            assert validate_strategy(tree, uniform_strategy(tree))
            assert leaf_map.shape == (game.n_terminals,)
            assert np.all(leaf_map >= 0)


def test_imperfect_recall_detected():
    # the same infoset reappears after the player's own action
    inner = Decision(
        player=1, infoset="I", actions=[("a", Terminal(1.0)), ("b", Terminal(0.0))]
    )
    root = Decision(
        player=1, infoset="I", actions=[("a", inner), ("b", Terminal(0.5))]
    )
    game = ExtensiveFormGame("bad", root)
    with pytest.raises(ImperfectRecallError):
        game.reduction(1)


def test_loss_vector_matrix_example():
    game = matrix_game()
    raw = loss_vector(game, 1, np.array([0.5, 0.5]))
    assert np.allclose(raw, [0.0, -0.25, 0.05])
    # all mass on one column: loss is the negated column
    raw = loss_vector(game, 1, np.array([1.0, 0.0]))
    assert np.allclose(raw, [1.0, -1.0, -0.9])


def test_loss_vector_zero_sum_consistency():
    """Player 2's loss is the negation of their payoff, i.e. +player 1's."""
    game = matrix_game()
    uniform_rows = np.full(3, 1.0 / 3.0)
    raw2 = loss_vector(game, 2, uniform_rows)
    col_means = np.array([(-1 + 1 + 0.9) / 3, (1 - 0.5 - 1) / 3])
    assert np.allclose(raw2, col_means)


def test_loss_vector_rejects_invalid_opponent():
    game = matrix_game()
    with pytest.raises(ValueError, match="invalid opponent"):
        loss_vector(game, 1, np.array([0.5, 0.4]))


def test_loss_vector_linearity_against_game_traversal():
    game = kuhn_poker()
    rng = np.random.default_rng(0)
    tree2 = game.reduction(2).tree
    x2 = random_strategy(tree2, rng)
    raw = loss_vector(game, 1, x2)
    ys = enumerate_pure_strategies(game.reduction(1).tree)
    idx = rng.choice(len(ys), size=20, replace=False)
    for i in idx:
        direct = expected_payoff(game, ys[i], x2)
        assert raw @ ys[i] == pytest.approx(-direct, abs=1e-12)


def test_loss_vector_linearity_in_mixtures():
    game = kuhn_poker()
    rng = np.random.default_rng(1)
    x2 = random_strategy(game.reduction(2).tree, rng)
    raw = loss_vector(game, 1, x2)
    ys = enumerate_pure_strategies(game.reduction(1).tree)[:6]
    mix = rng.dirichlet(np.ones(len(ys)))
    combo = sum(p * y for p, y in zip(mix, ys))
    assert raw @ combo == pytest.approx(
        sum(p * (raw @ y) for p, y in zip(mix, ys)), abs=1e-12
    )


def test_normalize_loss_examples():
    t1 = make_t1(2)
    out = normalize_loss(t1, np.array([2.0, -1.0]))
    assert np.allclose(out.loss, [1.0, 0.0])
    assert (out.raw_min, out.raw_max) == (-1.0, 2.0)

    # already spanning [0, 1]: unchanged
    out = normalize_loss(t1, np.array([1.0, 0.0]))
    assert np.allclose(out.loss, [1.0, 0.0])

    const = normalize_loss(t1, np.array([0.7, 0.7]))
    assert const.constant
    assert np.allclose(const.loss, 0.0)


def test_normalized_evaluations_span_unit_interval(small_tree):
    rng = np.random.default_rng(2)
    raw = rng.normal(size=small_tree.n_seq) * 3
    out = normalize_loss(small_tree, raw)
    evals = [out.loss @ y for y in enumerate_pure_strategies(small_tree)]
    assert min(evals) == pytest.approx(0.0, abs=1e-12)
    assert max(evals) == pytest.approx(1.0, abs=1e-12)


def test_normalize_matrix_game_attains_extremes():
    game = matrix_game()
    raw = loss_vector(game, 1, np.array([0.5, 0.5]))
    tree = game.reduction(1).tree
    out = normalize_loss(tree, raw)
    evals = sorted(out.loss @ y for y in enumerate_pure_strategies(tree))
    assert evals[0] == pytest.approx(0.0, abs=1e-15)
    assert evals[-1] == pytest.approx(1.0, abs=1e-15)


def test_raise_to_nonnegative_preserves_differences(small_tree):
    rng = np.random.default_rng(3)
    loss = rng.normal(size=small_tree.n_seq)
    lifted = raise_to_nonnegative(small_tree, loss)
    assert np.all(lifted >= 0)
    ys = enumerate_pure_strategies(small_tree)
    for i in range(1, len(ys)):
        assert lifted @ (ys[0] - ys[i]) == pytest.approx(
            loss @ (ys[0] - ys[i]), abs=1e-12
        )


def test_environment_evaluate(kuhn_env):
    tree = kuhn_env.tree
    ys = enumerate_pure_strategies(tree)
    mn, argmin, mx = linear_min_max(tree, kuhn_env.loss)
    assert kuhn_env.evaluate(argmin) == pytest.approx(0.0, abs=1e-9)
    for y in ys[:40]:
        v = kuhn_env.evaluate(y)
        assert 0.0 <= v <= 1.0
        assert v == pytest.approx(float(kuhn_env.loss @ y), abs=1e-9)


def test_environment_constant_loss_always_zero():
    # an opponent strategy making every pure evaluation equal
    game = ExtensiveFormGame(
        "const",
        Decision(
            player=1,
            infoset="I",
            actions=[("a", Terminal(1.0)), ("b", Terminal(1.0))],
        ),
    )
    # player 2 never acts: give them a trivial game side
    with pytest.raises(ValueError, match="never acts"):
        game.reduction(2)


def test_matrix_environment_best_row_attains_zero():
    game = matrix_game()
    env = Environment(game, 1, np.array([0.5, 0.5]))
    mn, argmin, _ = linear_min_max(env.tree, env.loss)
    assert env.evaluate(argmin) == pytest.approx(0.0, abs=1e-15)


def test_trajectory_structure_matrix():
    game = matrix_game()
    env = Environment(game, 1, np.array([0.3, 0.7]))
    rng = make_rng(0)
    y = np.array([0.0, 1.0, 0.0])
    traj = env.sample_trajectory(y, rng)
    assert len(traj.steps) == 1
    assert traj.steps[0].seq == 1
    assert len(traj.env_probs) == 1  # the opponent's move
    assert np.isfinite(traj.loss)


def test_trajectory_deterministic_opponent():
    game = matrix_game()
    env = Environment(game, 1, np.array([1.0, 0.0]))
    rng = make_rng(1)
    y = np.array([1.0, 0.0, 0.0])
    first = env.sample_trajectory(y, rng)
    for _ in range(10):
        t = env.sample_trajectory(y, rng)
        assert t.loss == first.loss
        assert [s.seq for s in t.steps] == [s.seq for s in first.steps]


def test_trajectory_loss_expectation_exact(kuhn_env):
    """Summing normalized terminal losses against chance, opponent, and own
    reach reproduces the deterministic loss vector exactly."""
    game = kuhn_env.game
    red1 = game.reduction(1)
    red2 = kuhn_env.opp_reduction
    lhat = np.array(
        [kuhn_env._normalized_terminal_loss(p) for p in game.terminal_payoffs]
    )
    for y in enumerate_pure_strategies(kuhn_env.tree)[:10]:
        mass = (
            game.terminal_chance_reach
            * kuhn_env.opponent[red2.terminal_seq]
            * y[red1.terminal_seq]
        )
        assert (mass * lhat).sum() == pytest.approx(
            float(kuhn_env.loss @ y), abs=1e-12
        )


def test_trajectory_expectation_matches_loss(kuhn_env):
    rng = make_rng(2)
    y = enumerate_pure_strategies(kuhn_env.tree)[7]
    n = 20_000
    vals = np.array([kuhn_env.sample_trajectory(y, rng).loss for _ in range(n)])
    expect = float(kuhn_env.loss @ y)
    tolerance = 4 * vals.std(ddof=1) / np.sqrt(n)
    assert abs(vals.mean() - expect) < tolerance


def test_compute_equilibrium_matrix():
    result = compute_equilibrium(matrix_game(), 50_000)
    assert result.exploitability < 0.01
    assert result.exploitability >= 0.0


def test_exploitability_nonnegative_everywhere():
    game = matrix_game()
    rng = np.random.default_rng(4)
    for _ in range(10):
        x1 = random_strategy(game.reduction(1).tree, rng)
        x2 = random_strategy(game.reduction(2).tree, rng)
        assert exploitability(game, x1, x2) >= -1e-12


def test_goofspiel_parametric():
    g2 = goofspiel(2)
    tree, _ = tfsdm_for_player(g2, 1)
    assert validate_strategy(tree, uniform_strategy(tree))
    with pytest.raises(ValueError):
        goofspiel(1)
