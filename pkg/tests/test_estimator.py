import numpy as np
import pytest

from conftest import clip01, make_t1, make_t2
from treebandit import dgf, oracle
from treebandit.estimator import loss_estimate
from treebandit.sampling import make_rng, sample_pure
from treebandit.tree import (
    enumerate_pure_strategies,
    pure_strategy_probability,
    random_strategy,
)
from treebandit.games import normalize_loss


def test_single_decision_point_importance_weighting():
    t1 = make_t1(2)
    x = np.array([0.5, 0.5])
    y = np.array([1.0, 0.0])
    assert np.allclose(loss_estimate(t1, x, y, 0.6), [1.2, 0.0], atol=1e-14)


def test_zero_loss_gives_zero_estimate_on_single_decision_point():
    for n in (2, 3):
        tree = make_t1(n)
        x = random_strategy(tree, np.random.default_rng(0), floor=0.05)
        for y in enumerate_pure_strategies(tree):
            assert np.abs(loss_estimate(tree, x, y, 0.0)).max() == 0.0


def test_zero_loss_reduces_to_orthogonal_vector(small_tree):
    """With zero feedback the estimate is exactly the correction term, whose
    expectation vanishes on strategy differences."""
    x = random_strategy(small_tree, np.random.default_rng(0), floor=0.05)
    for y in enumerate_pure_strategies(small_tree):
        est = loss_estimate(small_tree, x, y, 0.0)
        ref = oracle.orthogonal_vector(small_tree, x, y)
        assert np.abs(est - ref).max() < 1e-10


def test_matches_dense_oracle(small_tree):
    rng = np.random.default_rng(1)
    ys = enumerate_pure_strategies(small_tree)
    for _ in range(10):
        x = random_strategy(small_tree, rng, floor=0.05)
        inv = oracle.generalized_inverse(small_tree, x)
        for y in ys:
            l = float(rng.random())
            fast = loss_estimate(small_tree, x, y, l)
            ref = l * (inv @ y) + oracle.orthogonal_vector(small_tree, x, y)
            assert np.abs(fast - ref).max() < 1e-10


def test_input_validation(t2):
    x = random_strategy(t2, np.random.default_rng(2), floor=0.05)
    y = enumerate_pure_strategies(t2)[0]
    with pytest.raises(ValueError, match="outside"):
        loss_estimate(t2, x, y, 1.5)
    with pytest.raises(ValueError, match="outside"):
        loss_estimate(t2, x, y, -0.1)
    bad = x.copy()
    bad[3] = 0.0
    with pytest.raises(ValueError, match="positive"):
        loss_estimate(t2, bad, y, 0.5)


def test_nonnegativity(small_tree):
    rng = np.random.default_rng(3)
    srng = make_rng(17)
    worst = 0.0
    for _ in range(10_000):
        x = random_strategy(small_tree, rng, floor=0.01)
        y = sample_pure(small_tree, x, srng)
        l = float(rng.random())
        worst = min(worst, float(loss_estimate(small_tree, x, y, l).min()))
    assert worst >= -1e-12


def test_relaxed_unbiasedness_exact(small_tree):
    """Exact expectation over the sampler matches the true loss on every
    difference of pure strategies."""
    tree = small_tree
    rng = np.random.default_rng(4)
    ys = enumerate_pure_strategies(tree)
    for trial in range(3):
        raw = rng.normal(size=tree.n_seq)
        ell = normalize_loss(tree, raw).loss
        x = random_strategy(tree, rng, floor=0.1)
        probs = [pure_strategy_probability(tree, x, y) for y in ys]
        expected = sum(
            p * loss_estimate(tree, x, y, clip01(ell @ y))
            for p, y in zip(probs, ys)
        )
        diff = expected - ell
        for i in range(len(ys)):
            for j in range(i + 1, len(ys)):
                assert abs(diff @ (ys[i] - ys[j])) < 1e-9


def test_expected_dual_norm_bound_exact(small_tree):
    tree = small_tree
    w = dgf.compute_weights(tree)
    rng = np.random.default_rng(5)
    ys = enumerate_pure_strategies(tree)
    bound = 4.0 * tree.n_seq**3
    for _ in range(3):
        ell = normalize_loss(tree, rng.normal(size=tree.n_seq)).loss
        x = random_strategy(tree, rng, floor=0.02)
        expectation = sum(
            pure_strategy_probability(tree, x, y)
            * dgf.local_dual_norm_sq(
                tree, w, x, loss_estimate(tree, x, y, clip01(ell @ y))
            )
            for y in ys
        )
        assert expectation <= bound


def test_expected_dual_norm_monte_carlo_kuhn(kuhn_env):
    tree = kuhn_env.tree
    w = dgf.compute_weights(tree)
    x = random_strategy(tree, np.random.default_rng(6), floor=0.05)
    rng = make_rng(23)
    n = 20_000
    values = np.empty(n)
    for i in range(n):
        y = sample_pure(tree, x, rng)
        values[i] = dgf.local_dual_norm_sq(
            tree, w, x, loss_estimate(tree, x, y, kuhn_env.evaluate(y))
        )
    bound = 4.0 * tree.n_seq**3
    stderr = values.std(ddof=1) / np.sqrt(n)
    assert values.mean() <= bound + 3 * stderr
