import numpy as np

from treebandit.bandit import BanditRegretMinimizer, default_step_size
from treebandit.batch import BatchBanditRunner
from treebandit.sampling import make_rng, substream_seed


def test_batch_matches_sequential_runs(kuhn_env):
    tree = kuhn_env.tree
    horizon = 400
    eta = default_step_size(tree.n_seq, horizon, 5.0)
    seeds = [substream_seed(2024, i) for i in range(4)]

    sequential = np.empty((len(seeds), horizon))
    for r, seed in enumerate(seeds):
        learner = BanditRegretMinimizer(tree, eta, make_rng(seed))
        for t in range(horizon):
            y = learner.next_strategy()
            value = kuhn_env.evaluate(y)
            learner.observe_loss_evaluation(value)
            sequential[r, t] = value

    runner = BatchBanditRunner(tree, kuhn_env.loss, eta, seeds)
    batched = np.empty_like(sequential)
    for t in range(horizon):
        batched[:, t] = runner.step()

    assert np.abs(batched - sequential).max() < 1e-12


def test_checkpoints_accumulate(kuhn_env):
    tree = kuhn_env.tree
    seeds = [substream_seed(5, i) for i in range(3)]
    runner = BatchBanditRunner(tree, kuhn_env.loss, 0.001, seeds)
    trace = np.empty((3, 50))
    for t in range(50):
        trace[:, t] = runner.step()

    runner2 = BatchBanditRunner(tree, kuhn_env.loss, 0.001, seeds)
    out = runner2.run(50, checkpoints=[10, 50])
    assert set(out) == {10, 50}
    assert np.allclose(out[10], trace[:, :10].sum(axis=1))
    assert np.allclose(out[50], trace.sum(axis=1))
