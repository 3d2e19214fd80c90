"""Bandit linear optimization for tree-form sequential decision making.

The learner repeatedly commits to a pure strategy of an alternating
decision/observation tree and observes only the scalar loss of that
strategy.  The package provides the full-information mirror-descent core
(dilated entropy regularizer with linear-time gradient and conjugate),
the unbiased strategy sampler, the linear-time unbiased loss estimator,
their composition into a bandit regret minimizer, dense verification
oracles, benchmark games, an outcome-sampling baseline, and an experiment
harness.
"""

from .bandit import BanditRegretMinimizer, ProtocolError, default_step_size
from .dgf import DgfWeights, compute_weights
from .estimator import loss_estimate
from .omd import OnlineMirrorDescent
from .sampling import make_rng, sample_pure, splitmix64, substream_seed
from .tree import (
    TfsdmTree,
    TreeStructureError,
    build_tree,
    count_pure_strategies,
    enumerate_pure_strategies,
    linear_min_max,
    load_tree,
    pure_strategy_probability,
    random_strategy,
    uniform_strategy,
    validate_strategy,
)

__version__ = "0.1.0"

__all__ = [
    "BanditRegretMinimizer",
    "DgfWeights",
    "OnlineMirrorDescent",
    "ProtocolError",
    "TfsdmTree",
    "TreeStructureError",
    "build_tree",
    "compute_weights",
    "count_pure_strategies",
    "default_step_size",
    "enumerate_pure_strategies",
    "linear_min_max",
    "load_tree",
    "loss_estimate",
    "make_rng",
    "pure_strategy_probability",
    "random_strategy",
    "sample_pure",
    "splitmix64",
    "substream_seed",
    "uniform_strategy",
    "validate_strategy",
]
