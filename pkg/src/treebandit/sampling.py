"""Unbiased sampling of pure strategies, with reproducible RNG streams.

Randomness comes from numpy's Philox generator, a counter-based generator
with stable cross-platform output.  Per-run substreams are derived from a
64-bit base seed and a stream index through the splitmix64 finalizer, so
experiment runs are reproducible and independent.
"""

from __future__ import annotations

import numpy as np

from .tree import TfsdmTree, _as_vector, padded

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(state: int) -> int:
    """One splitmix64 output for the given state (both 64-bit)."""
    z = (state + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def substream_seed(base_seed: int, stream: int) -> int:
    """Seed for substream ``stream`` of ``base_seed`` (splitmix64 mixing)."""
    return splitmix64((base_seed + (stream + 1) * _GOLDEN) & _MASK64)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed & _MASK64))


def sample_pure(tree: TfsdmTree, x, rng: np.random.Generator) -> np.ndarray:
    """Draw a pure strategy whose conditional mean is exactly ``x``.

    At every decision point one action is drawn from the local distribution
    x_ja / x_parent by inverse CDF (the final bucket absorbs rounding); the
    result marks the chosen action of every decision point reachable under
    the draws, and is 0 elsewhere.
    """
    x = _as_vector(tree, x)
    xp = padded(x)[tree.seq_parent]
    bad_parent = xp <= 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        b = np.where(bad_parent, 0.0, x / np.where(bad_parent, 1.0, xp))

    idx = tree.dp_action_index
    bm = np.append(b, 0.0)[idx]
    cdf = np.cumsum(bm, axis=1)
    u = rng.random(tree.n_dp)
    hit = cdf > u[:, None]
    # first bucket exceeding u; fall back to the last real action
    chosen_col = np.where(
        hit.any(axis=1), hit.argmax(axis=1), tree.dp_n_actions - 1
    )
    chosen_col = np.minimum(chosen_col, tree.dp_n_actions - 1)
    chosen_seq = tree.dp_lo + chosen_col

    y = np.zeros(tree.n_seq, dtype=np.float64)
    for level in tree.dp_levels:
        seqs = chosen_seq[level]
        reach = padded(y)[tree.dp_parent_seq[level]]
        y[seqs] = reach

    # an (effectively) empty local distribution only matters when its
    # decision point was actually reached; it signals an infeasible x
    no_mass = bad_parent[tree.dp_lo] | (cdf[np.arange(tree.n_dp), -1] <= 1e-12)
    if np.any(no_mass):
        reached = padded(y)[tree.dp_parent_seq[no_mass]] > 0.0
        if np.any(reached):
            raise ValueError("zero parent mass at a reached decision point")
    return y
