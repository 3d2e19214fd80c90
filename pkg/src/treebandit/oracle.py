"""Dense reference constructions for the loss-estimate machinery.

These build, by explicit recursion over the tree, the autocorrelation
matrix of the pure-strategy sampler, a structured generalized inverse of
it, and the orthogonal correction vector; combining them yields a reference
loss estimate ``l * Cinv @ y + b`` that the linear-time estimator must
reproduce.  Everything here is test-oracle code for small trees: matrix
operations are capped at 64 sequences and never run on the hot path.
"""

from __future__ import annotations

import numpy as np

from .tree import DECISION, OBSERVATION, TfsdmTree, _as_vector

MATRIX_SIZE_CAP = 64


def _check_cap(tree: TfsdmTree) -> None:
    if tree.n_seq > MATRIX_SIZE_CAP:
        raise ValueError(
            f"dense oracle capped at {MATRIX_SIZE_CAP} sequences, "
            f"tree has {tree.n_seq}"
        )


def _block(tree: TfsdmTree, nid: int) -> tuple[int, int]:
    return int(tree.node_seq_lo[nid]), int(tree.node_seq_hi[nid])


def autocorrelation(tree: TfsdmTree, x) -> np.ndarray:
    """E[y y^T] under the natural sampling scheme, assembled blockwise."""
    _check_cap(tree)
    x = _as_vector(tree, x)

    def build(nid: int, scale: float) -> np.ndarray:
        lo, hi = _block(tree, nid)
        size = hi - lo
        out = np.zeros((size, size))
        if tree.node_kind[nid] == DECISION:
            for offset, cid in enumerate(tree.node_children[nid]):
                seq = tree.node_seq_lo[nid] + offset
                rel = seq - lo
                lam = x[seq] / scale
                out[rel, rel] = lam
                if cid >= 0:
                    clo, chi = _block(tree, cid)
                    crel = slice(clo - lo, chi - lo)
                    out[rel, crel] = x[clo:chi] / scale
                    out[crel, rel] = x[clo:chi] / scale
                    out[crel, crel] = lam * build(cid, x[seq])
        else:
            children = tree.node_children[nid]
            for cid in children:
                clo, chi = _block(tree, cid)
                rel = slice(clo - lo, chi - lo)
                out[rel, rel] = build(cid, scale)
            for i, ci in enumerate(children):
                for cj in children[i + 1 :]:
                    ilo, ihi = _block(tree, ci)
                    jlo, jhi = _block(tree, cj)
                    cross = np.outer(x[ilo:ihi], x[jlo:jhi]) / (scale * scale)
                    out[ilo - lo : ihi - lo, jlo - lo : jhi - lo] = cross
                    out[jlo - lo : jhi - lo, ilo - lo : ihi - lo] = cross.T
        return out

    return build(tree.root, 1.0)


def _inverse(tree: TfsdmTree, x: np.ndarray, nid: int, scale: float) -> np.ndarray:
    lo, hi = _block(tree, nid)
    size = hi - lo
    out = np.zeros((size, size))
    if tree.node_kind[nid] == DECISION:
        for offset, cid in enumerate(tree.node_children[nid]):
            seq = tree.node_seq_lo[nid] + offset
            rel = seq - lo
            lam = x[seq] / scale
            if cid < 0:
                out[rel, rel] = 1.0 / lam
            else:
                clo, chi = _block(tree, cid)
                crel = slice(clo - lo, chi - lo)
                out[crel, crel] = _inverse(tree, x, cid, x[seq]) / lam
    else:
        children = tree.node_children[nid]
        n = len(children)
        mu = np.zeros(size)
        for cid in children:
            clo, chi = _block(tree, cid)
            rel = slice(clo - lo, chi - lo)
            inv = _inverse(tree, x, cid, scale)
            out[rel, rel] = inv
            mu[rel] = inv @ (x[clo:chi] / scale)
        out -= (n - 1) / (n * n) * np.outer(mu, mu)
    return out


def generalized_inverse(tree: TfsdmTree, x) -> np.ndarray:
    """A structured generalized inverse of the autocorrelation matrix."""
    _check_cap(tree)
    x = _as_vector(tree, x)
    if np.any(x <= 0):
        raise ValueError("generalized inverse requires an interior strategy")
    return _inverse(tree, x, tree.root, 1.0)


def _mu(tree: TfsdmTree, x: np.ndarray, nid: int, scale: float) -> np.ndarray:
    lo, hi = _block(tree, nid)
    mu = np.zeros(hi - lo)
    for cid in tree.node_children[nid]:
        clo, chi = _block(tree, cid)
        inv = _inverse(tree, x, cid, scale)
        mu[clo - lo : chi - lo] = inv @ (x[clo:chi] / scale)
    return mu


def observation_mu(tree: TfsdmTree, x) -> np.ndarray:
    """The stacked child-inverse image of x at an observation-point root."""
    _check_cap(tree)
    x = _as_vector(tree, x)
    if tree.node_kind[tree.root] != OBSERVATION:
        raise ValueError("tree is not rooted at an observation point")
    return _mu(tree, x, tree.root, 1.0)


def orthogonal_vector(tree: TfsdmTree, x, y) -> np.ndarray:
    """The correction vector paired with the generalized inverse.

    Its expectation over the sampler is orthogonal to every difference of
    pure strategies; dotted with any strategy it gives N_root - 1 in
    expectation.
    """
    x = _as_vector(tree, x)
    y = _as_vector(tree, y)

    def build(nid: int, scale: float) -> np.ndarray:
        lo, hi = _block(tree, nid)
        out = np.zeros(hi - lo)
        if tree.node_kind[nid] == DECISION:
            base = tree.node_seq_lo[nid]
            chosen = [
                off
                for off in range(len(tree.node_children[nid]))
                if y[base + off] > 0.5
            ]
            if len(chosen) != 1:
                raise ValueError("pure strategy does not choose exactly one action")
            offset = chosen[0]
            seq = base + offset
            cid = tree.node_children[nid][offset]
            lam = x[seq] / scale
            n_here = tree.node_num_decisions[nid]
            if cid < 0:
                out[seq - lo] = (n_here - 1) / lam
            else:
                clo, chi = _block(tree, cid)
                out[seq - lo] = (n_here - tree.node_num_decisions[cid]) / lam
                out[clo - lo : chi - lo] = build(cid, x[seq]) / lam
        else:
            children = tree.node_children[nid]
            n = len(children)
            for cid in children:
                clo, chi = _block(tree, cid)
                out[clo - lo : chi - lo] = build(cid, scale)
            out += (n - 1) / n * _mu(tree, x, nid, scale)
        return out

    return build(tree.root, 1.0)


def oracle_loss_estimate(tree: TfsdmTree, x, y, l: float) -> np.ndarray:
    """Reference loss estimate: l * Cinv @ y + orthogonal vector."""
    _check_cap(tree)
    x = _as_vector(tree, x)
    y = _as_vector(tree, y)
    inv = generalized_inverse(tree, x)
    return l * (inv @ y) + orthogonal_vector(tree, x, y)
