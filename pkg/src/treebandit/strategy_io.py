"""Plain-text sequence-form strategy files.

Format: comment/header lines starting with ``#`` carrying ``key=value``
pairs (``tree_hash`` is mandatory and checked on load), then one line per
sequence ``<decision_point_id> <action_id> <value>``.  Values are written
with ``repr`` so files round-trip bit-exactly.  Identifiers are quoted via
``json`` so arbitrary labels survive.
"""

from __future__ import annotations

import json

import numpy as np

from .tree import TfsdmTree, _as_vector


class StrategyFileError(ValueError):
    pass


def save_strategy(path, tree: TfsdmTree, x, meta: dict | None = None) -> None:
    x = _as_vector(tree, x)
    lines = [f"# tree_hash={tree.tree_hash}"]
    for key, value in (meta or {}).items():
        if "=" in str(key):
            raise StrategyFileError(f"metadata key {key!r} contains '='")
        lines.append(f"# {key}={value}")
    for i in range(tree.n_seq):
        node_label, action_label = tree.sequence_id(i)
        lines.append(
            f"{json.dumps(node_label)} {json.dumps(action_label)} {float(x[i])!r}"
        )
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_header(path) -> dict:
    meta = {}
    with open(path) as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            body = line[1:].strip()
            if "=" in body:
                key, _, value = body.partition("=")
                meta[key.strip()] = value.strip()
    return meta


def load_strategy(path, tree: TfsdmTree) -> np.ndarray:
    values: dict[tuple[str, str], float] = {}
    found_hash = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("tree_hash="):
                    found_hash = body.split("=", 1)[1]
                continue
            try:
                decoder = json.JSONDecoder()
                node_label, end = decoder.raw_decode(line)
                action_label, end2 = decoder.raw_decode(line[end:].lstrip())
                rest = line[end:].lstrip()
                rest = rest[end2:].strip()
                value = float(rest)
            except (ValueError, json.JSONDecodeError) as exc:
                raise StrategyFileError(f"{path}:{lineno}: bad line") from exc
            values[(node_label, action_label)] = value
    if found_hash is None:
        raise StrategyFileError(f"{path}: missing tree_hash header")
    if found_hash != tree.tree_hash:
        raise StrategyFileError(
            f"{path}: strategy was written for a different tree "
            f"({found_hash[:12]}... != {tree.tree_hash[:12]}...)"
        )
    x = np.empty(tree.n_seq)
    for i in range(tree.n_seq):
        key = tree.sequence_id(i)
        if key not in values:
            raise StrategyFileError(f"{path}: missing sequence {key}")
        x[i] = values[key]
    if len(values) != tree.n_seq:
        raise StrategyFileError(f"{path}: extra sequences in file")
    return x
