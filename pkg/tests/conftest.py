import numpy as np
import pytest

from treebandit.tree import TfsdmTree, build_tree


def make_t1(n_actions: int = 2) -> TfsdmTree:
    """Single decision point with terminal actions."""
    labels = [chr(ord("a") + i) for i in range(n_actions)]
    return build_tree(
        {
            "root": "j0",
            "nodes": [
                {"id": "j0", "kind": "decision", "edges": [[a, None] for a in labels]}
            ],
        }
    )


def make_t2() -> TfsdmTree:
    """Terminal action plus an observation point over two decision points."""
    return build_tree(
        {
            "root": "j0",
            "nodes": [
                {"id": "j0", "kind": "decision", "edges": [["a", None], ["b", "k"]]},
                {"id": "k", "kind": "observation", "edges": [["s1", "j1"], ["s2", "j2"]]},
                {"id": "j1", "kind": "decision", "edges": [["a1", None], ["a2", None]]},
                {"id": "j2", "kind": "decision", "edges": [["a1", None], ["a2", None]]},
            ],
        }
    )


def make_chain() -> TfsdmTree:
    """Depth-3 chain: second decision point reached through one action."""
    return build_tree(
        {
            "root": "j0",
            "nodes": [
                {"id": "j0", "kind": "decision", "edges": [["a", None], ["b", "k"]]},
                {"id": "k", "kind": "observation", "edges": [["s", "j1"]]},
                {"id": "j1", "kind": "decision", "edges": [["c", None], ["d", None]]},
            ],
        }
    )


def make_asym3() -> TfsdmTree:
    """Asymmetric depth-5 tree mixing terminal and branching actions."""
    return build_tree(
        {
            "root": "j0",
            "nodes": [
                {"id": "j0", "kind": "decision", "edges": [["a", "k1"], ["b", None]]},
                {"id": "k1", "kind": "observation", "edges": [["s1", "j1"], ["s2", "j2"]]},
                {"id": "j1", "kind": "decision", "edges": [["c", None], ["d", "k2"]]},
                {"id": "k2", "kind": "observation", "edges": [["u", "j3"]]},
                {"id": "j3", "kind": "decision", "edges": [["e", None], ["f", None]]},
                {"id": "j2", "kind": "decision", "edges": [["g", None], ["h", None], ["i", None]]},
            ],
        }
    )


def make_obs_root() -> TfsdmTree:
    """Rooted at an observation point (two root decision points)."""
    return build_tree(
        {
            "root": "k",
            "nodes": [
                {"id": "k", "kind": "observation", "edges": [["s1", "jA"], ["s2", "jB"]]},
                {"id": "jA", "kind": "decision", "edges": [["a", None], ["b", None]]},
                {"id": "jB", "kind": "decision", "edges": [["c", None], ["d", None], ["e", None]]},
            ],
        }
    )


def make_obs_root_singletons() -> TfsdmTree:
    """Observation point over two single-action decision points."""
    return build_tree(
        {
            "root": "k",
            "nodes": [
                {"id": "k", "kind": "observation", "edges": [["s1", "jA"], ["s2", "jB"]]},
                {"id": "jA", "kind": "decision", "edges": [["a", None]]},
                {"id": "jB", "kind": "decision", "edges": [["b", None]]},
            ],
        }
    )


def make_random_tree(seed: int, target_sequences: int = 56) -> TfsdmTree:
    """Random alternating tree with roughly ``target_sequences`` sequences."""
    rng = np.random.default_rng(seed)
    nodes = []
    counter = [0]
    budget = [target_sequences]

    def decision(depth):
        nid = f"d{counter[0]}"
        counter[0] += 1
        n_actions = int(rng.integers(2, 4))
        budget[0] -= n_actions
        edges = []
        for i in range(n_actions):
            if depth < 6 and budget[0] > 0 and rng.random() < 0.6:
                edges.append([f"a{i}", observation(depth + 1)])
            else:
                edges.append([f"a{i}", None])
        nodes.append({"id": nid, "kind": "decision", "edges": edges})
        return nid

    def observation(depth):
        nid = f"o{counter[0]}"
        counter[0] += 1
        n_signals = int(rng.integers(1, 3))
        edges = [[f"s{i}", decision(depth + 1)] for i in range(n_signals)]
        nodes.append({"id": nid, "kind": "observation", "edges": edges})
        return nid

    root = decision(1)
    return build_tree({"root": root, "nodes": nodes})


SMALL_TREE_FACTORIES = {
    "t1": lambda: make_t1(2),
    "t1_3": lambda: make_t1(3),
    "t2": make_t2,
    "chain": make_chain,
    "asym3": make_asym3,
    "obs_root": make_obs_root,
}


@pytest.fixture
def t1():
    return make_t1(2)


@pytest.fixture
def t2():
    return make_t2()


@pytest.fixture
def chain():
    return make_chain()


@pytest.fixture
def asym3():
    return make_asym3()


@pytest.fixture
def obs_root():
    return make_obs_root()


@pytest.fixture(params=sorted(SMALL_TREE_FACTORIES))
def small_tree(request):
    return SMALL_TREE_FACTORIES[request.param]()


@pytest.fixture(scope="session")
def kuhn_game():
    from treebandit.games import kuhn_poker

    return kuhn_poker()


@pytest.fixture(scope="session")
def kuhn_opponent(kuhn_game):
    """A reasonably strong fixed opponent for player 1's experiments."""
    from treebandit.games import compute_equilibrium

    return compute_equilibrium(kuhn_game, 20_000).strategies[2]


@pytest.fixture(scope="session")
def kuhn_env(kuhn_game, kuhn_opponent):
    from treebandit.games import Environment

    return Environment(kuhn_game, 1, kuhn_opponent)


def clip01(value: float) -> float:
    return min(1.0, max(0.0, float(value)))
