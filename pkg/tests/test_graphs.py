import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from localmix import Graph, is_local, make_graph, neighborhood
from localmix.errors import CapacityExceededError, InvalidInputError
from localmix.graphs import MAX_ENUM_NODES, as_mask, parse_graph_arg, subset_masks


def test_dumbbell_shape():
    G = make_graph("dumbbell", 6)
    assert G.n == 12
    assert len(G.edges()) == 2 * 15 + 1
    assert G.diameter() == 3
    assert (5, 6) in G.edges()


def test_dumbbell_clique_neighbourhood_crosses_bridge_once():
    G = make_graph("dumbbell", 6)
    left = range(6)
    assert neighborhood(G, left) - set(left) == {6}


@pytest.mark.parametrize("family,size,n,m", [
    ("cycle", 5, 5, 5), ("path", 4, 4, 3), ("complete", 4, 4, 6), ("complete", 2, 2, 1), ("path", 1, 1, 0),
])
def test_family_sizes(family, size, n, m):
    G = make_graph(family, size)
    assert G.n == n and len(G.edges()) == m
    assert G.adjacency.diagonal().all()


def test_single_node_graph_only_has_self_loop():
    G = make_graph("path", 1)
    assert G.adjacency.tolist() == [[True]]
    assert G.diameter() == 0


def test_invalid_constructions():
    with pytest.raises(InvalidInputError):
        make_graph("star", 3)
    with pytest.raises(InvalidInputError):
        make_graph("cycle", 0)
    with pytest.raises(InvalidInputError):
        make_graph("dumbbell", 1)
    with pytest.raises(InvalidInputError):
        Graph.from_edges(3, [(0, 3)])
    with pytest.raises(InvalidInputError):
        parse_graph_arg("cycle")
    with pytest.raises(InvalidInputError):
        parse_graph_arg("cycle:x")


def test_adjacency_must_be_symmetric_with_loops():
    with pytest.raises(InvalidInputError):
        Graph(2, np.array([[True, True], [False, True]]))
    with pytest.raises(InvalidInputError):
        Graph(2, np.array([[False, True], [True, True]]))


def test_graph_is_read_only():
    G = make_graph("cycle", 4)
    with pytest.raises(ValueError):
        G.adjacency[0, 2] = True


def test_dict_round_trip_and_family_form():
    G = make_graph("dumbbell", 3)
    assert Graph.from_dict(G.to_dict()) == G
    assert Graph.from_dict({"family": "dumbbell", "size": 3}) == G
    assert parse_graph_arg("dumbbell:3") == G


def test_disconnected_diameter():
    assert Graph.from_edges(3, [(0, 1)]).diameter() == -1


def test_masks_and_capacity():
    masks = subset_masks(3)
    assert masks.shape == (8, 3)
    assert sorted(map(tuple, masks.astype(int).tolist())) == sorted(
        tuple(int(b) for b in f"{k:03b}"[::-1]) for k in range(8))
    with pytest.raises(CapacityExceededError):
        subset_masks(MAX_ENUM_NODES + 1)
    with pytest.raises(InvalidInputError):
        as_mask([5], 3)


def test_is_local():
    G = make_graph("path", 3)
    ok = np.array([[0.5, 0.5, 0], [0.5, 0, 0.5], [0, 0.5, 0.5]])
    assert is_local(G, ok)
    bad = ok.copy()
    bad[2, 0], bad[0, 0] = 0.25, 0.25
    assert not is_local(G, bad)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["cycle", "path", "complete", "dumbbell"]), st.integers(2, 7),
       st.lists(st.integers(0, 13), min_size=1, max_size=5))
def test_neighbourhood_is_union_of_rows(family, size, W):
    G = make_graph(family, size)
    W = {w % G.n for w in W}
    touched = set(np.flatnonzero(G.adjacency[sorted(W)].any(axis=0)).tolist())
    assert set(neighborhood(G, W)) == touched - W
