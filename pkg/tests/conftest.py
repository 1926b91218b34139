import itertools

import networkx as nx
import pytest

from fractalsep import CARPET, MENGER, build_complete_lines_subgraph, build_level_graph

# the parameter sets used throughout for closed-form checks, with their N
FAMILIES = [
    ((2, 3, (1,), 1), 2),
    ((3, 3, (1,), 1), 4),
    ((3, 3, (1,), 2), 8),
    ((2, 5, (1, 3), 1), 3),
    ((2, 5, (0, 3, 4), 1), 2),
    ((2, 8, (1, 3, 6), 1), 5),
]


def brute_vertices(params, k):
    """Vertex set by direct digit inspection, independent of the numpy grid code."""
    b, A, m = params.b, set(params.A), params.m
    out = []
    for p in itertools.product(range(b**k), repeat=params.d):
        ok = True
        for j in range(k):
            if sum(1 for x in p if (x // b**j) % b in A) > m:
                ok = False
                break
        if ok:
            out.append(p)
    return out


def nx_graph(g):
    G = nx.Graph()
    G.add_nodes_from(range(g.n))
    G.add_edges_from(map(tuple, g.edges.tolist()))
    return G


@pytest.fixture(scope="session")
def carpet_levels():
    return {k: build_level_graph(CARPET, k) for k in range(4)}


@pytest.fixture(scope="session")
def carpet_complete():
    return {k: build_complete_lines_subgraph(CARPET, k) for k in range(5)}


@pytest.fixture(scope="session")
def menger_levels():
    return {k: build_level_graph(MENGER, k) for k in range(3)}
