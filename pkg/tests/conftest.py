import networkx as nx
import numpy as np
import pytest

from pstnet.graphs import Graph


def random_connected_graph(n, seed, p=0.4):
    """Erdos-Renyi graph on 1..n with a random spanning tree added so it is connected."""
    rng = np.random.default_rng(seed)
    g = nx.gnp_random_graph(n, p, seed=int(rng.integers(2**31)))
    order = rng.permutation(n)
    for k in range(1, n):
        g.add_edge(int(order[k]), int(order[rng.integers(k)]))
    edges = [(u + 1, v + 1) for u, v in g.edges()]
    return Graph.from_edges(n, edges)


def to_networkx(g):
    h = nx.Graph()
    h.add_nodes_from(range(1, g.n + 1))
    h.add_edges_from(g.edges)
    return h


def path_end_amplitude(n, t):
    """End-to-end amplitude of the uniform chain from its sine eigenbasis."""
    k = np.arange(1, n + 1)
    E = 2 * np.cos(np.pi * k / (n + 1))
    w = 2 / (n + 1) * np.sin(np.pi * k / (n + 1)) * np.sin(np.pi * k * n / (n + 1))
    return (np.exp(-1j * np.multiply.outer(np.asarray(t, dtype=float), E)) * w).sum(axis=-1)


def brute_force_xx(n, bonds):
    """Many-body XX matrix built by acting with flip-flops on bit strings.

    Basis index bit (n - site) set means spin ``site`` is down.
    """
    dim = 2**n
    H = np.zeros((dim, dim))
    for state in range(dim):
        for u, v, j in bonds:
            bu, bv = (state >> (n - u)) & 1, (state >> (n - v)) & 1
            if bu != bv:
                flipped = state ^ (1 << (n - u)) ^ (1 << (n - v))
                H[flipped, state] += j
    return H


@pytest.fixture
def rng():
    return np.random.default_rng(20040505)
