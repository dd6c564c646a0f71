import networkx as nx

from glim.models.graph import build_graph

RANDOM_SEED = 0

# K4 minus the edge 1-2, plus a disjoint edge 4-5
SMALL_EDGES = [(0, 1), (0, 2), (0, 3), (1, 3), (2, 3), (4, 5)]


def small_graph():
    return build_graph(6, SMALL_EDGES)


def theta_graph():
    """Two vertices joined by three parallel edges."""
    return build_graph(2, [(0, 1), (0, 1), (0, 1)])


def bouquet(loops=2):
    return build_graph(1, [(0, 0)] * loops)


def path_graph(n):
    return build_graph(n, [(i, i + 1) for i in range(n - 1)])


def complete_graph(n):
    return build_graph(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def petersen_graph():
    g = nx.petersen_graph()
    return build_graph(g.number_of_nodes(), list(g.edges()))


def random_multigraph(rng, n, extra_edges):
    """Connected multigraph.

    A random spanning tree plus extra edges that may be loops or parallel.
    """
    edges = [(int(rng.integers(0, v)), v) for v in range(1, n)]
    for _ in range(extra_edges):
        u, v = rng.integers(0, n, size=2)
        edges.append((int(u), int(v)))
    return build_graph(n, edges)
