"""Reference computations that avoid the package's own algorithms.

Each one takes the slow, obvious route (itertools enumeration, networkx,
scipy) so tests can compare two independent answers.
"""

from itertools import combinations

import networkx as nx
import numpy as np
from scipy.optimize import linprog

from localmix.graphs import Graph
from localmix.prob import apply, condition, mass


def all_subsets(n):
    for k in range(1, n + 1):
        yield from combinations(range(n), k)


def closed_neighbourhood(G: Graph, W) -> set[int]:
    out = set(W)
    for i in W:
        out.update(G.neighbors(i))
    return out


def step_flow_value(Y, Z, G: Graph) -> float:
    """Min cut of the step network written as a formula over node subsets.

    Cutting a unit middle arc never beats cutting all source arcs, so the
    minimum is ``min(1, min_W 1 - Z(W) + Y(W and its neighbours))``.
    """
    best = 1.0
    for W in all_subsets(G.n):
        best = min(best, 1.0 - float(np.sum(np.asarray(Z)[list(W)])) +
                   float(np.sum(np.asarray(Y)[list(closed_neighbourhood(G, W))])))
    return best


def locality_by_subsets(Y, Z, G: Graph, slack: float = 1e-9) -> bool:
    Y, Z = np.asarray(Y), np.asarray(Z)
    for W in all_subsets(G.n):
        if Z[list(W)].sum() > Y[sorted(closed_neighbourhood(G, W))].sum() + slack:
            return False
    return True


def networkx_max_flow(capacity: np.ndarray, s: int, t: int) -> float:
    D = nx.DiGraph()
    D.add_nodes_from(range(capacity.shape[0]))
    for i, j in zip(*np.nonzero(capacity > 0)):
        D.add_edge(int(i), int(j), capacity=float(capacity[i, j]))
    return float(nx.maximum_flow_value(D, s, t))


def conductance_by_subsets(P, pi, n: int) -> tuple[float, tuple[int, ...]]:
    """Smallest exit probability of the chain started from pi restricted to W."""
    best, arg = np.inf, ()
    for W in all_subsets(n):
        if mass(pi, W) > 0.5 + 1e-12:
            continue
        after = apply(P, condition(pi, W))
        out = 1.0 - mass(after, W)
        if out < best:
            best, arg = out, W
    return float(best), arg


def scipy_phi_max(G: Graph, pi) -> float:
    """Same LP as the package, assembled independently and solved by HiGHS."""
    n = G.n
    pi = np.asarray(pi, dtype=float)
    arcs = [(i, j) for i in range(n) for j in range(n) if G.adjacency[j, i]]
    nv = 1 + len(arcs)
    c = np.zeros(nv)
    c[0] = -1.0
    A_eq, b_eq = [], []
    for i in range(n):  # columns sum to one
        row = np.zeros(nv)
        for k, (a, _) in enumerate(arcs):
            if a == i:
                row[1 + k] = 1.0
        A_eq.append(row)
        b_eq.append(1.0)
    for j in range(n):  # P pi = pi
        row = np.zeros(nv)
        for k, (a, b) in enumerate(arcs):
            if b == j:
                row[1 + k] = pi[a]
        A_eq.append(row)
        b_eq.append(pi[j])
    A_ub, b_ub = [], []
    for W in all_subsets(n):
        w = set(W)
        pw = pi[list(W)].sum()
        if pw > 0.5 + 1e-12:
            continue
        row = np.zeros(nv)
        row[0] = 1.0
        for k, (a, b) in enumerate(arcs):
            if a in w and b not in w:
                row[1 + k] = -pi[a] / pw
        A_ub.append(row)
        b_ub.append(0.0)
    res = linprog(c, A_ub=np.array(A_ub), b_ub=b_ub, A_eq=np.array(A_eq), b_eq=b_eq,
                  bounds=[(None, None)] + [(0, None)] * len(arcs), method="highs")
    assert res.status == 0
    return float(-res.fun)


def random_local_matrix(G: Graph, rng: np.random.Generator, sparsity: float = 0.3) -> np.ndarray:
    """Random column-stochastic matrix supported on G (self-loops always kept)."""
    W = rng.uniform(size=(G.n, G.n)) * G.adjacency
    W *= (rng.uniform(size=W.shape) > sparsity) | np.eye(G.n, dtype=bool)
    W[np.diag_indices(G.n)] += 1e-3
    return W / W.sum(axis=0, keepdims=True)


def random_symmetric_local(G: Graph, rng: np.random.Generator) -> np.ndarray:
    """Symmetric, hence doubly stochastic, local matrix."""
    n = G.n
    P = np.zeros((n, n))
    for i, j in G.edges():
        w = rng.uniform(0.0, 1.0 / max(G.degree(i), G.degree(j)))
        P[i, j] = P[j, i] = w
    P[np.diag_indices(n)] = 1.0 - P.sum(axis=0)
    return P


def random_connected_graph(n: int, rng: np.random.Generator, p: float = 0.35) -> Graph:
    order = rng.permutation(n)
    edges = {tuple(sorted((int(order[k]), int(order[k + 1])))) for k in range(n - 1)}
    for i in range(n):
        for j in range(i + 1, n):
            if rng.uniform() < p:
                edges.add((i, j))
    return Graph.from_edges(n, sorted(edges))
