"""Max-flow certification that one distribution can follow another locally.

For consecutive distributions ``Y -> Z`` on a graph ``G`` we build the
layered network

    s --Y(i)--> i --1 if (i, j) in E--> j' --Z(j)--> t

A flow of value 1 routes every unit of ``Y`` to ``Z`` along edges, and the
fraction of ``Y(i)`` sent to ``j'`` is the transition weight ``P[j, i]``.
A smaller max flow exhibits a set ``W`` with ``Z(W) > Y(W) + Y(N(W))``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from localmix.errors import CapacityExceededError, InvalidInputError
from localmix.graphs import MAX_ENUM_NODES, Graph, subset_masks
from localmix.prob import as_dist

AUGMENT_CUTOFF = 1e-12
FEASIBLE_SLACK = 1e-9
ZERO_MASS = 1e-12
ENUM_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class FlowNetwork:
    """Directed network stored as a dense capacity matrix."""

    capacity: np.ndarray
    source: int
    sink: int
    layer_size: int = 0  # n for step networks: nodes s, 1..n, n+1..2n, t

    def __post_init__(self) -> None:
        cap = np.array(self.capacity, dtype=float)
        if cap.ndim != 2 or cap.shape[0] != cap.shape[1]:
            raise InvalidInputError("capacity matrix must be square")
        if not np.all(np.isfinite(cap)) or cap.min() < 0:
            raise InvalidInputError("capacities must be finite and non-negative")
        size = cap.shape[0]
        if not (0 <= self.source < size and 0 <= self.sink < size):
            raise InvalidInputError("source/sink outside the network")
        if self.source == self.sink:
            raise InvalidInputError("source and sink must differ")
        cap.setflags(write=False)
        object.__setattr__(self, "capacity", cap)

    @classmethod
    def from_arcs(cls, num_nodes: int, arcs, source: int, sink: int) -> FlowNetwork:
        """Build from ``(u, v, capacity)`` triples; arcs to unknown nodes are rejected."""
        cap = np.zeros((num_nodes, num_nodes))
        for u, v, c in arcs:
            if not (0 <= u < num_nodes and 0 <= v < num_nodes):
                raise InvalidInputError(f"dangling arc ({u}, {v}) in a {num_nodes}-node network")
            cap[u, v] += c
        return cls(cap, source, sink)

    @property
    def num_nodes(self) -> int:
        return self.capacity.shape[0]

    def arcs(self) -> list[tuple[int, int, float]]:
        uu, vv = np.nonzero(self.capacity)
        return [(int(u), int(v), float(self.capacity[u, v])) for u, v in zip(uu, vv)]


@dataclass(frozen=True, eq=False)
class FlowResult:
    value: float
    flow: np.ndarray  # flow[u, v] >= 0 on arcs, 0 elsewhere
    reachable: np.ndarray  # source side of a minimum cut

    def cut_value(self, net: FlowNetwork) -> float:
        S = self.reachable
        return float(net.capacity[np.ix_(S, ~S)].sum())


@dataclass(frozen=True)
class Infeasible:
    """No local transition exists; ``witness`` violates the locality inequality."""

    value: float
    witness: frozenset[int]


def _bfs_parents(residual: list[list[float]], nbrs: list[list[int]], source: int, sink: int) -> list[int]:
    parent = [-1] * len(nbrs)
    parent[source] = source
    queue = deque([source])
    while queue:
        u = queue.popleft()
        row = residual[u]
        for v in nbrs[u]:
            if parent[v] < 0 and row[v] > AUGMENT_CUTOFF:
                parent[v] = u
                if v == sink:
                    return parent
                queue.append(v)
    return parent


def max_flow(net: FlowNetwork, initial: np.ndarray | None = None) -> FlowResult:
    """Edmonds-Karp: augment along shortest residual paths.

    BFS visits neighbours in increasing index order, so the returned flow is
    a deterministic function of the network. ``initial`` may hold a feasible
    starting flow; augmentation then only tops it up.
    """
    cap = net.capacity
    s, t = net.source, net.sink
    if initial is None:
        net_flow = np.zeros_like(cap)
    else:
        initial = np.asarray(initial, dtype=float)
        net_flow = initial - initial.T
    touching = (cap > 0) | (cap.T > 0)
    nbrs = [np.flatnonzero(row).tolist() for row in touching]
    residual = (cap - net_flow).tolist()
    while True:
        parent = _bfs_parents(residual, nbrs, s, t)
        if parent[t] < 0:
            break
        path = [t]
        while path[-1] != s:
            path.append(parent[path[-1]])
        path.reverse()
        bottleneck = min(residual[u][v] for u, v in zip(path, path[1:]))
        for u, v in zip(path, path[1:]):
            residual[u][v] -= bottleneck
            residual[v][u] += bottleneck
    net_flow = cap - np.array(residual)
    flow = np.where(cap > 0, np.clip(net_flow, 0.0, None), 0.0)
    return FlowResult(float(net_flow[s].sum()), flow, np.array(parent) >= 0)


def build_step_network(Y, Z, G: Graph) -> FlowNetwork:
    n = G.n
    Y = as_dist(Y, n)
    Z = as_dist(Z, n)
    size = 2 * n + 2
    cap = np.zeros((size, size))
    s, t = 0, size - 1
    cap[s, 1 : n + 1] = Y
    # middle arcs i -> j' wherever (i, j) is an edge, self-loops included
    cap[1 : n + 1, n + 1 : 2 * n + 1] = G.adjacency.astype(float)
    cap[n + 1 : 2 * n + 1, t] = Z
    return FlowNetwork(cap, s, t, layer_size=n)


def _witness(result: FlowResult, n: int) -> frozenset[int]:
    unreachable = ~result.reachable[n + 1 : 2 * n + 1]
    return frozenset(int(j) for j in np.flatnonzero(unreachable))


@dataclass(frozen=True, eq=False)
class StepCertificate:
    value: float
    feasible: bool
    matrix: np.ndarray | None
    witness: frozenset[int] | None

    def to_dict(self) -> dict:
        out = {"value": self.value, "feasible": self.feasible}
        if self.matrix is not None:
            out["matrix"] = self.matrix.tolist()
        if self.witness is not None:
            out["witness_cut"] = sorted(self.witness)
        return out


def certify_step(Y, Z, G: Graph) -> StepCertificate:
    """Run the flow once and report value, extracted matrix or witness cut."""
    net = build_step_network(Y, Z, G)
    res = max_flow(net)
    n = G.n
    if res.value < 1.0 - FEASIBLE_SLACK:
        return StepCertificate(res.value, False, None, _witness(res, n))
    routed = res.flow[1 : n + 1, n + 1 : 2 * n + 1].T  # routed[j, i] = flow i -> j'
    Y = net.capacity[0, 1 : n + 1]
    P = np.eye(n)
    for i in range(n):
        out = routed[:, i].sum()
        if Y[i] > ZERO_MASS and out > 0.0:
            # dividing by the routed amount instead of Y(i) absorbs the
            # sub-slack shortfall of a borderline flow
            P[:, i] = routed[:, i] / out
    return StepCertificate(res.value, True, P, None)


def extract_transition(Y, Z, G: Graph) -> np.ndarray | Infeasible:
    """Local column-stochastic ``P`` with ``P @ Y == Z``, or :class:`Infeasible`."""
    cert = certify_step(Y, Z, G)
    if not cert.feasible:
        return Infeasible(cert.value, cert.witness)
    return cert.matrix


def _stay_put_flow(net: FlowNetwork) -> np.ndarray:
    """Feasible flow sending ``min(Y(i), Z(i))`` along each self-loop arc."""
    n = net.layer_size
    cap = net.capacity
    keep = np.minimum(cap[0, 1 : n + 1], cap[n + 1 : 2 * n + 1, 2 * n + 1])
    keep = np.minimum(keep, 1.0)
    flow = np.zeros_like(cap)
    idx = np.arange(n)
    flow[0, 1 + idx] = keep
    flow[1 + idx, n + 1 + idx] = keep
    flow[n + 1 + idx, 2 * n + 1] = keep
    return flow


def locality_holds_flow(Y, Z, G: Graph) -> bool:
    net = build_step_network(Y, Z, G)
    res = max_flow(net, _stay_put_flow(net))
    return res.value >= 1.0 - FEASIBLE_SLACK


def locality_violation(Y, Z, G: Graph) -> frozenset[int] | None:
    """First subset (in bitmask order) breaking ``Z(W) <= Y(W) + Y(N(W))``."""
    n = G.n
    if n > MAX_ENUM_NODES:
        raise CapacityExceededError(f"subset enumeration capped at {MAX_ENUM_NODES} nodes")
    Y = as_dist(Y, n)
    Z = as_dist(Z, n)
    masks = subset_masks(n)
    touched = (masks.astype(np.int64) @ G.adjacency.astype(np.int64)) > 0
    reach = touched | masks  # W together with N(W)
    slack = reach @ Y - masks @ Z
    bad = np.flatnonzero(slack < -ENUM_SLACK)
    if bad.size == 0:
        return None
    return frozenset(int(i) for i in np.flatnonzero(masks[bad[0]]))


def locality_holds_enum(Y, Z, G: Graph) -> bool:
    return locality_violation(Y, Z, G) is None
