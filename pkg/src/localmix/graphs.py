"""Undirected locality graphs with mandatory self-loops.

Nodes are the dense integers ``0..n-1``. Every node carries a self-loop, so a
stochastic matrix may always keep mass in place. Subsets of nodes are passed
around as iterables of ints or boolean masks; exact subset enumeration is
limited to :data:`MAX_ENUM_NODES` nodes.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable
from dataclasses import dataclass, field

import numpy as np

from localmix.errors import CapacityExceededError, InvalidInputError

MAX_ENUM_NODES = 16
ENTRY_TOL = 1e-12

FAMILIES = ("dumbbell", "cycle", "complete", "path")


@dataclass(frozen=True, eq=False)
class Graph:
    """Symmetric adjacency relation over ``n`` nodes, self-loops included."""

    n: int
    adjacency: np.ndarray = field(repr=False)
    name: str = ""

    def __post_init__(self) -> None:
        adj = np.array(self.adjacency, dtype=bool)
        if self.n < 1 or adj.shape != (self.n, self.n):
            raise InvalidInputError(
                f"adjacency must be {self.n}x{self.n}, got {adj.shape}"
            )
        if not np.array_equal(adj, adj.T):
            raise InvalidInputError("edge relation must be symmetric")
        if not adj.diagonal().all():
            raise InvalidInputError("every node needs a self-loop")
        adj.setflags(write=False)
        object.__setattr__(self, "adjacency", adj)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Iterable[int]], name: str = "") -> Graph:
        if int(n) < 1:
            raise InvalidInputError(f"node count must be positive, got {n}")
        n = int(n)
        adj = np.eye(n, dtype=bool)
        for edge in edges:
            pair = list(edge)
            if len(pair) != 2:
                raise InvalidInputError(f"edge {pair!r} must be a pair of node ids")
            i, j = (int(v) for v in pair)
            if not (0 <= i < n and 0 <= j < n):
                raise InvalidInputError(f"edge ({i}, {j}) outside 0..{n - 1}")
            adj[i, j] = adj[j, i] = True
        return cls(n, adj, name)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.adjacency, other.adjacency)

    def __hash__(self) -> int:
        return hash((self.n, self.adjacency.tobytes()))

    def edges(self) -> list[tuple[int, int]]:
        """Non-self-loop edges as ``(i, j)`` with ``i < j``."""
        ii, jj = np.nonzero(np.triu(self.adjacency, k=1))
        return [(int(i), int(j)) for i, j in zip(ii, jj)]

    def neighbors(self, i: int) -> list[int]:
        return [int(j) for j in np.flatnonzero(self.adjacency[i]) if j != i]

    def degree(self, i: int) -> int:
        """Number of distinct neighbours, the self-loop not counted."""
        return len(self.neighbors(i))

    def diameter(self) -> int:
        """Longest shortest path, ignoring self-loops; -1 when disconnected."""
        best = 0
        for src in range(self.n):
            dist = [-1] * self.n
            dist[src] = 0
            queue = deque([src])
            while queue:
                u = queue.popleft()
                for v in self.neighbors(u):
                    if dist[v] < 0:
                        dist[v] = dist[u] + 1
                        queue.append(v)
            if min(dist) < 0:
                return -1
            best = max(best, max(dist))
        return best

    def to_dict(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.edges()]}

    @classmethod
    def from_dict(cls, data: dict) -> Graph:
        if "family" in data:
            return make_graph(data["family"], data["size"])
        try:
            n = data["n"]
            edges = data["edges"]
        except (KeyError, TypeError) as exc:
            raise InvalidInputError("graph JSON needs keys 'n' and 'edges'") from exc
        return cls.from_edges(n, edges, name=data.get("name", ""))


def make_graph(family: str, size: int) -> Graph:
    """Build one of the standard families.

    ``dumbbell(n)`` has ``2n`` nodes: cliques on ``0..n-1`` and ``n..2n-1``
    joined by the single edge ``(n-1, n)``.
    """
    size = int(size)
    if size < 1:
        raise InvalidInputError(f"{family} size must be positive, got {size}")
    if family == "complete":
        edges = [(i, j) for i in range(size) for j in range(i + 1, size)]
        return Graph.from_edges(size, edges, name=f"complete({size})")
    if family == "path":
        edges = [(i, i + 1) for i in range(size - 1)]
        return Graph.from_edges(size, edges, name=f"path({size})")
    if family == "cycle":
        edges = [(i, (i + 1) % size) for i in range(size)]
        return Graph.from_edges(size, edges, name=f"cycle({size})")
    if family == "dumbbell":
        if size < 2:
            raise InvalidInputError("dumbbell needs cliques of size >= 2")
        edges = []
        for base in (0, size):
            edges += [
                (base + i, base + j) for i in range(size) for j in range(i + 1, size)
            ]
        edges.append((size - 1, size))
        return Graph.from_edges(2 * size, edges, name=f"dumbbell({size})")
    raise InvalidInputError(f"unknown family {family!r}; expected one of {FAMILIES}")


def parse_graph_arg(text: str) -> Graph:
    """Parse ``family:size`` shorthand, e.g. ``dumbbell:6``."""
    family, _, size = text.partition(":")
    if not size:
        raise InvalidInputError(f"expected FAMILY:SIZE, got {text!r}")
    try:
        size = int(size)
    except ValueError as exc:
        raise InvalidInputError(f"bad graph size in {text!r}") from exc
    return make_graph(family, size)


def as_mask(W, n: int) -> np.ndarray:
    """Boolean membership vector for a node subset (ints or a mask)."""
    arr = np.asarray(list(W) if not isinstance(W, np.ndarray) else W)
    if arr.dtype == bool:
        if arr.shape != (n,):
            raise InvalidInputError(f"mask must have length {n}")
        return arr.copy()
    mask = np.zeros(n, dtype=bool)
    if arr.size == 0:
        return mask
    idx = arr.astype(int).ravel()
    if (idx < 0).any() or (idx >= n).any() or not np.array_equal(idx, arr.ravel()):
        raise InvalidInputError(f"subset {sorted(set(arr.ravel().tolist()))} outside 0..{n - 1}")
    mask[idx] = True
    return mask


def neighborhood(G: Graph, W) -> frozenset[int]:
    """Nodes outside ``W`` with an edge into ``W``."""
    mask = as_mask(W, G.n)
    touched = G.adjacency[mask].any(axis=0)
    return frozenset(int(j) for j in np.flatnonzero(touched & ~mask))


def is_local(G: Graph, P: np.ndarray, tol: float = ENTRY_TOL) -> bool:
    """True iff ``P`` puts no weight (beyond ``tol``) on non-edges of ``G``."""
    P = np.asarray(P)
    if P.shape != (G.n, G.n):
        raise InvalidInputError(f"matrix shape {P.shape} does not match {G.n} nodes")
    return bool(np.all(np.abs(P[~G.adjacency]) <= tol))


def subset_masks(n: int) -> np.ndarray:
    """All ``2**n`` subsets as a boolean ``(2**n, n)`` array, bit ``i`` = node ``i``."""
    if n > MAX_ENUM_NODES:
        raise CapacityExceededError(
            f"exact subset enumeration is capped at {MAX_ENUM_NODES} nodes, got {n}"
        )
    codes = np.arange(1 << n, dtype=np.int64)
    return ((codes[:, None] >> np.arange(n)) & 1).astype(bool)
