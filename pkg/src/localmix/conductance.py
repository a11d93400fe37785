"""Conductance of a chain, maximised conductance of a graph, edge expansion.

For a limit distribution ``pi`` and a set ``W`` with ``pi(W) <= 1/2`` the
outflow of ``P`` is the mass of ``P @ (pi | W)`` landing outside ``W``.
``phi_of`` minimises the outflow over ``W``; ``phi_max`` maximises that
minimum over every local stochastic ``P`` that keeps ``pi`` invariant, as a
linear program with one constraint per admissible subset.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from localmix.errors import CapacityExceededError, InternalError, InvalidInputError
from localmix.graphs import MAX_ENUM_NODES, Graph, is_local, subset_masks
from localmix.lp import LinearProgram, lp_solve
from localmix.prob import as_dist, as_stochastic, leaves_invariant

HALF_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ConductanceReport:
    phi: float
    argmin_subset: frozenset[int]
    argmax_matrix: np.ndarray | None = None
    lp_status: str | None = None
    lp_iterations: int = 0

    def to_dict(self) -> dict:
        out = {"phi": self.phi, "argmin_subset": sorted(self.argmin_subset)}
        if self.argmax_matrix is not None:
            out["argmax_matrix"] = self.argmax_matrix.tolist()
        if self.lp_status is not None:
            out["lp_status"] = self.lp_status
            out["lp_iterations"] = self.lp_iterations
        return out


def _check_pi(pi, G: Graph) -> np.ndarray:
    pi = as_dist(pi, G.n)
    if pi.min() <= 0:
        raise InvalidInputError("limit distribution must be strictly positive")
    return pi


def _admissible_masks(pi: np.ndarray) -> np.ndarray:
    masks = subset_masks(pi.size)[1:]  # drop the empty set
    return masks[masks @ pi <= 0.5 + HALF_TOL]


def _outflows(P: np.ndarray, pi: np.ndarray, masks: np.ndarray) -> np.ndarray:
    F = P * pi[None, :]  # F[j, i]: mass moved from i to j
    weights = masks.astype(float)
    inside = ((weights @ F) * weights).sum(axis=1)
    mass = weights @ pi
    return (mass - inside) / mass


def phi_of(P, pi, G: Graph) -> ConductanceReport:
    """Exact conductance of one chain by enumerating every admissible subset."""
    P = as_stochastic(P, G.n)
    pi = _check_pi(pi, G)
    if not is_local(G, P):
        raise InvalidInputError("locality violated: P has weight on a non-edge")
    if not leaves_invariant(P, pi):
        raise InvalidInputError("invariance violated: P does not fix pi")
    masks = _admissible_masks(pi)
    out = _outflows(P, pi, masks)
    k = int(np.argmin(out))
    return ConductanceReport(float(out[k]), frozenset(np.flatnonzero(masks[k]).tolist()))


def _edge_variables(G: Graph) -> tuple[np.ndarray, np.ndarray]:
    """Directed edge list (source i, target j), grouped by source column."""
    src, dst = np.nonzero(G.adjacency.T)
    return src, dst


def conductance_lp(G: Graph, pi) -> tuple[LinearProgram, np.ndarray, np.ndarray]:
    """The LP behind :func:`phi_max`. Variable 0 is ``phi``, then one per directed edge."""
    pi = _check_pi(pi, G)
    src, dst = _edge_variables(G)
    ne = src.size
    nv = ne + 1
    n = G.n
    A_eq = np.zeros((2 * n, nv))
    A_eq[src, 1 + np.arange(ne)] = 1.0  # column sums
    A_eq[n + dst, 1 + np.arange(ne)] = pi[src]  # invariance
    b_eq = np.concatenate([np.ones(n), pi])
    masks = _admissible_masks(pi)
    leaving = masks[:, src] & ~masks[:, dst]
    A_ub = np.empty((masks.shape[0], nv))
    A_ub[:, 0] = 1.0
    A_ub[:, 1:] = -leaving.astype(float) * (pi[src][None, :] / (masks @ pi)[:, None])
    lp = LinearProgram(
        c=np.eye(nv)[0],
        A_ub=A_ub,
        b_ub=np.zeros(masks.shape[0]),
        A_eq=A_eq,
        b_eq=b_eq,
        bounds=[(0.0, None)] * nv,
    )
    return lp, src, dst


def phi_max(G: Graph, pi) -> ConductanceReport:
    """Largest conductance over local stochastic matrices that fix ``pi``."""
    if G.n > MAX_ENUM_NODES:
        raise CapacityExceededError(
            f"conductance LP enumerates subsets; capped at {MAX_ENUM_NODES} nodes, got {G.n}"
        )
    pi = _check_pi(pi, G)
    lp, src, dst = conductance_lp(G, pi)
    res = lp_solve(lp)
    if res.status == "infeasible" or res.x is None:
        raise InternalError(f"conductance LP returned status {res.status!r}")
    P = np.zeros((G.n, G.n))
    P[dst, src] = np.clip(res.x[1:], 0.0, None)
    P /= P.sum(axis=0, keepdims=True)
    argmin = phi_of(P, pi, G).argmin_subset
    return ConductanceReport(
        float(res.x[0]), argmin, P, res.status, res.iterations
    )


def edge_expansion(G: Graph) -> float:
    """Min over ``0 < |W| <= n/2`` of cut edges per node of ``W``."""
    if G.n > MAX_ENUM_NODES:
        raise CapacityExceededError(f"edge expansion capped at {MAX_ENUM_NODES} nodes")
    if G.n == 1:
        return 0.0
    masks = subset_masks(G.n)[1:]
    sizes = masks.sum(axis=1)
    masks, sizes = masks[sizes <= G.n / 2], sizes[sizes <= G.n / 2]
    w = masks.astype(np.int64)
    cut = ((w @ G.adjacency.astype(np.int64)) * (1 - w)).sum(axis=1)
    return float((cut / sizes).min())


def phi_upper_bound(G: Graph, pi, subsets=None) -> tuple[float, frozenset[int]]:
    """Upper bound on :func:`phi_max` from a handful of subsets; no enumeration.

    For any admissible ``W``, every local ``P`` fixing ``pi`` moves out of
    ``W`` at most the mass of its boundary nodes, and (by invariance) at most
    the mass of ``N(W)`` that flows back in. Default candidates are the
    cyclic index intervals, which contain the bottleneck of every bundled
    graph family.
    """
    pi = as_dist(pi, G.n)
    n = G.n
    if subsets is None:
        subsets = [
            [(a + k) % n for k in range(length)]
            for length in range(1, n)
            for a in range(n)
        ]
    adj = G.adjacency
    best, best_w = np.inf, frozenset()
    for W in subsets:
        mask = np.zeros(n, dtype=bool)
        mask[list(W)] = True
        mass = pi[mask].sum()
        if not mask.any() or mass > 0.5 + HALF_TOL:
            continue
        boundary = mask & adj[:, ~mask].any(axis=1)
        outside = ~mask & adj[:, mask].any(axis=1)
        value = min(pi[boundary].sum(), pi[outside].sum()) / mass
        if value < best:
            best, best_w = float(value), frozenset(int(i) for i in np.flatnonzero(mask))
    return best, best_w
