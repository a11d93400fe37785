"""Clocked lifted chain that simulates a restarted system.

Lifted states are triples ``(start i, clock t, current j)`` flattened as
``((i * tau) + t) * n + j``. Within a clock period the current node moves by
the per-step matrices ``P(t, e_i)`` extracted from the system's marginals
started at ``e_i``; at the end of the period the start register is reset to
the current node and the clock to 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from localmix.errors import AxiomViolationError, CapacityExceededError, InvalidInputError
from localmix.flow import Infeasible, extract_transition
from localmix.graphs import Graph
from localmix.prob import as_dist
from localmix.systems import EvolutionSystem, MixingReport, tau_from_trace

INDEX_ORDER = "((start * tau) + clock) * n + current"
SIM_TOL = 1e-8
MAX_LIFTED_DIRAC = 4096


class Restarted(EvolutionSystem):
    """Run ``inner`` for ``tau`` steps, re-initialise from the reached marginal, repeat."""

    kind = "restarted"

    def __init__(self, inner: EvolutionSystem, tau: int):
        if tau < 1:
            raise InvalidInputError("tau must be >= 1")
        super().__init__(inner.graph, inner.pi, f"restarted({inner.name}, {tau})")
        self.inner = inner
        self.tau = tau
        self.linear = inner.linear

    def init_state(self, X0):
        return (self.inner.init_state(X0), 0)

    def step(self, state, t):
        inner_state, local = state
        inner_state = self.inner.step(inner_state, local)
        local += 1
        if local == self.tau:
            inner_state = self.inner.init_state(self.inner.marginal(inner_state))
            local = 0
        return (inner_state, local)

    def marginal(self, state):
        return self.inner.marginal(state[0])


def squiggle(sys: EvolutionSystem, tau: int) -> Restarted:
    return Restarted(sys, tau)


@dataclass(eq=False)
class LiftedChain:
    tau: int
    n: int
    M: sp.csr_matrix = field(repr=False)
    pi: np.ndarray = field(repr=False)
    graph: Graph | None = field(default=None, repr=False)
    steps: dict = field(default_factory=dict, repr=False)  # (i, t) -> P(t, e_i)

    @property
    def dim(self) -> int:
        return self.n * self.tau * self.n

    def index(self, start: int, clock: int, current: int) -> int:
        return (start * self.tau + clock) * self.n + current

    def to_dict(self) -> dict:
        coo = self.M.tocoo()
        order = np.lexsort((coo.row, coo.col))
        return {
            "tau": self.tau,
            "n": self.n,
            "index_order": INDEX_ORDER,
            "pi": self.pi.tolist(),
            "M": {
                "shape": [self.dim, self.dim],
                "rows": coo.row[order].tolist(),
                "cols": coo.col[order].tolist(),
                "vals": coo.data[order].tolist(),
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> LiftedChain:
        tau, n = int(data["tau"]), int(data["n"])
        trip = data["M"]
        dim = n * tau * n
        M = sp.csr_matrix((trip["vals"], (trip["rows"], trip["cols"])), shape=(dim, dim))
        return cls(tau, n, M, np.asarray(data["pi"], dtype=float))


def build_M(sys: EvolutionSystem, tau: int, G: Graph | None = None) -> LiftedChain:
    """Assemble the lifted transition matrix from flow-extracted step matrices."""
    if tau < 1:
        raise InvalidInputError("tau must be >= 1")
    G = sys.graph if G is None else G
    n = sys.n
    traj = list(sys.trajectory(np.eye(n), tau))  # traj[t][:, i] = X_t from e_i
    # restarting must not move the limit: each r-step map fixes pi
    for r in range(1, tau + 1):
        drift = float(np.abs(traj[r] @ sys.pi - sys.pi).sum())
        if drift > SIM_TOL:
            raise AxiomViolationError(
                f"{r}-step map moves the limit by {drift:.3g}; restarting could increase the distance"
            )
    steps = {}
    rows, cols, vals = [], [], []
    for i in range(n):
        for t in range(tau):
            P = extract_transition(traj[t][:, i], traj[t + 1][:, i], G)
            if isinstance(P, Infeasible):
                raise AxiomViolationError(
                    f"step {t} from node {i} is not local: witness W={sorted(P.witness)}, flow {P.value:.6g}"
                )
            steps[(i, t)] = P
            dst_rows, src_cols = np.nonzero(P)
            w = P[dst_rows, src_cols]
            src = (i * tau + t) * n + src_cols
            if t < tau - 1:
                dst = (i * tau + t + 1) * n + dst_rows
            else:
                dst = (dst_rows * tau + 0) * n + dst_rows
            rows.append(dst)
            cols.append(src)
            vals.append(w)
    dim = n * tau * n
    M = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim)
    )
    return LiftedChain(tau, n, M, sys.pi.copy(), G, steps)


def v_init(X0, lc: LiftedChain) -> np.ndarray:
    X0 = as_dist(X0, lc.n)
    v = np.zeros(lc.dim)
    idx = np.arange(lc.n)
    v[(idx * lc.tau) * lc.n + idx] = X0
    return v


def project_lifted(state: np.ndarray, lc: LiftedChain) -> np.ndarray:
    """Sum over start and clock registers; works on ``(dim,)`` or ``(dim, k)``."""
    state = np.asarray(state)
    tail = state.shape[1:]
    return state.reshape((lc.n * lc.tau, lc.n) + tail).sum(axis=0)


@dataclass
class SimulationCheck:
    passed: bool
    max_deviation: float
    first_failure: int | None = None

    def to_dict(self) -> dict:
        return {"passed": self.passed, "max_deviation": self.max_deviation,
                "first_failure": self.first_failure}


def verify_simulation(lc: LiftedChain, sys: EvolutionSystem, X0, T: int) -> SimulationCheck:
    """Compare projected ``M^t v[X0]`` with the restarted system for ``t = 0..T``."""
    v = v_init(X0, lc)
    worst, first = 0.0, None
    for t, x in enumerate(squiggle(sys, lc.tau).trajectory(X0, T)):
        dev = float(np.abs(project_lifted(v, lc) - x).sum())
        worst = max(worst, dev)
        if dev > SIM_TOL and first is None:
            first = t
        v = lc.M @ v
    return SimulationCheck(first is None, worst, first)


@dataclass
class LiftedConvergence:
    tau_M: int | None
    tau: int
    phi: float | None
    report: MixingReport = field(repr=False)

    @property
    def within_twice_tau(self) -> bool:
        return self.tau_M is not None and self.tau_M <= 2 * self.tau

    @property
    def conductance_floor(self) -> float | None:
        return None if not self.phi else 1.0 / (4.0 * self.phi)

    @property
    def above_conductance_floor(self) -> bool | None:
        if self.conductance_floor is None:
            return None
        return self.tau_M is None or self.tau_M >= self.conductance_floor - 1

    def to_dict(self) -> dict:
        return {
            "tau_M": self.tau_M,
            "tau": self.tau,
            "tau_M_le_2tau": self.within_twice_tau,
            "phi": self.phi,
            "one_over_4phi": self.conductance_floor,
            "tau_M_ge_one_over_4phi_minus_1": self.above_conductance_floor,
            "horizon": self.report.horizon,
        }


def lifted_convergence_time(lc: LiftedChain, horizon: int, phi: float | None = None) -> LiftedConvergence:
    """Worst projected distance over every lifted Dirac start ``(i, T, k)``."""
    if horizon < 2 * lc.tau:
        raise InvalidInputError(f"horizon must be at least 2 * tau = {2 * lc.tau}")
    if lc.dim > MAX_LIFTED_DIRAC:
        raise CapacityExceededError(f"{lc.dim} lifted states exceeds {MAX_LIFTED_DIRAC}")
    X = np.eye(lc.dim)
    d = np.empty(horizon + 1)
    worst = np.empty(horizon + 1, dtype=np.int64)
    for t in range(horizon + 1):
        dist = np.abs(project_lifted(X, lc) - lc.pi[:, None]).sum(axis=0)
        k = int(np.argmax(dist))
        d[t], worst[t] = dist[k], k
        if t < horizon:
            X = lc.M @ X
    tau_M = tau_from_trace(d)
    report = MixingReport(tau_M, horizon, d, worst, notes=["worst case over all lifted Dirac starts"])
    return LiftedConvergence(tau_M, lc.tau, phi, report)
