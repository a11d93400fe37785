"""Evolution systems, axiom probes and mixing-time measurement.

A system maps an initial distribution over graph nodes to a sequence of node
marginals, possibly through hidden state (direction registers, running sums,
density matrices). All systems evolve a *batch* of initial distributions at
once: ``X0`` has shape ``(n, k)`` and marginals come back with the same shape.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from collections.abc import Callable, Iterator, Sequence
from dataclasses import dataclass, field

import numpy as np

from localmix.errors import AxiomViolationError, CapacityExceededError, InvalidInputError
from localmix.flow import locality_holds_flow
from localmix.graphs import Graph, is_local, make_graph
from localmix.prob import SUM_TOL, as_dist, as_stochastic, leaves_invariant, uniform

HORIZON_CAP = 10**6
MIX_THRESHOLD = 0.5
PROBE_TOL = 1e-8


def _as_batch(X0, n: int) -> tuple[np.ndarray, bool]:
    X = np.array(X0, dtype=float)
    single = X.ndim == 1
    if single:
        X = X[:, None]
    if X.ndim != 2 or X.shape[0] != n:
        raise InvalidInputError(f"initial distributions must have {n} rows, got shape {X.shape}")
    for k in range(X.shape[1]):
        X[:, k] = as_dist(X[:, k], n)
    return X, single


class EvolutionSystem(ABC):
    """A propagation rule on node distributions of ``graph`` with limit ``pi``."""

    kind = "abstract"
    linear = True

    def __init__(self, graph: Graph, pi=None, name: str = ""):
        self.graph = graph
        self.n = graph.n
        self.pi = uniform(graph.n) if pi is None else as_dist(pi, graph.n)
        self.name = name or self.kind

    @abstractmethod
    def init_state(self, X0: np.ndarray):
        """Hidden state for a batch of initial distributions ``(n, k)``."""

    @abstractmethod
    def step(self, state, t: int):
        """State at time ``t + 1`` from the state at time ``t``."""

    @abstractmethod
    def marginal(self, state) -> np.ndarray:
        """Node marginals, shape ``(n, k)``."""

    def trajectory(self, X0, steps: int) -> Iterator[np.ndarray]:
        """Marginals for ``t = 0, 1, ..., steps``."""
        if steps > HORIZON_CAP:
            raise CapacityExceededError(f"{steps} steps exceeds the horizon cap {HORIZON_CAP}")
        X, single = _as_batch(X0, self.n)
        state = self.init_state(X)
        for t in range(steps + 1):
            out = self.marginal(state)
            yield out[:, 0] if single else out
            if t < steps:
                state = self.step(state, t)

    def evolve(self, X0, t: int) -> np.ndarray:
        for out in self.trajectory(X0, t):
            pass
        return out

    def describe(self) -> dict:
        return {"kind": self.kind, "name": self.name, "n": self.n}


class MatrixChain(EvolutionSystem):
    """Shared validation for systems driven by explicit stochastic matrices."""

    def _validate(self, P, label: str) -> np.ndarray:
        try:
            P = as_stochastic(P, self.n)
        except InvalidInputError as exc:
            raise AxiomViolationError(f"{label}: {exc}") from exc
        if not is_local(self.graph, P):
            raise AxiomViolationError(f"{label}: weight on a non-edge of {self.graph.name or 'the graph'}")
        if not leaves_invariant(P, self.pi):
            raise AxiomViolationError(f"{label}: does not leave the declared limit invariant")
        return P


class Homogeneous(MatrixChain):
    kind = "homogeneous"

    def __init__(self, P, graph: Graph, pi=None, name: str = ""):
        super().__init__(graph, pi, name)
        self.P = self._validate(P, "transition matrix")

    def init_state(self, X0):
        return X0

    def step(self, state, t):
        return self.P @ state

    def marginal(self, state):
        return state

    def slem(self) -> float:
        """Second-largest eigenvalue modulus."""
        mods = np.sort(np.abs(np.linalg.eigvals(self.P)))[::-1]
        return float(mods[1]) if mods.size > 1 else 0.0


class Inhomogeneous(MatrixChain):
    """``X_{t+1} = P_{t mod period} X_t``."""

    kind = "inhomogeneous"

    def __init__(self, schedule, graph: Graph, pi=None, period: int | None = None, name: str = ""):
        super().__init__(graph, pi, name)
        if callable(schedule):
            if period is None:
                raise InvalidInputError("a generator schedule needs a declared period")
            mats = [schedule(t) for t in range(period)]
        else:
            mats = list(schedule)
            period = len(mats) if period is None else period
            if period != len(mats):
                raise InvalidInputError(f"period {period} does not match {len(mats)} matrices")
        if period < 1:
            raise InvalidInputError("period must be positive")
        self.period = period
        self.matrices = [self._validate(P, f"schedule entry {t}") for t, P in enumerate(mats)]

    def init_state(self, X0):
        return X0

    def step(self, state, t):
        return self.matrices[t % self.period] @ state

    def marginal(self, state):
        return state


class Cesaro(MatrixChain):
    """Running average ``(1 / (t+1)) * sum_{k<=t} P^k X0``."""

    kind = "cesaro"

    def __init__(self, P, graph: Graph, pi=None, name: str = ""):
        super().__init__(graph, pi, name)
        self.P = self._validate(P, "transition matrix")

    def init_state(self, X0):
        return (0, X0.copy(), X0.copy())

    def step(self, state, t):
        count, current, total = state
        current = self.P @ current
        return (count + 1, current, total + current)

    def marginal(self, state):
        count, _, total = state
        return total / (count + 1)


class DHNWalk(EvolutionSystem):
    """Persistent walk on ``cycle(m)`` with a direction register.

    Each step the walker keeps its direction and moves with probability
    ``1 - p_switch``; otherwise it reverses direction. By default a reversal
    stays put, which keeps the walk aperiodic on even cycles; with
    ``move_on_switch=True`` the walker also steps in the new direction.
    """

    kind = "dhn"

    def __init__(self, m: int, p_switch: float, move_on_switch: bool = False, name: str = ""):
        if m < 3:
            raise InvalidInputError(f"cycle length must be >= 3, got {m}")
        if not 0.0 < p_switch < 1.0:
            raise InvalidInputError(f"p_switch must lie in (0, 1), got {p_switch}")
        super().__init__(make_graph("cycle", m), None, name)
        self.m = m
        self.p_switch = float(p_switch)
        self.move_on_switch = move_on_switch

    def init_state(self, X0):
        return np.stack([0.5 * X0, 0.5 * X0])  # [clockwise, counter-clockwise]

    def step(self, state, t):
        p = self.p_switch
        cw, ccw = state
        if self.move_on_switch:
            return np.stack([
                np.roll((1 - p) * cw + p * ccw, 1, axis=0),
                np.roll((1 - p) * ccw + p * cw, -1, axis=0),
            ])
        return np.stack([
            (1 - p) * np.roll(cw, 1, axis=0) + p * ccw,
            (1 - p) * np.roll(ccw, -1, axis=0) + p * cw,
        ])

    def marginal(self, state):
        return state[0] + state[1]

    def describe(self) -> dict:
        return {**super().describe(), "m": self.m, "p_switch": self.p_switch,
                "move_on_switch": self.move_on_switch}


def induced_lift_graph(G: Graph, projection: Sequence[int]) -> Graph:
    """Lifted states are adjacent iff their base nodes are adjacent in ``G``."""
    proj = np.asarray(projection, dtype=int)
    return Graph(proj.size, G.adjacency[np.ix_(proj, proj)], name=f"lift of {G.name}")


class LiftedChain(EvolutionSystem):
    """Homogeneous chain ``M`` on a lifted space, observed through a projection.

    ``init[:, i]`` is the lifted distribution that a unit of mass at base
    node ``i`` starts in; it must project back onto node ``i``.
    """

    kind = "lifted"

    def __init__(self, lift_graph: Graph, M, projection, init, graph: Graph, pi=None, name: str = ""):
        super().__init__(graph, pi, name)
        N = lift_graph.n
        proj = np.asarray(projection, dtype=int)
        if proj.shape != (N,) or proj.min() < 0 or proj.max() >= self.n:
            raise InvalidInputError("projection must map every lifted state to a base node")
        if np.unique(proj).size != self.n:
            raise AxiomViolationError("projection is not surjective")
        try:
            M = as_stochastic(M, N)
        except InvalidInputError as exc:
            raise AxiomViolationError(f"lifted matrix: {exc}") from exc
        if not is_local(lift_graph, M):
            raise AxiomViolationError("lifted matrix has weight on a non-edge of the lift graph")
        R = np.zeros((self.n, N))
        R[proj, np.arange(N)] = 1.0
        J = np.array(init, dtype=float)
        if J.shape != (N, self.n) or J.min() < 0:
            raise InvalidInputError(f"init must be a non-negative ({N}, {self.n}) matrix")
        if not np.allclose(R @ J, np.eye(self.n), atol=SUM_TOL):
            raise AxiomViolationError("initial lifted states must project onto their base node")
        lifted_pi = J @ self.pi
        if np.abs(M @ lifted_pi - lifted_pi).sum() > SUM_TOL:
            raise AxiomViolationError("lifted image of the declared limit is not stationary")
        self.lift_graph = lift_graph
        self.M = M
        self.projection = proj
        self.R = R
        self.J = J

    def init_state(self, X0):
        return self.J @ X0

    def step(self, state, t):
        return self.M @ state

    def marginal(self, state):
        return self.R @ state

    def describe(self) -> dict:
        return {**super().describe(), "lifted_states": self.lift_graph.n}


def make_homogeneous(P, graph: Graph, pi=None) -> Homogeneous:
    return Homogeneous(P, graph, pi)


def make_inhomogeneous(schedule, graph: Graph, pi=None, period: int | None = None) -> Inhomogeneous:
    return Inhomogeneous(schedule, graph, pi, period)


def make_cesaro(P, graph: Graph, pi=None) -> Cesaro:
    return Cesaro(P, graph, pi)


def make_dhn(m: int, p_switch: float, move_on_switch: bool = False) -> DHNWalk:
    return DHNWalk(m, p_switch, move_on_switch)


def make_lifted(lift_graph: Graph, M, projection, init, graph: Graph, pi=None) -> LiftedChain:
    return LiftedChain(lift_graph, M, projection, init, graph, pi)


def _cycle_dhn_matrix(L: int, p: float, move_on_switch: bool) -> np.ndarray:
    """DHN transition matrix on lifted states ``2 * pos + dir`` of an ``L``-cycle."""
    M = np.zeros((2 * L, 2 * L))
    for pos in range(L):
        for d, sign in ((0, 1), (1, -1)):
            src = 2 * pos + d
            M[2 * ((pos + sign) % L) + d, src] += 1 - p
            other, osign = 1 - d, -sign
            dest = (pos + osign) % L if move_on_switch else pos
            M[2 * dest + other, src] += p
    return M


def dhn_as_lifted(m: int, p_switch: float, move_on_switch: bool = False) -> LiftedChain:
    """The DHN walk written as an explicit lifted chain."""
    G = make_graph("cycle", m)
    projection = np.repeat(np.arange(m), 2)
    init = np.zeros((2 * m, m))
    init[2 * np.arange(m), np.arange(m)] = 0.5
    init[2 * np.arange(m) + 1, np.arange(m)] = 0.5
    M = _cycle_dhn_matrix(m, p_switch, move_on_switch)
    return LiftedChain(induced_lift_graph(G, projection), M, projection, init, G, name="dhn-lifted")


def superimposed_cycle_walk(G: Graph, cycle: Sequence[int], p_switch: float) -> LiftedChain:
    """DHN walk along a closed node-visit sequence drawn over ``G``.

    The limit is the visit frequency of each node, uniform when every node
    appears equally often.
    """
    cycle = [int(v) for v in cycle]
    L = len(cycle)
    if L < 3:
        raise InvalidInputError("superimposed cycle needs at least 3 positions")
    for a, b in zip(cycle, cycle[1:] + cycle[:1]):
        if not (0 <= a < G.n and 0 <= b < G.n) or not G.adjacency[a, b]:
            raise InvalidInputError(f"cycle step {a} -> {b} is not an edge of {G.name or 'the graph'}")
    counts = np.bincount(cycle, minlength=G.n).astype(float)
    if (counts == 0).any():
        raise InvalidInputError("superimposed cycle must visit every node")
    projection = np.repeat(cycle, 2)
    init = np.zeros((2 * L, G.n))
    for pos, node in enumerate(cycle):
        init[2 * pos : 2 * pos + 2, node] = 0.5 / counts[node]
    M = _cycle_dhn_matrix(L, p_switch, move_on_switch=False)
    return LiftedChain(
        induced_lift_graph(G, projection), M, projection, init, G, counts / L,
        name=f"superimposed-cycle({L})",
    )


class StateDependent(EvolutionSystem):
    """Nonlinear chain ``X_{t+1} = P(X_t) X_t``; every emitted ``P`` is checked."""

    kind = "state_dependent"
    linear = False

    def __init__(self, rule: Callable[[np.ndarray], np.ndarray], graph: Graph, pi=None, name: str = ""):
        super().__init__(graph, pi, name)
        self.rule = rule

    def _checked(self, x: np.ndarray, t: int) -> np.ndarray:
        P = np.asarray(self.rule(x), dtype=float)
        try:
            P = as_stochastic(P, self.n)
        except InvalidInputError as exc:
            raise AxiomViolationError(f"step {t}: rule emitted a non-stochastic matrix ({exc})") from exc
        if not is_local(self.graph, P):
            raise AxiomViolationError(f"step {t}: rule emitted a non-local matrix")
        if not leaves_invariant(P, self.pi):
            raise AxiomViolationError(f"step {t}: rule emitted a matrix that moves the limit")
        return P

    def init_state(self, X0):
        return X0

    def step(self, state, t):
        return np.column_stack([self._checked(x, t) @ x for x in state.T])

    def marginal(self, state):
        return state


def make_state_dependent(rule, graph: Graph, pi=None) -> StateDependent:
    return StateDependent(rule, graph, pi)


def mixing_rule(A, B, node: int = 0) -> Callable[[np.ndarray], np.ndarray]:
    """``P(x) = x[node] * A + (1 - x[node]) * B``."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)

    def rule(x):
        w = float(np.clip(x[node], 0.0, 1.0))
        return w * A + (1.0 - w) * B

    return rule


def remote_edge_rule(G: Graph, edge: tuple[int, int], remote: int) -> Callable[[np.ndarray], np.ndarray]:
    """Lazy walk whose exchange across ``edge`` is set by the mass at ``remote``.

    The extra exchange is symmetric, so the uniform distribution stays fixed.
    """
    base = lazy_walk(G)
    a, b = edge
    if not G.adjacency[a, b] or a == b:
        raise InvalidInputError(f"({a}, {b}) is not an edge")
    room = min(base[a, a], base[b, b])

    def rule(x):
        w = room * float(np.clip(x[remote], 0.0, 1.0))
        P = base.copy()
        P[a, a] -= w
        P[b, b] -= w
        P[a, b] += w
        P[b, a] += w
        return P

    return rule


def lazy_walk(G: Graph) -> np.ndarray:
    """Lazy max-degree walk: stay with probability >= 1/2, uniform limit."""
    A = G.adjacency & ~np.eye(G.n, dtype=bool)
    dmax = max(int(A.sum(axis=0).max()), 1)
    Q = A / dmax
    Q[np.diag_indices(G.n)] = 1.0 - A.sum(axis=0) / dmax
    return 0.5 * (np.eye(G.n) + Q)


def averaging_matrix(n: int, pairs: Sequence[tuple[int, int]], weights=None) -> np.ndarray:
    """``I - sum_w w (e_i - e_j)(e_i - e_j)^T`` over disjoint pairs (symmetric)."""
    P = np.eye(n)
    weights = [0.5] * len(pairs) if weights is None else list(weights)
    used = set()
    for (i, j), w in zip(pairs, weights):
        if i in used or j in used:
            raise InvalidInputError("averaging pairs must be disjoint")
        used.update((i, j))
        P[i, i] -= w
        P[j, j] -= w
        P[i, j] += w
        P[j, i] += w
    return P


# --- probes -----------------------------------------------------------------

@dataclass
class ProbeResult:
    name: str
    passed: bool
    witness: dict | None = None
    max_error: float = 0.0

    def to_dict(self) -> dict:
        return {"passed": self.passed, "witness": self.witness, "max_error": self.max_error}


def _random_dist(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.dirichlet(np.full(n, 0.5))


def probe_linearity(sys: EvolutionSystem, trials: int = 20, rng=None, t_max: int = 50) -> ProbeResult:
    rng = np.random.default_rng(rng)
    worst = 0.0
    for _ in range(trials):
        x, y = _random_dist(rng, sys.n), _random_dist(rng, sys.n)
        p = float(rng.uniform())
        t = int(rng.integers(0, t_max + 1))
        batch = np.column_stack([x, y, p * x + (1 - p) * y])
        out = sys.evolve(batch, t)
        err = float(np.abs(out[:, 2] - (p * out[:, 0] + (1 - p) * out[:, 1])).sum())
        worst = max(worst, err)
        if err > PROBE_TOL:
            witness = {"x0": x.tolist(), "x0_tilde": y.tolist(), "p": p, "t": t, "error": err}
            return ProbeResult("linearity", False, witness, worst)
    return ProbeResult("linearity", True, None, worst)


def probe_locality(sys: EvolutionSystem, graph: Graph | None = None, trials: int | None = None,
                   rng=None, t_max: int = 50) -> ProbeResult:
    """Flow-certify consecutive marginals from Dirac starts."""
    G = sys.graph if graph is None else graph
    rng = np.random.default_rng(rng)
    trials = sys.n if trials is None else trials
    if trials >= sys.n:
        starts = np.arange(sys.n)
    else:
        starts = np.sort(rng.choice(sys.n, size=trials, replace=False))
    X0 = np.eye(sys.n)[:, starts]
    prev = None
    for t, X in enumerate(sys.trajectory(X0, t_max)):
        if prev is not None:
            for col, node in enumerate(starts):
                if not locality_holds_flow(prev[:, col], X[:, col], G):
                    return ProbeResult("locality", False, {"node": int(node), "t": t - 1})
        prev = X
    return ProbeResult("locality", True)


def probe_invariance(sys: EvolutionSystem, T: int = 100) -> ProbeResult:
    worst = 0.0
    for t, X in enumerate(sys.trajectory(sys.pi, T)):
        err = float(np.abs(X - sys.pi).sum())
        worst = max(worst, err)
        if err > PROBE_TOL:
            return ProbeResult("invariance", False, {"t": t, "error": err}, worst)
    return ProbeResult("invariance", True, None, worst)


# --- mixing time --------------------------------------------------------------

def tau_from_trace(d: np.ndarray, threshold: float = MIX_THRESHOLD) -> int | None:
    """Least ``t0`` with ``d[t] <= threshold`` on ``[t0, len(d) - 1]``; None if ``d[-1]`` exceeds it."""
    bad = np.flatnonzero(d > threshold + 1e-12)
    if bad.size == 0:
        return 0
    last = int(bad[-1])
    return None if last == d.size - 1 else last + 1


@dataclass
class MixingReport:
    tau: int | None
    horizon: int
    distances: np.ndarray = field(repr=False)
    worst_init: np.ndarray = field(repr=False)
    fragile: bool = False
    certified: bool = False
    dirac_only: bool = False
    cesaro_tau: int | None = None
    has_cesaro: bool = False
    notes: list[str] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return self.tau is not None

    def to_dict(self) -> dict:
        out = {
            "tau": self.tau,
            "converged": self.converged,
            "horizon": self.horizon,
            "horizon_fragile": self.fragile,
            "certified": self.certified,
            "final_distance": float(self.distances[-1]),
            "notes": list(self.notes),
        }
        if self.dirac_only:
            out["dirac_only_caveat"] = True
        if self.has_cesaro:
            out["cesaro_tau"] = self.cesaro_tau
        return out

    def trace_csv(self) -> str:
        lines = ["t,d,worst_init"]
        lines += [f"{t},{d!r},{w}" for t, (d, w) in enumerate(zip(self.distances.tolist(), self.worst_init.tolist()))]
        return "\n".join(lines) + "\n"


def mixing_time(sys: EvolutionSystem, horizon: int = 10**5, inits=None,
                cesaro_secondary: bool | None = None) -> MixingReport:
    """Worst-case L1 distance to the limit over Dirac starts, and the mixing time.

    ``tau`` is the first time after which the distance stays within 1/2 up to
    the horizon. Homogeneous chains with spectral gap get ``certified=True``:
    their worst-case distance cannot increase after the horizon.
    """
    if horizon < 1:
        raise InvalidInputError("horizon must be >= 1")
    X0 = np.eye(sys.n) if inits is None else np.asarray(inits, dtype=float)
    if X0.ndim == 1:
        X0 = X0[:, None]
    if cesaro_secondary is None:
        cesaro_secondary = sys.kind == "quantum"
    d = np.empty(horizon + 1)
    worst = np.empty(horizon + 1, dtype=np.int64)
    d_avg = np.empty(horizon + 1) if cesaro_secondary else None
    running = np.zeros(X0.shape)
    for t, X in enumerate(sys.trajectory(X0, horizon)):
        dist = np.abs(X - sys.pi[:, None]).sum(axis=0)
        k = int(np.argmax(dist))
        d[t], worst[t] = dist[k], k
        if d_avg is not None:
            running += X
            d_avg[t] = np.abs(running / (t + 1) - sys.pi[:, None]).sum(axis=0).max()
    tau = tau_from_trace(d)
    tail_start = horizon - int(np.ceil(0.1 * horizon)) + 1
    fragile = bool((d[tail_start:] > MIX_THRESHOLD + 1e-12).any())
    notes = ["tau measured up to a finite horizon"]
    certified = False
    if isinstance(sys, Homogeneous) and tau is not None:
        certified = sys.slem() < 1.0 - 1e-12
        if certified:
            notes.append("certified: spectral gap and non-increasing worst-case distance")
    report = MixingReport(tau, horizon, d, worst, fragile, certified, not sys.linear, notes=notes)
    if not sys.linear:
        report.notes.append("nonlinear system: distance taken over the supplied starts only")
    if d_avg is not None:
        report.cesaro_tau = tau_from_trace(d_avg)
        report.has_cesaro = True
        report.notes.append("cesaro_tau: mixing time of the time-averaged marginals")
    return report


# --- finite-time consensus ------------------------------------------------------

@dataclass
class FiniteTimeReport:
    length: int
    rank_one: bool
    eigenvalues: list[complex]
    phi: float | None = None
    bound: float | None = None
    satisfied: bool | None = None
    message: str = ""

    def to_dict(self) -> dict:
        return {
            "length": self.length,
            "rank_one": self.rank_one,
            "eigenvalue_moduli": sorted((abs(v) for v in self.eigenvalues), reverse=True),
            "phi": self.phi,
            "bound": self.bound,
            "satisfied": self.satisfied,
            "message": self.message,
        }


def _validate_symmetric_local(P, G: Graph, index: int) -> np.ndarray:
    try:
        P = as_stochastic(P, G.n)
    except InvalidInputError as exc:
        raise AxiomViolationError(f"matrix {index}: {exc}") from exc
    if not np.allclose(P, P.T, atol=1e-12):
        raise AxiomViolationError(f"matrix {index} is not symmetric")
    if not is_local(G, P):
        raise AxiomViolationError(f"matrix {index} is not local")
    return P


def product_is_rank_one(matrices: Sequence[np.ndarray], tol: float = 1e-7) -> tuple[bool, np.ndarray, np.ndarray]:
    prod = np.eye(matrices[0].shape[0])
    for P in matrices:
        prod = P @ prod
    eig = np.linalg.eigvals(prod)
    big = eig[np.abs(eig) > tol]
    ok = big.size == 1 and abs(big[0] - 1.0) < 1e-7
    ones = np.ones(prod.shape[0])
    ok = ok and np.allclose(prod @ ones, ones, atol=1e-7)
    return bool(ok), eig, prod


def finite_time_check(matrices: Sequence, G: Graph, phi: float | None = None) -> FiniteTimeReport:
    """Test whether the ordered product ``P_T ... P_1`` is rank one and compare ``T`` with ``1/(8 phi)``."""
    if not matrices:
        raise InvalidInputError("need at least one matrix")
    mats = [_validate_symmetric_local(P, G, k) for k, P in enumerate(matrices)]
    rank_one, eig, _ = product_is_rank_one(mats)
    report = FiniteTimeReport(len(mats), rank_one, eig.tolist())
    if not rank_one:
        report.message = "no finite-time certificate: product is not rank one"
        return report
    if phi is None:
        from localmix.conductance import phi_max

        phi = phi_max(G, uniform(G.n)).phi
    report.phi = float(phi)
    report.bound = 1.0 / (8.0 * phi) if phi > 0 else float("inf")
    report.satisfied = report.length >= report.bound - 1e-9
    report.message = f"rank-one after {report.length} matrices; bound 1/(8 phi) = {report.bound:.6g}"
    return report


def random_matching_matrix(G: Graph, rng: np.random.Generator) -> np.ndarray:
    """Symmetric local stochastic matrix averaging over a random matching."""
    edges = G.edges()
    order = rng.permutation(len(edges))
    used: set[int] = set()
    pairs, weights = [], []
    for k in order:
        i, j = edges[k]
        if i in used or j in used or rng.uniform() < 0.25:
            continue
        used.update((i, j))
        pairs.append((i, j))
        weights.append(0.5 if rng.uniform() < 0.5 else float(rng.uniform(0.0, 0.5)))
    return averaging_matrix(G.n, pairs, weights)


@dataclass
class FiniteTimeSearch:
    trials: int
    seed: int
    phi: float
    bound: float
    certificates: list[int]
    violations: list[int]

    @property
    def shortest(self) -> int | None:
        return min(self.certificates) if self.certificates else None

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "seed": self.seed,
            "phi": self.phi,
            "bound": self.bound,
            "certificates_found": len(self.certificates),
            "shortest_certificate": self.shortest,
            "violations": self.violations,
        }


def search_finite_time(G: Graph, trials: int = 1000, max_len: int = 4, seed: int = 0,
                       phi: float | None = None) -> FiniteTimeSearch:
    """Random search for short rank-one products of symmetric local matrices."""
    if phi is None:
        from localmix.conductance import phi_max

        phi = phi_max(G, uniform(G.n)).phi
    bound = 1.0 / (8.0 * phi)
    rng = np.random.default_rng(seed)
    certs, violations = [], []
    for _ in range(trials):
        length = int(rng.integers(1, max_len + 1))
        mats = [random_matching_matrix(G, rng) for _ in range(length)]
        if product_is_rank_one(mats)[0]:
            certs.append(length)
            if length < bound - 1e-9:
                violations.append(length)
    return FiniteTimeSearch(trials, seed, float(phi), bound, certs, violations)
