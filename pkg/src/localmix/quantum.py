"""Unitary coined quantum walks with density-matrix state.

Lifted basis index ``2 * node + coin``; coin 0 moves clockwise (``i -> i+1``),
coin 1 counter-clockwise. One step applies the coin on every node and then
the conditional shift, ``U = S (I (x) C)``. Initial states are mixtures of
per-node pure states, so an initial distribution never carries coherences
between different nodes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from localmix.errors import InvalidInputError, UnsupportedFamilyError
from localmix.graphs import Graph, make_graph
from localmix.systems import EvolutionSystem

UNITARY_TOL = 1e-10
HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-9

HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
# balanced coin state; (|0> + |1>)/sqrt(2) would be a Hadamard eigen-direction
BALANCED_COIN = np.array([1.0, 1.0j]) / np.sqrt(2.0)


def check_density(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidInputError("density matrix must be square")
    if np.abs(rho - rho.conj().T).max() > HERMITIAN_TOL:
        raise InvalidInputError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > TRACE_TOL:
        raise InvalidInputError(f"density matrix has trace {np.trace(rho).real:.12g}")
    if np.linalg.eigvalsh(rho).min() < -TRACE_TOL:
        raise InvalidInputError("density matrix has a negative eigenvalue")
    return rho


@dataclass(frozen=True, eq=False)
class UnitaryWalk:
    """Local unitary on a lifted basis; ``partition[a]`` is the base node of basis state ``a``."""

    U: np.ndarray
    partition: np.ndarray
    graph: Graph

    def __post_init__(self) -> None:
        U = np.asarray(self.U, dtype=complex)
        part = np.asarray(self.partition, dtype=int)
        d = part.size
        if U.shape != (d, d):
            raise InvalidInputError(f"unitary must be {d}x{d}")
        if np.abs(U.conj().T @ U - np.eye(d)).max() > UNITARY_TOL:
            raise InvalidInputError("matrix is not unitary")
        allowed = self.graph.adjacency[np.ix_(part, part)]
        if np.abs(U[~allowed]).max(initial=0.0) > UNITARY_TOL:
            raise InvalidInputError("unitary moves amplitude along a non-edge")
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "partition", part)

    @property
    def dim(self) -> int:
        return self.partition.size


def qw_step(rho: np.ndarray, walk: UnitaryWalk) -> np.ndarray:
    """``U rho U^dagger``, re-Hermitised; accepts a stack of density matrices."""
    U = walk.U
    out = U @ rho @ U.conj().T
    return 0.5 * (out + np.swapaxes(out.conj(), -1, -2))


def marginals(rho: np.ndarray, walk: UnitaryWalk) -> np.ndarray:
    """Node occupation probabilities; shape ``(n,)`` or ``(n, k)`` for a stack."""
    diag = np.real(np.diagonal(rho, axis1=-2, axis2=-1))
    n = walk.graph.n
    if diag.ndim == 1:
        return np.bincount(walk.partition, weights=diag, minlength=n)
    out = np.zeros((n, diag.shape[0]))
    np.add.at(out, walk.partition, diag.T)
    return out


def coined_cycle_unitary(m: int, coin) -> np.ndarray:
    coin = np.asarray(coin, dtype=complex)
    if coin.shape != (2, 2) or np.abs(coin.conj().T @ coin - np.eye(2)).max() > UNITARY_TOL:
        raise InvalidInputError("coin must be a 2x2 unitary")
    S = np.zeros((2 * m, 2 * m))
    for i in range(m):
        S[2 * ((i + 1) % m), 2 * i] = 1.0
        S[2 * ((i - 1) % m) + 1, 2 * i + 1] = 1.0
    return S @ np.kron(np.eye(m), coin)


class QuantumWalkSystem(EvolutionSystem):
    """Unitary walk observed through node marginals.

    Each base node ``i`` starts in the pure state ``|i> (x) coin_state``; a
    distribution ``X0`` starts in the mixture ``sum_i X0(i) |psi_i><psi_i|``.
    """

    kind = "quantum"

    def __init__(self, walk: UnitaryWalk, coin_state=BALANCED_COIN, name: str = ""):
        super().__init__(walk.graph, None, name)
        self.walk = walk
        coin_state = np.asarray(coin_state, dtype=complex)
        counts = np.bincount(walk.partition, minlength=self.n)
        if (counts != coin_state.size).any():
            raise InvalidInputError("every node needs one amplitude per coin value")
        self.coin_state = coin_state / np.linalg.norm(coin_state)
        psi = np.zeros((self.n, walk.dim), dtype=complex)
        for i in range(self.n):
            psi[i, walk.partition == i] = self.coin_state
        self.node_states = psi  # row i = |psi_i>

    def init_state(self, X0):
        # rho_k = sum_i X0[i, k] |psi_i><psi_i|
        return np.einsum("ik,ia,ib->kab", X0, self.node_states, self.node_states.conj())

    def initial_density(self, rho) -> np.ndarray:
        """Validate a user-supplied initial state; coherences between nodes are rejected."""
        rho = check_density(rho)
        part = self.walk.partition
        off_block = part[:, None] != part[None, :]
        if np.abs(rho[off_block]).max(initial=0.0) > HERMITIAN_TOL:
            raise InvalidInputError("initial state has coherences between different nodes")
        return rho

    def step(self, state, t):
        return qw_step(state, self.walk)

    def marginal(self, state):
        return marginals(state, self.walk)

    def pure_marginals(self, X0, steps: int) -> list[np.ndarray]:
        """Amplitude-vector simulation of the same initial mixture (reference path)."""
        X0 = np.asarray(X0, dtype=float)
        psi = self.node_states.T.copy()  # column i = |psi_i>
        out = []
        for t in range(steps + 1):
            probs = np.abs(psi) ** 2  # (dim, n)
            per_node = np.zeros((self.n, self.n))
            for a, node in enumerate(self.walk.partition):
                per_node[node] += probs[a]
            out.append(per_node @ X0)
            psi = self.walk.U @ psi
        return out


def make_coined_walk(G: Graph, coin=HADAMARD, coin_state=BALANCED_COIN) -> QuantumWalkSystem:
    """Coined walk on a cycle graph; other families are not supported."""
    m = G.n
    if m < 3 or G != make_graph("cycle", m):
        raise UnsupportedFamilyError("coined walks are implemented for cycle graphs only")
    walk = UnitaryWalk(coined_cycle_unitary(m, coin), np.repeat(np.arange(m), 2), G)
    return QuantumWalkSystem(walk, coin_state, name=f"coined-cycle({m})")


def coin_from_pairs(pairs) -> np.ndarray:
    """Coin from the JSON form ``[[re, im], [re, im], [re, im], [re, im]]`` (row-major)."""
    arr = np.asarray(pairs, dtype=float)
    if arr.shape != (4, 2):
        raise InvalidInputError("coin must be four [re, im] pairs")
    return (arr[:, 0] + 1j * arr[:, 1]).reshape(2, 2)
