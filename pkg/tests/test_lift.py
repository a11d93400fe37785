import numpy as np
import pytest
import scipy.sparse as sp

from localmix import make_graph
from localmix.errors import AxiomViolationError, InvalidInputError
from localmix.lift import (LiftedChain, build_M, lifted_convergence_time, project_lifted, squiggle, v_init,
                           verify_simulation)
from localmix.prob import dirac, shift_matrix, uniform
from localmix import systems as S


def _lazy(family, size):
    G = make_graph(family, size)
    return S.make_homogeneous(S.lazy_walk(G), G)


def test_v_init_and_projection():
    lc = build_M(_lazy("path", 3), 2)
    v = v_init(dirac(1, 3), lc)
    assert v[lc.index(1, 0, 1)] == 1.0 and v.sum() == 1.0
    x = np.array([0.2, 0.3, 0.5])
    assert np.allclose(project_lifted(v_init(x, lc), lc), x)
    assert np.allclose(project_lifted(np.full(lc.dim, 1 / lc.dim), lc), uniform(3))


def test_squiggle_of_homogeneous_is_unchanged():
    chain = _lazy("cycle", 5)
    x = np.random.default_rng(0).dirichlet(np.ones(5))
    for t in (0, 3, 7, 12):
        assert np.allclose(squiggle(chain, 3).evolve(x, t), chain.evolve(x, t))


def test_squiggle_of_cesaro_applies_the_block_map_twice():
    G = make_graph("cycle", 4)
    ces = S.make_cesaro(S.lazy_walk(G), G)
    x = dirac(0, 4)
    tau = 3
    once = ces.evolve(x, tau)
    assert np.allclose(squiggle(ces, tau).evolve(x, 2 * tau), ces.evolve(once, tau))
    assert np.allclose(squiggle(ces, 1).evolve(x, 2), ces.evolve(ces.evolve(x, 1), 1))


def test_tau_one_has_only_wraparound_blocks():
    chain = _lazy("complete", 3)
    lc = build_M(chain, 1)
    M = lc.M.toarray()
    for i in range(3):
        for j in range(3):
            # (i, 0, j) -> (k, 0, k); only the column of the start node carries mass,
            # the others default to staying put
            for k in range(3):
                expected = chain.P[k, i] if j == i else float(k == j)
                assert M[lc.index(k, 0, k), lc.index(i, 0, j)] == pytest.approx(expected)


def test_structure_of_M():
    lc = build_M(S.make_dhn(5, 0.25), 4)
    M = lc.M.toarray()
    assert np.allclose(M.sum(axis=0), 1.0)
    G = make_graph("cycle", 5)
    n, tau = 5, 4
    for col in range(lc.dim):
        i, rest = divmod(col, tau * n)
        t, j = divmod(rest, n)
        for row in np.flatnonzero(M[:, col]):
            i2, rest2 = divmod(row, tau * n)
            t2, j2 = divmod(rest2, n)
            assert G.adjacency[j2, j]
            if t < tau - 1:
                assert (i2, t2) == (i, t + 1)
            else:
                assert (i2, t2) == (j2, 0)


@pytest.mark.parametrize("make,tau", [
    (lambda: _lazy("dumbbell", 3), 11),
    (lambda: S.make_dhn(5, 0.25), 4),
    (lambda: S.make_cesaro(S.lazy_walk(make_graph("cycle", 4)), make_graph("cycle", 4)), 4),
])
def test_simulation_identity(make, tau):
    system = make()
    lc = build_M(system, tau)
    rng = np.random.default_rng(0)
    for _ in range(4):
        check = verify_simulation(lc, system, rng.dirichlet(np.ones(system.n)), 3 * tau)
        assert check.passed and check.max_deviation < 1e-8


def test_corrupted_M_is_caught():
    system = _lazy("path", 3)
    lc = build_M(system, 3)
    M = lc.M.tolil()
    src = lc.index(0, 1, 0)
    col = M[:, src].toarray().ravel()
    dst = int(np.flatnonzero(col)[0])
    M[dst, src] = col[dst] - 0.1
    M[lc.index(0, 2, 2), src] = 0.1
    bad = LiftedChain(lc.tau, lc.n, sp.csr_matrix(M), lc.pi)
    check = verify_simulation(bad, system, dirac(0, 3), 6)
    assert not check.passed and check.first_failure == 2


def test_non_local_system_is_rejected():
    class Jump(S.EvolutionSystem):
        def init_state(self, X0):
            return X0

        def step(self, state, t):
            return state[::-1]

        def marginal(self, state):
            return state

    with pytest.raises(AxiomViolationError, match="step 0"):
        build_M(Jump(make_graph("path", 4)), 2)


def test_lifted_convergence_on_small_instances():
    lc = build_M(S.make_homogeneous(np.full((3, 3), 1 / 3), make_graph("complete", 3)), 1)
    conv = lifted_convergence_time(lc, 10, phi=1.0)
    assert conv.tau_M <= 2 and conv.within_twice_tau and conv.above_conductance_floor

    lc = build_M(_lazy("dumbbell", 3), 11)
    conv = lifted_convergence_time(lc, 44, phi=0.2)
    assert conv.tau_M <= 22 and conv.tau_M >= 1 / (4 * 0.2) - 1


def test_horizon_must_cover_twice_tau():
    lc = build_M(_lazy("path", 3), 3)
    with pytest.raises(InvalidInputError):
        lifted_convergence_time(lc, 5)


def test_json_round_trip():
    lc = build_M(S.make_dhn(4, 0.5), 2)
    data = lc.to_dict()
    assert data["index_order"].startswith("((start")
    back = LiftedChain.from_dict(data)
    assert (back.M != lc.M).nnz == 0 and back.tau == 2


def test_shift_system_lifts_exactly():
    G = make_graph("cycle", 4)
    rot = S.make_homogeneous(shift_matrix(4), G)
    lc = build_M(rot, 2)
    assert verify_simulation(lc, rot, dirac(1, 4), 6).passed
