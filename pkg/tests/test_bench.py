import numpy as np
import pytest

from localmix import bench, make_graph
from localmix.errors import InvalidInputError
from localmix.specs import build_system, bundled_system_specs, dumbbell_cycle, resolve_matrix
from localmix.systems import lazy_walk


def test_every_bundled_spec_builds():
    specs = bundled_system_specs()
    assert len(specs) >= 7
    for name, spec in specs.items():
        system = build_system(spec)
        assert system.n <= 12, name


def test_bundled_cycles_are_walks_visiting_each_node_twice():
    for n in range(2, 9):
        G = make_graph("dumbbell", n)
        cyc = dumbbell_cycle(n)
        assert len(cyc) == 4 * n
        assert np.bincount(cyc, minlength=2 * n).tolist() == [2] * (2 * n)
        assert all(G.adjacency[a, b] for a, b in zip(cyc, cyc[1:] + cyc[:1]))
    with pytest.raises(InvalidInputError):
        dumbbell_cycle(40)


def test_matrix_keywords():
    G = make_graph("path", 3)
    assert np.allclose(resolve_matrix("lazy", G), lazy_walk(G))
    comb = resolve_matrix({"combine": [[0.5, "identity"], [0.5, "lazy"]]}, G)
    assert np.allclose(comb, 0.5 * np.eye(3) + 0.5 * lazy_walk(G))
    assert np.allclose(resolve_matrix({"shift": 1}, make_graph("cycle", 3)) @ [1, 0, 0], [0, 1, 0])
    with pytest.raises(InvalidInputError):
        resolve_matrix("nonsense", G)
    with pytest.raises(InvalidInputError):
        build_system({"kind": "teleport", "graph": {"family": "path", "size": 3}})


def test_bound_report_gating():
    spec = bundled_system_specs()["state_dependent_dumbbell4"]
    rep = bench.verify_bound_spec(spec, horizon=500)
    assert not rep.applicable and rep.holds is None
    assert rep.to_dict()["holds"] == "not applicable"
    assert not rep.probes["linearity"].passed


def test_bound_report_for_lazy_dumbbell():
    rep = bench.verify_bound_spec(bundled_system_specs()["lazy_dumbbell6"], horizon=500)
    assert rep.applicable and rep.holds
    assert rep.phi <= 1 / 6 + 1e-7
    assert rep.tau >= 6 / 8 - 1


def test_dhn_cycle32_bound_uses_subset_fallback():
    rep = bench.verify_bound_spec({"kind": "dhn", "m": 32, "p_switch": 0.125}, horizon=1000)
    assert rep.phi_source == "subset-upper-bound" and rep.holds


def test_fitted_exponent():
    assert bench.fitted_exponent([2, 4, 8], [3, 12, 48]) == pytest.approx(2.0)
    with pytest.raises(InvalidInputError):
        bench.fitted_exponent([2], [1])


def test_scaling_table_csv():
    table = bench.ScalingTable(["a", "b"], [[1, 0.5]], {"b": 1.0})
    assert table.to_csv() == "a,b\n1,0.5\n"
