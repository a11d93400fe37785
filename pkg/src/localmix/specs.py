"""JSON system specifications and the bundled example files.

A spec is a dict with a ``kind`` key::

    {"kind": "homogeneous", "graph": {"family": "dumbbell", "size": 6}, "matrix": "lazy"}
    {"kind": "inhomogeneous", "graph": ..., "matrices": ["lazy", {"averaging": [[0, 1]]}]}
    {"kind": "cesaro", "graph": ..., "matrix": "lazy"}
    {"kind": "dhn", "m": 32, "p_switch": 0.125}
    {"kind": "lifted", "graph": ..., "cycle": "dumbbell:6", "p_switch": 0.1667}
    {"kind": "state_dependent", "graph": ..., "rule": "mixing", "matrices": [A, B], "node": 0}
    {"kind": "coined_cycle", "m": 4, "coin": [[re, im], [re, im], [re, im], [re, im]]}

Matrix items are nested lists, one of ``"lazy"``, ``"identity"``,
``"uniform"``, or ``{"averaging": [[i, j], ...], "weights": [...]}`` /
``{"shift": k}`` or a convex combination ``{"combine": [[w, item], ...]}``.
"""

from __future__ import annotations

import json
from importlib import resources

import numpy as np

from localmix.errors import InvalidInputError
from localmix.graphs import Graph, make_graph
from localmix.prob import shift_matrix
from localmix import quantum, systems


def bundled_path(name: str):
    return resources.files("localmix") / "data" / name


def load_bundled(name: str) -> dict:
    return json.loads(bundled_path(name).read_text(encoding="utf-8"))


def dumbbell_cycle(n: int) -> list[int]:
    """Superimposed 4n-cycle over dumbbell(n), read from the bundled data file."""
    cycles = load_bundled("dumbbell_cycles.json")["cycles"]
    if str(n) not in cycles:
        raise InvalidInputError(f"no bundled superimposed cycle for dumbbell({n})")
    return cycles[str(n)]


def bundled_system_specs() -> dict[str, dict]:
    folder = bundled_path("systems")
    out = {}
    for entry in sorted(folder.iterdir(), key=lambda p: p.name):
        if entry.name.endswith(".json"):
            out[entry.name[:-5]] = json.loads(entry.read_text(encoding="utf-8"))
    return out


def resolve_matrix(item, G: Graph) -> np.ndarray:
    if isinstance(item, str):
        if item == "lazy":
            return systems.lazy_walk(G)
        if item == "identity":
            return np.eye(G.n)
        if item == "uniform":
            return np.full((G.n, G.n), 1.0 / G.n)
        raise InvalidInputError(f"unknown matrix keyword {item!r}")
    if isinstance(item, dict):
        if "averaging" in item:
            pairs = [tuple(p) for p in item["averaging"]]
            return systems.averaging_matrix(G.n, pairs, item.get("weights"))
        if "shift" in item:
            return shift_matrix(G.n, int(item["shift"]))
        if "combine" in item:
            return sum(float(w) * resolve_matrix(sub, G) for w, sub in item["combine"])
        raise InvalidInputError(f"unknown matrix item {sorted(item)}")
    return np.asarray(item, dtype=float)


def graph_of(spec: dict, graph: Graph | None = None) -> Graph:
    kind = spec.get("kind")
    if kind == "dhn":
        return make_graph("cycle", int(spec["m"]))
    if kind == "coined_cycle":
        return make_graph("cycle", int(spec["m"]))
    if graph is not None:
        return graph
    if "graph" not in spec:
        raise InvalidInputError(f"{kind} spec needs a graph")
    return Graph.from_dict(spec["graph"])


def build_system(spec: dict, graph: Graph | None = None) -> systems.EvolutionSystem:
    """Instantiate the system described by ``spec``; ``graph`` overrides ``spec['graph']``."""
    kind = spec.get("kind")
    G = graph_of(spec, graph)
    pi = spec.get("pi")
    if kind == "homogeneous":
        return systems.make_homogeneous(resolve_matrix(spec["matrix"], G), G, pi)
    if kind == "inhomogeneous":
        mats = [resolve_matrix(m, G) for m in spec["matrices"]]
        return systems.make_inhomogeneous(mats, G, pi, spec.get("period"))
    if kind == "cesaro":
        return systems.make_cesaro(resolve_matrix(spec["matrix"], G), G, pi)
    if kind == "dhn":
        return systems.make_dhn(int(spec["m"]), float(spec["p_switch"]),
                                bool(spec.get("move_on_switch", False)))
    if kind == "lifted":
        if "cycle" in spec:
            cycle = spec["cycle"]
            if isinstance(cycle, str):
                family, _, size = cycle.partition(":")
                if family != "dumbbell":
                    raise InvalidInputError(f"no bundled cycles for {family!r}")
                cycle = dumbbell_cycle(int(size))
            p = float(spec.get("p_switch", 4.0 / len(cycle)))
            return systems.superimposed_cycle_walk(G, cycle, p)
        proj = spec["projection"]
        lift_graph = systems.induced_lift_graph(G, proj)
        return systems.make_lifted(lift_graph, np.asarray(spec["matrix"], dtype=float), proj,
                                   np.asarray(spec["init"], dtype=float), G, pi)
    if kind == "state_dependent":
        rule_name = spec.get("rule", "mixing")
        if rule_name == "mixing":
            A, B = (resolve_matrix(m, G) for m in spec["matrices"])
            rule = systems.mixing_rule(A, B, int(spec.get("node", 0)))
        elif rule_name == "remote_edge":
            rule = systems.remote_edge_rule(G, tuple(spec["edge"]), int(spec["remote"]))
        else:
            raise InvalidInputError(f"unknown state-dependent rule {rule_name!r}")
        return systems.make_state_dependent(rule, G, pi)
    if kind == "coined_cycle":
        coin = quantum.coin_from_pairs(spec["coin"]) if "coin" in spec else quantum.HADAMARD
        return quantum.make_coined_walk(G, coin)
    raise InvalidInputError(f"unknown system kind {kind!r}")
