"""Experiment runners behind the command-line interface."""

from __future__ import annotations

import io
import csv
from dataclasses import dataclass, field

import numpy as np

from localmix.conductance import phi_max, phi_upper_bound
from localmix.errors import InvalidInputError
from localmix.graphs import MAX_ENUM_NODES, Graph, make_graph
from localmix.lift import build_M, lifted_convergence_time, verify_simulation
from localmix.specs import build_system, dumbbell_cycle, graph_of
from localmix import systems


def conductance_for(G: Graph, pi) -> tuple[float, str]:
    """Exact LP conductance when enumeration is possible, otherwise an interval upper bound.

    An upper bound on the conductance only weakens ``1 / (8 phi)``, so bound
    checks stay sound.
    """
    if G.n <= MAX_ENUM_NODES:
        return phi_max(G, pi).phi, "lp"
    return phi_upper_bound(G, pi)[0], "subset-upper-bound"


@dataclass
class BoundReport:
    system: dict
    graph: dict
    tau: int | None
    horizon: int
    fragile: bool
    phi: float
    phi_source: str
    probes: dict[str, systems.ProbeResult]
    seed: int
    mixing: dict = field(default_factory=dict)

    @property
    def bound(self) -> float:
        return 1.0 / (8.0 * self.phi) if self.phi > 0 else float("inf")

    @property
    def applicable(self) -> bool:
        return all(p.passed for p in self.probes.values())

    @property
    def holds(self) -> bool | None:
        if not self.applicable:
            return None
        # an unconverged run still shows tau > horizon
        tau = self.horizon + 1 if self.tau is None else self.tau
        return tau >= self.bound - 1

    def to_dict(self) -> dict:
        return {
            "system": self.system,
            "graph": self.graph,
            "tau": self.tau,
            "horizon": self.horizon,
            "horizon_fragile": self.fragile,
            "phi": self.phi,
            "phi_source": self.phi_source,
            "bound": self.bound,
            "applicable": self.applicable,
            "holds": self.holds if self.applicable else "not applicable",
            "probes": {name: p.to_dict() for name, p in self.probes.items()},
            "mixing": self.mixing,
            "seed": self.seed,
        }


def verify_bound(sys: systems.EvolutionSystem, horizon: int = 10**5, seed: int = 0,
                 probe_trials: int = 20, probe_steps: int = 50) -> BoundReport:
    """Run the three probes, the conductance LP and the mixing time for one system."""
    rng = np.random.default_rng(seed)
    probes = {
        "linearity": systems.probe_linearity(sys, probe_trials, rng, probe_steps),
        "locality": systems.probe_locality(sys, rng=rng, t_max=probe_steps),
        "invariance": systems.probe_invariance(sys, 2 * probe_steps),
    }
    phi, source = conductance_for(sys.graph, sys.pi)
    mix = systems.mixing_time(sys, horizon)
    return BoundReport(
        system=sys.describe(),
        graph={"name": sys.graph.name, "n": sys.graph.n},
        tau=mix.tau,
        horizon=horizon,
        fragile=mix.fragile,
        phi=phi,
        phi_source=source,
        probes=probes,
        seed=seed,
        mixing=mix.to_dict(),
    )


def verify_bound_spec(spec: dict, graph: Graph | None = None, horizon: int = 10**5,
                      seed: int = 0) -> BoundReport:
    return verify_bound(build_system(spec, graph), horizon, seed)


def fitted_exponent(xs, ys) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.size < 2 or (ys <= 0).any():
        raise InvalidInputError("need at least two positive points to fit an exponent")
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


@dataclass
class ScalingTable:
    header: list[str]
    rows: list[list]
    exponents: dict[str, float]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.header)
        for row in self.rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "header": self.header,
            "rows": self.rows,
            "exponents": self.exponents,
        }


def _tau(sys, horizon: int) -> int:
    tau = systems.mixing_time(sys, horizon).tau
    if tau is None:
        raise InvalidInputError(f"{sys.name} did not mix within {horizon} steps")
    return tau


def dumbbell_scaling(ns=(4, 6, 8), horizon: int = 20000) -> ScalingTable:
    """Lazy walk versus the superimposed-cycle lifted walk on dumbbell(n)."""
    rows = []
    for n in ns:
        G = make_graph("dumbbell", n)
        rw = systems.make_homogeneous(systems.lazy_walk(G), G)
        cycle = dumbbell_cycle(n)
        lifted = systems.superimposed_cycle_walk(G, cycle, 1.0 / n)
        phi, _ = conductance_for(G, rw.pi)
        rows.append([n, _tau(rw, horizon), _tau(lifted, horizon), phi, 1.0 / (8.0 * phi)])
    exps = {
        "tau_rw": fitted_exponent(ns, [r[1] for r in rows]),
        "tau_lifted": fitted_exponent(ns, [r[2] for r in rows]),
    }
    return ScalingTable(["n", "tau_rw", "tau_lifted", "phi", "one_over_8phi"], rows, exps)


def dhn_scaling(ms=(16, 32, 64), horizon: int = 20000) -> ScalingTable:
    """DHN walk with switching probability 1/m against the lazy walk on cycle(m)."""
    rows = []
    for m in ms:
        G = make_graph("cycle", m)
        dhn = systems.make_dhn(m, 1.0 / m)
        rw = systems.make_homogeneous(systems.lazy_walk(G), G)
        phi, source = conductance_for(G, dhn.pi)
        rows.append([m, _tau(dhn, horizon), _tau(rw, horizon), phi, source])
    exps = {
        "tau_dhn": fitted_exponent(ms, [r[1] for r in rows]),
        "tau_lazy": fitted_exponent(ms, [r[2] for r in rows]),
    }
    return ScalingTable(["m", "tau_dhn", "tau_lazy", "phi", "phi_source"], rows, exps)


def lift_experiment(spec: dict, graph: Graph | None = None, tau: int | None = None,
                    horizon: int | None = None, seed: int = 0, checks: int = 5) -> dict:
    """Build the lifted chain for a system and check its convergence time and the simulation identity."""
    sys = build_system(spec, graph)
    if tau is None:
        tau = systems.mixing_time(sys, 10**4).tau
        if tau is None:
            raise InvalidInputError("system did not mix; pass tau explicitly")
    tau = max(int(tau), 1)
    lc = build_M(sys, tau)
    G = graph_of(spec, graph)
    phi, source = conductance_for(G, sys.pi)
    conv = lifted_convergence_time(lc, max(horizon or 0, 4 * tau), phi)
    rng = np.random.default_rng(seed)
    sims = [verify_simulation(lc, sys, rng.dirichlet(np.ones(sys.n)), 3 * tau) for _ in range(checks)]
    return {
        "lifted_chain": lc.to_dict(),
        "convergence": conv.to_dict(),
        "phi_source": source,
        "simulation": {
            "checks": checks,
            "passed": all(s.passed for s in sims),
            "max_deviation": max(s.max_deviation for s in sims),
        },
        "seed": seed,
    }
