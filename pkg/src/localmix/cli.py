"""Command-line entry point: ``localmix <subcommand> [options]``.

Every subcommand writes JSON (or CSV where noted) to stdout or ``--out``.
Outputs depend only on the inputs and ``--seed``; nothing time-dependent is
recorded, so repeated runs are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from localmix import bench, systems
from localmix.conductance import phi_max, phi_of
from localmix.errors import InvalidInputError, LocalMixError
from localmix.flow import certify_step
from localmix.graphs import Graph, parse_graph_arg
from localmix.prob import as_dist, matrix_from_csv, matrix_to_csv, uniform
from localmix.specs import build_system, bundled_system_specs, graph_of

DEFAULT_HORIZON = 10_000


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(data) -> str:
    return json.dumps(data, sort_keys=True, indent=2, default=_json_default) + "\n"


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path} is not valid JSON: {exc.msg} (line {exc.lineno})") from exc


def load_graph(arg: str | None) -> Graph | None:
    """``family:size`` or a JSON file holding ``{"n", "edges"}`` / ``{"family", "size"}``."""
    if arg is None:
        return None
    if Path(arg).is_file():
        return Graph.from_dict(_read_json(arg))
    return parse_graph_arg(arg)


def load_system_spec(arg: str) -> dict:
    """A JSON file path or the name of a bundled spec."""
    if Path(arg).is_file():
        return _read_json(arg)
    bundled = bundled_system_specs()
    if arg in bundled:
        return bundled[arg]
    raise InvalidInputError(f"{arg!r} is neither a file nor a bundled system ({', '.join(bundled)})")


def load_pi(arg: str | None, n: int) -> np.ndarray:
    if arg is None:
        return uniform(n)
    data = _read_json(arg)
    if isinstance(data, dict):
        data = data.get("pi")
    return as_dist(data, n)


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


# --- subcommands ----------------------------------------------------------------

def cmd_verify_bound(args) -> int:
    spec = load_system_spec(args.system)
    G = load_graph(args.graph)
    if args.pi is not None:
        spec = {**spec, "pi": load_pi(args.pi, graph_of(spec, G).n).tolist()}
    system = build_system(spec, G)
    report = bench.verify_bound(system, args.horizon, args.seed)
    _emit(dumps(report.to_dict()), args.out)
    if args.trace:
        trace = systems.mixing_time(system, args.horizon)
        Path(args.trace).write_text(trace.trace_csv(), encoding="utf-8")
    return 1 if report.holds is False else 0


def cmd_conductance(args) -> int:
    G = load_graph(args.graph)
    if G is None:
        raise InvalidInputError("conductance needs --graph")
    pi = load_pi(args.pi, G.n)
    out = phi_max(G, pi).to_dict()
    if args.matrix:
        P = matrix_from_csv(Path(args.matrix).read_text(encoding="utf-8"))
        own = phi_of(P, pi, G)
        out["matrix_phi"] = own.phi
        out["matrix_argmin_subset"] = sorted(own.argmin_subset)
    out["graph"] = G.to_dict()
    out["pi"] = pi.tolist()
    _emit(dumps(out), args.out)
    return 0


def cmd_extract(args) -> int:
    data = _read_json(args.input)
    G = load_graph(args.graph)
    if G is None:
        if "graph" not in data:
            raise InvalidInputError("extract needs a graph in the input JSON or via --graph")
        G = Graph.from_dict(data["graph"])
    cert = certify_step(data["Y"], data["Z"], G)
    _emit(dumps(cert.to_dict()), args.out)
    if args.matrix_csv and cert.matrix is not None:
        Path(args.matrix_csv).write_text(matrix_to_csv(cert.matrix), encoding="utf-8")
    return 0


def cmd_lift_build(args) -> int:
    spec = load_system_spec(args.system)
    result = bench.lift_experiment(spec, load_graph(args.graph), args.tau, args.horizon, args.seed)
    _emit(dumps(result), args.out)
    return 0


def _table_out(table: bench.ScalingTable, fmt: str, out: str | None) -> None:
    _emit(table.to_csv() if fmt == "csv" else dumps(table.to_dict()), out)


def cmd_dumbbell_scaling(args) -> int:
    table = bench.dumbbell_scaling(tuple(args.ns), args.horizon)
    _table_out(table, args.format, args.out)
    return 0


def cmd_dhn_demo(args) -> int:
    table = bench.dhn_scaling(tuple(args.ms), args.horizon)
    _table_out(table, args.format, args.out)
    return 0


def cmd_finite_time(args) -> int:
    G = load_graph(args.graph)
    if args.matrices:
        mats = [np.asarray(m, dtype=float) for m in _read_json(args.matrices)]
        if G is None:
            raise InvalidInputError("finite-time with --matrices needs --graph")
        report = systems.finite_time_check(mats, G).to_dict()
    else:
        if G is None:
            raise InvalidInputError("finite-time needs --graph")
        search = systems.search_finite_time(G, args.trials, args.max_len, args.seed)
        report = search.to_dict()
    report["graph"] = G.to_dict()
    _emit(dumps(report), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="localmix", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--out", help="write output here instead of stdout")
        p.add_argument("--seed", type=int, default=0)
        p.set_defaults(func=func)
        return p

    p = add("verify-bound", cmd_verify_bound, "probe a system and compare tau with 1/(8 phi)")
    p.add_argument("--system", required=True, help="JSON spec file or bundled system name")
    p.add_argument("--graph", help="override the spec's graph (file or family:size)")
    p.add_argument("--pi", help="override the spec's limit distribution")
    p.add_argument("--horizon", type=int, default=DEFAULT_HORIZON)
    p.add_argument("--trace", help="also write the worst-case distance trace as CSV")

    p = add("conductance", cmd_conductance, "maximal conductance over local matrices fixing pi")
    p.add_argument("--graph", required=True)
    p.add_argument("--pi", help="JSON list (or {\"pi\": [...]}); uniform if omitted")
    p.add_argument("--matrix", help="CSV matrix whose own conductance is also reported")

    p = add("extract", cmd_extract, "certify one step Y -> Z and extract a local matrix")
    p.add_argument("--input", required=True, help="JSON with keys Y, Z and optionally graph")
    p.add_argument("--graph")
    p.add_argument("--matrix-csv", help="write the extracted matrix as CSV")

    p = add("lift-build", cmd_lift_build, "build the clocked lifted chain of a system")
    p.add_argument("--system", required=True)
    p.add_argument("--graph")
    p.add_argument("--tau", type=int, help="clock period; measured mixing time if omitted")
    p.add_argument("--horizon", type=int, default=None)

    p = add("dumbbell-scaling", cmd_dumbbell_scaling, "lazy walk vs lifted cycle on dumbbells")
    p.add_argument("--ns", type=int, nargs="+", default=[4, 6, 8])
    p.add_argument("--horizon", type=int, default=20_000)
    p.add_argument("--format", choices=["csv", "json"], default="csv")

    p = add("dhn-demo", cmd_dhn_demo, "persistent walk vs lazy walk on cycles")
    p.add_argument("--ms", type=int, nargs="+", default=[16, 32, 64])
    p.add_argument("--horizon", type=int, default=20_000)
    p.add_argument("--format", choices=["csv", "json"], default="csv")

    p = add("finite-time", cmd_finite_time, "search for rank-one products of symmetric local matrices")
    p.add_argument("--graph", required=True)
    p.add_argument("--matrices", help="JSON list of matrices to check instead of searching")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--max-len", type=int, default=4)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except LocalMixError as exc:
        sys.stderr.write(f"localmix {args.command}: {exc}\n")
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
