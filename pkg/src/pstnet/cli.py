"""Command-line entry point: ``pstnet {fidelity,pst,chain-synthesize,hitting,verify}``.

Exit codes: 0 success, 2 input error, 3 numerical failure, 4 verification failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .classical import hitting_growth_profile
from .dynamics import (
    column_space_deviations,
    commutator_norm,
    fidelity_scan,
    heisenberg_deviation,
    oracle_deviation,
)
from .exceptions import NumericalError, PSTError
from .graphs import Graph, column_partition, hypercube, path_graph, read_edge_list
from .spins import (
    CouplingChain,
    chain_hamiltonian,
    engineered_couplings,
    full_hamiltonian,
    heisenberg_fields,
)
from .transfer import transfer_report

EXIT_OK, EXIT_INPUT, EXIT_NUMERICAL, EXIT_VERIFY = 0, 2, 3, 4


class InputError(Exception):
    pass


@dataclass
class Network:
    graph: Graph
    hamiltonian: np.ndarray
    chain: CouplingChain | None
    label: str


def _network(args) -> Network:
    if args.path is not None:
        g = path_graph(args.path)
        return Network(g, g.adjacency(), CouplingChain.uniform(args.path) if args.path >= 2 else None, f"path {args.path}")
    if args.hypercube is not None:
        g = hypercube(args.hypercube, args.links)
        return Network(g, g.adjacency(), None, f"{args.links}-link hypercube d={args.hypercube}")
    if args.engineered is not None:
        chain = engineered_couplings(args.engineered, args.lam)
        return Network(path_graph(args.engineered), chain_hamiltonian(chain), chain,
                       f"engineered chain N={args.engineered} lambda={args.lam}")
    try:
        g = read_edge_list(args.edges)
    except OSError as exc:
        raise InputError(f"cannot read graph file: {exc}") from exc
    return Network(g, g.adjacency(), None, f"edge list {args.edges}")


def _add_graph_source(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--path", type=int, metavar="N", help="uniform chain of N qubits")
    src.add_argument("--hypercube", type=int, metavar="D", help="D-dimensional hypercube")
    src.add_argument("--engineered", type=int, metavar="N", help="engineered chain of N qubits")
    src.add_argument("--edges", metavar="FILE", help="edge-list file")
    p.add_argument("--links", type=int, default=1, choices=(1, 2), help="hypercube link count")
    p.add_argument("--lambda", dest="lam", type=float, default=2.0, help="engineered rotation rate")


def _add_output(p: argparse.ArgumentParser, formats, default) -> None:
    p.add_argument("--format", choices=formats, default=default)
    p.add_argument("--out", metavar="PATH", help="output file (default: stdout)")


def _positive(kind):
    def parse(text):
        value = kind(text)
        if not value > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return value
    return parse


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _key_value_csv(data: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])

    def walk(prefix, value):
        if isinstance(value, dict):
            for k, v in value.items():
                walk(f"{prefix}.{k}" if prefix else k, v)
        elif isinstance(value, list):
            w.writerow([prefix, ";".join(_fmt(v) for v in value)])
        else:
            w.writerow([prefix, _fmt(value)])

    walk("", data)
    return buf.getvalue()


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".17g")
    return "" if v is None else str(v)


def _json(data) -> str:
    return json.dumps(data, indent=2) + "\n"


def cmd_fidelity(args) -> int:
    net = _network(args)
    target = args.target if args.target is not None else net.graph.output_vertex
    source = args.source if args.source is not None else net.graph.input_vertex
    series = fidelity_scan(net.hamiltonian, args.tmax, args.samples, source, target, args.workers)
    if not np.all(np.isfinite(series.amplitudes)):
        raise NumericalError("non-finite amplitudes")
    _emit(series.to_csv() if args.format == "csv" else series.to_json() + "\n", args.out)
    return EXIT_OK


def cmd_pst(args) -> int:
    net = _network(args)
    report = transfer_report(net.graph, net.hamiltonian, args.tmax, args.samples, args.tol,
                             args.qmax, args.rational_tol, args.workers)
    data = report.to_dict()
    data["network"] = net.label
    if args.format == "table":
        text = f"{net.label}\n" + report.to_table()
    elif args.format == "csv":
        text = _key_value_csv(data)
    else:
        text = _json(data)
    _emit(text, args.out)
    return EXIT_OK


def cmd_chain_synthesize(args) -> int:
    chain = engineered_couplings(args.n, args.lam)
    fields = heisenberg_fields(chain) if chain.n >= 3 else None
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "J_n", "B_n"])
        for k in range(1, chain.n + 1):
            j = _fmt(chain.couplings[k - 1]) if k < chain.n else ""
            b = _fmt(fields.fields[k - 1]) if fields else ""
            w.writerow([k, j, b])
        text = buf.getvalue()
    else:
        text = _json({
            "chain": chain.to_dict(),
            "fields": fields.to_dict() if fields else None,
            "transfer_time": math.pi / chain.lam,
        })
    _emit(text, args.out)
    return EXIT_OK


def cmd_hitting(args) -> int:
    profile = hitting_growth_profile(args.dmax, args.links, args.convention)
    _emit(profile.to_csv() if args.format == "csv" else profile.to_json() + "\n", args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    net = _network(args)
    times = np.linspace(0.0, args.tmax, args.samples)
    model = args.model or ("none" if args.columns else "xx")
    checks = []

    def check(name, value, threshold):
        checks.append({"check": name, "value": value, "threshold": threshold, "pass": bool(value < threshold)})

    if args.columns:
        partition = column_partition(net.graph)
        leakage, mismatch = column_space_deviations(net.graph, partition, times)
        check("column_leakage", leakage, args.tol)
        check("column_chain_mismatch", mismatch, args.tol)
    if model == "xx":
        network = net.chain if net.chain is not None else net.graph
        check("subspace_vs_full_xx", oracle_deviation(network, times), args.tol)
        check("commutator_total_sz", commutator_norm(full_hamiltonian(network, "xx")), 1e-12)
    elif model == "heisenberg":
        if net.chain is None:
            raise InputError("the Heisenberg check needs a chain (--path or --engineered)")
        check("heisenberg_vs_xx_abs_F", heisenberg_deviation(net.chain, times), args.tol)
        check("commutator_total_sz", commutator_norm(full_hamiltonian(net.chain, "heisenberg")), 1e-12)

    if not checks:
        raise InputError("nothing to verify: choose --model xx|heisenberg or --columns")
    data = {"network": net.label, "times": [0.0, args.tmax, args.samples], "checks": checks,
            "pass": all(c["pass"] for c in checks)}
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["check", "value", "threshold", "pass"])
        for c in checks:
            w.writerow([c["check"], _fmt(c["value"]), _fmt(c["threshold"]), c["pass"]])
        text = buf.getvalue()
    else:
        text = _json(data)
    _emit(text, args.out)
    return EXIT_OK if data["pass"] else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pstnet", description="Perfect state transfer in XX spin networks.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fidelity", help="sample the transfer amplitude F(t)")
    _add_graph_source(p)
    p.add_argument("--tmax", type=_positive(float))
    p.add_argument("--samples", type=int)
    p.add_argument("--source", type=int)
    p.add_argument("--target", type=int)
    p.add_argument("--workers", type=_positive(int), default=1)
    _add_output(p, ("csv", "json"), "csv")
    p.set_defaults(func=cmd_fidelity)

    p = sub.add_parser("pst", help="find perfect-transfer times and test gap ratios")
    _add_graph_source(p)
    p.add_argument("--tmax", type=_positive(float))
    p.add_argument("--samples", type=int)
    p.add_argument("--tol", type=_positive(float), default=1e-9, help="PST declared when |F| >= 1 - tol")
    p.add_argument("--qmax", type=_positive(int), default=10**6)
    p.add_argument("--rational-tol", type=_positive(float), default=1e-9)
    p.add_argument("--workers", type=_positive(int), default=1)
    _add_output(p, ("json", "csv", "table"), "json")
    p.set_defaults(func=cmd_pst)

    p = sub.add_parser("chain-synthesize", help="engineered couplings and Heisenberg fields")
    p.add_argument("n", type=int, metavar="N")
    p.add_argument("--lambda", dest="lam", type=_positive(float), default=2.0)
    _add_output(p, ("json", "csv"), "json")
    p.set_defaults(func=cmd_chain_synthesize)

    p = sub.add_parser("hitting", help="classical hitting times on hypercubes")
    p.add_argument("--links", type=int, default=1, choices=(1, 2))
    p.add_argument("--dmax", type=_positive(int), default=12)
    p.add_argument("--convention", choices=("vertex", "edge"), default="vertex")
    _add_output(p, ("csv", "json"), "csv")
    p.set_defaults(func=cmd_hitting)

    p = sub.add_parser("verify", help="cross-check subspace dynamics against oracles")
    _add_graph_source(p)
    p.add_argument("--model", choices=("xx", "heisenberg", "none"),
                   help="many-body oracle to compare against (default: xx, or none with --columns)")
    p.add_argument("--columns", action="store_true", help="check column-space reduction")
    p.add_argument("--tmax", type=_positive(float), default=10.0)
    p.add_argument("--samples", type=int, default=21)
    p.add_argument("--tol", type=_positive(float), default=1e-10)
    _add_output(p, ("json", "csv"), "json")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "samples", None) is not None and args.samples < 2:
        print("pstnet: error: --samples must be >= 2", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except (InputError, NumericalError, PSTError, np.linalg.LinAlgError, FloatingPointError) as exc:
        code = EXIT_NUMERICAL if isinstance(exc, (NumericalError, np.linalg.LinAlgError, FloatingPointError)) else EXIT_INPUT
        print(f"pstnet: error: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
