"""Command-line front end and JSON reports.

Subcommands: constant, verify, optimal, optimize, compare, magnon, export.
Exit codes: 0 ok, 1 bound failure or numerical failure, 2 usage error.
The SPINBOUND_THREADS environment variable sets how many sectors are solved
in parallel.
"""

import argparse
import csv
import json
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .bounds import (
    baerwinkel_bound,
    closed_form_constant,
    compare_bounds,
    open_constant,
    periodic_constant,
)
from .graphs import LatticeSpec, build_lattice
from .io import export_operator, load_edge_list, save_assignment
from .operators import delta_hamiltonian, delta_spin_squared, magnon_state, sector_basis
from .spectral import ConvergenceError, certify_inequality, optimal_constant
from .weights import OptimizeParams, assignment_constant, optimize_weights, uniform_assignment


@dataclass
class CommandConfig:
    """Validated command description; exactly one graph source."""

    subcommand: str
    lattice: str = None
    boundary: str = "periodic"
    edges_path: str = None
    coupling: float = 1.0
    tol: float = 1e-9
    method: str = "auto"
    seed: int = 7
    json_path: str = None
    csv_path: str = None
    constant: float = None
    variant: str = None
    paths: str = None
    max_iters: int = 100_000
    sector: int = None
    which: str = None
    out_path: str = None
    x_max: float = None
    sweep: str = None
    save_assignment_path: str = None

    def __post_init__(self):
        if (self.lattice is None) == (self.edges_path is None):
            raise ValueError("give exactly one graph source: --lattice or --edges")
        if self.tol <= 0:
            raise ValueError("tolerance must be positive")


@dataclass
class Report:
    """Everything one command produced, JSON-serializable."""

    command: str
    config: dict
    graph: dict
    results: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    status: str = "ok"
    timing_s: float = 0.0
    version: str = __version__

    def as_dict(self):
        return {
            "tool": {"name": "spinbound", "version": self.version},
            "command": self.command,
            "config": self.config,
            "graph": self.graph,
            "results": self.results,
            "notes": self.notes,
            "status": self.status,
            "timing_s": self.timing_s,
        }


def parse_shape(text):
    """Parse "4", "1x4", "3x3x3" into a lattice shape; size-1 dims drop out."""
    try:
        parts = [int(p) for p in text.lower().replace("×", "x").split("x")]
    except ValueError:
        raise ValueError(f"bad lattice shape {text!r}; expected like '8' or '3x3'") from None
    shape = tuple(p for p in parts if p != 1)
    if not shape:
        raise ValueError(f"lattice shape {text!r} has no extended dimension")
    if any(p < 1 for p in parts):
        raise ValueError(f"lattice shape {text!r} has nonpositive entries")
    return shape


def build_graph(config):
    if config.lattice is not None:
        spec = LatticeSpec(parse_shape(config.lattice), config.boundary)
        return build_lattice(spec)
    return load_edge_list(config.edges_path)


def _graph_summary(graph):
    from .graphs import diameter
    out = {"n_sites": graph.n_sites, "n_edges": graph.n_edges,
           "diameter": diameter(graph)}
    if graph.lattice is not None:
        out["lattice"] = {"shape": list(graph.lattice.shape),
                          "boundary": graph.lattice.boundary}
    return out


# ---------------------------------------------------------------------------
# subcommand handlers; each fills report.results and may append notes


def _cmd_constant(config, graph, report):
    spec = graph.lattice
    if config.variant in ("periodic", "open"):
        if spec is None:
            raise ValueError(f"variant {config.variant!r} needs --lattice")
        if spec.boundary != config.variant:
            raise ValueError(
                f"variant {config.variant!r} does not match boundary {spec.boundary!r}")
        bound = closed_form_constant(config.variant, shape=spec.shape)
    else:
        bound = closed_form_constant(config.variant, graph=graph, n_sites=graph.n_sites)
    report.results["bound"] = bound.as_dict()
    print(f"{config.variant} constant: {float(bound.slope):g}"
          + (f" (exact {bound.slope})" if hasattr(bound.slope, "denominator") else ""))
    if config.sweep:
        if spec is None or config.variant not in ("periodic", "open"):
            raise ValueError("--sweep needs a lattice variant")
        lo, hi = (int(p) for p in config.sweep.split(":"))
        rows = []
        maker = periodic_constant if config.variant == "periodic" else open_constant
        for n in range(lo, hi + 1):
            rows.append((n, float(maker(dims=spec.dims, n=n).slope)))
        report.results["sweep"] = [{"n": n, "constant": c} for n, c in rows]
        if config.csv_path:
            with open(config.csv_path, "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh)
                writer.writerow(["N", "constant"])
                writer.writerows(rows)
            print(f"sweep written to {config.csv_path}")
    return 0


def _cmd_verify(config, graph, report):
    cert = certify_inequality(graph, config.constant, tol=config.tol,
                              method=config.method, seed=config.seed)
    report.results["certificate"] = cert.as_dict()
    state = "PASS" if cert.passed else "FAIL"
    print(f"certify c={config.constant:g}: {state} "
          f"(lambda_min={cert.lambda_min:.3e}, tol={cert.tol:g}, {cert.method})")
    if not cert.passed:
        report.status = "bound-failure"
        return 1
    return 0


def _cmd_optimal(config, graph, report):
    result = optimal_constant(graph, method=config.method, seed=config.seed)
    report.results["optimal"] = result.as_dict()
    print(f"optimal constant: {result.constant:.12g} "
          f"(witness sector {result.witness_sector}, energy {result.witness_energy:.6g}, "
          f"deficit {result.witness_deficit:.6g}, residual {result.residual:.2e})")
    return 0


def _cmd_optimize(config, graph, report):
    paths = config.paths or ("canonical" if graph.lattice is not None else "bfs")
    uniform = uniform_assignment(graph, paths)
    _, uniform_bound = assignment_constant(uniform)
    params = OptimizeParams(max_iters=config.max_iters)
    result = optimize_weights(graph, paths, params)
    loads, bound = assignment_constant(result.assignment)
    cert = certify_inequality(graph, float(bound.slope), tol=config.tol,
                              method=config.method, seed=config.seed)
    report.results.update({
        "uniform_bound": uniform_bound.as_dict(),
        "optimized_bound": bound.as_dict(),
        "loads": loads.as_dict(),
        "iterations": result.iterations,
        "converged": result.converged,
        "certificate": cert.as_dict(),
    })
    if not result.converged:
        report.notes.append("iteration budget exhausted; best feasible weights returned")
    print(f"uniform constant:   {float(uniform_bound.slope):.10g}")
    print(f"optimized constant: {float(bound.slope):.10g} "
          f"({result.iterations} iterations, converged={result.converged})")
    print(f"certificate at optimized constant: "
          f"{'PASS' if cert.passed else 'FAIL'} (lambda_min={cert.lambda_min:.3e})")
    if config.save_assignment_path:
        save_assignment(config.save_assignment_path, result.assignment)
        print(f"assignment saved to {config.save_assignment_path}")
    if not cert.passed:
        report.status = "bound-failure"
        return 1
    return 0


def _cmd_compare(config, graph, report):
    spec = graph.lattice
    if spec is not None:
        ours = closed_form_constant(spec.boundary, shape=spec.shape)
    else:
        ours = closed_form_constant("diameter", graph=graph)
    other = baerwinkel_bound(graph, coupling=config.coupling)
    comparison = compare_bounds(ours, other, x_max=config.x_max)
    report.results["comparison"] = comparison.as_dict()
    print(f"path-weight bound:  {float(ours.slope):g} * x")
    print(f"spectral bound:     {float(other.slope):g} * x + {float(other.offset):g}")
    if comparison.crossover is not None:
        print(f"crossover at x = {comparison.crossover:g} "
              f"(x = deltaH/4J, range [0, {comparison.x_max:g}])")
    else:
        print(f"no crossover in [0, {comparison.x_max:g}]")
    print(f"tighter near 0: {comparison.tighter_at_zero}; "
          f"tighter near x_max: {comparison.tighter_at_xmax}")
    return 0


def _cmd_magnon(config, graph, report):
    spec = graph.lattice
    if spec is None or not spec.periodic:
        raise ValueError("magnon states need a periodic lattice")
    n = graph.n_sites
    basis = sector_basis(n, 1)
    ham = delta_hamiltonian(graph, basis)
    deficit = delta_spin_squared(basis)
    rows = []
    from itertools import product as iproduct
    for momentum in iproduct(*[range(nd) for nd in spec.shape]):
        state = magnon_state(spec, momentum)
        v = state.amplitudes
        av = ham @ v
        energy = float(np.real(np.vdot(v, av)))
        residual = float(np.linalg.norm(av - energy * v))
        analytic = sum(1 - np.cos(2 * np.pi * m / nd)
                       for m, nd in zip(momentum, spec.shape))
        deficit_val = float(np.real(np.vdot(v, deficit @ v)))
        rows.append({
            "momentum": list(momentum),
            "eigenvalue": energy,
            "analytic": analytic,
            "energy_4J": 4 * config.coupling * energy,
            "residual": residual,
            "spin_deficit": deficit_val,
        })
    report.results["magnons"] = rows
    report.notes.append(
        f"one-flip eigenstates have total spin n/2 - 1, so their spin deficit is "
        f"n = {n}; the next-multiplet guess n/2 + 1/4 = {n / 2 + 0.25} is "
        f"inconsistent with a single flip and is not used")
    print(f"{'m':>12} {'<H>/4J':>12} {'4J(1-cos k)':>12} {'residual':>10} {'deficit':>8}")
    for row in rows:
        print(f"{str(row['momentum']):>12} {row['eigenvalue']:>12.8f} "
              f"{row['analytic']:>12.8f} {row['residual']:>10.2e} "
              f"{row['spin_deficit']:>8.4f}")
    if config.csv_path:
        with open(config.csv_path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["momentum", "eigenvalue", "analytic", "energy_4J",
                             "residual", "spin_deficit"])
            for row in rows:
                writer.writerow(["+".join(map(str, row["momentum"])),
                                 row["eigenvalue"], row["analytic"],
                                 row["energy_4J"], row["residual"],
                                 row["spin_deficit"]])
        print(f"dispersion table written to {config.csv_path}")
    return 0


def _cmd_export(config, graph, report):
    op = export_operator(graph, config.sector, config.which, config.out_path)
    report.results["export"] = {
        "path": config.out_path, "which": config.which, "sector": config.sector,
        "dim": op.shape[0], "nnz": int(op.nnz),
    }
    print(f"{config.which} sector {config.sector} "
          f"({op.shape[0]}x{op.shape[1]}) written to {config.out_path}")
    return 0


_HANDLERS = {
    "constant": _cmd_constant,
    "verify": _cmd_verify,
    "optimal": _cmd_optimal,
    "optimize": _cmd_optimize,
    "compare": _cmd_compare,
    "magnon": _cmd_magnon,
    "export": _cmd_export,
}


def run(config):
    """Execute one command; returns (Report, exit_code)."""
    start = time.perf_counter()
    graph = build_graph(config)
    report = Report(command=config.subcommand,
                    config={k: v for k, v in vars(config).items() if v is not None},
                    graph=_graph_summary(graph))
    try:
        code = _HANDLERS[config.subcommand](config, graph, report)
    except ConvergenceError as exc:
        report.status = "numerical-failure"
        report.notes.append(f"solver did not converge: {exc} "
                            f"(best estimate {exc.best_estimate})")
        print(f"numerical failure: {exc}", file=sys.stderr)
        code = 1
    report.timing_s = time.perf_counter() - start
    if config.json_path:
        with open(config.json_path, "w", encoding="utf-8") as fh:
            json.dump(report.as_dict(), fh, indent=1)
    return report, code


def _add_common(parser):
    src = parser.add_argument_group("graph source")
    src.add_argument("--lattice", help="lattice shape, e.g. 8 or 3x3 or 1x4")
    src.add_argument("--bc", choices=("periodic", "open"), default="periodic",
                     help="lattice boundary (default periodic)")
    src.add_argument("--edges", help="edge-list file: one 'u v' pair per line")
    parser.add_argument("--J", type=float, default=1.0,
                        help="coupling strength; only scales reported energies")
    parser.add_argument("--tol", type=float, default=1e-9)
    parser.add_argument("--method", choices=("auto", "dense", "iterative"), default="auto")
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--json", dest="json_path", help="write the JSON report here")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="spinbound",
        description="Certify and optimize spin-energy operator inequalities "
                    "on Heisenberg-coupled qubit graphs.")
    parser.add_argument("--version", action="version", version=f"spinbound {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("constant", help="closed-form bound constants")
    _add_common(p)
    p.add_argument("--variant", required=True,
                   choices=("generic", "diameter", "periodic", "open"))
    p.add_argument("--sweep", help="N range 'lo:hi' for a c-vs-N table")
    p.add_argument("--csv", dest="csv_path", help="CSV output for --sweep")

    p = sub.add_parser("verify", help="certify the inequality at a given constant")
    _add_common(p)
    p.add_argument("--c", dest="constant", type=float, required=True)

    p = sub.add_parser("optimal", help="tightest possible constant for the graph")
    _add_common(p)

    p = sub.add_parser("optimize", help="balance path weights to shrink the constant")
    _add_common(p)
    p.add_argument("--paths", choices=("bfs", "canonical"))
    p.add_argument("--max-iters", dest="max_iters", type=int, default=100_000)
    p.add_argument("--save-assignment", dest="save_assignment_path",
                   help="write the optimized assignment as JSON")

    p = sub.add_parser("compare", help="closed form vs the coupling-spectrum bound")
    _add_common(p)
    p.add_argument("--x-max", dest="x_max", type=float,
                   help="compare on [0, x_max]; defaults to the edge count")

    p = sub.add_parser("magnon", help="single-flip plane-wave dispersion checks")
    _add_common(p)
    p.add_argument("--csv", dest="csv_path", help="CSV output for the dispersion table")

    p = sub.add_parser("export", help="write one operator sector as Matrix Market")
    _add_common(p)
    p.add_argument("--sector", type=int, required=True)
    p.add_argument("--which", choices=("deltaH", "deltaS2"), required=True)
    p.add_argument("--out", dest="out_path", required=True)

    return parser


def config_from_args(args):
    fields = {
        "subcommand": args.subcommand,
        "lattice": args.lattice,
        "boundary": args.bc,
        "edges_path": args.edges,
        "coupling": args.J,
        "tol": args.tol,
        "method": args.method,
        "seed": args.seed,
        "json_path": args.json_path,
    }
    for opt in ("constant", "variant", "paths", "max_iters", "sector", "which",
                "out_path", "x_max", "sweep", "csv_path", "save_assignment_path"):
        if hasattr(args, opt):
            fields[opt] = getattr(args, opt)
    return CommandConfig(**fields)


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
        _, code = run(config)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return code


if __name__ == "__main__":
    sys.exit(main())
