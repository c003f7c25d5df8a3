"""File formats: edge lists, Matrix Market operators, state vectors,
assignment audit files."""

import json

import numpy as np
import scipy.io
import scipy.sparse as sp

from .graphs import from_edge_list
from .operators import StateVector, delta_hamiltonian, delta_spin_squared, sector_basis
from .weights import WeightedAssignment
from .graphs import Path

OPERATOR_BUILDERS = {
    "deltaH": lambda g, b: delta_hamiltonian(g, b),
    "deltaS2": lambda g, b: delta_spin_squared(b),
}


def parse_edge_list(text):
    """Graph from edge-list text: one "u v" pair per line.

    Lines starting with '#' and blank lines are skipped; anything else must
    be two integers.  Errors carry the 1-based line number.
    """
    pairs = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = stripped.split()
        if len(fields) != 2:
            raise ValueError(f"line {lineno}: expected two site indices, got {stripped!r}")
        try:
            u, v = int(fields[0]), int(fields[1])
        except ValueError:
            raise ValueError(f"line {lineno}: non-integer site index in {stripped!r}") from None
        pairs.append((u, v))
    if not pairs:
        raise ValueError("edge list contains no edges")
    return from_edge_list(pairs)


def load_edge_list(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_edge_list(fh.read())


def write_edge_list(path, graph, comment=None):
    with open(path, "w", encoding="utf-8") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        for (u, v) in graph.edges:
            fh.write(f"{u} {v}\n")


def write_matrix_market(path, matrix, comment=None):
    """Symmetric real coordinate Matrix Market file.

    Stores the lower triangle including the diagonal, entries sorted by
    (row, col), 1-based indices.
    """
    coo = sp.coo_matrix(matrix)
    entries = [(r, c, v) for r, c, v in zip(coo.row, coo.col, coo.data) if r >= c and v != 0.0]
    entries.sort(key=lambda e: (e[0], e[1]))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("%%MatrixMarket matrix coordinate real symmetric\n")
        if comment:
            fh.write(f"% {comment}\n")
        fh.write(f"{matrix.shape[0]} {matrix.shape[1]} {len(entries)}\n")
        for r, c, v in entries:
            fh.write(f"{r + 1} {c + 1} {v!r}\n")


def read_matrix_market(path):
    """Read an operator back as CSR (symmetric storage is expanded)."""
    return sp.csr_matrix(scipy.io.mmread(path))


def export_operator(graph, sector, which, path):
    """Write one sector block of deltaH/4J or deltaS^2 as Matrix Market."""
    if which not in OPERATOR_BUILDERS:
        raise ValueError(f"unknown operator {which!r}; pick from {sorted(OPERATOR_BUILDERS)}")
    if not 0 <= sector <= graph.n_sites:
        raise ValueError(f"sector {sector} out of range for {graph.n_sites} sites")
    basis = sector_basis(graph.n_sites, sector)
    op = OPERATOR_BUILDERS[which](graph, basis)
    write_matrix_market(path, op,
                        comment=f"{which} sector={sector} n_sites={graph.n_sites}")
    return op


def write_state_vector(path, state):
    """Two-column (real, imag) text file; one row per basis state."""
    amps = state.amplitudes
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# dim={state.basis.dim} n_qubits={state.basis.n_qubits} "
                 f"n_flipped={state.basis.n_flipped}\n")
        for a in amps:
            fh.write(f"{a.real!r} {a.imag!r}\n")


def read_state_vector(path, basis):
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            re_s, im_s = line.split()
            rows.append(complex(float(re_s), float(im_s)))
    return StateVector(basis, np.array(rows))


def assignment_to_json(assignment):
    """JSON-serializable audit form: pair -> path sites + weights."""
    return {
        "provenance": assignment.provenance,
        "n_sites": assignment.graph.n_sites,
        "pairs": [
            {"pair": [i, k], "sites": list(path.sites), "weights": [float(w) for w in ws]}
            for (i, k), (path, ws) in sorted(assignment.pairs.items())
        ],
    }


def assignment_from_json(data, graph):
    pairs = {}
    for entry in data["pairs"]:
        i, k = entry["pair"]
        pairs[(i, k)] = (Path(tuple(entry["sites"])), tuple(entry["weights"]))
    return WeightedAssignment(graph, pairs, data.get("provenance", "replayed"))


def save_assignment(path, assignment):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(assignment_to_json(assignment), fh, indent=1)


def load_assignment(path, graph):
    with open(path, "r", encoding="utf-8") as fh:
        return assignment_from_json(json.load(fh), graph)
