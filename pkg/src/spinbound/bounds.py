"""Closed-form bound constants, the three-qubit chain formula, and the
coupling-matrix spectral bound.

Closed forms are evaluated exactly (Fractions) from the pre-asymptotic
bracket expressions, never from leading-order truncations.  The spectral
bound machinery fixes the weak-homogeneity gauge of the coupling matrix
(constant row sums via the diagonal), reads off its relevant eigenvalues,
and converts the resulting energy constraint into an affine bound

    deltaS^2 <= slope * (deltaH / 4J) + offset.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np
import scipy.linalg as sla

from .graphs import diameter as graph_diameter


@dataclass(frozen=True)
class BoundSpec:
    """Affine upper bound on the spin deficit in terms of deltaH/4J.

    ``slope`` and ``offset`` may be exact Fractions (formula-derived bounds)
    or floats (spectral ones).  ``provenance`` records which construction
    produced the bound; ``params`` echoes its inputs.
    """

    slope: object
    offset: object = 0
    provenance: str = ""
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.slope < 0:
            raise ValueError("bound slope must be nonnegative")

    def evaluate(self, x):
        return self.slope * x + self.offset

    def as_dict(self):
        out = {
            "slope": float(self.slope),
            "offset": float(self.offset),
            "provenance": self.provenance,
            "params": {k: (float(v) if isinstance(v, Fraction) else v)
                       for k, v in self.params.items()},
        }
        if isinstance(self.slope, (Fraction, int)):
            out["slope_exact"] = str(Fraction(self.slope))
        if isinstance(self.offset, (Fraction, int)):
            out["offset_exact"] = str(Fraction(self.offset))
        return out


# ---------------------------------------------------------------------------
# three-qubit chain

def three_qubit_eigenvalues(a, b):
    """The two distinct nonzero eigenvalues of a*P12 + b*P23 - P13.

    Each is doubly degenerate on the 8-dimensional three-qubit space; the
    remaining four eigenvalues vanish.  Returns (larger, smaller).
    """
    if a <= 0 or b <= 0:
        raise ValueError("coefficients must be positive")
    root = math.sqrt(1 + a + b - a * b + a * a + b * b)
    return 0.5 * (-1 + a + b + root), 0.5 * (-1 + a + b - root)


def three_qubit_psd(a, b):
    """Whether a*P12 + b*P23 - P13 is positive semidefinite: ab >= a + b."""
    if a <= 0 or b <= 0:
        raise ValueError("coefficients must be positive")
    return a * b >= a + b


# ---------------------------------------------------------------------------
# closed-form constants

def generic_constant(n_sites):
    """Any-connected-graph constant n(n-1)^2."""
    n = int(n_sites)
    if n < 2:
        raise ValueError("need at least two sites")
    return BoundSpec(Fraction(n * (n - 1) ** 2), 0, "generic", {"n_sites": n})


def diameter_constant(graph):
    """Pre-relaxation constant diam * n * (n-1); needs the actual graph."""
    n = graph.n_sites
    diam = graph_diameter(graph)
    return BoundSpec(Fraction(diam * n * (n - 1)), 0, "diameter",
                     {"n_sites": n, "diameter": diam, "n_edges": graph.n_edges})


def _as_shape(shape=None, dims=None, n=None):
    if shape is not None:
        if isinstance(shape, int):
            return (shape,)
        return tuple(int(s) for s in shape)
    if dims is None or n is None:
        raise ValueError("give either shape or both dims and n")
    return (int(n),) * int(dims)


def _abs_sum_periodic(n):
    # sum of |w| over the canonical periodic displacement window
    return Fraction(n * n - (n % 2), 4)


def _sq_sum_periodic(n):
    # sum of w^2 over the same window
    return Fraction(n * (n * n + 2 - 3 * (n % 2)), 12)


def _abs_sum_open(n):
    # sum of |w| for w in 1-n .. n-1
    return Fraction(n * (n - 1))


def _sq_sum_open(n):
    return Fraction(n * (n - 1) * (2 * n - 1), 3)


def _bracket(shape, abs_sum, sq_sum, width):
    """Exact per-dimension edge-load bracket; the constant is the max over dims.

    For dimension d the bracket is
        sum_{d'} [prod_{e != d,d'} width(N_e)] * (cross or square term),
    which for an N^D lattice collapses to the familiar
    (D-1)*S1^2*N^(D-2) + S2*N^(D-1) form.
    """
    dims = len(shape)
    per_dim = []
    for d in range(dims):
        total = Fraction(0)
        for dp in range(dims):
            prefactor = Fraction(1)
            for e in range(dims):
                if e != d and e != dp:
                    prefactor *= width(shape[e])
            if dp == d:
                total += prefactor * sq_sum(shape[d])
            else:
                total += prefactor * abs_sum(shape[d]) * abs_sum(shape[dp])
        per_dim.append(total)
    return max(per_dim)


def periodic_constant(shape=None, dims=None, n=None):
    """Exact periodic-lattice constant from the completed displacement sums."""
    shape = _as_shape(shape, dims, n)
    if any(s < 3 for s in shape):
        raise ValueError("periodic lattices need at least 3 sites per dimension")
    value = _bracket(shape, _abs_sum_periodic, _sq_sum_periodic, lambda s: Fraction(s))
    n_sites = math.prod(shape)
    return BoundSpec(value, 0, "periodic-exact",
                     {"shape": list(shape), "n_sites": n_sites,
                      "n_edges": len(shape) * n_sites})


def open_constant(shape=None, dims=None, n=None):
    """Exact open-boundary lattice constant (range-expanded displacement sums)."""
    shape = _as_shape(shape, dims, n)
    if any(s < 2 for s in shape):
        raise ValueError("open lattices need at least 2 sites per dimension")
    value = _bracket(shape, _abs_sum_open, _sq_sum_open, lambda s: Fraction(2 * s - 1))
    n_sites = math.prod(shape)
    n_edges = sum(n_sites // s * (s - 1) for s in shape)
    return BoundSpec(value, 0, "open-exact",
                     {"shape": list(shape), "n_sites": n_sites, "n_edges": n_edges})


def periodic_leading_term(shape=None, dims=None, n=None):
    """Leading asymptotic (3D+1)/48 * N^(D+2); for self-tests only."""
    shape = _as_shape(shape, dims, n)
    d = len(shape)
    n0 = shape[0]
    return (3 * d + 1) / 48 * n0 ** (d + 2)


def open_leading_term(shape=None, dims=None, n=None):
    """Leading asymptotic (3D+1) 2^D / 12 * N^(D+2); for self-tests only."""
    shape = _as_shape(shape, dims, n)
    d = len(shape)
    n0 = shape[0]
    return (3 * d + 1) * 2 ** d / 12 * n0 ** (d + 2)


def closed_form_constant(variant, graph=None, n_sites=None, shape=None, dims=None, n=None):
    """Dispatch to one of the closed-form constants by name."""
    if variant == "generic":
        if n_sites is None:
            n_sites = graph.n_sites if graph is not None else None
        return generic_constant(n_sites)
    if variant == "diameter":
        if graph is None:
            raise ValueError("diameter variant needs a graph")
        return diameter_constant(graph)
    if variant == "periodic":
        return periodic_constant(shape, dims, n)
    if variant == "open":
        return open_constant(shape, dims, n)
    raise ValueError(f"unknown variant {variant!r}")


# ---------------------------------------------------------------------------
# coupling-matrix spectral bound

@dataclass(frozen=True)
class CouplingMatrix:
    """Symmetric site-coupling matrix with a gauge tag (raw | weakly-homogeneous)."""

    matrix: np.ndarray
    gauge: str = "raw"

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("coupling matrix must be square")
        if not np.allclose(m, m.T, atol=1e-12):
            raise ValueError("coupling matrix must be symmetric")
        object.__setattr__(self, "matrix", m)

    @property
    def n_sites(self):
        return self.matrix.shape[0]

    def row_sums(self):
        return self.matrix.sum(axis=1)


def coupling_matrix(graph, coupling=1.0):
    """Matrix with -2J on every ordered adjacent pair and zero diagonal."""
    m = np.zeros((graph.n_sites, graph.n_sites))
    for (u, v) in graph.edges:
        m[u, v] = m[v, u] = -2.0 * coupling
    return CouplingMatrix(m, "raw")


def gauge_weak_homogeneity(cm):
    """Redefine the diagonal so every row sums to the mean total coupling.

    Off-diagonal entries are untouched.  The new diagonal entry at site l is
    (sum of all old entries)/n minus the old off-diagonal column sum at l;
    for zero-diagonal input the gauged matrix is traceless, so the
    Hamiltonian it defines is unchanged.
    """
    old = cm.matrix
    n = cm.n_sites
    total = old.sum()
    gauged = old.copy()
    for l in range(n):
        off_col = old[:, l].sum() - old[l, l]
        gauged[l, l] = total / n - off_col
    return CouplingMatrix(gauged, "weakly-homogeneous")


def _perp_spectrum(gauged):
    """Eigenvalues of the gauged matrix orthogonal to the all-ones vector."""
    n = gauged.n_sites
    u = np.full((n, 1), 1.0 / math.sqrt(n))
    basis = sla.null_space(u.T)          # orthonormal, n x (n-1)
    return np.sort(sla.eigvalsh(basis.T @ gauged.matrix @ basis))


def baerwinkel_bound(graph, coupling=1.0, spin=0.5):
    """Affine spin-deficit bound from the coupling-matrix spectrum.

    Builds the -2J adjacency coupling matrix, gauges it weakly homogeneous,
    and extracts j (the all-ones eigenvalue, equal to the constant row sum),
    j_min and j2 (smallest and second smallest eigenvalue in the orthogonal
    complement, counted with multiplicity).  The three-term energy bound

        H >= (j - j_min)/n * S^2 + n * j_min * s(s+1) + (n-1)(j2 - j_min) * s

    is then rewritten in terms of deltaH = H + J*|edges| and the spin
    deficit.  The rewrite divides by j - j_min < 0, which flips it into an
    upper bound.  Only spin 1/2 is supported for the conversion since the
    spin deficit is defined for qubits.
    """
    if spin != 0.5:
        raise ValueError("the spin-deficit conversion is defined for spin 1/2 only")
    j_coupling = float(coupling)
    n = graph.n_sites
    gauged = gauge_weak_homogeneity(coupling_matrix(graph, j_coupling))
    row = gauged.row_sums()
    j = float(row[0])
    if not np.allclose(row, j, atol=1e-10):
        raise AssertionError("gauged matrix lost constant row sums")
    perp = _perp_spectrum(gauged)
    j_min, j2 = float(perp[0]), float(perp[1])
    if abs(j_min - j) <= 1e-12:
        raise ValueError("flat perpendicular spectrum: bound undefined")

    if graph.lattice is not None and graph.lattice.periodic:
        _check_lattice_spectrum(graph.lattice, j_coupling, j, j_min)

    e_ground = -j_coupling * graph.n_edges
    smax2 = (n / 2) * (n / 2 + 1)
    s = spin
    denom = j_min - j   # positive for ferromagnetic-type spectra
    slope = 4 * j_coupling * n / denom
    offset = smax2 + n / denom * (
        e_ground - n * j_min * s * (s + 1) - (n - 1) * (j2 - j_min) * s)
    return BoundSpec(slope, offset, "baerwinkel",
                     {"j": j, "j_min": j_min, "j2": j2, "coupling": j_coupling,
                      "spin": s, "n_sites": n, "n_edges": graph.n_edges})


def _check_lattice_spectrum(spec, j_coupling, j, j_min):
    """Cross-check j, j_min against the analytic periodic-lattice values."""
    d = spec.dims
    expected_j = -4 * j_coupling * d
    n_long = max(spec.shape)
    expected_min = -4 * j_coupling * (d - 1 + math.cos(2 * math.pi / n_long))
    if abs(j - expected_j) > 1e-10 or abs(j_min - expected_min) > 1e-10:
        raise AssertionError(
            f"lattice coupling spectrum mismatch: j={j} (expected {expected_j}), "
            f"j_min={j_min} (expected {expected_min})")


def lattice_coupling_eigenvalues(spec, coupling=1.0):
    """Analytic gauged coupling spectrum of a periodic lattice.

    The circulant eigenvalue for momentum tuple (m_1..m_D) is
    -4J * sum_d cos(2 pi m_d / N_d).  Returned sorted ascending, for
    cross-checks against the dense eigendecomposition.
    """
    if not spec.periodic:
        raise ValueError("analytic spectrum needs periodic boundaries")
    vals = []
    for ms in product(*[range(nd) for nd in spec.shape]):
        vals.append(-2 * coupling * sum(2 * math.cos(2 * math.pi * m / nd)
                                        for m, nd in zip(ms, spec.shape)))
    return np.sort(np.array(vals))


# ---------------------------------------------------------------------------
# bound comparison

@dataclass(frozen=True)
class ComparisonReport:
    """Where each of two affine bounds is tighter on [0, x_max]."""

    first: BoundSpec
    second: BoundSpec
    x_max: float
    crossover: float            # None if the lines do not cross in (0, x_max)
    tighter_at_zero: str        # "first" | "second" | "tie"
    tighter_at_xmax: str
    values_at_zero: tuple
    values_at_xmax: tuple

    def as_dict(self):
        return {
            "first": self.first.as_dict(),
            "second": self.second.as_dict(),
            "x_max": self.x_max,
            "crossover": self.crossover,
            "tighter_at_zero": self.tighter_at_zero,
            "tighter_at_xmax": self.tighter_at_xmax,
            "values_at_zero": [float(v) for v in self.values_at_zero],
            "values_at_xmax": [float(v) for v in self.values_at_xmax],
        }


def _tighter(va, vb):
    if math.isclose(va, vb, rel_tol=1e-12, abs_tol=1e-12):
        return "tie"
    return "first" if va < vb else "second"


def compare_bounds(first, second, x_max=None):
    """Compare two affine bounds on [0, x_max].

    ``x_max`` defaults to the edge count recorded in either bound's params
    (the energy operator is at most the number of edges).
    """
    if x_max is None:
        x_max = first.params.get("n_edges") or second.params.get("n_edges")
        if x_max is None:
            raise ValueError("x_max not given and neither bound records n_edges")
    x_max = float(x_max)
    ds = float(first.slope) - float(second.slope)
    doff = float(second.offset) - float(first.offset)
    crossover = None
    if ds != 0.0:
        x = doff / ds
        if 0.0 <= x <= x_max:
            crossover = x
    v0 = (float(first.offset), float(second.offset))
    v1 = (float(first.evaluate(x_max)), float(second.evaluate(x_max)))
    return ComparisonReport(first, second, x_max, crossover,
                            _tighter(*v0), _tighter(*v1), v0, v1)
