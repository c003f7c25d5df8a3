"""Singlet projectors, the energy operator and the total-spin deficit.

All operators act on fixed-magnetization sector bases (counts of up spins
over the all-down vacuum).  They are real symmetric and conserve the
sector, so each one is returned as a scipy CSR block for a single sector.

Conventions: the energy operator is the dimensionless sum of singlet
projectors over the coupling edges (the exchange constant J is never baked
in); the spin deficit is the ordered-pair projector sum, i.e. twice the sum
over unordered pairs, whose spectrum is Smax^2 - s(s+1).
"""

import cmath
import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
import scipy.sparse as sp

MAX_QUBITS = 24


@dataclass(frozen=True)
class SectorBasis:
    """Ordered basis of computational bitmasks with a fixed up-spin count."""

    n_qubits: int
    n_flipped: int
    states: np.ndarray
    index: dict

    @property
    def dim(self):
        return len(self.states)

    def position(self, bitmask):
        """Row of a bitmask within the basis; KeyError if out of sector."""
        return self.index[int(bitmask)]


def sector_basis(n_qubits, n_flipped, max_qubits=MAX_QUBITS):
    """Enumerate the magnetization sector, states sorted ascending."""
    if not 0 < n_qubits <= max_qubits:
        raise ValueError(f"n_qubits must be in 1..{max_qubits}, got {n_qubits}")
    if not 0 <= n_flipped <= n_qubits:
        raise ValueError(f"n_flipped must be in 0..{n_qubits}, got {n_flipped}")
    states = np.array(
        sorted(sum(1 << c for c in combo) for combo in combinations(range(n_qubits), n_flipped)),
        dtype=np.int64,
    )
    return SectorBasis(n_qubits, n_flipped, states,
                       {int(s): i for i, s in enumerate(states)})


def _projector_sum(basis, pairs, scale=1.0):
    """scale * sum of singlet projectors over the given site pairs, as CSR.

    Per pair (i, k) the projector annihilates states whose bits agree and
    acts as [[1/2, -1/2], [-1/2, 1/2]] on the two states that differ.
    """
    rows, cols, vals = [], [], []
    half = 0.5 * scale
    for col, s in enumerate(basis.states):
        s = int(s)
        diag = 0.0
        for (i, k) in pairs:
            if ((s >> i) & 1) != ((s >> k) & 1):
                diag += half
                partner = s ^ ((1 << i) | (1 << k))
                rows.append(basis.position(partner))
                cols.append(col)
                vals.append(-half)
        if diag:
            rows.append(col)
            cols.append(col)
            vals.append(diag)
    mat = sp.csr_matrix((vals, (rows, cols)), shape=(basis.dim, basis.dim))
    mat.sum_duplicates()
    return mat


def singlet_projector(basis, i, k):
    """Projector onto the two-qubit singlet of sites i, k, in the sector basis."""
    n = basis.n_qubits
    if i == k:
        raise ValueError("singlet projector needs two distinct sites")
    if not (0 <= i < n and 0 <= k < n):
        raise ValueError(f"sites ({i},{k}) out of range for {n} qubits")
    return _projector_sum(basis, [(i, k)])


def delta_hamiltonian(graph, basis):
    """Energy above the aligned ground state in units of 4J: sum of edge projectors."""
    if basis.n_qubits != graph.n_sites:
        raise ValueError(
            f"basis has {basis.n_qubits} qubits but graph has {graph.n_sites} sites")
    return _projector_sum(basis, graph.edges)


def delta_spin_squared(basis):
    """Total-spin deficit Smax^2 - S^2: ordered-pair sum of all singlet projectors."""
    pairs = list(combinations(range(basis.n_qubits), 2))
    return _projector_sum(basis, pairs, scale=2.0)


def max_spin_squared(n_qubits):
    """Largest eigenvalue of S^2 on n qubits: (n/2)(n/2 + 1)."""
    return (n_qubits / 2) * (n_qubits / 2 + 1)


def spin_deficit_levels(n_qubits, n_flipped):
    """Exact spin-deficit eigenvalues present in a sector, descending.

    Total spins s = n/2 - m, ..., n/2 all occur in the m-flip sector
    (m <= n/2), giving deficits Smax^2 - s(s+1).  Values are exact up to
    float representation of quarter-integers.
    """
    smax2 = max_spin_squared(n_qubits)
    levels = []
    for k in range(min(n_flipped, n_qubits - n_flipped) + 1):
        s = abs(n_qubits / 2 - n_flipped) + k
        levels.append(smax2 - s * (s + 1))
    return sorted(set(levels), reverse=True)


def multiplet_multiplicity(n_qubits, total_spin_twice):
    """Number of spin-s multiplets of n qubits, with s given as 2s (integer)."""
    m = (n_qubits - total_spin_twice) // 2
    if m < 0 or (n_qubits - total_spin_twice) % 2:
        return 0
    count = math.comb(n_qubits, m)
    if m >= 1:
        count -= math.comb(n_qubits, m - 1)
    return count


@dataclass(frozen=True)
class StateVector:
    """Complex amplitudes over a SectorBasis."""

    basis: SectorBasis
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.basis.dim,):
            raise ValueError(f"expected {self.basis.dim} amplitudes, got {amps.shape}")
        if not np.all(np.isfinite(amps.view(float))):
            raise ValueError("non-finite amplitude")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self):
        return float(np.linalg.norm(self.amplitudes))


def magnon_state(spec, momentum):
    """Single-flip plane wave over the all-down vacuum on a periodic lattice.

    ``momentum`` gives integers m_d, one per dimension, defining wave numbers
    k_d = 2 pi m_d / N_d.  The amplitude on the basis state with the flip at
    coordinates x is exp(i k.x) / sqrt(n_sites).  Built with the raising
    operator, which on the all-down vacuum is the only part of sigma^x that
    survives.
    """
    if not spec.periodic:
        raise ValueError("plane-wave momenta need periodic boundaries")
    if isinstance(momentum, int):
        momentum = (momentum,)
    momentum = tuple(int(m) for m in momentum)
    if len(momentum) != spec.dims:
        raise ValueError(f"expected {spec.dims} momentum components")
    n = spec.n_sites
    basis = sector_basis(n, 1)
    amps = np.zeros(n, dtype=complex)
    for site in range(n):
        coords = spec.site_coords(site)
        phase = sum(2 * math.pi * m * x / nd
                    for m, x, nd in zip(momentum, coords, spec.shape))
        amps[basis.position(1 << site)] = cmath.exp(1j * phase)
    return StateVector(basis, amps / math.sqrt(n))
