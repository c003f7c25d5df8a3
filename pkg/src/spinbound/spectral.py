"""Eigenvalue certification of operator inequalities and optimal constants.

The certified statement is positive semidefiniteness of c * deltaH/4J -
deltaS^2, checked sector by sector.  The optimal constant is the largest
ratio of spin-deficit to energy eigenvalue over joint eigenpairs outside
the energy kernel; since the two operators commute, joint pairs are read
off either from dense simultaneous block diagonalization or, iteratively,
by Lanczos runs inside the exactly known spin-deficit eigenspaces.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .operators import (
    delta_hamiltonian,
    delta_spin_squared,
    sector_basis,
    spin_deficit_levels,
)

DENSE_LIMIT = 4096
DEFAULT_TOL = 1e-9
KERNEL_TOL = 1e-10
DEFAULT_SEED = 7
THREADS_ENV = "SPINBOUND_THREADS"


class ConvergenceError(RuntimeError):
    """Iterative eigensolver ran out of iterations.

    Carries the best eigenvalue estimate seen and its residual norm.
    """

    def __init__(self, message, best_estimate=None, residual=None):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.residual = residual


@dataclass(frozen=True)
class Certificate:
    """Outcome of a positive-semidefiniteness check across sectors."""

    constant: float
    lambda_min: float
    sector_lambda_min: tuple   # (sector, lambda_min) pairs in scan order
    tol: float
    method: str
    passed: bool

    def as_dict(self):
        return {
            "constant": float(self.constant),
            "lambda_min": self.lambda_min,
            "sector_lambda_min": [[s, v] for s, v in self.sector_lambda_min],
            "tol": self.tol,
            "method": self.method,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class PencilResult:
    """Optimal constant with the sector and eigenpair that attain it."""

    constant: float
    witness_sector: int
    witness_energy: float      # deltaH/4J eigenvalue of the attaining state
    witness_deficit: float     # deltaS^2 eigenvalue of the attaining state
    residual: float            # ||(c*A - B) v|| for the attaining state v
    method: str
    witness_index: int = None  # position in the sector's joint spectrum (dense only)

    def as_dict(self):
        return {
            "constant": self.constant,
            "witness_sector": self.witness_sector,
            "witness_energy": self.witness_energy,
            "witness_deficit": self.witness_deficit,
            "witness_index": self.witness_index,
            "residual": self.residual,
            "method": self.method,
        }


def _n_workers():
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _map_sectors(fn, items):
    workers = _n_workers()
    if workers == 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _seeded_vector(dim, seed):
    v = np.random.default_rng(seed).standard_normal(dim)
    return v / np.linalg.norm(v)


def min_eigenvalue(op, method="auto", tol=DEFAULT_TOL, seed=DEFAULT_SEED, maxiter=None):
    """Smallest eigenvalue of a real symmetric operator.

    method "dense" diagonalizes (allowed up to dimension 4096), "iterative"
    runs a Lanczos scheme with a deterministic seeded start vector, "auto"
    picks dense below the limit.
    """
    dim = op.shape[0]
    if method == "auto":
        method = "dense" if dim <= DENSE_LIMIT else "iterative"
    if method == "dense":
        if dim > DENSE_LIMIT:
            raise ValueError(f"dense eigensolve limited to dim <= {DENSE_LIMIT}, got {dim}")
        dense = op.toarray() if sp.issparse(op) else np.asarray(op)
        return float(sla.eigvalsh(dense)[0])
    if method != "iterative":
        raise ValueError(f"unknown method {method!r}")
    # ARPACK needs k < dim; materialize tiny blocks and diagonalize directly
    if dim <= 16:
        if isinstance(op, spla.LinearOperator):
            dense = np.column_stack([op @ col for col in np.eye(dim)])
        else:
            dense = op.toarray() if sp.issparse(op) else np.asarray(op)
        return float(sla.eigvalsh(dense)[0])
    v0 = _seeded_vector(dim, seed)
    try:
        vals = spla.eigsh(op, k=1, which="SA", v0=v0, tol=0,
                          maxiter=maxiter or max(10000, 40 * dim),
                          return_eigenvectors=False)
    except spla.ArpackNoConvergence as exc:
        best = float(exc.eigenvalues[0]) if len(exc.eigenvalues) else None
        raise ConvergenceError(
            f"Lanczos did not converge on dim-{dim} operator", best_estimate=best,
            residual=None) from exc
    return float(vals[0])


def _resolve_method(graph, method, limit=DENSE_LIMIT):
    if method != "auto":
        return method
    n = graph.n_sites
    return "dense" if math.comb(n, n // 2) <= limit else "iterative"


def certify_inequality(graph, constant, tol=DEFAULT_TOL, method="auto",
                       seed=DEFAULT_SEED, full_scan=False):
    """Certify deltaS^2 <= constant * deltaH/4J by the smallest pencil eigenvalue.

    Scans sectors 0..n/2 (all sectors with ``full_scan``; the spectrum is
    symmetric under global spin flip, which tests assert separately).  The
    check passes when the overall smallest eigenvalue is >= -tol.
    """
    c = float(constant)
    if c < 0:
        raise ValueError("the bound constant must be nonnegative")
    n = graph.n_sites
    method = _resolve_method(graph, method)
    sectors = list(range(n + 1)) if full_scan else list(range(n // 2 + 1))

    def solve(m):
        basis = sector_basis(n, m)
        op = c * delta_hamiltonian(graph, basis) - delta_spin_squared(basis)
        return m, min_eigenvalue(op, method=method, tol=tol, seed=seed)

    per_sector = _map_sectors(solve, sectors)
    lam = min(v for _, v in per_sector)
    return Certificate(c, lam, tuple(per_sector), tol, method, lam >= -tol)


def joint_spectrum(graph, sectors=None, kernel_tol=KERNEL_TOL, degeneracy_tol=1e-8):
    """Joint (energy, deficit) eigenvalue pairs per sector, dense path.

    Returns a dict sector -> array of (alpha, beta) rows sorted by alpha.
    Relies on the two operators commuting: deltaS^2 is block diagonal in
    each degenerate eigenspace of deltaH/4J.
    """
    n = graph.n_sites
    if sectors is None:
        sectors = range(n // 2 + 1)
    out = {}
    for m in sectors:
        basis = sector_basis(n, m)
        A = delta_hamiltonian(graph, basis).toarray()
        B = delta_spin_squared(basis).toarray()
        alphas, V = np.linalg.eigh(A)
        pairs = []
        i = 0
        while i < basis.dim:
            j = i
            while j + 1 < basis.dim and alphas[j + 1] - alphas[i] <= degeneracy_tol:
                j += 1
            block = V[:, i:j + 1]
            betas = np.linalg.eigvalsh(block.T @ B @ block)
            alpha = float(np.mean(alphas[i:j + 1]))
            pairs.extend((alpha, float(b)) for b in betas)
            i = j + 1
        out[m] = np.array(sorted(pairs))
    return out


def _sector_best_dense(graph, m, kernel_tol):
    n = graph.n_sites
    basis = sector_basis(n, m)
    A = delta_hamiltonian(graph, basis).toarray()
    B = delta_spin_squared(basis).toarray()
    alphas, V = np.linalg.eigh(A)
    best = None
    i = 0
    while i < basis.dim:
        j = i
        while j + 1 < basis.dim and alphas[j + 1] - alphas[i] <= 1e-8:
            j += 1
        alpha = float(np.mean(alphas[i:j + 1]))
        if alpha > kernel_tol:
            block = V[:, i:j + 1]
            betas, W = np.linalg.eigh(block.T @ B @ block)
            beta = float(betas[-1])
            ratio = beta / alpha
            if best is None or ratio > best[0]:
                # index into the energy-sorted eigenvector array: the largest
                # deficit within a degenerate block sits at its upper end
                best = (ratio, alpha, beta, j, block @ W[:, -1])
        i = j + 1
    if best is None:
        return None
    ratio, alpha, beta, windex, vec = best
    resid = float(np.linalg.norm(ratio * (A @ vec) - B @ vec))
    return ratio, alpha, beta, windex, resid


def _sector_best_projected(graph, m, seed, kernel_tol):
    """Largest deficit/energy ratio in a sector via spin-deficit eigenspaces.

    The deficit operator has the exactly known eigenvalues
    Smax^2 - s(s+1); the projector onto one eigenspace is the Lagrange
    polynomial in the operator over those values.  Within each eigenspace a
    Lanczos run finds the smallest energy; the kernel (beta = 0) never
    enters because only beta > 0 levels are scanned.
    """
    n = graph.n_sites
    basis = sector_basis(n, m)
    dim = basis.dim
    A = delta_hamiltonian(graph, basis)
    B = delta_spin_squared(basis)
    levels = spin_deficit_levels(n, m)
    shift = 4.0 * n  # pushed-up complement; above any energy eigenvalue
    best = None
    for beta in levels:
        if beta <= kernel_tol:
            continue
        others = sorted((b for b in levels if b != beta), key=lambda b: -abs(b - beta))

        def project(v, _others=others, _beta=beta):
            for b in _others:
                v = (B @ v - b * v) / (_beta - b)
            return v

        def matvec(v, _project=project):
            pv = _project(v)
            return _project(A @ pv) + shift * (v - pv)

        if dim <= 16:
            dense = np.zeros((dim, dim))
            eye = np.eye(dim)
            for c in range(dim):
                dense[:, c] = matvec(eye[:, c])
            w, W = np.linalg.eigh(dense)
            alpha, vec = float(w[0]), W[:, 0]
        else:
            v0 = project(_seeded_vector(dim, seed))
            nv = np.linalg.norm(v0)
            if nv < 1e-10:
                continue
            op = spla.LinearOperator((dim, dim), matvec=matvec, dtype=float)
            try:
                w, W = spla.eigsh(op, k=1, which="SA", v0=v0 / nv, tol=0,
                                  maxiter=max(20000, 40 * dim))
            except spla.ArpackNoConvergence as exc:
                best_est = float(exc.eigenvalues[0]) if len(exc.eigenvalues) else None
                raise ConvergenceError(
                    f"deficit-eigenspace Lanczos stalled (sector {m}, deficit {beta})",
                    best_estimate=best_est) from exc
            alpha, vec = float(w[0]), W[:, 0]
        if alpha <= kernel_tol:
            continue
        ratio = beta / alpha
        if best is None or ratio > best[0]:
            resid = float(np.linalg.norm(ratio * (A @ vec) - B @ vec))
            best = (ratio, alpha, beta, resid)
    if best is None:
        return None
    ratio, alpha, beta, resid = best
    return ratio, alpha, beta, None, resid


def optimal_constant(graph, method="auto", seed=DEFAULT_SEED, kernel_tol=KERNEL_TOL):
    """Smallest constant making the spin-energy inequality hold on this graph.

    Equals the largest deficit/energy ratio over joint eigenpairs outside
    the energy kernel.  Every joint pair is visible in some sector at or
    below half filling, so only those sectors are scanned.
    """
    n = graph.n_sites
    # joint diagonalization costs more than a single eigensolve, so the
    # automatic dense cutoff sits lower here than for certification
    method = _resolve_method(graph, method, limit=1024)

    def solve(m):
        if method == "dense":
            return _sector_best_dense(graph, m, kernel_tol)
        return _sector_best_projected(graph, m, seed, kernel_tol)

    results = _map_sectors(solve, list(range(1, n // 2 + 1)))
    best, best_sector = None, None
    for m, res in zip(range(1, n // 2 + 1), results):
        if res is not None and (best is None or res[0] > best[0]):
            best, best_sector = res, m
    if best is None:
        raise ValueError("no state outside the energy kernel; graph too small?")
    ratio, alpha, beta, windex, resid = best
    return PencilResult(float(ratio), best_sector, alpha, beta, resid, method,
                        witness_index=windex)
