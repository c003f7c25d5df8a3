"""Path-weight assignments and the induced bound constant.

Every ordered site pair carries a path and one positive weight per path
edge, with the weight reciprocals summing to one.  Summing the per-pair
chain inequalities and grouping by edge bounds the spin deficit by
(max accumulated edge load) * deltaH/4J, so tightening the constant is the
convex problem of balancing edge loads.  Optimization works on the weight
reciprocals, where the per-pair constraint set is the probability simplex.
"""

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .bounds import BoundSpec
from .graphs import canonical_lattice_path, shortest_path


@dataclass(frozen=True)
class WeightedAssignment:
    """Per ordered pair: a path and positive per-edge weights.

    ``pairs`` maps (i, k) with i != k to (Path, weights tuple).  Weights of
    uniform assignments are ints so load accumulation stays exact.
    """

    graph: object
    pairs: dict
    provenance: str = "uniform-bfs"

    def validate(self, tol=1e-10):
        """Check completeness, path validity and the reciprocal-sum condition."""
        n = self.graph.n_sites
        missing = [(i, k) for (i, k) in _ordered_pairs(n) if (i, k) not in self.pairs]
        if missing:
            raise ValueError(f"assignment misses ordered pairs, e.g. {missing[0]}; "
                             "the induced bound needs every pair covered")
        for (i, k), (path, ws) in self.pairs.items():
            if path.source != i or path.target != k:
                raise ValueError(f"pair ({i},{k}): path endpoints {path.source},{path.target}")
            if len(ws) != len(path):
                raise ValueError(f"pair ({i},{k}): {len(ws)} weights for {len(path)} edges")
            for e in path.edges:
                if not self.graph.has_edge(*e):
                    raise ValueError(f"pair ({i},{k}): edge {e} not in graph")
            if any(w < 1 - 1e-12 for w in ws):
                raise ValueError(f"pair ({i},{k}): weights below 1")
            if all(isinstance(w, int) for w in ws):
                total = sum(Fraction(1, w) for w in ws)
                ok = total == 1
            else:
                total = sum(1.0 / float(w) for w in ws)
                ok = abs(total - 1.0) <= tol
            if not ok:
                raise ValueError(
                    f"pair ({i},{k}): weight reciprocals sum to {float(total)}, expected 1")


@dataclass(frozen=True)
class LoadMap:
    """Accumulated weight per edge, with the maximum and where it occurs."""

    loads: dict
    max_load: object
    argmax_edge: tuple

    def as_dict(self):
        return {
            "loads": {f"{u}-{v}": float(w) for (u, v), w in self.loads.items()},
            "max_load": float(self.max_load),
            "argmax_edge": list(self.argmax_edge),
        }


def _ordered_pairs(n_sites):
    return [(i, k) for i in range(n_sites) for k in range(n_sites) if i != k]


def _path_for(graph, i, k, mode):
    if mode == "bfs":
        return shortest_path(graph, i, k)
    if mode == "canonical":
        spec = graph.lattice
        if spec is None:
            raise ValueError("canonical paths need lattice metadata")
        ci, ck = spec.site_coords(i), spec.site_coords(k)
        return canonical_lattice_path(graph, ci, spec.canonical_displacement(ci, ck))
    raise ValueError(f"unknown path mode {mode!r}")


def uniform_assignment(graph, paths="bfs"):
    """Each ordered pair gets its deterministic path, every edge weighted by
    the path length (so the reciprocals trivially sum to one)."""
    pairs = {}
    for (i, k) in _ordered_pairs(graph.n_sites):
        path = _path_for(graph, i, k, paths)
        pairs[(i, k)] = (path, (len(path),) * len(path))
    return WeightedAssignment(graph, pairs, f"uniform-{paths}")


def assignment_constant(assignment):
    """Accumulate edge loads and read off the induced bound constant.

    Exact (integer/Fraction) when all weights are ints.  Raises if the
    assignment violates the reciprocal-sum condition.
    """
    assignment.validate()
    graph = assignment.graph
    loads = {e: 0 for e in graph.edges}
    for (_, (path, ws)) in assignment.pairs.items():
        for e, w in zip(path.edges, ws):
            loads[e] = loads[e] + w
    argmax = max(loads, key=lambda e: loads[e])
    max_load = loads[argmax]
    if isinstance(max_load, float):
        slope = max_load
    else:
        slope = Fraction(max_load)
    load_map = LoadMap(loads, max_load, argmax)
    spec = BoundSpec(slope, 0, "assignment",
                     {"paths": assignment.provenance, "n_sites": graph.n_sites,
                      "n_edges": graph.n_edges})
    return load_map, spec


# ---------------------------------------------------------------------------
# convex load balancing

@dataclass(frozen=True)
class OptimizeParams:
    max_iters: int = 100_000
    rtol: float = 1e-8          # stop when the smoothed max stalls ...
    patience: int = 50          # ... for this many iterations
    stage_factors: tuple = (1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5)
    reciprocal_floor: float = 1e-12
    armijo: float = 0.25
    backtracks: int = 60


@dataclass(frozen=True)
class OptimizeResult:
    assignment: WeightedAssignment
    max_load: float
    iterations: int
    converged: bool


def _project_simplex(v):
    """Euclidean projection onto {x >= 0, sum x = 1}."""
    u = np.sort(v)[::-1]
    shifted = np.cumsum(u) - 1.0
    rho = np.nonzero(u * np.arange(1, len(v) + 1) > shifted)[0][-1]
    return np.maximum(v - shifted[rho] / (rho + 1.0), 0.0)


def optimize_weights(graph, paths="bfs", params=None):
    """Minimize the maximum edge load over weight reciprocals.

    ``paths`` fixes the path of every ordered pair (a mode name or an
    existing WeightedAssignment whose paths are reused); only the weights
    move.  Smoothed-max projected gradient descent with backtracking, run
    through a fixed schedule of smoothing stages from the uniform start.
    The best feasible iterate is tracked, so the result never exceeds the
    uniform constant.  If the iteration budget runs out the best found is
    returned with ``converged=False``.
    """
    params = params or OptimizeParams()
    if isinstance(paths, WeightedAssignment):
        base, mode = paths, paths.provenance
    else:
        base, mode = uniform_assignment(graph, paths), f"optimized-{paths}"

    edge_pos = {e: idx for idx, e in enumerate(graph.edges)}
    keys, path_ids, xs = [], [], []
    fixed = np.zeros(graph.n_edges)
    for (i, k), (path, ws) in base.pairs.items():
        ids = np.array([edge_pos[e] for e in path.edges])
        if len(path) == 1:
            fixed[ids[0]] += 1.0     # single-edge pairs are pinned at weight 1
            continue
        keys.append((i, k))
        path_ids.append(ids)
        xs.append(np.array([1.0 / float(w) for w in ws]))

    def edge_loads(xs):
        loads = fixed.copy()
        for ids, x in zip(path_ids, xs):
            np.add.at(loads, ids, 1.0 / x)
        return loads

    def smoothed(loads, mu):
        top = loads.max()
        return top + mu * np.log(np.exp((loads - top) / mu).sum())

    best_val = edge_loads(xs).max() if keys else fixed.max()
    best_xs = [x.copy() for x in xs]
    iterations = 0
    converged = True
    if keys:
        scale = max(best_val, 1.0)
        for factor in params.stage_factors:
            mu = scale * factor
            step = 1.0
            stale = 0
            prev = np.inf
            while True:
                if iterations >= params.max_iters:
                    converged = False
                    break
                iterations += 1
                loads = edge_loads(xs)
                val = loads.max()
                if val < best_val - 1e-15:
                    best_val = val
                    best_xs = [x.copy() for x in xs]
                soft = np.exp((loads - loads.max()) / mu)
                soft /= soft.sum()
                f0 = smoothed(loads, mu)
                grads = [-soft[ids] / x ** 2 for ids, x in zip(path_ids, xs)]
                if sum(float(g @ g) for g in grads) < 1e-30:
                    break
                accepted = False
                for _ in range(params.backtracks):
                    trial = []
                    for x, g in zip(xs, grads):
                        t = np.maximum(_project_simplex(x - step * g),
                                       params.reciprocal_floor)
                        trial.append(t / t.sum())
                    f1 = smoothed(edge_loads(trial), mu)
                    decrement = sum(float(g @ (t - x))
                                    for g, t, x in zip(grads, trial, xs))
                    if f1 <= f0 + params.armijo * decrement or decrement > -1e-18:
                        accepted = True
                        break
                    step *= 0.5
                if not accepted:
                    break
                xs = trial
                step = min(step * 2.0, 1e6)
                if prev - f1 < params.rtol * max(1.0, abs(prev)):
                    stale += 1
                    if stale > params.patience:
                        break
                else:
                    stale = 0
                prev = f1
            if not converged:
                break

    pairs = dict(base.pairs)
    for key, ids, x in zip(keys, path_ids, best_xs):
        path, _ = pairs[key]
        pairs[key] = (path, tuple(float(1.0 / xi) for xi in x))
    assignment = WeightedAssignment(graph, pairs, mode)
    return OptimizeResult(assignment, float(best_val), iterations, converged)
