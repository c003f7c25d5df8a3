"""Coupling graphs: rectangular lattices, arbitrary edge lists, shortest paths.

Sites are indexed 0-based.  Lattice sites use row-major indexing with the
first dimension varying fastest, so the coordinate vector (x1, ..., xD) maps
to x1 + N1*x2 + N1*N2*x3 + ...
"""

from collections import deque
from dataclasses import dataclass, field
from math import prod


@dataclass(frozen=True)
class LatticeSpec:
    """Rectangular lattice geometry: per-dimension extents and boundary type.

    ``shape`` holds the number of sites along each dimension.  ``boundary``
    is either "periodic" or "open".  Periodic dimensions need at least 3
    sites (length 2 would duplicate the wrap edge), open ones at least 2.
    """

    shape: tuple
    boundary: str

    def __post_init__(self):
        shape = tuple(int(n) for n in self.shape)
        object.__setattr__(self, "shape", shape)
        if self.boundary not in ("periodic", "open"):
            raise ValueError(f"boundary must be 'periodic' or 'open', got {self.boundary!r}")
        if not shape:
            raise ValueError("lattice needs at least one dimension")
        minimum = 3 if self.boundary == "periodic" else 2
        for n in shape:
            if n < minimum:
                raise ValueError(
                    f"{self.boundary} lattice needs >= {minimum} sites per dimension, got {n}")

    @classmethod
    def cubic(cls, dims, n, boundary):
        """N^D lattice: ``dims`` dimensions with ``n`` sites in each."""
        return cls((n,) * dims, boundary)

    @property
    def dims(self):
        return len(self.shape)

    @property
    def n_sites(self):
        return prod(self.shape)

    @property
    def periodic(self):
        return self.boundary == "periodic"

    def site_index(self, coords):
        """Map a coordinate vector to its site index (first dimension fastest)."""
        if len(coords) != self.dims:
            raise ValueError(f"expected {self.dims} coordinates, got {len(coords)}")
        idx, mult = 0, 1
        for c, n in zip(coords, self.shape):
            c = c % n if self.periodic else c
            if not 0 <= c < n:
                raise ValueError(f"coordinate {coords} out of range for shape {self.shape}")
            idx += c * mult
            mult *= n
        return idx

    def site_coords(self, index):
        """Inverse of site_index."""
        if not 0 <= index < self.n_sites:
            raise ValueError(f"site {index} out of range")
        out = []
        for n in self.shape:
            out.append(index % n)
            index //= n
        return tuple(out)

    def displacement_range(self, dim):
        """Admissible displacement interval along ``dim``.

        Periodic boundaries use the asymmetric window
        [-floor((N-1)/2), ceil((N-1)/2)] so that every ordered pair has a
        unique canonical displacement; open boundaries allow 1-N .. N-1.
        """
        n = self.shape[dim]
        if self.periodic:
            return -((n - 1) // 2), (n - 1) - (n - 1) // 2
        return 1 - n, n - 1

    def canonical_displacement(self, i_coords, k_coords):
        """Displacement vector from i to k, folded into the canonical range."""
        out = []
        for d in range(self.dims):
            delta = k_coords[d] - i_coords[d]
            if self.periodic:
                lo, _ = self.displacement_range(d)
                delta = (delta - lo) % self.shape[d] + lo
            out.append(delta)
        return tuple(out)


@dataclass(frozen=True)
class Path:
    """A simple walk given as a site sequence; edges pair up consecutive sites."""

    sites: tuple

    def __post_init__(self):
        object.__setattr__(self, "sites", tuple(int(s) for s in self.sites))
        if len(self.sites) < 2:
            raise ValueError("a path needs at least two sites")
        if len(set(self.sites)) != len(self.sites):
            raise ValueError(f"path revisits a site: {self.sites}")

    @property
    def edges(self):
        s = self.sites
        return tuple((min(a, b), max(a, b)) for a, b in zip(s, s[1:]))

    def __len__(self):
        return len(self.sites) - 1

    @property
    def source(self):
        return self.sites[0]

    @property
    def target(self):
        return self.sites[-1]


@dataclass(frozen=True)
class Graph:
    """Undirected simple connected coupling graph.

    ``edges`` is a sorted tuple of (u, v) pairs with u < v; ``adjacency``
    lists neighbors of each site in ascending order.  ``lattice`` carries
    the generating LatticeSpec when the graph came from build_lattice.
    """

    n_sites: int
    edges: tuple
    adjacency: tuple
    lattice: LatticeSpec = None
    _edge_index: dict = field(default=None, repr=False, compare=False)

    @property
    def n_edges(self):
        return len(self.edges)

    def neighbors(self, site):
        return self.adjacency[site]

    def degree(self, site):
        return len(self.adjacency[site])

    def edge_index(self, u, v):
        """Position of edge (u, v) within ``edges``; raises if absent."""
        return self._edge_index[(min(u, v), max(u, v))]

    def has_edge(self, u, v):
        return (min(u, v), max(u, v)) in self._edge_index


def _assemble(n_sites, edge_set, lattice=None):
    edges = tuple(sorted(edge_set))
    adjacency = [[] for _ in range(n_sites)]
    for (u, v) in edges:
        adjacency[u].append(v)
        adjacency[v].append(u)
    adjacency = tuple(tuple(sorted(a)) for a in adjacency)
    g = Graph(n_sites, edges, adjacency, lattice,
              {e: i for i, e in enumerate(edges)})
    if _bfs_distances(g, 0).count(-1):
        raise ValueError("graph is disconnected; bound constants need a finite diameter")
    return g


def build_lattice(spec):
    """Nearest-neighbor rectangular lattice for the given LatticeSpec."""
    edge_set = set()
    for idx in range(spec.n_sites):
        coords = spec.site_coords(idx)
        for d in range(spec.dims):
            stepped = list(coords)
            if coords[d] + 1 < spec.shape[d]:
                stepped[d] += 1
            elif spec.periodic:
                stepped[d] = 0
            else:
                continue
            j = spec.site_index(tuple(stepped))
            edge_set.add((min(idx, j), max(idx, j)))
    return _assemble(spec.n_sites, edge_set, spec)


def from_edge_list(pairs):
    """Graph from (u, v) pairs; deduplicates, sets n_sites = max index + 1."""
    edge_set = set()
    top = -1
    for (u, v) in pairs:
        u, v = int(u), int(v)
        if u == v:
            raise ValueError(
                f"self-loop ({u},{u}) rejected: couplings connect distinct spins")
        if u < 0 or v < 0:
            raise ValueError(f"negative site index in edge ({u},{v})")
        edge_set.add((min(u, v), max(u, v)))
        top = max(top, u, v)
    if not edge_set:
        raise ValueError("empty edge list")
    return _assemble(top + 1, edge_set)


def _bfs_distances(g, source):
    dist = [-1] * g.n_sites
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in g.adjacency[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def shortest_path(g, i, k):
    """Deterministic shortest path from i to k.

    Among the (possibly many) shortest paths, this picks the one obtained by
    walking back from k and always choosing the smallest-index predecessor.
    """
    if i == k:
        raise ValueError("shortest_path needs two distinct sites")
    dist = _bfs_distances(g, i)
    sites = [k]
    cur = k
    while cur != i:
        cur = min(v for v in g.adjacency[cur] if dist[v] == dist[cur] - 1)
        sites.append(cur)
    return Path(tuple(reversed(sites)))


def distance(g, i, k):
    if i == k:
        return 0
    return _bfs_distances(g, i)[k]


def diameter(g):
    """Maximum graph distance over all site pairs."""
    return max(max(_bfs_distances(g, s)) for s in range(g.n_sites))


def canonical_lattice_path(g, i_coords, displacement):
    """Axis-ordered lattice path: start at i, walk dimension 1 first, then 2, ...

    ``displacement`` must be nonzero and, for periodic boundaries, each
    component must lie in the canonical displacement range.  The path length
    equals the 1-norm of the displacement.
    """
    spec = g.lattice
    if spec is None:
        raise ValueError("canonical paths need lattice metadata")
    i_coords = tuple(int(c) for c in i_coords)
    displacement = tuple(int(c) for c in displacement)
    if len(displacement) != spec.dims:
        raise ValueError(f"expected {spec.dims} displacement components")
    if all(c == 0 for c in displacement):
        raise ValueError("displacement must be nonzero")
    for d, delta in enumerate(displacement):
        lo, hi = spec.displacement_range(d)
        if not lo <= delta <= hi:
            raise ValueError(
                f"displacement component {delta} outside [{lo},{hi}] in dimension {d + 1}")
    if not spec.periodic:
        for d in range(spec.dims):
            tgt = i_coords[d] + displacement[d]
            if not (0 <= i_coords[d] < spec.shape[d] and 0 <= tgt < spec.shape[d]):
                raise ValueError("path leaves the open lattice")
    sites = [spec.site_index(i_coords)]
    cur = list(i_coords)
    for d in range(spec.dims):
        step = 1 if displacement[d] > 0 else -1
        for _ in range(abs(displacement[d])):
            cur[d] += step
            if spec.periodic:
                cur[d] %= spec.shape[d]
            sites.append(spec.site_index(tuple(cur)))
    return Path(tuple(sites))
