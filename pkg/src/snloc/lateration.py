"""Lateration orderings, grid sufficient conditions, and the binomial placement model.

A (d+1)-lateration ordering starts at a (d+1)-clique and appends points that
connect to at least d+1 earlier points.  A network that admits a spanning
ordering of this kind (with points in general position) is uniquely
localizable, which is what the grid checks and the Monte-Carlo estimate in
this module are probing.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .network import AS, SS, NetworkInstance, build_unit_disk_instance

__all__ = [
    "GridPartition",
    "LaterationOrdering",
    "PlacementSample",
    "GridCheck",
    "SimulationResult",
    "adjacency_matrix",
    "find_lateration_ordering",
    "validate_lateration_ordering",
    "clique_radius_bound",
    "check_grid_sufficient_conditions",
    "sample_binomial_placement",
    "estimate_localizability_probability",
    "designate_anchor_clique",
]


@dataclass(frozen=True, eq=False)
class GridPartition:
    """Decomposition of the unit hypercube into b cells per axis (b >= 3).

    Cells are indexed row-major over axes: in d=2 the cell holding a point
    (x, y) has index ix * b + iy with ix = floor(x * b) clipped to b - 1.
    """

    dimension: int
    b: int
    occupancy: np.ndarray
    cell_of: np.ndarray | None = None

    def __post_init__(self):
        if self.b < 3:
            raise ValueError("need at least 3 cells per axis")
        if self.dimension < 1:
            raise ValueError("dimension must be positive")
        occ = np.asarray(self.occupancy, dtype=int)
        if occ.shape != (self.M,):
            raise ValueError(f"occupancy must have length {self.M}")
        if (occ < 0).any():
            raise ValueError("occupancy counts must be nonnegative")
        object.__setattr__(self, "occupancy", occ)
        if self.cell_of is not None:
            cells = np.asarray(self.cell_of, dtype=int)
            if occ.sum() != len(cells):
                raise ValueError("occupancy total disagrees with number of points")
            object.__setattr__(self, "cell_of", cells)

    @property
    def M(self) -> int:
        return self.b**self.dimension

    @property
    def cell_edge(self) -> float:
        return 1.0 / self.b

    @classmethod
    def template(cls, b: int, dimension: int = 2) -> "GridPartition":
        """Empty partition used as a (b, d) specification."""
        return cls(dimension=dimension, b=b, occupancy=np.zeros(b**dimension, dtype=int))

    @classmethod
    def from_points(cls, points, b: int) -> "GridPartition":
        pts = np.asarray(points, dtype=float)
        d = pts.shape[1]
        idx = np.clip((pts * b).astype(int), 0, b - 1)
        # row-major flatten over axes
        flat = np.zeros(len(pts), dtype=int)
        for axis in range(d):
            flat = flat * b + idx[:, axis]
        occ = np.bincount(flat, minlength=b**d)
        return cls(dimension=d, b=b, occupancy=occ, cell_of=flat)

    @classmethod
    def from_counts(cls, counts, b: int, dimension: int = 2) -> "GridPartition":
        return cls(dimension=dimension, b=b, occupancy=np.asarray(counts, dtype=int))


@dataclass(frozen=True)
class LaterationOrdering:
    """A permutation of all point indices (anchors first block, then sensors)
    whose prefix of length d+1 is a clique and whose later entries each have
    at least d+1 neighbors among their predecessors."""

    permutation: tuple
    d: int


@dataclass(frozen=True)
class PlacementSample:
    """Counts per cell and sampled coordinates from the binomial model."""

    counts: np.ndarray
    points: np.ndarray
    seed: object


@dataclass(frozen=True)
class GridCheck:
    guaranteed: bool
    reason: str


@dataclass(frozen=True)
class SimulationResult:
    rate: float
    stderr: float
    halfwidth95: float
    grid_rate: float
    trials: int
    rows: tuple


def clique_radius_bound(d: int, M: int) -> float:
    """Cell-diagonal radius sqrt(d) / M**(1/d).

    At this radius every pair of points sharing a cell is connected, so with
    M <= (n - 1) / d some cell holds d + 1 points forming a clique.
    """
    if d < 1 or M < 1:
        raise ValueError("d and M must be positive")
    return float(np.sqrt(d) / M ** (1.0 / d))


def adjacency_matrix(instance: NetworkInstance) -> np.ndarray:
    """Boolean adjacency over anchors (0..m-1) then sensors (m..m+n-1).

    Anchor pairs are always marked adjacent: anchor positions are known, so
    they behave as mutually localized neighbors even though anchor-anchor
    measurements are never stored.
    """
    m = instance.n_anchors
    n = instance.n_sensors
    size = m + n
    adj = np.zeros((size, size), dtype=bool)
    adj[:m, :m] = True
    np.fill_diagonal(adj, False)
    for e in instance.edges:
        if e.kind == SS:
            a, b = m + e.i, m + e.j
        else:
            a, b = e.i, m + e.j
        adj[a, b] = adj[b, a] = True
    return adj


def _greedy_closure(adj: np.ndarray, seed, need: int):
    """Absorb every point that gains >= need ordered neighbors.

    Absorbing a point never removes another point's eligibility, so the
    closure is independent of absorption order and greedy is complete for a
    given seed clique.
    """
    size = adj.shape[0]
    order = list(seed)
    in_order = np.zeros(size, dtype=bool)
    in_order[list(seed)] = True
    counts = adj[:, list(seed)].sum(axis=1)
    stack = [v for v in range(size) if not in_order[v] and counts[v] >= need]
    while stack:
        v = stack.pop()
        if in_order[v]:
            continue
        in_order[v] = True
        order.append(v)
        for u in np.flatnonzero(adj[v]):
            if not in_order[u]:
                counts[u] += 1
                if counts[u] == need:
                    stack.append(int(u))
    return order, in_order


def _clique_seeds(adj: np.ndarray, k: int):
    """Yield k-cliques (sorted tuples) of the graph, lazily."""
    size = adj.shape[0]
    if k == 1:
        for v in range(size):
            yield (v,)
        return

    def extend(clique, candidates):
        if len(clique) == k:
            yield tuple(clique)
            return
        for v in np.flatnonzero(candidates):
            v = int(v)
            yield from extend(clique + [v], candidates & adj[v] & (np.arange(size) > v))

    for i in range(size):
        yield from extend([i], adj[i] & (np.arange(size) > i))


def find_lateration_ordering(instance: NetworkInstance) -> LaterationOrdering | None:
    """Search for a spanning (d+1)-lateration ordering.

    Tries the anchor set as the seed clique first, then every other
    (d+1)-clique.  A seed contained in an earlier failed closure is skipped,
    since its closure cannot be larger.
    """
    d = instance.dimension
    need = d + 1
    adj = adjacency_matrix(instance)
    size = adj.shape[0]

    seeds = [tuple(range(need))]  # anchors form a clique by convention
    failed: list[frozenset] = []

    def attempt(seed):
        order, in_order = _greedy_closure(adj, seed, need)
        if len(order) == size:
            return LaterationOrdering(permutation=tuple(order), d=d)
        failed.append(frozenset(order))
        return None

    for seed in seeds:
        result = attempt(seed)
        if result is not None:
            return result

    for clique in _clique_seeds(adj, need):
        if any(set(clique) <= f for f in failed):
            continue
        result = attempt(clique)
        if result is not None:
            return result
    return None


def validate_lateration_ordering(instance: NetworkInstance, ordering: LaterationOrdering) -> bool:
    """Re-check the two defining properties of an ordering against the graph."""
    d = ordering.d
    perm = ordering.permutation
    adj = adjacency_matrix(instance)
    if len(perm) != adj.shape[0] or len(set(perm)) != len(perm):
        return False
    head = perm[: d + 1]
    for a in head:
        for b in head:
            if a != b and not adj[a, b]:
                return False
    for pos in range(d + 1, len(perm)):
        v = perm[pos]
        links = sum(1 for u in perm[:pos] if adj[v, u])
        if links < d + 1:
            return False
    return True


def _grid_xy(grid: GridPartition):
    b = grid.b
    return grid.occupancy.reshape(b, b)  # [ix, iy]


def check_grid_sufficient_conditions(
    grid: GridPartition, instance: NetworkInstance | None, radius: float
) -> GridCheck:
    """Occupancy-based sufficient check for a spanning trilateration (d=2).

    Guaranteed requires radius >= 2 * cell_edge * sqrt(2) (all points of
    neighboring cells mutually connected), every empty cell densely
    surrounded (each existing edge-sharing neighbor holds >= 2 points, one
    of them >= 3), and a starting clique cell: a non-corner cell with >= 3
    points, or a corner cell with >= 3 points next to a cell with >= 2.
    The check is sufficient, not necessary.
    """
    if grid.dimension != 2:
        raise ValueError("grid sufficient conditions are implemented for d=2 only")
    need_r = 2.0 * grid.cell_edge * np.sqrt(2.0)
    if radius < need_r - 1e-15:
        return GridCheck(False, f"radius {radius:.6g} below 2*cell_edge*sqrt(2) = {need_r:.6g}")

    b = grid.b
    occ = _grid_xy(grid)
    corners = {(0, 0), (0, b - 1), (b - 1, 0), (b - 1, b - 1)}

    def simple_neighbors(ix, iy):
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            jx, jy = ix + dx, iy + dy
            if 0 <= jx < b and 0 <= jy < b:
                yield jx, jy

    def all_neighbors(ix, iy):
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                if dx == dy == 0:
                    continue
                jx, jy = ix + dx, iy + dy
                if 0 <= jx < b and 0 <= jy < b:
                    yield jx, jy

    for ix in range(b):
        for iy in range(b):
            if occ[ix, iy] != 0:
                continue
            neigh = [occ[j] for j in simple_neighbors(ix, iy)]
            if any(c < 2 for c in neigh) or max(neigh) < 3:
                return GridCheck(
                    False, f"empty cell ({ix},{iy}) is not densely surrounded"
                )

    for ix in range(b):
        for iy in range(b):
            if occ[ix, iy] < 3:
                continue
            if (ix, iy) not in corners:
                return GridCheck(True, f"non-corner cell ({ix},{iy}) holds a 3-clique")
            if any(occ[j] >= 2 for j in all_neighbors(ix, iy)):
                return GridCheck(
                    True,
                    f"corner cell ({ix},{iy}) holds a 3-clique with a 2-point neighbor",
                )

    return GridCheck(False, "no qualifying cell with 3 points")


def sample_binomial_placement(n: int, grid: GridPartition, seed) -> PlacementSample:
    """Draw per-cell counts Binomial(n, 1/M) independently, then place that
    many points uniformly inside each cell.  Deterministic for a fixed seed."""
    if n < 1:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    d = grid.dimension
    b = grid.b
    M = grid.M
    counts = rng.binomial(n, 1.0 / M, size=M)
    pieces = []
    cell_of = []
    for cell in range(M):
        c = int(counts[cell])
        if c == 0:
            continue
        # invert the row-major flattening into per-axis indices
        rem = cell
        idx = np.zeros(d, dtype=int)
        for axis in range(d - 1, -1, -1):
            idx[axis] = rem % b
            rem //= b
        low = idx / b
        pieces.append(low + rng.random((c, d)) / b)
        cell_of.extend([cell] * c)
    points = np.vstack(pieces) if pieces else np.zeros((0, d))
    return PlacementSample(counts=counts, points=points, seed=seed)


def designate_anchor_clique(points, radius: float, d: int = 2):
    """Indices of the first d+1 mutually connected points, or None."""
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    if n < d + 1:
        return None
    diff = pts[:, None, :] - pts[None, :, :]
    adj = np.sqrt((diff**2).sum(axis=2)) < radius
    np.fill_diagonal(adj, False)
    if d == 2:
        for i in range(n):
            for j in range(i + 1, n):
                if not adj[i, j]:
                    continue
                common = np.flatnonzero(adj[i] & adj[j])
                common = common[common > j]
                if len(common):
                    return (i, j, int(common[0]))
        return None
    for clique in _clique_seeds(adj, d + 1):
        return clique
    return None


def estimate_localizability_probability(
    n: int, grid: GridPartition, radius: float, trials: int, seed
) -> SimulationResult:
    """Monte-Carlo rate of spanning-ordering existence under the binomial model.

    Each trial samples a placement, designates d+1 same-cell points as
    anchors (any clique as fallback), and asks find_lateration_ordering for
    a spanning ordering.  Also reports the fraction of trials passing the
    occupancy-based sufficient conditions.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    d = grid.dimension
    coupled = d * grid.M + 1
    if n != coupled:
        warnings.warn(
            f"n = {n} decouples the placement model from n = d*M+1 = {coupled}; "
            "the analytic lower bound assumes the coupled value",
            stacklevel=2,
        )

    ordered_hits = 0
    grid_hits = 0
    rows = []
    for t in range(trials):
        sample = sample_binomial_placement(n, grid, (seed, t))
        pts = sample.points
        total = len(pts)

        trial_grid = GridPartition.from_points(pts, grid.b) if total else None
        grid_ok = False
        if trial_grid is not None and d == 2:
            grid_ok = check_grid_sufficient_conditions(trial_grid, None, radius).guaranteed

        ordered = False
        if total >= d + 1:
            anchor_idx = None
            rich = np.flatnonzero(sample.counts >= d + 1)
            if len(rich):
                cell = int(rich[0])
                offsets = np.cumsum(np.concatenate([[0], sample.counts[:-1]]))
                first = int(offsets[cell])
                anchor_idx = tuple(range(first, first + d + 1))
            if anchor_idx is None:
                anchor_idx = designate_anchor_clique(pts, radius, d)
            if anchor_idx is not None:
                rest = [i for i in range(total) if i not in anchor_idx]
                if not rest:
                    ordered = True  # d+1 points forming the designated clique
                else:
                    inst = build_unit_disk_instance(pts[list(anchor_idx)], pts[rest], radius)
                    ordered = find_lateration_ordering(inst) is not None

        ordered_hits += ordered
        grid_hits += grid_ok
        rows.append((t, n, grid.b, radius, int(ordered), int(grid_ok)))

    rate = ordered_hits / trials
    stderr = float(np.sqrt(rate * (1.0 - rate) / trials))
    return SimulationResult(
        rate=rate,
        stderr=stderr,
        halfwidth95=1.96 * stderr,
        grid_rate=grid_hits / trials,
        trials=trials,
        rows=tuple(rows),
    )
