"""Communication graphs: generation, power graphs, covers and leader sets.

Clique covering number and dominating number are NP-hard; this module
computes greedy upper bounds (deterministic, lowest-index tie-breaks) used
by the bound calculators, plus exact brute-force versions for small graphs
used as test oracles.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

GRAPH_KINDS = ("erdos_renyi", "complete", "path", "star", "cycle")

MAX_ER_RETRIES = 1000


@dataclass(frozen=True)
class GraphSpec:
    kind: str
    n: int
    p: float | None = None
    require_connected: bool = True

    def __post_init__(self):
        if self.kind not in GRAPH_KINDS:
            raise ValueError(f"unknown graph kind {self.kind!r}, expected one of {GRAPH_KINDS}")
        if self.n < 1:
            raise ValueError(f"need n >= 1 agents, got {self.n}")
        if self.kind == "erdos_renyi":
            if self.p is None or not 0.0 <= self.p <= 1.0:
                raise ValueError(f"edge probability must be in [0, 1], got {self.p}")


@dataclass(frozen=True)
class Topology:
    """Undirected simple graph on agents 0..n-1 (no stored self-loops).

    Protocol semantics always let an agent observe its own reward, so the
    implicit self-edge is handled by callers, never stored here.
    """

    n: int
    neighbors: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        for i, nbrs in enumerate(self.neighbors):
            for j in nbrs:
                if j == i:
                    raise ValueError(f"self-loop at vertex {i}")
                if i not in self.neighbors[j]:
                    raise ValueError(f"asymmetric edge ({i}, {j})")

    @property
    def degree(self) -> tuple[int, ...]:
        return tuple(len(nbrs) for nbrs in self.neighbors)


def topology_from_edges(n: int, edges) -> Topology:
    nbrs = [set() for _ in range(n)]
    for i, j in edges:
        if i != j:
            nbrs[i].add(j)
            nbrs[j].add(i)
    return Topology(n, tuple(tuple(sorted(s)) for s in nbrs))


def adjacency_matrix(g: Topology) -> np.ndarray:
    """Boolean adjacency matrix without the diagonal."""
    a = np.zeros((g.n, g.n), dtype=bool)
    for i, nbrs in enumerate(g.neighbors):
        a[i, list(nbrs)] = True
    return a


def is_connected(g: Topology) -> bool:
    if g.n <= 1:
        return True
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for j in g.neighbors[i]:
            if j not in seen:
                seen.add(j)
                stack.append(j)
    return len(seen) == g.n


def generate_topology(
    spec: GraphSpec,
    rng: np.random.Generator | None = None,
    require_connected: bool | None = None,
) -> Topology:
    """Generate a graph from the spec.

    Erdos-Renyi graphs are resampled (bounded retries) until connected when
    requested; the deterministic families are returned directly.
    """
    n = spec.n
    if require_connected is None:
        require_connected = spec.require_connected
    if spec.kind == "complete":
        return topology_from_edges(n, combinations(range(n), 2))
    if spec.kind == "path":
        return topology_from_edges(n, ((i, i + 1) for i in range(n - 1)))
    if spec.kind == "star":
        return topology_from_edges(n, ((0, i) for i in range(1, n)))
    if spec.kind == "cycle":
        edges = [(i, i + 1) for i in range(n - 1)]
        if n > 2:
            edges.append((n - 1, 0))
        return topology_from_edges(n, edges)
    if rng is None:
        raise ValueError("erdos_renyi generation needs an rng")
    iu, ju = np.triu_indices(n, k=1)
    for _ in range(MAX_ER_RETRIES):
        mask = rng.random(iu.shape[0]) < spec.p
        g = topology_from_edges(n, zip(iu[mask], ju[mask]))
        if not require_connected or is_connected(g):
            return g
    raise RuntimeError(
        f"no connected Erdos-Renyi graph with n={n}, p={spec.p} after {MAX_ER_RETRIES} attempts"
    )


def bfs_distances(g: Topology) -> np.ndarray:
    """All-pairs shortest-path hop counts; np.inf where unreachable."""
    dist = np.full((g.n, g.n), np.inf)
    for s in range(g.n):
        dist[s, s] = 0
        frontier = [s]
        level = 0
        while frontier:
            level += 1
            nxt = []
            for i in frontier:
                for j in g.neighbors[i]:
                    if dist[s, j] == np.inf:
                        dist[s, j] = level
                        nxt.append(j)
            frontier = nxt
    return dist


def greedy_clique_cover(adj: np.ndarray) -> list[list[int]]:
    """Partition vertices into cliques by greedy peeling.

    Repeatedly grow a maximal clique from the lowest-index uncovered
    vertex, adding uncovered candidates in ascending index order.
    """
    n = adj.shape[0]
    uncovered = list(range(n))
    blocks = []
    while uncovered:
        v = uncovered[0]
        clique = [v]
        for u in uncovered[1:]:
            if all(adj[u, c] for c in clique):
                clique.append(u)
        blocks.append(clique)
        uncovered = [u for u in uncovered if u not in set(clique)]
    return blocks


def greedy_dominating_set(adj: np.ndarray) -> list[int]:
    """Greedy max-coverage dominating set (closed neighborhoods)."""
    n = adj.shape[0]
    closed = adj.copy()
    np.fill_diagonal(closed, True)
    uncovered = np.ones(n, dtype=bool)
    chosen = []
    while uncovered.any():
        gain = (closed & uncovered).sum(axis=1)
        v = int(np.argmax(gain))  # argmax takes the lowest index on ties
        chosen.append(v)
        uncovered &= ~closed[v]
    return chosen


@dataclass(frozen=True)
class GraphAnalysis:
    """Derived structure of the gamma-th power graph of a base topology."""

    base: Topology
    gamma: int
    power: Topology
    distances: np.ndarray
    degrees_gamma: tuple[int, ...]
    degrees_gamma_plus: tuple[int, ...]
    clique_cover: tuple[tuple[int, ...], ...]
    chi_hat: int
    dominating_set: tuple[int, ...]
    gammabar_hat: int
    diameter: int


def power_adjacency(dist: np.ndarray, gamma: int) -> np.ndarray:
    return (dist >= 1) & (dist <= gamma)


def analyze(g: Topology, gamma: int) -> GraphAnalysis:
    """Compute the power graph, covers and dominating set for hop radius gamma.

    Greedy cover/dominating counts are taken as the best over hop radii
    1..gamma: cliques and dominating sets of a lower power remain valid in
    a higher one, so this keeps both counts nonincreasing in gamma while
    staying upper bounds on the exact numbers.
    """
    if gamma < 1:
        raise ValueError(f"hop radius must be >= 1, got {gamma}")
    dist = bfs_distances(g)
    finite = dist[np.isfinite(dist)]
    diameter = int(finite.max()) if finite.size else 0
    padj = power_adjacency(dist, gamma)
    power = topology_from_edges(g.n, zip(*np.nonzero(np.triu(padj))))

    best_cover = None
    best_dom = None
    for r in range(1, gamma + 1):
        radj = padj if r == gamma else power_adjacency(dist, r)
        cover = greedy_clique_cover(radj)
        if best_cover is None or len(cover) < len(best_cover):
            best_cover = cover
        dom = greedy_dominating_set(radj)
        if best_dom is None or len(dom) < len(best_dom):
            best_dom = dom

    deg = tuple(int(d) for d in padj.sum(axis=1))
    return GraphAnalysis(
        base=g,
        gamma=gamma,
        power=power,
        distances=dist,
        degrees_gamma=deg,
        degrees_gamma_plus=tuple(d + 1 for d in deg),
        clique_cover=tuple(tuple(b) for b in best_cover),
        chi_hat=len(best_cover),
        dominating_set=tuple(best_dom),
        gammabar_hat=len(best_dom),
        diameter=diameter,
    )


def leader_assignment(a: GraphAnalysis) -> dict[int, tuple[int, int]]:
    """Map every agent to (closest leader, hop distance in the base graph).

    Leaders are the dominating set of the power graph and map to themselves
    at distance 0; ties among equally close leaders go to the lowest leader
    index.  Every assigned distance is at most gamma by construction.
    """
    if a.base.n > 1 and not np.isfinite(a.distances).all():
        raise ValueError("leader assignment needs a connected graph")
    leaders = sorted(a.dominating_set)
    out = {}
    for j in range(a.base.n):
        if j in a.dominating_set:
            out[j] = (j, 0)
            continue
        d = [(a.distances[i, j], i) for i in leaders]
        dist, i = min(d)
        assert dist <= a.gamma
        out[j] = (i, int(dist))
    return out


def to_adjacency_text(g: Topology) -> str:
    """Adjacency-list dump, one line per vertex: ``i: j k l``."""
    return "\n".join(f"{i}: {' '.join(map(str, nbrs))}".rstrip() for i, nbrs in enumerate(g.neighbors))


def exact_clique_cover_number(adj: np.ndarray) -> int:
    """Minimum clique partition size by exhaustive search (small graphs only).

    Equals the chromatic number of the complement graph; solved by
    backtracking over color assignments.
    """
    n = adj.shape[0]
    if n == 0:
        return 0
    comp = ~adj
    np.fill_diagonal(comp, False)

    def colorable(k: int) -> bool:
        colors = [-1] * n

        def place(v: int, used: int) -> bool:
            if v == n:
                return True
            for c in range(min(used + 1, k)):
                if all(colors[u] != c for u in range(v) if comp[v, u]):
                    colors[v] = c
                    if place(v + 1, max(used, c + 1)):
                        return True
                    colors[v] = -1
            return False

        return place(0, 0)

    for k in range(1, n + 1):
        if colorable(k):
            return k
    return n


def exact_dominating_number(adj: np.ndarray) -> int:
    """Minimum dominating set size by exhaustive search (small graphs only)."""
    n = adj.shape[0]
    if n == 0:
        return 0
    closed = adj.copy()
    np.fill_diagonal(closed, True)
    for size in range(1, n + 1):
        for subset in combinations(range(n), size):
            if closed[list(subset)].any(axis=0).all():
                return size
    return n
