"""Agent network topology.

An immutable undirected graph over dense integer vertices 0..V-1, with all
hop distances precomputed by per-source BFS.  On top of that sit the
neighborhood/boundary notions the decentralized controller needs:

* ``neighborhood(v, r)`` -- vertices within r hops of v,
* ``boundary(v, r)``     -- vertices at exactly r hops,
* ``boundary_growth``    -- h(gamma) = max_v |{u : d(u,v) = gamma}|,
* ``st_neighborhood``    -- the space-time window of a local solve and its
  pinned boundary,

plus the named generators (path, cycle, grid, star, complete, ring_of_blocks)
and edge-list / JSON input formats.
"""

from __future__ import annotations

import math
from collections import deque
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Network",
    "st_neighborhood",
    "path_graph",
    "cycle_graph",
    "grid_graph",
    "star_graph",
    "complete_graph",
    "ring_of_blocks",
    "from_edge_list_text",
    "from_json_dict",
    "laplacian",
    "make_network",
]

#: Sentinel stored in the distance table for unreachable pairs.
_UNREACHABLE = -1


class Network:
    """Undirected, unweighted agent graph with precomputed hop distances.

    Immutable after construction; safe for concurrent reads.  Distances for
    disconnected pairs are reported as ``math.inf``.
    """

    __slots__ = ("vertex_count", "edges", "_adj", "_dist")

    def __init__(self, vertex_count: int, edges: Iterable[Sequence[int]]):
        if vertex_count < 1:
            raise ValueError(f"vertex_count must be positive, got {vertex_count}")
        self.vertex_count = int(vertex_count)

        canonical: set[tuple[int, int]] = set()
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if not (0 <= u < vertex_count and 0 <= v < vertex_count):
                raise ValueError(f"edge ({u},{v}) out of range for {vertex_count} vertices")
            if u == v:
                raise ValueError(f"self-loop at vertex {u} not allowed")
            canonical.add((min(u, v), max(u, v)))
        self.edges: tuple[tuple[int, int], ...] = tuple(sorted(canonical))

        adj: list[list[int]] = [[] for _ in range(vertex_count)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        self._adj: tuple[tuple[int, ...], ...] = tuple(tuple(sorted(a)) for a in adj)
        self._dist = self._bfs_all_pairs()

    # -- construction helpers -------------------------------------------------

    def _bfs_all_pairs(self) -> np.ndarray:
        n = self.vertex_count
        dist = np.full((n, n), _UNREACHABLE, dtype=np.int32)
        for s in range(n):
            dist[s, s] = 0
            queue = deque([s])
            while queue:
                v = queue.popleft()
                dv = dist[s, v]
                for u in self._adj[v]:
                    if dist[s, u] == _UNREACHABLE:
                        dist[s, u] = dv + 1
                        queue.append(u)
        return dist

    def _check_vertex(self, v: int) -> int:
        v = int(v)
        if not 0 <= v < self.vertex_count:
            raise ValueError(f"vertex index {v} out of range [0, {self.vertex_count})")
        return v

    # -- basic queries ---------------------------------------------------------

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adj[self._check_vertex(v)]

    def degree(self, v: int) -> int:
        return len(self._adj[self._check_vertex(v)])

    @property
    def max_degree(self) -> int:
        """Largest vertex degree (the Delta entering every decay formula)."""
        return max((len(a) for a in self._adj), default=0)

    @property
    def min_degree(self) -> int:
        return min((len(a) for a in self._adj), default=0)

    def distance(self, u: int, v: int) -> float:
        """Hop distance, or ``math.inf`` when u and v are disconnected."""
        d = self._dist[self._check_vertex(u), self._check_vertex(v)]
        return math.inf if d == _UNREACHABLE else int(d)

    def eccentricity(self, v: int) -> float:
        row = self._dist[self._check_vertex(v)]
        if np.any(row == _UNREACHABLE):
            return math.inf
        return int(row.max())

    @property
    def diameter(self) -> float:
        """Largest finite eccentricity; ``math.inf`` if the graph is disconnected."""
        if np.any(self._dist == _UNREACHABLE):
            return math.inf
        return int(self._dist.max())

    @property
    def is_connected(self) -> bool:
        return not np.any(self._dist == _UNREACHABLE)

    # -- neighborhoods ---------------------------------------------------------

    def neighborhood(self, v: int, r: int) -> set[int]:
        """Vertices at hop distance <= r from v (unreachable vertices excluded)."""
        v = self._check_vertex(v)
        if r < 0:
            return set()
        row = self._dist[v]
        return set(np.nonzero((row >= 0) & (row <= r))[0].tolist())

    def boundary(self, v: int, r: int) -> set[int]:
        """Vertices at hop distance exactly r from v."""
        v = self._check_vertex(v)
        if r < 0:
            return set()
        row = self._dist[v]
        return set(np.nonzero(row == r)[0].tolist())

    def boundary_growth(self, r_max: int) -> list[int]:
        """h(gamma) = max over v of |boundary(v, gamma)| for gamma = 0..r_max."""
        out = []
        for gamma in range(r_max + 1):
            out.append(max((np.count_nonzero(self._dist[v] == gamma)
                            for v in range(self.vertex_count)), default=0))
        return out

    def closure(self, vertices: Iterable[int]) -> set[int]:
        """The set together with all of its 1-hop neighbors (S plus)."""
        s = {self._check_vertex(v) for v in vertices}
        out = set(s)
        for v in s:
            out.update(self._adj[v])
        return out

    def edges_within(self, vertices: Iterable[int]) -> list[tuple[int, int]]:
        """Edges with both endpoints inside the given vertex set (E(S))."""
        s = {self._check_vertex(v) for v in vertices}
        return [(u, v) for (u, v) in self.edges if u in s and v in s]

    # -- serialization ---------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {"n": self.vertex_count, "edges": [list(e) for e in self.edges]}

    def to_edge_list_text(self) -> str:
        lines = [f"# {self.vertex_count} vertices"]
        lines += [f"{u} {v}" for u, v in self.edges]
        return "\n".join(lines) + "\n"

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Network(vertex_count={self.vertex_count}, edges={len(self.edges)})"

    def __eq__(self, other) -> bool:
        return (isinstance(other, Network)
                and other.vertex_count == self.vertex_count
                and other.edges == self.edges)

    def __hash__(self) -> int:
        return hash((self.vertex_count, self.edges))


def st_neighborhood(net: Network, t: int, v: int, k: int, r: int
                    ) -> tuple[set[tuple[int, int]], set[tuple[int, int]]]:
    """Space-time window of a local solve: (interior, boundary).

    The full window is {t..t+k-1} x neighborhood(v, r).  The interior is the
    shrunk window {t..t+k-2} x neighborhood(v, r-1); the boundary is
    everything else: the final time slice plus the outer vertex ring at each
    earlier time.  Interior and boundary are disjoint and their union is the
    full window.
    """
    if k < 1:
        raise ValueError(f"window length k must be >= 1, got {k}")
    if r < 0:
        raise ValueError(f"radius r must be >= 0, got {r}")
    ball = net.neighborhood(v, r)
    inner = net.neighborhood(v, r - 1)
    interior = {(tau, u) for tau in range(t, t + k - 1) for u in inner}
    full = {(tau, u) for tau in range(t, t + k) for u in ball}
    return interior, full - interior


# -- generators ----------------------------------------------------------------


def path_graph(n: int) -> Network:
    if n < 1:
        raise ValueError("path needs at least 1 vertex")
    return Network(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Network:
    if n < 3:
        raise ValueError("cycle needs at least 3 vertices")
    return Network(n, [(i, (i + 1) % n) for i in range(n)])


def grid_graph(rows: int, cols: int) -> Network:
    """rows x cols 4-neighbor lattice, vertex index = row*cols + col."""
    if rows < 1 or cols < 1:
        raise ValueError("grid needs positive dimensions")
    edges = []
    for i in range(rows):
        for j in range(cols):
            if j + 1 < cols:
                edges.append((i * cols + j, i * cols + j + 1))
            if i + 1 < rows:
                edges.append((i * cols + j, (i + 1) * cols + j))
    return Network(rows * cols, edges)


def star_graph(leaves: int) -> Network:
    """Hub vertex 0 connected to `leaves` leaf vertices."""
    if leaves < 1:
        raise ValueError("star needs at least 1 leaf")
    return Network(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def complete_graph(n: int) -> Network:
    if n < 1:
        raise ValueError("complete graph needs at least 1 vertex")
    return Network(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def ring_of_blocks(N: int, d: int) -> Network:
    """Ring of N blocks of d vertices each, complete bipartite between
    consecutive blocks, no intra-block edges.  Every vertex has degree 2d.

    Vertex i*d + j is the j-th member of block i.
    """
    if N < 3:
        raise ValueError(f"ring_of_blocks needs N >= 3 blocks, got {N} (ring degenerates)")
    if d < 1:
        raise ValueError(f"ring_of_blocks needs d >= 1 vertices per block, got {d}")
    edges = []
    for b in range(N):
        nb = (b + 1) % N
        for i in range(d):
            for j in range(d):
                edges.append((b * d + i, nb * d + j))
    return Network(N * d, edges)


# -- input formats ---------------------------------------------------------------


def from_edge_list_text(text: str, vertex_count: int | None = None) -> Network:
    """Parse "u v" pairs, one per line; '#' starts a comment.

    When vertex_count is omitted it defaults to max index + 1.
    """
    edges = []
    top = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'u v', got {raw!r}")
        u, v = int(parts[0]), int(parts[1])
        top = max(top, u, v)
        edges.append((u, v))
    if vertex_count is None:
        vertex_count = top + 1
    return Network(vertex_count, edges)


def from_json_dict(data: dict) -> Network:
    """Build from {"n": int, "edges": [[u,v], ...]}."""
    return Network(int(data["n"]), data.get("edges", []))


def laplacian(net: Network) -> np.ndarray:
    """Dense graph Laplacian: degree on the diagonal, -1 per edge."""
    L = np.zeros((net.vertex_count, net.vertex_count))
    for u, v in net.edges:
        L[u, u] += 1.0
        L[v, v] += 1.0
        L[u, v] -= 1.0
        L[v, u] -= 1.0
    return L


_GENERATORS = {
    "path": lambda p: path_graph(int(p["n"])),
    "cycle": lambda p: cycle_graph(int(p["n"])),
    "grid": lambda p: grid_graph(int(p["rows"]), int(p["cols"])),
    "star": lambda p: star_graph(int(p["leaves"])),
    "complete": lambda p: complete_graph(int(p["n"])),
    "ring_of_blocks": lambda p: ring_of_blocks(int(p["N"]), int(p["d"])),
}


def make_network(name: str, **params) -> Network:
    """Generator registry used by config files: make_network("cycle", n=8)."""
    try:
        gen = _GENERATORS[name]
    except KeyError:
        raise ValueError(f"unknown graph generator {name!r}; known: {sorted(_GENERATORS)}")
    return gen(params)
