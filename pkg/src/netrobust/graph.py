"""Directed simple graphs with stable node ids and removal tracking.

Nodes are integer ids ``0..n-1``. Removing a node marks it inactive and
drops its incident edges; ids are never renumbered, so removal sequences
and adjacency-image coordinates stay aligned with the original matrix.

Storage is adjacency sets per node plus a hash set of (src, dst) pairs:
neighbor iteration is O(deg) and edge-existence probes are O(1).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import FormatError, ValidationError

EDGE_LIST_MAGIC = "# RNET-EDGES v1"


class DiGraph:
    """Directed simple graph: no self-loops, no duplicate edges."""

    __slots__ = ("n", "_out", "_in", "_edges", "_active", "_n_active")

    def __init__(self, n: int):
        if n < 1:
            raise ValidationError(f"node count must be positive, got {n}")
        self.n = int(n)
        self._out: list[set[int]] = [set() for _ in range(n)]
        self._in: list[set[int]] = [set() for _ in range(n)]
        self._edges: set[tuple[int, int]] = set()
        self._active: list[bool] = [True] * n
        self._n_active = n

    # -- construction -------------------------------------------------------

    def add_edge(self, src: int, dst: int) -> None:
        """Insert src -> dst. Duplicates are ignored; self-loops rejected."""
        self._check_node(src)
        self._check_node(dst)
        if src == dst:
            raise ValidationError(f"self-loop rejected: {src} -> {dst}")
        if not (self._active[src] and self._active[dst]):
            raise ValidationError("cannot add an edge touching a removed node")
        if (src, dst) in self._edges:
            return
        self._edges.add((src, dst))
        self._out[src].add(dst)
        self._in[dst].add(src)

    def copy(self) -> "DiGraph":
        g = DiGraph.__new__(DiGraph)
        g.n = self.n
        g._out = [set(s) for s in self._out]
        g._in = [set(s) for s in self._in]
        g._edges = set(self._edges)
        g._active = list(self._active)
        g._n_active = self._n_active
        return g

    # -- queries ------------------------------------------------------------

    def _check_node(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise ValidationError(f"node id {v} out of range [0, {self.n})")

    def is_active(self, v: int) -> bool:
        self._check_node(v)
        return self._active[v]

    def active_nodes(self) -> list[int]:
        return [v for v in range(self.n) if self._active[v]]

    @property
    def n_active(self) -> int:
        return self._n_active

    @property
    def n_edges(self) -> int:
        return len(self._edges)

    def has_edge(self, src: int, dst: int) -> bool:
        return (src, dst) in self._edges

    def edges(self) -> set[tuple[int, int]]:
        return set(self._edges)

    def out_neighbors(self, v: int) -> set[int]:
        return self._out[v]

    def in_neighbors(self, v: int) -> set[int]:
        return self._in[v]

    def out_degree(self, v: int) -> int:
        return len(self._out[v])

    def in_degree(self, v: int) -> int:
        return len(self._in[v])

    def is_intact(self) -> bool:
        return self._n_active == self.n

    # -- mutation -----------------------------------------------------------

    def remove_node(self, v: int) -> None:
        """Deactivate ``v`` and drop all incident edges.

        Ids of remaining nodes do not change. Removing an already removed
        node is an error.
        """
        self._check_node(v)
        if not self._active[v]:
            raise ValidationError(f"node {v} already removed")
        for w in self._out[v]:
            self._in[w].discard(v)
            self._edges.discard((v, w))
        for u in self._in[v]:
            self._out[u].discard(v)
            self._edges.discard((u, v))
        self._out[v].clear()
        self._in[v].clear()
        self._active[v] = False
        self._n_active -= 1

    def __repr__(self) -> str:
        return f"DiGraph(n={self.n}, active={self._n_active}, edges={len(self._edges)})"


@dataclass
class DegreeTable:
    """Per-node in/out/total degree counts over active nodes."""

    in_deg: np.ndarray
    out_deg: np.ndarray

    @property
    def total_deg(self) -> np.ndarray:
        return self.in_deg + self.out_deg


class GrayImage:
    """Single-channel image; intensities are float32 values in [0, 1]."""

    __slots__ = ("pixels",)

    def __init__(self, pixels: np.ndarray):
        arr = np.asarray(pixels, dtype=np.float32)
        if arr.ndim != 2:
            raise ValidationError(f"image must be 2-D, got shape {arr.shape}")
        if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
            raise ValidationError("image intensities must lie in [0, 1]")
        self.pixels = arr

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, GrayImage):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(
            np.array_equal(self.pixels, other.pixels)
        )

    def __repr__(self) -> str:
        return f"GrayImage({self.height}x{self.width})"


def from_edge_list(n: int, pairs) -> DiGraph:
    """Build a graph on ``n`` nodes from (src, dst) pairs, deduplicating."""
    g = DiGraph(n)
    for src, dst in pairs:
        g.add_edge(int(src), int(dst))
    return g


def degrees(g: DiGraph) -> DegreeTable:
    """Exact in/out degree counts; removed nodes report zero."""
    in_deg = np.zeros(g.n, dtype=np.int64)
    out_deg = np.zeros(g.n, dtype=np.int64)
    for u, v in g.edges():
        out_deg[u] += 1
        in_deg[v] += 1
    return DegreeTable(in_deg=in_deg, out_deg=out_deg)


def weak_lcc_size(g: DiGraph) -> int:
    """Size of the largest component of the undirected projection.

    Only active nodes count. Errors out when no node is active.
    """
    if g.n_active == 0:
        raise ValidationError("graph has no active nodes")
    seen = [False] * g.n
    best = 0
    for start in range(g.n):
        if seen[start] or not g.is_active(start):
            continue
        size = 0
        queue = deque([start])
        seen[start] = True
        while queue:
            v = queue.popleft()
            size += 1
            for w in g.out_neighbors(v):
                if not seen[w]:
                    seen[w] = True
                    queue.append(w)
            for w in g.in_neighbors(v):
                if not seen[w]:
                    seen[w] = True
                    queue.append(w)
        best = max(best, size)
    return best


def weak_lcc_size_unionfind(g: DiGraph) -> int:
    """Union-find variant of :func:`weak_lcc_size`; used for cross-checks."""
    if g.n_active == 0:
        raise ValidationError("graph has no active nodes")
    parent = list(range(g.n))

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for u, v in g.edges():
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    counts: dict[int, int] = {}
    for v in range(g.n):
        if g.is_active(v):
            r = find(v)
            counts[r] = counts.get(r, 0) + 1
    return max(counts.values())


def to_adjacency_image(g: DiGraph) -> GrayImage:
    """n-by-n image with pixel (u, v) = 1.0 exactly when edge u -> v exists."""
    pixels = np.zeros((g.n, g.n), dtype=np.float32)
    for u, v in g.edges():
        pixels[u, v] = 1.0
    return GrayImage(pixels)


# -- RNET-EDGES v1 text format ----------------------------------------------


def write_edge_list(g: DiGraph, path) -> None:
    """Write the RNET-EDGES v1 text form: header line, then one edge per line.

    Edges are emitted in sorted order so identical graphs produce identical
    bytes.
    """
    lines = [f"{EDGE_LIST_MAGIC} N={g.n} M={g.n_edges}\n"]
    for src, dst in sorted(g.edges()):
        lines.append(f"{src} {dst}\n")
    with open(path, "w", newline="\n") as fh:
        fh.writelines(lines)


def read_edge_list(path) -> DiGraph:
    """Parse an RNET-EDGES v1 file back into a graph."""
    with open(path) as fh:
        header = fh.readline().rstrip("\n")
        parts = header.split()
        if parts[:3] != ["#", "RNET-EDGES", "v1"] or len(parts) != 5:
            raise FormatError(f"bad edge-list header: {header!r}")
        try:
            n = int(parts[3].removeprefix("N="))
            m = int(parts[4].removeprefix("M="))
        except ValueError as exc:
            raise FormatError(f"bad edge-list header: {header!r}") from exc
        if not parts[3].startswith("N=") or not parts[4].startswith("M="):
            raise FormatError(f"bad edge-list header: {header!r}")
        g = DiGraph(n)
        count = 0
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            try:
                src_s, dst_s = line.split()
                g.add_edge(int(src_s), int(dst_s))
            except (ValueError, ValidationError) as exc:
                raise FormatError(f"bad edge at line {lineno}: {line!r}") from exc
            count += 1
        if count != m or g.n_edges != m:
            raise FormatError(f"edge count mismatch: header says M={m}, file has {count}")
    return g
