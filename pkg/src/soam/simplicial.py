"""Growing simplicial complex of dimension at most 2.

Vertices carry opaque payloads (the adaptive network stores its units
there), edges carry integer ages, and triangles are never stored
independently: the triangle set is exactly the set of 3-cliques of the
edge graph, maintained incrementally on every mutation.

The link of a vertex, and its combinatorial classification, drive the
state machine of the adaptive network.  For a target manifold dimension
of 1 the complex is regarded as 1-dimensional: stars contain no
triangles and links are plain vertex sets.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import combinations


def edge_key(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


def triangle_key(a: int, b: int, c: int) -> tuple[int, int, int]:
    return tuple(sorted((a, b, c)))  # type: ignore[return-value]


class LinkClass(Enum):
    EMPTY = "empty"
    UNDERCONNECTED = "underconnected"
    PATH = "path"
    CYCLE = "cycle"
    CYCLE3 = "cycle3"
    OVERCONNECTED = "overconnected"


@dataclass(frozen=True)
class LinkGraph:
    """The link of a vertex: its neighbor set plus the arcs among them
    contributed by incident triangles."""

    vertices: frozenset[int]
    arcs: frozenset[tuple[int, int]]

    def degree(self, v: int) -> int:
        return sum(1 for a in self.arcs if v in a)


class SimplicialComplex:
    """Vertices with payloads, aged edges, and clique-inferred triangles."""

    def __init__(self, manifold_dim: int):
        if manifold_dim not in (1, 2):
            raise ValueError("manifold_dim must be 1 or 2")
        self.manifold_dim = manifold_dim
        self._payload: dict[int, object] = {}
        self._adj: dict[int, set[int]] = {}
        self.edge_ages: dict[tuple[int, int], int] = {}
        self.triangles: set[tuple[int, int, int]] = set()

    # -- vertices ------------------------------------------------------

    def add_vertex(self, uid: int, payload: object = None) -> None:
        if uid in self._payload:
            raise KeyError(f"vertex {uid} already present")
        self._payload[uid] = payload
        self._adj[uid] = set()

    def remove_vertex(self, uid: int) -> None:
        self._require(uid)
        for x in sorted(self._adj[uid]):
            self.remove_edge(uid, x)
        del self._adj[uid]
        del self._payload[uid]

    def has_vertex(self, uid: int) -> bool:
        return uid in self._payload

    def payload(self, uid: int):
        self._require(uid)
        return self._payload[uid]

    def vertex_ids(self):
        return self._payload.keys()

    @property
    def payloads(self) -> dict[int, object]:
        return self._payload

    def _require(self, uid: int) -> None:
        if uid not in self._payload:
            raise KeyError(f"unknown vertex id {uid}")

    # -- edges and derived triangles ------------------------------------

    def has_edge(self, a: int, b: int) -> bool:
        return edge_key(a, b) in self.edge_ages

    def add_edge(self, a: int, b: int) -> bool:
        """Insert edge (a, b) with age 0; refresh age to 0 if present.

        Returns True when the edge was created.  Every common neighbor of
        a and b closes a new triangle.
        """
        if a == b:
            raise ValueError("self-loops are not allowed")
        self._require(a)
        self._require(b)
        key = edge_key(a, b)
        if key in self.edge_ages:
            self.edge_ages[key] = 0
            return False
        self.edge_ages[key] = 0
        self._adj[a].add(b)
        self._adj[b].add(a)
        for n in self._adj[a] & self._adj[b]:
            self.triangles.add(triangle_key(a, b, n))
        return True

    def remove_edge(self, a: int, b: int) -> bool:
        """Remove edge (a, b) and every triangle containing it; no-op if
        the edge is absent.  Vertices are never removed here."""
        key = edge_key(a, b)
        if key not in self.edge_ages:
            return False
        for n in self._adj[a] & self._adj[b]:
            self.triangles.discard(triangle_key(a, b, n))
        del self.edge_ages[key]
        self._adj[a].discard(b)
        self._adj[b].discard(a)
        return True

    def neighbors(self, uid: int) -> set[int]:
        self._require(uid)
        return self._adj[uid]

    def common_neighbors(self, a: int, b: int) -> set[int]:
        return self._adj[a] & self._adj[b]

    def degree(self, uid: int) -> int:
        return len(self._adj[uid])

    def age(self, a: int, b: int) -> int:
        return self.edge_ages[edge_key(a, b)]

    @property
    def n_vertices(self) -> int:
        return len(self._payload)

    @property
    def n_edges(self) -> int:
        return len(self.edge_ages)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    # -- neighborhood queries -------------------------------------------

    def link_of(self, uid: int) -> LinkGraph:
        """Link of `uid`: its neighbors, with arcs from incident triangles
        (dimension 2 only; in dimension 1 the link is a bare vertex set)."""
        self._require(uid)
        nbrs = self._adj[uid]
        if self.manifold_dim == 1:
            return LinkGraph(frozenset(nbrs), frozenset())
        arcs = set()
        for x, y in combinations(sorted(nbrs), 2):
            if edge_key(x, y) in self.edge_ages:
                arcs.add((x, y))
        return LinkGraph(frozenset(nbrs), frozenset(arcs))

    def star_of(self, uid: int) -> set[tuple]:
        """All simplices having `uid` as a vertex, as sorted tuples.

        For manifold dimension 1 the star contains no triangles.
        """
        self._require(uid)
        star: set[tuple] = {(uid,)}
        for x in self._adj[uid]:
            star.add(edge_key(uid, x))
        if self.manifold_dim == 2:
            for x, y in combinations(sorted(self._adj[uid]), 2):
                tri = triangle_key(uid, x, y)
                if tri in self.triangles:
                    star.add(tri)
        return star

    @staticmethod
    def closure_of(simplices: set[tuple]) -> set[tuple]:
        """Smallest set of simplices containing `simplices` and all their
        faces."""
        closed: set[tuple] = set()
        for s in simplices:
            for k in range(1, len(s) + 1):
                for face in combinations(s, k):
                    closed.add(face)
        return closed


def link_graph_from_simplices(simplices: set[tuple]) -> LinkGraph:
    """Build a LinkGraph from a set of vertex/edge tuples (triangles are
    rejected: a link in a complex of dimension <= 2 is 1-dimensional)."""
    vertices = set()
    arcs = set()
    for s in simplices:
        if len(s) == 1:
            vertices.add(s[0])
        elif len(s) == 2:
            vertices.update(s)
            arcs.add(edge_key(*s))
        else:
            raise ValueError(f"link contains a simplex of dimension >= 2: {s}")
    return LinkGraph(frozenset(vertices), frozenset(arcs))


def classify_link(link: LinkGraph, manifold_dim: int) -> LinkClass:
    """Combinatorial type of a link graph.

    Dimension 1: the class depends on the vertex count alone (arcs are
    always empty there).  Dimension 2: a single covering cycle is CYCLE
    (CYCLE3 when it has exactly three vertices), a single covering open
    path with at least one arc is PATH, anything containing a vertex of
    arc-degree >= 3 or a cycle plus extra material is OVERCONNECTED, and
    the rest (sub-path fragments) is UNDERCONNECTED.
    """
    n = len(link.vertices)
    if n == 0:
        return LinkClass.EMPTY
    if manifold_dim == 1:
        if n == 1:
            return LinkClass.PATH
        if n == 2:
            return LinkClass.CYCLE
        return LinkClass.OVERCONNECTED

    deg = {v: 0 for v in link.vertices}
    adj: dict[int, list[int]] = {v: [] for v in link.vertices}
    for x, y in link.arcs:
        deg[x] += 1
        deg[y] += 1
        adj[x].append(y)
        adj[y].append(x)
    if any(d >= 3 for d in deg.values()):
        return LinkClass.OVERCONNECTED

    # Max degree <= 2: every component is a simple path or a simple cycle.
    seen: set[int] = set()
    components = 0
    has_cycle = False
    for start in link.vertices:
        if start in seen:
            continue
        components += 1
        comp_vertices = 0
        comp_arc_ends = 0
        stack = [start]
        seen.add(start)
        while stack:
            v = stack.pop()
            comp_vertices += 1
            comp_arc_ends += deg[v]
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if comp_arc_ends // 2 >= comp_vertices:
            has_cycle = True

    n_arcs = len(link.arcs)
    if components == 1 and has_cycle:
        # a single cycle covering every vertex (all degrees exactly 2)
        return LinkClass.CYCLE3 if n == 3 else LinkClass.CYCLE
    if has_cycle:
        return LinkClass.OVERCONNECTED
    if components == 1 and n_arcs == n - 1 and n_arcs >= 1:
        return LinkClass.PATH
    return LinkClass.UNDERCONNECTED
