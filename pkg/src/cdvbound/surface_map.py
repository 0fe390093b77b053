"""Signed rotation systems: graphs cellularly embedded on closed surfaces.

Edge ``e`` owns darts ``2e`` (at its first endpoint) and ``2e + 1`` (at its
second endpoint).  Each vertex carries the cyclic order of its darts and each
edge a sign; a negative sign flips the local orientation when the edge is
crossed.  The closed surface is the one obtained by gluing a disk into every
face traced by :meth:`EmbeddedGraph.faces`.

A *state* ``(dart, o)`` means "leave the tail of ``dart`` along ``dart`` with
local orientation ``o``"; faces are orbits of states.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

State = tuple[int, int]


class MapError(ValueError):
    """Base class for invalid map input."""


class MapSyntaxError(MapError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class MapStructureError(MapError):
    pass


@dataclass(frozen=True)
class SurfaceInfo:
    chi: int
    orientable: bool
    genus_or_crosscaps: int
    vertex_count: int
    edge_count: int
    face_count: int

    @property
    def name(self) -> str:
        if self.orientable:
            return "sphere" if self.genus_or_crosscaps == 0 else f"orientable genus {self.genus_or_crosscaps}"
        return f"non-orientable, {self.genus_or_crosscaps} crosscap(s)"


class EmbeddedGraph:
    """Immutable signed rotation system with an optional distinguished face.

    Parameters
    ----------
    num_vertices:
        Vertex count; vertices are ``0 .. num_vertices - 1``.
    edges:
        ``(a, b, sign)`` triples; edge ``i`` is ``edges[i]``.
    rotation:
        For each vertex, its darts in cyclic order.
    disk:
        Index (in :meth:`faces` order) of the distinguished face, or None.
    """

    __slots__ = ("_n", "_edges", "_rotation", "_disk", "_dart_vertex", "_pos", "_cache")

    def __init__(
        self,
        num_vertices: int,
        edges: Sequence[tuple[int, int, int]],
        rotation: Sequence[Sequence[int]],
        disk: int | None = None,
    ):
        self._n = int(num_vertices)
        self._edges = tuple((int(a), int(b), int(s)) for a, b, s in edges)
        self._rotation = tuple(tuple(int(d) for d in r) for r in rotation)
        self._cache: dict = {}
        self._validate()
        if disk is not None:
            disk = int(disk)
            if not 0 <= disk < len(self.faces()):
                raise MapStructureError(f"distinguished face {disk} does not exist")
        self._disk = disk

    def _validate(self) -> None:
        n = self._n
        if len(self._rotation) != n:
            raise MapStructureError(f"expected {n} vertex rotations, got {len(self._rotation)}")
        nd = 2 * len(self._edges)
        dart_vertex = [-1] * nd
        for e, (a, b, s) in enumerate(self._edges):
            if not (0 <= a < n and 0 <= b < n):
                raise MapStructureError(f"edge {e} has an endpoint outside 0..{n - 1}")
            if s not in (1, -1):
                raise MapStructureError(f"edge {e} has sign {s}, expected +1 or -1")
            dart_vertex[2 * e] = a
            dart_vertex[2 * e + 1] = b
        pos: dict[int, tuple[int, int]] = {}
        for v, rot in enumerate(self._rotation):
            if not rot and n > 1:
                raise MapStructureError(f"vertex {v} is isolated; embedding would not be cellular")
            for i, d in enumerate(rot):
                if not 0 <= d < nd:
                    raise MapStructureError(f"vertex {v} lists dart {d}, which belongs to no edge")
                if d in pos:
                    raise MapStructureError(f"dart {d} appears twice in the rotations")
                if dart_vertex[d] != v:
                    raise MapStructureError(
                        f"dart {d} of edge {d >> 1} belongs at vertex {dart_vertex[d]}, listed at {v}"
                    )
                pos[d] = (v, i)
        missing = [d for d in range(nd) if d not in pos]
        if missing:
            raise MapStructureError(
                f"dangling dart {missing[0]}: edge {missing[0] >> 1} is missing from a rotation"
            )
        self._dart_vertex = tuple(dart_vertex)
        self._pos = pos

    # -- basic accessors -------------------------------------------------

    @property
    def num_vertices(self) -> int:
        return self._n

    @property
    def num_edges(self) -> int:
        return len(self._edges)

    @property
    def num_darts(self) -> int:
        return 2 * len(self._edges)

    @property
    def edges(self) -> tuple[tuple[int, int, int], ...]:
        return self._edges

    @property
    def rotation(self) -> tuple[tuple[int, ...], ...]:
        return self._rotation

    @property
    def disk(self) -> int | None:
        return self._disk

    def tail(self, dart: int) -> int:
        return self._dart_vertex[dart]

    def head(self, dart: int) -> int:
        return self._dart_vertex[dart ^ 1]

    def sign(self, edge: int) -> int:
        return self._edges[edge][2]

    def position(self, dart: int) -> tuple[int, int]:
        """(vertex, index in that vertex's rotation)."""
        return self._pos[dart]

    def degree(self, v: int) -> int:
        return len(self._rotation[v])

    def neighbors(self, v: int) -> list[int]:
        return [self.head(d) for d in self._rotation[v]]

    def with_disk(self, disk: int | None) -> "EmbeddedGraph":
        g = EmbeddedGraph.__new__(EmbeddedGraph)
        g._n, g._edges, g._rotation = self._n, self._edges, self._rotation
        g._dart_vertex, g._pos, g._cache = self._dart_vertex, self._pos, self._cache
        if disk is not None and not 0 <= disk < len(self.faces()):
            raise MapStructureError(f"distinguished face {disk} does not exist")
        g._disk = disk
        return g

    # -- face tracing ----------------------------------------------------

    def step(self, state: State) -> State:
        d, o = state
        d1 = d ^ 1
        o2 = o * self._edges[d >> 1][2]
        v, i = self._pos[d1]
        rot = self._rotation[v]
        return rot[(i + o2) % len(rot)], o2

    def reverse_state(self, state: State) -> State:
        d, o = state
        return d ^ 1, -o * self._edges[d >> 1][2]

    def _trace(self) -> None:
        seen: set[State] = set()
        faces: list[tuple[State, ...]] = []
        face_of: dict[State, int] = {}
        corner: dict[tuple[int, int], int] = {}
        limit = 2 * self.num_darts
        for d in range(self.num_darts):
            for o in (1, -1):
                if (d, o) in seen:
                    continue
                idx = len(faces)
                walk = []
                s = (d, o)
                while True:
                    walk.append(s)
                    seen.add(s)
                    seen.add(self.reverse_state(s))
                    face_of[s] = idx
                    face_of[self.reverse_state(s)] = idx
                    nxt = self.step(s)
                    # corner at head of s, between the arriving dart and nxt[0]
                    v, i = self._pos[s[0] ^ 1]
                    gap = i if nxt[1] > 0 else (i - 1) % len(self._rotation[v])
                    corner[(v, gap)] = idx
                    s = nxt
                    if s == (d, o):
                        break
                    if len(walk) > limit:
                        raise MapStructureError("face tracing did not close; rotation is inconsistent")
                faces.append(tuple(walk))
        if self.num_darts == 0 and self._n == 1:
            faces.append(())
        self._cache["faces"] = faces
        self._cache["face_of"] = face_of
        self._cache["corner"] = corner

    def faces(self) -> list[tuple[State, ...]]:
        """Face boundary walks as state sequences, ordered by lowest starting dart."""
        if "faces" not in self._cache:
            self._trace()
        return self._cache["faces"]

    def face_of_state(self, state: State) -> int:
        if "face_of" not in self._cache:
            self._trace()
        return self._cache["face_of"][state]

    def corner_face(self, v: int, gap: int) -> int:
        """Face occupying the gap between ``rotation[v][gap]`` and the next dart."""
        if "corner" not in self._cache:
            self._trace()
        return self._cache["corner"][(v, gap)]

    def face_vertices(self, f: int) -> list[int]:
        return [self.tail(d) for d, _ in self.faces()[f]]

    def face_edges(self, f: int) -> list[int]:
        return [d >> 1 for d, _ in self.faces()[f]]

    def face_neighbors(self, f: int) -> list[tuple[int, int]]:
        """(edge, face on the other side) for each step of face ``f``."""
        key = ("fnb", f)
        if key not in self._cache:
            self._cache[key] = [(d >> 1, self.face_of_state((d, -o))) for d, o in self.faces()[f]]
        return self._cache[key]

    def vertex_faces(self, v: int) -> list[int]:
        return [self.corner_face(v, i) for i in range(len(self._rotation[v]))]

    def face_index_containing(self, state: State) -> int:
        return self.face_of_state(state)

    # -- global invariants -----------------------------------------------

    def euler_characteristic(self) -> int:
        return self._n - self.num_edges + len(self.faces())

    def is_connected(self) -> bool:
        return len(connected_components(self._n, ((a, b) for a, b, _ in self._edges))) <= 1

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self._n)]
        for a, b, _ in self._edges:
            adj[a].append(b)
            if a != b:
                adj[b].append(a)
        return adj

    def __repr__(self) -> str:
        return (
            f"EmbeddedGraph(V={self._n}, E={self.num_edges}, F={len(self.faces())}, "
            f"disk={self._disk})"
        )


def connected_components(n: int, pairs: Iterable[tuple[int, int]]) -> list[list[int]]:
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for v in range(n):
        groups.setdefault(find(v), []).append(v)
    return list(groups.values())


# -- module-level operations ----------------------------------------------


def trace_faces(m: EmbeddedGraph) -> list[tuple[State, ...]]:
    return m.faces()


def euler_characteristic(m: EmbeddedGraph) -> int:
    return m.euler_characteristic()


def orientation_signs(m: EmbeddedGraph) -> list[int] | None:
    """Vertex signs making every edge positive after resigning, or None."""
    eps = [0] * m.num_vertices
    adj: list[list[tuple[int, int]]] = [[] for _ in range(m.num_vertices)]
    for a, b, s in m.edges:
        if a == b:
            if s < 0:
                return None
            continue
        adj[a].append((b, s))
        adj[b].append((a, s))
    for root in range(m.num_vertices):
        if eps[root]:
            continue
        eps[root] = 1
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for w, s in adj[u]:
                want = eps[u] * s
                if eps[w] == 0:
                    eps[w] = want
                    queue.append(w)
                elif eps[w] != want:
                    return None
    return eps


def classify_surface(m: EmbeddedGraph) -> SurfaceInfo:
    if not m.is_connected():
        raise MapStructureError("map is disconnected; classification needs a connected map")
    chi = m.euler_characteristic()
    orientable = orientation_signs(m) is not None
    if orientable:
        if chi > 2 or chi % 2:
            raise MapStructureError(f"orientable map with impossible Euler characteristic {chi}")
        g = (2 - chi) // 2
    else:
        if chi > 1:
            raise MapStructureError(f"non-orientable map with impossible Euler characteristic {chi}")
        g = 2 - chi
    return SurfaceInfo(chi, orientable, g, m.num_vertices, m.num_edges, len(m.faces()))


def is_simplicial(m: EmbeddedGraph) -> bool:
    """No loops, no parallel edges, every non-distinguished face a true triangle.

    The distinguished face, if any, must instead be a simple cycle.
    """
    seen = set()
    for a, b, _ in m.edges:
        if a == b:
            return False
        key = (min(a, b), max(a, b))
        if key in seen:
            return False
        seen.add(key)
    for f, walk in enumerate(m.faces()):
        verts = m.face_vertices(f)
        if f == m.disk:
            if len(verts) < 3 or len(set(verts)) != len(verts):
                return False
        elif len(walk) != 3 or len(set(verts)) != 3:
            return False
    return True


# -- construction helpers -------------------------------------------------


def from_triangles(num_vertices: int, triangles: Iterable[Sequence[int]]) -> EmbeddedGraph:
    """Signed rotation system of a closed triangulated surface given by its triangles.

    Works for non-orientable surfaces: every vertex star is oriented locally and
    edge signs record whether neighbouring stars agree.
    """
    tris = [tuple(t) for t in triangles]
    edge_ids: dict[tuple[int, int], int] = {}
    for t in tris:
        for i in range(3):
            a, b = sorted((t[i], t[(i + 1) % 3]))
            edge_ids.setdefault((a, b), -1)
    keys = sorted(edge_ids)
    edge_ids = {k: i for i, k in enumerate(keys)}

    links: list[dict[int, list[int]]] = [dict() for _ in range(num_vertices)]
    for t in tris:
        for i in range(3):
            v, a, b = t[i], t[(i + 1) % 3], t[(i + 2) % 3]
            links[v].setdefault(a, []).append(b)
            links[v].setdefault(b, []).append(a)

    rot_vertices: list[list[int]] = []
    for v in range(num_vertices):
        link = links[v]
        if not link or any(len(x) != 2 for x in link.values()):
            raise MapStructureError(f"vertex {v} does not have a circular link")
        start = min(link)
        cyc = [start, min(link[start])]
        while True:
            a, b = link[cyc[-1]]
            nxt = a if a != cyc[-2] else b
            if nxt == start:
                break
            cyc.append(nxt)
        if len(cyc) != len(link):
            raise MapStructureError(f"link of vertex {v} is not a single cycle")
        rot_vertices.append(cyc)

    def induced(v: int, a: int, b: int) -> tuple[int, int, int]:
        # orientation of triangle (v, a, b) seen from v's rotation: rot(a) == b gives (a, v, b)
        cyc = rot_vertices[v]
        i = cyc.index(a)
        if cyc[(i + 1) % len(cyc)] == b:
            t = (a, v, b)
        else:
            t = (b, v, a)
        k = t.index(min(t))
        return t[k:] + t[:k]

    edges = []
    for (a, b), e in edge_ids.items():
        w = links[a][b][0]
        s = 1 if induced(a, b, w) == induced(b, a, w) else -1
        edges.append((a, b, s))

    def dart(v: int, w: int) -> int:
        e = edge_ids[(min(v, w), max(v, w))]
        return 2 * e if v < w else 2 * e + 1

    rotation = [[dart(v, w) for w in rot_vertices[v]] for v in range(num_vertices)]
    m = EmbeddedGraph(num_vertices, edges, rotation)
    if len(m.faces()) != len(tris):
        raise MapStructureError("triangle list does not describe a closed surface")
    return m


def rebuild(
    num_vertices: int,
    edges: Sequence[tuple[int, int, int]],
    rotation: Sequence[Sequence[int]],
    disk_state: State | None,
) -> EmbeddedGraph:
    m = EmbeddedGraph(num_vertices, edges, rotation)
    if disk_state is None:
        return m
    return m.with_disk(m.face_of_state(disk_state))


def disk_state(m: EmbeddedGraph) -> State | None:
    return None if m.disk is None else m.faces()[m.disk][0]


# -- surgeries ------------------------------------------------------------


def subdivide_edge(m: EmbeddedGraph, edge: int) -> EmbeddedGraph:
    if not 0 <= edge < m.num_edges:
        raise MapStructureError(f"edge {edge} not found")
    a, b, s = m.edges[edge]
    w = m.num_vertices
    new_e = m.num_edges
    edges = list(m.edges)
    edges[edge] = (a, w, s)
    edges.append((w, b, 1))
    old_far, new_far = 2 * edge + 1, 2 * new_e + 1
    rotation = [[new_far if d == old_far else d for d in r] for r in m.rotation]
    rotation.append([2 * edge + 1, 2 * new_e])
    ds = disk_state(m)
    if ds is not None and ds[0] == old_far:
        ds = (new_far, ds[1])
    return rebuild(w + 1, edges, rotation, ds)


def _insert_edge(
    rotation: list[list[int]],
    m: EmbeddedGraph,
    state_a: State,
    state_b: State,
    new_edge: int,
) -> None:
    for state, nd in ((state_a, 2 * new_edge), (state_b, 2 * new_edge + 1)):
        d, o = state
        v = m.tail(d)
        r = rotation[v]
        i = r.index(d)
        r.insert(i if o > 0 else i + 1, nd)


def add_edge_in_face(m: EmbeddedGraph, face: int, dart_a: int, dart_b: int) -> EmbeddedGraph:
    """Join the corners where ``dart_a`` and ``dart_b`` leave along ``face``.

    The new edge lies inside the face and splits it in two.
    """
    faces = m.faces()
    if not 0 <= face < len(faces):
        raise MapStructureError(f"face {face} not found")
    if m.disk == face:
        raise MapStructureError("refusing to split the distinguished face")
    walk = faces[face]
    by_dart = {}
    for st in walk:
        by_dart.setdefault(st[0], st)
    if dart_a not in by_dart or dart_b not in by_dart:
        raise MapStructureError(f"darts {dart_a}, {dart_b} are not both on face {face}")
    sa, sb = by_dart[dart_a], by_dart[dart_b]
    if sa == sb:
        raise MapStructureError("the two corners coincide")
    e = m.num_edges
    edges = list(m.edges) + [(m.tail(dart_a), m.tail(dart_b), sa[1] * sb[1])]
    rotation = [list(r) for r in m.rotation]
    _insert_edge(rotation, m, sa, sb, e)
    return rebuild(m.num_vertices, edges, rotation, disk_state(m))


def add_vertex_in_face(m: EmbeddedGraph, face: int) -> EmbeddedGraph:
    """Star ``face``: a new vertex joined to every corner of the face walk."""
    faces = m.faces()
    if not 0 <= face < len(faces):
        raise MapStructureError(f"face {face} not found")
    if face == m.disk:
        raise MapStructureError("refusing to star the distinguished face")
    walk = faces[face]
    x = m.num_vertices
    edges = list(m.edges)
    rotation = [list(r) for r in m.rotation] + [[]]
    for st in walk:
        d, o = st
        e = len(edges)
        edges.append((m.tail(d), x, o))
        r = rotation[m.tail(d)]
        i = r.index(d)
        r.insert(i if o > 0 else i + 1, 2 * e)
        rotation[x].append(2 * e + 1)
    rotation[x].reverse()
    return rebuild(x + 1, edges, rotation, disk_state(m))


# -- text format ----------------------------------------------------------

_SIGNS = {"+": 1, "+1": 1, "1": 1, "-": -1, "-1": -1}


def parse_map(text: str) -> EmbeddedGraph:
    header = None
    edges: dict[int, tuple[int, int, int]] = {}
    verts: dict[int, list[int]] = {}
    disk = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split(None, 1)
        body = rest[0] if rest else ""
        try:
            if head == "map":
                nv, ne = (int(x) for x in body.split())
                header = (nv, ne)
            elif head == "edge":
                eid, a, b, sgn = body.split()
                if sgn not in _SIGNS:
                    raise MapSyntaxError(lineno, f"bad sign {sgn!r}")
                if int(eid) in edges:
                    raise MapSyntaxError(lineno, f"edge {eid} declared twice")
                edges[int(eid)] = (int(a), int(b), _SIGNS[sgn])
            elif head == "vertex":
                m = re.fullmatch(r"(\d+)\s*:\s*(.*)", body)
                if not m:
                    raise MapSyntaxError(lineno, "expected 'vertex <id>: <darts>'")
                vid = int(m.group(1))
                if vid in verts:
                    raise MapSyntaxError(lineno, f"vertex {vid} declared twice")
                verts[vid] = [int(x) for x in m.group(2).split()]
            elif head == "diskface":
                disk = int(body)
            else:
                raise MapSyntaxError(lineno, f"unknown keyword {head!r}")
        except MapSyntaxError:
            raise
        except ValueError as exc:
            raise MapSyntaxError(lineno, f"malformed {head} line ({exc})") from None
    if header is None:
        raise MapSyntaxError(1, "missing 'map <V> <E>' header")
    nv, ne = header
    if sorted(edges) != list(range(ne)):
        raise MapStructureError(f"expected edges 0..{ne - 1}, got ids {sorted(edges)}")
    if sorted(verts) != list(range(nv)):
        raise MapStructureError(f"expected vertices 0..{nv - 1}, got ids {sorted(verts)}")
    return EmbeddedGraph(nv, [edges[i] for i in range(ne)], [verts[i] for i in range(nv)], disk)


def format_map(m: EmbeddedGraph, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    lines.append(f"map {m.num_vertices} {m.num_edges}")
    for e, (a, b, s) in enumerate(m.edges):
        lines.append(f"edge {e} {a} {b} {'+' if s > 0 else '-'}")
    for v, r in enumerate(m.rotation):
        lines.append(f"vertex {v}: {' '.join(map(str, r))}")
    if m.disk is not None:
        lines.append(f"diskface {m.disk}")
    return "\n".join(lines) + "\n"
