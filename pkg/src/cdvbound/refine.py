"""Refinement of a cellular embedding into a triangulation of prescribed edgewidth.

The input map G gets a boundary loop (the face D), every edge is subdivided
k times, and every face other than D is glued to an isometric filling of its
boundary walk.  The result H is simplicial away from D, has a length-k
boundary on D, and edgewidth k in S minus D; the original graph survives as
a minor.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .filling import isometric_filling, verify_isometric
from .homotopy import edgewidth
from .surface_map import (
    EmbeddedGraph,
    MapStructureError,
    State,
    add_edge_in_face,
    connected_components,
    disk_state,
    is_simplicial,
    rebuild,
)


class PreconditionError(ValueError):
    pass


@dataclass
class MinorModel:
    """Branch sets of the vertices of G and branch paths of its edges, in H."""

    branch_vertices: dict[int, list[int]]
    branch_edges: dict[int, list[int]]

    def to_json(self) -> dict:
        return {
            "branch_vertices": {str(v): list(vs) for v, vs in sorted(self.branch_vertices.items())},
            "branch_edges": {str(e): list(es) for e, es in sorted(self.branch_edges.items())},
        }


@dataclass
class RefinedTriangulation:
    H: EmbeddedGraph
    k: int
    model: MinorModel
    H_prime: EmbeddedGraph
    disk_faces: list[int]
    intermediate: dict[str, EmbeddedGraph] = field(default_factory=dict)

    @property
    def disk_boundary(self) -> list[int]:
        return self.H.face_vertices(self.H.disk)


def _insert_at_corner(rotation: list[list[int]], m: EmbeddedGraph, state: State, darts: list[int]) -> None:
    # darts run from the previous walk vertex to the next one
    d, o = state
    r = rotation[m.tail(d)]
    i = r.index(d)
    if o > 0:
        r[i:i] = darts
    else:
        r[i + 1:i + 1] = darts[::-1]


def attach_boundary_loop(m: EmbeddedGraph, face: int = 0) -> EmbeddedGraph:
    """Hang a pendant vertex with a loop inside ``face``; the loop's inside becomes D."""
    faces = m.faces()
    if not 0 <= face < len(faces):
        raise MapStructureError(f"face {face} not found")
    walk = faces[face]
    u = min(m.tail(d) for d, _ in walk)
    d, o = next(st for st in walk if m.tail(st[0]) == u)
    v0 = m.num_vertices
    c, loop = m.num_edges, m.num_edges + 1
    edges = list(m.edges) + [(u, v0, o), (v0, v0, 1)]
    rotation = [list(r) for r in m.rotation]
    _insert_at_corner(rotation, m, (d, o), [2 * c])
    rotation.append([2 * c + 1, 2 * loop, 2 * loop + 1])
    return rebuild(v0 + 1, edges, rotation, (2 * loop + 1, 1))


def subdivide_all(m: EmbeddedGraph, k: int) -> tuple[EmbeddedGraph, dict[int, list[int]]]:
    """Replace every edge by a path of ``k`` edges.

    Returns the new map and, for each old edge, the vertex sequence of its path.
    Edge ``e`` keeps its id and sign on the first segment; later segments are
    positive.
    """
    if k < 1:
        raise ValueError("k must be positive")
    paths = {e: [a, b] for e, (a, b, _) in enumerate(m.edges)}
    if k == 1:
        return m, paths
    nv, ne = m.num_vertices, m.num_edges
    edges: list[tuple[int, int, int]] = list(m.edges) + [(0, 0, 1)] * (ne * (k - 1))
    rotation = [list(r) for r in m.rotation] + [[] for _ in range(ne * (k - 1))]
    remap = {}
    for e, (a, b, s) in enumerate(m.edges):
        inner = [nv + e * (k - 1) + t for t in range(k - 1)]
        chain = [a] + inner + [b]
        ids = [e] + [ne + e * (k - 1) + t for t in range(k - 1)]
        for t in range(k):
            edges[ids[t]] = (chain[t], chain[t + 1], s if t == 0 else 1)
        for t, w in enumerate(inner):
            rotation[w] = [2 * ids[t] + 1, 2 * ids[t + 1]]
        remap[2 * e + 1] = 2 * ids[-1] + 1
        paths[e] = chain
    for v in range(nv):
        rotation[v] = [remap.get(d, d) for d in rotation[v]]
    ds = disk_state(m)
    if ds is not None:
        ds = (remap.get(ds[0], ds[0]), ds[1])
    return rebuild(nv + ne * (k - 1), edges, rotation, ds), paths


def fill_all_faces(m: EmbeddedGraph, seed: int = 0) -> EmbeddedGraph:
    """Glue an isometric filling into every face except D."""
    faces = m.faces()
    nv = m.num_vertices
    edges = list(m.edges)
    rotation = [list(r) for r in m.rotation]
    pending: list[tuple[State, list[int]]] = []
    for f, walk in enumerate(faces):
        if f == m.disk:
            continue
        n = len(walk)
        if n < 3:
            raise MapStructureError(f"face {f} has length {n}; cannot fill")
        if n == 3:
            continue
        disk = isometric_filling(n, seed)
        bpos = {v: i for i, v in enumerate(disk.boundary)}
        host, eps = {}, {}
        for v in range(disk.num_vertices):
            if v in bpos:
                host[v] = m.tail(walk[bpos[v]][0])
                eps[v] = walk[bpos[v]][1]
            else:
                host[v] = nv
                eps[v] = 1
                nv += 1
                rotation.append([])
        dart_of: dict[tuple[int, int], int] = {}
        for u, w in disk.edges():
            if u in bpos and w in bpos:
                if (bpos[u] - bpos[w]) % n not in (1, n - 1):
                    raise MapStructureError("filling has a boundary chord")
                continue
            e = len(edges)
            edges.append((host[u], host[w], eps[u] * eps[w]))
            dart_of[(u, w)], dart_of[(w, u)] = 2 * e, 2 * e + 1
        succ = disk.successor()
        for v in range(disk.num_vertices):
            if v in bpos:
                continue
            s = succ[v]
            cyc = [min(s)]
            while s[cyc[-1]] != cyc[0]:
                cyc.append(s[cyc[-1]])
            rotation[host[v]] = [dart_of[(v, x)] for x in cyc]
        for i, fan in enumerate(disk.boundary_fans()):
            if fan:
                b = disk.boundary[i]
                pending.append((walk[i], [dart_of[(b, x)] for x in fan]))
    # original darts are untouched, so corners can be located after all faces are read
    for state, darts in pending:
        _insert_at_corner(rotation, m, state, darts)
    return rebuild(nv, edges, rotation, disk_state(m))


def triangulate_disk_D(H: EmbeddedGraph) -> EmbeddedGraph:
    """Fan-triangulate D from its lowest boundary vertex; the result has no D."""
    if H.disk is None:
        raise MapStructureError("map has no distinguished face")
    walk = H.faces()[H.disk]
    k = len(walk)
    tails = [H.tail(d) for d, _ in walk]
    a = tails.index(min(tails))
    apex = tails[a]
    current = H.with_disk(None)
    for j in range(2, k - 1):
        target = walk[(a + j) % k]
        t = H.tail(target[0])
        f = current.face_of_state(target)
        fw = current.faces()[f]
        da = next(d for d, _ in fw if current.tail(d) == apex)
        db = next(d for d, _ in fw if current.tail(d) == t)
        current = add_edge_in_face(current, f, da, db)
    return current


def disk_triangles(H: EmbeddedGraph, H_prime: EmbeddedGraph) -> list[int]:
    """Faces of ``H_prime`` that lie inside the old D."""
    return sorted({H_prime.face_of_state(st) for st in H.faces()[H.disk]})


def verify_minor_model(G: EmbeddedGraph, H: EmbeddedGraph, model: MinorModel) -> bool:
    """Branch sets are disjoint and connected, and each edge path joins its ends' sets."""
    owner: dict[int, int] = {}
    for v, vs in model.branch_vertices.items():
        for x in vs:
            if x in owner:
                return False
            owner[x] = v
    adj = H.adjacency()
    for v, vs in model.branch_vertices.items():
        inside = set(vs)
        pairs = [(x, y) for x in vs for y in adj[x] if y in inside]
        idx = {x: i for i, x in enumerate(vs)}
        if len(connected_components(len(vs), ((idx[x], idx[y]) for x, y in pairs))) != 1:
            return False
    if set(model.branch_vertices) != set(range(G.num_vertices)):
        return False
    used: set[int] = set()
    for e, (a, b, _) in enumerate(G.edges):
        path = model.branch_edges.get(e)
        if not path or len(path) < 2:
            return False
        if owner.get(path[0]) != a or owner.get(path[-1]) != b:
            return False
        for x, y in zip(path, path[1:]):
            if y not in adj[x]:
                return False
        inner = path[1:-1]
        if any(x in owner or x in used for x in inner):
            return False
        used.update(inner)
    return True


def build_prescribed_edgewidth(
    G: EmbeddedGraph, k: int, face: int = 0, seed: int = 0, check: bool = True
) -> RefinedTriangulation:
    """Triangulate S with D of boundary length k and edgewidth k in S minus D.

    ``check`` re-verifies simpliciality, the isometry of every filling used and
    the edgewidth of the result.
    """
    if not G.is_connected():
        raise PreconditionError("graph must be connected")
    if G.euler_characteristic() == 2:
        raise PreconditionError("sphere excluded")
    if k < 3:
        raise PreconditionError("k >= 3 required")
    G1 = attach_boundary_loop(G, face)
    G2, paths = subdivide_all(G1, k)
    H = fill_all_faces(G2, seed)
    model = MinorModel(
        {v: [v] for v in range(G.num_vertices)},
        {e: paths[e] for e in range(G.num_edges)},
    )
    H_prime = triangulate_disk_D(H)
    ref = RefinedTriangulation(H, k, model, H_prime, disk_triangles(H, H_prime), {"G1": G1, "G2": G2})
    if check:
        if not is_simplicial(H):
            raise AssertionError("refined map is not simplicial")
        if len(H.faces()[H.disk]) != k:
            raise AssertionError("boundary of D has the wrong length")
        for n in sorted({len(w) for f, w in enumerate(G2.faces()) if f != G2.disk and len(w) > 3}):
            if not verify_isometric(isometric_filling(n, seed)):
                raise AssertionError(f"filling of length {n} is not isometric")
        if not verify_minor_model(G, H, model):
            raise AssertionError("minor model is invalid")
        ew = edgewidth(H)
        if ew != k:
            raise AssertionError(f"edgewidth is {ew}, expected {k}")
    return ref
