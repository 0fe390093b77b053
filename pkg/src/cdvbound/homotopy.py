"""Contractibility of cycles and edgewidth in S minus the distinguished face.

A simple cycle is contractible in S minus D exactly when cutting along it
leaves a disk component (Euler characteristic 1, one boundary circle) that
avoids D.  Cutting is done on the dual graph: faces stay glued across every
edge not on the cycle.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Sequence

from .surface_map import EmbeddedGraph


class NonSimpleCycleError(ValueError):
    pass


@dataclass(frozen=True)
class CycleWalk:
    darts: tuple[int, ...]

    def vertices(self, m: EmbeddedGraph) -> list[int]:
        return [m.tail(d) for d in self.darts]

    def is_closed(self, m: EmbeddedGraph) -> bool:
        ds = self.darts
        return bool(ds) and all(m.head(ds[i]) == m.tail(ds[(i + 1) % len(ds)]) for i in range(len(ds)))

    def is_simple(self, m: EmbeddedGraph) -> bool:
        vs = self.vertices(m)
        return len(set(vs)) == len(vs)

    def __len__(self) -> int:
        return len(self.darts)


@dataclass(frozen=True)
class CutComponent:
    faces: frozenset[int]
    chi: int
    boundary_circles: int
    contains_disk: bool

    @property
    def is_disk(self) -> bool:
        return self.chi == 1 and self.boundary_circles == 1


def _checked(m: EmbeddedGraph, cycle) -> tuple[int, ...]:
    darts = tuple(cycle.darts if isinstance(cycle, CycleWalk) else cycle)
    walk = CycleWalk(darts)
    if not walk.is_closed(m):
        raise NonSimpleCycleError("darts do not form a closed walk")
    if not walk.is_simple(m):
        raise NonSimpleCycleError("cycle revisits a vertex")
    return darts


def _side_chi(m: EmbeddedGraph, faces, cyc_vertices: set[int], cyc_edges: set[int]) -> int:
    verts, edges = set(), set()
    for f in faces:
        for d, _ in m.faces()[f]:
            v = m.tail(d)
            if v not in cyc_vertices:
                verts.add(v)
            if d >> 1 not in cyc_edges:
                edges.add(d >> 1)
    return len(verts) - len(edges) + len(faces)


def cut_along_cycle(m: EmbeddedGraph, cycle) -> list[CutComponent]:
    darts = _checked(m, cycle)
    cyc_edges = {d >> 1 for d in darts}
    cyc_vertices = {m.tail(d) for d in darts}
    nf = len(m.faces())
    comp = [-1] * nf
    groups: list[list[int]] = []
    for start in range(nf):
        if comp[start] >= 0:
            continue
        comp[start] = len(groups)
        members = [start]
        queue = deque([start])
        while queue:
            f = queue.popleft()
            for e, g in m.face_neighbors(f):
                if e not in cyc_edges and comp[g] < 0:
                    comp[g] = comp[start]
                    members.append(g)
                    queue.append(g)
        groups.append(members)
    two_sided = math.prod(m.sign(d >> 1) for d in darts) > 0
    out = []
    for members in groups:
        circles = 1 if len(groups) > 1 else (2 if two_sided else 1)
        out.append(
            CutComponent(
                frozenset(members),
                _side_chi(m, members, cyc_vertices, cyc_edges),
                circles,
                m.disk in members,
            )
        )
    return out


def is_contractible(m: EmbeddedGraph, cycle) -> bool:
    """Whether a simple cycle bounds a disk avoiding the distinguished face.

    Both sides are explored alternately, so the cost is proportional to the
    smaller side whenever the cycle separates.
    """
    darts = _checked(m, cycle)
    cyc_edges = {d >> 1 for d in darts}
    cyc_vertices = {m.tail(d) for d in darts}
    d0 = darts[0]
    fa, fb = m.face_of_state((d0, 1)), m.face_of_state((d0, -1))
    if fa == fb:
        return False
    seen = ({fa}, {fb})
    queues = (deque([fa]), deque([fb]))
    done = None
    while done is None:
        for side in (0, 1):
            queue = queues[side]
            if not queue:
                done = side
                break
            f = queue.popleft()
            for e, g in m.face_neighbors(f):
                if e in cyc_edges:
                    continue
                if g in seen[1 - side]:
                    return False
                if g not in seen[side]:
                    seen[side].add(g)
                    queue.append(g)
    small = seen[done]
    chi_small = _side_chi(m, small, cyc_vertices, cyc_edges)
    disk_small = m.disk is not None and m.disk in small
    if chi_small == 1 and not disk_small:
        return True
    chi_other = m.euler_characteristic() - chi_small
    disk_other = m.disk is not None and not disk_small
    return chi_other == 1 and not disk_other


def _bfs_tree(m: EmbeddedGraph, root: int, depth_limit: float):
    dist = {root: 0}
    parent: dict[int, int] = {}
    branch = {root: None}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        if dist[u] >= depth_limit:
            continue
        for d in m.rotation[u]:
            w = m.head(d)
            if w not in dist:
                dist[w] = dist[u] + 1
                parent[w] = d
                branch[w] = w if u == root else branch[u]
                queue.append(w)
    return dist, parent, branch


def _path_from_root(m: EmbeddedGraph, parent: dict[int, int], v: int) -> list[int]:
    path = []
    while v in parent:
        d = parent[v]
        path.append(d)
        v = m.tail(d)
    path.reverse()
    return path


def edgewidth(m: EmbeddedGraph) -> float:
    """Length of a shortest non-contractible cycle (``math.inf`` if none).

    Every shortest non-contractible cycle is two shortest paths from some root
    closed by one edge, so it suffices to scan those "lollipop" cycles from
    every root in order of length.
    """
    if m.euler_characteristic() == 2:
        return math.inf
    best = math.inf
    for root in range(m.num_vertices):
        limit = math.inf if best == math.inf else (best - 1) // 2
        dist, parent, branch = _bfs_tree(m, root, limit)
        tree_darts = set(parent.values())
        candidates = []
        for e, (a, b, _) in enumerate(m.edges):
            if a not in dist or b not in dist:
                continue
            if 2 * e in tree_darts or 2 * e + 1 in tree_darts:
                continue
            length = dist[a] + dist[b] + 1
            if length >= best:
                continue
            if a == b:
                if a != root:
                    continue
            elif not (a == root or b == root or branch[a] != branch[b]):
                continue
            candidates.append((length, e))
        candidates.sort()
        for length, e in candidates:
            a = m.edges[e][0]
            b = m.edges[e][1]
            darts = _path_from_root(m, parent, a) + [2 * e]
            darts += [d ^ 1 for d in reversed(_path_from_root(m, parent, b))]
            if not is_contractible(m, darts):
                best = length
                break
    return best


def simple_cycles(m: EmbeddedGraph, length: int):
    """Yield every simple cycle of exactly ``length`` edges once, as dart tuples."""
    for s in range(m.num_vertices):
        stack = [(d,) for d in m.rotation[s]]
        while stack:
            path = stack.pop()
            w = m.head(path[-1])
            if len(path) == length:
                if w != s:
                    continue
                if length == 1:
                    if path[0] % 2 == 0:
                        yield path
                elif path[0] >> 1 < path[-1] >> 1:
                    yield path
                continue
            if w <= s:
                continue
            used = {m.tail(d) for d in path}
            for d in m.rotation[w]:
                x = m.head(d)
                if x == s or (x > s and x not in used):
                    stack.append(path + (d,))


def edgewidth_bruteforce(m: EmbeddedGraph, max_len: int) -> int | None:
    """Exhaustive search over simple cycles of up to ``max_len`` edges."""
    for length in range(1, max_len + 1):
        for cyc in simple_cycles(m, length):
            if not is_contractible(m, cyc):
                return length
    return None


@dataclass(frozen=True)
class BoundaryCircle:
    darts: tuple[int, ...]
    contractible: bool

    @property
    def length(self) -> int:
        return len(self.darts)


def region_boundary_circles(m: EmbeddedGraph, region: Sequence[int] | set[int]) -> list[BoundaryCircle]:
    """Boundary circles of a union of faces, with contractibility in S minus D.

    Fans of the region meeting at one vertex are treated as pulled apart, so
    the vertex joins the complement.  A circle is contractible when the
    complement component on its far side is a disk bounded by it alone.
    """
    region = set(region)
    partner: dict[int, int] = {}
    open_vertices: list[int] = []  # vertices lying in the complement
    for v in range(m.num_vertices):
        rot = m.rotation[v]
        k = len(rot)
        flags = [m.corner_face(v, g) in region for g in range(k)]
        if not any(flags):
            open_vertices.append(v)
            continue
        if all(flags):
            continue
        runs = []
        g0 = flags.index(False)
        for step in range(k):
            g = (g0 + 1 + step) % k
            if flags[g] and not flags[g - 1]:
                end = g
                while flags[(end + 1) % k]:
                    end = (end + 1) % k
                runs.append((g, end))
        for start, end in runs:
            a, b = rot[start], rot[(end + 1) % k]
            partner[a] = b
            partner[b] = a
        if len(runs) >= 2:
            open_vertices.append(v)

    # complement components
    nf = len(m.faces())
    parent = list(range(nf))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    region_edges = {e for f in region for e in m.face_edges(f)}
    outside = [f for f in range(nf) if f not in region]
    for f in outside:
        for e, g in m.face_neighbors(f):
            if e not in region_edges:
                parent[find(f)] = find(g)
    for v in open_vertices:
        faces_here = [f for f in m.vertex_faces(v) if f not in region]
        for f in faces_here[1:]:
            parent[find(f)] = find(faces_here[0])
    chi: dict[int, int] = {}
    for f in outside:
        chi[find(f)] = chi.get(find(f), 0) + 1
    for e, (a, b, _) in enumerate(m.edges):
        if e not in region_edges:
            f = m.face_of_state((2 * e, 1))
            chi[find(f)] -= 1
    for v in open_vertices:
        f = next(f for f in m.vertex_faces(v) if f not in region)
        chi[find(f)] += 1

    circles = []
    seen: set[int] = set()
    for d0 in sorted(partner):
        if d0 in seen:
            continue
        darts = []
        d = d0
        while True:
            darts.append(d)
            seen.update((d, d ^ 1))
            d = partner[d ^ 1]
            if d == d0:
                break
        circles.append(tuple(darts))
    count: dict[int, int] = {}
    far: list[int] = []
    for darts in circles:
        d = darts[0]
        f1, f2 = m.face_of_state((d, 1)), m.face_of_state((d, -1))
        comp = find(f2 if f1 in region else f1)
        far.append(comp)
        count[comp] = count.get(comp, 0) + 1
    return [
        BoundaryCircle(darts, chi[c] == 1 and count[c] == 1)
        for darts, c in zip(circles, far)
    ]
