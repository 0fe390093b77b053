"""Triangulated isometric fillings of cycle graphs.

Even cycles come from the dual of a simple line arrangement; odd cycles
contract one boundary edge of the next even construction.  All geometry is
exact over the rationals.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .surface_map import EmbeddedGraph

Line = tuple[Fraction, Fraction, Fraction]


class GenericityError(RuntimeError):
    pass


@dataclass(frozen=True)
class LineArrangement:
    """Lines ``a x + b y = c`` with exact rational coefficients."""

    lines: tuple[Line, ...]

    def crossing(self, i: int, j: int) -> tuple[Fraction, Fraction]:
        a1, b1, c1 = self.lines[i]
        a2, b2, c2 = self.lines[j]
        det = a1 * b2 - a2 * b1
        return (c1 * b2 - c2 * b1) / det, (a1 * c2 - a2 * c1) / det

    def side(self, k: int, x: Fraction, y: Fraction) -> int:
        a, b, c = self.lines[k]
        val = a * x + b * y - c
        return (val > 0) - (val < 0)

    def crossings(self) -> list[tuple[Fraction, Fraction]]:
        return [self.crossing(i, j) for i, j in combinations(range(len(self.lines)), 2)]


def is_generic(lines) -> bool:
    """Pairwise crossing and no three lines through a common point."""
    for (a1, b1, _), (a2, b2, _) in combinations(lines, 2):
        if a1 * b2 - a2 * b1 == 0:
            return False
    for l1, l2, l3 in combinations(lines, 3):
        det = (
            l1[0] * (l2[1] * l3[2] - l2[2] * l3[1])
            - l1[1] * (l2[0] * l3[2] - l2[2] * l3[0])
            + l1[2] * (l2[0] * l3[1] - l2[1] * l3[0])
        )
        if det == 0:
            return False
    return True


def _random_line(rng: random.Random) -> Line:
    a = Fraction(rng.randint(-12, 12), rng.randint(1, 6))
    b = Fraction(rng.randint(-12, 12), rng.randint(1, 6))
    if a == 0 and b == 0:
        a = Fraction(1)
    c = Fraction(rng.randint(-30, 30), rng.randint(1, 6))
    return a, b, c


def _compatible(prior, line) -> bool:
    a, b, c = line
    for a1, b1, _ in prior:
        if a1 * b - a * b1 == 0:
            return False
    for l1, l2 in combinations(prior, 2):
        det = (
            l1[0] * (l2[1] * c - l2[2] * b)
            - l1[1] * (l2[0] * c - l2[2] * a)
            + l1[2] * (l2[0] * b - l2[1] * a)
        )
        if det == 0:
            return False
    return True


def perturb_to_generic(lines, rng: random.Random, max_retries: int = 1000) -> tuple[Line, ...]:
    """Perturb offending lines until the arrangement is simple."""
    out: list[Line] = []
    budget = max_retries
    for ln in lines:
        a, b, c = (Fraction(x) for x in ln)
        while not _compatible(out, (a, b, c)):
            if budget == 0:
                raise GenericityError(f"arrangement still degenerate after {max_retries} perturbations")
            budget -= 1
            a += Fraction(rng.randint(-3, 3), rng.randint(5, 17))
            b += Fraction(rng.randint(-3, 3), rng.randint(5, 17))
            c += Fraction(rng.randint(-3, 3), rng.randint(5, 17))
        out.append((a, b, c))
    return tuple(out)


def random_generic_arrangement(m: int, seed: int = 0, max_retries: int = 1000) -> LineArrangement:
    if m < 2:
        raise ValueError("need at least two lines")
    rng = random.Random(seed)
    lines = [_random_line(rng) for _ in range(m)]
    return LineArrangement(perturb_to_generic(lines, rng, max_retries))


@dataclass(frozen=True)
class DiskComplex:
    """A subdivided disk.

    ``faces`` are vertex cycles all oriented the same way; ``boundary`` lists
    the boundary vertices in the direction the faces traverse them, so the
    interior lies on the same side of every boundary edge.
    """

    num_vertices: int
    faces: tuple[tuple[int, ...], ...]
    boundary: tuple[int, ...]

    def edges(self) -> list[tuple[int, int]]:
        es = set()
        for f in self.faces:
            for i in range(len(f)):
                a, b = f[i], f[(i + 1) % len(f)]
                es.add((min(a, b), max(a, b)))
        return sorted(es)

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.num_vertices)]
        for a, b in self.edges():
            adj[a].append(b)
            adj[b].append(a)
        return adj

    def euler_characteristic(self) -> int:
        return self.num_vertices - len(self.edges()) + len(self.faces)

    def successor(self) -> dict[int, dict[int, int]]:
        """``succ[v][a] == b`` for each face containing ``a, v, b`` consecutively."""
        succ: dict[int, dict[int, int]] = {}
        for f in self.faces:
            k = len(f)
            for i in range(k):
                succ.setdefault(f[i], {})[f[i - 1]] = f[(i + 1) % k]
        return succ

    def boundary_fans(self) -> list[list[int]]:
        """Interior neighbours of each boundary vertex, from previous to next boundary vertex."""
        succ = self.successor()
        n = len(self.boundary)
        fans = []
        for i, v in enumerate(self.boundary):
            prev, nxt = self.boundary[i - 1], self.boundary[(i + 1) % n]
            fan = []
            x = succ[v][prev]
            while x != nxt:
                fan.append(x)
                x = succ[v][x]
                if len(fan) > self.num_vertices:
                    raise ValueError("inconsistent disk orientation")
            fans.append(fan)
        return fans

    def to_map(self) -> EmbeddedGraph:
        """Sphere map of the disk, with the outside face distinguished."""
        edges = self.edges()
        eid = {e: i for i, e in enumerate(edges)}

        def dart(v: int, w: int) -> int:
            e = eid[(min(v, w), max(v, w))]
            return 2 * e if v < w else 2 * e + 1

        succ = self.successor()
        n = len(self.boundary)
        for i, v in enumerate(self.boundary):
            succ.setdefault(v, {})[self.boundary[(i + 1) % n]] = self.boundary[i - 1]
        rotation = []
        for v in range(self.num_vertices):
            s = succ[v]
            start = min(s)
            cyc = [start]
            while s[cyc[-1]] != start:
                cyc.append(s[cyc[-1]])
            rotation.append([dart(v, w) for w in cyc])
        m = EmbeddedGraph(self.num_vertices, [(a, b, 1) for a, b in edges], rotation)
        b0, b1 = self.boundary[0], self.boundary[1]
        return m.with_disk(m.face_of_state((dart(b1, b0), 1)))


def _boundary_cycle(faces) -> tuple[int, ...]:
    directed = set()
    for f in faces:
        for i in range(len(f)):
            directed.add((f[i], f[(i + 1) % len(f)]))
    nxt = {a: b for a, b in directed if (b, a) not in directed}
    start = min(nxt)
    cyc = [start]
    while nxt[cyc[-1]] != start:
        cyc.append(nxt[cyc[-1]])
    if len(cyc) != len(nxt):
        raise ValueError("boundary is not a single cycle")
    return tuple(cyc)


def dual_quadrangulation(arr: LineArrangement) -> DiskComplex:
    """Union of the bounded faces of the dual: one quadrilateral per crossing."""
    m = len(arr.lines)
    if m < 2 or not is_generic(arr.lines):
        raise GenericityError("dual quadrangulation needs a simple arrangement of >= 2 lines")
    quads = []
    for i, j in combinations(range(m), 2):
        px, py = arr.crossing(i, j)
        others = tuple(arr.side(k, px, py) for k in range(m))
        (ai, bi, _), (aj, bj, _) = arr.lines[i], arr.lines[j]
        det = ai * bj - aj * bi
        corners = []
        for si, sj in ((1, 1), (1, -1), (-1, -1), (-1, 1)):
            # direction t with (normal_i . t, normal_j . t) = (si, sj)
            tx = (si * bj - sj * bi) / det
            ty = (ai * sj - aj * si) / det
            sig = list(others)
            sig[i], sig[j] = si, sj
            corners.append((math.atan2(float(ty), float(tx)), tuple(sig)))
        corners.sort()
        quads.append([sig for _, sig in corners])
    labels = sorted({sig for q in quads for sig in q})
    index = {sig: k for k, sig in enumerate(labels)}
    faces = tuple(tuple(index[s] for s in q) for q in quads)
    return DiskComplex(len(labels), faces, _boundary_cycle(faces))


def insert_boundary_vertex(disk: DiskComplex) -> DiskComplex:
    """Subdivide the lowest boundary edge with a new vertex."""
    n = len(disk.boundary)
    bedges = sorted(
        (min(disk.boundary[i], disk.boundary[(i + 1) % n]), max(disk.boundary[i], disk.boundary[(i + 1) % n]), i)
        for i in range(n)
    )
    _, _, i = bedges[0]
    a, b = disk.boundary[i], disk.boundary[(i + 1) % n]
    x = disk.num_vertices
    faces = []
    for f in disk.faces:
        k = len(f)
        out = list(f)
        for t in range(k):
            if f[t] == a and f[(t + 1) % k] == b:
                out.insert(t + 1, x)
                break
        faces.append(tuple(out))
    boundary = list(disk.boundary)
    boundary.insert(i + 1, x)
    return DiskComplex(x + 1, tuple(faces), tuple(boundary))


def contract_boundary_edge(disk: DiskComplex) -> DiskComplex:
    """Contract the lowest boundary edge, shortening the boundary by one.

    Boundary distances through the merged vertex drop by exactly one, and no
    path gets shorter than that, so isometry survives.  On the bipartite dual
    quadrangulation the endpoints share no neighbour, so no multi-edge appears.
    """
    n = len(disk.boundary)
    _, i = min(
        ((min(disk.boundary[i], disk.boundary[(i + 1) % n]), max(disk.boundary[i], disk.boundary[(i + 1) % n])), i)
        for i in range(n)
    )
    a, b = disk.boundary[i], disk.boundary[(i + 1) % n]
    keep, gone = min(a, b), max(a, b)

    def relabel(v: int) -> int:
        v = keep if v == gone else v
        return v - 1 if v > gone else v

    faces = []
    for f in disk.faces:
        out = []
        for v in map(relabel, f):
            if not out or out[-1] != v:
                out.append(v)
        if len(out) > 1 and out[0] == out[-1]:
            out.pop()
        faces.append(tuple(out))
    boundary = [relabel(v) for k, v in enumerate(disk.boundary) if k != (i + 1) % n]
    return DiskComplex(disk.num_vertices - 1, tuple(faces), tuple(boundary))


def star_faces(disk: DiskComplex) -> DiskComplex:
    """Cone every quadrilateral or pentagon from a new interior vertex."""
    faces = []
    nv = disk.num_vertices
    for f in disk.faces:
        if len(f) > 5 or len(f) < 3:
            raise ValueError(f"cannot star a face with {len(f)} sides")
        if len(f) == 3:
            faces.append(f)
            continue
        c = nv
        nv += 1
        faces.extend((f[i], f[(i + 1) % len(f)], c) for i in range(len(f)))
    return DiskComplex(nv, tuple(faces), disk.boundary)


def isometric_filling(n: int, seed: int = 0) -> DiskComplex:
    if n < 3:
        raise ValueError("cycle length must be at least 3")
    if n == 3:
        return DiskComplex(3, ((0, 1, 2),), (0, 1, 2))
    if n in (4, 5):
        cyc = tuple(range(n))
        return star_faces(DiskComplex(n, (cyc,), cyc))
    q = dual_quadrangulation(random_generic_arrangement((n + 1) // 2, seed))
    if n % 2:
        q = contract_boundary_edge(q)
    return star_faces(q)


def verify_isometric(disk: DiskComplex) -> bool:
    """Boundary-to-boundary graph distances equal cyclic distances (all-pairs BFS)."""
    adj = disk.adjacency()
    n = len(disk.boundary)
    for i, src in enumerate(disk.boundary):
        dist = [-1] * disk.num_vertices
        dist[src] = 0
        queue = deque([src])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        for j, dst in enumerate(disk.boundary):
            cyclic = min(abs(i - j), n - abs(i - j))
            if dist[dst] != cyclic:
                return False
    return True
