"""Zero sets of kernel vectors on a triangulated surface and the Euler characteristic chain.

The zero set of the piecewise-linear extension of f is built combinatorially:
zero vertices, one crossing node per edge whose endpoints have opposite
signs, the segments each triangle contributes, and the triangles on which f
vanishes identically.  Singular vertices are blown up, two-dimensional
components are contracted, and the resulting graph Γ feeds the degree count
that bounds the corank.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Sequence

from .homotopy import region_boundary_circles
from .spectral import SchrodingerOperator, SignedVector, kernel_exact
from .surface_map import EmbeddedGraph, connected_components


class ChainPreconditionError(ValueError):
    pass


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def sign_partition(f: SignedVector | Sequence) -> tuple[frozenset[int], frozenset[int], frozenset[int]]:
    vals = f.values if isinstance(f, SignedVector) else tuple(Fraction(x) for x in f)
    if not any(vals):
        raise ValueError("vector is zero")
    parts: tuple[set[int], set[int], set[int]] = (set(), set(), set())
    for i, x in enumerate(vals):
        parts[1 - _sign(x)].add(i)
    return frozenset(parts[0]), frozenset(parts[1]), frozenset(parts[2])


def _adjacency(n: int, edges: Iterable[Sequence[int]]) -> list[set[int]]:
    adj: list[set[int]] = [set() for _ in range(n)]
    for e in edges:
        a, b = tuple(e)[:2]
        if a != b:
            adj[a].add(b)
            adj[b].add(a)
    return adj


def _graph_edges(G) -> tuple[int, list]:
    if isinstance(G, EmbeddedGraph):
        return G.num_vertices, [(a, b) for a, b, _ in G.edges]
    if isinstance(G, SchrodingerOperator):
        return G.num_vertices, [tuple(e) for e in G.edges]
    n, edges = G
    return n, list(edges)


def check_plus_minus(G, f: SignedVector) -> bool:
    """Every zero vertex sees a positive neighbour iff it sees a negative one."""
    n, edges = _graph_edges(G)
    adj = _adjacency(n, edges)
    for v in range(n):
        if f.values[v] == 0:
            signs = {_sign(f.values[u]) for u in adj[v]}
            if (1 in signs) != (-1 in signs):
                return False
    return True


def _induced_connected(n: int, edges, part: frozenset[int]) -> bool:
    idx = {v: i for i, v in enumerate(sorted(part))}
    pairs = [(idx[a], idx[b]) for a, b in edges if a in idx and b in idx]
    return bool(part) and len(connected_components(len(idx), pairs)) == 1


def check_nodal(G, f: SignedVector) -> bool:
    """Positive and negative parts both induce nonempty connected subgraphs."""
    n, edges = _graph_edges(G)
    plus, _, minus = sign_partition(f)
    return _induced_connected(n, edges, plus) and _induced_connected(n, edges, minus)


# -- zero complex -----------------------------------------------------------

@dataclass(frozen=True)
class TriangleCase:
    kind: str
    zero_corners: tuple[int, ...]
    crossings: tuple[tuple[int, int], ...]  # corner index pairs with opposite signs


def triangle_trace(a, b, c) -> TriangleCase:
    """Zero set of the linear interpolation of three corner values."""
    s = [_sign(a), _sign(b), _sign(c)]
    zeros = tuple(i for i in range(3) if s[i] == 0)
    crossings = tuple((i, j) for i, j in ((0, 1), (1, 2), (0, 2)) if s[i] * s[j] < 0)
    if len(zeros) == 3:
        kind = "solid"
    elif len(zeros) == 2:
        kind = "corner-edge"
    elif len(zeros) == 1:
        kind = "corner-to-crossing" if crossings else "corner-vertex"
    else:
        kind = "crossing-to-crossing" if crossings else "empty"
    return TriangleCase(kind, zeros, crossings)


@dataclass
class ZeroComplex:
    """Cells of the zero set.

    Nodes are keyed ``("v", vertex)`` or ``("x", edge)``; segments are keyed
    ``("e", edge)`` for zero edges of the map and ``("t", face, i)`` for
    segments crossing a triangle.  Solids are face ids.
    """

    nodes: list[Hashable]
    segments: dict[Hashable, tuple[Hashable, Hashable]]
    solids: list[int]
    solid_corners: dict[int, tuple[Hashable, Hashable, Hashable]] = field(default_factory=dict)

    def euler_characteristic(self) -> int:
        return len(self.nodes) - len(self.segments) + len(self.solids)

    def components(self) -> int:
        idx = {x: i for i, x in enumerate(self.nodes)}
        pairs = [(idx[a], idx[b]) for a, b in self.segments.values()]
        return len(connected_components(len(self.nodes), pairs))


def build_zero_complex(H: EmbeddedGraph, f: SignedVector) -> ZeroComplex:
    vals = f.values
    nodes: dict[Hashable, None] = {}
    segments: dict[Hashable, tuple[Hashable, Hashable]] = {}
    solids = []
    corners_of = {}
    for v in range(H.num_vertices):
        if vals[v] == 0:
            nodes[("v", v)] = None
    for e, (a, b, _) in enumerate(H.edges):
        if vals[a] * vals[b] < 0:
            nodes[("x", e)] = None
        elif vals[a] == 0 and vals[b] == 0:
            segments[("e", e)] = (("v", a), ("v", b))
    for fid, walk in enumerate(H.faces()):
        if len(walk) != 3:
            raise ValueError(f"face {fid} is not a triangle")
        vs = [H.tail(d) for d, _ in walk]
        # edge between corners i and i+1 is walk[i]
        edge_between = {}
        for i in range(3):
            j = (i + 1) % 3
            edge_between[(min(i, j), max(i, j))] = walk[i][0] >> 1
        case = triangle_trace(*(vals[v] for v in vs))
        if case.kind == "solid":
            solids.append(fid)
            corners_of[fid] = tuple(("v", v) for v in vs)
        elif case.kind == "corner-to-crossing":
            (z,) = case.zero_corners
            (pair,) = case.crossings
            segments[("t", fid, 0)] = (("v", vs[z]), ("x", edge_between[pair]))
        elif case.kind == "crossing-to-crossing":
            p, q = case.crossings
            segments[("t", fid, 0)] = (("x", edge_between[p]), ("x", edge_between[q]))
    return ZeroComplex(list(nodes), segments, solids, corners_of)


# -- blowup and contraction ---------------------------------------------------

@dataclass
class BlowupRecord:
    vertex: int
    fans: list[list[int]]
    copies: list[Hashable]
    center: Hashable
    kept_original: bool


@dataclass
class BlownUpComplex:
    nodes: list[Hashable]
    segments: dict[Hashable, tuple[Hashable, Hashable]]
    solids: list[int]
    solid_corners: dict[int, tuple[Hashable, Hashable, Hashable]]
    solid_edges: set[Hashable]
    records: list[BlowupRecord]

    def euler_characteristic(self) -> int:
        return len(self.nodes) - len(self.segments) + len(self.solids)

    def components(self) -> int:
        idx = {x: i for i, x in enumerate(self.nodes)}
        pairs = [(idx[a], idx[b]) for a, b in self.segments.values()]
        return len(connected_components(len(self.nodes), pairs))


def _fans(H: EmbeddedGraph, v: int, solid: set[int]) -> list[tuple[list[int], list[int]]]:
    """Maximal runs of solid corners at ``v`` as (faces, darts inside or bounding the run)."""
    rot = H.rotation[v]
    k = len(rot)
    flags = [H.corner_face(v, g) in solid for g in range(k)]
    if not any(flags):
        return []
    if all(flags):
        return [([H.corner_face(v, g) for g in range(k)], list(rot))]
    g0 = flags.index(False)
    runs = []
    for step in range(1, k + 1):
        g = (g0 + step) % k
        if flags[g] and not flags[g - 1]:
            gaps = [g]
            while flags[(gaps[-1] + 1) % k]:
                gaps.append((gaps[-1] + 1) % k)
            darts = [rot[x] for x in gaps] + [rot[(gaps[-1] + 1) % k]]
            runs.append(([H.corner_face(v, x) for x in gaps], darts))
    return runs


def blowup(Z: ZeroComplex, H: EmbeddedGraph) -> BlownUpComplex:
    """Pull apart the fans of solid triangles meeting at a single node.

    Each fan gets its own copy of the node and a new center joins the copies
    (and the original node, kept when free segments still use it).
    """
    solid = set(Z.solids)
    solid_edges = {("e", H.faces()[t][i][0] >> 1) for t in Z.solids for i in range(3)}
    nodes = list(Z.nodes)
    segments = dict(Z.segments)
    corners = {t: list(c) for t, c in Z.solid_corners.items()}
    records = []
    for key in Z.nodes:
        if key[0] != "v":
            continue
        v = key[1]
        fans = _fans(H, v, solid)
        if not fans:
            continue
        fan_edges = [{d >> 1 for d in darts} for _, darts in fans]
        in_fan = set().union(*fan_edges)
        free = [s for s, (a, b) in Z.segments.items() if key in (a, b) and not (s[0] == "e" and s[1] in in_fan)]
        if len(fans) < 2 and not free:
            continue
        copies = [("copy", v, i) for i in range(len(fans))]
        center = ("center", v)
        nodes.extend(copies)
        nodes.append(center)
        for i, (faces, _) in enumerate(fans):
            for t in faces:
                corners[t] = [copies[i] if c == key else c for c in corners[t]]
            for e in fan_edges[i]:
                a, b = segments[("e", e)]
                segments[("e", e)] = (copies[i] if a == key else a, copies[i] if b == key else b)
            segments[("star", v, i)] = (center, copies[i])
        if free:
            segments[("star", v, "orig")] = (center, key)
        else:
            nodes.remove(key)
        records.append(BlowupRecord(v, [faces for faces, _ in fans], copies, center, bool(free)))
    return BlownUpComplex(
        nodes, segments, list(Z.solids), {t: tuple(c) for t, c in corners.items()}, solid_edges, records
    )


@dataclass
class ContractionGraph:
    vertices: list[Hashable]
    edges: list[tuple[Hashable, Hashable]]
    components: dict[Hashable, list[int]]  # contracted vertex -> solid faces
    v_K: Hashable | None

    def euler_characteristic(self) -> int:
        return len(self.vertices) - len(self.edges)

    def degrees(self) -> dict[Hashable, int]:
        deg = {v: 0 for v in self.vertices}
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return deg

    def to_dot(self) -> str:
        ids = {v: i for i, v in enumerate(self.vertices)}
        lines = ["graph Gamma {"]
        for v, i in ids.items():
            label = str(v).replace('"', "'")
            extra = ", style=filled, fillcolor=gold" if v == self.v_K else ""
            lines.append(f'  n{i} [label="{label}"{extra}];')
        for a, b in self.edges:
            lines.append(f"  n{ids[a]} -- n{ids[b]};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def contract_2d(Zb: BlownUpComplex, disk_faces: Sequence[int] = ()) -> ContractionGraph:
    """Collapse each connected union of solid triangles to one vertex."""
    idx = {x: i for i, x in enumerate(Zb.nodes)}
    parent = list(range(len(Zb.nodes)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for t in Zb.solids:
        a, b, c = (idx[x] for x in Zb.solid_corners[t])
        parent[find(b)] = find(a)
        parent[find(c)] = find(a)
    comp_faces: dict[int, list[int]] = defaultdict(list)
    for t in Zb.solids:
        comp_faces[find(idx[Zb.solid_corners[t][0]])].append(t)
    order = sorted(comp_faces, key=lambda r: min(comp_faces[r]))
    name = {r: ("C", i) for i, r in enumerate(order)}

    def image(x: Hashable) -> Hashable:
        r = find(idx[x])
        return name.get(r, x)

    vertices = []
    seen = set()
    for x in Zb.nodes:
        y = image(x)
        if y not in seen:
            seen.add(y)
            vertices.append(y)
    edges = [(image(a), image(b)) for s, (a, b) in Zb.segments.items() if s not in Zb.solid_edges]
    components = {name[r]: sorted(comp_faces[r]) for r in order}
    v_K = None
    if disk_faces:
        missing = [t for t in disk_faces if t not in set(Zb.solids)]
        if missing:
            raise ChainPreconditionError("f does not vanish on the whole boundary of D")
        owners = {image(Zb.solid_corners[t][0]) for t in disk_faces}
        if len(owners) != 1:
            raise ChainPreconditionError("triangles of D lie in different solid components")
        (v_K,) = owners
    return ContractionGraph(vertices, edges, components, v_K)


def chi_complex(X) -> int:
    return X.euler_characteristic()


def chi_open_regions(H: EmbeddedGraph, f: SignedVector) -> tuple[int, int, bool, bool]:
    """χ of the full subcomplexes spanned by the positive and by the negative vertices."""
    plus, _, minus = sign_partition(f)
    edges = [(a, b) for a, b, _ in H.edges]
    out = []
    for part in (plus, minus):
        ne = sum(1 for a, b in edges if a in part and b in part)
        nt = sum(1 for w in H.faces() if all(H.tail(d) in part for d, _ in w))
        out.append(len(part) - ne + nt)
    return out[0], out[1], _induced_connected(H.num_vertices, edges, plus), _induced_connected(
        H.num_vertices, edges, minus
    )


def heawood_number(chi: int) -> int:
    if chi > 2:
        raise ValueError("Euler characteristic of a closed surface is at most 2")
    return (7 + math.isqrt(49 - 24 * chi)) // 2


# -- the chain ----------------------------------------------------------------

@dataclass
class Check:
    name: str
    lhs: int | float | str
    rhs: int | float | str
    holds: bool
    detail: str = ""


@dataclass
class AnalysisReport:
    chi_S: int
    k: int
    corank: int
    chi_Z: int
    chi_blowup: int
    chi_P: int
    chi_N: int
    chi_Gamma: int
    min_degree_Gamma: int
    deg_vK: int
    boundary_components_of_K: list[dict]
    checks: list[Check]
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.holds for c in self.checks)

    def to_json(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


def evaluate_chain(
    H_prime: EmbeddedGraph,
    disk_faces: Sequence[int],
    k: int,
    L: SchrodingerOperator,
    f: SignedVector,
    corank: int | None = None,
) -> AnalysisReport:
    """Run every step of the Euler characteristic chain with exact integers."""
    n = H_prime.num_vertices
    if len(f.values) != n or L.num_vertices != n:
        raise ChainPreconditionError("dimension mismatch between map, operator and vector")
    if any(L.apply(f.values)):
        raise ChainPreconditionError("f is not in the kernel of L")
    boundary = {H_prime.tail(d) for t in disk_faces for d, _ in H_prime.faces()[t]}
    if any(f.values[v] != 0 for v in boundary):
        raise ChainPreconditionError("f does not vanish on the whole boundary of D")
    if corank is None:
        corank = kernel_exact(L).corank
    chi_S = H_prime.euler_characteristic()
    Z = build_zero_complex(H_prime, f)
    Zb = blowup(Z, H_prime)
    gamma = contract_2d(Zb, disk_faces)
    chi_P, chi_N, con_P, con_N = chi_open_regions(H_prime, f)
    chi_Z, chi_b, chi_G = Z.euler_characteristic(), Zb.euler_characteristic(), gamma.euler_characteristic()
    deg = gamma.degrees()
    min_deg = min(deg.values()) if deg else 0
    deg_K = deg[gamma.v_K]
    circles = region_boundary_circles(H_prime, gamma.components[gamma.v_K])
    circle_rows = [{"length": c.length, "contractible": c.contractible} for c in circles]
    plus, _, minus = sign_partition(f)
    checks = [
        Check("(i) chi_S = chi_Z + chi_P + chi_N", chi_S, chi_Z + chi_P + chi_N, chi_S == chi_Z + chi_P + chi_N),
        Check(
            "(ii) open regions connected with chi <= 1",
            f"chi_P={chi_P}, chi_N={chi_N}",
            "<= 1",
            chi_P <= 1 and chi_N <= 1 and con_P and con_N and bool(plus) and bool(minus),
            f"connected_P={con_P}, connected_N={con_N}",
        ),
        Check("(iii) chi(blowup) = chi_Z", chi_b, chi_Z, chi_b == chi_Z),
        Check("(iv) chi_Gamma >= chi_Z", chi_G, chi_Z, chi_G >= chi_Z),
        Check("(v) min degree of Gamma >= 2", min_deg, 2, min_deg >= 2),
        Check(
            "(vi) boundary of K non-contractible, length >= k",
            min((c.length for c in circles), default=0),
            k,
            bool(circles) and all(not c.contractible and c.length >= k for c in circles),
            f"{len(circles)} boundary component(s)",
        ),
        Check("(vii) deg(v_K) >= k", deg_K, k, deg_K >= k),
        Check("(viii) 2 chi_Gamma <= 2 - k", 2 * chi_G, 2 - k, 2 * chi_G <= 2 - k),
        Check("(ix) k <= 6 - 2 chi_S", k, 6 - 2 * chi_S, k <= 6 - 2 * chi_S),
    ]
    notes = []
    if sum(deg.values()) != 2 * len(gamma.edges):
        notes.append("handshake identity failed")
    return AnalysisReport(
        chi_S, k, corank, chi_Z, chi_b, chi_P, chi_N, chi_G, min_deg, deg_K, circle_rows, checks, notes
    )
