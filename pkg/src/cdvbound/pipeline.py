"""End-to-end runs: refine a map, pick an operator, and evaluate the chain."""

from __future__ import annotations

import heapq
import random
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Sequence

from .homotopy import region_boundary_circles
from .nodal import AnalysisReport, ChainPreconditionError, check_nodal, check_plus_minus, evaluate_chain
from .refine import PreconditionError, RefinedTriangulation, build_prescribed_edgewidth
from .spectral import (
    BudgetExhausted,
    ConvergenceError,
    InfeasiblePatternError,
    SchrodingerOperator,
    SignedVector,
    SpectralAmbiguityError,
    check_one_negative,
    constrained_kernel_vector,
    designed_kernel_instance,
    kernel_exact,
    minimize_support,
    validate_operator,
)
from .surface_map import EmbeddedGraph, connected_components


@dataclass(frozen=True)
class KnownMuEntry:
    name: str
    mu: int
    source: str


KNOWN_MU: dict[str, KnownMuEntry] = {
    **{f"K{n}": KnownMuEntry(f"K{n}", n - 1, "complete graph: mu(K_n) = n - 1") for n in range(1, 11)},
    "K3,3": KnownMuEntry("K3,3", 4, "smallest non-planar bipartite graph; mu = 4 exactly for non-planar linkless graphs"),
}


def check_bound(mu: int, chi: int) -> tuple[bool, int]:
    """Whether ``mu <= 7 - 2 chi``, with the slack."""
    if chi > 2:
        raise ValueError("Euler characteristic of a closed surface is at most 2")
    slack = 7 - 2 * chi - mu
    return slack >= 0, slack


class PatternDesignError(RuntimeError):
    pass


def zero_closure(H: EmbeddedGraph, seeds: Sequence[int]) -> set[int]:
    """Grow ``seeds`` until no member has exactly one neighbour outside.

    Such a vertex could never see both signs, so its lone outside neighbour
    has to vanish as well.
    """
    adj = H.adjacency()
    zero = set(seeds)
    changed = True
    while changed:
        changed = False
        for z in sorted(zero):
            out = {u for u in adj[z] if u not in zero}
            if len(out) == 1:
                zero |= out
                changed = True
    return zero


def _boundary_cycle_of_zero_region(H: EmbeddedGraph, zero: set[int]) -> list[int]:
    solid = [t for t, w in enumerate(H.faces()) if all(H.tail(d) in zero for d, _ in w)]
    circles = region_boundary_circles(H, solid)
    if len(circles) != 1:
        raise PatternDesignError("zero region does not have a single boundary circle")
    return [H.tail(d) for d in circles[0].darts]


def _cheapest_path(adj: list[list[int]], src: int, dst: int, cost) -> list[int] | None:
    """Dijkstra on vertex costs; ``cost(v)`` None forbids ``v``."""
    best = {src: 0}
    parent = {src: None}
    heap = [(0, src)]
    while heap:
        c, u = heapq.heappop(heap)
        if u == dst:
            path = []
            while u is not None:
                path.append(u)
                u = parent[u]
            return path[::-1]
        if c > best[u]:
            continue
        for w in adj[u]:
            step = cost(w)
            if step is None:
                continue
            if w not in best or c + step < best[w]:
                best[w] = c + step
                parent[w] = u
                heapq.heappush(heap, (c + step, w))
    return None


def design_pattern(H: EmbeddedGraph, boundary: Sequence[int], seed: int = 0, tries: int = 200) -> list[int]:
    """A sign pattern vanishing on ∂D that a designed operator can realise.

    The zero set is the closure of ∂D, a disk K.  The positive part is a path
    touching the ring around K at a few points: the apex of the outside
    triangle on a boundary edge of K serves both ends of that edge.  Between
    touches the path leaves the ring and passes through a random waypoint.
    Accepted when the negative part is connected and every zero vertex with
    outside neighbours sees both signs.
    """
    n = H.num_vertices
    zero = zero_closure(H, boundary)
    adj = H.adjacency()
    cycle = _boundary_cycle_of_zero_region(H, zero)
    m = len(cycle)
    ring = {u for z in zero for u in adj[z] if u not in zero}
    inner = [v for v in range(n) if v not in zero and v not in ring]
    rng = random.Random(seed)
    rejected: Counter[str] = Counter()
    for _ in range(tries):
        offset = rng.randrange(m)
        touches = []
        for i in range(0, m - 1, 2):
            a, b = cycle[(offset + i) % m], cycle[(offset + i + 1) % m]
            common = sorted(set(adj[a]) & set(adj[b]) & ring)
            if common:
                touches.append(rng.choice(common))
        if m % 2:
            z = cycle[(offset + m - 1) % m]
            touches.append(rng.choice(sorted(u for u in adj[z] if u in ring)))
        plus: list[int] = [touches[0]]
        for t in touches[1:]:
            w = rng.choice(inner)
            used = set(plus)

            def cost(x: int) -> int | None:
                if x in zero or x in used:
                    return None
                return n if x in ring else 1

            leg1 = _cheapest_path(adj, plus[-1], w, cost)
            if leg1 is None:
                rejected["leg blocked"] += 1
                break
            used.update(leg1)
            leg2 = _cheapest_path(adj, w, t, cost)
            if leg2 is None:
                rejected["leg blocked"] += 1
                break
            plus += leg1[1:] + leg2[1:]
        else:
            pset = set(plus)
            minus = [v for v in range(n) if v not in zero and v not in pset]
            idx = {v: i for i, v in enumerate(minus)}
            pairs = [(idx[a], idx[b]) for a in minus for b in adj[a] if b in idx]
            if not minus or len(connected_components(len(minus), pairs)) != 1:
                rejected["negative part disconnected"] += 1
                continue
            if all(
                not out or (pset.intersection(out) and idx.keys() & set(out))
                for out in ([u for u in adj[z] if u not in zero] for z in zero)
            ):
                return [0 if v in zero else (1 if v in pset else -1) for v in range(n)]
            rejected["zero vertex sees one sign"] += 1
    summary = ", ".join(f"{why}: {c}" for why, c in sorted(rejected.items()))
    raise PatternDesignError(f"no admissible sign pattern found ({summary})")


@dataclass
class PipelineResult:
    refined: RefinedTriangulation | None
    report: AnalysisReport | None
    exit_code: int
    messages: list[str] = field(default_factory=list)
    operator: SchrodingerOperator | None = None
    vector: SignedVector | None = None

    def to_json(self) -> dict:
        out: dict = {"exit_code": self.exit_code, "messages": list(self.messages)}
        if self.refined is not None:
            H = self.refined.H_prime
            out["refined"] = {
                "vertices": H.num_vertices,
                "edges": H.num_edges,
                "faces": len(H.faces()),
                "k": self.refined.k,
                "disk_faces": list(self.refined.disk_faces),
            }
        if self.vector is not None:
            out["support_size"] = len(self.vector.support)
        out["report"] = None if self.report is None else self.report.to_json()
        return out


def run_pipeline(
    G: EmbeddedGraph,
    k: int,
    face: int = 0,
    operator: Sequence[Sequence] | None = None,
    seed: int = 0,
) -> PipelineResult:
    """Refine ``G``, obtain an operator and kernel vector, and evaluate the chain.

    With ``operator`` None a designed operator is generated from ``seed``.
    Exit codes: 0 all checks pass, 1 some check fails, 2 bad input.
    """
    msgs: list[str] = []
    try:
        ref = build_prescribed_edgewidth(G, k, face=face, seed=seed)
    except PreconditionError as exc:
        return PipelineResult(None, None, 2, [f"refine: {exc}"])
    H = ref.H_prime
    boundary = ref.disk_boundary
    try:
        if operator is None:
            pattern = design_pattern(H, boundary, seed)
            L, _ = designed_kernel_instance(H.num_vertices, [(a, b) for a, b, _ in H.edges], pattern, seed)
            msgs.append("spectral: designed operator")
        else:
            L = SchrodingerOperator.on_map(H, operator)
            if not validate_operator(L):
                return PipelineResult(ref, None, 2, msgs + ["spectral: operator violates the sign pattern of H'"])
        basis = kernel_exact(L)
        if not check_one_negative(L, kernel=basis):
            return PipelineResult(ref, None, 1, msgs + ["spectral: operator does not have exactly one negative eigenvalue"], L)
        f = constrained_kernel_vector(basis, boundary)
        if f is None:
            return PipelineResult(ref, None, 1, msgs + [f"spectral: insufficient kernel (corank {basis.corank})"], L)
        f = minimize_support(L, f, boundary, basis)
    except (
        PatternDesignError, InfeasiblePatternError, BudgetExhausted, SpectralAmbiguityError, ConvergenceError
    ) as exc:
        return PipelineResult(ref, None, 1, msgs + [f"spectral: {exc}"])
    except ValueError as exc:
        return PipelineResult(ref, None, 2, msgs + [f"spectral: {exc}"])
    if not check_plus_minus(L, f):
        msgs.append("nodal: plus-minus property fails")
    if not check_nodal(L, f):
        msgs.append("nodal: nodal domains are not connected")
    try:
        report = evaluate_chain(H, ref.disk_faces, k, L, f, basis.corank)
    except ChainPreconditionError as exc:
        return PipelineResult(ref, None, 2, msgs + [f"nodal: {exc}"], L, f)
    ok = report.passed and not any(m.startswith("nodal:") for m in msgs)
    return PipelineResult(ref, report, 0 if ok else 1, msgs, L, f)
