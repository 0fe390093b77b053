"""Schrödinger operators on graphs.

Kernels and sign patterns are computed exactly over the rationals.  A
floating Jacobi eigensolver is used only to locate eigenvalues relative to
zero.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .surface_map import EmbeddedGraph, connected_components

DEFAULT_TOL = 2.0 ** -40


class SpectralAmbiguityError(ValueError):
    """A numeric eigenvalue sits near zero but the exact corank disagrees."""


class ConvergenceError(RuntimeError):
    pass


class InfeasiblePatternError(ValueError):
    pass


class BudgetExhausted(RuntimeError):
    pass


def graph_edges(m: EmbeddedGraph) -> frozenset[frozenset[int]]:
    return frozenset(frozenset((a, b)) for a, b, _ in m.edges if a != b)


@dataclass(frozen=True)
class SchrodingerOperator:
    num_vertices: int
    edges: frozenset[frozenset[int]]
    matrix: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def build(cls, num_vertices: int, edges: Iterable[Sequence[int]], matrix) -> "SchrodingerOperator":
        es = frozenset(frozenset((int(a), int(b))) for a, b in edges if a != b)
        mat = tuple(tuple(Fraction(x) for x in row) for row in matrix)
        return cls(num_vertices, es, mat)

    @classmethod
    def on_map(cls, m: EmbeddedGraph, matrix) -> "SchrodingerOperator":
        return cls.build(m.num_vertices, [(a, b) for a, b, _ in m.edges], matrix)

    def as_float(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.matrix], dtype=float)

    def apply(self, f: Sequence[Fraction]) -> list[Fraction]:
        return [sum((a * b for a, b in zip(row, f) if a and b), Fraction(0)) for row in self.matrix]


@dataclass(frozen=True)
class SignedVector:
    values: tuple[Fraction, ...]

    @classmethod
    def of(cls, values) -> "SignedVector":
        return cls(tuple(Fraction(x) for x in values))

    @property
    def plus(self) -> frozenset[int]:
        return frozenset(i for i, x in enumerate(self.values) if x > 0)

    @property
    def minus(self) -> frozenset[int]:
        return frozenset(i for i, x in enumerate(self.values) if x < 0)

    @property
    def zero(self) -> frozenset[int]:
        return frozenset(i for i, x in enumerate(self.values) if x == 0)

    @property
    def support(self) -> frozenset[int]:
        return self.plus | self.minus

    def scaled(self, c) -> "SignedVector":
        c = Fraction(c)
        return SignedVector(tuple(c * x for x in self.values))

    def normalized(self) -> "SignedVector":
        """Primitive integer multiple whose first nonzero entry is positive."""
        nz = [x for x in self.values if x]
        if not nz:
            return self
        den = math.lcm(*(x.denominator for x in nz))
        num = math.gcd(*(int(x * den) for x in nz))
        c = Fraction(den, num)
        return self.scaled(c if nz[0] > 0 else -c)


@dataclass(frozen=True)
class KernelBasis:
    vectors: tuple[tuple[Fraction, ...], ...]
    dimension_n: int

    @property
    def corank(self) -> int:
        return len(self.vectors)


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: tuple[float, ...]
    clusters: tuple[int, ...]
    residual: float
    rotations: int


def validate_operator(L: SchrodingerOperator) -> bool:
    n = L.num_vertices
    if len(L.matrix) != n or any(len(row) != n for row in L.matrix):
        raise ValueError(f"matrix is not {n}x{n}")
    for i in range(n):
        for j in range(i + 1, n):
            a, b = L.matrix[i][j], L.matrix[j][i]
            if a != b:
                return False
            if frozenset((i, j)) in L.edges:
                if a >= 0:
                    return False
            elif a != 0:
                return False
    return True


# -- exact elimination ------------------------------------------------------


def _integer_row(row: dict[int, Fraction]) -> dict[int, int]:
    den = math.lcm(*(x.denominator for x in row.values()))
    out = {c: int(x * den) for c, x in row.items()}
    g = math.gcd(*out.values())
    return {c: x // g for c, x in out.items()}


def nullspace(rows: Sequence[Sequence[Fraction]], ncols: int) -> list[tuple[Fraction, ...]]:
    """Exact null space of a rational matrix.

    Rows are scaled to primitive integer vectors and eliminated fraction-free,
    pivoting on the sparsest row and then its least-populated column.
    """
    live: dict[int, dict[int, int]] = {}
    cols: dict[int, set[int]] = {}
    for r, row in enumerate(rows):
        entries = {c: Fraction(x) for c, x in enumerate(row) if x}
        if entries:
            live[r] = _integer_row(entries)
            for c in live[r]:
                cols.setdefault(c, set()).add(r)
    pivots: list[tuple[int, dict[int, int]]] = []
    while live:
        r = min(live, key=lambda i: (len(live[i]), i))
        row = live.pop(r)
        c = min(row, key=lambda j: (len(cols[j]), j))
        for j in row:
            cols[j].discard(r)
        pivots.append((c, row))
        a = row[c]
        for r2 in list(cols[c]):
            other = live[r2]
            b = other[c]
            for j in other:
                cols[j].discard(r2)
            new: dict[int, int] = {}
            for j in other.keys() | row.keys():
                x = a * other.get(j, 0) - b * row.get(j, 0)
                if x:
                    new[j] = x
            if new:
                g = math.gcd(*new.values())
                new = {j: x // g for j, x in new.items()}
                live[r2] = new
                for j in new:
                    cols.setdefault(j, set()).add(r2)
            else:
                del live[r2]
    pivot_cols = {c for c, _ in pivots}
    basis = []
    for free in range(ncols):
        if free in pivot_cols:
            continue
        x = [Fraction(0)] * ncols
        x[free] = Fraction(1)
        for c, row in reversed(pivots):
            s = sum((v * x[j] for j, v in row.items() if j != c), Fraction(0))
            x[c] = -s / row[c]
        basis.append(SignedVector(tuple(x)).normalized().values)
    return basis


def kernel_exact(L: SchrodingerOperator) -> KernelBasis:
    return KernelBasis(tuple(nullspace(L.matrix, L.num_vertices)), L.num_vertices)


# -- numeric spectrum -------------------------------------------------------


def _round_robin(n: int) -> list[list[tuple[int, int]]]:
    players = list(range(n)) + ([-1] if n % 2 else [])
    m = len(players)
    rounds = []
    for _ in range(m - 1):
        pairs = []
        for i in range(m // 2):
            p, q = players[i], players[m - 1 - i]
            if p >= 0 and q >= 0:
                pairs.append((min(p, q), max(p, q)))
        rounds.append(pairs)
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def eigen_symmetric(L, tol: float = DEFAULT_TOL, budget: int | None = None) -> Spectrum:
    """Eigenvalues by parallel cyclic Jacobi rotations.

    Each round rotates a set of disjoint index pairs at once; rounds follow a
    round-robin schedule so every pair is visited once per sweep.
    """
    A = np.array(L.as_float() if isinstance(L, SchrodingerOperator) else L, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n) or not np.allclose(A, A.T, rtol=0, atol=0):
        raise ValueError("matrix is not symmetric")
    if budget is None:
        budget = 100 * n * n
    scale = float(np.linalg.norm(A))
    target = tol * scale
    negligible = 2.0 ** -64 * scale
    rotations = 0

    mask = ~np.eye(n, dtype=bool)

    def off(M: np.ndarray) -> float:
        # summed directly; subtracting the diagonal from the full norm cancels badly
        return float(np.linalg.norm(M[mask]))

    schedule = _round_robin(n) if n > 1 else []
    polish = 1
    while True:
        if off(A) <= target:
            if polish == 0:
                break
            polish -= 1
        before = rotations
        for pairs in schedule:
            p = np.array([a for a, _ in pairs])
            q = np.array([b for _, b in pairs])
            apq = A[p, q]
            # entries this small cannot move any eigenvalue by a visible amount
            tiny = (apq != 0) & (np.abs(apq) <= negligible)
            A[p[tiny], q[tiny]] = 0.0
            A[q[tiny], p[tiny]] = 0.0
            active = np.abs(apq) > negligible
            if not active.any():
                continue
            p, q, apq = p[active], q[active], apq[active]
            rotations += len(p)
            if rotations > budget:
                raise ConvergenceError(f"no convergence within {budget} rotations")
            theta = (A[q, q] - A[p, p]) / (2.0 * apq)
            t = np.sign(theta) / (np.abs(theta) + np.hypot(theta, 1.0))
            t[theta == 0] = 1.0
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            Ap, Aq = A[p, :].copy(), A[q, :].copy()
            A[p, :] = c[:, None] * Ap - s[:, None] * Aq
            A[q, :] = s[:, None] * Ap + c[:, None] * Aq
            Ap, Aq = A[:, p].copy(), A[:, q].copy()
            A[:, p] = Ap * c - Aq * s
            A[:, q] = Ap * s + Aq * c
        if rotations == before:
            break
    vals = np.sort(np.diag(A))
    clusters = []
    gap = tol * max(scale, 1e-300)
    for i, x in enumerate(vals):
        if i and x - vals[i - 1] <= gap:
            clusters[-1] += 1
        else:
            clusters.append(1)
    return Spectrum(tuple(float(x) for x in vals), tuple(clusters), off(A), rotations)


def check_one_negative(L: SchrodingerOperator, tol: float = DEFAULT_TOL, kernel: KernelBasis | None = None) -> bool:
    """Exactly one negative eigenvalue, and a zero eigenvalue of the exact corank.

    Raises SpectralAmbiguityError when the number of numerically zero
    eigenvalues differs from the exact corank.
    """
    if kernel is None:
        kernel = kernel_exact(L)
    spec = eigen_symmetric(L, tol)
    thr = tol * float(np.linalg.norm(L.as_float()))
    zeros = sum(1 for x in spec.eigenvalues if abs(x) <= thr)
    negatives = sum(1 for x in spec.eigenvalues if x < -thr)
    if zeros != kernel.corank:
        raise SpectralAmbiguityError(f"{zeros} eigenvalues within {thr:.3g} of zero but exact corank is {kernel.corank}")
    return kernel.corank > 0 and negatives == 1


# -- kernel vectors with prescribed zeros -----------------------------------


def constrained_kernel_vector(basis: KernelBasis, zero_set: Iterable[int]) -> SignedVector | None:
    """A nonzero kernel vector vanishing on ``zero_set``, or None."""
    if not basis.vectors:
        return None
    zs = sorted(set(zero_set))
    rows = [[b[v] for b in basis.vectors] for v in zs]
    coeffs = nullspace(rows, basis.corank)
    if not coeffs:
        return None
    c = coeffs[0]
    n = basis.dimension_n
    f = [sum((ci * b[v] for ci, b in zip(c, basis.vectors) if ci), Fraction(0)) for v in range(n)]
    return SignedVector(tuple(f)).normalized()


def minimize_support(
    L: SchrodingerOperator,
    f: SignedVector,
    zero_set: Iterable[int] = (),
    basis: KernelBasis | None = None,
) -> SignedVector:
    """Shrink the support of a kernel vector until it is inclusion-minimal.

    Vertices are tried in ascending order; each is forced to zero along with
    everything already outside the support.  One pass suffices because the
    support only shrinks.
    """
    if basis is None:
        basis = kernel_exact(L)
    fixed = set(zero_set)
    n = L.num_vertices
    for v in sorted(f.support):
        if v not in f.support:
            continue
        outside = fixed | (set(range(n)) - f.support)
        g = constrained_kernel_vector(basis, outside | {v})
        if g is not None:
            f = g
    return f


def is_inclusion_minimal(basis: KernelBasis, f: SignedVector, zero_set: Iterable[int] = ()) -> bool:
    n = basis.dimension_n
    outside = set(zero_set) | (set(range(n)) - f.support)
    return all(constrained_kernel_vector(basis, outside | {v}) is None for v in f.support)


# -- designed instances -----------------------------------------------------


def _check_pattern(n: int, edges: list[tuple[int, int]], pattern: Sequence[int]) -> None:
    if len(pattern) != n:
        raise ValueError("pattern length differs from vertex count")
    if any(s not in (-1, 0, 1) for s in pattern):
        raise ValueError("pattern entries must be -1, 0 or +1")
    if 1 not in pattern or -1 not in pattern:
        raise InfeasiblePatternError("pattern needs both signs")
    nbr_signs: list[set[int]] = [set() for _ in range(n)]
    for a, b in edges:
        nbr_signs[a].add(pattern[b])
        nbr_signs[b].add(pattern[a])
    for v in range(n):
        if pattern[v] == 0 and len(nbr_signs[v] & {1, -1}) == 1:
            raise InfeasiblePatternError(f"zero vertex {v} sees only one sign")
    for sgn in (1, -1):
        part = [v for v in range(n) if pattern[v] == sgn]
        idx = {v: i for i, v in enumerate(part)}
        pairs = [(idx[a], idx[b]) for a, b in edges if a in idx and b in idx]
        if len(connected_components(len(part), pairs)) != 1:
            raise InfeasiblePatternError(f"the {'+' if sgn > 0 else '-'} part is not connected")


def designed_kernel_instance(
    num_vertices: int,
    edges: Iterable[Sequence[int]],
    pattern: Sequence[int],
    seed: int = 0,
    budget: int = 20,
    tol: float = DEFAULT_TOL,
) -> tuple[SchrodingerOperator, SignedVector]:
    """An operator with exactly one negative eigenvalue and a kernel vector of the given signs.

    Edges inside the positive part, inside the negative part, or between
    zero vertices get weights in [1, 2]; every other edge gets a small weight
    of order ``eps``.  Diagonals on the support are solved so that Lf = 0,
    weights into each zero vertex are rebalanced so its row cancels, and zero
    vertices get a dominant diagonal.  Conjugating the support block by
    diag(f) gives a weighted Laplacian of two connected pieces joined by
    small negative weights, which is how the single negative eigenvalue
    arises.  Each failed attempt halves ``eps``.
    """
    n = num_vertices
    es = sorted({(min(a, b), max(a, b)) for a, b in edges if a != b})
    _check_pattern(n, es, pattern)
    rng = random.Random(seed)
    eps = Fraction(1, 2 ** (8 * n).bit_length())
    nbrs: list[list[int]] = [[] for _ in range(n)]
    for a, b in es:
        nbrs[a].append(b)
        nbrs[b].append(a)
    for _ in range(budget):
        f = [Fraction(0)] * n
        for v in range(n):
            if pattern[v]:
                f[v] = Fraction(pattern[v] * rng.randint(1, 2))
        W: dict[tuple[int, int], Fraction] = {}
        for a, b in es:
            if pattern[a] * pattern[b] < 0 or (pattern[a] == 0) != (pattern[b] == 0):
                W[(a, b)] = eps * Fraction(rng.randint(4, 8), 4)
            else:
                W[(a, b)] = 1 + Fraction(rng.randint(0, 8), 8)

        def w(a: int, b: int) -> Fraction:
            return W[(min(a, b), max(a, b))]

        for z in range(n):
            if pattern[z]:
                continue
            pos = sum((w(z, u) * f[u] for u in nbrs[z] if pattern[u] > 0), Fraction(0))
            neg = sum((-w(z, u) * f[u] for u in nbrs[z] if pattern[u] < 0), Fraction(0))
            if pos:
                for u in nbrs[z]:
                    if pattern[u] > 0:
                        W[(min(z, u), max(z, u))] *= neg / pos
        M = [[Fraction(0)] * n for _ in range(n)]
        for (a, b), x in W.items():
            M[a][b] = M[b][a] = -x
        for v in range(n):
            if pattern[v]:
                M[v][v] = sum((w(v, u) * f[u] for u in nbrs[v]), Fraction(0)) / f[v]
            else:
                M[v][v] = 1 + sum((w(v, u) for u in nbrs[v]), Fraction(0))
        L = SchrodingerOperator.build(n, es, M)
        vec = SignedVector(tuple(f))
        if any(L.apply(vec.values)):
            raise AssertionError("designed operator does not annihilate f")
        try:
            if check_one_negative(L, tol):
                return L, vec
        except (SpectralAmbiguityError, ConvergenceError):
            pass
        eps /= 2
    raise BudgetExhausted(f"no operator with one negative eigenvalue after {budget} attempts")


# -- operator text format ---------------------------------------------------


def parse_operator(text: str) -> list[list[Fraction]]:
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            rows.append([Fraction(tok) for tok in line.split()])
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    if any(len(r) != len(rows) for r in rows):
        raise ValueError("operator matrix is not square")
    return rows


def format_operator(matrix) -> str:
    return "\n".join(" ".join(str(Fraction(x)) for x in row) for row in matrix) + "\n"
