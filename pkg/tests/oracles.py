"""Reference implementations used only by the tests.

They take a different route from the library code: contractibility through
mod 2 face boundaries instead of a dual search, dense eigenvalues from numpy,
and plain rational Gaussian elimination for kernels.
"""

from fractions import Fraction


def dart_between(m, u, v):
    for e, (a, b, _) in enumerate(m.edges):
        if (a, b) == (u, v):
            return 2 * e
        if (a, b) == (v, u):
            return 2 * e + 1
    raise KeyError((u, v))


def cycle_darts(m, vertices):
    n = len(vertices)
    return [dart_between(m, vertices[i], vertices[(i + 1) % n]) for i in range(n)]


def _face_mask(m, f):
    mask = 0
    for e in m.face_edges(f):
        mask ^= 1 << e
    return mask


def _bounding_faces(m, target, excluded):
    """Face set (as an int mask) whose mod 2 boundary is ``target``, or None."""
    basis = {}  # pivot bit -> (edge mask, face mask)
    for f in range(len(m.faces())):
        if f == excluded:
            continue
        vec, comb = _face_mask(m, f), 1 << f
        while vec:
            p = vec.bit_length() - 1
            if p not in basis:
                basis[p] = (vec, comb)
                break
            bv, bc = basis[p]
            vec ^= bv
            comb ^= bc
    comb = 0
    while target:
        p = target.bit_length() - 1
        if p not in basis:
            return None
        bv, bc = basis[p]
        target ^= bv
        comb ^= bc
    return comb


def _closure_chi(m, faces):
    vs, es = set(), set()
    for f in faces:
        vs.update(m.face_vertices(f))
        es.update(m.face_edges(f))
    return len(vs) - len(es) + len(faces)


def contractible_z2(m, darts):
    """A simple cycle is contractible in S minus D iff it bounds a disk of faces avoiding D."""
    target = 0
    for d in darts:
        target ^= 1 << (d >> 1)
    excluded = m.disk if m.disk is not None else 0
    comb = _bounding_faces(m, target, excluded)
    if comb is None:
        return False
    side = [f for f in range(len(m.faces())) if comb >> f & 1]
    if _closure_chi(m, side) == 1:
        return True
    if m.disk is None:
        return m.euler_characteristic() - _closure_chi(m, side) == 1
    return False


def rational_kernel_dim(matrix):
    """Corank by textbook row reduction over the rationals."""
    rows = [[Fraction(x) for x in r] for r in matrix]
    n = len(rows[0]) if rows else 0
    rank, col = 0, 0
    while rank < len(rows) and col < n:
        piv = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        p = rows[rank][col]
        for i in range(len(rows)):
            if i != rank and rows[i][col] != 0:
                c = rows[i][col] / p
                rows[i] = [x - c * y for x, y in zip(rows[i], rows[rank])]
        rank += 1
        col += 1
    return n - rank


def matvec(matrix, vec):
    return [sum(Fraction(a) * b for a, b in zip(row, vec) if a) for row in matrix]
