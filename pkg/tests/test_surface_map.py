import itertools
import random

import pytest

from cdvbound.surface_map import (
    EmbeddedGraph,
    MapStructureError,
    MapSyntaxError,
    add_edge_in_face,
    add_vertex_in_face,
    classify_surface,
    euler_characteristic,
    format_map,
    from_triangles,
    is_simplicial,
    orientation_signs,
    parse_map,
    subdivide_edge,
    trace_faces,
)

TETRA_TEXT = """\
# K4 on the sphere
map 4 6
edge 0 0 1 +
edge 1 0 2 +
edge 2 0 3 +
edge 3 1 2 +
edge 4 1 3 +
edge 5 2 3 +
vertex 0: 0 2 4
vertex 1: 1 8 6
vertex 2: 3 7 10
vertex 3: 5 11 9
"""


def rotation_map(n, rotations):
    """All-positive map on a simple graph from neighbour cycles."""
    eid = {}
    edges = []
    for v, nbrs in enumerate(rotations):
        for w in nbrs:
            key = (min(v, w), max(v, w))
            if key not in eid:
                eid[key] = len(edges)
                edges.append((key[0], key[1], 1))
    rot = [[2 * eid[(min(v, w), max(v, w))] + (0 if v < w else 1) for w in nbrs] for v, nbrs in enumerate(rotations)]
    return EmbeddedGraph(n, edges, rot)


def loop_map(sign):
    return EmbeddedGraph(1, [(0, 0, sign)], [[0, 1]])


def test_parse_tetrahedron():
    m = parse_map(TETRA_TEXT)
    assert (m.num_vertices, m.num_edges, len(m.faces())) == (4, 6, 4)
    assert euler_characteristic(m) == 2
    assert all(len(w) == 3 for w in trace_faces(m))


def test_k7_cyclic_rotation_scheme_has_14_faces():
    # rotation at i: i+1, i+3, i+2, i+6, i+4, i+5
    steps = [1, 3, 2, 6, 4, 5]
    m = rotation_map(7, [[(i + s) % 7 for s in steps] for i in range(7)])
    assert len(m.faces()) == 14
    assert euler_characteristic(m) == 0
    info = classify_surface(m)
    assert info.orientable and info.genus_or_crosscaps == 1


def test_bundled_maps(tetra, k7, k6):
    assert euler_characteristic(tetra) == 2
    assert euler_characteristic(k7) == 0 and len(k7.faces()) == 14
    assert euler_characteristic(k6) == 1 and len(k6.faces()) == 10
    assert classify_surface(k6).orientable is False
    assert classify_surface(k6).genus_or_crosscaps == 1
    assert classify_surface(tetra).name == "sphere"
    for m in (tetra, k7, k6):
        assert is_simplicial(m)


def test_edge_appearing_once_is_structural_error():
    text = TETRA_TEXT.replace("vertex 3: 5 11 9", "vertex 3: 5 11")
    with pytest.raises(MapStructureError):
        parse_map(text)


def test_syntax_error_reports_line():
    with pytest.raises(MapSyntaxError) as exc:
        parse_map("map 1 1\nedge 0 0 0 ?\nvertex 0: 0 1\n")
    assert exc.value.lineno == 2


def test_loops():
    pos, neg = loop_map(1), loop_map(-1)
    assert len(pos.faces()) == 2 and euler_characteristic(pos) == 2
    assert len(neg.faces()) == 1 and euler_characteristic(neg) == 1
    info = classify_surface(neg)
    assert not info.orientable and info.genus_or_crosscaps == 1
    assert not is_simplicial(pos)


def test_resigning_finds_orientation(k7, k6):
    signs = orientation_signs(k7)
    assert signs is not None
    # flipping the local orientation at vertices with sign -1 makes every edge positive
    assert all(s * signs[a] * signs[b] == 1 for a, b, s in k7.edges)
    assert orientation_signs(k6) is None


def test_format_round_trip(k6):
    again = parse_map(format_map(k6.with_disk(3)))
    assert again.edges == k6.edges and again.rotation == k6.rotation and again.disk == 3


def test_subdivide_tetrahedron_edge(tetra):
    m = subdivide_edge(tetra, 2)
    assert (m.num_vertices, m.num_edges, len(m.faces())) == (5, 7, 4)
    assert euler_characteristic(m) == 2


def test_add_edge_splits_square():
    square = rotation_map(4, [[1, 3], [2, 0], [3, 1], [0, 2]])
    f = max(range(len(square.faces())), key=lambda i: len(square.faces()[i]))
    walk = square.faces()[f]
    m = add_edge_in_face(square, f, walk[0][0], walk[2][0])
    assert sorted(len(w) for w in m.faces()) == [3, 3, 4]
    assert euler_characteristic(m) == 2


def test_star_triangle_keeps_chi(tetra):
    m = add_vertex_in_face(tetra, 0)
    assert (m.num_vertices, m.num_edges, len(m.faces())) == (5, 9, 6)
    assert euler_characteristic(m) == 2 and is_simplicial(m)


def test_distinguished_face_is_protected(tetra):
    m = tetra.with_disk(1)
    with pytest.raises(MapStructureError):
        add_vertex_in_face(m, 1)
    walk = m.faces()[1]
    with pytest.raises(MapStructureError):
        add_edge_in_face(m, 1, walk[0][0], walk[1][0])


def test_from_triangles_rejects_non_surface():
    # two tetrahedra sharing a vertex: the link of the shared vertex is two circles
    tris = [(0, 1, 2), (0, 2, 3), (0, 3, 1), (1, 3, 2), (0, 4, 5), (0, 5, 6), (0, 6, 4), (4, 6, 5)]
    with pytest.raises(MapStructureError):
        from_triangles(7, tris)


@pytest.mark.parametrize("seed", range(5))
def test_random_surgery_keeps_chi(seed, k6):
    rng = random.Random(seed)
    m = k6
    chi = euler_characteristic(m)
    for _ in range(25):
        op = rng.choice("sve")
        if op == "s":
            m = subdivide_edge(m, rng.randrange(m.num_edges))
        elif op == "v":
            m = add_vertex_in_face(m, rng.randrange(len(m.faces())))
        else:
            f = rng.randrange(len(m.faces()))
            walk = m.faces()[f]
            if len(walk) < 4:
                continue
            i, j = sorted(rng.sample(range(len(walk)), 2))
            m = add_edge_in_face(m, f, walk[i][0], walk[j][0])
        assert euler_characteristic(m) == chi
        assert classify_surface(m).orientable is False


def test_simplicial_detects_multi_edge():
    # two vertices joined by three edges: a theta graph on the sphere
    m = EmbeddedGraph(2, [(0, 1, 1), (0, 1, 1), (0, 1, 1)], [[0, 2, 4], [5, 3, 1]])
    assert euler_characteristic(m) == 2
    assert not is_simplicial(m)


def test_faces_partition_dart_sides(k7):
    seen = list(itertools.chain.from_iterable(k7.faces()))
    assert len(seen) == 2 * k7.num_edges
    sides = {(d, o) for d, o in seen} | {k7.reverse_state(st) for st in seen}
    assert len(sides) == 4 * k7.num_edges
