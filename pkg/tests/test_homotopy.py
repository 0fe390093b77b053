import itertools
import math
import random

import pytest

from cdvbound.homotopy import (
    CycleWalk,
    NonSimpleCycleError,
    cut_along_cycle,
    edgewidth,
    edgewidth_bruteforce,
    is_contractible,
    region_boundary_circles,
    simple_cycles,
)
from oracles import contractible_z2, cycle_darts


def k7_triangles(k7):
    facial = {frozenset(k7.face_vertices(f)) for f in range(len(k7.faces()))}
    for tri in itertools.combinations(range(7), 3):
        yield tri, frozenset(tri) in facial


def test_k7_triangles(k7):
    counts = {True: 0, False: 0}
    for tri, facial in k7_triangles(k7):
        darts = cycle_darts(k7, tri)
        assert is_contractible(k7, darts) == facial
        assert contractible_z2(k7, darts) == facial
        counts[facial] += 1
    assert counts == {True: 14, False: 21}


def test_meridian_cut(k7):
    tri = next(t for t, facial in k7_triangles(k7) if not facial)
    comps = cut_along_cycle(k7, cycle_darts(k7, tri))
    assert len(comps) == 1
    assert comps[0].boundary_circles == 2 and comps[0].chi == 0


def test_facial_cut(k7):
    comps = cut_along_cycle(k7, cycle_darts(k7, k7.face_vertices(0)))
    assert sorted((c.chi, len(c.faces)) for c in comps) == [(-1, 13), (1, 1)]
    assert any(c.is_disk for c in comps)


def test_one_sided_cycle(k6):
    for tri in itertools.combinations(range(6), 3):
        darts = cycle_darts(k6, tri)
        comps = cut_along_cycle(k6, darts)
        if not is_contractible(k6, darts):
            assert len(comps) == 1 and comps[0].boundary_circles == 1 and comps[0].chi == 1
            assert not contractible_z2(k6, darts)
            return
    pytest.fail("no non-contractible triangle in K6")


def test_non_simple_rejected(k7):
    tri = (0, 1, 2)
    darts = cycle_darts(k7, tri)
    with pytest.raises(NonSimpleCycleError):
        is_contractible(k7, darts[:2])
    with pytest.raises(NonSimpleCycleError):
        is_contractible(k7, darts + darts)
    assert CycleWalk(tuple(darts)).is_simple(k7)


def test_sphere_edgewidth(tetra):
    assert edgewidth(tetra) == math.inf
    assert edgewidth_bruteforce(tetra, 4) is None


def test_base_edgewidths(k7, k6):
    assert edgewidth(k7) == 3 == edgewidth_bruteforce(k7, 3)
    assert edgewidth(k6) == 3 == edgewidth_bruteforce(k6, 3)


def test_boundary_of_d_not_contractible(refined):
    ref = refined("k7_torus", 3)
    darts = cycle_darts(ref.H, ref.disk_boundary)
    assert not is_contractible(ref.H, darts)
    assert not contractible_z2(ref.H, darts)


def test_simple_cycle_counts(k7):
    # K7 has C(7,3) triangles and 7*6*5*4/8 four-cycles
    assert sum(1 for _ in simple_cycles(k7, 3)) == 35
    assert sum(1 for _ in simple_cycles(k7, 4)) == 105


@pytest.mark.parametrize("name,k", [("k7_torus", 3), ("k6_projective", 3), ("k6_projective", 4)])
def test_refined_edgewidth_matches_bruteforce(refined, name, k):
    H = refined(name, k).H
    assert edgewidth(H) == k
    assert edgewidth_bruteforce(H, k) == k
    assert edgewidth_bruteforce(H, k - 1) is None


@pytest.mark.parametrize("name,k", [("k7_torus", 3), ("k6_projective", 4)])
def test_contractibility_agrees_with_z2(refined, name, k):
    H = refined(name, k).H
    rng = random.Random(k)
    for length in range(3, k + 3):
        cycles = list(itertools.islice(simple_cycles(H, length), 3000))
        for cyc in rng.sample(cycles, min(150, len(cycles))):
            assert is_contractible(H, cyc) == contractible_z2(H, cyc), cyc


def test_region_circles_of_single_face(k7):
    circles = region_boundary_circles(k7, {0})
    assert len(circles) == 1 and circles[0].length == 3
    # complement of a face is a holed torus, not a disk
    assert not circles[0].contractible


def test_region_circles_of_face_star(k7):
    region = set(k7.vertex_faces(0))
    circles = region_boundary_circles(k7, region)
    assert len(circles) == 1 and circles[0].length == 6


def test_region_circles_of_complement(k7):
    region = set(range(1, len(k7.faces())))
    circles = region_boundary_circles(k7, region)
    assert len(circles) == 1 and circles[0].length == 3 and circles[0].contractible
