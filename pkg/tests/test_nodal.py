import random
from fractions import Fraction

import pytest

from cdvbound.nodal import (
    ChainPreconditionError,
    blowup,
    build_zero_complex,
    check_nodal,
    check_plus_minus,
    chi_complex,
    chi_open_regions,
    contract_2d,
    heawood_number,
    sign_partition,
    triangle_trace,
)
from cdvbound.spectral import SignedVector
from cdvbound.surface_map import from_triangles


def vec(*xs):
    return SignedVector.of(xs)


def multi_fan_vector(H, v, rng):
    """Zero at v and on two separated pairs of consecutive neighbours; other signs random."""
    rot = H.rotation[v]
    k = len(rot)
    vals = [rng.choice([-2, -1, 1, 2]) for _ in range(H.num_vertices)]
    vals[v] = 0
    nb = [H.head(d) for d in rot]
    start = rng.randrange(k)
    for off in (0, 1, 3, 4):
        vals[nb[(start + off) % k]] = 0
    for off in (2, 5):
        if off < k:
            vals[nb[(start + off) % k]] = rng.choice([-1, 1])
    return SignedVector.of(vals)


def test_sign_partition():
    plus, zero, minus = sign_partition(vec(1, 0, -1))
    assert (plus, zero, minus) == ({0}, {1}, {2})
    with pytest.raises(ValueError):
        sign_partition(vec(0, 0, 0))


def test_plus_minus_examples():
    path = (3, [(0, 1), (1, 2)])
    assert check_plus_minus(path, vec(1, 0, -1))
    assert not check_plus_minus(path, vec(1, 0, 1))
    assert check_plus_minus(path, vec(1, 1, 1))
    # zero vertices with no support neighbour are fine
    assert check_plus_minus((4, [(0, 1), (2, 3)]), vec(1, -1, 0, 0))
    assert not check_plus_minus((4, [(0, 1), (1, 2), (2, 3)]), vec(1, -1, 0, 0))


def test_nodal_examples():
    path4 = (4, [(0, 1), (1, 2), (2, 3)])
    assert check_nodal(path4, vec(1, 1, -1, -1))
    assert not check_nodal(path4, vec(1, -1, 1, -1))
    assert not check_nodal(path4, vec(1, 1, 1, 1))


@pytest.mark.parametrize(
    "vals,kind",
    [
        ((0, 0, 0), "solid"),
        ((0, 0, 1), "corner-edge"),
        ((0, 1, -1), "corner-to-crossing"),
        ((0, 1, 1), "corner-vertex"),
        ((1, -1, -1), "crossing-to-crossing"),
        ((1, 2, 3), "empty"),
        ((-1, -1, -1), "empty"),
    ],
)
def test_triangle_cases(vals, kind):
    case = triangle_trace(*vals)
    assert case.kind == kind
    if kind == "crossing-to-crossing":
        assert len(case.crossings) == 2


def test_heawood():
    assert [heawood_number(c) for c in (2, 0, 1)] == [4, 7, 6]
    assert heawood_number(-2) == 8
    with pytest.raises(ValueError):
        heawood_number(3)


def test_zero_complex_of_single_vertex(k7):
    vals = [1] * 7
    vals[0] = 0
    Z = build_zero_complex(k7, SignedVector.of(vals))
    assert chi_complex(Z) == 1 and Z.components() == 1 and not Z.solids


def test_zero_complex_equator(k7):
    # f = +1 on one face's vertices and -1 elsewhere: the zero set is a circle around the face
    plus = set(k7.face_vertices(0))
    f = SignedVector.of([1 if v in plus else -1 for v in range(7)])
    Z = build_zero_complex(k7, f)
    assert chi_complex(Z) == 0
    chi_P, chi_N, con_P, con_N = chi_open_regions(k7, f)
    assert (chi_P, con_P) == (1, True)
    assert 0 == chi_complex(Z) + chi_P + chi_N


def wheel6():
    """Octahedron-like sphere: hub 0, rim 1..6, outer apex 7."""
    rim = [1, 2, 3, 4, 5, 6]
    tris = [(0, rim[i], rim[(i + 1) % 6]) for i in range(6)]
    tris += [(rim[(i + 1) % 6], rim[i], 7) for i in range(6)]
    return from_triangles(8, tris)


def test_two_solid_triangles_sharing_a_node():
    H = wheel6()
    assert H.euler_characteristic() == 2
    # solids 0-1-2 and 0-4-5 meet only at the hub
    f = SignedVector.of([0, 0, 0, 1, 0, 0, -1, 1])
    Z = build_zero_complex(H, f)
    assert len(Z.solids) == 2
    Zb = blowup(Z, H)
    (rec,) = [r for r in Zb.records if r.vertex == 0]
    assert len(rec.fans) == 2 and not rec.kept_original
    assert chi_complex(Zb) == chi_complex(Z)
    assert Zb.components() == Z.components() == 1
    gamma = contract_2d(Zb)
    # the zero set also runs 1 -> crossing on 6-7 -> 5, closing one loop
    assert chi_complex(Z) == 0
    assert gamma.euler_characteristic() == 0
    assert gamma.degrees()[("center", 0)] == 2


def test_one_fan_with_free_segment():
    H = wheel6()
    # solid 0-1-2 plus a zero edge 0-4 that bounds no solid
    f = SignedVector.of([0, 0, 0, 1, 0, -1, 1, 1])
    Z = build_zero_complex(H, f)
    Zb = blowup(Z, H)
    (rec,) = [r for r in Zb.records if r.vertex == 0]
    assert len(rec.fans) == 1 and rec.kept_original
    assert chi_complex(Zb) == chi_complex(Z)
    assert Zb.components() == Z.components()
    assert contract_2d(Zb).euler_characteristic() >= chi_complex(Z)


def test_contract_requires_solid_disk(k7):
    f = SignedVector.of([1, -1, 1, -1, 1, -1, 0])
    Zb = blowup(build_zero_complex(k7, f), k7)
    with pytest.raises(ChainPreconditionError):
        contract_2d(Zb, [0])


def test_non_triangular_face_rejected(refined):
    H = refined("k7_torus", 4).H
    f = SignedVector.of([1] * (H.num_vertices - 1) + [-1])
    with pytest.raises(ValueError):
        build_zero_complex(H, f)


def random_instances(maps, count, seed):
    rng = random.Random(seed)
    for i in range(count):
        H = maps[i % len(maps)]
        if i % 2:
            f = multi_fan_vector(H, rng.randrange(H.num_vertices), rng)
        else:
            p0 = rng.choice([0.2, 0.4, 0.6])
            vals = [0 if rng.random() < p0 else rng.choice([-1, 1]) for _ in range(H.num_vertices)]
            if not any(vals):
                vals[0] = 1
            f = SignedVector.of(vals)
        yield H, f


def test_randomized_invariants(k7, k6, refined):
    maps = [k7, k6, refined("k7_torus", 3).H_prime, refined("k6_projective", 3).H_prime]
    multi = 0
    for H, f in random_instances(maps, 60, seed=11):
        Z = build_zero_complex(H, f)
        chi_P, chi_N, _, _ = chi_open_regions(H, f)
        assert H.euler_characteristic() == chi_complex(Z) + chi_P + chi_N
        Zb = blowup(Z, H)
        assert chi_complex(Zb) == chi_complex(Z)
        assert Zb.components() == Z.components()
        assert contract_2d(Zb).euler_characteristic() >= chi_complex(Z)
        multi += any(len(r.fans) >= 2 for r in Zb.records)
    assert multi >= 10
