"""Simplicial set layer: identities, constructors, serialization."""

import random

from finsite.reports import InputError
from finsite.sset import (
    SimplicialMap,
    canonical_names,
    discrete_sset,
    disjoint_union,
    empty_sset,
    from_json,
    pi0,
    point_sset,
    product,
    standard_simplex,
    tabulate,
    to_json,
    validate_map,
    validate_sset,
)

import pytest


def test_standard_simplex_counts():
    # level k of the n-simplex has C(n+k+1, k+1) simplices
    from math import comb

    for n in range(4):
        s = standard_simplex(n, 4)
        assert s.counts() == tuple(comb(n + k + 1, k + 1) for k in range(5))
        assert validate_sset(s).ok


def test_standard_simplex_nondegenerate():
    s = standard_simplex(2, 4)
    assert s.nondegenerate_counts() == (3, 3, 1, 0, 0)


def test_simplicial_identities_random_spotcheck():
    rng = random.Random(2)
    s = product(standard_simplex(2, 3), standard_simplex(1, 3))
    for _ in range(200):
        k = rng.randint(2, 3)
        z = rng.choice(s.simplices(k))
        i = rng.randint(0, k)
        j = rng.randint(0, k)
        if i < j:
            # d_i d_j == d_{j-1} d_i
            assert s.face(k - 1, s.face(k, z, j), i) == s.face(
                k - 1, s.face(k, z, i), j - 1
            )
        if k < 3:
            assert s.face(k + 1, s.degeneracy(k, z, i), i) == z
            assert s.face(k + 1, s.degeneracy(k, z, i), i + 1) == z


def test_validate_sset_catches_broken_face():
    s = standard_simplex(2, 2)
    top = s.nondegenerate(2)[0]
    wrong = s.face(2, top, 2)

    def face(k, z, i):
        if (k, z, i) == (2, top, 0):
            return wrong
        return s.face(k, z, i)

    broken = tabulate(
        2, [s.simplices(k) for k in range(3)], face, lambda k, z, i: s.degeneracy(k, z, i)
    )
    assert not validate_sset(broken).ok


def test_product_point_is_identity_shape():
    s = standard_simplex(2, 3)
    p = product(s, point_sset(3))
    assert p.counts() == s.counts()
    assert validate_sset(p).ok


def test_product_of_intervals():
    p = product(standard_simplex(1, 2), standard_simplex(1, 2))
    assert validate_sset(p).ok
    # the square: 4 vertices, 5 edges, 2 triangles
    assert p.nondegenerate_counts() == (4, 5, 2)


def test_disjoint_union_counts_and_pi0():
    a = standard_simplex(2, 2)
    b = standard_simplex(0, 2)
    u = disjoint_union([a, b])
    assert validate_sset(u).ok
    assert u.counts() == tuple(x + y for x, y in zip(a.counts(), b.counts()))
    assert len(pi0(u)) == 2
    assert len(pi0(a)) == 1


def test_empty_and_discrete():
    e = empty_sset(2)
    assert e.counts() == (0, 0, 0)
    d = discrete_sset(["x", "y", "z"], 2)
    assert d.counts() == (3, 3, 3)
    assert d.nondegenerate_counts() == (3, 0, 0)
    assert len(pi0(d)) == 3


def test_pi0_classes_have_vertices():
    d = disjoint_union([standard_simplex(1, 2), standard_simplex(0, 2)])
    cm = pi0(d)
    for cid in cm.ids:
        v = cm.a_vertex(cid)
        assert cm.of_vertex[v] == cid


def test_map_identity_and_compose():
    s = standard_simplex(2, 3)
    ident = SimplicialMap.identity(s)
    assert validate_map(ident).ok
    assert ident.compose(ident).mapping == ident.mapping


def test_map_validation_rejects_nonsimplicial():
    a = standard_simplex(1, 1)
    verts = a.simplices(0)
    # send both endpoints of the edge to one vertex but keep the edge fixed
    def rule(k, z):
        if k == 0:
            return verts[0]
        return z

    m = SimplicialMap.from_function(a, a, rule)
    assert not validate_map(m).ok


def test_json_roundtrip_full():
    s = product(standard_simplex(1, 3), standard_simplex(1, 3))
    data = to_json(s, canonical_names(s))
    back = from_json(data)
    assert back.counts() == s.counts()
    assert back.nondegenerate_counts() == s.nondegenerate_counts()
    assert validate_sset(back).ok


def test_json_compact_circle():
    data = {
        "dim_cap": 3,
        "nondegenerate": {"0": ["v"], "1": ["e"]},
        "faces": {"1": {"e": ["v", "v"]}},
    }
    s = from_json(data)
    assert validate_sset(s).ok
    assert s.nondegenerate_counts() == (1, 1, 0, 0)
    assert len(pi0(s)) == 1


def test_json_compact_sphere_via_degenerate_faces():
    # two 2-cells glued along a degenerate boundary: the 2-sphere
    data = {
        "dim_cap": 3,
        "nondegenerate": {"0": ["v"], "2": ["n", "s"]},
        "faces": {
            "2": {
                "n": [{"degeneracy": [0], "of": "v"}] * 3,
                "s": [{"degeneracy": [0], "of": "v"}] * 3,
            }
        },
    }
    s = from_json(data)
    assert validate_sset(s).ok
    assert s.nondegenerate_counts() == (1, 0, 2, 0)


def test_from_json_rejects_garbage():
    with pytest.raises(InputError):
        from_json({"nondegenerate": {}})
    with pytest.raises(InputError):
        from_json({"dim_cap": 1, "levels": "nope"})
