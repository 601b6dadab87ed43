"""Realizations, covariant descent, the projector comparison maps."""

import random

import pytest

from finsite.catsite import (
    has_final_object,
    maximal_sieve,
    open_id,
    poset_category,
    site_from_finite_space,
)
from finsite.gallery import (
    bz2_category,
    circle_sset,
    collapse_set_presheaf,
    interval_cover_sieve,
    interval_cover_space,
    point_category,
    pseudo_circle_cover,
    pseudo_circle_space,
    sierpinski_space,
    two_open_cover,
)
from finsite.homology import induced_map, sset_homology
from finsite.presheaf import (
    Presheaf,
    SetPresheafMap,
    constant_set_presheaf,
    point_diagram,
    sheafify_set,
    terminal_presheaf,
    to_presheaf,
    to_presheaf_map,
    validate_presheaf,
)
from finsite.realization import (
    covariant_descent_check,
    induced_realization_map,
    order_complex_functor,
    projector_image,
    projector_maps,
    realization_to_json,
    realize,
    sections_presheaf_on_triples,
    triples_category,
    validate_projector,
)
from finsite.reports import InputError
from finsite.sset import SimplicialMap, pi0, validate_map, validate_sset

from randgen import random_nested_diagram, random_poset_with_max


def _pc_site():
    space = pseudo_circle_space()
    return space, site_from_finite_space(space)


def test_realize_point_category_recovers_g_value():
    cat = point_category()
    circle = circle_sset(3)
    g = Presheaf(cat, 3, {"*": circle}, {"id:*": SimplicialMap.identity(circle)})
    re = realize(cat, point_diagram(cat, 3), g, 3, validate=True)
    assert re.counts() == circle.counts()
    h = sset_homology(re, 2)
    assert [x.label() for x in h.groups] == ["Z", "Z", "0"]


def test_realize_nerve_of_group():
    cat = bz2_category()
    re = realize(cat, point_diagram(cat, 4), terminal_presheaf(cat, 4), 4)
    assert validate_sset(re).ok
    assert re.nondegenerate_counts() == (1, 1, 1, 1, 1)
    h = sset_homology(re, 3)
    assert [g.summands for g in h.groups] == [(0,), (2,), (), (2,)]


def test_realize_free_action_is_contractible():
    cat = bz2_category()
    from finsite.gallery import swap_set_presheaf

    g = to_presheaf(swap_set_presheaf(cat), 4)
    re = realize(cat, point_diagram(cat, 4), g, 4, validate=True)
    assert len(pi0(re)) == 1
    h = sset_homology(re, 3)
    assert [x.label() for x in h.groups] == ["Z", "0", "0", "0"]


def test_realize_order_complex_of_pseudo_circle():
    space, site = _pc_site()
    f = order_complex_functor(space, 4, site)
    re = realize(site.category, f, terminal_presheaf(site.category, 4), 4)
    assert validate_sset(re).ok
    assert re.counts() == (14, 46, 100, 180, 290)
    assert re.nondegenerate_counts() == (14, 32, 22, 4, 0)
    h = sset_homology(re, 3)
    assert [g.label() for g in h.groups] == ["Z", "Z", "0", "0"]
    assert len(pi0(re)) == 1


def test_realize_respects_final_object_on_random_posets():
    rng = random.Random(21)
    cap = 3
    for _ in range(5):
        cat, mx = random_poset_with_max(rng, rng.randint(3, 6))
        assert has_final_object(cat) == mx
        f = random_nested_diagram(rng, cat, cap)
        re = realize(cat, f, terminal_presheaf(cat, cap), cap)
        h_re = sset_homology(re, cap - 1)
        h_val = sset_homology(f.values[mx], cap - 1)
        assert len(pi0(re)) == len(pi0(f.values[mx]))
        for k in range(cap):
            assert h_re.group(k).summands == h_val.group(k).summands


def test_realize_validates_base_category_mismatch():
    space, site = _pc_site()
    f = order_complex_functor(space, 2, site)
    other = point_category()
    with pytest.raises(InputError):
        realize(other, f, terminal_presheaf(other, 2), 2)


def test_realization_json_carries_annotations():
    cat = point_category()
    re = realize(cat, point_diagram(cat, 2), terminal_presheaf(cat, 2), 2)
    data = realization_to_json(re)
    assert set(data["annotations"]) == {
        name for level in data["simplices"].values() for name in level
    }
    row = next(iter(data["annotations"].values()))
    assert set(row) == {"object", "chain", "f", "g"}


def test_order_complex_values_are_nerves_of_specialization():
    space = sierpinski_space()
    site = site_from_finite_space(space)
    f = order_complex_functor(space, 3, site)
    # the whole Sierpinski space is a 2-chain: its nerve is the 1-simplex
    top = open_id("oc")
    assert f.values[top].nondegenerate_counts() == (2, 1, 0, 0)
    assert f.values[open_id("o")].nondegenerate_counts() == (1, 0, 0, 0)


def test_descent_passes_on_all_pseudo_circle_covers():
    space, site = _pc_site()
    f = order_complex_functor(space, 3, site)
    for x in site.category.objects:
        for s in site.coverings[x]:
            rep = covariant_descent_check(site, f, x, s, 2)
            assert rep.ok, (x, sorted(s.members))


def test_descent_passes_on_interval_cover():
    space = interval_cover_space()
    site = site_from_finite_space(space)
    f = order_complex_functor(space, 2, site)
    s = interval_cover_sieve(site)
    rep = covariant_descent_check(site, f, s.base, s, 1)
    assert rep.ok
    assert rep.pi0_realization == rep.pi0_value == 1


def test_descent_constant_functor_passes_coned_cover():
    # the arc cover's sieve category has {a,b} below both arcs, so the nerve
    # is a cone and the constant functor still satisfies descent there
    space, site = _pc_site()
    f = point_diagram(site.category, 3)
    s = pseudo_circle_cover(site)
    rep = covariant_descent_check(site, f, s.base, s, 2)
    assert rep.ok
    assert all(a == b for _, a, b in rep.degrees)


def test_descent_constant_functor_fails_two_open_cover():
    # {a} and {b} are disjoint, so the sieve nerve has two components while
    # the value is a single point: the failure shows up in degree zero
    space, site = _pc_site()
    f = point_diagram(site.category, 3)
    s = two_open_cover(site)
    rep = covariant_descent_check(site, f, s.base, s, 2)
    assert not rep.ok
    assert rep.pi0_realization == 2 and rep.pi0_value == 1
    k, re_s, val_s = rep.degrees[0]
    assert k == 0 and re_s == (0, 0) and val_s == (0,)
    # every degree beyond zero agrees; in particular H1 carries no mismatch
    assert all(a == b for deg, a, b in rep.degrees if deg > 0)


def test_descent_rejects_non_covering_sieve():
    space, site = _pc_site()
    f = order_complex_functor(space, 2, site)
    x = open_id("abcd")
    from finsite.catsite import generate_sieve

    s = generate_sieve(site.category, x, [f"{open_id('abc')}<={x}"])
    with pytest.raises(InputError):
        covariant_descent_check(site, f, x, s, 1)


def test_induced_realization_map_is_simplicial():
    space, site = _pc_site()
    cat = site.category
    f = order_complex_functor(space, 3, site)
    sp = constant_set_presheaf(cat, ["0", "1"])
    sh = sheafify_set(site, sp)
    pm = to_presheaf_map(sh.unit, 3)
    m = induced_realization_map(f, pm, 3)
    assert validate_map(m).ok


def test_induced_realization_map_functorial_in_composition():
    space, site = _pc_site()
    cat = site.category
    f = order_complex_functor(space, 2, site)
    sp = constant_set_presheaf(cat, ["0", "1"])
    sh = sheafify_set(site, sp)
    third = SetPresheafMap(
        sh.sheaf,
        sh.sheaf,
        {x: {v: v for v in sh.sheaf.values[x]} for x in cat.objects},
    )
    pm1 = to_presheaf_map(sh.unit, 2)
    pm2 = to_presheaf_map(third, 2)
    m1 = induced_realization_map(f, pm1, 2)
    m2 = induced_realization_map(f, pm2, 2)
    m12 = induced_realization_map(f, pm1.then(pm2), 2)
    assert m2.compose(m1).mapping == m12.mapping


def test_projector_data_on_triples_validates():
    site = site_from_finite_space(sierpinski_space())
    d = triples_category(site)
    assert validate_projector(d).ok
    assert len(d.category.objects) == 4
    assert len(d.category.morphisms) == 10
    img = projector_image(d)
    assert len(img.category.objects) == 2


def test_projector_rejects_non_idempotent_data():
    site = site_from_finite_space(sierpinski_space())
    d = triples_category(site)
    broken_obj = dict(d.obj_map)
    keys = sorted(broken_obj, key=str)
    image_objs = sorted({str(v) for v in broken_obj.values()})
    # redirect one object image to a non-fixed point of the projector
    moving = next(k for k in keys if str(broken_obj[k]) != str(k))
    broken_obj[broken_obj[moving]] = moving
    from finsite.realization import ProjectorData

    bad = ProjectorData(d.category, broken_obj, d.mor_map, d.psi)
    assert not validate_projector(bad).ok


def test_projector_maps_section_and_homology():
    site = site_from_finite_space(sierpinski_space())
    d = triples_category(site)
    img = projector_image(d)
    cap = 3
    g0 = constant_set_presheaf(site.category, ["0", "1"])
    gp = to_presheaf(sections_presheaf_on_triples(site, g0, d), cap)
    assert validate_presheaf(gp).ok
    f = point_diagram(img.category, cap)
    a, b = projector_maps(d, f, gp, cap)
    assert validate_map(a).ok and validate_map(b).ok
    ab = a.compose(b)
    assert ab.mapping == SimplicialMap.identity(b.source).mapping
    ba = b.compose(a)
    h = sset_homology(a.source, cap - 1)
    for k in range(cap):
        im = induced_map(ba, h, h, k)
        assert im.is_identity()
    cm = pi0(a.source)
    assert all(
        cm.of_vertex[ba.apply(0, v)] == cm.of_vertex[v] for v in a.source.simplices(0)
    )


def test_triples_sections_presheaf_sizes():
    site = site_from_finite_space(sierpinski_space())
    d = triples_category(site)
    g0 = constant_set_presheaf(site.category, ["0", "1"])
    sp = sections_presheaf_on_triples(site, g0, d)
    # each triple's sieve is nonempty over a connected poset: two sections
    assert all(len(v) == 2 for v in sp.values.values())


def test_realize_disjoint_union_presheaf_splits():
    rng = random.Random(31)
    cat, mx = random_poset_with_max(rng, 4)
    cap = 2
    f = random_nested_diagram(rng, cat, cap)
    from finsite.presheaf import representable_set_presheaf

    from randgen import disjoint_union_sp

    z = sorted(cat.objects)[0]
    y = representable_set_presheaf(cat, z)
    yy = disjoint_union_sp(y, y)
    re1 = realize(cat, f, to_presheaf(y, cap), cap)
    re2 = realize(cat, f, to_presheaf(yy, cap), cap)
    assert len(pi0(re2)) == 2 * len(pi0(re1))
    h1 = sset_homology(re1, cap - 1)
    h2 = sset_homology(re2, cap - 1)
    for k in range(cap):
        assert h2.group(k).betti == 2 * h1.group(k).betti
