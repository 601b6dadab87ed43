"""Two-sided bar realization of a covariant diagram against a presheaf.

A level-k simplex is a composable k-chain in the base category together with
a k-simplex of F at the chain's start and a k-simplex of G at its end.  Inner
faces compose adjacent chain morphisms; the outer faces drop an endpoint,
pushing the F part forward along the first morphism (d_0) or pulling the G
part back along the last (d_k); every face and degeneracy also acts on both
simplex parts.  This is the diagonal of the evident bisimplicial set, so the
simplicial identities hold whenever F and G are functorial; validate_sset
confirms it on any concrete instance.

Simplex identifiers are structured: (start object, morphism chain, F simplex,
G simplex).  Serialization exposes the same data as per-simplex annotations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from finsite.canon import csorted, cstr
from finsite.catsite import (
    FinCat,
    FiniteSpace,
    MappedCat,
    Morphism,
    Sieve,
    Site,
    all_sieves,
    maximal_sieve,
    nerve,
    open_id,
    poset_category,
    pullback_sieve,
    sieve_category,
    site_from_finite_space,
)
from finsite.homology import sset_homology
from finsite.presheaf import (
    Diagram,
    Presheaf,
    PresheafMap,
    SetPresheaf,
    matching_sections,
    restrict_diagram,
    restrict_presheaf,
    terminal_presheaf,
)
from finsite.reports import InputError, InternalCheckError, Report, ValidationError
from finsite.sset import (
    SimplicialMap,
    SimplicialSet,
    canonical_names,
    pi0,
    tabulate,
    to_json as sset_to_json,
    validate_sset,
)

ObjId = Any
MorId = Any


def _same_category(a: FinCat, b: FinCat) -> bool:
    return a is b or a == b


def realize(cat: FinCat, f: Diagram, g: Presheaf, dim_cap: int, validate: bool = False) -> SimplicialSet:
    """Bar realization of f against g, truncated at dim_cap.

    Levels above dim_cap are cut off, so homology is trusted only in degrees
    up to dim_cap - 1.  f and g must be based on cat with caps >= dim_cap.
    """
    if not _same_category(f.category, cat) or not _same_category(g.category, cat):
        raise InputError("diagram and presheaf must live on the given category")
    if f.dim_cap < dim_cap or g.dim_cap < dim_cap:
        raise InputError("value caps must be at least the realization cap")
    if dim_cap < 0:
        raise InputError("dim_cap must be nonnegative")
    outgoing: dict[ObjId, list[MorId]] = {x: [] for x in cat.objects}
    for m in cat.morphisms.values():
        outgoing[m.src].append(m.mid)
    # chains[k]: (start, morphism tuple, end); identities allowed as steps
    chains: list[list[tuple]] = [[(x, (), x) for x in cat.objects]]
    for k in range(1, dim_cap + 1):
        level = []
        for x0, ms, xk in chains[k - 1]:
            for m in outgoing[xk]:
                level.append((x0, ms + (m,), cat.tgt(m)))
        chains.append(level)
    levels = []
    for k in range(dim_cap + 1):
        level = []
        for x0, ms, xk in chains[k]:
            for fs in f.values[x0].simplices(k):
                for gs in g.values[xk].simplices(k):
                    level.append((x0, ms, fs, gs))
        levels.append(level)

    def chain_end(x0: ObjId, ms: tuple) -> ObjId:
        return cat.tgt(ms[-1]) if ms else x0

    def face(k: int, z: tuple, i: int) -> tuple:
        x0, ms, fs, gs = z
        xk = chain_end(x0, ms)
        if i == 0:
            x1 = cat.tgt(ms[0])
            fv = f.action[ms[0]].apply(k - 1, f.values[x0].face(k, fs, 0))
            return (x1, ms[1:], fv, g.values[xk].face(k, gs, 0))
        if i == k:
            fv = f.values[x0].face(k, fs, k)
            gv = g.action[ms[-1]].apply(k - 1, g.values[xk].face(k, gs, k))
            return (x0, ms[:-1], fv, gv)
        merged = ms[: i - 1] + (cat.compose(ms[i], ms[i - 1]),) + ms[i + 1 :]
        return (x0, merged, f.values[x0].face(k, fs, i), g.values[xk].face(k, gs, i))

    def deg(k: int, z: tuple, i: int) -> tuple:
        x0, ms, fs, gs = z
        xk = chain_end(x0, ms)
        at = x0 if i == 0 else cat.tgt(ms[i - 1])
        ext = ms[:i] + (cat.identity(at),) + ms[i:]
        fv = f.values[x0].degeneracy(k, fs, i)
        gv = g.values[xk].degeneracy(k, gs, i)
        return (x0, ext, fv, gv)

    out = tabulate(dim_cap, levels, face, deg)
    if validate:
        rep = validate_sset(out)
        if not rep.ok:
            raise InternalCheckError(f"realization is not simplicial: {rep.detail}")
    return out


def realization_to_json(s: SimplicialSet) -> dict:
    """Simplicial-set JSON plus per-simplex (object, chain, f, g) annotations."""
    names = canonical_names(s)
    data = sset_to_json(s, names)
    annotations = {}
    for k in range(s.dim_cap + 1):
        for z in s.simplices(k):
            x0, ms, fs, gs = z
            annotations[names[(k, z)]] = {
                "object": cstr(x0),
                "chain": [cstr(m) for m in ms],
                "f": cstr(fs),
                "g": cstr(gs),
            }
    data["annotations"] = annotations
    return data


# -- the order-complex functor of a finite space ---------------------------------


def order_complex_functor(
    space: FiniteSpace, dim_cap: int, site: Site | None = None
) -> Diagram:
    """Covariant diagram on the open-set site of the space.

    The value at an open U is the nerve of the specialization order on the
    points of U (p <= q iff p lies in every open containing q); inclusions of
    opens act as the induced nerve inclusions.
    """
    if site is None:
        site = site_from_finite_space(space)
    cat = site.category
    by_id = {open_id(o): o for o in space.opens}
    values = {}
    for uid in cat.objects:
        sub = poset_category(by_id[uid], space.specialization_leq)
        values[uid] = nerve(sub, dim_cap)
    action = {}
    for m in cat.morphisms.values():
        # chains of a subposet keep their identifiers in the bigger nerve
        action[m.mid] = SimplicialMap.from_function(
            values[m.src], values[m.tgt], lambda k, z: z
        )
    return Diagram(cat, dim_cap, values, action)


# -- covariant descent ------------------------------------------------------------


def _summands_json(summands: tuple[int, ...]) -> dict:
    return {
        "betti": sum(1 for v in summands if v == 0),
        "torsion": [v for v in summands if v],
    }


@dataclass(frozen=True)
class DescentReport:
    """Per-instance descent certificate: realization over a covering sieve
    against the plain value, compared on pi0 and homology up to max_deg."""

    ok: bool
    obj: ObjId
    sieve_key: tuple
    max_deg: int
    pi0_realization: int
    pi0_value: int
    degrees: tuple[tuple[int, tuple[int, ...], tuple[int, ...]], ...]

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "object": cstr(self.obj),
            "sieve": [cstr(m) for m in self.sieve_key],
            "max_deg": self.max_deg,
            "pi0": {
                "realization": self.pi0_realization,
                "value": self.pi0_value,
                "equal": self.pi0_realization == self.pi0_value,
            },
            "degrees": [
                {
                    "degree": k,
                    "realization": _summands_json(re_s),
                    "value": _summands_json(val_s),
                    "equal": re_s == val_s,
                }
                for k, re_s, val_s in self.degrees
            ],
        }


def covariant_descent_check(
    site: Site, f: Diagram, x: ObjId, s: Sieve, max_deg: int
) -> DescentReport:
    """Compares Re over the sieve category of (f restricted, terminal) with
    f(x) on pi0 and homology in degrees 0..max_deg.

    A passing report certifies this one instance only; it is not a proof
    about other sieves or degrees beyond max_deg.
    """
    cat = site.category
    if not _same_category(f.category, cat):
        raise InputError("diagram must live on the site's category")
    if s.base != x:
        raise InputError("sieve is not based at the named object")
    if not site.is_covering(s):
        raise InputError("descent check requires a covering sieve")
    if max_deg < 0:
        raise InputError("max_deg must be nonnegative")
    if max_deg + 1 > f.dim_cap:
        raise InputError("max_deg needs one more level than the diagram cap")
    mapped = sieve_category(cat, s)
    restricted = restrict_diagram(f, mapped)
    cap = max_deg + 1
    re = realize(mapped.category, restricted, terminal_presheaf(mapped.category, cap), cap)
    value = f.values[x]
    h_re = sset_homology(re, max_deg)
    h_val = sset_homology(value, max_deg)
    degrees = tuple(
        (k, h_re.group(k).summands, h_val.group(k).summands) for k in range(max_deg + 1)
    )
    n_re, n_val = len(pi0(re)), len(pi0(value))
    ok = n_re == n_val and all(a == b for _, a, b in degrees)
    return DescentReport(ok, x, s.key(), max_deg, n_re, n_val, degrees)


# -- maps induced on realizations ---------------------------------------------------


def induced_realization_map(f: Diagram, m: PresheafMap, dim_cap: int) -> SimplicialMap:
    """The map Re(f, m.source) -> Re(f, m.target) acting on the g part only."""
    cat = f.category
    if not _same_category(m.source.category, cat):
        raise InputError("presheaf map must live on the diagram's base")
    src = realize(cat, f, m.source, dim_cap)
    tgt = realize(cat, f, m.target, dim_cap)

    def push(k: int, z: tuple) -> tuple:
        x0, ms, fs, gs = z
        xk = cat.tgt(ms[-1]) if ms else x0
        return (x0, ms, fs, m.components[xk].apply(k, gs))

    return SimplicialMap.from_function(src, tgt, push)


# -- projector data and the two comparison maps --------------------------------------


@dataclass(frozen=True)
class ProjectorData:
    """An idempotent endofunctor P with a natural map psi: P -> identity
    restricting to the identity on P's image."""

    category: FinCat
    obj_map: dict[ObjId, ObjId]
    mor_map: dict[MorId, MorId]
    psi: dict[ObjId, MorId]


def validate_projector(d: ProjectorData) -> Report:
    cat = d.category
    for x in cat.objects:
        if x not in d.obj_map or d.obj_map[x] not in cat.objects:
            return Report.failure("projector-objects", "object image missing", (x,))
    for m in cat.morphisms.values():
        pm = d.mor_map.get(m.mid)
        if pm is None or pm not in cat.morphisms:
            return Report.failure("projector-morphisms", "morphism image missing", (m.mid,))
        if cat.src(pm) != d.obj_map[m.src] or cat.tgt(pm) != d.obj_map[m.tgt]:
            return Report.failure("projector-typing", "image endpoints wrong", (m.mid,))
    for x in cat.objects:
        if d.mor_map[cat.identity(x)] != cat.identity(d.obj_map[x]):
            return Report.failure("projector-identity", "identity not preserved", (x,))
    for (g, f), h in cat.composition.items():
        if d.mor_map[h] != cat.compose(d.mor_map[g], d.mor_map[f]):
            return Report.failure("projector-functorial", "composition not preserved", (g, f))
    for x in cat.objects:
        if d.obj_map[d.obj_map[x]] != d.obj_map[x]:
            return Report.failure("projector-idempotent", "P(P(x)) != P(x)", (x,))
    for m in cat.morphisms.values():
        if d.mor_map[d.mor_map[m.mid]] != d.mor_map[m.mid]:
            return Report.failure("projector-idempotent", "P(P(f)) != P(f)", (m.mid,))
    for x in cat.objects:
        px = d.psi.get(x)
        if px is None or px not in cat.morphisms:
            return Report.failure("psi-missing", "no component", (x,))
        if cat.src(px) != d.obj_map[x] or cat.tgt(px) != x:
            return Report.failure("psi-typing", "component endpoints wrong", (x,))
    for m in cat.morphisms.values():
        # naturality: f . psi_src == psi_tgt . P(f)
        lhs = cat.compose(m.mid, d.psi[m.src])
        rhs = cat.compose(d.psi[m.tgt], d.mor_map[m.mid])
        if lhs != rhs:
            return Report.failure("psi-naturality", "square does not commute", (m.mid,))
    for x in cat.objects:
        px = d.obj_map[x]
        if d.psi[px] != cat.identity(px):
            return Report.failure("psi-image", "psi is not the identity on the image", (x,))
    return Report.success()


def projector_image(d: ProjectorData) -> MappedCat:
    """Full subcategory on the image objects; identifiers are unchanged.

    Naturality of psi forces P to fix every morphism between image objects,
    so the full subcategory coincides with the image of P.
    """
    cat = d.category
    objs = csorted({d.obj_map[x] for x in cat.objects})
    keep = set(objs)
    mors = [m for m in cat.morphisms.values() if m.src in keep and m.tgt in keep]
    mids = {m.mid for m in mors}
    identities = {x: cat.identity(x) for x in objs}
    composition = {
        (g, f): h for (g, f), h in cat.composition.items() if g in mids and f in mids
    }
    sub = FinCat(objs, mors, identities, composition)
    return MappedCat(sub, {x: x for x in objs}, {m: m for m in mids})


def pullback_diagram(d: ProjectorData, f: Diagram) -> Diagram:
    """The diagram x -> f(P(x)) on the whole category, for f on the image."""
    cat = d.category
    values = {x: f.values[d.obj_map[x]] for x in cat.objects}
    action = {m: f.action[d.mor_map[m]] for m in cat.morphisms}
    return Diagram(cat, f.dim_cap, values, action)


def projector_maps(
    d: ProjectorData, f: Diagram, g: Presheaf, dim_cap: int
) -> tuple[SimplicialMap, SimplicialMap]:
    """The comparison maps a: Re_C(P*f, g) -> Re_D(f, g|_D) and its section b.

    a projects the chain through P and pulls the g part back along psi at the
    chain's end; b is induced by the inclusion of the image subcategory.
    a . b is the identity on the nose; b . a is expected to act as the
    identity on homology and pi0, which callers certify separately.
    """
    rep = validate_projector(d)
    if not rep.ok:
        raise ValidationError(f"invalid projector data: {rep.kind}: {rep.detail}")
    cat = d.category
    mapped = projector_image(d)
    sub = mapped.category
    if not _same_category(f.category, sub):
        raise InputError("diagram must live on the projector's image category")
    if not _same_category(g.category, cat):
        raise InputError("presheaf must live on the projector's category")
    pf = pullback_diagram(d, f)
    re_c = realize(cat, pf, g, dim_cap)
    re_d = realize(sub, f, restrict_presheaf(g, mapped), dim_cap)

    def a_rule(k: int, z: tuple) -> tuple:
        x0, ms, fs, gs = z
        xk = cat.tgt(ms[-1]) if ms else x0
        pms = tuple(d.mor_map[m] for m in ms)
        gv = g.action[d.psi[xk]].apply(k, gs)
        return (d.obj_map[x0], pms, fs, gv)

    a = SimplicialMap.from_function(re_c, re_d, a_rule)
    b = SimplicialMap.from_function(re_d, re_c, lambda k, z: z)
    return a, b


# -- the category of sieve triples ----------------------------------------------------


def triples_category(site: Site) -> ProjectorData:
    """Category of triples (object x, sieve B on x, member m: y -> x of B),
    with the projector sending a triple to (y, maximal sieve, identity).

    A morphism (x,B,m) -> (x',B',m') is a pair (phi: x -> x', rho: y -> y')
    with B contained in phi^* B' and m' . rho == phi . m.  Desk scale only:
    sieves are enumerated exhaustively per object.
    """
    cat = site.category
    triples: list[tuple] = []
    for x in cat.objects:
        for b in all_sieves(cat, x):
            if not b.members:
                continue
            for m in csorted(b.members):
                triples.append((("tri", x, b.key(), m), x, b, m))
    mors = []
    identities: dict[ObjId, MorId] = {}
    for tid, x, b, m in triples:
        y = cat.src(m)
        for tid2, x2, b2, m2 in triples:
            y2 = cat.src(m2)
            for phi in cat.hom(x, x2):
                if not b.members <= pullback_sieve(cat, phi, b2).members:
                    continue
                for rho in cat.hom(y, y2):
                    if cat.compose(m2, rho) != cat.compose(phi, m):
                        continue
                    mid = ("trim", phi, rho, tid, tid2)
                    mors.append(Morphism(mid, tid, tid2))
                    if tid == tid2 and cat.is_identity(phi) and cat.is_identity(rho):
                        identities[tid] = mid
    composition = {}
    for m1 in mors:
        for m2 in mors:
            if m2.src != m1.tgt:
                continue
            phi = cat.compose(m2.mid[1], m1.mid[1])
            rho = cat.compose(m2.mid[2], m1.mid[2])
            composition[(m2.mid, m1.mid)] = ("trim", phi, rho, m1.src, m2.tgt)
    tcat = FinCat([t[0] for t in triples], mors, identities, composition)
    obj_map = {}
    psi = {}
    for tid, x, b, m in triples:
        y = cat.src(m)
        ptid = ("tri", y, maximal_sieve(cat, y).key(), cat.identity(y))
        obj_map[tid] = ptid
        psi[tid] = ("trim", m, cat.identity(y), ptid, tid)
    mor_map = {}
    for mm in mors:
        _, phi, rho, t1, t2 = mm.mid
        mor_map[mm.mid] = ("trim", rho, rho, obj_map[t1], obj_map[t2])
    return ProjectorData(tcat, obj_map, mor_map, psi)


def sections_presheaf_on_triples(
    site: Site, g: SetPresheaf, d: ProjectorData
) -> SetPresheaf:
    """Set presheaf on the triples category: the value at (x, B, m) is the
    matching sections of g over B; (phi, rho) acts by precomposing with phi."""
    cat = site.category
    tcat = d.category
    if not _same_category(g.category, cat):
        raise InputError("presheaf must live on the site's category")
    values = {}
    for t in tcat.objects:
        _, x, bkey, m = t
        values[t] = matching_sections(site, g, Sieve(x, frozenset(bkey)))
    action = {}
    for mm in tcat.morphisms.values():
        _, phi, rho, t1, t2 = mm.mid
        b1key = t1[2]
        act = {}
        for sec in values[t2]:
            by_member = dict(sec)
            act[sec] = tuple((h, by_member[cat.compose(phi, h)]) for h in b1key)
        action[mm.mid] = act
    return SetPresheaf(tcat, values, action)
