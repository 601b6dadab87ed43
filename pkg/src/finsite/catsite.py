"""Finite categories, sieves, Grothendieck topologies, and finite spaces.

A FinCat stores objects, morphisms, identities, and a total composition table
on composable pairs.  Sites pair a category with a saturated covering store:
for every object, every covering sieve is listed.  Everything is small enough
to enumerate, and every collection is kept canonically sorted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Iterable

from finsite.canon import ckey, csorted, cstr
from finsite.reports import InputError, Report, ValidationError
from finsite.sset import SimplicialSet, tabulate

ObjId = Any
MorId = Any


@dataclass(frozen=True)
class Morphism:
    mid: MorId
    src: ObjId
    tgt: ObjId


class FinCat:
    def __init__(
        self,
        objects: Iterable[ObjId],
        morphisms: Iterable[Morphism],
        identities: dict[ObjId, MorId],
        composition: dict[tuple[MorId, MorId], MorId],
    ):
        self.objects: tuple[ObjId, ...] = tuple(csorted(objects))
        self.morphisms: dict[MorId, Morphism] = {
            m.mid: m for m in sorted(morphisms, key=lambda m: ckey(m.mid))
        }
        self.identities = dict(identities)
        self.composition = dict(composition)
        self._into: dict[ObjId, tuple[MorId, ...]] = {}
        for x in self.objects:
            self._into[x] = tuple(
                m.mid for m in self.morphisms.values() if m.tgt == x
            )

    def src(self, mid: MorId) -> ObjId:
        return self.morphisms[mid].src

    def tgt(self, mid: MorId) -> ObjId:
        return self.morphisms[mid].tgt

    def identity(self, x: ObjId) -> MorId:
        try:
            return self.identities[x]
        except KeyError:
            raise InputError(f"no identity for object {cstr(x)}") from None

    def is_identity(self, mid: MorId) -> bool:
        return self.identities.get(self.morphisms[mid].src) == mid

    def compose(self, g: MorId, f: MorId) -> MorId:
        """g after f; defined when tgt(f) == src(g)."""
        try:
            return self.composition[(g, f)]
        except KeyError:
            raise InputError(
                f"composition undefined for ({cstr(g)}, {cstr(f)})"
            ) from None

    def hom_into(self, x: ObjId) -> tuple[MorId, ...]:
        return self._into.get(x, ())

    def hom(self, a: ObjId, b: ObjId) -> tuple[MorId, ...]:
        return tuple(m for m in self.hom_into(b) if self.src(m) == a)

    def __repr__(self) -> str:
        return f"FinCat({len(self.objects)} objects, {len(self.morphisms)} morphisms)"

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, FinCat)
            and self.objects == other.objects
            and self.morphisms == other.morphisms
            and self.identities == other.identities
            and self.composition == other.composition
        )


def validate_category(cat: FinCat) -> Report:
    """Identity, associativity, and typing of the composition table."""
    for m in cat.morphisms.values():
        if m.src not in cat._into or m.tgt not in cat._into:
            if m.src not in cat.objects or m.tgt not in cat.objects:
                return Report.failure("morphism-endpoints", "endpoint not an object", (m.mid,))
    for x in cat.objects:
        if x not in cat.identities:
            return Report.failure("identity-missing", "object lacks identity", (x,))
        i = cat.identities[x]
        if i not in cat.morphisms:
            return Report.failure("identity-missing", "identity not a morphism", (x,))
        if cat.src(i) != x or cat.tgt(i) != x:
            return Report.failure("identity-typing", "identity has wrong endpoints", (x,))
    composable = {
        (g.mid, f.mid)
        for f in cat.morphisms.values()
        for g in cat.morphisms.values()
        if f.tgt == g.src
    }
    table = set(cat.composition)
    if table != composable:
        missing = composable - table
        extra = table - composable
        witness = min(missing or extra, key=ckey)
        kind = "composition-missing" if missing else "composition-extra"
        return Report.failure(kind, "composition table domain mismatch", (witness,))
    for (g, f), h in cat.composition.items():
        if h not in cat.morphisms:
            return Report.failure("composition-codomain", "composite not a morphism", (g, f))
        if cat.src(h) != cat.src(f) or cat.tgt(h) != cat.tgt(g):
            return Report.failure("composition-typing", "composite has wrong endpoints", (g, f))
    for m in cat.morphisms.values():
        if cat.compose(cat.identity(m.tgt), m.mid) != m.mid:
            return Report.failure("identity-law", "id . f != f", (m.mid,))
        if cat.compose(m.mid, cat.identity(m.src)) != m.mid:
            return Report.failure("identity-law", "f . id != f", (m.mid,))
    mors = list(cat.morphisms.values())
    for f in mors:
        for g in mors:
            if g.src != f.tgt:
                continue
            gf = cat.compose(g.mid, f.mid)
            for h in mors:
                if h.src != g.tgt:
                    continue
                if cat.compose(h.mid, gf) != cat.compose(
                    cat.compose(h.mid, g.mid), f.mid
                ):
                    return Report.failure(
                        "associativity", "h.(g.f) != (h.g).f", (h.mid, g.mid, f.mid)
                    )
    return Report.success()


def poset_category(
    elements: Iterable[ObjId], leq: Callable[[ObjId, ObjId], bool]
) -> FinCat:
    """Thin category of a finite poset; morphism ids are 'src<=tgt' strings."""
    elements = list(csorted(elements))

    def mid(a, b) -> str:
        return f"{cstr(a)}<={cstr(b)}"

    mors = []
    for a in elements:
        for b in elements:
            if leq(a, b):
                mors.append(Morphism(mid(a, b), a, b))
    identities = {a: mid(a, a) for a in elements}
    composition = {}
    for f in mors:
        for g in mors:
            if f.tgt == g.src:
                composition[(g.mid, f.mid)] = mid(f.src, g.tgt)
    return FinCat(elements, mors, identities, composition)


def nerve(cat: FinCat, dim_cap: int) -> SimplicialSet:
    """Nerve truncated at dim_cap: k-simplices are composable k-chains.

    Chains include identities; inner faces compose adjacent morphisms, the
    outer faces drop the first or last object.
    """
    levels: list[list] = [[("o", x) for x in cat.objects]]
    for k in range(1, dim_cap + 1):
        level = []
        if k == 1:
            level = [("m", m) for m in cat.morphisms]
        else:
            for chain in levels[k - 1]:
                last = cat.tgt(chain[-1])
                for m in cat.morphisms:
                    if cat.src(m) == last:
                        level.append(chain + (m,))
        levels.append(level)

    def start(chain) -> ObjId:
        return chain[1] if chain[0] == "o" else cat.src(chain[1])

    def face(k: int, chain, i: int):
        mors = chain[1:]
        if k == 1:
            return ("o", cat.tgt(mors[0])) if i == 0 else ("o", cat.src(mors[0]))
        if i == 0:
            return ("m",) + mors[1:]
        if i == k:
            return ("m",) + mors[:-1]
        return ("m",) + mors[: i - 1] + (cat.compose(mors[i], mors[i - 1]),) + mors[i + 1 :]

    def deg(k: int, chain, i: int):
        if k == 0:
            return ("m", cat.identity(chain[1]))
        mors = chain[1:]
        at = cat.src(mors[i]) if i < k else cat.tgt(mors[-1])
        return ("m",) + mors[:i] + (cat.identity(at),) + mors[i:]

    return tabulate(dim_cap, levels, face, deg)


def has_final_object(cat: FinCat) -> ObjId | None:
    """First object (canonical order) receiving exactly one morphism from each."""
    for u in cat.objects:
        if all(len(cat.hom(a, u)) == 1 for a in cat.objects):
            return u
    return None


# -- slices and sieves ---------------------------------------------------------


@dataclass(frozen=True)
class MappedCat:
    """A category built over another, with the projection to the base.

    Objects project to base objects, morphisms to base morphisms.
    """

    category: FinCat
    obj_to_base: dict[ObjId, ObjId]
    mor_to_base: dict[MorId, MorId]


def slice_category(cat: FinCat, x: ObjId) -> MappedCat:
    """Slice cat/x: objects are morphisms into x, morphisms are triangles."""
    if x not in cat.objects:
        raise InputError(f"no object {cstr(x)}")
    return _category_on_members(cat, x, cat.hom_into(x))


def _category_on_members(cat: FinCat, x: ObjId, members: Iterable[MorId]) -> MappedCat:
    members = list(csorted(members))
    member_set = set(members)
    objects = members
    mors = []
    obj_to_base = {f: cat.src(f) for f in members}
    mor_to_base = {}
    for f in members:
        for g in members:
            for h in cat.hom(cat.src(f), cat.src(g)):
                if cat.compose(g, h) == f:
                    mid = ("t", h, f, g)
                    mors.append(Morphism(mid, f, g))
                    mor_to_base[mid] = h
    identities = {f: ("t", cat.identity(cat.src(f)), f, f) for f in members}
    composition = {}
    for m1 in mors:
        for m2 in mors:
            if m1.tgt == m2.src:
                h = cat.compose(mor_to_base[m2.mid], mor_to_base[m1.mid])
                composition[(m2.mid, m1.mid)] = ("t", h, m1.src, m2.tgt)
    return MappedCat(FinCat(objects, mors, identities, composition), obj_to_base, mor_to_base)


@dataclass(frozen=True)
class Sieve:
    """A precomposition-closed set of morphisms into base."""

    base: ObjId
    members: frozenset[MorId]

    def key(self) -> tuple:
        return tuple(csorted(self.members))

    def __le__(self, other: "Sieve") -> bool:
        return self.base == other.base and self.members <= other.members


def generate_sieve(cat: FinCat, x: ObjId, generators: Iterable[MorId]) -> Sieve:
    """Smallest sieve on x containing the generators (precomposition closure)."""
    members: set[MorId] = set()
    frontier = list(generators)
    for f in frontier:
        if cat.tgt(f) != x:
            raise InputError(f"generator {cstr(f)} does not land in {cstr(x)}")
    while frontier:
        f = frontier.pop()
        if f in members:
            continue
        members.add(f)
        for g in cat.morphisms.values():
            if g.tgt == cat.src(f):
                fg = cat.compose(f, g.mid)
                if fg not in members:
                    frontier.append(fg)
    return Sieve(x, frozenset(members))


def maximal_sieve(cat: FinCat, x: ObjId) -> Sieve:
    return Sieve(x, frozenset(cat.hom_into(x)))


def is_sieve(cat: FinCat, s: Sieve) -> bool:
    for f in s.members:
        if cat.tgt(f) != s.base:
            return False
        for g in cat.morphisms.values():
            if g.tgt == cat.src(f) and cat.compose(f, g.mid) not in s.members:
                return False
    return True


def pullback_sieve(cat: FinCat, f: MorId, s: Sieve) -> Sieve:
    """f^* s = {g into src(f) : f . g in s}; always a sieve."""
    if cat.tgt(f) != s.base:
        raise InputError("pullback morphism must land in the sieve base")
    y = cat.src(f)
    return Sieve(y, frozenset(g for g in cat.hom_into(y) if cat.compose(f, g) in s.members))


def sieve_category(cat: FinCat, s: Sieve) -> MappedCat:
    """Full subcategory of the slice on the sieve's members."""
    return _category_on_members(cat, s.base, s.members)


_SIEVE_ENUM_LIMIT = 18


def all_sieves(cat: FinCat, x: ObjId) -> tuple[Sieve, ...]:
    """Every sieve on x, by brute force over subsets of hom(-, x).

    Desk scale only; refuses when the fan-in is too large to enumerate.
    """
    into = cat.hom_into(x)
    if len(into) > _SIEVE_ENUM_LIMIT:
        raise InputError(
            f"cannot enumerate sieves: {len(into)} morphisms into {cstr(x)}"
        )
    # closure demand as a bitmask: choosing f forces every f.g
    n = len(into)
    index = {f: i for i, f in enumerate(into)}
    need = [0] * n
    for f in into:
        bits = 1 << index[f]
        for g in cat.morphisms.values():
            if g.tgt == cat.src(f):
                bits |= 1 << index[cat.compose(f, g.mid)]
        need[index[f]] = bits
    sieves = []
    for mask in range(1 << n):
        closure = 0
        m = mask
        while m:
            low = m & -m
            closure |= need[low.bit_length() - 1]
            m ^= low
        if closure == mask:
            sieves.append(Sieve(x, frozenset(into[i] for i in range(n) if mask >> i & 1)))
    return tuple(sorted(sieves, key=lambda s: ckey(s.key())))


# -- sites -----------------------------------------------------------------------


class Site:
    """Category plus saturated covering store: every covering sieve listed."""

    def __init__(self, category: FinCat, coverings: dict[ObjId, Iterable[Sieve]]):
        self.category = category
        self.coverings: dict[ObjId, tuple[Sieve, ...]] = {
            x: tuple(sorted(coverings.get(x, ()), key=lambda s: ckey(s.key())))
            for x in category.objects
        }

    def is_covering(self, s: Sieve) -> bool:
        return s in self.coverings.get(s.base, ())

    def minimal_covering_sieve(self, x: ObjId) -> Sieve:
        """Intersection of all covering sieves; covering again on a valid site."""
        sieves = self.coverings[x]
        if not sieves:
            raise ValidationError(f"object {cstr(x)} has no covering sieves")
        members = frozenset.intersection(*(s.members for s in sieves))
        return Sieve(x, members)


def validate_site(site: Site) -> Report:
    cat = site.category
    rep = validate_category(cat)
    if not rep.ok:
        return rep
    for x in cat.objects:
        for s in site.coverings[x]:
            if s.base != x:
                return Report.failure("covering-base", "sieve stored under wrong object", (x,))
            if not is_sieve(cat, s):
                return Report.failure("covering-not-sieve", "stored covering is not a sieve", (x, s.key()))
        if maximal_sieve(cat, x) not in site.coverings[x]:
            return Report.failure("maximal-missing", "maximal sieve not covering", (x,))
    # stability under pullback
    for x in cat.objects:
        for s in site.coverings[x]:
            for f in cat.hom_into(x):
                if not site.is_covering(pullback_sieve(cat, f, s)):
                    return Report.failure(
                        "stability", "pullback of covering sieve not covering", (x, f)
                    )
    # transitivity (local character), exhaustively over all sieves
    for x in cat.objects:
        covering = set(site.coverings[x])
        for t in all_sieves(cat, x):
            if t in covering:
                continue
            for s in site.coverings[x]:
                if all(
                    site.is_covering(pullback_sieve(cat, f, t)) for f in s.members
                ):
                    return Report.failure(
                        "transitivity",
                        "locally covering sieve is not covering",
                        (x, t.key()),
                    )
    return Report.success()


# -- finite topological spaces -----------------------------------------------------


def _open_id(points: frozenset) -> str:
    return "{" + ",".join(sorted(points)) + "}"


@dataclass(frozen=True)
class FiniteSpace:
    """Finite topological space: points plus its nonempty open sets.

    The empty set is implicit; the whole point set must be open.
    """

    points: tuple[str, ...]
    opens: tuple[frozenset, ...]

    @staticmethod
    def build(points: Iterable[str], opens: Iterable[Iterable[str]]) -> "FiniteSpace":
        pts = tuple(sorted(set(points)))
        sets = {frozenset(o) for o in opens}
        sets.discard(frozenset())
        return FiniteSpace(pts, tuple(sorted(sets, key=lambda o: (len(o), _open_id(o)))))

    def minimal_open(self, p: str) -> frozenset:
        """Intersection of all opens containing p; open in a finite space."""
        around = [o for o in self.opens if p in o]
        if not around:
            raise ValidationError(f"point {p} lies in no open set")
        return frozenset.intersection(*around)

    def specialization_leq(self, p: str, q: str) -> bool:
        """p <= q iff p lies in every open containing q."""
        return p in self.minimal_open(q)


def validate_space(space: FiniteSpace) -> Report:
    pts = frozenset(space.points)
    for o in space.opens:
        if not o <= pts:
            return Report.failure("open-points", "open set uses unknown points", (_open_id(o),))
        if not o:
            return Report.failure("open-empty", "empty set must stay implicit", ())
    if pts not in space.opens:
        return Report.failure("whole-missing", "whole point set is not open", ())
    open_set = set(space.opens)
    for a in space.opens:
        for b in space.opens:
            if a | b not in open_set:
                return Report.failure("union", "opens not closed under union", (_open_id(a), _open_id(b)))
            meet = a & b
            if meet and meet not in open_set:
                return Report.failure(
                    "intersection", "opens not closed under intersection", (_open_id(a), _open_id(b))
                )
    return Report.success()


def site_from_finite_space(space: FiniteSpace) -> Site:
    """Poset of nonempty opens; a sieve covers U iff its members union to U."""
    rep = validate_space(space)
    rep.raise_if_failed()
    by_id = {_open_id(o): o for o in space.opens}
    cat = poset_category(by_id.keys(), lambda a, b: by_id[a] <= by_id[b])
    coverings: dict[str, list[Sieve]] = {}
    point_index = {p: i for i, p in enumerate(space.points)}
    for uid in by_id:
        u = by_id[uid]
        inside = [vid for vid in by_id if by_id[vid] <= u]
        if len(inside) > _SIEVE_ENUM_LIMIT:
            raise InputError(
                f"open {uid} has {len(inside)} opens below; too large to saturate"
            )
        n = len(inside)
        # per open: its down-set among inside, and its points, as bitmasks
        down = [0] * n
        pts = [0] * n
        for i, vid in enumerate(inside):
            v = by_id[vid]
            down[i] = sum(1 << j for j, wid in enumerate(inside) if by_id[wid] <= v)
            pts[i] = sum(1 << point_index[p] for p in v)
        target = sum(1 << point_index[p] for p in u)
        sieves = []
        for mask in range(1 << n):
            closure = 0
            union = 0
            m = mask
            while m:
                low = m & -m
                i = low.bit_length() - 1
                closure |= down[i]
                union |= pts[i]
                m ^= low
            if closure == mask and union == target:
                sieves.append(
                    Sieve(
                        uid,
                        frozenset(
                            f"{inside[i]}<={uid}" for i in range(n) if mask >> i & 1
                        ),
                    )
                )
        coverings[uid] = sieves
    return Site(cat, coverings)


def open_id(points: Iterable[str]) -> str:
    return _open_id(frozenset(points))


# -- JSON ------------------------------------------------------------------------


def category_to_json(cat: FinCat) -> dict:
    return {
        "objects": [cstr(x) for x in cat.objects],
        "morphisms": [
            {"id": cstr(m.mid), "src": cstr(m.src), "tgt": cstr(m.tgt)}
            for m in cat.morphisms.values()
        ],
        "identities": {cstr(x): cstr(i) for x, i in sorted(cat.identities.items())},
        "composition": sorted(
            [[cstr(g), cstr(f), cstr(h)] for (g, f), h in cat.composition.items()]
        ),
    }


def category_from_json(data: dict) -> FinCat:
    """Load a category; identity morphisms may be omitted and are synthesized."""
    try:
        objects = list(data["objects"])
        morphisms = [
            Morphism(m["id"], m["src"], m["tgt"]) for m in data["morphisms"]
        ]
        comp_rows = [tuple(row) for row in data.get("composition", [])]
    except (KeyError, TypeError) as exc:
        raise InputError(f"bad category JSON: {exc}") from exc
    mids = {m.mid for m in morphisms}
    if len(mids) != len(morphisms):
        raise InputError("duplicate morphism ids")
    identities: dict[Any, Any] = dict(data.get("identities", {}))
    for x in objects:
        if x not in identities:
            iid = f"id:{x}"
            if iid in mids:
                raise InputError(f"cannot synthesize identity {iid}: id taken")
            identities[x] = iid
            morphisms.append(Morphism(iid, x, x))
            mids.add(iid)
    composition = {}
    for row in comp_rows:
        if len(row) != 3:
            raise InputError(f"bad composition row {row!r}")
        g, f, h = row
        composition[(g, f)] = h
    by_id = {m.mid: m for m in morphisms}
    for m in morphisms:
        ix = identities[m.tgt]
        composition.setdefault((ix, m.mid), m.mid)
        iy = identities[m.src]
        composition.setdefault((m.mid, iy), m.mid)
    # missing non-identity compositions stay missing: validation will flag them
    for x in objects:
        composition.setdefault((identities[x], identities[x]), identities[x])
    cat = FinCat(objects, morphisms, identities, composition)
    return cat


def space_to_json(space: FiniteSpace) -> dict:
    return {
        "points": list(space.points),
        "opens": [sorted(o) for o in space.opens],
    }


def space_from_json(data: dict) -> FiniteSpace:
    try:
        return FiniteSpace.build(data["points"], data["opens"])
    except (KeyError, TypeError) as exc:
        raise InputError(f"bad finite space JSON: {exc}") from exc
