"""Dimension-capped simplicial sets with explicit face/degeneracy tables.

A simplicial set here is a finite family of simplex identifiers per dimension
0..dim_cap together with total face tables d_i (dimensions 1..dim_cap) and
degeneracy tables s_i (dimensions 0..dim_cap-1).  All simplices are
materialized, degenerate ones included; a simplex z of dimension k >= 1 is
degenerate exactly when s_i(d_i z) == z for some i, and that criterion is the
single source of truth for degeneracy.

Identifiers are opaque: strings for user data, nested tuples for constructed
simplices (products, disjoint unions, bar simplices).  Serialization renames
everything canonically, so internal tuple ids never leak into output.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Iterable

from finsite.canon import ckey, csorted, cstr
from finsite.reports import InputError, Report, ValidationError

SimplexId = Any  # str | nested tuple of str/int


class SimplicialSet:
    """Immutable-by-convention simplicial set truncated at dim_cap."""

    def __init__(
        self,
        dim_cap: int,
        levels: Iterable[Iterable[SimplexId]],
        faces: dict[tuple[int, SimplexId, int], SimplexId],
        degeneracies: dict[tuple[int, SimplexId, int], SimplexId],
    ):
        if dim_cap < 0:
            raise InputError("dim_cap must be nonnegative")
        self.dim_cap = dim_cap
        self.levels: tuple[tuple[SimplexId, ...], ...] = tuple(
            tuple(csorted(level)) for level in levels
        )
        if len(self.levels) != dim_cap + 1:
            raise InputError(
                f"expected {dim_cap + 1} levels, got {len(self.levels)}"
            )
        self._faces = dict(faces)
        self._degeneracies = dict(degeneracies)
        self._level_sets = tuple(frozenset(level) for level in self.levels)
        self._nondeg_cache: dict[int, tuple[SimplexId, ...]] = {}

    # -- basic access ------------------------------------------------------

    def simplices(self, k: int) -> tuple[SimplexId, ...]:
        if not 0 <= k <= self.dim_cap:
            raise InputError(f"dimension {k} outside 0..{self.dim_cap}")
        return self.levels[k]

    def has(self, k: int, z: SimplexId) -> bool:
        return 0 <= k <= self.dim_cap and z in self._level_sets[k]

    def face(self, k: int, z: SimplexId, i: int) -> SimplexId:
        """d_i on a k-simplex, 0 <= i <= k, k >= 1."""
        try:
            return self._faces[(k, z, i)]
        except KeyError:
            raise InputError(f"no face d_{i} for {cstr(z)} in dimension {k}") from None

    def degeneracy(self, k: int, z: SimplexId, i: int) -> SimplexId:
        """s_i on a k-simplex, 0 <= i <= k, k < dim_cap."""
        try:
            return self._degeneracies[(k, z, i)]
        except KeyError:
            raise InputError(
                f"no degeneracy s_{i} for {cstr(z)} in dimension {k}"
            ) from None

    def is_degenerate(self, k: int, z: SimplexId) -> bool:
        if k == 0:
            return False
        return any(
            self.degeneracy(k - 1, self.face(k, z, i), i) == z for i in range(k)
        )

    def nondegenerate(self, k: int) -> tuple[SimplexId, ...]:
        if k not in self._nondeg_cache:
            self._nondeg_cache[k] = tuple(
                z for z in self.simplices(k) if not self.is_degenerate(k, z)
            )
        return self._nondeg_cache[k]

    def counts(self) -> tuple[int, ...]:
        return tuple(len(level) for level in self.levels)

    def nondegenerate_counts(self) -> tuple[int, ...]:
        return tuple(len(self.nondegenerate(k)) for k in range(self.dim_cap + 1))

    def __repr__(self) -> str:
        return f"SimplicialSet(dim_cap={self.dim_cap}, counts={self.counts()})"

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, SimplicialSet)
            and self.dim_cap == other.dim_cap
            and self.levels == other.levels
            and self._faces == other._faces
            and self._degeneracies == other._degeneracies
        )


def tabulate(
    dim_cap: int,
    levels: Iterable[Iterable[SimplexId]],
    face_fn: Callable[[int, SimplexId, int], SimplexId],
    deg_fn: Callable[[int, SimplexId, int], SimplexId],
) -> SimplicialSet:
    """Materialize a simplicial set from formulas for d_i and s_i."""
    levels = [list(level) for level in levels]
    faces = {}
    degeneracies = {}
    for k in range(1, dim_cap + 1):
        for z in levels[k]:
            for i in range(k + 1):
                faces[(k, z, i)] = face_fn(k, z, i)
    for k in range(dim_cap):
        for z in levels[k]:
            for i in range(k + 1):
                degeneracies[(k, z, i)] = deg_fn(k, z, i)
    return SimplicialSet(dim_cap, levels, faces, degeneracies)


# -- standard constructions ------------------------------------------------


def standard_simplex(n: int, dim_cap: int) -> SimplicialSet:
    """Delta^n truncated at dim_cap; k-simplices are weak monotone tuples."""
    if n < 0:
        raise InputError("standard_simplex needs n >= 0")
    levels: list[list[tuple]] = []
    for k in range(dim_cap + 1):
        level: list[tuple] = []

        def grow(prefix: tuple, remaining: int) -> None:
            if remaining == 0:
                level.append(prefix)
                return
            lo = prefix[-1] if prefix else 0
            for v in range(lo, n + 1):
                grow(prefix + (v,), remaining - 1)

        grow((), k + 1)
        levels.append(level)

    def face(k: int, z: tuple, i: int) -> tuple:
        return z[:i] + z[i + 1 :]

    def deg(k: int, z: tuple, i: int) -> tuple:
        return z[: i + 1] + z[i:]

    return tabulate(dim_cap, levels, face, deg)


def empty_sset(dim_cap: int) -> SimplicialSet:
    return SimplicialSet(dim_cap, [[] for _ in range(dim_cap + 1)], {}, {})


def discrete_sset(elements: Iterable[str], dim_cap: int) -> SimplicialSet:
    """Constant simplicial set on a finite set: every operator is identity."""
    elements = list(elements)
    levels = [list(elements) for _ in range(dim_cap + 1)]

    def same(k: int, z: SimplexId, i: int) -> SimplexId:
        return z

    return tabulate(dim_cap, levels, same, same)


def point_sset(dim_cap: int) -> SimplicialSet:
    return discrete_sset(["pt"], dim_cap)


def product(a: SimplicialSet, b: SimplicialSet) -> SimplicialSet:
    """Levelwise product; operators act componentwise."""
    if a.dim_cap != b.dim_cap:
        raise InputError("product requires equal dim_cap")
    cap = a.dim_cap
    levels = [
        [(za, zb) for za in a.simplices(k) for zb in b.simplices(k)]
        for k in range(cap + 1)
    ]

    def face(k: int, z: tuple, i: int) -> tuple:
        return (a.face(k, z[0], i), b.face(k, z[1], i))

    def deg(k: int, z: tuple, i: int) -> tuple:
        return (a.degeneracy(k, z[0], i), b.degeneracy(k, z[1], i))

    return tabulate(cap, levels, face, deg)


def disjoint_union(parts: Iterable[SimplicialSet]) -> SimplicialSet:
    """Tagged disjoint union; all parts must share one dim_cap."""
    parts = list(parts)
    if not parts:
        raise InputError("disjoint_union needs at least one part")
    cap = parts[0].dim_cap
    if any(p.dim_cap != cap for p in parts):
        raise InputError("disjoint_union requires equal dim_cap")
    levels = [
        [(t, z) for t, p in enumerate(parts) for z in p.simplices(k)]
        for k in range(cap + 1)
    ]

    def face(k: int, z: tuple, i: int) -> tuple:
        t, w = z
        return (t, parts[t].face(k, w, i))

    def deg(k: int, z: tuple, i: int) -> tuple:
        t, w = z
        return (t, parts[t].degeneracy(k, w, i))

    return tabulate(cap, levels, face, deg)


# -- maps --------------------------------------------------------------------


class SimplicialMap:
    """Levelwise map of simplicial sets; must commute with d_i and s_i."""

    def __init__(
        self,
        source: SimplicialSet,
        target: SimplicialSet,
        mapping: dict[tuple[int, SimplexId], SimplexId],
    ):
        if source.dim_cap != target.dim_cap:
            raise InputError("map requires equal dim_cap")
        self.source = source
        self.target = target
        self.mapping = dict(mapping)

    def apply(self, k: int, z: SimplexId) -> SimplexId:
        try:
            return self.mapping[(k, z)]
        except KeyError:
            raise InputError(f"map undefined on {cstr(z)} in dimension {k}") from None

    @staticmethod
    def identity(s: SimplicialSet) -> "SimplicialMap":
        return SimplicialMap(
            s, s, {(k, z): z for k in range(s.dim_cap + 1) for z in s.simplices(k)}
        )

    @staticmethod
    def from_function(
        source: SimplicialSet,
        target: SimplicialSet,
        fn: Callable[[int, SimplexId], SimplexId],
    ) -> "SimplicialMap":
        return SimplicialMap(
            source,
            target,
            {
                (k, z): fn(k, z)
                for k in range(source.dim_cap + 1)
                for z in source.simplices(k)
            },
        )

    def compose(self, other: "SimplicialMap") -> "SimplicialMap":
        """self after other."""
        if other.target is not self.source and other.target != self.source:
            raise InputError("composition mismatch")
        return SimplicialMap(
            other.source,
            self.target,
            {
                (k, z): self.apply(k, w)
                for (k, z), w in other.mapping.items()
            },
        )


def validate_map(m: SimplicialMap) -> Report:
    src, tgt = m.source, m.target
    for k in range(src.dim_cap + 1):
        for z in src.simplices(k):
            if (k, z) not in m.mapping:
                return Report.failure("map-domain", "map misses a simplex", (k, z))
            w = m.mapping[(k, z)]
            if not tgt.has(k, w):
                return Report.failure("map-codomain", "image not in target", (k, z, w))
    for k in range(1, src.dim_cap + 1):
        for z in src.simplices(k):
            for i in range(k + 1):
                if m.apply(k - 1, src.face(k, z, i)) != tgt.face(k, m.apply(k, z), i):
                    return Report.failure(
                        "map-face", f"does not commute with d_{i}", (k, z, i)
                    )
    for k in range(src.dim_cap):
        for z in src.simplices(k):
            for i in range(k + 1):
                if m.apply(k + 1, src.degeneracy(k, z, i)) != tgt.degeneracy(
                    k, m.apply(k, z), i
                ):
                    return Report.failure(
                        "map-degeneracy", f"does not commute with s_{i}", (k, z, i)
                    )
    return Report.success()


# -- pi0 ---------------------------------------------------------------------


@dataclass(frozen=True)
class ComponentMap:
    """Path components: canonical component ids plus the vertex projection."""

    components: tuple[tuple[SimplexId, ...], ...]
    of_vertex: dict[SimplexId, str]

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(f"c{i}" for i in range(len(self.components)))

    def a_vertex(self, cid: str) -> SimplexId:
        """Canonical representative vertex of the component."""
        return self.components[int(cid[1:])][0]

    def __len__(self) -> int:
        return len(self.components)


def pi0(s: SimplicialSet) -> ComponentMap:
    """Connected components via union-find over the 1-simplices."""
    parent: dict[SimplexId, SimplexId] = {v: v for v in s.simplices(0)}

    def find(v: SimplexId) -> SimplexId:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    if s.dim_cap >= 1:
        for e in s.simplices(1):
            a, b = find(s.face(1, e, 0)), find(s.face(1, e, 1))
            if a != b:
                # deterministic union: smaller canonical key wins as root
                if ckey(a) < ckey(b):
                    parent[b] = a
                else:
                    parent[a] = b
    classes: dict[SimplexId, list[SimplexId]] = {}
    for v in s.simplices(0):
        classes.setdefault(find(v), []).append(v)
    comps = tuple(csorted(tuple(csorted(vs)) for vs in classes.values()))
    of_vertex = {}
    for i, comp in enumerate(comps):
        for v in comp:
            of_vertex[v] = f"c{i}"
    return ComponentMap(comps, of_vertex)


# -- validation ----------------------------------------------------------------


def validate_sset(s: SimplicialSet) -> Report:
    """Check table domains, codomains, and every simplicial identity in range."""
    for k in range(s.dim_cap + 1):
        level = s.simplices(k)
        if len(set(level)) != len(level):
            return Report.failure("duplicate-simplex", "level has duplicates", (k,))
    # domains and codomains
    for k in range(1, s.dim_cap + 1):
        for z in s.simplices(k):
            for i in range(k + 1):
                if (k, z, i) not in s._faces:
                    return Report.failure("face-missing", f"d_{i} missing", (k, z))
                if not s.has(k - 1, s._faces[(k, z, i)]):
                    return Report.failure(
                        "face-codomain", f"d_{i} lands outside", (k, z, i)
                    )
    for k in range(s.dim_cap):
        for z in s.simplices(k):
            for i in range(k + 1):
                if (k, z, i) not in s._degeneracies:
                    return Report.failure(
                        "degeneracy-missing", f"s_{i} missing", (k, z)
                    )
                if not s.has(k + 1, s._degeneracies[(k, z, i)]):
                    return Report.failure(
                        "degeneracy-codomain", f"s_{i} lands outside", (k, z, i)
                    )
    extra_faces = {
        key
        for key in s._faces
        if not (1 <= key[0] <= s.dim_cap and s.has(key[0], key[1]) and 0 <= key[2] <= key[0])
    }
    if extra_faces:
        return Report.failure("face-domain", "face table has stray entries", (min(extra_faces, key=ckey),))
    extra_degs = {
        key
        for key in s._degeneracies
        if not (0 <= key[0] < s.dim_cap and s.has(key[0], key[1]) and 0 <= key[2] <= key[0])
    }
    if extra_degs:
        return Report.failure("degeneracy-domain", "degeneracy table has stray entries", (min(extra_degs, key=ckey),))
    # simplicial identities
    for k in range(2, s.dim_cap + 1):
        for z in s.simplices(k):
            for j in range(1, k + 1):
                for i in range(j):
                    # d_i d_j = d_{j-1} d_i
                    if s.face(k - 1, s.face(k, z, j), i) != s.face(
                        k - 1, s.face(k, z, i), j - 1
                    ):
                        return Report.failure(
                            "identity-dd", f"d_{i} d_{j} != d_{j-1} d_{i}", (k, z, i, j)
                        )
    for k in range(s.dim_cap - 1):
        for z in s.simplices(k):
            for j in range(k + 1):
                for i in range(j + 1):
                    # s_i s_j = s_{j+1} s_i for i <= j
                    if s.degeneracy(k + 1, s.degeneracy(k, z, j), i) != s.degeneracy(
                        k + 1, s.degeneracy(k, z, i), j + 1
                    ):
                        return Report.failure(
                            "identity-ss", f"s_{i} s_{j} != s_{j+1} s_{i}", (k, z, i, j)
                        )
    for k in range(s.dim_cap):
        for z in s.simplices(k):
            for j in range(k + 1):
                sz = s.degeneracy(k, z, j)
                for i in range(k + 2):
                    got = s.face(k + 1, sz, i)
                    if i == j or i == j + 1:
                        want = z
                    elif i < j:
                        want = s.degeneracy(k - 1, s.face(k, z, i), j - 1)
                    else:
                        want = s.degeneracy(k - 1, s.face(k, z, i - 1), j)
                    if got != want:
                        return Report.failure(
                            "identity-ds", f"d_{i} s_{j} mismatch", (k, z, i, j)
                        )
    # degeneracy criterion agrees with the bookkeeping of degeneracy images
    for k in range(1, s.dim_cap + 1):
        images = {
            s.degeneracy(k - 1, z, i)
            for z in s.simplices(k - 1)
            for i in range(k)
        }
        flagged = {z for z in s.simplices(k) if s.is_degenerate(k, z)}
        if images != flagged:
            witness = min(images.symmetric_difference(flagged), key=ckey)
            return Report.failure(
                "degeneracy-flag",
                "degeneracy images disagree with the s_i(d_i z) = z criterion",
                (k, witness),
            )
    return Report.success()


# -- serialization -------------------------------------------------------------


def canonical_names(s: SimplicialSet) -> dict[tuple[int, SimplexId], str]:
    """Rename simplices to 'k_i' per level, in canonical order."""
    names = {}
    for k in range(s.dim_cap + 1):
        for i, z in enumerate(s.simplices(k)):
            names[(k, z)] = f"{k}_{i}"
    return names


def to_json(
    s: SimplicialSet, names: dict[tuple[int, SimplexId], str] | None = None
) -> dict:
    names = names or canonical_names(s)
    simplices = {
        str(k): [names[(k, z)] for z in s.simplices(k)] for k in range(s.dim_cap + 1)
    }
    faces = {
        str(k): {
            names[(k, z)]: [names[(k - 1, s.face(k, z, i))] for i in range(k + 1)]
            for z in s.simplices(k)
        }
        for k in range(1, s.dim_cap + 1)
    }
    degeneracies = {
        str(k): {
            names[(k, z)]: [names[(k + 1, s.degeneracy(k, z, i))] for i in range(k + 1)]
            for z in s.simplices(k)
        }
        for k in range(s.dim_cap)
    }
    return {
        "dim_cap": s.dim_cap,
        "simplices": simplices,
        "faces": faces,
        "degeneracies": degeneracies,
    }


def from_json(data: dict) -> SimplicialSet:
    """Load either the full table form or the compact generator form."""
    if not isinstance(data, dict):
        raise InputError("simplicial set JSON must be an object")
    if "nondegenerate" in data:
        return _expand_compact(data)
    try:
        cap = int(data["dim_cap"])
        levels = [list(data["simplices"].get(str(k), [])) for k in range(cap + 1)]
        faces = {}
        for k_str, table in data.get("faces", {}).items():
            k = int(k_str)
            for z, imgs in table.items():
                for i, w in enumerate(imgs):
                    faces[(k, z, i)] = w
        degeneracies = {}
        for k_str, table in data.get("degeneracies", {}).items():
            k = int(k_str)
            for z, imgs in table.items():
                for i, w in enumerate(imgs):
                    degeneracies[(k, z, i)] = w
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad simplicial set JSON: {exc}") from exc
    return SimplicialSet(cap, levels, faces, degeneracies)


# Compact form: nondegenerate simplices plus their faces.  Degenerate
# simplices are generated freely and named by their normal form
# s_{w0} s_{w1} ... base with w0 > w1 > ... (strictly decreasing), using the
# rewrite s_i s_j = s_{j+1} s_i for i <= j.  A declared face may itself be
# degenerate, written {"degeneracy": [indices], "of": base_id}.


def _normalize_word(word: list[int]) -> tuple[int, ...]:
    w = list(word)
    changed = True
    while changed:
        changed = False
        for t in range(len(w) - 1):
            if w[t] <= w[t + 1]:
                w[t], w[t + 1] = w[t + 1] + 1, w[t]
                changed = True
    return tuple(w)


def _expand_compact(data: dict) -> SimplicialSet:
    try:
        cap = int(data["dim_cap"])
        nondeg = {
            int(k): list(v) for k, v in data["nondegenerate"].items()
        }
        declared_faces = {
            int(k): dict(v) for k, v in data.get("faces", {}).items()
        }
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad compact simplicial set JSON: {exc}") from exc

    base_dim: dict[str, int] = {}
    for k, zs in nondeg.items():
        for z in zs:
            if z in base_dim:
                raise InputError(f"duplicate nondegenerate id {z!r}")
            base_dim[z] = k

    def parse_ref(ref) -> tuple[tuple[int, ...], str]:
        if isinstance(ref, str):
            return (), ref
        if isinstance(ref, dict) and "of" in ref:
            word = _normalize_word([int(i) for i in ref.get("degeneracy", [])])
            return word, ref["of"]
        raise InputError(f"bad simplex reference {ref!r}")

    # simplex = (word, base); dimension = len(word) + base dimension
    def dim_of(z: tuple[tuple[int, ...], str]) -> int:
        return len(z[0]) + base_dim[z[1]]

    def s_apply(i: int, z: tuple[tuple[int, ...], str]) -> tuple[tuple[int, ...], str]:
        return (_normalize_word([i, *z[0]]), z[1])

    def d_apply(i: int, z: tuple[tuple[int, ...], str]) -> tuple[tuple[int, ...], str]:
        word, base = z
        if not word:
            k = base_dim[base]
            try:
                ref = declared_faces[k][base][i]
            except (KeyError, IndexError):
                raise InputError(f"missing face d_{i} of {base!r}") from None
            w, b = parse_ref(ref)
            if len(w) + base_dim[b] != k - 1:
                raise InputError(f"face d_{i} of {base!r} has wrong dimension")
            return (w, b)
        j, rest = word[0], (word[1:], base)
        if i < j:
            return s_apply(j - 1, d_apply(i, rest))
        if i in (j, j + 1):
            return rest
        return s_apply(j, d_apply(i - 1, rest))

    levels: list[list] = [[] for _ in range(cap + 1)]
    for k in range(cap + 1):
        for z in nondeg.get(k, []):
            levels[k].append(((), z))
    for k in range(cap):
        seen = set(levels[k + 1])
        for z in levels[k]:
            for i in range(k + 1):
                w = s_apply(i, z)
                if w not in seen:
                    seen.add(w)
                    levels[k + 1].append(w)

    def face(k: int, z, i: int):
        return d_apply(i, z)

    def deg(k: int, z, i: int):
        return s_apply(i, z)

    s = tabulate(cap, levels, face, deg)
    # friendlier ids: nondegenerate keep their names, degenerate get a tag
    rename = {}
    for k in range(cap + 1):
        for z in s.simplices(k):
            word, base = z
            if not word:
                rename[z] = base
            else:
                rename[z] = "s" + ".".join(str(i) for i in word) + ":" + base
    levels2 = [[rename[z] for z in s.simplices(k)] for k in range(cap + 1)]
    faces2 = {
        (k, rename[z], i): rename[s.face(k, z, i)]
        for k in range(1, cap + 1)
        for z in s.simplices(k)
        for i in range(k + 1)
    }
    degs2 = {
        (k, rename[z], i): rename[s.degeneracy(k, z, i)]
        for k in range(cap)
        for z in s.simplices(k)
        for i in range(k + 1)
    }
    return SimplicialSet(cap, levels2, faces2, degs2)
