"""Structure functions and pattern functions.

Three kinds are built in:

``maximal``  every S-map is allowed and every finite partition is a pattern
``rover``    on the Röver action, ``S(Bw1, Bw2) = {sig, b, c, d}`` twisted maps
``brin``     on products of CUP actions: tuples of componentwise structure
             maps, with patterns generated by single-coordinate maximal splits
"""

from __future__ import annotations

import itertools
import random
from functools import lru_cache
from typing import Iterable, Sequence

from .core_action import (
    Action,
    ActionError,
    Domain,
    Partition,
    PartialMap,
    get_action,
    is_partition,
)
from .grigorchuk import KLEIN_GROUP
from .semigroups import ConeAction, ProductAction

__all__ = [
    "SStructure",
    "CorruptedStructure",
    "make_structure",
    "structure_set",
    "domain_type_id",
    "is_pattern",
    "refine_to_pattern",
    "meet",
    "restrict_partition",
    "verify_sstructure_axioms",
    "pathology_partition",
    "dyadic_coarsenings",
]


def _sorted_maps(maps: Iterable[PartialMap]) -> list:
    return sorted(set(maps), key=PartialMap.sort_key)


def _sorted_domains(ds: Iterable[Domain]) -> tuple:
    return tuple(sorted(set(ds), key=Domain.sort_key))


class SStructure:
    """An S-structure ``(S, P)`` on a registered action."""

    def __init__(self, action: Action | str, kind: str = "maximal"):
        if isinstance(action, str):
            action = get_action(action)
        self.action = action
        self.kind = kind
        if kind == "maximal":
            if isinstance(action, ConeAction) and action.rover:
                raise ActionError("the maximal structure on the Röver action has infinite groups S(D,D)")
            if isinstance(action, ProductAction) and any(
                isinstance(c, ConeAction) and c.rover for c in action.components
            ):
                raise ActionError("maximal structures need finite groups S(D,D)")
        elif kind == "rover":
            if not (isinstance(action, ConeAction) and action.rover):
                raise ActionError("the Röver structure needs the Röver action")
        elif kind == "brin":
            if not isinstance(action, ProductAction):
                raise ActionError("Brin patterns need a product action")
            if not all(c.has_cup for c in action.components):
                raise ActionError("Brin patterns need CUP components")
            self.components = tuple(
                SStructure(c, "rover" if isinstance(c, ConeAction) and c.rover else "maximal")
                for c in action.components
            )
        else:
            raise ActionError(f"unknown structure kind {kind!r}")
        self.type_count = action.type_count()
        self.transversal = action.transversal()
        self._pattern_cache: dict = {}

    def __repr__(self) -> str:
        return f"SStructure({self.action.action_id}, {self.kind})"

    @property
    def action_id(self) -> str:
        return self.action.action_id

    # structure sets --------------------------------------------------------
    def structure_set(self, d1: Domain, d2: Domain) -> list:
        if d1.is_empty or d2.is_empty:
            return []
        cache = self.__dict__.setdefault("_set_cache", {})
        key = (d1, d2)
        hit = cache.get(key)
        if hit is None:
            hit = cache[key] = self._structure_set(d1, d2)
        return hit

    def _structure_set(self, d1: Domain, d2: Domain) -> list:
        if self.kind == "maximal":
            return _sorted_maps(self.action.maps_onto(d1, d2))
        if self.kind == "rover":
            if d1.kind != "B" or d2.kind != "B":
                return []
            return _sorted_maps(self.action.cmap(d1.word, d2.word, g) for g in KLEIN_GROUP)
        pools = [c.structure_set(a, b) for c, a, b in zip(self.components, d1.parts, d2.parts)]
        return _sorted_maps(self.action.tup(ms) for ms in itertools.product(*pools))

    def contains_map(self, s: PartialMap) -> bool:
        return s in self.structure_set(s.source, s.target)

    def group(self, d: Domain) -> list:
        return self.structure_set(d, d)

    def domain_type_id(self, d: Domain) -> int:
        if d.is_empty:
            raise ActionError("the empty domain has no type")
        return self.action.shape_type(d)

    def transversal_of(self, d: Domain) -> Domain:
        return self.transversal[self.domain_type_id(d)]

    def same_domain_type(self, d1: Domain, d2: Domain) -> bool:
        return self.domain_type_id(d1) == self.domain_type_id(d2)

    # patterns --------------------------------------------------------------
    def is_cup(self) -> bool:
        return self.action.has_cup

    def simple_patterns(self, d: Domain) -> list:
        """Non-trivial patterns through which every expansion of ``d`` factors."""
        act = self.action
        if isinstance(act, ProductAction):
            out = []
            for j, c in enumerate(act.components):
                if c.is_splittable(d.parts[j]):
                    out.append(_sorted_domains(act.coordinate_split(d, {j})))
            return out
        parts = act.split(d)
        return [_sorted_domains(parts)] if len(parts) > 1 else []

    def is_pattern(self, base: Domain, pieces: Iterable[Domain]) -> bool:
        pieces = _sorted_domains(pieces)
        if not is_partition(self.action, base, pieces):
            return False
        if self.kind != "brin":
            return True
        return self._brin(base, pieces)

    def _brin(self, base: Domain, pieces: tuple) -> bool:
        key = (base, pieces)
        hit = self._pattern_cache.get(key)
        if hit is not None:
            return hit
        if len(pieces) == 1:
            res = pieces[0] == base
        else:
            res = False
            act = self.action
            for j, c in enumerate(act.components):
                if not c.is_splittable(base.parts[j]):
                    continue
                parts = act.coordinate_split(base, {j})
                groups = {p: [] for p in parts}
                ok = True
                for q in pieces:
                    home = [p for p in parts if act.contains(p, q)]
                    if len(home) != 1:
                        ok = False
                        break
                    groups[home[0]].append(q)
                if ok and all(self._brin(p, tuple(g)) for p, g in groups.items()):
                    res = True
                    break
        self._pattern_cache[key] = res
        return res

    def refine_to_pattern(self, base: Domain, pieces: Iterable[Domain]) -> tuple:
        pieces = _sorted_domains(pieces)
        if self.kind != "brin" or self.is_pattern(base, pieces):
            return pieces
        return self.grid_refine(base, pieces)

    def grid_refine(self, base: Domain, domains: Iterable[Domain]) -> tuple:
        """Cut every coordinate of ``base`` along every component of ``domains``."""
        act = self.action
        domains = list(domains)
        axes = []
        for j, c in enumerate(act.components):
            cells = [base.parts[j]]
            for q in domains:
                a = q.parts[j]
                nxt = []
                for cell in cells:
                    if cell == a or c.disjoint(cell, a) or c.contains(a, cell):
                        nxt.append(cell)
                    else:
                        nxt.extend(c.partition_difference(cell, a))
                        nxt.append(a)
                cells = nxt
            axes.append(cells)
        return _sorted_domains(act.brick(ps) for ps in itertools.product(*axes))

    def random_pattern(self, d: Domain, rng: random.Random, steps: int = 3) -> tuple:
        pieces = [d]
        for _ in range(steps):
            idx = rng.randrange(len(pieces))
            options = self.simple_patterns(pieces[idx])
            if not options:
                continue
            pieces[idx:idx + 1] = list(rng.choice(options))
        return _sorted_domains(pieces)

    def random_partition(self, d: Domain, rng: random.Random, steps: int = 3) -> tuple:
        """A partition of ``d`` that need not be a pattern (products: merged grid cells)."""
        if self.kind != "brin":
            return self.random_pattern(d, rng, steps)
        act = self.action
        axes = []
        for j, c in enumerate(act.components):
            cells = [d.parts[j]]
            for _ in range(rng.randint(0, 2)):
                i = rng.randrange(len(cells))
                parts = c.split(cells[i])
                if len(parts) > 1:
                    cells[i:i + 1] = list(parts)
            axes.append(cells)
        pieces = [act.brick(ps) for ps in itertools.product(*axes)]
        for _ in range(3 * len(pieces)):
            a, b = rng.sample(pieces, 2) if len(pieces) > 1 else (None, None)
            if a is None:
                break
            u = _brick_union(act, a, b)
            if u is not None:
                pieces.remove(a)
                pieces.remove(b)
                pieces.append(u)
        return _sorted_domains(pieces)

    def random_domain_of_type(self, type_id: int, rng: random.Random, depth: int = 3) -> Domain:
        for _ in range(1000):
            d = self.action.random_domain(rng, depth)
            if self.domain_type_id(d) == type_id:
                return d
        return self.transversal[type_id]


def _brick_union(act: ProductAction, a: Domain, b: Domain):
    """The brick ``a ∪ b`` when the two differ in one coordinate as split siblings."""
    diff = [j for j in range(len(act.components)) if a.parts[j] != b.parts[j]]
    if len(diff) != 1:
        return None
    j = diff[0]
    c = act.components[j]
    x, y = a.parts[j], b.parts[j]
    for parent in _parents(c, x):
        if set(c.split(parent)) == {x, y}:
            parts = list(a.parts)
            parts[j] = parent
            return act.brick(parts)
    return None


def _parents(c: Action, x: Domain):
    if x.kind in ("B", "T") and x.word:
        yield Domain(c.action_id, x.kind, word=x.word[:-1])
    elif x.kind == "Pt":
        yield Domain(c.action_id, "T", word=x.word)
    elif x.kind == "R" and x.offset > 1:
        yield Domain(c.action_id, "R", ray=x.ray, offset=x.offset - 1)
    elif x.kind == "P":
        yield Domain(c.action_id, "R", ray=x.ray, offset=x.offset)


class CorruptedStructure(SStructure):
    """A deliberately broken structure used as a negative control.

    ``mode="drop_identity"`` removes identities from every ``S(D,D)``;
    ``mode="drop_trivial_pattern"`` rejects the trivial partition.
    """

    def __init__(self, base: SStructure, mode: str = "drop_identity"):
        self.__dict__.update({k: v for k, v in base.__dict__.items() if not k.endswith("_cache")})
        self._pattern_cache = {}
        self.base = base
        self.mode = mode

    def structure_set(self, d1, d2):
        out = self.base.structure_set(d1, d2)
        if self.mode == "drop_identity" and d1 == d2:
            ident = self.action.identity(d1)
            out = [s for s in out if s != ident]
        return out

    def is_pattern(self, base, pieces):
        pieces = _sorted_domains(pieces)
        if self.mode == "drop_trivial_pattern" and pieces == (base,):
            return False
        return self.base.is_pattern(base, pieces)


def make_structure(action: Action | str, kind: str | None = None) -> SStructure:
    if isinstance(action, str):
        action = get_action(action)
    if kind is None:
        kind = default_structure_kind(action)
    return _cached_structure(action.action_id, kind)


@lru_cache(maxsize=None)
def _cached_structure(action_id: str, kind: str) -> SStructure:
    return SStructure(get_action(action_id), kind)


def default_structure_kind(action: Action) -> str:
    if isinstance(action, ConeAction) and action.rover:
        return "rover"
    if isinstance(action, ProductAction) and not action.has_cup:
        return "brin"
    return "maximal"


# ---------------------------------------------------------------------------
# Module-level helpers


def structure_set(ss: SStructure, d1: Domain, d2: Domain) -> list:
    return ss.structure_set(d1, d2)


def domain_type_id(ss: SStructure, d: Domain) -> int:
    return ss.domain_type_id(d)


def is_pattern(ss: SStructure, partition: Partition) -> bool:
    return ss.is_pattern(partition.base, partition.pieces)


def refine_to_pattern(ss: SStructure, partition: Partition) -> Partition:
    return Partition(partition.base, ss.refine_to_pattern(partition.base, partition.pieces))


def meet(p1: Partition, p2: Partition) -> Partition:
    if p1.base != p2.base:
        raise ActionError("meet needs partitions of the same base")
    act = get_action(p1.base.action_id)
    pieces = [act.intersect(a, b) for a in p1.pieces for b in p2.pieces]
    return Partition(p1.base, [q for q in pieces if not q.is_empty])


def restrict_partition(p: Partition, y: Domain) -> Partition:
    act = get_action(y.action_id)
    if not act.contains(p.base, y):
        raise ActionError(f"{y} is not inside {p.base}")
    pieces = [act.intersect(q, y) for q in p.pieces]
    return Partition(y, [q for q in pieces if not q.is_empty])


def pathology_partition(n: int = 1) -> Partition:
    """The nine-brick family on ``X^3`` of the product of three copies of V_2.

    For a word length ``n`` the bricks are ``B0xB0xBe``, ``B1xBexBw0``,
    ``B0xB1xBw0``, ``BexB1xBw1`` and ``B1xB0xBw1`` with ``|w| = n``.
    """
    act = get_action("prod(V2,V2,V2)")
    v = get_action("V2")
    B = v.cone
    words = ["".join(t) for t in itertools.product("01", repeat=n)]
    pieces = [act.brick((B("0"), B("0"), B("")))]
    for w in words:
        pieces.append(act.brick((B("1"), B(""), B(w + "0"))))
        pieces.append(act.brick((B("0"), B("1"), B(w + "0"))))
        pieces.append(act.brick((B(""), B("1"), B(w + "1"))))
        pieces.append(act.brick((B("1"), B("0"), B(w + "1"))))
    base = act.brick((B(""), B(""), B("")))
    return Partition(base, pieces)


def dyadic_coarsenings(partition: Partition, max_depth: int) -> list:
    """Every partition of the base into bricks with words of length at most
    ``max_depth`` such that each piece of ``partition`` lies inside one brick."""
    act = get_action(partition.base.action_id)
    pieces = list(partition.pieces)
    per_coord = []
    for c, p in zip(act.components, partition.base.parts):
        per_coord.append([d for d in c.domains_upto(max_depth) if c.contains(p, d)])
    unions = []
    for parts in itertools.product(*per_coord):
        b = act.brick(parts)
        inside = frozenset(i for i, q in enumerate(pieces) if act.contains(b, q))
        if inside and all(i in inside or act.disjoint(b, q) for i, q in enumerate(pieces)):
            if is_partition(act, b, [pieces[i] for i in inside]):
                unions.append((inside, b))
    by_first: dict = {}
    for inside, b in unions:
        by_first.setdefault(min(inside), []).append((inside, b))
    out = []

    def cover(done: frozenset, chosen: list):
        if len(done) == len(pieces):
            out.append(tuple(sorted(chosen, key=Domain.sort_key)))
            return
        first = min(i for i in range(len(pieces)) if i not in done)
        for inside, b in by_first.get(first, []):
            if not inside & done:
                cover(done | inside, chosen + [b])

    cover(frozenset(), [])
    return out


# ---------------------------------------------------------------------------
# Axiom verification


def _sample_locally_determined(ss: SStructure, d: Domain, rng: random.Random):
    """A random element of S-hat with domain ``d`` as a list of S-pieces."""
    act = ss.action
    s = act.random_map(rng, d, depth=2)
    qs = list(ss.random_pattern(d, rng, rng.randint(0, 3)))
    by_type: dict = {}
    for q in qs:
        by_type.setdefault(_fine_shape(ss, q), []).append(q)
    pieces = []
    for group in by_type.values():
        perm = group[:]
        rng.shuffle(perm)
        for q, r in zip(group, perm):
            onto = act.maps_onto(q, r)
            if not onto:
                onto = [act.identity(q)]
                r = q
            tau = onto[0]
            if isinstance(act, ConeAction) and act.rover:
                twist = act.cmap(r.word, r.word, "".join(rng.choice("abcd") for _ in range(rng.randint(0, 3))))
                tau = act.compose(twist, tau)
            pieces.append(act.compose(act.restrict(s, r), tau))
    return pieces


def _fine_shape(ss: SStructure, d: Domain):
    act = ss.action
    return tuple(act.maps_onto(d, d) and [ss.domain_type_id(d), _maps_key(act, d)])


def _maps_key(act, d):
    # domains admitting S-maps onto each other share this key
    if d.kind == "X":
        return tuple(_maps_key(c, p) for c, p in zip(act.components, d.parts))
    if d.kind == "R":
        return ("R", d.ray)
    return (d.kind,)


def generation_witness(ss: SStructure, f: PartialMap, max_depth: int = 12):
    """A pattern of ``f.source`` on whose pieces ``f`` restricts into structure sets."""
    act = ss.action

    def rec(m: PartialMap, depth: int):
        if ss.contains_map(m):
            return [m.source]
        if depth >= max_depth:
            return None
        options = ss.simple_patterns(m.source)
        if not options:
            return None
        out = []
        for e in options[0]:
            sub = rec(act.restrict(m, e), depth + 1)
            if sub is None:
                return None
            out.extend(sub)
        return out

    return rec(f, 0)


def verify_sstructure_axioms(ss: SStructure, sample_budget: int = 200, seed: int = 0) -> list:
    """Randomized checks of (P1)-(P5) and (S1)-(S6).

    Returns a list of ``{"axiom", "status", "checked", "witness"?}`` records.
    """
    rng = random.Random(seed)
    act = ss.action
    names = ["P1", "P2", "P3", "P4", "P5", "S1", "S2", "S3", "S4", "S5", "S6"]
    report = {a: {"axiom": a, "status": "pass", "checked": 0} for a in names}

    def fail(axiom, witness):
        rec = report[axiom]
        if rec["status"] == "pass":
            rec["status"] = "fail"
            rec["witness"] = witness
        rec["checked"] += 1

    def ok(axiom):
        report[axiom]["checked"] += 1

    for _ in range(sample_budget):
        d = act.random_domain(rng, 3)
        t = ss.domain_type_id(d)
        # P1
        if ss.is_pattern(d, [d]):
            ok("P1")
        else:
            fail("P1", {"domain": str(d)})
        # P2
        pat = ss.random_pattern(d, rng, rng.randint(1, 4))
        if is_partition(act, d, pat) and ss.is_pattern(d, pat):
            ok("P2")
        else:
            fail("P2", {"domain": str(d), "pattern": [str(q) for q in pat]})
        # P3
        e = ss.random_pattern(d, rng, rng.randint(0, 3))
        e = rng.choice(e)
        restricted = [act.intersect(q, e) for q in pat]
        restricted = [q for q in restricted if not q.is_empty]
        if ss.is_pattern(e, restricted):
            ok("P3")
        else:
            fail("P3", {"pattern": [str(q) for q in pat], "subdomain": str(e)})
        # P4
        patch = []
        for q in pat:
            patch.extend(ss.random_pattern(q, rng, rng.randint(0, 2)))
        if ss.is_pattern(d, patch):
            ok("P4")
        else:
            fail("P4", {"domain": str(d), "patchwork": [str(q) for q in patch]})
        # P5
        part = ss.random_partition(d, rng, rng.randint(1, 4))
        ref = ss.refine_to_pattern(d, part)
        refines = all(any(act.contains(p, r) for p in part) for r in ref)
        if ss.is_pattern(d, ref) and refines:
            ok("P5")
        else:
            fail("P5", {"partition": [str(q) for q in part]})
        # S1 and S2
        d2 = ss.random_domain_of_type(t, rng, 3)
        d3 = ss.random_domain_of_type(t, rng, 3)
        s12 = ss.structure_set(d, d2)
        if s12 and all(s.source == d and s.target == d2 for s in s12):
            ok("S1")
        else:
            fail("S1", {"pair": [str(d), str(d2)]})
        other = act.random_domain(rng, 3)
        if ss.domain_type_id(other) != t and ss.structure_set(d, other):
            fail("S1", {"pair": [str(d), str(other)], "reason": "maps between distinct types"})
        if act.identity(d) in ss.structure_set(d, d):
            ok("S2")
        else:
            fail("S2", {"domain": str(d)})
        # S3
        bad = [str(s) for s in s12 if act.invert(s) not in ss.structure_set(d2, d)]
        if bad:
            fail("S3", {"maps": bad})
        else:
            ok("S3")
        # S4
        s23 = ss.structure_set(d2, d3)
        s13 = set(ss.structure_set(d, d3))
        bad = [[str(a), str(b)] for a in s23 for b in s12 if act.compose(a, b) not in s13]
        if bad:
            fail("S4", {"pairs": bad[:3]})
        else:
            ok("S4")
        # S5
        f_pieces = _sample_locally_determined(ss, d, rng)
        witness = []
        good = True
        for piece in f_pieces:
            w = generation_witness(ss, piece)
            if w is None:
                good = False
                break
            witness.extend(w)
        if good and ss.is_pattern(d, witness):
            ok("S5")
        else:
            fail("S5", {"pieces": [str(p) for p in f_pieces]})
        # S6
        if s12:
            s = rng.choice(s12)
            image = [act.translate(s, q) for q in pat]
            if ss.is_pattern(d2, image):
                ok("S6")
            else:
                fail("S6", {"map": str(s), "pattern": [str(q) for q in pat]})
    return [report[a] for a in names]
