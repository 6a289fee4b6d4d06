"""Classes ``[f, D]``, pseudovertices, expansions and the expansion order.

A class is stored through its canonical representative: an S-map whose
source is the transversal domain of its type, minimal in ``(twist length,
text)`` order over right multiplication by the finite group ``S(T, T)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable

from .core_action import ActionError, Domain, PartialMap, is_partition
from .gamma_group import GammaElement, gamma_from_pieces
from .local_maps import merge_pieces
from .s_structure import SStructure

__all__ = [
    "ClassPair",
    "Pseudovertex",
    "BudgetExceeded",
    "make_class",
    "make_pv",
    "identity_class",
    "parse_pv",
    "expand",
    "simple_expansions",
    "pair_simple_expansions",
    "leq",
    "common_upper_bound",
    "act",
    "type_vector",
    "same_type",
    "transporter",
    "root_vertex",
]

DEFAULT_LEQ_BUDGET = 200_000


class BudgetExceeded(RuntimeError):
    """A bounded search ran out of budget before reaching an answer."""


@dataclass(frozen=True)
class ClassPair:
    map: PartialMap
    type_id: int

    def __str__(self) -> str:
        return str(self.map)

    def __repr__(self) -> str:
        return f"[{self.map}]"

    @property
    def image(self) -> Domain:
        return self.map.target

    @property
    def source(self) -> Domain:
        return self.map.source

    def sort_key(self):
        return (self.image.sort_key(), self.map.sort_key())


@dataclass(frozen=True)
class Pseudovertex:
    pairs: frozenset
    ss: SStructure = field(compare=False, hash=False, repr=False)

    def __str__(self) -> str:
        return "{" + " ; ".join(sorted(str(p) for p in self.pairs)) + "}"

    def __repr__(self) -> str:
        return f"Pseudovertex({self})"

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.sorted_pairs())

    @property
    def rank(self) -> int:
        return len(self.pairs)

    def sorted_pairs(self) -> list:
        return sorted(self.pairs, key=ClassPair.sort_key)

    def images(self) -> list:
        return [p.image for p in self.sorted_pairs()]

    def sub(self, pairs: Iterable[ClassPair]) -> "Pseudovertex":
        return Pseudovertex(frozenset(pairs), self.ss)

    def minus(self, other) -> "Pseudovertex":
        other = other.pairs if isinstance(other, Pseudovertex) else frozenset(other)
        return Pseudovertex(self.pairs - other, self.ss)

    def is_vertex(self) -> bool:
        act = self.ss.action
        ims = self.images()
        for root in act.root_partition():
            inside = [d for d in ims if act.contains(root, d)]
            if not is_partition(act, root, inside):
                return False
        return True


# ---------------------------------------------------------------------------
# Construction


def make_class(ss: SStructure, f: PartialMap) -> ClassPair:
    if f.is_zero:
        raise ActionError("the zero map has no class")
    cache = ss.__dict__.setdefault("_class_cache", {})
    hit = cache.get(f)
    if hit is not None:
        return hit
    act = ss.action
    tid = ss.domain_type_id(f.source)
    t = ss.transversal[tid]
    hs = ss.structure_set(t, f.source)
    if not hs:
        raise ActionError(f"no structure map from {t} to {f.source}")
    g = act.compose(f, hs[0])
    group = ss.group(t)
    if len(group) == 1:
        rep = g
    else:
        rep = min((act.compose(g, k) for k in group), key=PartialMap.sort_key)
    res = ClassPair(rep, tid)
    cache[f] = res
    return res


def identity_class(ss: SStructure, d: Domain) -> ClassPair:
    return make_class(ss, ss.action.identity(d))


def make_pv(ss: SStructure, items: Iterable) -> Pseudovertex:
    """Build a pseudovertex from class pairs or S-maps; images must be disjoint."""
    pairs = []
    for it in items:
        pairs.append(it if isinstance(it, ClassPair) else make_class(ss, it))
    if not pairs:
        raise ActionError("a pseudovertex needs at least one class")
    ims = [p.image for p in pairs]
    for i, a in enumerate(ims):
        for b in ims[i + 1:]:
            if not ss.action.disjoint(a, b):
                raise ActionError(f"images {a} and {b} overlap")
    pv = Pseudovertex(frozenset(pairs), ss)
    if pv.rank != len(pairs):
        raise ActionError("repeated class in pseudovertex")
    return pv


def parse_pv(ss: SStructure, text: str) -> Pseudovertex:
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise ActionError(f"bad pseudovertex text {text!r}")
    items = [t for t in text[1:-1].split(";") if t.strip()]
    return make_pv(ss, [ss.action.parse_map(t) for t in items])


def root_vertex(ss: SStructure) -> Pseudovertex:
    return make_pv(ss, [identity_class(ss, d) for d in ss.action.root_partition()])


def type_vector(v) -> tuple:
    pairs = v.pairs if isinstance(v, Pseudovertex) else v
    ss = v.ss if isinstance(v, Pseudovertex) else None
    if ss is None:
        raise ActionError("type_vector needs a pseudovertex")
    counts = [0] * ss.type_count
    for p in pairs:
        counts[p.type_id] += 1
    return tuple(counts)


def same_type(v1: Pseudovertex, v2: Pseudovertex) -> bool:
    return type_vector(v1) == type_vector(v2)


# ---------------------------------------------------------------------------
# Expansions


def expand(v: Pseudovertex, at: ClassPair, dhat: Domain, h: PartialMap, pattern) -> Pseudovertex:
    """Replace ``at = [f, T]`` by ``{[f h, E] : E in pattern}`` with ``h`` in ``S(dhat, T)``."""
    ss = v.ss
    act = ss.action
    if at not in v.pairs:
        raise ActionError(f"{at} is not in {v}")
    pattern = tuple(pattern)
    if len(pattern) < 2:
        raise ActionError("expansion needs a non-trivial pattern")
    if h not in ss.structure_set(dhat, at.source):
        raise ActionError(f"{h} is not a structure map from {dhat} to {at.source}")
    if not ss.is_pattern(dhat, pattern):
        raise ActionError("not a pattern of the expanded domain")
    fh = act.compose(at.map, h)
    new = [make_class(ss, act.restrict(fh, e)) for e in pattern]
    return make_pv(ss, list(v.pairs - {at}) + new)


def pair_simple_expansions(ss: SStructure, b: ClassPair) -> list:
    """Simple expansions of ``{b}`` as frozensets of classes, sorted by text."""
    cache = ss.__dict__.setdefault("_simple_cache", {})
    hit = cache.get(b)
    if hit is not None:
        return hit
    act = ss.action
    t = b.source
    out = set()
    for h in ss.group(t):
        fh = act.compose(b.map, h)
        for pattern in ss.simple_patterns(t):
            out.add(frozenset(make_class(ss, act.restrict(fh, e)) for e in pattern))
    res = sorted(out, key=lambda s: sorted(str(p) for p in s))
    cache[b] = res
    return res


def simple_expansions(v: Pseudovertex) -> list:
    ss = v.ss
    if not (ss.action.has_cup or ss.kind == "brin"):
        raise ActionError("simple expansions need a CUP action or Brin patterns")
    out = []
    seen = set()
    for b in v.sorted_pairs():
        for u in pair_simple_expansions(ss, b):
            w = v.sub((v.pairs - {b}) | u)
            if w not in seen:
                seen.add(w)
                out.append(w)
    return out


# ---------------------------------------------------------------------------
# Order


def _inside(act, big: Domain, pairs) -> list:
    return [q for q in pairs if act.contains(big, q.image)]


class _Budget:
    def __init__(self, n: int):
        self.left = n

    def spend(self) -> None:
        self.left -= 1
        if self.left < 0:
            raise BudgetExceeded("order search budget exhausted")


def _leq_single(ss: SStructure, b: ClassPair, w: frozenset, budget: _Budget) -> bool:
    cache = ss.__dict__.setdefault("_leq_cache", {})
    key = (b, w)
    hit = cache.get(key)
    if hit is not None:
        return hit
    budget.spend()
    act = ss.action
    if w == frozenset([b]):
        res = True
    elif len(w) == 1 or not is_partition(act, b.image, [q.image for q in w]):
        res = False
    else:
        res = False
        for u in pair_simple_expansions(ss, b):
            if len(u) > len(w):
                continue
            groups = []
            ok = True
            used = 0
            for p in sorted(u, key=ClassPair.sort_key):
                sub = frozenset(_inside(act, p.image, w))
                used += len(sub)
                groups.append((p, sub))
            if used != len(w):
                ok = False
            if ok and all(sub and _leq_single(ss, p, sub, budget) for p, sub in groups):
                res = True
                break
    cache[key] = res
    return res


def leq(v1: Pseudovertex, v2: Pseudovertex, budget: int = DEFAULT_LEQ_BUDGET):
    """Whether ``v2`` is reachable from ``v1`` by expansions.

    Raises :class:`BudgetExceeded` when the search cannot finish.
    """
    ss = v1.ss
    act = ss.action
    if v1 == v2:
        return True
    if v2.rank < v1.rank:
        return False
    bud = _Budget(budget)
    used = 0
    for b in v1.sorted_pairs():
        sub = frozenset(_inside(act, b.image, v2.pairs))
        used += len(sub)
        if not sub or not _leq_single(ss, b, sub, bud):
            return False
    return used == v2.rank


def _identity_form(ss: SStructure, b: ClassPair, depth: int = 0) -> list:
    """Domains ``E`` with ``{b} <= {[id_E, E]}`` reached by standard splits."""
    act = ss.action
    if identity_class(ss, b.image) == b:
        return [b.image]
    if depth > 40:
        raise ActionError(f"{b} does not reach identity form")
    pats = ss.simple_patterns(b.source)
    if not pats:
        raise ActionError(f"{b} cannot be split toward identity form")
    out = []
    for e in pats[0]:
        out.extend(_identity_form(ss, make_class(ss, act.restrict(b.map, e)), depth + 1))
    return out


def _same_image(act, v1: Pseudovertex, v2: Pseudovertex) -> bool:
    for x, y in ((v1, v2), (v2, v1)):
        for d in x.images():
            parts = [act.intersect(d, e) for e in y.images()]
            if not is_partition(act, d, [p for p in parts if not p.is_empty]):
                return False
    return True


def common_upper_bound(v1: Pseudovertex, v2: Pseudovertex, budget: int = DEFAULT_LEQ_BUDGET) -> Pseudovertex:
    ss = v1.ss
    act = ss.action
    if v1 == v2:
        return v1
    if not _same_image(act, v1, v2):
        raise ActionError("upper bounds exist only for pseudovertices with the same image")
    e1 = [d for b in v1.sorted_pairs() for d in _identity_form(ss, b)]
    e2 = [d for b in v2.sorted_pairs() for d in _identity_form(ss, b)]
    pieces = []
    for d in e1:
        cut = [act.intersect(d, e) for e in e2]
        cut = [c for c in cut if not c.is_empty]
        if ss.kind == "brin":
            pieces.extend(ss.grid_refine(d, e1 + e2))
        else:
            pieces.extend(cut)
    u = make_pv(ss, [identity_class(ss, d) for d in pieces])
    if leq(v1, u, budget) is not True or leq(v2, u, budget) is not True:
        raise ActionError("upper bound construction failed to verify")
    return u


# ---------------------------------------------------------------------------
# Action of local maps


def act(s, v: Pseudovertex) -> Pseudovertex:
    """Postcompose every class of ``v`` by the local map ``s``."""
    ss = v.ss
    a = ss.action
    pieces = s.pieces if isinstance(s, GammaElement) else (s,)
    out = []
    for b in v.sorted_pairs():
        parts = []
        for p in pieces:
            c = a.compose(p, b.map)
            if not c.is_zero:
                parts.append(c)
        srcs = [c.source for c in parts]
        if not parts or not is_partition(a, b.source, srcs):
            raise ActionError(f"image of {b} escapes the domain of the acting map")
        if len(parts) == 1:
            m = parts[0]
        else:
            m = merge_pieces(a, b.source, parts)
            if m is None:
                raise ActionError(f"acting on {b} leaves the S-representable classes")
        out.append(make_class(ss, m))
    return make_pv(ss, out)


def transporter(v1: Pseudovertex, v2: Pseudovertex) -> GammaElement:
    """A local map carrying ``v1`` onto ``v2``; pairs are matched by type in sorted order."""
    if type_vector(v1) != type_vector(v2):
        raise ActionError("transporters exist only between pseudovertices of the same type")
    a = v1.ss.action
    pieces = []
    for t in range(v1.ss.type_count):
        xs = [p for p in v1.sorted_pairs() if p.type_id == t]
        ys = [p for p in v2.sorted_pairs() if p.type_id == t]
        for x, y in zip(xs, ys):
            pieces.append(a.compose(y.map, a.invert(x.map)))
    return gamma_from_pieces(pieces)


def all_sub_pvs(v: Pseudovertex, size: int):
    for combo in itertools.combinations(v.sorted_pairs(), size):
        yield v.sub(combo)
