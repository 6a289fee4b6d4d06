"""Expansion schemes, preschemes, E-expansions and contracting pseudovertices."""

from __future__ import annotations

import itertools
import random
from functools import lru_cache
from typing import Iterable

from .core_action import ActionError, is_partition
from .local_maps import hull, merge_pieces
from .pseudovertex import (
    ClassPair,
    Pseudovertex,
    act,
    identity_class,
    leq,
    make_class,
    make_pv,
    type_vector,
)
from .s_structure import SStructure, make_structure

__all__ = [
    "Scheme",
    "Prescheme",
    "CorruptedScheme",
    "make_scheme",
    "e_set",
    "e_expansions",
    "is_e_expansion",
    "is_e_chain",
    "extend_prescheme",
    "closed_form_prescheme",
    "verify_scheme_axioms",
    "verify_prescheme",
    "contracting_vectors",
    "is_contracting",
    "contractions",
    "rich_constant",
]

SCHEME_KINDS = ("trivial", "maxpart", "prodsub", "rover", "prescheme")


class Scheme:
    """An expansion scheme on a structure.

    ``declared_n_connected`` records whether the scheme is known to be
    n-connected for every n; it is metadata, not something the code proves.
    """

    def __init__(self, ss: SStructure, kind: str, table=None):
        self.ss = ss
        self.kind = kind
        self.table = table
        if kind == "rover" and ss.kind != "rover":
            raise ActionError("the Röver scheme needs the Röver structure")
        if kind == "prodsub" and ss.kind != "brin":
            raise ActionError("the product-subsets scheme needs Brin patterns")
        if kind == "maxpart" and not (ss.kind == "maximal" and ss.action.has_cup):
            raise ActionError("the maximal-partition scheme needs a maximal structure on a CUP action")
        if kind == "prescheme" and table is None:
            raise ActionError("a prescheme table is required")
        if kind not in SCHEME_KINDS:
            raise ActionError(f"unknown scheme kind {kind!r}")
        self.declared_n_connected = kind in ("maxpart", "prodsub", "rover") or (
            kind == "prescheme" and getattr(table, "declared_n_connected", False)
        )
        self._cache: dict = {}

    def __repr__(self) -> str:
        return f"Scheme({self.ss.action_id}, {self.kind})"

    @property
    def action(self):
        return self.ss.action

    def e_set(self, b: ClassPair) -> list:
        hit = self._cache.get(b)
        if hit is not None:
            return hit
        res = self._compute(b)
        res = sorted(set(res), key=lambda w: (len(w), sorted(str(p) for p in w)))
        self._cache[b] = res
        return res

    def _restricted(self, b: ClassPair, domains) -> frozenset:
        a = self.action
        return frozenset(make_class(self.ss, a.restrict(b.map, e)) for e in domains)

    def _compute(self, b: ClassPair) -> list:
        ss, a = self.ss, self.action
        single = frozenset([b])
        t = b.source
        if self.kind == "trivial":
            return [single]
        if self.kind == "maxpart":
            parts = a.split(t)
            return [single] + ([self._restricted(b, parts)] if len(parts) > 1 else [])
        if self.kind == "prodsub":
            out = [single]
            n = len(a.components)
            for r in range(1, n + 1):
                for coords in itertools.combinations(range(n), r):
                    parts = a.coordinate_split(t, set(coords))
                    if len(parts) > 1:
                        out.append(self._restricted(b, parts))
            return out
        if self.kind == "rover":
            w = t.word
            c = a.cone
            std = self._restricted(b, [c(w + "0"), c(w + "1")])
            twisted = a.compose(a.restrict(b.map, c(w + "0")), a.cmap(w + "0", w + "0", "a"))
            nonstd = frozenset([make_class(ss, twisted), make_class(ss, a.restrict(b.map, c(w + "1")))])
            deep = self._restricted(b, [c(w + "00"), c(w + "01"), c(w + "1")])
            return [single, std, nonstd, deep]
        # prescheme extension: E(b) = f . E'([id, T]) with f the canonical map of b
        members = self.table.members(t)
        out = []
        for m in members:
            pv = Pseudovertex(m, ss)
            out.append(act(b.map, pv).pairs)
        return out


def make_scheme(action, kind: str | None = None, structure: str | None = None) -> Scheme:
    ss = action if isinstance(action, SStructure) else make_structure(action, structure)
    if kind is None:
        kind = default_scheme_kind(ss)
    return _cached_scheme(ss.action_id, ss.kind, kind)


@lru_cache(maxsize=None)
def _cached_scheme(action_id: str, skind: str, kind: str) -> Scheme:
    return Scheme(make_structure(action_id, skind), kind)


def default_scheme_kind(ss: SStructure) -> str:
    return {"maximal": "maxpart", "rover": "rover", "brin": "prodsub"}[ss.kind]


def e_set(scheme: Scheme, b: ClassPair) -> list:
    return [Pseudovertex(w, scheme.ss) for w in scheme.e_set(b)]


class CorruptedScheme(Scheme):
    """Negative control: drops the member at position ``drop`` of every non-trivial set."""

    def __init__(self, base: Scheme, drop: int = 2):
        Scheme.__init__(self, base.ss, base.kind, base.table)
        self.base = base
        self.drop = drop

    def _compute(self, b):
        res = list(self.base.e_set(b))
        if len(res) > self.drop:
            del res[self.drop]
        return res


# ---------------------------------------------------------------------------
# Preschemes


class Prescheme:
    """A table from transversal domains to finite sets of pseudovertices (as class sets)."""

    def __init__(self, ss: SStructure, table: dict, declared_n_connected: bool = False):
        self.ss = ss
        self._table = {t: [frozenset(m) for m in ms] for t, ms in table.items()}
        self.declared_n_connected = declared_n_connected

    def members(self, t) -> list:
        if t not in self._table:
            raise ActionError(f"{t} is not in the prescheme table")
        return self._table[t]

    def domains(self):
        return list(self._table)


def closed_form_prescheme(scheme: Scheme) -> Prescheme:
    """The prescheme obtained by evaluating ``scheme`` on the transversal identities."""
    ss = scheme.ss
    table = {}
    for t in ss.transversal:
        table[t] = list(scheme.e_set(identity_class(ss, t)))
    return Prescheme(ss, table, scheme.declared_n_connected)


def verify_prescheme(p: Prescheme) -> list:
    """Check prescheme properties (1)-(4); returns a list of failure records."""
    ss = p.ss
    a = ss.action
    fails = []
    for t in p.domains():
        b = identity_class(ss, t)
        ms = p.members(t)
        single = frozenset([b])
        if single not in ms:
            fails.append({"property": 2, "domain": str(t)})
        for m in ms:
            if leq(Pseudovertex(single, ss), Pseudovertex(m, ss)) is not True:
                fails.append({"property": 1, "domain": str(t), "member": _txt(m)})
        for h in ss.group(t):
            img = {act(h, Pseudovertex(m, ss)).pairs for m in ms}
            if img != set(ms):
                fails.append({"property": 3, "domain": str(t), "map": str(h)})
        for w1, w2 in itertools.permutations(ms, 2):
            v1, v2 = Pseudovertex(w1, ss), Pseudovertex(w2, ss)
            if len(w1) < len(w2) and leq(v1, v2) is True:
                if not _prescheme_property4(p, v1, v2):
                    fails.append({"property": 4, "domain": str(t), "pair": [_txt(w1), _txt(w2)]})
    return fails


def _prescheme_property4(p: Prescheme, w1: Pseudovertex, w2: Pseudovertex) -> bool:
    """Each ``b_i`` of ``w1`` is carried to a transversal identity whose table holds the matching part of ``w2``."""
    ss = p.ss
    a = ss.action
    for b in w1.sorted_pairs():
        part = w2.sub(q for q in w2.pairs if a.contains(b.image, q.image))
        t = b.source
        g = a.invert(b.map)
        moved = act(g, part).pairs
        if moved not in p.members(t):
            return False
    return True


def extend_prescheme(p: Prescheme) -> Scheme:
    fails = verify_prescheme(p)
    if fails:
        raise ActionError(f"prescheme axioms fail: {fails[0]}")
    return Scheme(p.ss, "prescheme", p)


def _txt(pairs) -> str:
    return "{" + " ; ".join(sorted(str(q) for q in pairs)) + "}"


# ---------------------------------------------------------------------------
# E-expansions and E-chains


def e_expansions(scheme: Scheme, v: Pseudovertex):
    choices = [scheme.e_set(b) for b in v.sorted_pairs()]
    seen = set()
    for combo in itertools.product(*choices):
        pairs = frozenset().union(*combo)
        if pairs not in seen:
            seen.add(pairs)
            yield Pseudovertex(pairs, v.ss)


def is_e_expansion(scheme: Scheme, v: Pseudovertex, w: Pseudovertex) -> bool:
    """Whether ``w`` is an E-expansion of ``v``."""
    a = scheme.action
    used = 0
    for b in v.sorted_pairs():
        part = frozenset(q for q in w.pairs if a.contains(b.image, q.image))
        used += len(part)
        if part not in scheme.e_set(b):
            return False
    return used == w.rank


def is_e_chain(scheme: Scheme, chain) -> bool:
    chain = list(chain)
    if not chain:
        return False
    for x, y in zip(chain, chain[1:]):
        if not x.rank < y.rank:
            return False
    for i, x in enumerate(chain[1:], 1):
        if not is_e_expansion(scheme, chain[0], x):
            return False
        for y in chain[i + 1:]:
            if leq(x, y) is not True:
                return False
    return True


# ---------------------------------------------------------------------------
# Axiom verification


def _random_class(ss: SStructure, rng: random.Random) -> ClassPair:
    a = ss.action
    f = a.random_map(rng, None, 3)
    return make_class(ss, f)


def verify_scheme_axioms(scheme: Scheme, sample_budget: int = 200, seed: int = 0) -> list:
    """Sampled checks of the four scheme axioms.

    (1) ``{b} <= w`` for every ``w`` in ``E(b)``; (2) ``{b}`` lies in ``E(b)``;
    (3) invariance under sampled local maps; (4) comparable members of
    ``E(b)`` are E-expansions of one another.
    """
    rng = random.Random(seed)
    ss = scheme.ss
    a = ss.action
    names = ["1", "2", "3", "4"]
    report = {n: {"axiom": n, "status": "pass", "checked": 0} for n in names}

    def note(axiom, good, witness=None):
        rec = report[axiom]
        rec["checked"] += 1
        if not good and rec["status"] == "pass":
            rec["status"] = "fail"
            rec["witness"] = witness

    for _ in range(sample_budget):
        b = _random_class(ss, rng)
        es = scheme.e_set(b)
        single = frozenset([b])
        note("2", single in es, {"class": str(b)})
        vb = Pseudovertex(single, ss)
        for w in es:
            note("1", leq(vb, Pseudovertex(w, ss)) is True, {"class": str(b), "member": _txt(w)})
        # invariance under a random S-map defined on the image of b
        s = a.random_map(rng, b.image, 3)
        sb = act(s, vb)
        moved = {act(s, Pseudovertex(w, ss)).pairs for w in es}
        target = set(scheme.e_set(next(iter(sb.pairs))))
        note("3", moved == target, {"class": str(b), "map": str(s)})
        for w1, w2 in itertools.permutations(es, 2):
            v1, v2 = Pseudovertex(w1, ss), Pseudovertex(w2, ss)
            if len(w1) < len(w2) and leq(v1, v2) is True:
                note("4", is_e_expansion(scheme, v1, v2), {"class": str(b), "pair": [_txt(w1), _txt(w2)]})
    return [report[n] for n in names]


# ---------------------------------------------------------------------------
# Contracting vectors and contractions


def contracting_vectors(scheme: Scheme) -> list:
    ss = scheme.ss
    out = set()
    for t in ss.transversal:
        b = identity_class(ss, t)
        for w in scheme.e_set(b):
            if w != frozenset([b]):
                out.add(type_vector(Pseudovertex(w, ss)))
    return sorted(out)


def is_contracting(scheme: Scheme, p: Pseudovertex) -> bool:
    return type_vector(p) in set(contracting_vectors(scheme))


def _member_templates(scheme: Scheme) -> list:
    """``(type, member pairs)`` for every non-trivial member over the transversal."""
    cache = scheme.__dict__.setdefault("_templates", None)
    if cache is not None:
        return cache
    ss = scheme.ss
    out = []
    for t in ss.transversal:
        b = identity_class(ss, t)
        for w in scheme.e_set(b):
            if w != frozenset([b]):
                out.append((t, sorted(w, key=ClassPair.sort_key)))
    scheme._templates = out
    return out


def contractions(scheme: Scheme, v: Pseudovertex) -> list:
    """All ``(block, b)`` with ``block`` a sub-pseudovertex of ``v`` lying in ``E(b) - {{b}}``."""
    cache = scheme.__dict__.setdefault("_contr_cache", {})
    key = v.pairs
    hit = cache.get(key)
    if hit is not None:
        return hit
    ss = scheme.ss
    a = ss.action
    pairs = v.sorted_pairs()
    templates = _member_templates(scheme)
    sizes = sorted({len(m) for _, m in templates})
    found = set()
    for size in sizes:
        if size > len(pairs):
            continue
        for block in itertools.combinations(pairs, size):
            ims = [q.image for q in block]
            u = hull(a, ims)
            if u is None:
                continue
            if not is_partition(a, u, ims):
                continue
            utype = ss.domain_type_id(u)
            bset = frozenset(block)
            for t, member in templates:
                if len(member) != size or ss.domain_type_id(t) != utype:
                    continue
                for b in _solve_contraction(scheme, t, member, block):
                    if bset in scheme.e_set(b):
                        found.add((bset, b))
    res = sorted(found, key=lambda x: (sorted(str(q) for q in x[0]), str(x[1])))
    cache[key] = res
    return res


def _solve_contraction(scheme: Scheme, t, member, block) -> set:
    """Classes ``b = [f, t]`` with ``{[f n] : n in member}`` equal to ``block``."""
    ss = scheme.ss
    a = ss.action
    out = set()
    groups = [ss.group(n.source) for n in member]
    for perm in itertools.permutations(block):
        if any(n.type_id != q.type_id for n, q in zip(member, perm)):
            continue
        for ks in itertools.product(*groups):
            pieces = []
            for n, q, k in zip(member, perm, ks):
                pieces.append(a.compose(a.compose(q.map, k), a.invert(n.map)))
            if any(p.is_zero for p in pieces):
                continue
            f = merge_pieces(a, t, pieces)
            if f is not None:
                out.add(make_class(ss, f))
    return out


def _dominates(w, c) -> bool:
    return all(x >= y for x, y in zip(w, c))


def rich_constant(scheme_or_vectors, t: int | None = None, same_type_only: bool = False):
    """Least ``C1`` with every type vector of total at least ``C1`` above a contracting vector.

    With ``same_type_only`` only contracting vectors supported on one type
    are used, which gives the pigeonhole constant.  Returns None when no
    such constant exists.
    """
    if isinstance(scheme_or_vectors, Scheme):
        vecs = contracting_vectors(scheme_or_vectors)
        t = scheme_or_vectors.ss.type_count
    else:
        vecs = [tuple(v) for v in scheme_or_vectors]
        if t is None:
            t = len(vecs[0])
    if same_type_only:
        vecs = [c for c in vecs if sum(1 for x in c if x) == 1]
    bounds = []
    for i in range(t):
        axis = [c[i] for c in vecs if all(x == 0 for j, x in enumerate(c) if j != i) and c[i] > 0]
        if not axis:
            return None
        bounds.append(min(axis))
    worst = -1
    for w in itertools.product(*(range(m) for m in bounds)):
        if not any(_dominates(w, c) for c in vecs):
            worst = max(worst, sum(w))
    return worst + 1
