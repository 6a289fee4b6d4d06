"""Inverse semigroup actions by partial bijections on symbolic sets.

Points of the acted-on set X are never materialized.  Every domain and
partial map has a finite textual description, and equality of values is
equality of canonical descriptions.

Domain shapes
    B:<w>      cone of infinite strings with prefix w
    T:<w>      rooted subtree of finite strings with prefix w
    Pt:<w>     a single tree vertex
    R:<j>,<k>  ray {(j, m) : m >= k}
    P:<j>,<k>  the ray point (j, k)
    (D1xD2..)  product brick
    EMPTY      the empty domain

Partial map shapes
    sig w1->w2            prefix replacement (cones or subtrees)
    rov[g] w1->w2         Grigorchuk-twisted prefix replacement
    tau p1->p2            point to point
    shift j:k->k'         ray translation
    tup(m1|m2|...)        componentwise map on product bricks
    ZERO                  the empty function
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

__all__ = [
    "ActionError",
    "Domain",
    "PartialMap",
    "Partition",
    "ActionDescriptor",
    "EMPTY",
    "ZERO",
    "word_text",
    "parse_word",
    "get_action",
    "compose",
    "invert",
    "restrict",
    "intersect_domains",
    "translate",
    "maximal_partition",
    "partition_difference",
    "verify_cup",
    "depth_of",
    "is_partition",
    "covers",
]


class ActionError(ValueError):
    """Raised for malformed or mismatched symbolic input."""


def word_text(w: str) -> str:
    return w if w else "e"


def parse_word(text: str) -> str:
    text = text.strip()
    if text in ("e", "", "ε"):
        return ""
    if not text.isdigit():
        raise ActionError(f"bad word {text!r}")
    return text


@dataclass(frozen=True)
class Domain:
    """A symbolic domain.  ``kind`` is one of B, T, Pt, R, P, X (product), E."""

    action_id: str
    kind: str
    word: str = ""
    ray: int = 0
    offset: int = 0
    parts: tuple = ()

    @property
    def is_empty(self) -> bool:
        return self.kind == "E"

    def __str__(self) -> str:
        k = self.kind
        if k == "E":
            return "EMPTY"
        if k in ("B", "T", "Pt"):
            return f"{k}:{word_text(self.word)}"
        if k in ("R", "P"):
            return f"{k}:{self.ray},{self.offset}"
        return "(" + "x".join(str(p) for p in self.parts) + ")"

    def __repr__(self) -> str:
        return f"Domain({self})"

    def sort_key(self):
        return (self.size(), str(self))

    def size(self) -> int:
        """Description size: word length, ray offset, or the component sum."""
        if self.kind in ("B", "T", "Pt"):
            return len(self.word)
        if self.kind in ("R", "P"):
            return self.offset - 1 + (1 if self.kind == "P" else 0)
        if self.kind == "X":
            return sum(p.size() for p in self.parts)
        return 0


def EMPTY(action_id: str) -> Domain:
    return Domain(action_id, "E")


@dataclass(frozen=True)
class PartialMap:
    """A bijection ``source -> target`` in the inverse semigroup S.

    ``twist`` is a canonical Grigorchuk word (Röver cone maps only) and
    ``parts`` holds the component maps of a product map.
    """

    action_id: str
    source: Domain
    target: Domain
    twist: str = ""
    parts: tuple = ()

    @property
    def is_zero(self) -> bool:
        return self.source.kind == "E"

    def __str__(self) -> str:
        s, t = self.source, self.target
        k = s.kind
        if k == "E":
            return "ZERO"
        if k in ("B", "T"):
            head = f"rov[{self.twist}]" if self.twist else "sig"
            return f"{head} {word_text(s.word)}->{word_text(t.word)}"
        if k == "Pt":
            return f"tau {word_text(s.word)}->{word_text(t.word)}"
        if k == "P":
            return f"tau {s.ray},{s.offset}->{t.ray},{t.offset}"
        if k == "R":
            return f"shift {s.ray}:{s.offset}->{t.offset}"
        return "tup(" + "|".join(str(p) for p in self.parts) + ")"

    def __repr__(self) -> str:
        return f"PartialMap({self})"

    def twist_length(self) -> int:
        if self.parts:
            return sum(p.twist_length() for p in self.parts)
        return len(self.twist)

    def sort_key(self):
        """Order used for canonical choices: shorter twists first, then text."""
        return (self.twist_length(), str(self))


def ZERO(action_id: str) -> PartialMap:
    e = EMPTY(action_id)
    return PartialMap(action_id, e, e)


@dataclass(frozen=True)
class Partition:
    """A finite partition of ``base`` into non-empty domains."""

    base: Domain
    pieces: frozenset

    def __post_init__(self):
        object.__setattr__(self, "pieces", frozenset(self.pieces))

    def sorted_pieces(self) -> list:
        return sorted(self.pieces, key=Domain.sort_key)

    def __str__(self) -> str:
        return "{" + " ; ".join(str(p) for p in self.sorted_pieces()) + "}"

    def __len__(self) -> int:
        return len(self.pieces)


@dataclass(frozen=True)
class ActionDescriptor:
    action_id: str
    root_partition: tuple
    has_cup: bool
    domain_kinds: tuple = field(default=())


# ---------------------------------------------------------------------------
# Registry

_REGISTRY: dict = {}


def get_action(action_id: str):
    """Return the registered action with the given id, building it on demand."""
    act = _REGISTRY.get(action_id)
    if act is None:
        from .semigroups import make_action

        act = make_action(action_id)
        _REGISTRY[action_id] = act
        _REGISTRY[act.action_id] = act
    return act


def _register(act) -> None:
    _REGISTRY.setdefault(act.action_id, act)


def _same_action(*objs) -> str:
    ids = {o.action_id for o in objs}
    if len(ids) != 1:
        raise ActionError(f"mismatched actions: {sorted(ids)}")
    return ids.pop()


# ---------------------------------------------------------------------------
# Base class shared by every registered action


class Action:
    """Abstract action.  Subclasses supply the shape-specific primitives."""

    action_id: str = ""
    has_cup: bool = True
    alphabet: int = 2

    # primitives -----------------------------------------------------------
    def root_partition(self) -> tuple:
        raise NotImplementedError

    def intersect(self, d1: Domain, d2: Domain) -> Domain:
        raise NotImplementedError

    def split(self, d: Domain) -> tuple:
        """The maximal partition of ``d`` (``(d,)`` when ``d`` is atomic)."""
        raise NotImplementedError

    def restrict(self, s: PartialMap, d: Domain) -> PartialMap:
        raise NotImplementedError

    def invert(self, s: PartialMap) -> PartialMap:
        raise NotImplementedError

    def compose_aligned(self, s: PartialMap, t: PartialMap) -> PartialMap:
        """``s o t`` when ``t.target == s.source``."""
        raise NotImplementedError

    def identity(self, d: Domain) -> PartialMap:
        raise NotImplementedError

    def domains_upto(self, depth: int) -> Iterator[Domain]:
        raise NotImplementedError

    def parse_domain(self, text: str) -> Domain:
        raise NotImplementedError

    def parse_map(self, text: str) -> PartialMap:
        raise NotImplementedError

    def random_domain(self, rng, depth: int = 3) -> Domain:
        raise NotImplementedError

    def random_map(self, rng, source: Domain | None = None, depth: int = 3) -> PartialMap:
        raise NotImplementedError

    def maps_onto(self, d1: Domain, d2: Domain) -> list:
        """Canonical S-maps from ``d1`` onto ``d2`` (empty when shapes differ)."""
        raise NotImplementedError

    def shape_type(self, d: Domain) -> int:
        raise NotImplementedError

    def type_count(self) -> int:
        raise NotImplementedError

    def transversal(self) -> tuple:
        raise NotImplementedError

    # derived ---------------------------------------------------------------
    def empty(self) -> Domain:
        return EMPTY(self.action_id)

    def zero(self) -> PartialMap:
        return ZERO(self.action_id)

    def descriptor(self) -> ActionDescriptor:
        return ActionDescriptor(self.action_id, self.root_partition(), self.has_cup)

    def contains(self, big: Domain, small: Domain) -> bool:
        if small.is_empty:
            return True
        return self.intersect(big, small) == small

    def disjoint(self, d1: Domain, d2: Domain) -> bool:
        return self.intersect(d1, d2).is_empty

    def is_splittable(self, d: Domain) -> bool:
        return len(self.split(d)) > 1

    def compose(self, s: PartialMap, t: PartialMap) -> PartialMap:
        if s.is_zero or t.is_zero:
            return self.zero()
        middle = self.intersect(t.target, s.source)
        if middle.is_empty:
            return self.zero()
        t2 = self.restrict_to_image(t, middle)
        s2 = self.restrict(s, middle)
        return self.compose_aligned(s2, t2)

    def restrict_to_image(self, s: PartialMap, d: Domain) -> PartialMap:
        return self.invert(self.restrict(self.invert(s), d))

    def translate(self, s: PartialMap, d: Domain) -> Domain:
        return self.restrict(s, d).target

    def parse_partition_pieces(self, texts: Iterable[str]) -> list:
        return [self.parse_domain(t) for t in texts]

    def partition_difference(self, big: Domain, small: Domain) -> list:
        """Peel ``big`` down to ``small`` along maximal partitions."""
        if not self.contains(big, small) or small.is_empty:
            raise ActionError(f"{small} is not a non-empty subdomain of {big}")
        out = []
        cur = big
        while cur != small:
            parts = self.split(cur)
            nxt = None
            for p in parts:
                if self.contains(p, small):
                    nxt = p
                else:
                    out.append(p)
            if nxt is None or len(parts) == 1:
                raise ActionError(f"cannot peel {big} down to {small}")
            cur = nxt
        return sorted(out, key=Domain.sort_key)

    def depth_of(self, small: Domain, big: Domain) -> int:
        if not self.contains(big, small) or small.is_empty:
            raise ActionError(f"{small} is not nested in {big}")
        n = 1
        cur = big
        while cur != small:
            nxt = [p for p in self.split(cur) if self.contains(p, small)]
            if len(nxt) != 1 or nxt[0] == cur:
                raise ActionError(f"cannot descend from {big} to {small}")
            cur = nxt[0]
            n += 1
        return n

    def refine_toward(self, base: Domain, pieces: Sequence[Domain]) -> tuple:
        """A proper partition of ``base`` that every proper piece refines or straddles."""
        parts = self.split(base)
        if len(parts) == 1:
            return ()
        return parts

    def domain_in_root(self, d: Domain) -> bool:
        return any(self.contains(r, d) for r in self.root_partition())


# ---------------------------------------------------------------------------
# Partition calculus


def covers(action: Action, base: Domain, pieces: Sequence[Domain]) -> bool:
    """Whether pairwise disjoint subdomains ``pieces`` of ``base`` cover it."""
    pieces = [p for p in pieces if not p.is_empty]
    if not pieces:
        return False
    if any(p == base for p in pieces):
        return len(pieces) == 1
    parts = action.refine_toward(base, pieces)
    if not parts:
        return False
    for part in parts:
        sub = [action.intersect(p, part) for p in pieces]
        if not covers(action, part, [q for q in sub if not q.is_empty]):
            return False
    return True


def is_partition(action: Action, base: Domain, pieces: Iterable[Domain]) -> bool:
    pieces = list(pieces)
    if not pieces or any(p.is_empty for p in pieces):
        return False
    if len(set(pieces)) != len(pieces):
        return False
    for p in pieces:
        if not action.contains(base, p):
            return False
    for p, q in itertools.combinations(pieces, 2):
        if not action.disjoint(p, q):
            return False
    return covers(action, base, pieces)


# ---------------------------------------------------------------------------
# Module-level operations


def compose(s: PartialMap, t: PartialMap) -> PartialMap:
    """``s o t``: first apply ``t``, then ``s``."""
    aid = _same_action(s, t)
    return get_action(aid).compose(s, t)


def invert(s: PartialMap) -> PartialMap:
    return get_action(s.action_id).invert(s)


def restrict(s: PartialMap, d: Domain) -> PartialMap:
    _same_action(s, d)
    act = get_action(s.action_id)
    if not act.contains(s.source, d):
        raise ActionError(f"{d} is not a subdomain of {s.source}")
    return act.restrict(s, d)


def intersect_domains(d1: Domain, d2: Domain) -> Domain:
    aid = _same_action(d1, d2)
    return get_action(aid).intersect(d1, d2)


def translate(s: PartialMap, d: Domain) -> Domain:
    return restrict(s, d).target


def maximal_partition(d: Domain) -> Partition:
    act = get_action(d.action_id)
    if d.kind == "X" and not act.has_cup:
        raise ActionError("maximal partitions of product bricks are not defined without CUP")
    return Partition(d, act.split(d))


def partition_difference(big: Domain, small: Domain) -> list:
    aid = _same_action(big, small)
    return get_action(aid).partition_difference(big, small)


def depth_of(small: Domain, big: Domain) -> int:
    aid = _same_action(small, big)
    return get_action(aid).depth_of(small, big)


def verify_cup(action: Action, depth_bound: int) -> dict:
    """Check both compact-ultrametric conditions over all domains of size <= depth_bound.

    Returns ``{"status": "pass"}`` or ``{"status": "fail", "witness": [...],
    "condition": ...}``.
    """
    doms = sorted(action.domains_upto(depth_bound), key=Domain.sort_key)
    for i, d1 in enumerate(doms):
        for d2 in doms[i + 1:]:
            m = action.intersect(d1, d2)
            if m.is_empty or m == d1 or m == d2:
                continue
            return {
                "status": "fail",
                "condition": "nested domains",
                "witness": [str(d1), str(d2)],
            }
    for d1 in doms:
        for d2 in doms:
            if d1 == d2 or not action.contains(d1, d2):
                continue
            try:
                rest = action.partition_difference(d1, d2)
            except ActionError:
                return {
                    "status": "fail",
                    "condition": "finite complementation",
                    "witness": [str(d1), str(d2)],
                }
            if not is_partition(action, d1, rest + [d2]):
                return {
                    "status": "fail",
                    "condition": "finite complementation",
                    "witness": [str(d1), str(d2)],
                }
    return {"status": "pass", "domains_checked": len(doms)}
