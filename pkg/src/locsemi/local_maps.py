"""Gluing S-maps: parents of domains, sibling merges and piecewise merges.

A family of S-maps defined on the pieces of a partition of ``D`` is the
restriction of a single S-map on ``D`` exactly when the pieces can be merged
bottom-up along maximal splits.  For the Röver action the merged twist is
found by a bounded search over short Grigorchuk words.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence

from .core_action import Action, ActionError, Domain, PartialMap, get_action
from .grigorchuk import grig_canonical, grig_section, reduced_words_upto
from .semigroups import ConeAction, HoughtonAction, ProductAction, TreeAction

__all__ = [
    "ROVER_LIFT_LENGTH",
    "parents",
    "hull",
    "merge_children",
    "merge_pieces",
    "rover_lift",
]

# longest Grigorchuk word tried when gluing two twisted halves
ROVER_LIFT_LENGTH = 9


def parents(act: Action, d: Domain) -> list:
    """Pairs ``(parent, siblings)`` where ``siblings`` is a maximal split of ``parent`` containing ``d``."""
    if isinstance(act, ProductAction):
        out = []
        for j, c in enumerate(act.components):
            for par, _ in parents(c, d.parts[j]):
                parts = list(d.parts)
                parts[j] = par
                big = act.brick(parts)
                out.append((big, act.coordinate_split(big, {j})))
        return out
    cand = None
    if isinstance(act, ConeAction) and d.word:
        cand = act.cone(d.word[:-1])
    elif isinstance(act, TreeAction):
        if d.kind == "Pt":
            cand = act.tree(d.word)
        elif d.word:
            cand = act.tree(d.word[:-1])
    elif isinstance(act, HoughtonAction):
        if d.kind == "P":
            cand = act.ray(d.ray, d.offset)
        elif d.offset > 1:
            cand = act.ray(d.ray, d.offset - 1)
    if cand is None:
        return []
    return [(cand, act.split(cand))]


def hull(act: Action, ds: Sequence[Domain]):
    """The smallest domain containing every member of ``ds``, or None."""
    ds = list(ds)
    if not ds:
        return None
    if isinstance(act, ProductAction):
        parts = []
        for j, c in enumerate(act.components):
            h = hull(c, [d.parts[j] for d in ds])
            if h is None:
                return None
            parts.append(h)
        return act.brick(parts)
    if len(set(ds)) == 1:
        return ds[0]
    if isinstance(act, (ConeAction, TreeAction)):
        words = [d.word for d in ds]
        pre = words[0]
        for w in words[1:]:
            k = 0
            while k < min(len(pre), len(w)) and pre[k] == w[k]:
                k += 1
            pre = pre[:k]
        if isinstance(act, ConeAction):
            return act.cone(pre)
        return act.tree(pre)
    if isinstance(act, HoughtonAction):
        if len({d.ray for d in ds}) != 1:
            return None
        return act.ray(ds[0].ray, min(d.offset for d in ds))
    return None


@lru_cache(maxsize=None)
def _rover_lift_table(max_len: int) -> dict:
    table: dict = {}
    for g in reduced_words_upto(max_len):
        s0, sw = grig_section(g, "0")
        s1, _ = grig_section(g, "1")
        key = (sw, grig_canonical(s0), grig_canonical(s1))
        table.setdefault(key, g)
    return table


def rover_lift(swap: bool, s0: str, s1: str, max_len: int = ROVER_LIFT_LENGTH):
    """A Grigorchuk word with the given level-one swap and sections, or None."""
    key = (swap, grig_canonical(s0), grig_canonical(s1))
    g = _rover_lift_table(max_len).get(key)
    return None if g is None else grig_canonical(g)


def merge_children(act: Action, parent: Domain, maps: Sequence[PartialMap]):
    """The S-map on ``parent`` restricting to ``maps`` on the pieces of a split, or None."""
    maps = list(maps)
    if any(m.is_zero for m in maps):
        return None
    if isinstance(act, ProductAction):
        diff = {j for m in maps for j in range(len(act.components))
                if m.source.parts[j] != parent.parts[j]}
        if len(diff) != 1:
            return None
        j = diff.pop()
        for i in range(len(act.components)):
            if i != j and len({m.parts[i] for m in maps}) != 1:
                return None
        comp = merge_children(act.components[j], parent.parts[j], [m.parts[j] for m in maps])
        if comp is None:
            return None
        parts = list(maps[0].parts)
        parts[j] = comp
        return act.tup(parts)
    if isinstance(act, ConeAction) and act.rover:
        by_src = {m.source.word[-1]: m for m in maps}
        if set(by_src) != {"0", "1"}:
            return None
        t0, t1 = by_src["0"].target.word, by_src["1"].target.word
        if not t0 or t0[:-1] != t1[:-1] or t0[-1] == t1[-1]:
            return None
        g = rover_lift(t0[-1] == "1", by_src["0"].twist, by_src["1"].twist)
        if g is None:
            return None
        return act.cmap(parent.word, t0[:-1], g)
    targets = [m.target for m in maps]
    for tpar, tsplit in parents(act, targets[0]):
        if set(tsplit) != set(targets):
            continue
        for cand in act.maps_onto(parent, tpar):
            if all(act.restrict(cand, m.source) == m for m in maps):
                return cand
    return None


def merge_pieces(act: Action, base: Domain, maps: Sequence[PartialMap]):
    """A single S-map on ``base`` whose restrictions are ``maps``, or None.

    The sources of ``maps`` must partition ``base``.
    """
    maps = [m for m in maps if not m.is_zero]
    for m in maps:
        if act.contains(m.source, base):
            return act.restrict(m, base)
    children = act.refine_toward(base, [m.source for m in maps])
    if len(children) < 2:
        return None
    merged = []
    for ch in children:
        sub = []
        for m in maps:
            x = act.intersect(m.source, ch)
            if not x.is_empty:
                sub.append(act.restrict(m, x))
        if not sub:
            return None
        r = merge_pieces(act, ch, sub)
        if r is None:
            return None
        merged.append(r)
    return merge_children(act, base, merged)
