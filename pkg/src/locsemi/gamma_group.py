"""Elements of the locally determined group and of the semigroup of local maps.

An element is a finite list of S-maps with pairwise disjoint sources and
pairwise disjoint targets.  It lies in the group when both unions are all
of ``X``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core_action import Action, ActionError, Domain, PartialMap, get_action, is_partition
from .local_maps import merge_children, parents

__all__ = [
    "GammaElement",
    "gamma_from_pieces",
    "gamma_identity",
    "gamma_compose",
    "gamma_invert",
    "gamma_equal",
    "gamma_canonical",
    "parse_gamma",
]


@dataclass(frozen=True)
class GammaElement:
    action_id: str
    pieces: tuple

    def __str__(self) -> str:
        return "{" + " ; ".join(str(p) for p in self.pieces) + "}"

    def __repr__(self) -> str:
        return f"GammaElement({self})"

    @property
    def action(self) -> Action:
        return get_action(self.action_id)

    def domain_pieces(self) -> list:
        return [p.source for p in self.pieces]

    def image_pieces(self) -> list:
        return [p.target for p in self.pieces]

    def is_group_element(self) -> bool:
        return _covers_x(self.action, self.domain_pieces()) and _covers_x(self.action, self.image_pieces())

    def to_json(self) -> list:
        return [str(p) for p in self.pieces]


def _covers_x(act: Action, ds) -> bool:
    for root in act.root_partition():
        inside = [d for d in ds if act.contains(root, d)]
        if not is_partition(act, root, inside):
            return False
    return all(any(act.contains(r, d) for r in act.root_partition()) for d in ds)


def _sort(pieces) -> tuple:
    return tuple(sorted(set(pieces), key=lambda p: (p.source.sort_key(), p.sort_key())))


def _check_disjoint(act: Action, ds, what: str) -> None:
    for i, a in enumerate(ds):
        for b in ds[i + 1:]:
            if not act.disjoint(a, b):
                raise ActionError(f"{what} {a} and {b} overlap")


def gamma_from_pieces(pieces) -> GammaElement:
    pieces = [p for p in pieces if not p.is_zero]
    if not pieces:
        raise ActionError("an element needs at least one piece")
    aid = pieces[0].action_id
    act = get_action(aid)
    _check_disjoint(act, [p.source for p in pieces], "sources")
    _check_disjoint(act, [p.target for p in pieces], "targets")
    return GammaElement(aid, _sort(pieces))


def gamma_identity(action_id: str, domains=None) -> GammaElement:
    act = get_action(action_id)
    domains = act.root_partition() if domains is None else domains
    return GammaElement(action_id, _sort(act.identity(d) for d in domains))


def parse_gamma(action_id: str, text: str) -> GammaElement:
    act = get_action(action_id)
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise ActionError(f"bad element text {text!r}")
    items = [t for t in text[1:-1].split(";") if t.strip()]
    return gamma_from_pieces(act.parse_map(t) for t in items)


def gamma_canonical(g: GammaElement) -> GammaElement:
    """Merge sibling pieces until no maximal split can be undone."""
    act = g.action
    pieces = {p.source: p for p in g.pieces}
    changed = True
    while changed:
        changed = False
        for src in sorted(pieces, key=Domain.sort_key, reverse=True):
            if src not in pieces:
                continue
            for par, sibs in parents(act, src):
                if not all(s in pieces for s in sibs):
                    continue
                m = merge_children(act, par, [pieces[s] for s in sibs])
                if m is None:
                    continue
                for s in sibs:
                    del pieces[s]
                pieces[par] = m
                changed = True
                break
    return GammaElement(g.action_id, _sort(pieces.values()))


def gamma_compose(g: GammaElement, h: GammaElement) -> GammaElement:
    """``g ∘ h``: apply ``h`` first."""
    if g.action_id != h.action_id:
        raise ActionError("elements of different actions")
    act = g.action
    out = []
    for b in h.pieces:
        for a in g.pieces:
            c = act.compose(a, b)
            if not c.is_zero:
                out.append(c)
    if not out:
        raise ActionError("the composite is empty")
    return gamma_canonical(GammaElement(g.action_id, _sort(out)))


def gamma_invert(g: GammaElement) -> GammaElement:
    act = g.action
    return gamma_canonical(GammaElement(g.action_id, _sort(act.invert(p) for p in g.pieces)))


def gamma_equal(g: GammaElement, h: GammaElement) -> bool:
    """Compare on the common refinement of the two domain partitions."""
    if g.action_id != h.action_id:
        return False
    act = g.action
    for x, y in ((g, h), (h, g)):
        for p in x.pieces:
            inside = [act.intersect(p.source, q.source) for q in y.pieces]
            if not is_partition(act, p.source, [d for d in inside if not d.is_empty]):
                return False
    for p in g.pieces:
        for q in h.pieces:
            d = act.intersect(p.source, q.source)
            if d.is_empty:
                continue
            if act.restrict(p, d) != act.restrict(q, d):
                return False
    return True
