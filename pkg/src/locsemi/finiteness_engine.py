"""Type-vector calculus for the F_infinity and F_n criteria.

``stable_conn_ge`` is a one-sided certificate: it returns True when the
inductive criterion proves that every type vector above ``w`` has an
n-connected descending link, and None when the criterion is silent.
"""

from __future__ import annotations

import itertools
import sys
from dataclasses import asdict, dataclass, field

from .expansion_scheme import Scheme, contracting_vectors, rich_constant
from .pseudovertex import identity_class, root_vertex, type_vector

__all__ = [
    "ConnectivityTable",
    "FinitenessReport",
    "stable_conn_ge",
    "least_certified_vector",
    "achievable_type_vectors",
    "vertex_rank_bound",
    "f_infinity_checklist",
    "f_n_checklist",
]


def _leq(c, w) -> bool:
    return all(x <= y for x, y in zip(c, w))


def _clip_sub(w, cs) -> tuple:
    out = list(w)
    for c in cs:
        out = [x - y for x, y in zip(out, c)]
    return tuple(max(0, x) for x in out)


class ConnectivityTable:
    """Memo of certified pairs ``(w, n)``, keyed by the exact vector."""

    def __init__(self, vectors, t: int | None = None):
        self.vectors = sorted({tuple(c) for c in vectors})
        if not self.vectors:
            raise ValueError("no contracting vectors")
        self.t = len(self.vectors[0]) if t is None else t
        self.memo: dict = {}

    @classmethod
    def for_scheme(cls, scheme: Scheme) -> "ConnectivityTable":
        return cls(contracting_vectors(scheme), scheme.ss.type_count)

    def below(self, w) -> list:
        return [c for c in self.vectors if _leq(c, w)]

    def certified(self, w, n: int) -> bool:
        w = tuple(w)
        key = (w, n)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        self.memo[key] = False  # guards re-entry; the recursion only shrinks w or n
        res = self._direct(w, n)
        if not res:
            for i in range(self.t):
                if w[i] > 0:
                    smaller = w[:i] + (w[i] - 1,) + w[i + 1:]
                    if self.certified(smaller, n):
                        res = True
                        break
        self.memo[key] = res
        return res

    def _direct(self, w, n: int) -> bool:
        below = self.below(w)
        if not below:
            return False
        if n == -1:
            return True
        for c in below:
            if not self.certified(_clip_sub(w, [c]), n - 1):
                return False
        for j in range(2, n + 3):
            for cs in itertools.combinations_with_replacement(below, j):
                if not self.certified(_clip_sub(w, cs), n - j + 1):
                    return False
        return True


def stable_conn_ge(table: ConnectivityTable, w, n: int):
    """True when the criterion certifies stable connectivity length at least ``n``; else None."""
    if n < -1:
        return True
    limit = sys.getrecursionlimit()
    need = 50 * (sum(w) + n + 10)
    if need > limit:
        sys.setrecursionlimit(need)
    return True if table.certified(tuple(w), n) else None


def least_certified_vector(table: ConnectivityTable, n: int, cap: int):
    """A certified vector of least total at most ``cap``, ties broken lexicographically."""
    for total in range(cap + 1):
        for w in _vectors_of_total(table.t, total):
            if stable_conn_ge(table, w, n):
                return w
    return None


def _vectors_of_total(t: int, total: int):
    if t == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _vectors_of_total(t - 1, total - first):
            yield (first,) + rest


def _replacements(scheme: Scheme) -> list:
    """``(type, contracting vector)`` for each E-set member over the transversal."""
    ss = scheme.ss
    out = set()
    for i, d in enumerate(ss.transversal):
        b = identity_class(ss, d)
        for m in scheme.e_set(b):
            if m != frozenset([b]):
                counts = [0] * ss.type_count
                for q in m:
                    counts[q.type_id] += 1
                out.add((i, tuple(counts)))
    return sorted(out)


def achievable_type_vectors(scheme: Scheme, window: int) -> set:
    """Type vectors of total at most ``window`` reachable from the root vertex."""
    reps = _replacements(scheme)
    start = type_vector(root_vertex(scheme.ss))
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for w in frontier:
            for i, c in reps:
                if w[i] == 0:
                    continue
                u = tuple(x + y - (1 if k == i else 0) for k, (x, y) in enumerate(zip(w, c)))
                if sum(u) <= window and u not in seen:
                    seen.add(u)
                    nxt.append(u)
        frontier = nxt
    return seen


def vertex_rank_bound(scheme: Scheme, table: ConnectivityTable, n: int, window: int):
    """Least ``C`` such that every achievable type vector of total in ``[C, window]``
    is certified at level ``n``.  None when the top of the window fails."""
    vecs = achievable_type_vectors(scheme, window)
    failing = [sum(w) for w in vecs if not stable_conn_ge(table, w, n)]
    top = max(sum(w) for w in vecs)
    worst = max(failing, default=-1)
    if worst >= top:
        return None
    return worst + 1


@dataclass
class FinitenessReport:
    action: str
    scheme: str
    checks: dict = field(default_factory=dict)
    conclusion: str = "inconclusive"
    level: int | None = None
    C: int | None = None
    witness: list | None = None
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return asdict(self)


def _common_checks(scheme: Scheme) -> dict:
    ss = scheme.ss
    orders = [len(ss.group(d)) for d in ss.transversal]
    sizes = [len(scheme.e_set(identity_class(ss, d))) for d in ss.transversal]
    vecs = contracting_vectors(scheme)
    return {
        "finitely_many_types": {"pass": True, "types": ss.type_count},
        "structure_groups_finite": {
            "pass": True,
            "orders": orders,
            "C0": max((sum(c) for c in vecs), default=None),
        },
        "scheme_n_connected": {"pass": bool(scheme.declared_n_connected), "declared": True},
        "e_sets_finite": {"pass": True, "sizes": sizes},
        "contracting_vectors": [list(c) for c in vecs],
    }


def f_infinity_checklist(scheme: Scheme) -> FinitenessReport:
    """Hypotheses of the richness criterion for type F_infinity."""
    rep = FinitenessReport(scheme.ss.action.action_id, scheme.kind)
    rep.checks = _common_checks(scheme)
    c1 = rich_constant(scheme)
    rep.checks["rich_in_contractions"] = {"pass": c1 is not None, "C1": c1}
    rep.C = c1
    keys = ("finitely_many_types", "structure_groups_finite", "scheme_n_connected",
            "e_sets_finite", "rich_in_contractions")
    if all(rep.checks[k]["pass"] for k in keys):
        rep.conclusion = "F_infinity"
    else:
        rep.notes.append("not rich in contractions; try f_n_checklist")
    return rep


def f_n_checklist(scheme: Scheme, n: int, search_cap: int | None = None) -> FinitenessReport:
    """Certify level ``n`` of the stable connectivity recursion on a bounded search.

    ``C`` is the least total of a certified vector; ``vertex_rank_bound`` is
    the least rank above which every achievable vertex type is certified.
    """
    cap = 10 * max(n, 1) if search_cap is None else search_cap
    rep = FinitenessReport(scheme.ss.action.action_id, scheme.kind, level=n)
    rep.checks = _common_checks(scheme)
    vecs = contracting_vectors(scheme)
    if not vecs:
        rep.checks["stable_connectivity"] = {"pass": False, "reason": "no contracting vectors"}
        return rep
    table = ConnectivityTable(vecs, scheme.ss.type_count)
    w = least_certified_vector(table, n, cap)
    window = max(2 * cap, 4 * (n + 2) * max(sum(c) for c in vecs))
    bound = vertex_rank_bound(scheme, table, n, window) if w is not None else None
    rep.checks["stable_connectivity"] = {
        "pass": w is not None and bound is not None,
        "least_vector": None if w is None else list(w),
        "vertex_rank_bound": bound,
        "window": window,
        "search_cap": cap,
    }
    if w is not None:
        rep.C = sum(w)
        rep.witness = list(w)
    keys = ("finitely_many_types", "structure_groups_finite", "scheme_n_connected",
            "e_sets_finite", "stable_connectivity")
    if all(rep.checks[k]["pass"] for k in keys):
        rep.conclusion = f"F_{n}"
    else:
        rep.notes.append("the inductive criterion did not certify this level within the search cap")
    return rep
