"""Finite simplicial complexes, integer homology and descending links.

Descending links are computed inside the complex whose simplices are
E-chains: chains ``w1 < ... < wk`` in which every ``wi`` is an E-expansion
of ``w1``.  The E-predecessors of ``v`` are found by contracting disjoint
blocks of ``v``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .core_action import ActionError
from .expansion_scheme import Scheme, contractions, e_expansions, is_e_expansion
from .pseudovertex import (
    BudgetExceeded,
    ClassPair,
    Pseudovertex,
    identity_class,
    leq,
    make_pv,
    root_vertex,
)

__all__ = [
    "SimplicialComplex",
    "HomologyProfile",
    "BudgetExceeded",
    "homology",
    "is_homologically_n_connected",
    "is_connected",
    "predecessors",
    "complex_below",
    "descending_link",
    "downward_star",
    "partitioned_descending_link",
    "partitioned_downward_star",
    "restrict_to_parts",
    "simplicial_product",
    "verify_product_decomposition",
    "join",
    "nerve",
    "standard_cover",
    "filtration_level",
    "interval_complex",
    "smith_diagonal",
    "random_vertex",
    "partition_meet",
]

DEFAULT_BUDGET = 20_000


# ---------------------------------------------------------------------------
# Complexes


class SimplicialComplex:
    """Vertices are labels; simplices are sorted index tuples closed under faces."""

    def __init__(self, vertices: Sequence, facets: Iterable[Iterable[int]] = ()):
        self.vertices = list(vertices)
        self._index = {v: i for i, v in enumerate(self.vertices)}
        simplices = set()
        for f in facets:
            f = tuple(sorted(set(f)))
            if not f:
                continue
            if f in simplices:
                continue
            for r in range(1, len(f) + 1):
                simplices.update(itertools.combinations(f, r))
        for i in range(len(self.vertices)):
            simplices.add((i,))
        self.simplices = simplices

    @classmethod
    def from_labels(cls, vertices: Sequence, facets: Iterable[Iterable]) -> "SimplicialComplex":
        idx = {v: i for i, v in enumerate(vertices)}
        return cls(vertices, [[idx[x] for x in f] for f in facets])

    def __len__(self) -> int:
        return len(self.vertices)

    def __repr__(self) -> str:
        return f"SimplicialComplex({len(self.vertices)} vertices, dim {self.dim})"

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    @property
    def dim(self) -> int:
        return max((len(s) - 1 for s in self.simplices), default=-1)

    def faces(self, k: int) -> list:
        return sorted(s for s in self.simplices if len(s) == k + 1)

    def labeled_simplices(self) -> set:
        return {frozenset(self.vertices[i] for i in s) for s in self.simplices}

    def index(self, label) -> int:
        return self._index[label]

    def euler_characteristic(self) -> int:
        return sum((-1) ** (len(s) - 1) for s in self.simplices)

    def full_subcomplex(self, keep: Callable) -> "SimplicialComplex":
        labels = [v for v in self.vertices if keep(v)]
        keep_idx = {self._index[v] for v in labels}
        facets = [[self.vertices[i] for i in s] for s in self.simplices if set(s) <= keep_idx]
        return SimplicialComplex.from_labels(labels, facets)

    def to_json(self) -> dict:
        return {
            "vertices": [str(v) for v in self.vertices],
            "simplices": [list(s) for s in sorted(self.simplices, key=lambda s: (len(s), s))],
        }

    def to_dot(self, name: str = "K") -> str:
        lines = [f"graph {name} {{"]
        for i, v in enumerate(self.vertices):
            lab = str(v).replace('"', "'")
            lines.append(f'  v{i} [label="{lab}"];')
        for s in self.faces(1):
            lines.append(f"  v{s[0]} -- v{s[1]};")
        lines.append("}")
        return "\n".join(lines)


@dataclass
class HomologyProfile:
    """Reduced integer homology: ``betti[k]`` and ``torsion[k]`` for ``k <= max_dim``."""

    max_dim: int
    betti: list = field(default_factory=list)
    torsion: list = field(default_factory=list)
    empty: bool = False

    def is_trivial_upto(self, n: int) -> bool:
        return all(self.betti[k] == 0 and not self.torsion[k] for k in range(min(n, self.max_dim) + 1))

    def to_json(self) -> list:
        return [{"dim": k, "betti": self.betti[k], "torsion": list(self.torsion[k])}
                for k in range(self.max_dim + 1)]


def smith_diagonal(rows: list) -> list:
    """Non-zero Smith invariant factors of an integer matrix given as sparse row dicts."""
    rows = [dict(r) for r in rows if r]
    rows = [{c: v for c, v in r.items() if v} for r in rows]
    rows = [r for r in rows if r]
    diag = []
    while rows:
        best = None
        for i, r in enumerate(rows):
            for c, v in r.items():
                if best is None or abs(v) < best[0]:
                    best = (abs(v), i, c)
                    if best[0] == 1:
                        break
            if best[0] == 1:
                break
        _, i, c = best
        prow = rows[i]
        if prow[c] < 0:
            for k in prow:
                prow[k] = -prow[k]
        p = prow[c]
        clean = True
        for j, r in enumerate(rows):
            if j == i or c not in r:
                continue
            q = r[c] // p
            for k, v in prow.items():
                nv = r.get(k, 0) - q * v
                if nv:
                    r[k] = nv
                else:
                    r.pop(k, None)
            if c in r:
                clean = False
        rows = [r for j, r in enumerate(rows) if r or j == i]
        i = next(j for j, r in enumerate(rows) if r is prow)
        if not clean:
            continue
        rems = {k: v % p for k, v in prow.items() if k != c and v % p}
        if rems:
            prow.clear()
            prow[c] = p
            prow.update(rems)
            continue
        if p != 1:
            bad = None
            for j, r in enumerate(rows):
                if j != i and any(v % p for v in r.values()):
                    bad = r
                    break
            if bad is not None:
                prow.clear()
                prow[c] = p
                for k, v in bad.items():
                    prow[k] = prow.get(k, 0) + v
                continue
        diag.append(p)
        del rows[i]
    return diag


def _boundary_rows(K: SimplicialComplex, k: int, index_prev: dict) -> list:
    rows = []
    for s in K.faces(k):
        row = {}
        for j in range(len(s)):
            face = s[:j] + s[j + 1:]
            row[index_prev[face]] = row.get(index_prev[face], 0) + (-1) ** j
        rows.append(row)
    return rows


def homology(K: SimplicialComplex, max_dim: int) -> HomologyProfile:
    """Reduced homology ``H~_0 .. H~_max_dim`` by Smith normal form."""
    prof = HomologyProfile(max_dim)
    if K.is_empty:
        prof.empty = True
        prof.betti = [0] * (max_dim + 1)
        prof.torsion = [[] for _ in range(max_dim + 1)]
        return prof
    faces = [K.faces(k) for k in range(max_dim + 2)]
    index = [{s: i for i, s in enumerate(fs)} for fs in faces]
    ranks = [1]  # augmentation map to Z
    invariants = [[1]]
    for k in range(1, max_dim + 2):
        diag = smith_diagonal(_boundary_rows(K, k, index[k - 1]))
        ranks.append(len(diag))
        invariants.append(diag)
    for k in range(max_dim + 1):
        prof.betti.append(len(faces[k]) - ranks[k] - ranks[k + 1])
        prof.torsion.append(sorted(d for d in invariants[k + 1] if d > 1))
    return prof


def is_connected(K: SimplicialComplex) -> bool:
    if K.is_empty:
        return False
    parent = list(range(len(K.vertices)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for s in K.faces(1):
        a, b = find(s[0]), find(s[1])
        if a != b:
            parent[a] = b
    return len({find(i) for i in range(len(K.vertices))}) == 1


def is_homologically_n_connected(K: SimplicialComplex, n: int) -> bool:
    """Non-empty, path-connected, and ``H~_i = 0`` for ``1 <= i <= n``."""
    if n < -1:
        return True
    if K.is_empty:
        return False
    if n == -1:
        return True
    if not is_connected(K):
        return False
    if n == 0:
        return True
    prof = homology(K, n)
    return all(prof.betti[i] == 0 and not prof.torsion[i] for i in range(1, n + 1))


def join(*complexes: SimplicialComplex) -> SimplicialComplex:
    """Join; vertices are tagged ``(factor index, label)``."""
    verts = [(i, v) for i, K in enumerate(complexes) for v in K.vertices]
    choices = []
    for i, K in enumerate(complexes):
        choices.append([()] + [tuple((i, K.vertices[j]) for j in s) for s in K.simplices])
    facets = []
    for combo in itertools.product(*choices):
        f = [x for part in combo for x in part]
        if f:
            facets.append(f)
    return SimplicialComplex.from_labels(verts, facets)


def nerve(cover: Sequence[SimplicialComplex]) -> SimplicialComplex:
    """Nerve of a cover by subcomplexes sharing vertex labels."""
    vsets = [set(K.vertices) for K in cover]
    facets = []

    def grow(start: int, members: list, common: set):
        facets.append(list(members))
        for j in range(start, len(cover)):
            nxt = common & vsets[j]
            if nxt:
                grow(j + 1, members + [j], nxt)

    for i in range(len(cover)):
        if vsets[i]:
            grow(i + 1, [i], vsets[i])
    return SimplicialComplex(list(range(len(cover))), facets)


def simplicial_product(factors: Sequence) -> SimplicialComplex:
    """Simplicial product of complexes carrying vertex orders.

    Each factor is ``(complex, le)`` with ``le(x, y)`` the partial order on
    labels.  A chain of tuples is a simplex when every projection is one.
    """
    comps = [K for K, _ in factors]
    les = [le for _, le in factors]
    simp = [K.labeled_simplices() for K in comps]
    verts = list(itertools.product(*(K.vertices for K in comps)))

    def below(x, y):
        return x != y and all(le(a, b) for le, a, b in zip(les, x, y))

    def ok(chain):
        for i in range(len(comps)):
            if frozenset(t[i] for t in chain) not in simp[i]:
                return False
        return True

    up = {x: [y for y in verts if below(x, y)] for x in verts}
    facets = []

    def extend(chain):
        grew = False
        for y in up[chain[-1]]:
            nc = chain + [y]
            if ok(nc):
                grew = True
                extend(nc)
        if not grew:
            facets.append(list(chain))

    for x in verts:
        extend([x])
    return SimplicialComplex.from_labels(verts, facets)


# ---------------------------------------------------------------------------
# Descending links


def predecessors(scheme: Scheme, v: Pseudovertex, budget: int = DEFAULT_BUDGET) -> list:
    """All ``w != v`` such that ``v`` is an E-expansion of ``w``."""
    opts = contractions(scheme, v)
    out = set()
    count = [0]

    def rec(start: int, used: frozenset, chosen: list):
        if chosen:
            count[0] += 1
            if count[0] > budget:
                raise BudgetExceeded("predecessor enumeration budget exhausted")
            pairs = (v.pairs - used) | {b for _, b in chosen}
            out.add(Pseudovertex(frozenset(pairs), v.ss))
        for k in range(start, len(opts)):
            block, b = opts[k]
            if block & used:
                continue
            rec(k + 1, used | block, chosen + [(block, b)])

    rec(0, frozenset(), [])
    out.discard(v)
    return sorted(out, key=lambda w: (w.rank, str(w)))


def _chain_facets(scheme: Scheme, verts: list, budget: int) -> list:
    """Maximal E-chains among ``verts``."""
    ordered = sorted(verts, key=lambda w: (w.rank, str(w)))
    succ = {}
    for a in ordered:
        succ[a] = [c for c in ordered if c.rank > a.rank and is_e_expansion(scheme, a, c)]
    facets = []
    steps = [0]

    def chains(base, last, pool):
        ext = False
        for c in pool:
            if c.rank > last.rank and leq(last, c) is True:
                ext = True
                steps[0] += 1
                if steps[0] > budget:
                    raise BudgetExceeded("chain enumeration budget exhausted")
                chains(base + [c], c, [x for x in pool if x.rank > c.rank])
        if not ext:
            facets.append(base)

    for a in ordered:
        chains([a], a, succ[a])
    return facets


def _link_from(scheme: Scheme, verts: list, budget: int) -> SimplicialComplex:
    verts = sorted(verts, key=lambda w: (w.rank, str(w)))
    return SimplicialComplex.from_labels(verts, _chain_facets(scheme, verts, budget))


def descending_link(scheme: Scheme, v: Pseudovertex, budget: int = DEFAULT_BUDGET) -> SimplicialComplex:
    return _link_from(scheme, predecessors(scheme, v, budget), budget)


def downward_star(scheme: Scheme, v: Pseudovertex, budget: int = DEFAULT_BUDGET) -> SimplicialComplex:
    lk = descending_link(scheme, v, budget)
    verts = lk.vertices + [v]
    facets = [[lk.vertices[i] for i in s] + [v] for s in lk.simplices] + [[v]]
    return SimplicialComplex.from_labels(verts, facets)


def complex_below(scheme: Scheme, v: Pseudovertex, budget: int = DEFAULT_BUDGET) -> SimplicialComplex:
    """The full complex on all ``w <= v``, found by repeated contraction."""
    seen = {v}
    frontier = [v]
    while frontier:
        nxt = []
        for w in frontier:
            for u in predecessors(scheme, w, budget):
                if u not in seen:
                    seen.add(u)
                    nxt.append(u)
                    if len(seen) > budget:
                        raise BudgetExceeded("complex_below budget exhausted")
        frontier = nxt
    return _link_from(scheme, list(seen), budget)


def interval_complex(scheme: Scheme, a: Pseudovertex, b: Pseudovertex, budget: int = DEFAULT_BUDGET) -> SimplicialComplex:
    """E-chains among the pseudovertices ``w`` with ``a <= w <= b``."""
    below = complex_below(scheme, b, budget)
    keep = [w for w in below.vertices if leq(a, w) is True]
    return _link_from(scheme, keep, budget)


def _part_of(v: Pseudovertex, parts: Sequence[Pseudovertex]):
    a = v.ss.action
    owner = {}
    for i, p in enumerate(parts):
        for q in p.pairs:
            owner[q] = i
    missing = v.pairs - set(owner)
    if missing or sum(p.rank for p in parts) != v.rank:
        raise ActionError("parts do not partition the pseudovertex")

    def fits(w: Pseudovertex) -> bool:
        for q in w.pairs:
            below = {owner[x] for x in v.pairs if a.contains(q.image, x.image)}
            if len(below) != 1:
                return False
        return True

    return fits


def partition_meet(v: Pseudovertex, parts1: Sequence[Pseudovertex], parts2: Sequence[Pseudovertex]) -> list:
    """Common refinement of two partitions of ``v`` into sub-pseudovertices."""
    out = []
    for p in parts1:
        for q in parts2:
            common = p.pairs & q.pairs
            if common:
                out.append(v.sub(common))
    return sorted(out, key=str)


def partitioned_descending_link(scheme: Scheme, v: Pseudovertex, parts: Sequence[Pseudovertex],
                                budget: int = DEFAULT_BUDGET) -> SimplicialComplex:
    fits = _part_of(v, parts)
    return _link_from(scheme, [w for w in predecessors(scheme, v, budget) if fits(w)], budget)


def partitioned_downward_star(scheme: Scheme, v: Pseudovertex, parts: Sequence[Pseudovertex],
                              budget: int = DEFAULT_BUDGET) -> SimplicialComplex:
    lk = partitioned_descending_link(scheme, v, parts, budget)
    verts = lk.vertices + [v]
    facets = [[lk.vertices[i] for i in s] + [v] for s in lk.simplices] + [[v]]
    return SimplicialComplex.from_labels(verts, facets)


def restrict_to_parts(w: Pseudovertex, parts: Sequence[Pseudovertex]) -> tuple:
    """The tuple ``(w restricted to im(p_i))``."""
    a = w.ss.action
    out = []
    for p in parts:
        ims = [q.image for q in p.pairs]
        sub = [q for q in w.pairs if any(a.contains(q.image, x) for x in ims)
               and all(any(a.contains(y, x) for y in ims) for x in _covered(w, q, p))]
        out.append(w.sub(sub))
    return tuple(out)


def _covered(w, q, p):
    a = w.ss.action
    return [x.image for x in p.pairs if a.contains(q.image, x.image)]


def verify_product_decomposition(scheme: Scheme, v: Pseudovertex, parts: Sequence[Pseudovertex],
                                 budget: int = DEFAULT_BUDGET) -> dict:
    """Check the bijection ``w -> (w restricted to im p_i)`` between the partitioned
    downward star and the simplicial product of the stars of the parts."""
    star = partitioned_downward_star(scheme, v, parts, budget)
    factors = []
    for p in parts:
        st = downward_star(scheme, p, budget)
        factors.append((st, lambda x, y: leq(x, y) is True))
    prod = simplicial_product(factors)
    image = {w: restrict_to_parts(w, parts) for w in star.vertices}
    forward_vertices = set(image.values()) == set(prod.vertices) and len(set(image.values())) == len(image)
    star_simplices = {frozenset(image[x] for x in s) for s in star.labeled_simplices()}
    prod_simplices = prod.labeled_simplices()
    back = {t: w for w, t in image.items()}
    back_ok = all(
        all(t in back for t in s) and frozenset(back[t] for t in s) in star.labeled_simplices()
        for s in prod_simplices
    )
    return {
        "vertices": forward_vertices,
        "forward": star_simplices <= prod_simplices,
        "backward": back_ok and len(star_simplices) == len(prod_simplices),
        "star_size": len(star.simplices),
        "product_size": len(prod.simplices),
    }


def standard_cover(scheme: Scheme, v: Pseudovertex, budget: int = DEFAULT_BUDGET) -> list:
    """``(block, lk(v_{block, v - block}))`` for every contracting block with a non-empty link."""
    blocks = sorted({blk for blk, _ in contractions(scheme, v)}, key=lambda s: sorted(str(q) for q in s))
    out = []
    for blk in blocks:
        p = v.sub(blk)
        rest = v.minus(blk)
        parts = [p] + ([rest] if rest.rank else [])
        lk = partitioned_descending_link(scheme, v, parts, budget)
        if not lk.is_empty:
            out.append((p, lk))
    return out


def filtration_level(scheme: Scheme, Y: Sequence, n: int, budget: int = DEFAULT_BUDGET) -> tuple:
    """Vertices of rank at most ``n`` with image ``Y`` reachable by E-expansion from
    ``{[id_E, E] : E in Y}``, with their E-chains.

    Returns ``(complex, complete)``; ``complete`` is False when the budget stopped
    the enumeration.
    """
    ss = scheme.ss
    start = make_pv(ss, [identity_class(ss, d) for d in Y])
    seen = {start}
    frontier = [start]
    complete = True
    while frontier and complete:
        nxt = []
        for w in frontier:
            for u in e_expansions(scheme, w):
                if u.rank <= n and u not in seen:
                    seen.add(u)
                    nxt.append(u)
                    if len(seen) >= budget:
                        complete = False
                        break
        frontier = nxt
    verts = [w for w in seen if w.rank <= n]
    return _link_from(scheme, verts, budget * 10), complete


def random_vertex(scheme: Scheme, rng: random.Random, rank: int, start: Pseudovertex | None = None) -> Pseudovertex:
    """Grow ``start`` (default the root vertex) by random E-expansions of single pairs
    until it has the requested rank or no member fits."""
    v = root_vertex(scheme.ss) if start is None else start
    while v.rank < rank:
        moves = []
        for b in v.sorted_pairs():
            for m in scheme.e_set(b):
                if 1 < len(m) <= rank - v.rank + 1:
                    moves.append((b, m))
        if not moves:
            break
        b, m = rng.choice(moves)
        v = Pseudovertex((v.pairs - {b}) | m, v.ss)
    return v
