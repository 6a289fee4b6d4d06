"""Registered actions: V_n, the tree actions behind QV, Houghton, Röver, products.

Action ids
    V<n>         cones over an n-letter alphabet (Higman-Thompson V_n), n >= 2
    Qbar<n>      vertices of the rooted n-ary tree (QV when n = 2), n >= 1
    QV           alias for Qbar2
    H<n>         Houghton action on n rays, n >= 1
    ROVER        binary cones with Grigorchuk twists
    prod(A,B,..) the product action with Rees-quotient composition
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

from .core_action import (
    Action,
    ActionError,
    Domain,
    PartialMap,
    _register,
    get_action,
    parse_word,
)
from .grigorchuk import (
    grig_apply,
    grig_canonical,
    grig_equal,
    grig_inverse,
    grig_is_identity,
    grig_multiply,
    grig_reduce,
    grig_section,
    grig_section_at,
)

__all__ = [
    "ConeAction",
    "TreeAction",
    "HoughtonAction",
    "ProductAction",
    "Sigma",
    "make_action",
    "grig_multiply",
    "grig_section",
    "grig_is_identity",
    "grig_equal",
    "rover_restrict",
]


def _random_word(rng, alphabet: int, max_len: int) -> str:
    n = rng.randint(0, max_len)
    return "".join(str(rng.randrange(alphabet)) for _ in range(n))


def _words_upto(alphabet: int, depth: int):
    for n in range(depth + 1):
        for tup in itertools.product(range(alphabet), repeat=n):
            yield "".join(map(str, tup))


# ---------------------------------------------------------------------------
# Cones: V_n and Röver


class ConeAction(Action):
    """Cones ``B:w`` of infinite strings, maps ``w1 u -> w2 g(u)``."""

    def __init__(self, alphabet: int = 2, rover: bool = False):
        if alphabet < 2:
            raise ActionError("V_n needs n >= 2")
        if rover and alphabet != 2:
            raise ActionError("the Röver action is binary")
        self.alphabet = alphabet
        self.rover = rover
        self.action_id = "ROVER" if rover else f"V{alphabet}"
        self.has_cup = True

    def cone(self, w: str) -> Domain:
        return Domain(self.action_id, "B", word=w)

    def cmap(self, w1: str, w2: str, twist: str = "") -> PartialMap:
        twist = grig_canonical(twist) if twist else ""
        if twist and not self.rover:
            raise ActionError("twisted maps exist only in the Röver action")
        return PartialMap(self.action_id, self.cone(w1), self.cone(w2), twist=twist)

    def root_partition(self) -> tuple:
        return (self.cone(""),)

    def intersect(self, d1, d2):
        if d1.is_empty or d2.is_empty:
            return self.empty()
        a, b = d1.word, d2.word
        if b.startswith(a):
            return d2
        if a.startswith(b):
            return d1
        return self.empty()

    def split(self, d):
        if d.is_empty:
            return ()
        return tuple(self.cone(d.word + str(i)) for i in range(self.alphabet))

    def restrict(self, s, d):
        if s.is_zero:
            return s
        if not d.word.startswith(s.source.word):
            raise ActionError(f"{d} is not inside {s.source}")
        u = d.word[len(s.source.word):]
        if s.twist:
            return self.cmap(d.word, s.target.word + grig_apply(s.twist, u),
                             grig_section_at(s.twist, u))
        return self.cmap(d.word, s.target.word + u)

    def invert(self, s):
        if s.is_zero:
            return s
        return self.cmap(s.target.word, s.source.word, grig_inverse(s.twist))

    def compose_aligned(self, s, t):
        return self.cmap(t.source.word, s.target.word, grig_reduce(s.twist + t.twist))

    def identity(self, d):
        return self.cmap(d.word, d.word)

    def maps_onto(self, d1, d2):
        if d1.kind == "B" and d2.kind == "B":
            return [self.cmap(d1.word, d2.word)]
        return []

    def shape_type(self, d):
        if d.kind != "B":
            raise ActionError(f"{d} is not a cone")
        return 0

    def type_count(self):
        return 1

    def transversal(self):
        return (self.cone(""),)

    def domains_upto(self, depth):
        for w in _words_upto(self.alphabet, depth):
            yield self.cone(w)

    def parse_domain(self, text):
        text = text.strip()
        if text == "EMPTY":
            return self.empty()
        m = re.fullmatch(r"B:(\w+)", text)
        if not m:
            raise ActionError(f"bad cone {text!r}")
        w = parse_word(m.group(1))
        self._check_word(w)
        return self.cone(w)

    def _check_word(self, w):
        if any(int(ch) >= self.alphabet for ch in w):
            raise ActionError(f"word {w!r} outside alphabet of size {self.alphabet}")

    def parse_map(self, text):
        text = text.strip()
        if text == "ZERO":
            return self.zero()
        m = re.fullmatch(r"(sig|rov\[([1abcd]*)\])\s+(\w+)\s*->\s*(\w+)", text)
        if not m:
            raise ActionError(f"bad cone map {text!r}")
        twist = m.group(2) or ""
        twist = "" if twist == "1" else twist
        if twist and not self.rover:
            raise ActionError("rov[...] maps need the Röver action")
        w1, w2 = parse_word(m.group(3)), parse_word(m.group(4))
        self._check_word(w1)
        self._check_word(w2)
        return self.cmap(w1, w2, grig_reduce(twist))

    def random_domain(self, rng, depth=3):
        return self.cone(_random_word(rng, self.alphabet, depth))

    def random_map(self, rng, source=None, depth=3):
        src = source if source is not None else self.random_domain(rng, depth)
        tgt = self.random_domain(rng, depth)
        twist = ""
        if self.rover:
            letters = []
            for _ in range(rng.randint(0, 4)):
                letters.append(rng.choice("abcd"))
            twist = grig_reduce("".join(letters))
        return self.cmap(src.word, tgt.word, twist)


def rover_restrict(m: PartialMap, d: Domain) -> PartialMap:
    """Restriction of a Röver cone map, computed by Grigorchuk sections."""
    act = get_action(m.action_id)
    if not isinstance(act, ConeAction):
        raise ActionError("rover_restrict needs a cone map")
    if not act.contains(m.source, d):
        raise ActionError(f"{d} is not nested in {m.source}")
    return act.restrict(m, d)


# ---------------------------------------------------------------------------
# Tree vertices: QV and its n-ary versions


class TreeAction(Action):
    """Vertices of the rooted n-ary tree: subtrees ``T:w`` and singletons ``Pt:w``."""

    def __init__(self, arity: int = 2):
        if arity < 1:
            raise ActionError("TreeBar(n) needs n >= 1")
        self.alphabet = arity
        self.action_id = f"Qbar{arity}"
        self.has_cup = True

    def tree(self, w):
        return Domain(self.action_id, "T", word=w)

    def point(self, w):
        return Domain(self.action_id, "Pt", word=w)

    def tmap(self, w1, w2):
        return PartialMap(self.action_id, self.tree(w1), self.tree(w2))

    def pmap(self, w1, w2):
        return PartialMap(self.action_id, self.point(w1), self.point(w2))

    def root_partition(self):
        return (self.tree(""),)

    def intersect(self, d1, d2):
        if d1.is_empty or d2.is_empty:
            return self.empty()
        if d1.kind == "Pt" and d2.kind == "Pt":
            return d1 if d1.word == d2.word else self.empty()
        if d1.kind == "T" and d2.kind == "T":
            if d2.word.startswith(d1.word):
                return d2
            if d1.word.startswith(d2.word):
                return d1
            return self.empty()
        t, p = (d1, d2) if d1.kind == "T" else (d2, d1)
        return p if p.word.startswith(t.word) else self.empty()

    def split(self, d):
        if d.kind == "Pt":
            return (d,)
        return tuple(self.tree(d.word + str(i)) for i in range(self.alphabet)) + (
            self.point(d.word),
        )

    def restrict(self, s, d):
        if s.is_zero:
            return s
        if not d.word.startswith(s.source.word) or (s.source.kind == "Pt" and d != s.source):
            raise ActionError(f"{d} is not inside {s.source}")
        u = d.word[len(s.source.word):]
        if d.kind == "T":
            return self.tmap(d.word, s.target.word + u)
        return self.pmap(d.word, s.target.word + u)

    def invert(self, s):
        if s.is_zero:
            return s
        return PartialMap(self.action_id, s.target, s.source)

    def compose_aligned(self, s, t):
        return PartialMap(self.action_id, t.source, s.target)

    def identity(self, d):
        return PartialMap(self.action_id, d, d)

    def maps_onto(self, d1, d2):
        if d1.kind == d2.kind and d1.kind in ("T", "Pt"):
            return [PartialMap(self.action_id, d1, d2)]
        return []

    def shape_type(self, d):
        if d.kind == "Pt":
            return 0
        if d.kind == "T":
            return 1
        raise ActionError(f"{d} is not a tree domain")

    def type_count(self):
        return 2

    def transversal(self):
        return (self.point(""), self.tree(""))

    def domains_upto(self, depth):
        for w in _words_upto(self.alphabet, depth):
            yield self.tree(w)
            yield self.point(w)

    def _check_word(self, w):
        if any(int(ch) >= self.alphabet for ch in w):
            raise ActionError(f"word {w!r} outside alphabet of size {self.alphabet}")

    def parse_domain(self, text):
        text = text.strip()
        if text == "EMPTY":
            return self.empty()
        m = re.fullmatch(r"(T|Pt):(\w+)", text)
        if not m:
            raise ActionError(f"bad tree domain {text!r}")
        w = parse_word(m.group(2))
        self._check_word(w)
        return self.tree(w) if m.group(1) == "T" else self.point(w)

    def parse_map(self, text):
        text = text.strip()
        if text == "ZERO":
            return self.zero()
        m = re.fullmatch(r"(sig|tau)\s+(\w+)\s*->\s*(\w+)", text)
        if not m:
            raise ActionError(f"bad tree map {text!r}")
        w1, w2 = parse_word(m.group(2)), parse_word(m.group(3))
        self._check_word(w1)
        self._check_word(w2)
        return self.tmap(w1, w2) if m.group(1) == "sig" else self.pmap(w1, w2)

    def random_domain(self, rng, depth=3):
        w = _random_word(rng, self.alphabet, depth)
        return self.tree(w) if rng.random() < 0.6 else self.point(w)

    def random_map(self, rng, source=None, depth=3):
        src = source if source is not None else self.random_domain(rng, depth)
        w = _random_word(rng, self.alphabet, depth)
        return PartialMap(self.action_id, src, Domain(self.action_id, src.kind, word=w))


# ---------------------------------------------------------------------------
# Houghton


class HoughtonAction(Action):
    """``n`` rays ``{1..n} x N``; rays shift along themselves, points move freely."""

    def __init__(self, rays: int = 2):
        if rays < 1:
            raise ActionError("Houghton(n) needs n >= 1")
        self.rays = rays
        self.action_id = f"H{rays}"
        self.has_cup = True

    def ray(self, j, k):
        return Domain(self.action_id, "R", ray=j, offset=k)

    def point(self, j, k):
        return Domain(self.action_id, "P", ray=j, offset=k)

    def root_partition(self):
        return tuple(self.ray(j, 1) for j in range(1, self.rays + 1))

    def intersect(self, d1, d2):
        if d1.is_empty or d2.is_empty or d1.ray != d2.ray:
            return self.empty()
        if d1.kind == "P" and d2.kind == "P":
            return d1 if d1.offset == d2.offset else self.empty()
        if d1.kind == "R" and d2.kind == "R":
            return d1 if d1.offset >= d2.offset else d2
        r, p = (d1, d2) if d1.kind == "R" else (d2, d1)
        return p if p.offset >= r.offset else self.empty()

    def split(self, d):
        if d.kind == "P":
            return (d,)
        return (self.point(d.ray, d.offset), self.ray(d.ray, d.offset + 1))

    def restrict(self, s, d):
        if s.is_zero:
            return s
        if not self.contains(s.source, d):
            raise ActionError(f"{d} is not inside {s.source}")
        if s.source.kind == "P":
            return s
        shift = s.target.offset - s.source.offset
        if d.kind == "R":
            return PartialMap(self.action_id, d, self.ray(d.ray, d.offset + shift))
        return PartialMap(self.action_id, d, self.point(d.ray, d.offset + shift))

    def invert(self, s):
        if s.is_zero:
            return s
        return PartialMap(self.action_id, s.target, s.source)

    def compose_aligned(self, s, t):
        return PartialMap(self.action_id, t.source, s.target)

    def identity(self, d):
        return PartialMap(self.action_id, d, d)

    def maps_onto(self, d1, d2):
        if d1.kind == "R" and d2.kind == "R" and d1.ray == d2.ray:
            return [PartialMap(self.action_id, d1, d2)]
        if d1.kind == "P" and d2.kind == "P":
            return [PartialMap(self.action_id, d1, d2)]
        return []

    def shape_type(self, d):
        if d.kind == "P":
            return 0
        if d.kind == "R":
            return d.ray
        raise ActionError(f"{d} is not a Houghton domain")

    def type_count(self):
        return self.rays + 1

    def transversal(self):
        return (self.point(1, 1),) + tuple(self.ray(j, 1) for j in range(1, self.rays + 1))

    def domains_upto(self, depth):
        for j in range(1, self.rays + 1):
            for k in range(1, depth + 2):
                yield self.ray(j, k)
                yield self.point(j, k)

    def parse_domain(self, text):
        text = text.strip()
        if text == "EMPTY":
            return self.empty()
        m = re.fullmatch(r"(R|P):(\d+),(\d+)", text)
        if not m:
            raise ActionError(f"bad Houghton domain {text!r}")
        j, k = int(m.group(2)), int(m.group(3))
        if not (1 <= j <= self.rays and k >= 1):
            raise ActionError(f"{text!r} is outside H{self.rays}")
        return self.ray(j, k) if m.group(1) == "R" else self.point(j, k)

    def parse_map(self, text):
        text = text.strip()
        if text == "ZERO":
            return self.zero()
        m = re.fullmatch(r"shift\s+(\d+):(\d+)\s*->\s*(\d+)", text)
        if m:
            j, k1, k2 = map(int, m.groups())
            return PartialMap(self.action_id, self.parse_domain(f"R:{j},{k1}"),
                              self.parse_domain(f"R:{j},{k2}"))
        m = re.fullmatch(r"tau\s+(\d+),(\d+)\s*->\s*(\d+),(\d+)", text)
        if m:
            j1, k1, j2, k2 = map(int, m.groups())
            return PartialMap(self.action_id, self.parse_domain(f"P:{j1},{k1}"),
                              self.parse_domain(f"P:{j2},{k2}"))
        raise ActionError(f"bad Houghton map {text!r}")

    def random_domain(self, rng, depth=3):
        j = rng.randint(1, self.rays)
        k = rng.randint(1, depth + 1)
        return self.ray(j, k) if rng.random() < 0.6 else self.point(j, k)

    def random_map(self, rng, source=None, depth=3):
        src = source if source is not None else self.random_domain(rng, depth)
        k = rng.randint(1, depth + 1)
        if src.kind == "R":
            return PartialMap(self.action_id, src, self.ray(src.ray, k))
        return PartialMap(self.action_id, src, self.point(rng.randint(1, self.rays), k))


# ---------------------------------------------------------------------------
# Products


class ProductAction(Action):
    """Componentwise action on ``X1 x ... x Xn`` with Rees-quotient composition."""

    def __init__(self, components):
        self.components = tuple(components)
        if len(self.components) < 1:
            raise ActionError("a product needs at least one component")
        self.action_id = "prod(" + ",".join(c.action_id for c in self.components) + ")"
        splittable = sum(1 for c in self.components if _has_proper_subdomain(c))
        self.has_cup = splittable <= 1
        self._counts = tuple(c.type_count() for c in self.components)

    def brick(self, parts) -> Domain:
        parts = tuple(parts)
        if any(p.is_empty for p in parts):
            return self.empty()
        return Domain(self.action_id, "X", parts=parts)

    def tup(self, parts) -> PartialMap:
        parts = tuple(parts)
        if any(p.is_zero for p in parts):
            return self.zero()
        return PartialMap(self.action_id, self.brick(p.source for p in parts),
                          self.brick(p.target for p in parts), parts=parts)

    def root_partition(self):
        roots = [c.root_partition() for c in self.components]
        return tuple(self.brick(ps) for ps in itertools.product(*roots))

    def intersect(self, d1, d2):
        if d1.is_empty or d2.is_empty:
            return self.empty()
        return self.brick(c.intersect(a, b) for c, a, b in zip(self.components, d1.parts, d2.parts))

    def coordinate_split(self, d, coords) -> tuple:
        """The partition of ``d`` splitting every coordinate in ``coords`` maximally."""
        pools = []
        for j, (c, p) in enumerate(zip(self.components, d.parts)):
            pools.append(c.split(p) if j in coords else (p,))
        return tuple(self.brick(ps) for ps in itertools.product(*pools))

    def split(self, d):
        if self.has_cup:
            for j, (c, p) in enumerate(zip(self.components, d.parts)):
                if c.is_splittable(p):
                    return self.coordinate_split(d, {j})
            return (d,)
        raise ActionError("maximal partitions are not defined for this product")

    def refine_toward(self, base, pieces):
        for j, c in enumerate(self.components):
            bj = base.parts[j]
            if any(p.parts[j] != bj for p in pieces) and c.is_splittable(bj):
                return self.coordinate_split(base, {j})
        return ()

    def partition_difference(self, big, small):
        if not self.contains(big, small) or small.is_empty:
            raise ActionError(f"{small} is not a non-empty subdomain of {big}")
        out = []
        prefix = []
        for j, c in enumerate(self.components):
            bj, sj = big.parts[j], small.parts[j]
            rest = c.partition_difference(bj, sj) if bj != sj else []
            for r in rest:
                out.append(self.brick(prefix + [r] + list(big.parts[j + 1:])))
            prefix.append(sj)
        return sorted(out, key=Domain.sort_key)

    def depth_of(self, small, big):
        if not self.contains(big, small):
            raise ActionError(f"{small} is not nested in {big}")
        return 1 + sum(c.depth_of(s, b) - 1 for c, s, b in zip(self.components, small.parts, big.parts))

    def restrict(self, s, d):
        if s.is_zero:
            return s
        return self.tup(c.restrict(m, p) for c, m, p in zip(self.components, s.parts, d.parts))

    def invert(self, s):
        if s.is_zero:
            return s
        return self.tup(c.invert(m) for c, m in zip(self.components, s.parts))

    def compose(self, s, t):
        if s.is_zero or t.is_zero:
            return self.zero()
        return self.tup(c.compose(a, b) for c, a, b in zip(self.components, s.parts, t.parts))

    def compose_aligned(self, s, t):
        return self.tup(c.compose_aligned(a, b) for c, a, b in zip(self.components, s.parts, t.parts))

    def identity(self, d):
        return self.tup(c.identity(p) for c, p in zip(self.components, d.parts))

    def maps_onto(self, d1, d2):
        pools = [c.maps_onto(a, b) for c, a, b in zip(self.components, d1.parts, d2.parts)]
        return [self.tup(ms) for ms in itertools.product(*pools)]

    def shape_type(self, d):
        idx = 0
        for c, p, n in zip(self.components, d.parts, self._counts):
            idx = idx * n + c.shape_type(p)
        return idx

    def type_count(self):
        out = 1
        for n in self._counts:
            out *= n
        return out

    def transversal(self):
        pools = [c.transversal() for c in self.components]
        bricks = [self.brick(ps) for ps in itertools.product(*pools)]
        return tuple(sorted(bricks, key=self.shape_type))

    def domains_upto(self, depth):
        pools = [list(c.domains_upto(depth)) for c in self.components]
        for ps in itertools.product(*pools):
            yield self.brick(ps)

    def parse_domain(self, text):
        text = text.strip()
        if text == "EMPTY":
            return self.empty()
        if not (text.startswith("(") and text.endswith(")")):
            raise ActionError(f"bad product domain {text!r}")
        items = text[1:-1].split("x")
        if len(items) != len(self.components):
            raise ActionError(f"{text!r} has the wrong number of components")
        return self.brick(c.parse_domain(t) for c, t in zip(self.components, items))

    def parse_map(self, text):
        text = text.strip()
        if text == "ZERO":
            return self.zero()
        m = re.fullmatch(r"tup\((.*)\)", text)
        if not m:
            raise ActionError(f"bad product map {text!r}")
        items = m.group(1).split("|")
        if len(items) != len(self.components):
            raise ActionError(f"{text!r} has the wrong number of components")
        return self.tup(c.parse_map(t) for c, t in zip(self.components, items))

    def random_domain(self, rng, depth=3):
        return self.brick(c.random_domain(rng, depth) for c in self.components)

    def random_map(self, rng, source=None, depth=3):
        if source is None:
            source = self.random_domain(rng, depth)
        return self.tup(c.random_map(rng, p, depth) for c, p in zip(self.components, source.parts))


def _has_proper_subdomain(act: Action) -> bool:
    return any(act.is_splittable(r) for r in act.root_partition())


# ---------------------------------------------------------------------------
# Bieri-Sach style signatures


@dataclass(frozen=True)
class Sigma:
    """A signature ``(ā1, ..., āj, a_{j+1}, ..., a_k)``.

    Barred entries give tree actions ``Qbar<a>`` and unbarred ones give
    ``V<a>``.
    """

    barred: tuple
    unbarred: tuple

    def __post_init__(self):
        if not self.barred and not self.unbarred:
            raise ActionError("a signature needs at least one entry")
        if any(a < 1 for a in self.barred) or any(a < 2 for a in self.unbarred):
            raise ActionError("barred entries must be >= 1 and unbarred entries >= 2")
        object.__setattr__(self, "barred", tuple(sorted(self.barred)))
        object.__setattr__(self, "unbarred", tuple(sorted(self.unbarred)))

    def action_id(self) -> str:
        parts = [f"Qbar{a}" for a in self.barred] + [f"V{a}" for a in self.unbarred]
        return "prod(" + ",".join(parts) + ")"

    def pigeonhole_constant(self):
        """``(a_{j+1} - 1) 2^j + 1``, or ``None`` when every entry is barred."""
        if not self.unbarred:
            return None
        return (self.unbarred[0] - 1) * 2 ** len(self.barred) + 1


# ---------------------------------------------------------------------------
# Registry entry point


def _split_top(text: str) -> list:
    out, depth, cur = [], 0, []
    for ch in text:
        if ch == "," and depth == 0:
            out.append("".join(cur))
            cur = []
            continue
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        cur.append(ch)
    out.append("".join(cur))
    return [s.strip() for s in out]


def make_action(spec: str) -> Action:
    """Build (or fetch) an action from its id string."""
    from .core_action import _REGISTRY

    spec = spec.strip()
    if spec in _REGISTRY:
        return _REGISTRY[spec]
    m = re.fullmatch(r"(?:V|V\()(\d+)\)?", spec)
    if m:
        act = ConeAction(int(m.group(1)))
    elif spec in ("QV", "TreeBar(2)"):
        act = get_action("Qbar2")
    elif re.fullmatch(r"(?:Qbar|TreeBar\()(\d+)\)?", spec):
        act = TreeAction(int(re.findall(r"\d+", spec)[0]))
    elif re.fullmatch(r"(?:H|Houghton\()(\d+)\)?", spec):
        act = HoughtonAction(int(re.findall(r"\d+", spec)[0]))
    elif spec.upper() == "ROVER":
        act = ConeAction(2, rover=True)
    elif re.fullmatch(r"(?:prod|Product)\((.*)\)", spec):
        inner = re.fullmatch(r"(?:prod|Product)\((.*)\)", spec).group(1)
        act = ProductAction([get_action(s) for s in _split_top(inner)])
    else:
        raise ActionError(f"unknown action {spec!r}")
    if act.action_id in _REGISTRY:
        return _REGISTRY[act.action_id]
    _register(act)
    return act
