"""Word arithmetic for the first Grigorchuk group.

Words are strings over ``abcd`` read as compositions acting right to left,
so ``"ab"`` means: apply ``b`` first, then ``a``.  The generators act on
binary strings by

    a(x1 x2 ...)  = x̄1 x2 ...
    b(0x) = 0 a(x),   b(1x) = 1 c(x)
    c(0x) = 0 a(x),   c(1x) = 1 d(x)
    d(0x) = 0 x,      d(1x) = 1 b(x)
"""

from __future__ import annotations

from functools import lru_cache

_KLEIN = {
    ("b", "c"): "d",
    ("c", "b"): "d",
    ("b", "d"): "c",
    ("d", "b"): "c",
    ("c", "d"): "b",
    ("d", "c"): "b",
}

# section of a generator at a level-one vertex, and whether it swaps level one
_SECTIONS = {
    "a": ("", ""),
    "b": ("a", "c"),
    "c": ("a", "d"),
    "d": ("", "b"),
}


def grig_reduce(word: str) -> str:
    """Free reduction with a² = 1 and the Klein four-group on {1, b, c, d}."""
    out: list = []
    for ch in word:
        if ch == "1":
            continue
        if ch not in "abcd":
            raise ValueError(f"bad Grigorchuk letter {ch!r}")
        if out and out[-1] == ch:
            out.pop()
        elif out and ch != "a" and out[-1] != "a":
            out.append(_KLEIN[(out.pop(), ch)])
        else:
            out.append(ch)
    return "".join(out)


def grig_inverse(word: str) -> str:
    return word[::-1]


def grig_multiply(g: str, h: str) -> str:
    """Reduced form of ``g h``."""
    return grig_reduce(g + h)


def _apply_letter(ch: str, x: str) -> str:
    if not x:
        return x
    state = ch
    out = []
    for i, bit in enumerate(x):
        if state == "":
            out.append(x[i:])
            break
        if state == "a":
            out.append("1" if bit == "0" else "0")
            out.append(x[i + 1:])
            break
        out.append(bit)
        state = _SECTIONS[state][int(bit)]
    return "".join(out)


def grig_apply(word: str, x: str) -> str:
    """Image of the finite binary string ``x`` under ``word``."""
    for ch in reversed(word):
        x = _apply_letter(ch, x)
    return x


@lru_cache(maxsize=None)
def grig_section(word: str, bit: str) -> tuple:
    """Return ``(word|_bit reduced, swaps_level_one)``."""
    secs = []
    y = bit
    for ch in reversed(word):
        if ch == "a":
            y = "1" if y == "0" else "0"
        else:
            secs.append(_SECTIONS[ch][int(y)])
    # secs was collected innermost-first; the section word is read left to right
    swaps = word.count("a") % 2 == 1
    return grig_reduce("".join(reversed(secs))), swaps


def grig_section_at(word: str, path: str) -> str:
    """Section of ``word`` at the finite vertex ``path``."""
    w = word
    for bit in path:
        w, _ = grig_section(w, bit)
    return w


@lru_cache(maxsize=None)
def grig_is_identity(word: str) -> bool:
    """Contracting recursion: identity iff no reachable section swaps level one."""
    start = grig_reduce(word)
    seen = {start}
    stack = [start]
    while stack:
        w = stack.pop()
        if w.count("a") % 2 == 1:
            return False
        for bit in "01":
            s, _ = grig_section(w, bit)
            if s not in seen:
                seen.add(s)
                stack.append(s)
    return True


def grig_equal(g: str, h: str) -> bool:
    return grig_is_identity(grig_reduce(g + grig_inverse(h)))


@lru_cache(maxsize=None)
def _reduced_words(length: int) -> tuple:
    """All reduced words of the given length, in lexicographic order."""
    if length == 0:
        return ("",)
    out = []
    for start_a in (True, False):
        pools = []
        for i in range(length):
            is_a = (i % 2 == 0) == start_a
            pools.append("a" if is_a else "bcd")
        stack = [""]
        for pool in pools:
            stack = [w + ch for w in stack for ch in pool]
        out.extend(stack)
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def grig_canonical(word: str) -> str:
    """Shortlex-least reduced word representing the same group element."""
    w = grig_reduce(word)
    # no non-trivial reduced word of length < 8 is the identity, so two
    # distinct reduced words of length <= 3 never coincide
    if len(w) <= 3:
        return w
    for length in range(len(w) + 1):
        for cand in _reduced_words(length):
            if cand == w or grig_equal(cand, w):
                return cand
    return w


def reduced_words_upto(length: int):
    for n in range(length + 1):
        yield from _reduced_words(n)


KLEIN_GROUP = ("", "b", "c", "d")
