import random

import pytest

from locsemi.core_action import ActionError, get_action
from locsemi.gamma_group import (
    gamma_canonical,
    gamma_compose,
    gamma_equal,
    gamma_identity,
    gamma_invert,
    parse_gamma,
)
from locsemi.local_maps import ROVER_LIFT_LENGTH, hull, merge_children, merge_pieces, parents, rover_lift
from oracles import all_strings, map_fn


def _eval(g, p):
    for piece in g.pieces:
        y = map_fn(str(piece))(p)
        if y is not None:
            return y
    return None


def test_parse_and_group_membership():
    g = parse_gamma("V2", "{sig 0->1 ; sig 1->0}")
    assert g.is_group_element()
    h = parse_gamma("V2", "{sig 0->1}")
    assert not h.is_group_element()
    with pytest.raises(ActionError):
        parse_gamma("V2", "{sig 0->1 ; sig 00->0}")


def test_compose_matches_oracle():
    g = parse_gamma("V2", "{sig 0->1 ; sig 10->00 ; sig 11->01}")
    h = parse_gamma("V2", "{sig 00->0 ; sig 01->11 ; sig 1->10}")
    gh = gamma_compose(g, h)
    for x in all_strings(6):
        assert _eval(gh, x) == _eval(g, _eval(h, x))


def test_inverse_and_identity():
    g = parse_gamma("ROVER", "{rov[b] 0->1 ; sig 1->0}")
    e = gamma_identity("ROVER")
    assert gamma_equal(gamma_compose(g, gamma_invert(g)), e)
    for x in all_strings(7):
        assert _eval(gamma_invert(g), _eval(g, x)) == x


def test_canonical_merges_siblings():
    g = parse_gamma("V2", "{sig 0->0 ; sig 1->1}")
    assert str(gamma_canonical(g)) == "{sig e->e}"
    r = parse_gamma("ROVER", "{rov[a] 0->0 ; rov[c] 1->1}")
    c = gamma_canonical(r)
    assert len(c.pieces) == 1
    for x in all_strings(7):
        assert _eval(c, x) == _eval(r, x)


def test_rover_lift_table_covers_generators():
    assert rover_lift(False, "a", "c") == "b"
    assert rover_lift(True, "", "") == "a"
    assert ROVER_LIFT_LENGTH == 9


def test_merge_pieces_generic():
    a = get_action("V2")
    base = a.parse_domain("B:0")
    maps = [a.parse_map(t) for t in ["sig 00->10", "sig 010->110", "sig 011->111"]]
    m = merge_pieces(a, base, maps)
    assert str(m) == "sig 0->1"
    assert merge_pieces(a, base, [a.parse_map("sig 00->11"), a.parse_map("sig 01->10")]) is None


def test_merge_product_children():
    a = get_action("prod(V2,V2)")
    par = a.parse_domain("(B:exB:e)")
    kids = [a.parse_map("tup(sig 0->0|sig e->e)"), a.parse_map("tup(sig 1->1|sig e->e)")]
    assert str(merge_children(a, par, kids)) == "tup(sig e->e|sig e->e)"


def test_parents_and_hull():
    a = get_action("H2")
    d = a.parse_domain("R:1,3")
    ((par, sibs),) = parents(a, d)
    assert str(par) == "R:1,2" and d in sibs
    v = get_action("V2")
    assert str(hull(v, [v.parse_domain("B:010"), v.parse_domain("B:011")])) == "B:01"


def test_random_elements_compose_associatively():
    rng = random.Random(5)
    gens = [parse_gamma("V2", t) for t in ["{sig 0->1 ; sig 1->0}",
                                           "{sig 0->00 ; sig 10->01 ; sig 11->1}",
                                           "{sig 00->0 ; sig 01->10 ; sig 1->11}"]]
    for _ in range(10):
        f, g, h = (rng.choice(gens) for _ in range(3))
        assert gamma_equal(gamma_compose(f, gamma_compose(g, h)), gamma_compose(gamma_compose(f, g), h))
