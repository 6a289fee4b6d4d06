import random

import pytest

from locsemi.core_action import ActionError, get_action, is_partition, verify_cup
from oracles import alphabet_of, compose_fn, domain_points, domain_pred, is_partition_of, map_fn

ACTIONS = ["V2", "V3", "QV", "H2", "H3", "ROVER", "prod(V2,V2)", "prod(Qbar1,V2)"]


def _pieces(a, d):
    if hasattr(a, "coordinate_split"):
        return a.coordinate_split(d, set(range(len(a.components))))
    return a.split(d)


def _points(d, depth=4):
    return domain_points(str(d), depth, alphabet_of(get_action(d.action_id)) or "01")


@pytest.mark.parametrize("aid", ACTIONS)
def test_text_round_trip(aid):
    a = get_action(aid)
    rng = random.Random(1)
    for _ in range(40):
        d = a.random_domain(rng, 3)
        assert a.parse_domain(str(d)) == d
        f = a.random_map(rng, None, 3)
        assert a.parse_map(str(f)) == f


@pytest.mark.parametrize("aid", ACTIONS)
def test_split_is_partition(aid):
    a = get_action(aid)
    rng = random.Random(2)
    for _ in range(30):
        d = a.random_domain(rng, 3)
        pieces = _pieces(a, d)
        assert is_partition(a, d, pieces)
        assert is_partition_of(str(d), [str(p) for p in pieces], 4, alphabet_of(a) or "01")


@pytest.mark.parametrize("aid", ACTIONS)
def test_maps_agree_with_oracle(aid):
    a = get_action(aid)
    rng = random.Random(3)
    for _ in range(30):
        f = a.random_map(rng, None, 2)
        g = a.random_map(rng, f.target, 2)
        fn = map_fn(str(f))
        tgt = domain_pred(str(f.target))
        for p in _points(f.source):
            assert tgt(fn(p))
        inv = map_fn(str(a.invert(f)))
        for p in _points(f.source):
            assert inv(fn(p)) == p
        h = a.compose(g, f)
        expect = compose_fn(str(g), str(f))
        got = map_fn(str(h))
        for p in _points(h.source):
            assert got(p) == expect(p)


@pytest.mark.parametrize("aid", ACTIONS)
def test_restrict_agrees_with_oracle(aid):
    a = get_action(aid)
    rng = random.Random(4)
    for _ in range(30):
        f = a.random_map(rng, None, 2)
        d = rng.choice(_pieces(a, f.source))
        r = a.restrict(f, d)
        assert r.source == d
        for p in _points(d):
            assert map_fn(str(r))(p) == map_fn(str(f))(p)


def test_intersection_and_disjointness_of_cones():
    a = get_action("V2")
    b0, b01, b1 = (a.parse_domain(t) for t in ("B:0", "B:01", "B:1"))
    assert a.intersect(b0, b01) == b01
    assert a.intersect(b0, b1).is_empty
    assert a.disjoint(b01, b1)


def test_restrict_outside_source_fails():
    a = get_action("V2")
    f = a.parse_map("sig 0->1")
    with pytest.raises(ActionError):
        a.restrict(f, a.parse_domain("B:1"))


def test_bad_text_is_rejected():
    a = get_action("V2")
    with pytest.raises(ActionError):
        a.parse_domain("B:2x")
    with pytest.raises(ActionError):
        get_action("nonsense")


@pytest.mark.parametrize("aid", ["V2", "QV", "H2", "ROVER"])
def test_cup_holds_for_ultrametric_actions(aid):
    assert verify_cup(get_action(aid), 3)["status"] == "pass"


def test_cup_fails_for_products_with_witness():
    res = verify_cup(get_action("prod(V2,V2)"), 2)
    assert res["status"] == "fail"
    assert len(res["witness"]) == 2


def test_products_have_no_maximal_partition():
    a = get_action("prod(V2,V2)")
    with pytest.raises(ActionError):
        a.split(a.parse_domain("(B:exB:e)"))
