import itertools
import random

import pytest

from locsemi.complex_topology import SimplicialComplex, is_homologically_n_connected
from locsemi.core_action import ActionError
from locsemi.expansion_scheme import (
    CorruptedScheme,
    _random_class,
    closed_form_prescheme,
    contracting_vectors,
    contractions,
    e_expansions,
    extend_prescheme,
    is_e_expansion,
    make_scheme,
    rich_constant,
    verify_prescheme,
    verify_scheme_axioms,
)
from locsemi.pseudovertex import Pseudovertex, identity_class, leq, parse_pv, root_vertex, simple_expansions
from locsemi.s_structure import make_structure

SCHEMES = ["V2", "QV", "ROVER", "prod(V2,V2)", "H2"]


@pytest.mark.parametrize("aid", SCHEMES)
def test_scheme_axioms(aid):
    res = verify_scheme_axioms(make_scheme(aid), 40, seed=3)
    assert all(r["status"] == "pass" for r in res), res


def test_corrupted_scheme_fails():
    bad = CorruptedScheme(make_scheme("ROVER"))
    res = verify_scheme_axioms(bad, 30, seed=1)
    failed = {r["axiom"] for r in res if r["status"] != "pass"}
    assert failed
    assert all("witness" in r for r in res if r["status"] != "pass")


def test_rover_e_set_contents():
    sc = make_scheme("ROVER")
    b = identity_class(sc.ss, sc.ss.transversal[0])
    got = [sorted(str(q) for q in m) for m in sc.e_set(b)]
    assert got == [
        ["sig e->e"],
        ["rov[a] e->0", "sig e->1"],
        ["sig e->0", "sig e->1"],
        ["sig e->00", "sig e->01", "sig e->1"],
    ]


@pytest.mark.parametrize("aid", ["ROVER", "V2", "QV"])
def test_prescheme_extension_matches_closed_form(aid):
    sc = make_scheme(aid)
    pre = closed_form_prescheme(sc)
    assert verify_prescheme(pre) == []
    ext = extend_prescheme(pre)
    rng = random.Random(4)
    for _ in range(40):
        b = _random_class(sc.ss, rng)
        assert set(ext.e_set(b)) == set(sc.e_set(b))


def test_scheme_structure_mismatch_rejected():
    with pytest.raises(ActionError):
        make_scheme("V2", "rover")
    with pytest.raises(ActionError):
        make_scheme("prod(V2,V2)", "maxpart", "brin")


def test_contracting_vectors():
    assert contracting_vectors(make_scheme("V2")) == [(2,)]
    assert contracting_vectors(make_scheme("QV")) == [(1, 2)]
    assert contracting_vectors(make_scheme("ROVER")) == [(2,), (3,)]
    assert contracting_vectors(make_scheme("H2")) == [(1, 0, 1), (1, 1, 0)]


def test_rich_constants():
    assert rich_constant(make_scheme("V2")) == 2
    assert rich_constant(make_scheme("V4")) == 4
    assert rich_constant(make_scheme("ROVER")) == 2
    assert rich_constant(make_scheme("QV")) is None
    sc = make_scheme("prod(Qbar1,V2)")
    assert rich_constant(sc) == 2
    assert rich_constant(sc, same_type_only=True) == 3
    assert rich_constant([(2, 0), (0, 3)]) == 4


def test_contractions_invert_expansions():
    sc = make_scheme("ROVER")
    v = parse_pv(sc.ss, "{sig e->00 ; sig e->01 ; sig e->1}")
    got = sorted(str(b) for _, b in contractions(sc, v))
    assert "sig e->e" in got and "sig e->0" in got
    for block, b in contractions(sc, v):
        w = Pseudovertex((v.pairs - block) | {b}, v.ss)
        assert is_e_expansion(sc, w, v)


def test_e_expansions_of_root():
    sc = make_scheme("V2")
    got = sorted(str(w) for w in e_expansions(sc, root_vertex(sc.ss)))
    assert got == ["{sig e->0 ; sig e->1}", "{sig e->e}"]


@pytest.mark.parametrize("aid", ["V2", "ROVER", "prod(V2,V2)"])
def test_links_inside_e_sets_are_contractible(aid):
    sc = make_scheme(aid)
    rng = random.Random(6)
    for _ in range(10):
        b = _random_class(sc.ss, rng)
        vb = Pseudovertex(frozenset([b]), sc.ss)
        members = [Pseudovertex(m, sc.ss) for m in sc.e_set(b) if len(m) > 1]
        for v in members:
            verts = [w for w in members if leq(w, v) is True]
            chains = [c for r in range(1, len(verts) + 1) for c in itertools.combinations(verts, r)
                      if all(leq(x, y) is True or leq(y, x) is True for x, y in itertools.combinations(c, 2))]
            K = SimplicialComplex.from_labels(verts, chains)
            assert leq(vb, v) is True
            assert is_homologically_n_connected(K, 2)


def test_rover_upper_bounds_dominate_standard_ones():
    ss = make_structure("ROVER")
    v1 = parse_pv(ss, "{rov[a] e->0 ; sig e->1}")
    v2 = parse_pv(ss, "{sig e->0 ; sig e->1}")
    everything, standard = {root_vertex(ss)}, {root_vertex(ss)}
    frontier = [root_vertex(ss)]
    while frontier:
        nxt = []
        for v in frontier:
            for w in simple_expansions(v):
                if w.rank <= 5 and w not in everything:
                    everything.add(w)
                    nxt.append(w)
        frontier = nxt
    frontier = [root_vertex(ss)]
    while frontier:
        nxt = []
        for v in frontier:
            for w in simple_expansions(v):
                std = all(not q.map.twist for q in w.pairs - v.pairs)
                if std and w.rank <= 5 and w not in standard:
                    standard.add(w)
                    nxt.append(w)
        frontier = nxt
    bounds = [w for w in everything if leq(v1, w) is True and leq(v2, w) is True]
    std_bounds = [w for w in standard if leq(v1, w) is True and leq(v2, w) is True]
    assert bounds and std_bounds
    for w in bounds:
        assert any(leq(s, w) is True for s in std_bounds)
