import itertools
import operator
import random

import pytest

from locsemi.complex_topology import (
    SimplicialComplex,
    complex_below,
    descending_link,
    downward_star,
    filtration_level,
    homology,
    interval_complex,
    is_connected,
    is_homologically_n_connected,
    join,
    nerve,
    partition_meet,
    partitioned_descending_link,
    predecessors,
    random_vertex,
    simplicial_product,
    smith_diagonal,
    standard_cover,
    verify_product_decomposition,
)
from locsemi.expansion_scheme import is_e_expansion, make_scheme
from locsemi.pseudovertex import BudgetExceeded, leq, parse_pv, root_vertex, transporter, act


def _circle():
    return SimplicialComplex(range(4), [[0, 1], [1, 2], [2, 3], [3, 0]])


def _sphere():
    return SimplicialComplex(range(4), itertools.combinations(range(4), 3))


def test_point():
    prof = homology(SimplicialComplex([0]), 3)
    assert prof.betti == [0, 0, 0, 0] and not any(prof.torsion)


def test_circle_and_sphere():
    assert homology(_circle(), 2).betti == [0, 1, 0]
    assert homology(_sphere(), 3).betti == [0, 0, 1, 0]
    assert is_homologically_n_connected(_sphere(), 1)
    assert not is_homologically_n_connected(_sphere(), 2)
    assert not is_homologically_n_connected(_circle(), 1)


def test_two_points_and_empty():
    two = SimplicialComplex([0, 1])
    assert homology(two, 1).betti == [1, 0]
    assert not is_connected(two)
    empty = SimplicialComplex([])
    assert homology(empty, 1).empty
    assert not is_homologically_n_connected(empty, -1)
    assert is_homologically_n_connected(SimplicialComplex([0]), -1)


def test_torsion_of_projective_plane():
    # six-vertex triangulation of RP^2
    faces = [(1, 2, 4), (2, 3, 4), (1, 3, 5), (3, 4, 5), (2, 3, 6), (1, 3, 6),
             (1, 2, 5), (2, 5, 6), (4, 5, 6), (1, 4, 6)]
    prof = homology(SimplicialComplex.from_labels(range(1, 7), faces), 2)
    assert prof.betti == [0, 0, 0]
    assert prof.torsion == [[], [2], []]


def test_smith_diagonal():
    assert smith_diagonal([{0: 2, 1: 4}, {0: 6, 1: 8}]) == [2, 4]
    assert smith_diagonal([{0: 1}, {0: 1}]) == [1]
    assert smith_diagonal([]) == []


def test_join_of_two_zero_spheres_is_a_circle():
    s0 = SimplicialComplex([0, 1])
    J = join(s0, s0)
    assert len(J.vertices) == 4 and len(J.faces(1)) == 4
    assert homology(J, 2).betti == [0, 1, 0]


def test_products():
    edge = SimplicialComplex([0, 1], [[0, 1]])
    point = SimplicialComplex([0])
    P = simplicial_product([(edge, operator.le), (edge, operator.le)])
    assert P.euler_characteristic() == 1
    assert len(P.faces(2)) == 2
    Q = simplicial_product([(edge, operator.le), (point, operator.le)])
    assert len(Q.vertices) == 2 and len(Q.simplices) == 3


def test_nerve():
    assert len(nerve([SimplicialComplex([0, 1], [[0, 1]])]).simplices) == 1
    a = SimplicialComplex(["x", "y"], [["x", "y"]])
    b = SimplicialComplex(["y", "z"], [["y", "z"]])
    c = SimplicialComplex(["z", "x"], [["z", "x"]])
    N = nerve([a, b, c])
    assert len(N.faces(1)) == 3 and not N.faces(2)


def test_v_rank_two_link_is_a_point():
    sc = make_scheme("V2")
    L = descending_link(sc, parse_pv(sc.ss, "{sig e->0 ; sig e->1}"))
    assert [str(v) for v in L.vertices] == ["{sig e->e}"]


def test_qv_points_only_vertex_has_empty_link():
    sc = make_scheme("QV")
    for m in range(1, 4):
        text = "{" + " ; ".join(f"tau e->{'0' * k}1" for k in range(m)) + "}"
        v = parse_pv(sc.ss, text)
        assert descending_link(sc, v).is_empty


def test_complex_below_rank_one():
    sc = make_scheme("V2")
    K = complex_below(sc, root_vertex(sc.ss))
    assert len(K.vertices) == 1


def test_rover_below_contains_nonstandard_predecessor():
    sc = make_scheme("ROVER")
    v = parse_pv(sc.ss, "{sig e->00 ; sig e->01 ; sig e->1}")
    labels = {str(w) for w in complex_below(sc, v).vertices}
    assert "{rov[a] e->0 ; sig e->1}" in labels
    assert "{sig e->0 ; sig e->1}" in labels


def test_predecessors_are_e_predecessors():
    sc = make_scheme("ROVER")
    rng = random.Random(2)
    for _ in range(5):
        v = random_vertex(sc, rng, 4)
        for w in predecessors(sc, v):
            assert is_e_expansion(sc, w, v)


def test_budget_is_loud():
    sc = make_scheme("V2")
    v = parse_pv(sc.ss, "{sig e->00 ; sig e->01 ; sig e->10 ; sig e->11}")
    with pytest.raises(BudgetExceeded):
        descending_link(sc, v, budget=1)


def test_v_rank_four_link():
    sc = make_scheme("V2")
    v = parse_pv(sc.ss, "{sig e->00 ; sig e->01 ; sig e->10 ; sig e->11}")
    L = descending_link(sc, v)
    assert sorted(str(w) for w in L.vertices) == sorted([
        "{sig e->0 ; sig e->1}",
        "{sig e->0 ; sig e->10 ; sig e->11}",
        "{sig e->00 ; sig e->01 ; sig e->1}",
    ])
    assert len(L.faces(1)) == 2


def _random_parts(rng, v, k=3):
    ps = v.sorted_pairs()
    lab = [rng.randrange(k) for _ in ps]
    return [v.sub([p for p, l in zip(ps, lab) if l == i]) for i in sorted(set(lab))]


@pytest.mark.parametrize("aid", ["V2", "ROVER"])
def test_partitioned_link_laws(aid):
    sc = make_scheme(aid)
    rng = random.Random(21)
    for _ in range(8):
        v = random_vertex(sc, rng, rng.randint(2, 4))
        assert partitioned_descending_link(sc, v, [v]).labeled_simplices() == \
            descending_link(sc, v).labeled_simplices()
        P1, P2 = _random_parts(rng, v), _random_parts(rng, v)
        res = verify_product_decomposition(sc, v, P1)
        assert res["vertices"] and res["forward"] and res["backward"]
        both = partitioned_descending_link(sc, v, P1).labeled_simplices() & \
            partitioned_descending_link(sc, v, P2).labeled_simplices()
        assert both == partitioned_descending_link(sc, v, partition_meet(v, P1, P2)).labeled_simplices()
        L = partitioned_descending_link(sc, v, P1)
        J = join(*[descending_link(sc, p) for p in P1])
        hl, hj = homology(L, 3), homology(J, 3)
        assert (hl.empty, hl.betti, hl.torsion) == (hj.empty, hj.betti, hj.torsion)


def test_singleton_parts_match_join():
    sc = make_scheme("ROVER")
    v = parse_pv(sc.ss, "{sig e->00 ; sig e->01 ; sig e->1}")
    parts = [v.sub([q]) for q in v.sorted_pairs()]
    L = partitioned_descending_link(sc, v, parts)
    assert L.is_empty


def test_standard_cover_covers_the_link():
    sc = make_scheme("V2")
    rng = random.Random(5)
    for _ in range(5):
        v = random_vertex(sc, rng, 6)
        L = descending_link(sc, v)
        cover = standard_cover(sc, v)
        covered = set().union(*(K.labeled_simplices() for _, K in cover))
        assert covered == L.labeled_simplices()
        N = nerve([K for _, K in cover])
        assert is_connected(N)


def test_downward_star_is_a_cone():
    sc = make_scheme("ROVER")
    v = parse_pv(sc.ss, "{sig e->0 ; sig e->1}")
    st = downward_star(sc, v)
    assert is_homologically_n_connected(st, 3)


@pytest.mark.parametrize("aid", ["V2", "ROVER", "prod(V2,V2)"])
def test_interval_complexes_are_connected(aid):
    sc = make_scheme(aid)
    rng = random.Random(12)
    for _ in range(6):
        b = random_vertex(sc, rng, rng.randint(2, 4))
        below = complex_below(sc, b).vertices
        a = rng.choice([w for w in below if w != b])
        if leq(a, b) is not True:
            continue
        assert is_homologically_n_connected(interval_complex(sc, a, b), 2)


def test_filtration_levels():
    sc = make_scheme("V2")
    Y = [sc.ss.action.parse_domain("B:e")]
    K1, done1 = filtration_level(sc, Y, 1)
    assert done1 and len(K1.vertices) == 1 and not K1.faces(1)
    K2, done2 = filtration_level(sc, Y, 2)
    assert done2 and len(K2.vertices) == 2 and len(K2.faces(1)) == 1


def test_transport_is_an_isomorphism():
    sc = make_scheme("V2")
    a = sc.ss.action
    K1, _ = filtration_level(sc, [a.parse_domain("B:0")], 3)
    K2, _ = filtration_level(sc, [a.parse_domain("B:1")], 3)
    g = transporter(parse_pv(sc.ss, "{sig e->0}"), parse_pv(sc.ss, "{sig e->1}"))
    image = {act(g, w) for w in K1.vertices}
    assert image == set(K2.vertices)
    moved = {frozenset(act(g, w) for w in s) for s in K1.labeled_simplices()}
    assert moved == K2.labeled_simplices()


def test_export_formats():
    K = _circle()
    data = K.to_json()
    assert len(data["vertices"]) == 4 and [0, 1] in data["simplices"]
    assert K.to_dot().count("--") == 4
