import pytest

from locsemi.core_action import ActionError, get_action
from locsemi.semigroups import Sigma


@pytest.mark.parametrize("n", [2, 3, 4])
def test_houghton_type_count(n):
    assert get_action(f"H{n}").type_count() == n + 1


@pytest.mark.parametrize("aid,count", [("QV", 2), ("V2", 1), ("V3", 1), ("ROVER", 1),
                                       ("prod(V2,V2)", 1), ("prod(V2,V2,V2)", 1), ("prod(Qbar1,V2)", 2)])
def test_type_counts(aid, count):
    assert get_action(aid).type_count() == count


def test_transversals():
    assert [str(d) for d in get_action("V2").transversal()] == ["B:e"]
    assert [str(d) for d in get_action("QV").transversal()] == ["Pt:e", "T:e"]
    assert [str(d) for d in get_action("H2").transversal()] == ["P:1,1", "R:1,1", "R:2,1"]


def test_aliases():
    assert get_action("QV") is get_action("Qbar2")
    assert get_action("V(2)") is get_action("V2")


def test_houghton_split():
    a = get_action("H2")
    assert [str(d) for d in a.split(a.parse_domain("R:1,3"))] == ["P:1,3", "R:1,4"]


def test_tree_split():
    a = get_action("QV")
    assert sorted(str(d) for d in a.split(a.parse_domain("T:0"))) == ["Pt:0", "T:00", "T:01"]


def test_sigma_pigeonhole():
    assert Sigma((1,), (2,)).pigeonhole_constant() == 3
    assert Sigma((), (2, 2)).pigeonhole_constant() == 2
    assert Sigma((1, 1), (3,)).pigeonhole_constant() == 9
    assert Sigma((2,), ()).pigeonhole_constant() is None
    assert Sigma((1,), (2,)).action_id() == "prod(Qbar1,V2)"
    with pytest.raises(ActionError):
        Sigma((), (1,))
