import json

from click.testing import CliRunner

from locsemi.cli import main, run


def _run(*args):
    return CliRunner().invoke(main, list(args))


def test_actions_lists_everything():
    res = _run("actions", "--format", "json")
    assert res.exit_code == 0
    rows = {r["action"]: r for r in json.loads(res.output)}
    assert rows["H3"]["types"] == 4 and rows["ROVER"]["group_orders"] == [4]


def test_verify_rover_structure():
    res = _run("verify", "--action", "ROVER", "--structure", "rover", "--what", "sstructure",
               "--samples", "40", "--seed", "7", "--format", "json")
    assert res.exit_code == 0
    assert json.loads(res.output)["status"] == "pass"


def test_verify_failure_exit_code_and_witness():
    res = _run("verify", "--action", "prod(V2,V2)", "--what", "cup", "--depth", "2", "--format", "json")
    assert res.exit_code == 2
    assert json.loads(res.output)["result"]["witness"]


def test_finiteness_qv():
    res = _run("finiteness", "--action", "QV", "--scheme", "maxpart", "--n", "3")
    assert res.exit_code == 0
    data = json.loads(res.output)
    assert data["C"] == 27 and data["witness"] == [9, 18]


def test_link_homology():
    res = _run("link", "--action", "V2", "--scheme", "maxpart",
               "--vertex", "{sig e->00 ; sig e->01 ; sig e->1}", "--homology", "2", "--format", "json")
    assert res.exit_code == 0
    data = json.loads(res.output)
    assert [h["betti"] for h in data["homology"]] == [0, 0, 0]


def test_dot_export():
    res = _run("link", "--action", "V2", "--vertex", "{sig e->00 ; sig e->01 ; sig e->10 ; sig e->11}",
               "--format", "dot")
    assert res.exit_code == 0 and res.output.startswith("graph")


def test_budget_exit_code():
    res = _run("link", "--action", "V2", "--vertex", "{sig e->0 ; sig e->1}", "--budget", "0")
    assert res.exit_code == 3
    assert json.loads(res.output)["status"] == "budget_exhausted"


def test_bad_combination_rejected():
    res = _run("link", "--action", "V2", "--scheme", "rover", "--vertex", "{sig e->e}")
    assert res.exit_code == 64
    assert "Usage" in res.output


def test_deterministic_output():
    args = ["verify", "--action", "V2", "--what", "scheme", "--samples", "20", "--seed", "5", "--format", "json"]
    assert _run(*args).output == _run(*args).output


def test_expand_leq_upper_bound_filtration():
    assert "rov[a] e->0" in _run("expand", "--action", "ROVER", "--vertex", "{sig e->e}").output
    res = _run("leq", "--action", "V2", "--vertex", "{sig e->e}", "--vertex", "{sig e->0 ; sig e->1}",
               "--format", "json")
    assert json.loads(res.output)["leq"] is True
    res = _run("upper-bound", "--action", "ROVER", "--vertex", "{rov[a] e->0 ; sig e->1}",
               "--vertex", "{sig e->0 ; sig e->1}", "--format", "json")
    assert json.loads(res.output)["upper_bound"] == "{sig e->00 ; sig e->01 ; sig e->1}"
    res = _run("filtration", "--action", "V2", "--domain", "B:e", "--n", "2", "--format", "json")
    assert json.loads(res.output)["complete"] is True


def test_run_returns_codes():
    assert run(["link", "--action", "V2", "--vertex", "{sig e->0 ; sig e->1}", "--budget", "0"]) == 3
    assert run(["link", "--action", "V2", "--scheme", "rover", "--vertex", "{sig e->e}"]) == 64
    assert run(["actions"]) == 0


def test_usage_errors_exit_64():
    assert run(["link", "--action", "V2"]) == 64
    assert run(["link", "--action", "V2", "--vertex", "{garbage"]) == 64
    assert run(["verify", "--action", "V2", "--what", "nothing"]) == 64
    assert run(["actions"]) == 0
