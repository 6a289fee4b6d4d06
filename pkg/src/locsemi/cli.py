"""Command line interface.

Exit codes: 0 success, 2 verification failure, 3 budget exhausted,
64 invalid flags or inputs.
"""

from __future__ import annotations

import json
import sys

import click

from .complex_topology import (
    complex_below,
    descending_link,
    filtration_level,
    homology,
    is_homologically_n_connected,
)
from .core_action import ActionError, get_action, verify_cup
from .expansion_scheme import (
    closed_form_prescheme,
    e_expansions,
    make_scheme,
    verify_prescheme,
    verify_scheme_axioms,
)
from .finiteness_engine import f_infinity_checklist, f_n_checklist
from .pseudovertex import (
    BudgetExceeded,
    common_upper_bound,
    leq,
    parse_pv,
    simple_expansions,
    type_vector,
)
from .s_structure import make_structure, verify_sstructure_axioms

KNOWN_ACTIONS = (
    "V2", "V3", "V4", "V5", "Qbar1", "QV", "H2", "H3", "H4", "ROVER",
    "prod(V2,V2)", "prod(V2,V2,V2)", "prod(Qbar1,V2)",
)
EXIT_VERIFY = 2
EXIT_BUDGET = 3
EXIT_USAGE = 64


class BadInput(click.UsageError):
    exit_code = EXIT_USAGE


def _emit(obj, fmt: str) -> None:
    if fmt == "json":
        click.echo(json.dumps(obj, indent=2, sort_keys=True))
    else:
        click.echo(_text(obj))


def _text(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        lines = []
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not _flat(v):
                lines.append(f"{pad}{k}:")
                lines.append(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_inline(v)}")
        return "\n".join(lines)
    if isinstance(obj, list):
        if _flat(obj):
            return pad + _inline(obj)
        return "\n".join(pad + _row(x) if _flat_dict(x) else _text(x, indent) if isinstance(x, dict)
                         else pad + _inline(x) for x in obj)
    return pad + str(obj)


def _flat_dict(x) -> bool:
    return isinstance(x, dict) and all(not isinstance(v, dict) and (not isinstance(v, list) or _flat(v))
                                       for v in x.values())


def _row(x: dict) -> str:
    return "  ".join(f"{k}={_inline(v)}" for k, v in x.items())


def _flat(v) -> bool:
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) or _flat(x) for x in v)


def _inline(v) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_inline(x) for x in v) + "]"
    return str(v)


def _scheme(action: str, structure: str | None, scheme: str | None):
    try:
        get_action(action)
        ss = make_structure(action, structure)
        sc = make_scheme(ss, scheme)
    except ActionError as e:
        raise BadInput(str(e))
    return ss, sc


def _vertices(ss, texts, count: int | None = None) -> list:
    if count is not None and len(texts) != count:
        raise BadInput(f"expected {count} --vertex value(s), got {len(texts)}")
    try:
        return [parse_pv(ss, t) for t in texts]
    except (ActionError, ValueError) as e:
        raise BadInput(str(e))


def _budget_guard(fn):
    def wrapped(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except BudgetExceeded as e:
            click.echo(json.dumps({"status": "budget_exhausted", "detail": str(e)}))
            sys.exit(EXIT_BUDGET)
        except ActionError as e:
            raise BadInput(str(e))

    wrapped.__name__ = fn.__name__
    wrapped.__doc__ = fn.__doc__
    return wrapped


def _common(f):
    f = click.option("--format", "fmt", type=click.Choice(["text", "json", "dot"]), default="text",
                     help="Output format.")(f)
    f = click.option("--budget", type=int, default=20000, show_default=True,
                     help="Enumeration budget.")(f)
    f = click.option("--scheme", default=None, help="trivial|maxpart|prodsub|rover (default per action).")(f)
    f = click.option("--structure", default=None, help="maximal|rover|brin (default per action).")(f)
    f = click.option("--action", required=True, help="Action id, e.g. V2, QV, H3, ROVER, prod(V2,V2).")(f)
    return f


@click.group()
def main():
    """Locally determined groups: structures, schemes, complexes and finiteness."""


@main.command()
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
def actions(fmt):
    """List the built-in actions."""
    rows = []
    for aid in KNOWN_ACTIONS:
        ss = make_structure(aid)
        rows.append({
            "action": aid,
            "types": ss.type_count,
            "structure": ss.kind,
            "scheme": make_scheme(ss).kind,
            "group_orders": [len(ss.group(d)) for d in ss.transversal],
        })
    if fmt == "json":
        _emit(rows, fmt)
    else:
        click.echo(f"{'action':<18}{'types':>6}  {'structure':<10}{'scheme':<10}orders")
        for r in rows:
            click.echo(f"{r['action']:<18}{r['types']:>6}  {r['structure']:<10}{r['scheme']:<10}{r['group_orders']}")


@main.command()
@_common
@click.option("--what", type=click.Choice(["sstructure", "scheme", "prescheme", "cup"]), required=True)
@click.option("--samples", type=int, default=200, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--depth", type=int, default=3, show_default=True, help="Depth bound for the CUP check.")
@_budget_guard
def verify(action, structure, scheme, budget, fmt, what, samples, seed, depth):
    """Run an axiom suite; exit 2 with a witness on failure."""
    ss, sc = _scheme(action, structure, scheme)
    if what == "sstructure":
        results = verify_sstructure_axioms(ss, samples, seed)
        failed = [r for r in results if r["status"] != "pass"]
        out = {"what": what, "action": action, "results": results}
    elif what == "scheme":
        results = verify_scheme_axioms(sc, samples, seed)
        failed = [r for r in results if r["status"] != "pass"]
        out = {"what": what, "action": action, "scheme": sc.kind, "results": results}
    elif what == "prescheme":
        failed = verify_prescheme(closed_form_prescheme(sc))
        out = {"what": what, "action": action, "failures": failed}
    else:
        res = verify_cup(ss.action, depth)
        failed = [res] if res["status"] != "pass" else []
        out = {"what": what, "action": action, "result": res}
    out["status"] = "fail" if failed else "pass"
    _emit(out, "json" if fmt == "json" else "text")
    if failed:
        sys.exit(EXIT_VERIFY)


@main.command()
@_common
@click.option("--vertex", "vertices", multiple=True, required=True)
@_budget_guard
def expand(action, structure, scheme, budget, fmt, vertices):
    """Simple expansions and E-expansions of a pseudovertex."""
    ss, sc = _scheme(action, structure, scheme)
    (v,) = _vertices(ss, vertices, 1)
    out = {
        "vertex": str(v),
        "type_vector": list(type_vector(v)),
        "simple_expansions": sorted(str(w) for w in simple_expansions(v)),
        "e_expansions": sorted(str(w) for w in e_expansions(sc, v) if w != v),
    }
    _emit(out, "json" if fmt == "json" else "text")


@main.command(name="leq")
@_common
@click.option("--vertex", "vertices", multiple=True, required=True)
@_budget_guard
def leq_cmd(action, structure, scheme, budget, fmt, vertices):
    """Decide whether the second vertex is an expansion of the first."""
    ss, _ = _scheme(action, structure, scheme)
    v1, v2 = _vertices(ss, vertices, 2)
    res = leq(v1, v2, budget)
    if res is None:
        raise BudgetExceeded("leq budget exhausted")
    _emit({"lower": str(v1), "upper": str(v2), "leq": bool(res)}, "json" if fmt == "json" else "text")


@main.command(name="upper-bound")
@_common
@click.option("--vertex", "vertices", multiple=True, required=True)
@_budget_guard
def upper_bound(action, structure, scheme, budget, fmt, vertices):
    """A common upper bound of two pseudovertices with the same image."""
    ss, _ = _scheme(action, structure, scheme)
    v1, v2 = _vertices(ss, vertices, 2)
    u = common_upper_bound(v1, v2, budget)
    _emit({"vertices": [str(v1), str(v2)], "upper_bound": str(u)}, "json" if fmt == "json" else "text")


def _complex_out(K, fmt: str, hom: int | None) -> None:
    if fmt == "dot":
        click.echo(K.to_dot())
        return
    out = K.to_json()
    out["dimension"] = K.dim
    if hom is not None:
        prof = homology(K, hom)
        out["empty"] = prof.empty
        out["homology"] = prof.to_json()
        out["homologically_connected_upto"] = _conn_level(K, hom)
    _emit(out, "json" if fmt == "json" else "text")


def _conn_level(K, top: int) -> int:
    level = -2
    for n in range(-1, top + 1):
        if not is_homologically_n_connected(K, n):
            break
        level = n
    return level


@main.command()
@_common
@click.option("--vertex", "vertices", multiple=True, required=True)
@click.option("--homology", "hom", type=int, default=None, help="Report reduced homology up to this dimension.")
@_budget_guard
def link(action, structure, scheme, budget, fmt, vertices, hom):
    """Descending link of a pseudovertex."""
    ss, sc = _scheme(action, structure, scheme)
    (v,) = _vertices(ss, vertices, 1)
    _complex_out(descending_link(sc, v, budget), fmt, hom)


@main.command(name="homology")
@_common
@click.option("--vertex", "vertices", multiple=True, required=True)
@click.option("--n", "n", type=int, default=2, show_default=True)
@click.option("--below", is_flag=True, help="Use the complex of all vertices below instead of the link.")
@_budget_guard
def homology_cmd(action, structure, scheme, budget, fmt, vertices, n, below):
    """Reduced integer homology of a descending link (homological connectivity only)."""
    ss, sc = _scheme(action, structure, scheme)
    (v,) = _vertices(ss, vertices, 1)
    K = complex_below(sc, v, budget) if below else descending_link(sc, v, budget)
    prof = homology(K, n)
    out = {
        "vertex": str(v),
        "complex": "below" if below else "descending_link",
        "vertices": len(K.vertices),
        "simplices": len(K.simplices),
        "empty": prof.empty,
        "homology": prof.to_json(),
        "homologically_connected_upto": _conn_level(K, n),
    }
    _emit(out, "json" if fmt == "json" else "text")


@main.command()
@_common
@click.option("--domain", "domains", multiple=True, required=True, help="A domain of Y; repeat for each piece.")
@click.option("--n", "n", type=int, required=True, help="Rank bound.")
@click.option("--homology", "hom", type=int, default=None)
@_budget_guard
def filtration(action, structure, scheme, budget, fmt, domains, n, hom):
    """Rank-bounded fragment of the complex on pseudovertices with image Y."""
    ss, sc = _scheme(action, structure, scheme)
    try:
        ys = [ss.action.parse_domain(d) for d in domains]
    except ActionError as e:
        raise BadInput(str(e))
    K, complete = filtration_level(sc, ys, n, budget)
    if fmt == "dot":
        click.echo(K.to_dot())
        return
    out = K.to_json()
    out["complete"] = complete
    out["note"] = "vertices reachable by E-expansion from the identity vertex"
    if hom is not None:
        out["homology"] = homology(K, hom).to_json()
    _emit(out, "json" if fmt == "json" else "text")


@main.command()
@_common
@click.option("--n", "n", type=int, default=None, help="Certify level n; omit for the richness check.")
@click.option("--cap", type=int, default=None, help="Search cap for the least certified vector.")
@_budget_guard
def finiteness(action, structure, scheme, budget, fmt, n, cap):
    """Finiteness report (always JSON)."""
    _, sc = _scheme(action, structure, scheme)
    rep = f_infinity_checklist(sc) if n is None else f_n_checklist(sc, n, cap)
    _emit(rep.to_json(), "json")


@main.command()
@_common
@click.option("--vertex", "vertices", multiple=True, required=True)
@click.option("--below", is_flag=True, help="Export the complex of all vertices below.")
@click.option("--output", type=click.Path(dir_okay=False), default=None)
@_budget_guard
def export(action, structure, scheme, budget, fmt, vertices, below, output):
    """Export a complex as JSON or DOT."""
    ss, sc = _scheme(action, structure, scheme)
    (v,) = _vertices(ss, vertices, 1)
    K = complex_below(sc, v, budget) if below else descending_link(sc, v, budget)
    text = K.to_dot() if fmt == "dot" else json.dumps(K.to_json(), indent=2, sort_keys=True)
    if output:
        with open(output, "w") as fh:
            fh.write(text + "\n")
        click.echo(output)
    else:
        click.echo(text)


def run(argv) -> int:
    """Run the CLI in-process and return the exit code."""
    try:
        main.main(args=list(argv), prog_name="locsemi", standalone_mode=False)
    except click.exceptions.UsageError as e:
        e.show()
        return EXIT_USAGE
    except SystemExit as e:
        return int(e.code or 0)
    return 0


def entry():
    """Console entry point; usage errors exit with 64 rather than click's 2."""
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    entry()
