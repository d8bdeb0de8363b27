"""``anet`` command-line front end.

Every report is JSON with sorted keys and integer-only values.

Exit codes:

* 0: success
* 1: ``iso`` found the inputs not conjugate
* 2: usage or precondition error
* 3: size guard
* 4: internal verification failure
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

from . import census, constructors, structure, witness
from .core import Digraph, FunctionTable, dumps, functional_graph_dot, interaction_graph
from .errors import PreconditionError, SizeGuardError, VerificationError
from .iso import are_conjugate, canonical_code

EXIT_OK = 0
EXIT_NOT_CONJUGATE = 1
EXIT_PRECONDITION = 2
EXIT_SIZE_GUARD = 3
EXIT_VERIFICATION = 4

MAX_DYNAMICS_STATES = 4096

KINDS = (
    "regular-universal",
    "threshold-universal",
    "nilpotent",
    "hamiltonian",
    "dperm",
    "twoperm",
    "augmentation",
    "induced",
)


@dataclass(frozen=True)
class CommandResult:
    status: str
    exit_code: int
    payload: Any = None
    message: str = ""


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Raises instead of exiting so ``run`` can report usage errors as results."""

    def error(self, message: str):
        raise _UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


# ---------------------------------------------------------------------------
# file helpers


def _load_json(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def load_function(path: str) -> FunctionTable:
    return FunctionTable.from_json(_load_json(path))


def load_digraph(path: str) -> Digraph:
    return Digraph.from_json(_load_json(path))


def _write(path: str | None, text: str, out) -> None:
    if path is None or path == "-":
        out.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, Digraph):
        return value.to_json()
    if hasattr(value, "item"):
        return value.item()
    return value


def _function_report(f: FunctionTable, **extra: Any) -> dict:
    data = f.to_json()
    data.update({k: _jsonable(v) for k, v in extra.items()})
    return data


def _parse_ints(text: str | None, what: str) -> list[int]:
    if not text:
        raise PreconditionError(f"--{what} is required")
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise PreconditionError(f"--{what} must be comma-separated integers") from exc


def _need(args: argparse.Namespace, *names: str) -> None:
    for name in names:
        if getattr(args, name) is None:
            raise PreconditionError(f"--{name.replace('_', '-')} is required for {args.kind}")


def _emit_dot(args: argparse.Namespace, f: FunctionTable) -> None:
    if not args.dot:
        return
    if args.full_dynamics:
        if f.size > MAX_DYNAMICS_STATES:
            raise SizeGuardError(f"functional graph DOT needs q^n <= {MAX_DYNAMICS_STATES}")
        text = functional_graph_dot(f)
    else:
        text = interaction_graph(f).to_dot()
    Path(args.dot).write_text(text, encoding="utf-8")


# ---------------------------------------------------------------------------
# commands


def _cmd_construct(args: argparse.Namespace) -> dict:
    kind = args.kind
    graph = load_digraph(args.graph) if args.graph else None
    info: dict[str, Any] = {"kind": kind}
    if kind == "threshold-universal":
        _need(args, "n")
        factors = _parse_ints(args.factors, "factors")
        f = constructors.build_threshold_universal(args.n, factors)
        info["params"] = {"n": args.n, "q_factors": factors}
    elif kind == "regular-universal":
        _need(args, "graph", "q")
        factors = _parse_ints(args.factors, "factors")
        f = constructors.build_regular_universal(graph, args.q, factors)
        info["params"] = {"q": args.q, "r_factors": factors, "graph": graph}
    elif kind == "nilpotent":
        _need(args, "graph", "q")
        f = constructors.build_nilpotent_for_digraph(graph, args.q)
        info["params"] = {"q": args.q, "graph": graph}
    elif kind == "twoperm":
        _need(args, "graph")
        f = constructors.build_2perm_permutation(graph, require_condition=False)
        info["params"] = {"graph": graph}
    else:
        fam = _family(args)
        info["params"] = fam.params
        f = fam.base if graph is None else _family_witness(fam, args, graph)
        info["role"] = "base" if graph is None else "witness"
    _emit_dot(args, f)
    return _function_report(f, **info)


def _family(args: argparse.Namespace) -> constructors.FamilyHandle:
    kind = args.kind
    if kind == "hamiltonian":
        _need(args, "n", "q")
        return constructors.build_hamiltonian_family(args.n, args.q)
    if kind == "dperm":
        _need(args, "n", "q", "d")
        return constructors.build_dperm_family(args.n, args.q, args.d)
    if kind == "augmentation":
        _need(args, "n")
        return constructors.build_universal_augmentation_family(args.n)
    _need(args, "k")
    return constructors.build_induced_universal(args.k)


def _family_witness(fam: constructors.FamilyHandle, args: argparse.Namespace, graph: Digraph) -> FunctionTable:
    if fam.kind == "dperm":
        return fam.witness(constructors.find_permutation(graph, args.d))
    if fam.kind == "augmentation":
        return fam.witness(graph, constructors.find_permutation(graph, 2))
    return fam.witness(graph)


def _cmd_check(args: argparse.Namespace) -> dict:
    return structure.is_universal(load_function(args.function)).to_json()


def _cmd_witness(args: argparse.Namespace) -> dict:
    f = load_function(args.function)
    g = load_digraph(args.graph)
    h = witness.witness_for_digraph(f, g)
    if interaction_graph(h) != g:
        raise VerificationError("witness graph differs from the target")
    _emit_dot(args, h)
    return _function_report(h)


def _parse_coverage(text: str) -> tuple[str, int]:
    if text == "all":
        return "all", 0
    if text.startswith("sample:"):
        try:
            return "sampled", int(text.split(":", 1)[1])
        except ValueError:
            pass
    raise PreconditionError("--coverage must be 'all' or 'sample:COUNT'")


def _cmd_certify(args: argparse.Namespace) -> dict:
    f = load_function(args.function)
    coverage, count = _parse_coverage(args.coverage)
    cert = witness.certify_universal(f, coverage, count, args.seed, args.threads)
    if cert.verified != len(cert.entries):
        raise VerificationError(f"only {cert.verified}/{len(cert.entries)} witnesses verified")
    return cert.to_json(include_tables=args.include_tables)


def _cmd_gset(args: argparse.Namespace) -> dict:
    return census.enumerate_gset(load_function(args.function)).to_json()


def _cmd_census(args: argparse.Namespace) -> dict:
    best, codes = census.gamma_census(args.n, args.q)
    return {"n": args.n, "q": args.q, "gamma": best, "maximizers": codes}


def _cmd_stats(args: argparse.Namespace) -> dict:
    return census.digraph_stats(args.n, args.samples, args.seed, args.threads).to_json()


def _cmd_incompat(args: argparse.Namespace) -> dict:
    reports = census.binary_incompatibility_census(args.n)
    bad = [r.code_hex for r in reports if r.violations]
    return {"n": args.n, "classes": len(reports), "violations": len(bad), "violating_classes": bad}


def _cmd_induced(args: argparse.Namespace) -> dict:
    k = args.k
    report: dict[str, Any] = {
        "k": k,
        "lower_bound": census.induced_lower_bound(k),
        "upper_bound": constructors.induced_universal_size(k),
    }
    if args.n is not None:
        report["n"] = args.n
        report["exists"] = census.induced_universality_search(k, args.n)
    else:
        report["family"] = census.verify_induced_family(k)
    return report


def _cmd_iso(args: argparse.Namespace) -> dict:
    a, b = load_function(args.a), load_function(args.b)
    return {
        "conjugate": are_conjugate(a, b),
        "code_a": canonical_code(a).hex(),
        "code_b": canonical_code(b).hex(),
    }


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="anet", description="Interaction graphs of automata networks.")
    parser.add_argument("--threads", type=int, default=os.cpu_count() or 1, help="worker cap (results do not depend on it)")
    parser.add_argument("--seed", type=int, default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name: str, func: Callable, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        # repeated here so flags also work after the subcommand
        p.add_argument("--threads", type=int, default=argparse.SUPPRESS)
        p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
        p.add_argument("-o", "--output", default=None, help="output file (default stdout)")
        return p

    p = add("construct", _cmd_construct, "build a function from one of the explicit families")
    p.add_argument("kind", choices=KINDS)
    p.add_argument("--n", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--factors", help="comma-separated alphabet or rank factors")
    p.add_argument("--graph", help="digraph JSON; for families, build the witness for it")
    p.add_argument("--dot", help="also write the interaction graph as DOT")
    p.add_argument("--full-dynamics", action="store_true", help="write the functional graph to --dot instead")

    p = add("check", _cmd_check, "decide universality of a function")
    p.add_argument("function")

    p = add("witness", _cmd_witness, "conjugate of a universal function with a given interaction graph")
    p.add_argument("function")
    p.add_argument("--graph", required=True)
    p.add_argument("--dot")
    p.add_argument("--full-dynamics", action="store_true")

    p = add("certify", _cmd_certify, "build and verify witnesses for many digraphs")
    p.add_argument("function")
    p.add_argument("--coverage", default="all", help="'all' or 'sample:COUNT'")
    p.add_argument("--include-tables", action="store_true", help="inline every witness table")

    p = add("gset", _cmd_gset, "all interaction graphs of conjugates (q^n <= 9)")
    p.add_argument("function")

    p = add("census", _cmd_census, "exact maximum G-set size over F(n,q) (q^n <= 8)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=int, required=True)

    p = add("stats", _cmd_stats, "digraph population counts")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, default=1000)

    p = add("incompat", _cmd_incompat, "binary incompatibility census")
    p.add_argument("--n", type=int, required=True)

    p = add("induced", _cmd_induced, "induced universality: family check or exhaustive search")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, help="search F(n,2) exhaustively instead of checking the family")

    p = add("iso", _cmd_iso, "exit 0 iff the two functions are conjugate")
    p.add_argument("a")
    p.add_argument("b")
    return parser


def run(argv: list[str] | None = None, out=None) -> CommandResult:
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as exc:
        return CommandResult("precondition_failed", EXIT_PRECONDITION, message=str(exc))
    try:
        payload = args.func(args)
    except SizeGuardError as exc:
        return CommandResult("size_guard", EXIT_SIZE_GUARD, message=str(exc))
    except VerificationError as exc:
        return CommandResult("verification_failed", EXIT_VERIFICATION, message=str(exc))
    except (PreconditionError, OSError, KeyError, ValueError, TypeError) as exc:
        return CommandResult("precondition_failed", EXIT_PRECONDITION, message=f"{type(exc).__name__}: {exc}")
    _write(args.output, dumps(payload), out)
    code = EXIT_OK
    if args.command == "iso" and not payload["conjugate"]:
        code = EXIT_NOT_CONJUGATE
    return CommandResult("ok", code, payload)


def main(argv: list[str] | None = None) -> int:
    result = run(argv)
    if result.message:
        print(result.message, file=sys.stderr)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
