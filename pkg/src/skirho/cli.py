"""Batch command line for the rewriting toolkit.

One invocation parses one or two terms in the chosen calculus, runs a
pipeline, and prints text or JSON.  Exit codes: 0 success, 1 input or parse
error, 2 fuel or search budget exhaustion, 3 property violation (for
example a sort failure where the process sort was required).
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import bisim, comb, rho, ski
from .core import FuelExhausted, Presentation, Trace, apply_redex, canonicalize, reduce
from .syntax import (
    ParseError,
    parse_comb,
    parse_rho,
    parse_rho_name,
    parse_ski,
    print_comb,
    print_rho,
    print_rho_name,
    print_ski,
)

CALCULI = ("ski", "ski-whnf", "ski-gas", "rho", "rho-comb")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_FUEL = 2
EXIT_PROPERTY = 3


class CliError(Exception):
    def __init__(self, message: str, code: int) -> None:
        super().__init__(message)
        self.code = code


def _ski_variant(calculus: str) -> str:
    return {"ski": "plain", "ski-whnf": "whnf", "ski-gas": "gas"}[calculus]


def _parse_term(calculus: str, text: str):
    try:
        if calculus in ("ski", "ski-whnf", "ski-gas"):
            return parse_ski(text, _ski_variant(calculus))
        if calculus == "rho":
            return parse_rho(text)
        if calculus == "rho-comb":
            return parse_comb(text)
    except ParseError as err:
        raise CliError(f"parse error: {err}", EXIT_INPUT) from err
    raise CliError(f"unknown calculus {calculus!r}", EXIT_INPUT)


def _print_term(calculus: str, term) -> str:
    if calculus in ("ski", "ski-whnf", "ski-gas"):
        return print_ski(term)
    if calculus == "rho":
        return print_rho(term)
    return print_comb(term)


def _parse_names(calculus: str, spec: Optional[str]):
    if spec is None:
        return None
    names = []
    for chunk in spec.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            if calculus == "rho":
                names.append(parse_rho_name(chunk))
            else:
                names.append(parse_comb(chunk))
        except ParseError as err:
            raise CliError(f"bad name literal {chunk!r}: {err}", EXIT_INPUT) from err
    return names


def trace_to_json(calculus: str, trace) -> dict:
    if isinstance(trace, Trace):
        steps = [
            {
                "rule": redex.rule,
                "position": list(redex.position),
                "result": _print_term(calculus, term),
            }
            for redex, term in trace.steps
        ]
    else:
        steps = [
            {"rule": rule, "position": [], "result": _print_term(calculus, term)}
            for rule, term in trace.steps
        ]
    return {
        "calculus": calculus,
        "initial": _print_term(calculus, trace.initial),
        "steps": steps,
        "status": trace.status,
    }


def validate_trace_json(obj: dict) -> None:
    """Raise ValueError unless obj matches the published trace layout."""
    if set(obj) != {"calculus", "initial", "steps", "status"}:
        raise ValueError("trace object must have exactly calculus/initial/steps/status")
    if obj["calculus"] not in CALCULI:
        raise ValueError(f"unknown calculus {obj['calculus']!r}")
    if not isinstance(obj["initial"], str):
        raise ValueError("initial must be a string")
    if obj["status"] not in ("normal_form", "fuel_exhausted", "target_reached"):
        raise ValueError(f"unknown status {obj['status']!r}")
    if not isinstance(obj["steps"], list):
        raise ValueError("steps must be a list")
    for entry in obj["steps"]:
        if set(entry) != {"rule", "position", "result"}:
            raise ValueError("each step must have exactly rule/position/result")
        if not isinstance(entry["rule"], str) or not isinstance(entry["result"], str):
            raise ValueError("rule and result must be strings")
        if not (isinstance(entry["position"], list)
                and all(isinstance(i, int) for i in entry["position"])):
            raise ValueError("position must be a list of integers")


def replay_trace_json(obj: dict):
    """Re-run a JSON trace step by step, returning the reproduced terms.

    Every intermediate term must be reproducible through redex application
    (or a communication step for the process calculus).
    """
    validate_trace_json(obj)
    calculus = obj["calculus"]
    current = _parse_term(calculus, obj["initial"])
    out = []
    if calculus == "rho":
        current = rho.canon_process(current)
        for entry in obj["steps"]:
            want = rho.canon_process(_parse_term(calculus, entry["result"]))
            if want not in rho.comm_step(current):
                raise ValueError(f"step to {entry['result']!r} does not replay")
            current = want
            out.append(current)
        return out
    pres = _presentation(calculus)
    current = canonicalize(pres, current)
    for entry in obj["steps"]:
        want = canonicalize(pres, _parse_term(calculus, entry["result"]))
        from .core import find_redexes

        matches = [
            r
            for r in find_redexes(pres, current)
            if r.rule == entry["rule"] and list(r.position) == entry["position"]
        ]
        if not any(apply_redex(pres, current, r) == want for r in matches):
            raise ValueError(f"step to {entry['result']!r} does not replay")
        current = want
        out.append(current)
    return out


def _presentation(calculus: str) -> Presentation:
    if calculus == "rho-comb":
        return comb.comb_presentation()
    return ski.ski_presentation(_ski_variant(calculus))


def _emit(args, payload: dict, text: str) -> None:
    if args.format == "json":
        print(json.dumps(payload))
    else:
        print(text)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_reduce(args, verbose: bool) -> int:
    calculus = args.calculus
    term = _parse_term(calculus, args.term)
    if calculus == "rho":
        if not rho.is_closed(term):
            raise CliError("process must be closed", EXIT_INPUT)
        trace = rho.rho_reduce(term, args.strategy, args.fuel, seed=args.seed)
    else:
        pres = _presentation(calculus)
        if calculus == "ski-gas":
            if ski.contains_marker(term):
                raise CliError("supply an R-free term and use --gas", EXIT_INPUT)
            term = ski.wrap_markers(term, args.gas)
        trace = reduce(pres, term, args.strategy, args.fuel, seed=args.seed)
    payload = trace_to_json(calculus, trace)
    lines = []
    if verbose:
        lines.append(f"initial: {payload['initial']}")
        for i, entry in enumerate(payload["steps"], start=1):
            pos = ",".join(str(j) for j in entry["position"])
            lines.append(f"{i}. {entry['rule']}@[{pos}] -> {entry['result']}")
    lines.append(_print_term(calculus, trace.final))
    lines.append(f"steps: {len(trace.steps)}")
    lines.append(f"status: {trace.status}")
    _emit(args, payload, "\n".join(lines))
    return EXIT_FUEL if trace.status == "fuel_exhausted" else EXIT_OK


def _cmd_translate(args) -> int:
    calculus = args.calculus
    term = _parse_term(calculus, args.term)
    if calculus == "rho":
        try:
            image = comb.interp(term)
        except comb.TranslationError as err:
            raise CliError(str(err), EXIT_INPUT) from err
        rendered = print_comb(image)
        _emit(args, {"calculus": "rho-comb", "term": rendered}, rendered)
        return EXIT_OK
    if calculus == "rho-comb":
        try:
            process = comb.backinterp(term, fuel=args.fuel)
        except comb.TranslationError as err:
            raise CliError(str(err), EXIT_PROPERTY) from err
        except FuelExhausted as err:
            raise CliError(str(err), EXIT_FUEL) from err
        rendered = print_rho(process)
        _emit(args, {"calculus": "rho", "term": rendered}, rendered)
        return EXIT_OK
    raise CliError("translate expects --calculus rho or rho-comb", EXIT_INPUT)


def _cmd_sort(args) -> int:
    if args.calculus != "rho-comb":
        raise CliError("sort expects --calculus rho-comb", EXIT_INPUT)
    term = _parse_term(args.calculus, args.term)
    inferred = comb.sort_infer(term)
    if inferred is None:
        _emit(args, {"sort": None}, "not sortable")
        return EXIT_PROPERTY
    _emit(args, {"sort": repr(inferred)}, repr(inferred))
    return EXIT_OK


def _agent(args, text: str):
    if args.calculus == "rho":
        agent = _parse_term("rho", text)
        if not rho.is_closed(agent):
            raise CliError("process must be closed", EXIT_INPUT)
        return agent
    if args.calculus == "rho-comb":
        return _parse_term("rho-comb", text)
    raise CliError("this command expects --calculus rho or rho-comb", EXIT_INPUT)


def _agent_names(args, agents) -> list:
    names = _parse_names(args.calculus, args.names)
    if names is None:
        names = []
        for agent in agents:
            for n in bisim.names_occurring(agent):
                if n not in names:
                    names.append(n)
    return names


def _print_name(calculus: str, name) -> str:
    if calculus == "rho":
        return print_rho_name(name)
    return print_comb(name)


def _cmd_barbs(args) -> int:
    agent = _agent(args, args.term)
    names = _agent_names(args, [agent])
    if args.depth is not None:
        observed = bisim.weak_barbs(agent, names, args.depth)
        found = sorted(_print_name(args.calculus, n) for n in observed.names)
        payload = {"barbs": found, "truncated": observed.truncated}
        text = "\n".join(found) if found else "(none)"
        if observed.truncated:
            text += "\n(truncated at bound)"
    else:
        found = sorted(_print_name(args.calculus, n) for n in bisim.barbs(agent, names))
        payload = {"barbs": found}
        text = "\n".join(found) if found else "(none)"
    _emit(args, payload, text)
    return EXIT_OK


def _cmd_bisim(args) -> int:
    left = _agent(args, args.left)
    right = _agent(args, args.right)
    names = _agent_names(args, [left, right])
    try:
        verdict = bisim.bounded_bisim(left, right, names, args.depth)
    except bisim.BudgetExhausted as err:
        raise CliError(str(err), EXIT_FUEL) from err
    if verdict.bisimilar:
        payload = {"verdict": "bisimilar_up_to", "depth": verdict.depth}
        text = f"bisimilar up to depth {verdict.depth}"
    else:
        payload = {
            "verdict": "distinguished",
            "depth": verdict.depth,
            "witness": verdict.witness.describe(),
        }
        text = f"distinguished: {verdict.witness.describe()}"
    _emit(args, payload, text)
    return EXIT_OK


def _cmd_faithfulness(args) -> int:
    if args.calculus not in (None, "rho"):
        raise CliError("faithfulness expects --calculus rho", EXIT_INPUT)
    args.calculus = "rho"
    left = _agent(args, args.left)
    right = _agent(args, args.right)
    names = _agent_names(args, [left, right])
    report = bisim.faithfulness_check(left, right, names, args.depth)
    if report.inconclusive:
        raise CliError("state budget exhausted; verdict inconclusive", EXIT_FUEL)
    payload = {
        "agree": report.agree,
        "calculus_bisimilar": report.calculus.bisimilar,
        "combinator_bisimilar": report.combinator.bisimilar,
    }
    text = (
        f"calculus: {'bisimilar' if report.calculus.bisimilar else 'distinguished'}\n"
        f"combinators: {'bisimilar' if report.combinator.bisimilar else 'distinguished'}\n"
        f"agreement: {'yes' if report.agree else 'NO'}"
    )
    _emit(args, payload, text)
    return EXIT_OK if report.agree else EXIT_PROPERTY


def _cmd_roundtrip(args) -> int:
    calculus = args.calculus
    term = _parse_term(calculus, args.term)
    checks: list[tuple[str, bool, str]] = []
    if calculus == "rho":
        if not rho.is_closed(term):
            raise CliError("process must be closed", EXIT_INPUT)
        image = comb.interp(term)
        back = comb.backinterp(image, fuel=args.fuel)
        ok1 = back == rho.canon_process(term)
        checks.append(("back_translation_alpha_equivalent", ok1, print_rho(back)))
        again = comb.interp(back)
        ok2 = comb.backinterp(again, fuel=args.fuel) == back
        checks.append(("composite_idempotent", ok2, print_comb(again)))
    elif calculus == "rho-comb":
        try:
            process = comb.backinterp(term, fuel=args.fuel)
        except comb.TranslationError as err:
            raise CliError(str(err), EXIT_PROPERTY) from err
        target = comb.interp(process)
        trace = reduce(comb.comb_presentation(), term, "all", args.fuel,
                       rules=comb.NON_COMM_RULES, target=target)
        ok1 = trace.status == "target_reached"
        checks.append(("reduces_to_composite_without_comm", ok1, print_comb(target)))
        ok2 = comb.backinterp(target, fuel=args.fuel) == process
        checks.append(("composite_idempotent", ok2, print_rho(process)))
    else:
        raise CliError("roundtrip expects --calculus rho or rho-comb", EXIT_INPUT)
    payload = {"checks": [{"name": n, "ok": ok, "value": v} for n, ok, v in checks]}
    text = "\n".join(f"{'ok ' if ok else 'FAIL'} {n}: {v}" for n, ok, v in checks)
    _emit(args, payload, text)
    return EXIT_OK if all(ok for _, ok, _ in checks) else EXIT_PROPERTY


# ---------------------------------------------------------------------------
# argument plumbing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skirho",
        description="term rewriting for combinator calculi and a reflective process calculus",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, calculus: bool = True) -> None:
        if calculus:
            p.add_argument("--calculus", choices=CALCULI, required=True)
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--fuel", type=int, default=1000)
        p.add_argument("--names", type=str, default=None,
                       help="comma separated name literals")

    p = sub.add_parser("reduce", help="reduce a term and print the result")
    common(p)
    p.add_argument("--strategy", choices=("first", "all", "random"), default="first")
    p.add_argument("--gas", type=int, default=0, help="marker count (ski-gas only)")
    p.add_argument("term")

    p = sub.add_parser("trace", help="reduce a term and print every step")
    common(p)
    p.add_argument("--strategy", choices=("first", "all", "random"), default="first")
    p.add_argument("--gas", type=int, default=0, help="marker count (ski-gas only)")
    p.add_argument("term")

    p = sub.add_parser("translate", help="translate between the process calculus and combinators")
    common(p)
    p.add_argument("term")

    p = sub.add_parser("sort", help="infer the sort of a combinator")
    common(p)
    p.add_argument("term")

    p = sub.add_parser("barbs", help="observable output subjects")
    common(p)
    p.add_argument("--depth", type=int, default=None,
                   help="bound for eventual barbs; omit for immediate barbs")
    p.add_argument("term")

    p = sub.add_parser("bisim", help="bounded barbed bisimulation check")
    common(p)
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("left")
    p.add_argument("right")

    p = sub.add_parser("faithfulness", help="compare verdicts across the translation")
    common(p, calculus=False)
    p.add_argument("--calculus", choices=("rho",), default="rho")
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("left")
    p.add_argument("right")

    p = sub.add_parser("roundtrip", help="check both translation round trips for one input")
    common(p)
    p.add_argument("term")

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "reduce":
            return _cmd_reduce(args, verbose=False)
        if args.command == "trace":
            return _cmd_reduce(args, verbose=True)
        if args.command == "translate":
            return _cmd_translate(args)
        if args.command == "sort":
            return _cmd_sort(args)
        if args.command == "barbs":
            return _cmd_barbs(args)
        if args.command == "bisim":
            return _cmd_bisim(args)
        if args.command == "faithfulness":
            return _cmd_faithfulness(args)
        if args.command == "roundtrip":
            return _cmd_roundtrip(args)
        raise CliError(f"unknown command {args.command!r}", EXIT_INPUT)
    except CliError as err:
        print(str(err), file=sys.stderr)
        return err.code
    except FuelExhausted as err:
        print(str(err), file=sys.stderr)
        return EXIT_FUEL


if __name__ == "__main__":
    sys.exit(main())
