"""Command-line front end.

Exit codes: 0 success or positive verdict, 1 negative verdict, 2 parse or
usage error, 3 invalid model.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .apt import AptError, apt_membership, build_apt, dump_apt
from .concepts import (
    check_ne_direct,
    find_ne,
    gen_negotiation,
    gen_secretary,
    ne_exists_formula,
    ne_formula,
)
from .core.discount import DiscountError
from .core.formula import free_names
from .core.game import UnboundName
from .evaluation import EvaluationError, Evaluator, check_threshold
from .lasso import UnsupportedFormula
from .textio import (
    ModelValidationError,
    ParseError,
    Report,
    parse_assignment,
    parse_formula,
    parse_model,
    parse_rational,
    render_formula,
    render_model,
)

EXIT_OK, EXIT_NO, EXIT_USAGE, EXIT_INVALID = 0, 1, 2, 3
BUILTIN_MODELS = ("secretary", "negotiation")
NE_NAMES = {"phiNE-hat": "exists", "phiNE": "profile"}

log = logging.getLogger("sldcheck")


class UsageError(Exception):
    pass


def _data(name: str):
    return resources.files("sldcheck") / "data" / name


def load_model(ref: str):
    path = Path(ref)
    if path.is_file():
        return parse_model(path.read_text(encoding="utf-8"), source=str(path))
    if ref in BUILTIN_MODELS:
        res = _data(f"{ref}.cgs")
        return parse_model(res.read_text(encoding="utf-8"), source=f"{ref}.cgs")
    raise UsageError(f"model {ref!r} is neither a file nor one of {', '.join(BUILTIN_MODELS)}")


def load_formula(ref: str, model):
    g = model.cgs
    if ref in model.formulas:
        return model.formulas[ref]
    if ref in NE_NAMES:
        if set(model.goals) != set(g.agents):
            raise UsageError(f"{ref} needs a goal for every agent in the model")
        if NE_NAMES[ref] == "exists":
            return ne_exists_formula(model.goals, g.agents)
        return ne_formula(model.goals, [f"s{k}" for k in range(len(g.agents))], g.agents)
    path = Path(ref)
    if path.is_file():
        return parse_formula(path.read_text(encoding="utf-8").strip(), model.discounts, g.agents,
                             source=str(path))
    return parse_formula(ref, model.discounts, g.agents, source="<formula>")


def load_assignment(ref: str, g):
    path = Path(ref)
    if path.is_file():
        return parse_assignment(path.read_text(encoding="utf-8"), g, source=str(path))
    res = _data("assign") / f"{ref}.asg"
    if res.is_file():
        return parse_assignment(res.read_text(encoding="utf-8"), g, source=f"{ref}.asg")
    raise UsageError(f"assignment {ref!r} not found")


def _threshold(text: str) -> Fraction:
    try:
        value = parse_rational(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not 0 <= value <= 1:
        raise UsageError(f"threshold {value} outside [0,1]")
    return value


def _position(args, g):
    pos = args.position or g.initial
    if pos not in g.positions:
        raise UsageError(f"unknown position {pos!r}")
    return pos


def _defaults_note(defaulted, g) -> dict:
    out = {}
    for name, missing in defaulted.items():
        if missing:
            out[f"default.{name}"] = f"{g.actions[0]} at " + " ".join(missing)
    return out


def _emit(report: Report, mode: str, out):
    out.write((report.to_kv() if mode == "kv" else report.to_text()) + "\n")


# -- subcommands --------------------------------------------------------------

def cmd_eval(args, out):
    model = load_model(args.model)
    g = model.cgs
    phi = load_formula(args.formula, model)
    chi, defaulted = ({}, {}) if args.assign is None else load_assignment(args.assign, g)
    missing = sorted(free_names(phi, g.agents) - set(chi))
    if missing:
        raise UsageError(f"formula has free names without strategies: {', '.join(missing)}")
    pos = _position(args, g)
    value = Evaluator(g, enumeration=args.enumeration).value(phi, chi, pos)
    extra = {"position": pos, **_defaults_note(defaulted, g)}
    _emit(Report(render_formula(phi), value, extra=extra), args.output, out)
    return EXIT_OK


def cmd_check(args, out):
    model = load_model(args.model)
    phi = load_formula(args.formula, model)
    theta = _threshold(args.threshold)
    cmp = ">=" if args.cmp == "ge" else ">"
    verdict, report = check_threshold(model.cgs, phi, theta, cmp, enumeration=args.enumeration)
    _emit(report, args.output, out)
    return EXIT_OK if verdict else EXIT_NO


def _need_goals(model):
    missing = [a for a in model.cgs.agents if a not in model.goals]
    if missing:
        raise UsageError(f"model has no goal for {', '.join(missing)}")
    return model.goals


def cmd_ne_check(args, out):
    model = load_model(args.model)
    g = model.cgs
    goals = _need_goals(model)
    chi, defaulted = load_assignment(args.assign, g)
    missing = [a for a in g.agents if a not in chi]
    if missing:
        raise UsageError(f"assignment has no strategy for {', '.join(missing)}")
    ok, w = check_ne_direct(g, {a: chi[a] for a in g.agents}, goals, enumeration=args.enumeration)
    extra = {f"value.{a}": w.values[a] for a in g.agents}
    extra.update({f"best_deviation.{a}": w.deviation_values[a] for a in g.agents})
    extra.update(_defaults_note(defaulted, g))
    _emit(Report("nash equilibrium check", verdict=ok, witness=w.table(g), extra=extra), args.output, out)
    return EXIT_OK if ok else EXIT_NO


def cmd_ne_find(args, out):
    model = load_model(args.model)
    g = model.cgs
    found = find_ne(g, _need_goals(model), enumeration=args.enumeration)
    if found is None:
        _emit(Report("nash equilibrium search", verdict=False), args.output, out)
        return EXIT_NO
    _, w = found
    extra = {f"value.{a}": w.values[a] for a in g.agents}
    _emit(Report("nash equilibrium search", verdict=True, witness=w.table(g), extra=extra), args.output, out)
    return EXIT_OK


def cmd_apt_build(args, out):
    model = load_model(args.model)
    phi = load_formula(args.formula, model)
    a = build_apt(phi, _threshold(args.threshold), model.cgs)
    out.write(dump_apt(a))
    out.write(f"state_count={len(a.states)}\n")
    return EXIT_OK


def cmd_apt_member(args, out):
    model = load_model(args.model)
    g = model.cgs
    phi = load_formula(args.formula, model)
    theta = _threshold(args.threshold)
    chi, defaulted = load_assignment(args.assign, g)
    a = build_apt(phi, theta, g)
    pos = _position(args, g)
    accepted = apt_membership(a, g, chi, pos)
    extra = {
        "threshold": theta,
        "position": pos,
        "result": "accept" if accepted else "reject",
        **_defaults_note(defaulted, g),
    }
    _emit(Report(render_formula(phi), verdict=accepted, extra=extra), args.output, out)
    return EXIT_OK if accepted else EXIT_NO


def _parse_offers(text: str):
    offers = []
    for item in text.split(","):
        parts = item.split(":")
        if len(parts) != 2:
            raise UsageError(f"offer {item!r} is not ALICE:BETH")
        try:
            offers.append(tuple(parse_rational(p) for p in parts))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    return offers


def cmd_gen(args, out):
    if args.which == "secretary":
        model = gen_secretary()
    else:
        kwargs = {"depth": args.depth}
        if args.offers:
            kwargs["offers"] = _parse_offers(args.offers)
        try:
            model = gen_negotiation(**kwargs)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    text = render_model(model)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        out.write(text)
    return EXIT_OK


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sldcheck", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, formula=True):
        p.add_argument("--model", required=True, help="model file or built-in name")
        if formula:
            p.add_argument("--formula", required=True,
                           help="formula name from the model, phiNE-hat, a file, or inline text")
        p.add_argument("--output", choices=("text", "kv"), default="text")
        p.add_argument("--enumeration", choices=("lazy", "full"), default="lazy")

    p = sub.add_parser("eval", help="exact value at a position")
    common(p)
    p.add_argument("--assign", help="assignment file or shipped assignment name")
    p.add_argument("--position")
    p.set_defaults(run=cmd_eval)

    p = sub.add_parser("check", help="threshold check at the initial position")
    common(p)
    p.add_argument("--threshold", required=True)
    p.add_argument("--cmp", choices=("ge", "gt"), default="ge")
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("ne-check", help="best-response check of a profile")
    common(p, formula=False)
    p.add_argument("--assign", required=True)
    p.set_defaults(run=cmd_ne_check)

    p = sub.add_parser("ne-find", help="search for a memoryless equilibrium")
    common(p, formula=False)
    p.set_defaults(run=cmd_ne_find)

    p = sub.add_parser("apt-build", help="dump the automaton for a threshold query")
    common(p)
    p.add_argument("--threshold", required=True)
    p.set_defaults(run=cmd_apt_build)

    p = sub.add_parser("apt-member", help="automaton membership of an assignment")
    common(p)
    p.add_argument("--threshold", required=True)
    p.add_argument("--assign", required=True)
    p.add_argument("--position")
    p.set_defaults(run=cmd_apt_member)

    p = sub.add_parser("gen", help="write a case-study model")
    p.add_argument("which", choices=BUILTIN_MODELS)
    p.add_argument("--offers", help="comma-separated ALICE:BETH splits, e.g. 1/2:1/2,2/3:1/3")
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--out")
    p.set_defaults(run=cmd_gen)
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    level = os.environ.get("SLDCHECK_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=err)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        log.debug("running %s", args.command)
        return args.run(args, out)
    except ModelValidationError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INVALID
    except (ParseError, UsageError, UnboundName, EvaluationError, AptError,
            UnsupportedFormula, DiscountError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
