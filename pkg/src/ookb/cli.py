"""Command-line front end.

Subcommands: load, stats, solve, subsume, describe, compare, path, gen.
Exit codes: 0 success, 1 query false / inconsistent KB, 2 usage,
3 load error, 4 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from typing import List, Optional, Sequence

from . import __version__
from .engine import LEX_MIN_DEPTH, RANDOM_POLICY, answer_set
from .errors import (
    BudgetExceededError,
    InconsistentKBError,
    KBLoadError,
    OOKBError,
    UniverseCapError,
    UnknownSymbolError,
)
from .grounder import DEFAULT_UNIVERSE_CAP, saturate
from .model import OOKBDomain
from .parser import load_kb_files, parse_atom, parse_atoms, render_atoms, render_domain
from .queries import compare, describe, find_paths, subsumes
from .stats import kb_stats
from .synth import GenProfile, generate_synthetic

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_USAGE = 2
EXIT_LOAD = 3
EXIT_RESOURCE = 4


@dataclass
class RunConfig:
    kb_paths: List[str]
    max_depth: int
    policy: str
    fmt: str
    universe_cap: int
    seed: Optional[int]
    implicit_decl: bool


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        return default


def _add_common(sub: argparse.ArgumentParser, needs_kb: bool = True):
    if needs_kb:
        sub.add_argument(
            "-k", "--kb", action="append", default=[], metavar="FILE",
            help="knowledge-base file; repeat to concatenate several",
        )
        sub.add_argument(
            "--implicit-decl", action="store_true",
            help="declare referenced symbols on first use instead of erroring",
        )
    sub.add_argument(
        "--depth", type=int, default=_env_int("OOKB_MAX_DEPTH", 1),
        help="maximum Skolem nesting depth (default 1, env OOKB_MAX_DEPTH)",
    )
    sub.add_argument(
        "--policy", choices=[LEX_MIN_DEPTH, RANDOM_POLICY], default=LEX_MIN_DEPTH,
        help="representative selection policy",
    )
    sub.add_argument("--seed", type=int, default=None, help="seed for the random policy")
    sub.add_argument("--format", choices=["text", "json"], default="text", dest="fmt")
    sub.add_argument(
        "--universe-cap", type=int,
        default=_env_int("OOKB_UNIVERSE_CAP", DEFAULT_UNIVERSE_CAP),
        help="maximum number of universe terms (env OOKB_UNIVERSE_CAP)",
    )


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="ookb", description=__doc__)
    top.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = top.add_subparsers(dest="command", required=True)

    p = subs.add_parser("load", help="validate KB files and report problems")
    _add_common(p)

    p = subs.add_parser("stats", help="per-category statement counts")
    _add_common(p)

    p = subs.add_parser("solve", help="compute an answer set and constraint report")
    _add_common(p)
    p.add_argument(
        "--assert", action="append", default=[], dest="asserts", metavar="ATOM",
        help="extra input fact, e.g. 'instance_of(i, cell)'; repeatable",
    )
    p.add_argument(
        "--assert-file", default=None, metavar="FILE",
        help="file of extra input facts, one atom per statement",
    )
    p.add_argument(
        "--dump-ground", default=None, metavar="FILE",
        help="also write the instantiated ground program to FILE",
    )

    p = subs.add_parser("subsume", help="is C1 subsumed by C2?")
    p.add_argument("c1")
    p.add_argument("c2")
    _add_common(p)

    p = subs.add_parser("describe", help="memberships and values of a fresh instance")
    p.add_argument("cls", metavar="C")
    p.add_argument("--msc", action="store_true", help="most specific answer only")
    _add_common(p)

    p = subs.add_parser("compare", help="similarities and differences of two classes")
    p.add_argument("c1")
    p.add_argument("c2")
    _add_common(p)

    p = subs.add_parser("path", help="relation paths between two classes")
    p.add_argument("c1")
    p.add_argument("c2")
    p.add_argument("--rel", default="", metavar="R1,R2",
                   help="comma-separated restrictive relation set")
    p.add_argument("--max-len", type=int, default=3)
    p.add_argument("--max-paths", type=int, default=None)
    _add_common(p)

    p = subs.add_parser("gen", help="generate a synthetic KB")
    p.add_argument("--classes", type=int, default=6)
    p.add_argument("--relations", type=int, default=2)
    p.add_argument("--skolems", type=int, default=2)
    p.add_argument("--eq-density", type=float, default=0.0)
    p.add_argument("--cycle-prob", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--out", default=None, metavar="FILE")
    p.add_argument("--format", choices=["text", "json"], default="text", dest="fmt")
    return top


def _emit_error(fmt: str, category: str, message: str, **extra):
    if fmt == "json":
        payload = {"error": category, "message": message}
        payload.update(extra)
        print(json.dumps(payload, sort_keys=True), file=sys.stderr)
    else:
        print(f"error: {category}: {message}", file=sys.stderr)


def _emit_load_errors(fmt: str, exc: KBLoadError):
    for e in exc.errors:
        if fmt == "json":
            print(
                json.dumps(
                    {
                        "error": "load",
                        "kind": e.kind,
                        "message": e.message,
                        "file": e.span.file,
                        "line": e.span.line,
                        "column": e.span.column,
                    },
                    sort_keys=True,
                ),
                file=sys.stderr,
            )
        else:
            print(f"error: {e}", file=sys.stderr)


def _load(args) -> OOKBDomain:
    if not args.kb:
        raise KBLoadError([])
    return load_kb_files(args.kb, implicit_decl=args.implicit_decl)


def _cmd_load(args) -> int:
    domain = _load(args)
    rule_count = (
        len(domain.descriptive_rules)
        + len(domain.equality_rules)
        + len(domain.constraint_rules)
        + len(domain.sufficient_conditions)
    )
    if args.fmt == "json":
        print(
            json.dumps(
                {
                    "ok": True,
                    "classes": len(domain.classes),
                    "individuals": len(domain.individuals),
                    "relations": len(domain.relations),
                    "rules": rule_count,
                },
                sort_keys=True,
            )
        )
    else:
        print(
            f"ok: {len(domain.classes)} classes, {len(domain.individuals)} individuals, "
            f"{len(domain.relations)} relations, {rule_count} rules"
        )
    return EXIT_OK


def _cmd_stats(args) -> int:
    table = kb_stats(_load(args))
    if args.fmt == "json":
        print(json.dumps(table.to_json(), indent=2, sort_keys=True))
    else:
        for label, value in table.rows():
            if isinstance(value, float):
                value = f"{value:.2f}"
            print(f"{label}: {value}")
    return EXIT_OK


def _solve_seeds(args) -> list:
    seeds = [parse_atom(text) for text in args.asserts]
    if args.assert_file:
        with open(args.assert_file, "r", encoding="utf-8") as fh:
            seeds.extend(parse_atoms(fh.read(), args.assert_file))
    return seeds


def _cmd_solve(args) -> int:
    domain = _load(args)
    seeds = _solve_seeds(args)
    if args.dump_ground:
        program = saturate(domain, seeds, args.depth, args.universe_cap).ground_program()
        with open(args.dump_ground, "w", encoding="utf-8") as fh:
            fh.write(program.render_text())
    ans = answer_set(
        domain,
        seeds,
        max_depth=args.depth,
        policy=args.policy,
        seed=args.seed,
        universe_cap=args.universe_cap,
    )
    if args.fmt == "json":
        payload = {
            "depth": ans.depth,
            "consistent": ans.consistent,
            "atoms": [a.text for a in ans.atoms.atoms()],
            "substitution": {x.text: y.text for x, y in ans.substitution.items()},
            "violations": [v.to_json() for v in ans.violations],
        }
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(f"% depth {ans.depth}, {'consistent' if ans.consistent else 'inconsistent'}")
        sys.stdout.write(render_atoms(ans.atoms.atoms(), "text"))
        for v in ans.violations:
            flag = ", depth-sensitive" if v.depth_sensitive else ""
            print(f"% violation: {v.kind} {v.constraint.text} count {v.count}{flag}")
    return EXIT_OK if ans.consistent else EXIT_FALSE


def _cmd_subsume(args) -> int:
    verdict = subsumes(_load(args), args.c1, args.c2, args.depth, args.universe_cap)
    if args.fmt == "json":
        print(json.dumps({"subsumed": verdict}))
    else:
        print("true" if verdict else "false")
    return EXIT_OK if verdict else EXIT_FALSE


def _cmd_describe(args) -> int:
    d = describe(_load(args), args.cls, args.depth, msc_only=args.msc,
                 universe_cap=args.universe_cap)
    if args.fmt == "json":
        print(json.dumps(d.to_json(), indent=2, sort_keys=True))
    else:
        for c in d.member_of:
            print(f"member_of({c}).")
        for r, x, y in d.values:
            print(f"value({r}, {x.text}, {y.text}).")
    return EXIT_OK


def _cmd_compare(args) -> int:
    c = compare(_load(args), args.c1, args.c2, args.depth, args.universe_cap)
    if args.fmt == "json":
        print(json.dumps(c.to_json(), indent=2, sort_keys=True))
    else:
        for x in c.shared_classes:
            print(f"shared_class({x}).")
        for x, owner in c.dist_classes:
            print(f"dist_class({x}, {owner}).")
        for r in c.shared_relations:
            print(f"shared_relation({r}).")
        for r, dom, rng, owner in c.dist_relations:
            print(f"dist_relation({r}, {dom or '_'}, {rng or '_'}, {owner}).")
    return EXIT_OK


def _cmd_path(args) -> int:
    restrict = [r for r in args.rel.split(",") if r]
    paths = find_paths(
        _load(args),
        args.c1,
        args.c2,
        restrict,
        max_depth=args.depth,
        max_len=args.max_len,
        max_paths=args.max_paths,
        universe_cap=args.universe_cap,
    )
    if args.fmt == "json":
        print(json.dumps([p.to_json() for p in paths], indent=2, sort_keys=True))
    else:
        for p in paths:
            pieces = [p.classes[0]]
            for rel, cls in zip(p.relations, p.classes[1:]):
                pieces.append(f"-{rel}->")
                pieces.append(cls)
            witness = ", ".join(t.text for t in p.witness)
            print(f"{' '.join(pieces)}  [witness: {witness}]")
    return EXIT_OK if paths else EXIT_FALSE


def _cmd_gen(args) -> int:
    profile = GenProfile(
        n_classes=args.classes,
        n_relations=args.relations,
        skolems_per_rule=args.skolems,
        eq_density=args.eq_density,
        cycle_prob=args.cycle_prob,
        seed=args.seed,
    )
    text = render_domain(generate_synthetic(profile))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


_COMMANDS = {
    "load": _cmd_load,
    "stats": _cmd_stats,
    "solve": _cmd_solve,
    "subsume": _cmd_subsume,
    "describe": _cmd_describe,
    "compare": _cmd_compare,
    "path": _cmd_path,
    "gen": _cmd_gen,
}


def run_cli(argv: Sequence[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    fmt = getattr(args, "fmt", "text")
    try:
        return _COMMANDS[args.command](args)
    except KBLoadError as exc:
        if not exc.errors:
            _emit_error(fmt, "usage", "at least one -k/--kb file is required")
            return EXIT_USAGE
        _emit_load_errors(fmt, exc)
        return EXIT_LOAD
    except FileNotFoundError as exc:
        _emit_error(fmt, "load", str(exc))
        return EXIT_LOAD
    except (UniverseCapError, BudgetExceededError) as exc:
        _emit_error(fmt, "resource", str(exc))
        return EXIT_RESOURCE
    except InconsistentKBError as exc:
        _emit_error(fmt, "inconsistent-kb", str(exc), reason=exc.reason)
        return EXIT_FALSE
    except UnknownSymbolError as exc:
        _emit_error(fmt, "unknown-symbol", str(exc))
        return EXIT_USAGE
    except (OOKBError, ValueError) as exc:
        _emit_error(fmt, "error", str(exc))
        return EXIT_USAGE


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
