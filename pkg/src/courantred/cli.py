"""Command line driver: ``courantred <command> ...``."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import scenario as sc
from .errors import DataError

CORPUS_ENV = "COURANTRED_CORPUS"

VALIDATION_TASKS = [t for t in sc.TASKS if t not in ("reduce", "ham-reduce")]


def corpus_dir() -> Path:
    env = os.environ.get(CORPUS_ENV)
    return Path(env) if env else Path(__file__).parent / "corpus"


def corpus_files() -> list:
    return sorted(corpus_dir().glob("*.scn"))


def _load(path, args) -> sc.ScenarioFile:
    sf = sc.parse(path)
    for key in ("seed", "samples", "max_degree"):
        v = getattr(args, key, None)
        if v is not None:
            setattr(sf, key, v)
    return sf


def _run_file(path, args, only=None) -> sc.Report:
    sf = _load(path, args)
    return sc.run_tasks(sf, only)


def _emit_input_error(exc: Exception) -> int:
    print(f"input error: {exc}", file=sys.stderr)
    return 2


def cmd_single(args, only) -> int:
    try:
        sf = _load(args.file, args)
    except DataError as exc:
        return _emit_input_error(exc)
    if only == "validate":
        tasks = [t for t, _ in sf.tasks if t in VALIDATION_TASKS] or ["master-equation"]
        rep = sc.run_tasks(sf, tasks)
    else:
        rep = sc.run_tasks(sf, [only])
    sys.stdout.write(rep.render())
    return rep.exit_code


def cmd_report(args) -> int:
    try:
        sf = _load(args.file, args)
    except DataError as exc:
        return _emit_input_error(exc)
    rep = sc.run_tasks(sf)
    text = rep.render()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        good = sum(1 for r in rep.results if r.as_expected)
        print(f"{sf.name}: {good}/{len(rep.results)} tasks as expected, exit {rep.exit_code}")
    else:
        sys.stdout.write(text)
    return rep.exit_code


def cmd_corpus(args) -> int:
    files = corpus_files()
    if args.list:
        for f in files:
            print(f.stem)
        return 0
    worst = 0
    for f in files:
        try:
            rep = _run_file(f, args)
        except DataError as exc:
            print(f"{f.stem}: input error: {exc}")
            worst = max(worst, 2)
            continue
        text = rep.render()
        golden = f.with_suffix(".report")
        status = "ok"
        code = rep.exit_code
        if args.update_golden:
            golden.write_text(text, encoding="utf-8")
            status = "written"
        elif not golden.exists():
            status = "missing golden"
            code = max(code, 1)
        elif golden.read_text(encoding="utf-8") != text:
            status = "golden mismatch"
            code = max(code, 1)
        if args.verbose:
            sys.stdout.write(text)
        print(f"{f.stem}: exit {rep.exit_code}, {status}")
        worst = max(worst, code)
    return worst


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="courantred", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="override the scenario's sampling seed")
    common.add_argument("--samples", type=int, help="override the number of random samples")
    common.add_argument("--max-degree", dest="max_degree", type=int,
                        help="override the coefficient degree of random sections")
    sub = p.add_subparsers(dest="command", required=True)
    for name, hlp in (("validate", "run the validation tasks of a scenario"),
                      ("reduce", "run the coisotropic reduction of a scenario"),
                      ("ham-reduce", "run the hamiltonian reduction of a scenario")):
        s = sub.add_parser(name, parents=[common], help=hlp)
        s.add_argument("file")
    r = sub.add_parser("report", parents=[common], help="run every task of a scenario")
    r.add_argument("file")
    r.add_argument("--out", help="write the report here instead of stdout")
    c = sub.add_parser("corpus", parents=[common], help="bundled scenarios")
    g = c.add_mutually_exclusive_group(required=True)
    g.add_argument("--list", action="store_true")
    g.add_argument("--run-all", action="store_true")
    c.add_argument("--update-golden", action="store_true", help="rewrite the golden reports")
    c.add_argument("--verbose", action="store_true", help="print full reports")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command in ("validate", "reduce", "ham-reduce"):
        return cmd_single(args, args.command)
    if args.command == "report":
        return cmd_report(args)
    return cmd_corpus(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
