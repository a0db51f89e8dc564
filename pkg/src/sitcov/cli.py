"""``sitcov`` command line: validate -> expand/count -> bind PODs -> coverage -> emit.

Exit codes: 0 success, 1 model/domain error, 2 usage error, 3 I/O error.
Payload goes to stdout (or ``-o``) only on success; diagnostics go to stderr.
A MODEL argument of ``@reference`` selects the bundled reference model.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import grid as gridmod
from .model import SitcovError
from .modelio import (SchemaError, DocumentSyntaxError, ValidationFailed, dump_json,
                      parse_model, parse_requirements, reference_model_bytes)
from .pods import (GlobalIndexSpace, compose, cross_type_consistent,
                   global_to_tuple, sample)
from .requirements import (build_requirements, compress_ids, coverage_by_type,
                           coverage_report, emit, lint_requirement)

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
REFERENCE = "@reference"


class IOFailure(Exception):
    pass


class _Reported(Exception):
    """Diagnostics already printed; exit with the domain-error code."""


def _read(path: str) -> bytes:
    if path == REFERENCE:
        return reference_model_bytes()
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise IOFailure(f"cannot read {path}: {exc.strerror or exc}") from exc


def _load_model(path: str):
    return parse_model(_read(path))


def _all_grids(model, workers: int = 1):
    return {t: gridmod.expand(model, t, workers) for t in model.type_names}


def _lines(*lines: str) -> bytes:
    return "".join(line + "\n" for line in lines).encode("utf-8")


def cmd_validate(args) -> bytes:
    data = _read(args.model)
    try:
        parse_model(data)
    except ValidationFailed as exc:
        for issue in exc.issues:
            print(issue, file=sys.stderr)
        raise _Reported() from exc
    except SchemaError as exc:
        print(f"SCHEMA {exc.path} {exc.reason}", file=sys.stderr)
        raise _Reported() from exc
    except DocumentSyntaxError as exc:
        print(f"SYNTAX {exc}", file=sys.stderr)
        raise _Reported() from exc
    return _lines("OK")


def cmd_expand(args) -> bytes:
    model = _load_model(args.model)
    grid = gridmod.expand(model, args.type, args.workers)
    if args.format == "json":
        return dump_json(gridmod.grid_to_records(grid))
    return gridmod.grid_to_csv(grid)


def cmd_count(args) -> bytes:
    model = _load_model(args.model)
    names = [args.type] if args.type else model.type_names
    lines = []
    for name in names:
        stats = gridmod.count(model, name)
        lines.append(f"{stats.type_name} unpruned={stats.unpruned_count} pruned={stats.pruned_count}")
    if not args.type:
        lines.append(f"GLOBAL total={GlobalIndexSpace.from_model(model).total}")
    return _lines(*lines)


def cmd_situation(args) -> bytes:
    model = _load_model(args.model)
    space = GlobalIndexSpace.from_model(model)
    ids = global_to_tuple(space, args.global_id)
    situations = compose(model, ids)
    lines = [f"global id {args.global_id} = ({', '.join(map(str, ids))})"]
    for name, row_id, sit in zip(model.type_names, ids, situations):
        factors = model.get_type(name).factors
        cells = ", ".join(f"{f.name}={label}" for f, label in zip(factors, sit.labels))
        lines.append(f"{name} #{row_id}: {cells}")
    if model.cross_type_hard_constraints():
        ok = cross_type_consistent(model, situations)
        lines.append(f"cross-type constraints: {'satisfied' if ok else 'violated'}")
    return _lines(*lines)


def _requirements(args, model, grids):
    specs = parse_requirements(_read(args.requirements))
    reqs = build_requirements(model, specs, grids)
    for req in reqs:
        for warning in lint_requirement(req):
            print(f"warning: {warning}", file=sys.stderr)
    return reqs


def _report_lines(report) -> list[str]:
    lines = [report.summary()]
    if report.uncovered:
        lines.append(f"uncovered: {compress_ids(report.uncovered)}")
    return lines


def cmd_coverage(args) -> bytes:
    model = _load_model(args.model)
    if args.type:
        grid = gridmod.expand(model, args.type)
        reqs = _requirements(args, model, {grid.type_name: grid})
        return _lines(*_report_lines(coverage_report(reqs, grid)))
    grids = _all_grids(model)
    reqs = _requirements(args, model, grids)
    reports = coverage_by_type(reqs, grids)
    lines = [line for r in reports.values() for line in _report_lines(r)]
    overall = all(r.complete for r in reports.values())
    lines.append(f"OVERALL {'COMPLETE' if overall else 'INCOMPLETE'}")
    return _lines(*lines)


def cmd_emit(args) -> bytes:
    model = _load_model(args.model)
    grids = _all_grids(model)
    reqs = _requirements(args, model, grids)
    return emit(reqs, grids, args.format)


def cmd_sample(args) -> bytes:
    model = _load_model(args.model)
    if args.global_space:
        target = GlobalIndexSpace.from_model(model)
    else:
        target = gridmod.LazyGrid(model, args.type)
    return _lines(*map(str, sample(target, args.n, args.seed)))


def cmd_reference(args) -> bytes:
    return reference_model_bytes()


def _non_negative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sitcov",
        description="Situation coverage grids and POD-qualified robustness requirements.")
    sub = parser.add_subparsers(dest="command", required=True)
    model_help = f"model JSON file, or {REFERENCE} for the bundled model"

    p = sub.add_parser("validate", help="check a model document")
    p.add_argument("model", help=model_help)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("expand", help="write the coverage grid of one factor type")
    p.add_argument("model", help=model_help)
    p.add_argument("--type", required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--workers", type=_positive, default=1)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("count", help="unpruned and pruned grid sizes")
    p.add_argument("model", help=model_help)
    p.add_argument("--type")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("situation", help="decode a global situation id")
    p.add_argument("model", help=model_help)
    p.add_argument("--global-id", type=int, required=True)
    p.set_defaults(func=cmd_situation)

    p = sub.add_parser("coverage", help="POD coverage of the grids")
    p.add_argument("model", help=model_help)
    p.add_argument("requirements")
    p.add_argument("--type")
    p.set_defaults(func=cmd_coverage)

    p = sub.add_parser("emit", help="render requirements with their POD appendix")
    p.add_argument("model", help=model_help)
    p.add_argument("requirements")
    p.add_argument("--format", choices=("md", "json", "csv"), default="md")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_emit)

    p = sub.add_parser("sample", help="seeded uniform sample of row or global ids")
    p.add_argument("model", help=model_help)
    where = p.add_mutually_exclusive_group(required=True)
    where.add_argument("--type")
    where.add_argument("--global", dest="global_space", action="store_true")
    p.add_argument("--n", type=_non_negative, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("reference", help="print the bundled reference model")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_reference)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        payload = args.func(args)
    except IOFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except _Reported:
        return EXIT_DOMAIN
    except SitcovError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN

    output = getattr(args, "output", None)
    if output:
        try:
            Path(output).write_bytes(payload)
        except OSError as exc:
            print(f"error: cannot write {output}: {exc.strerror or exc}", file=sys.stderr)
            return EXIT_IO
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()
    return EXIT_OK


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
