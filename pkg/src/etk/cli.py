"""Command-line front end: classify, catalog, check and model."""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Sequence

from . import classify as cls
from . import parallelism
from .equivariance import InvalidGroupError, is_invariant
from .groups import FAMILIES, GroupSpec, catalog, load_group, parse_group_args, validate
from .tensors import TensorElement

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _max_n() -> int:
    raw = os.environ.get("ETK_MAX_N", "6")
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"ETK_MAX_N must be an integer, got {raw!r}") from None


def _add_group_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--group", choices=FAMILIES, help="builtin group family")
    src.add_argument("--group-file", type=Path, help="JSON group spec")
    p.add_argument("--n", type=int, help="size (complex dimension for u)")
    p.add_argument("--s", type=int, help="subspace dimension for block")
    p.add_argument("--n1", type=int, help="first factor for product_oo")
    p.add_argument("--n2", type=int, help="second factor for product_oo")
    p.add_argument("--generators", help="JSON list of matrices for finite")


def _add_output_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", type=Path, help="write output here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="etk", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="admissible curvature, torsion and inner torsion")
    _add_group_args(p)
    p.add_argument("--g-valued-filter", action="store_true", help="also restrict curvature to g-valued maps")
    p.add_argument("--seed", type=int, default=0, help="seed for the Cayley consistency check")
    _add_output_args(p)

    p = sub.add_parser("catalog", help="list builtin groups")
    p.add_argument("--n", type=int, default=3)
    _add_output_args(p)

    p = sub.add_parser("check", help="validate a group, or test a tensor for invariance")
    _add_group_args(p)
    p.add_argument("--tensor", type=Path, help="JSON tensor to test for invariance")
    _add_output_args(p)

    p = sub.add_parser("model", help="torsion and curvature of a parallelism model")
    p.add_argument("input", type=Path, help="JSON with n, lambda and gamma")
    _add_output_args(p)
    return parser


def _read_json(path: Path):
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise FileNotFoundError(f"cannot read {path}: {exc.strerror}") from None


def _group(args) -> GroupSpec:
    if args.group_file is not None:
        try:
            g = load_group(args.group_file)
        except OSError as exc:
            raise FileNotFoundError(f"cannot read {args.group_file}: {exc.strerror}") from None
    else:
        gens = json.loads(args.generators) if args.generators else None
        try:
            g = parse_group_args(args.group, n=args.n, s=args.s, n1=args.n1, n2=args.n2, generators=gens)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    cap = _max_n()
    if g.n > cap:
        raise UsageError(f"ambient dimension {g.n} exceeds ETK_MAX_N={cap}")
    return g


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def _dump(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _cmd_classify(args) -> int:
    g = _group(args)
    report = cls.classify(g, apply_g_valued_filter=args.g_valued_filter, seed=args.seed)
    _emit(cls.render(report, args.format), args.out)
    return EXIT_OK


def _cmd_catalog(args) -> int:
    if args.n <= 0 or args.n > _max_n():
        raise UsageError(f"--n must lie in 1..{_max_n()}")
    rows = catalog(args.n)
    if args.format == "json":
        _emit(_dump({"schema_version": cls.SCHEMA_VERSION, "n": args.n, "groups": rows}), args.out)
        return EXIT_OK
    lines = []
    for r in rows:
        if r.get("name") is None:
            lines.append(f"{r['family']:<11} (params: {r['params']})")
        else:
            lines.append(f"{r['family']:<11} {r['name']:<18} ambient {r['ambient_n']}  "
                         f"dim g = {r['lie_algebra_dim']}  reps = {r['component_reps']}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _cmd_check(args) -> int:
    g = _group(args)
    violations = validate(g)
    doc: dict = {
        "group": g.name,
        "valid": not violations,
        "violations": [{"kind": v.kind, "message": v.message} for v in violations],
    }
    ok = not violations
    if args.tensor is not None and ok:
        t = TensorElement.from_dict(_read_json(args.tensor))
        verdict = is_invariant(g, t)
        doc["tensor"] = t.spec.label()
        doc["invariant"] = verdict
        ok = verdict
    if args.format == "json":
        _emit(_dump(doc), args.out)
    else:
        lines = [f"{g.name}: " + ("valid" if not violations else "INVALID")]
        lines += [f"  {v}" for v in violations]
        if "invariant" in doc:
            lines.append(f"tensor {doc['tensor']}: " + ("invariant" if doc["invariant"] else "NOT invariant"))
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if ok else EXIT_FAIL


def _cmd_model(args) -> int:
    d = parallelism.from_dict(_read_json(args.input))
    if d.n > _max_n():
        raise UsageError(f"n = {d.n} exceeds ETK_MAX_N={_max_n()}")
    doc = parallelism.model_document(d)
    if args.format == "json":
        _emit(_dump(doc), args.out)
    else:
        lines = [f"n = {doc['n']}", "Jacobi identity: holds", f"torsion-free: {doc['torsion_free']}"]
        lines += [f"T[{k}] = {v}" for k, v in doc["torsion"].items()]
        lines += [f"R[{k}] = {v}" for k, v in doc["curvature"].items()]
        lines.append(f"first Bianchi identity: {'holds' if doc['first_bianchi_holds'] else 'fails'}")
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


COMMANDS = {"classify": _cmd_classify, "catalog": _cmd_catalog, "check": _cmd_check, "model": _cmd_model}


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"etk: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidGroupError as exc:
        print(f"etk: invalid group {exc.group.name}", file=sys.stderr)
        for v in exc.violations:
            print(f"  {v}", file=sys.stderr)
        return EXIT_FAIL
    except (OSError, ValueError, KeyError, TypeError) as exc:
        # unreadable or malformed input files, Jacobi failures
        print(f"etk: {exc}", file=sys.stderr)
        return EXIT_FAIL


def main() -> None:
    sys.exit(run())
