"""Command-line entry point.

Exit codes: 0 when the verdict is a pass or a search succeeds, 1 for a failing
verdict or an unsuccessful search, 2 for unreadable or malformed input.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import serial
from .errors import DomainError, FormatError, InvariantViolation, PreconditionError, RankOneError, ValidationError
from .factor import (
    build_factor_map,
    check_factor_witness,
    check_topological_quotient,
    preimage_law,
    search_odometer_telescoping,
)
from .iso import SearchBounds, check_witness, search_witness
from .maps import calibrate, reduce, standardize, telescope
from .params import mass_profile, validate


@dataclass
class Outcome:
    code: int
    text: str
    doc: Optional[dict] = None


def _rationals(text: Optional[str]) -> Optional[list]:
    if text is None:
        return None
    try:
        return [serial.parse_rational(x.strip()) for x in text.split(",") if x.strip()]
    except FormatError as exc:
        raise FormatError(f"bad rational list {text!r}: {exc}") from exc


def _load_sequence(path, depth=None):
    seq = serial.sequence_from_doc(serial.read(path))
    if depth is not None:
        if depth > seq.depth:
            raise FormatError(f"{path} stores only {seq.depth} levels, --depth {depth} requested")
        seq = seq.truncate(depth)
    return seq


def _write(path, text) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise FormatError(f"cannot write {path}: {exc}") from exc


def _verdict(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


# commands --------------------------------------------------------------------------

def cmd_validate(args) -> Outcome:
    seq = _load_sequence(args.sequence, args.depth)
    window = [serial.decode_element(seq.group, t) for t in args.window or []]
    report = validate(seq, window)
    lines = [f"validate: {_verdict(report.accepted)} (depth {seq.depth})"]
    for c in report.violations:
        lines.append(f"  {c.name} fails at level {c.level}: {c.detail}")
    if report.structural_ok:
        lines.append("  mass profile: " + ", ".join(str(m) for m in mass_profile(seq)))
    lines.append(f"  identity in every F and C: {report.normalized}")
    doc = {"command": "validate", "accepted": report.accepted, "report": serial.to_plain(report)}
    return Outcome(0 if report.accepted else 1, "\n".join(lines), doc)


def cmd_transform(args) -> Outcome:
    seq = _load_sequence(args.sequence, args.depth)
    params = serial.transform_params_from_doc(serial.read(args.params), seq.group)
    try:
        if params["op"] == "telescope":
            out, _ = telescope(seq, params["l"])
            extra = {}
        elif params["op"] == "calibrate":
            out, _ = calibrate(seq, params["z"])
            extra = {}
        else:
            out, _, scale = reduce(seq, params["A"])
            extra = {"scale": serial.rational_str(scale)}
    except (InvariantViolation, ValidationError) as exc:
        return Outcome(1, f"transform: FAIL ({exc})", {"command": "transform", "ok": False, "error": str(exc)})
    text = serial.dumps(serial.sequence_to_doc(out))
    if args.out:
        _write(args.out, text)
        msg = f"transform: {params['op']} written to {args.out}"
    else:
        msg = text.rstrip("\n")
    return Outcome(0, msg, {"command": "transform", "ok": True, "sequence": serial.sequence_to_doc(out), **extra})


def _defect_lines(report) -> list:
    lines = []
    for r in report.rows:
        line = f"  n={r.n}: inclusion={r.inclusion} injective={r.injective}"
        if r.ratio is not None:
            line += (f" ratio={r.ratio} mirror-inclusion={r.inclusion_mirror} mirror-injective={r.injective_mirror}"
                     f" mirror-ratio={r.ratio_mirror} bound={r.bound}")
        lines.append(line)
    return lines


def cmd_iso_check(args) -> Outcome:
    T = _load_sequence(args.first, args.depth)
    T2 = _load_sequence(args.second, args.depth)
    _, w = serial.iso_witness_from_doc(serial.read(args.witness))
    if args.eps:
        from .iso import IsoWitness

        w = IsoWitness(w.k, w.l, w.Jt, w.J, _rationals(args.eps))
    report = check_witness(T, T2, w)
    lines = [f"iso-check: {_verdict(report.passed)}"] + _defect_lines(report)
    doc = {"command": "iso-check", "passed": report.passed, "report": serial.to_plain(report, T.group)}
    return Outcome(0 if report.passed else 1, "\n".join(lines), doc)


def cmd_iso_search(args) -> Outcome:
    T = _load_sequence(args.first, args.depth)
    T2 = _load_sequence(args.second, args.depth)
    parsed = serial.search_bounds_from_doc(serial.read(args.bounds))
    bounds = parsed["bounds"]
    if args.budget is not None:
        bounds = SearchBounds(bounds.max_level, bounds.max_subset, bounds.exhaustive_threshold, args.budget)
    eps = _rationals(args.eps) or parsed["eps"]
    w = search_witness(T, T2, parsed["steps"], eps, bounds, workers=args.workers)
    if w is None:
        return Outcome(1, "iso-search: not found within bounds", {"command": "iso-search", "found": False})
    text = serial.dumps(serial.iso_witness_to_doc(T.group, w))
    if args.out:
        _write(args.out, text)
        msg = f"iso-search: found, witness written to {args.out}"
    else:
        msg = "iso-search: found\n" + text.rstrip("\n")
    return Outcome(0, msg, {"command": "iso-search", "found": True, "witness": serial.iso_witness_to_doc(T.group, w)})


def _factor_inputs(args):
    T = _load_sequence(args.first, args.depth)
    T2 = _load_sequence(args.second, args.depth)
    _, w = serial.factor_witness_from_doc(serial.read(args.witness))
    if args.eps:
        from .factor import FactorWitness

        w = FactorWitness(w.k, w.J, _rationals(args.eps))
    return T, T2, w


def cmd_factor_check(args) -> Outcome:
    T, T2, w = _factor_inputs(args)
    report = check_factor_witness(T, T2, w)
    lines = [f"factor-check: {_verdict(report.passed)}"]
    for r in report.rows:
        lines.append(f"  n={r.n}: inclusion={r.inclusion} injective={r.injective} fill={r.fill} (< {r.fill_bound})"
                     f" block={r.block} (< {r.block_bound})")
    lines += [f"  warning: {m}" for m in report.warnings]
    doc = {"command": "factor-check", "passed": report.passed, "report": serial.to_plain(report, T.group)}
    return Outcome(0 if report.passed else 1, "\n".join(lines), doc)


def cmd_factor_map(args) -> Outcome:
    T, T2, w = _factor_inputs(args)
    report = check_factor_witness(T, T2, w)
    if not report.passed:
        return Outcome(1, f"factor-map: witness fails {report.failures()}", {"command": "factor-map", "passed": False})
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        fmap = build_factor_map(T, T2, w)
    fractions = [fmap.domain_fraction(n) for n in range(w.steps)]
    lines = ["factor-map: built"] + [f"  level {n}: domain fraction {f}" for n, f in enumerate(fractions)]
    doc = {"command": "factor-map", "passed": True, "domain_fraction": [serial.rational_str(f) for f in fractions]}
    return Outcome(0, "\n".join(lines), doc)


def cmd_odometer_check(args) -> Outcome:
    T = _load_sequence(args.sequence, args.depth)
    odo = serial.odometer_from_doc(serial.read(args.odometer))
    thresholds = _rationals(args.threshold)
    if thresholds is not None and len(thresholds) == 1:
        thresholds = thresholds * (T.depth + 1)
    result = search_odometer_telescoping(T, odo, thresholds)
    lines = [f"odometer-check: {'found' if result.found else 'not found'} k={list(result.k)}"]
    running = Fraction(0)
    for d in result.defects:
        running += d.best
        lines.append(f"  n={d.n} mod {d.modulus}: raw={d.raw} best={d.best} (residue {d.residue}) partial sum={running}")
    if result.failed_at is not None:
        lines.append(f"  no block meets the threshold at step {result.failed_at}")
    doc = {"command": "odometer-check", "found": result.found, "result": serial.to_plain(result),
           "partial_sum": serial.rational_str(result.partial_sum)}
    return Outcome(0 if result.found else 1, "\n".join(lines), doc)


def cmd_quotient_check(args) -> Outcome:
    T = _load_sequence(args.first, args.depth)
    T2 = _load_sequence(args.second)
    _, k, A = serial.quotient_data_from_doc(serial.read(args.data))
    result = check_topological_quotient(T, T2, k, A)
    lines = [f"quotient-check: {_verdict(result.passed)}"]
    for c in result.report.violations:
        lines.append(f"  {c.name} fails at level {c.level}: {c.detail}")
    doc = {"command": "quotient-check", "passed": result.passed, "clauses": serial.to_plain(result.report.clauses)}
    if result.passed and args.preimage:
        bad = preimage_law(result.telescoped, T2.truncate(result.telescoped.depth), A, result.map.stages[1])
        lines.append(f"  preimage law: {'holds' if not bad else 'fails at ' + str(bad[:3])}")
        doc["preimage_failures"] = serial.to_plain(bad)
    return Outcome(0 if result.passed else 1, "\n".join(lines), doc)


def cmd_standardize(args) -> Outcome:
    seq = _load_sequence(args.sequence, args.depth)
    window = [serial.decode_element(seq.group, t) for t in args.window]
    result = standardize(seq, window, args.budget)
    if result is None:
        return Outcome(1, "standardize: not found within budget", {"command": "standardize", "found": False})
    doc_seq = serial.sequence_to_doc(result.seq)
    if args.out:
        _write(args.out, serial.dumps(doc_seq))
    lines = [f"standardize: found l={list(result.l)}"] + [f"  A_{n}: {len(a)} elements" for n, a in enumerate(result.A, 1)]
    doc = {"command": "standardize", "found": True, "l": list(result.l), "sequence": doc_seq}
    return Outcome(0, "\n".join(lines), doc)


# parser --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the machine-readable report")
    common.add_argument("--depth", type=int, help="truncate input sequences to this many levels")
    common.add_argument("--out", help="write the produced document to this file")

    p = argparse.ArgumentParser(prog="rankone", description="Rank-one (C,F)-sequence toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="check the structural clauses of a sequence")
    s.add_argument("sequence")
    s.add_argument("--window", nargs="*", help="group elements for action and Folner diagnostics")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("transform", parents=[common], help="calibrate, telescope or reduce a sequence")
    s.add_argument("sequence")
    s.add_argument("params", help="transform parameter document")
    s.set_defaults(func=cmd_transform)

    for name, func, help_ in (("iso-check", cmd_iso_check, "check an isomorphism witness"),
                              ("factor-check", cmd_factor_check, "check a factor witness"),
                              ("factor-map", cmd_factor_map, "build the factor map of a witness")):
        s = sub.add_parser(name, parents=[common], help=help_)
        s.add_argument("first")
        s.add_argument("second")
        s.add_argument("witness")
        s.add_argument("--eps", help="comma-separated rationals overriding the witness bounds")
        s.set_defaults(func=func)

    s = sub.add_parser("iso-search", parents=[common], help="bounded search for an isomorphism witness")
    s.add_argument("first")
    s.add_argument("second")
    s.add_argument("bounds", help="search-bounds document")
    s.add_argument("--eps")
    s.add_argument("--budget", type=int)
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_iso_search)

    s = sub.add_parser("odometer-check", parents=[common], help="odometer-factor defects and greedy telescoping")
    s.add_argument("sequence")
    s.add_argument("odometer")
    s.add_argument("--threshold", help="one rational, or a comma-separated list indexed from 0")
    s.set_defaults(func=cmd_odometer_check)

    s = sub.add_parser("quotient-check", parents=[common], help="check topological quotient data")
    s.add_argument("first")
    s.add_argument("second")
    s.add_argument("data", help="quotient-data document")
    s.add_argument("--preimage", action="store_true", help="also verify the cylinder preimage law")
    s.set_defaults(func=cmd_quotient_check)

    s = sub.add_parser("standardize", parents=[common], help="telescope and reduce so a window acts levelwise")
    s.add_argument("sequence")
    s.add_argument("--window", nargs="+", required=True)
    s.add_argument("--budget", type=int, default=10_000)
    s.set_defaults(func=cmd_standardize)
    return p


def run(argv=None) -> Outcome:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return Outcome(2 if exc.code else 0, "")
    try:
        return args.func(args)
    except (FormatError, DomainError, PreconditionError) as exc:
        return Outcome(2, f"{args.command}: input error: {exc}", {"command": args.command, "error": str(exc)})
    except (InvariantViolation, ValidationError) as exc:
        return Outcome(1, f"{args.command}: FAIL ({exc})", {"command": args.command, "error": str(exc)})
    except RankOneError as exc:
        return Outcome(2, f"{args.command}: error: {exc}", {"command": args.command, "error": str(exc)})


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    outcome = run(argv)
    want_json = "--json" in argv
    if want_json and outcome.doc is not None:
        sys.stdout.write(serial.dumps(outcome.doc))
    elif outcome.text:
        stream = sys.stderr if outcome.code == 2 else sys.stdout
        print(outcome.text, file=stream)
    return outcome.code


if __name__ == "__main__":
    sys.exit(main())
