"""Command-line front end: ``rrcrn compile | verify | invariants | trace``.

Exit status: 0 verified / success, 1 refuted (or a failed check), 2
inconclusive, 3 usage or parse error.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import constructions as cons
from .core import CRC, CRD, Device, Vote
from .devfile import format_config, format_trace, parse_config, parse_device, parse_trace, serialize_device
from .errors import CRNError, PairingFailed, ReplayFailure
from .invariants import check, find_linear_invariants, format_invariant
from .reachability import (
    DEFAULT_EXTRA,
    DEFAULT_FORWARD_HEADROOM,
    DEFAULT_MAX_STATES,
    Cap,
    Model,
    Outcome,
    Verdict,
    verify,
)
from .specs import AffineSpec, ModSpec, SemilinearSpec, ThresholdSpec, parse_predicate, parse_semilinear
from .transform import eliminate_reverse_splits, replay

EXIT_OK, EXIT_REFUTED, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _frac_list(text: str) -> tuple[Fraction, ...]:
    try:
        return tuple(Fraction(v) for v in text.split(","))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected comma-separated rationals, got {text!r}") from None


def _load(path: str) -> Device:
    return parse_device(Path(path).read_text(encoding="utf-8"))


def _emit(dev: Device, out: Optional[str]) -> None:
    text = serialize_device(dev)
    if out:
        Path(out).write_text(text, encoding="utf-8")
        print(f"wrote {out}: {len(dev.crn.species)} species, {len(dev.crn.reactions)} reactions")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# compile
# ---------------------------------------------------------------------------


def _require_crd(dev: Device, path: str) -> CRD:
    if not isinstance(dev, CRD):
        raise UsageError(f"{path} is not a crd device")
    return dev


def cmd_compile(args) -> int:
    what = args.what
    if what == "mod":
        dev = cons.compile_mod(ModSpec(args.weights, args.residue, args.modulus))
    elif what == "threshold":
        dev = cons.compile_threshold(ThresholdSpec(args.weights, args.threshold))
    elif what == "predicate":
        dev = cons.compile_predicate(parse_predicate(args.expr))
    elif what == "not":
        dev = cons.complement(_require_crd(_load(args.device), args.device))
    elif what in ("and", "or"):
        d1 = _require_crd(_load(args.left), args.left)
        d2 = _require_crd(_load(args.right), args.right)
        dev = cons.combine_boolean(d1, d2, what)
    elif what == "affine":
        offsets = args.offsets or (0,) * len(args.coefficients)
        dev = cons.compile_affine(AffineSpec(args.coefficients, offsets, args.constant))
    elif what == "semilinear":
        spec = parse_semilinear(" | ".join(args.piece))
        dev = cons.compile_semilinear(spec, args.domain_grid)
    elif what == "parallel":
        comp = cons.parallel_compose([_load(p) for p in args.devices])
        dev = comp.device
        print("split reactions: " + " ".join(map(str, comp.split_ids)), file=sys.stderr)
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown compile target {what}")
    _emit(dev, args.output)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _parse_input(dev: Device, text: Optional[str]) -> tuple[int, ...]:
    counts = dict.fromkeys(dev.input_names, 0)
    for tok in (text or "").replace(" ", ",").split(","):
        if not tok:
            continue
        name, sep, val = tok.partition("=")
        if not sep or name not in counts:
            raise UsageError(f"bad input assignment {tok!r}; inputs are {', '.join(dev.input_names)}")
        try:
            counts[name] = int(val)
        except ValueError:
            raise UsageError(f"bad input count {tok!r}") from None
        if counts[name] < 0:
            raise UsageError(f"negative input count {tok!r}")
    return tuple(counts.values())


def _parse_expect(dev: Device, text: str):
    if isinstance(dev, CRD):
        low = text.lower()
        if low in ("yes", "true", "1"):
            return Vote.YES
        if low in ("no", "false", "0"):
            return Vote.NO
        raise UsageError(f"expected yes/no, got {text!r}")
    try:
        return int(text)
    except ValueError:
        raise UsageError(f"expected an integer output, got {text!r}") from None


def _fmt_output(out) -> str:
    if isinstance(out, Vote):
        return out.value
    if isinstance(out, tuple):
        return f"{out[0]}-{out[1]}"
    return "?" if out is None else str(out)


def _fmt_input(dev: Device, x) -> str:
    return ",".join(f"{n}={v}" for n, v in zip(dev.input_names, x))


def _report(dev: Device, x, v: Verdict) -> dict:
    rep = {
        "input": dict(zip(dev.input_names, x)),
        "outcome": v.outcome.value,
        "model": v.model.value,
        "expected": _fmt_output(v.expected),
        "output": _fmt_output(v.output),
        "cap": {"max_total_count": v.cap.max_total_count, "max_states": v.cap.max_states,
                "forward_headroom": v.cap.forward_headroom},
        "stats": {"states": v.stats.states, "forward_states": v.stats.forward_states,
                  "undecided": v.stats.undecided, "closed": v.stats.closed,
                  "frontier_truncated": v.stats.frontier_truncated,
                  "seconds": round(v.stats.seconds, 6)},
    }
    if v.reason:
        rep["reason"] = v.reason
    if v.trap is not None:
        rep["trap"] = {
            "start": dev.crn.as_dict(v.trap.start),
            "steps": v.trap.tokens(),
            "config": dev.crn.as_dict(v.trap_config),
            "certificate_size": len(v.certificate),
            "certificate_closed": v.certificate.closed,
        }
    return rep


def _print_verdict(dev: Device, x, v: Verdict) -> None:
    cap = v.cap
    print(f"{v.outcome.value} input {_fmt_input(dev, x)} model {v.model.value} "
          f"expected {_fmt_output(v.expected)} output {_fmt_output(v.output)}")
    print(f"  bound: total count <= {cap.max_total_count} (forward +{cap.forward_headroom}), "
          f"states <= {cap.max_states}; explored {v.stats.states} states, "
          f"{v.stats.forward_states} forward, {v.stats.seconds:.3f}s")
    if v.reason:
        print(f"  {v.reason}")
    if v.stats.frontier_truncated and v.outcome is not Outcome.REFUTED:
        print(f"  {v.stats.frontier_truncated} configuration(s) beyond the bound were not explored")
    if v.trap is not None:
        print(f"  trap {dev.crn.format(v.trap_config)} reached by {v.trap.tokens() or '(no steps)'}")
        print(f"  certificate: closed forward set of {len(v.certificate)} configuration(s)")


def cmd_verify(args) -> int:
    dev = _load(args.device)
    model = Model(args.model)
    if args.grid is not None and args.input:
        raise UsageError("--grid and --input are exclusive")
    if args.grid is not None:
        if args.expect is not None:
            raise UsageError("--expect needs a single --input")
        lo = args.grid_min
        points = list(itertools.product(range(lo, args.grid + 1), repeat=dev.arity))
    else:
        points = [_parse_input(dev, args.input)]
    expect = _parse_expect(dev, args.expect) if args.expect is not None else None
    if expect is None and dev.oracle is None:
        raise UsageError("device has no @oracle; pass --expect")
    worst = Outcome.VERIFIED
    reports = []
    skipped = []
    for x in points:
        if args.grid is not None and isinstance(dev, CRD) and not any(x) and not any(dev.context):
            # An empty initial configuration holds no voter, so its output is undefined.
            skipped.append(x)
            print(f"SKIPPED input {_fmt_input(dev, x)}: empty configuration has no voters")
            continue
        cap = Cap.around(dev.initial_configuration(x), args.cap_extra, args.cap_states,
                         args.forward_headroom)
        v = verify(dev, x, model, cap, expected=expect)
        _print_verdict(dev, x, v)
        reports.append(_report(dev, x, v))
        if v.outcome.severity > worst.severity:
            worst = v.outcome
    if len(points) > 1:
        print(f"{worst.value} over {len(reports)} input(s)" +
              (f", {len(skipped)} skipped" if skipped else ""))
    if args.report:
        doc = {"device": args.device, "outcome": worst.value, "results": reports,
               "skipped": [dict(zip(dev.input_names, x)) for x in skipped]}
        Path(args.report).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    return worst.exit_status


# ---------------------------------------------------------------------------
# invariants
# ---------------------------------------------------------------------------


def cmd_invariants(args) -> int:
    dev = _load(args.device)
    if args.action == "find":
        basis = find_linear_invariants(dev.crn)
        if not basis:
            print("no linear invariants")
        for inv in basis:
            print(format_invariant(dev.crn, inv))
        return EXIT_OK
    if not dev.invariants:
        print("device declares no invariants")
        return EXIT_OK
    status = EXIT_OK
    for k, inv in enumerate(dev.invariants):
        rep = check(dev.crn, inv)
        label = inv.name or f"#{k}"
        if rep.holds:
            print(f"ok {label}")
        else:
            status = EXIT_REFUTED
            bad = ", ".join(f"reaction {i} residual {r}" for i, r in rep.violations)
            print(f"VIOLATED {label}: {bad}")
    return status


# ---------------------------------------------------------------------------
# trace
# ---------------------------------------------------------------------------


def cmd_trace(args) -> int:
    dev = _load(args.device)
    ex = parse_trace(dev.crn, Path(args.trace).read_text(encoding="utf-8"))
    if args.action == "replay":
        try:
            configs = replay(dev.crn, ex)
        except ReplayFailure as exc:
            print(f"replay failed: {exc}")
            return EXIT_REFUTED
        print(f"0: {dev.crn.format(configs[0])}")
        for n, (step, c) in enumerate(zip(ex.steps, configs[1:]), start=1):
            print(f"{n}: {step} -> {dev.crn.format(c)}")
        if args.expect_end is not None:
            want = parse_config(dev.crn, args.expect_end)
            if configs[-1] != want:
                print(f"end {dev.crn.format(configs[-1])} differs from {dev.crn.format(want)}")
                return EXIT_REFUTED
        return EXIT_OK
    split_ids = args.split if args.split is not None else cons.split_reactions(dev)
    try:
        out = eliminate_reverse_splits(dev.crn, ex, split_ids)
    except PairingFailed as exc:
        print(f"normalization failed: {exc}")
        return EXIT_REFUTED
    text = format_trace(dev.crn, out)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        print(f"wrote {args.output}: {len(ex)} -> {len(out)} steps")
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rrcrn", description="Build and check reverse-robust chemical reaction networks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("compile", help="emit a device file for a construction")
    csub = c.add_subparsers(dest="what", required=True, parser_class=_Parser)

    def out(q):
        q.add_argument("-o", "--output", help="write here instead of standard output")

    q = csub.add_parser("mod", help="decide sum w_i x_i = c (mod m)")
    q.add_argument("--weights", type=_int_list, required=True)
    q.add_argument("--residue", type=int, required=True)
    q.add_argument("--modulus", type=int, required=True)
    out(q)
    q = csub.add_parser("threshold", help="decide sum w_i x_i >= t")
    q.add_argument("--weights", type=_int_list, required=True)
    q.add_argument("--threshold", type=int, required=True)
    out(q)
    q = csub.add_parser("predicate", help="compile a predicate expression, e.g. 'or(mod(1;0;2),threshold(2;3))'")
    q.add_argument("expr")
    out(q)
    q = csub.add_parser("not", help="swap the voters of a crd")
    q.add_argument("device")
    out(q)
    for op in ("and", "or"):
        q = csub.add_parser(op, help=f"{op} of two crds")
        q.add_argument("left")
        q.add_argument("right")
        out(q)
    q = csub.add_parser("affine", help="diff-representation of b + sum a_i (x_i - c_i)")
    q.add_argument("--coefficients", type=_frac_list, required=True)
    q.add_argument("--offsets", type=_int_list)
    q.add_argument("--constant", type=int, default=0)
    out(q)
    q = csub.add_parser("semilinear", help="piecewise affine function")
    q.add_argument("--piece", action="append", required=True,
                   help="'affine(a..;c..;b) when PREDICATE', repeatable")
    q.add_argument("--domain-grid", type=int, default=None,
                   help="sample piece domains on [0,G]^k (default 8)")
    out(q)
    q = csub.add_parser("parallel", help="run devices side by side on split inputs")
    q.add_argument("devices", nargs="+")
    out(q)
    c.set_defaults(func=cmd_compile)

    v = sub.add_parser("verify", help="bounded check of stable or reverse-robust correctness")
    v.add_argument("device")
    v.add_argument("--model", choices=[m.value for m in Model], default=Model.REVERSE_ROBUST.value)
    v.add_argument("--input", help="e.g. X1=3,X2=0; unspecified inputs are 0")
    v.add_argument("--grid", type=int, help="sweep every input in [grid-min, G]^k")
    v.add_argument("--grid-min", type=int, default=0)
    v.add_argument("--expect", help="expected output (yes/no or an integer) instead of the oracle")
    v.add_argument("--cap-extra", type=int, default=DEFAULT_EXTRA,
                   help="molecule headroom over the initial count (default %(default)s)")
    v.add_argument("--cap-states", type=int, default=DEFAULT_MAX_STATES,
                   help="maximum distinct configurations (default %(default)s)")
    v.add_argument("--forward-headroom", type=int, default=DEFAULT_FORWARD_HEADROOM,
                   help="extra molecules allowed in forward searches (default %(default)s)")
    v.add_argument("--report", help="write a JSON report here")
    v.set_defaults(func=cmd_verify)

    i = sub.add_parser("invariants", help="check declared invariants or find linear ones")
    i.add_argument("action", choices=["check", "find"])
    i.add_argument("device")
    i.set_defaults(func=cmd_invariants)

    t = sub.add_parser("trace", help="replay or normalize an execution")
    t.add_argument("action", choices=["replay", "normalize"])
    t.add_argument("device")
    t.add_argument("trace")
    t.add_argument("--split", type=_int_list, help="split reaction ids (default: detect)")
    t.add_argument("--expect-end", help="replay: required final configuration, e.g. 'Y:1'")
    out(t)
    t.set_defaults(func=cmd_trace)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
    except (CRNError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_USAGE


run = main


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
