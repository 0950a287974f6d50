"""Line-oriented text format for devices and traces.

A device file::

    @type crc
    @inputs X
    @output Y
    @rxn 2 X -> Y
    @rxn Z -> Y
    @rxn Z ->

Recognised directives are ``@type``, ``@species``, ``@inputs``, ``@context``,
``@yes``, ``@no``, ``@output``, ``@output-minus``, ``@invariant``, ``@oracle``
and ``@rxn``.  ``#`` opens a comment at the start of a line or after
whitespace (species names may themselves contain ``#``).  Without a
``@species`` line, species are numbered in order of first appearance.

A trace file holds ``@start X:2`` followed by step tokens such as ``0F 1R``.
"""

from __future__ import annotations

import re
from collections import Counter
from typing import Optional

from .core import CRC, CRD, CRN, NAME_RE, Device, Direction, Execution, Step
from .errors import ParseError, ValidationError
from .invariants import LinearInvariant, ModularInvariant
from .specs import SyntaxProblem, oracle_line, parse_oracle

_COMMENT = re.compile(r"(^|\s)#.*$")
_TERM = re.compile(r"(\d+)?\s*([^\s\d]\S*)\Z")
_STEP = re.compile(r"(\d+)([FR])\Z")
_EMPTY = {"", "0", "∅"}
_SINGLE = {"@type", "@species", "@inputs", "@context", "@yes", "@no", "@output",
           "@output-minus", "@oracle"}


def _strip(line: str) -> str:
    return _COMMENT.sub("", line).strip()


def _lines(text: str):
    for n, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if line:
            yield n, line


def _name(tok: str, lineno: int) -> str:
    if not NAME_RE.match(tok):
        raise ParseError(lineno, f"invalid species name {tok!r}")
    return tok


def _side(text: str, lineno: int) -> Counter:
    text = text.strip()
    out: Counter = Counter()
    if text in _EMPTY:
        return out
    for term in text.split("+"):
        m = _TERM.match(term.strip())
        if not m:
            raise ParseError(lineno, f"cannot read reaction term {term.strip()!r}")
        k = int(m.group(1)) if m.group(1) else 1
        out[_name(m.group(2), lineno)] += k
    return +out


def _weights(tokens, lineno: int) -> dict[str, int]:
    w: dict[str, int] = {}
    for tok in tokens:
        name, sep, val = tok.rpartition(":")
        if not sep:
            raise ParseError(lineno, f"expected Species:weight, got {tok!r}")
        try:
            w[_name(name, lineno)] = w.get(name, 0) + int(val)
        except ValueError:
            raise ParseError(lineno, f"weight {val!r} is not an integer") from None
    return w


def parse_device(text: str) -> Device:
    seen: dict[str, int] = {}
    kind: Optional[str] = None
    species: Optional[list[str]] = None
    inputs: list[str] = []
    context: dict[str, int] = {}
    yes: list[str] = []
    no: list[str] = []
    output = minus = None
    oracle = None
    reactions: list[tuple[Counter, Counter]] = []
    invs: list[tuple[int, Optional[int], Optional[str], dict[str, int]]] = []
    order: list[str] = []

    def note(names):
        for s in names:
            if s not in order:
                order.append(s)

    for lineno, line in _lines(text):
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head in _SINGLE:
            if head in seen:
                raise ParseError(lineno, f"{head} repeated (first on line {seen[head]})")
            seen[head] = lineno
        toks = rest.split()
        if head == "@type":
            if rest not in ("crn", "crd", "crc"):
                raise ParseError(lineno, f"unknown device type {rest!r}")
            kind = rest
        elif head == "@species":
            species = [_name(t, lineno) for t in toks]
            note(species)
        elif head == "@inputs":
            inputs = [_name(t, lineno) for t in toks]
            note(inputs)
        elif head == "@context":
            context = _weights(toks, lineno)
            note(context)
        elif head in ("@yes", "@no"):
            names = [_name(t, lineno) for t in toks]
            (yes if head == "@yes" else no).extend(names)
            note(names)
        elif head in ("@output", "@output-minus"):
            if len(toks) != 1:
                raise ParseError(lineno, f"{head} takes exactly one species")
            name = _name(toks[0], lineno)
            if head == "@output":
                output = name
            else:
                minus = name
            note([name])
        elif head == "@invariant":
            if not toks:
                raise ParseError(lineno, "empty invariant")
            modulus = None
            if toks[0] == "linear":
                toks = toks[1:]
            elif toks[0] == "mod" and len(toks) >= 2:
                try:
                    modulus = int(toks[1])
                except ValueError:
                    raise ParseError(lineno, f"bad modulus {toks[1]!r}") from None
                if modulus < 2:
                    raise ParseError(lineno, f"modulus must be >= 2, got {modulus}")
                toks = toks[2:]
            else:
                raise ParseError(lineno, "invariant must start with 'linear' or 'mod m'")
            name = None
            if toks and ":" not in toks[0]:
                name, toks = toks[0], toks[1:]
            w = _weights(toks, lineno)
            note(w)
            invs.append((lineno, modulus, name, w))
        elif head == "@oracle":
            try:
                oracle = parse_oracle(rest)
            except SyntaxProblem as exc:
                raise ParseError(lineno, str(exc)) from None
        elif head == "@rxn":
            if "->" not in rest:
                raise ParseError(lineno, "reaction needs '->'")
            lhs, rhs = rest.split("->", 1)
            a, p = _side(lhs, lineno), _side(rhs, lineno)
            note(a)
            note(p)
            reactions.append((a, p))
        else:
            raise ParseError(lineno, f"unknown directive {head!r}")

    if kind is None:
        raise ParseError(0, "missing @type")
    if species is None:
        species = order
    else:
        missing = [s for s in order if s not in species]
        if missing:
            raise ParseError(seen["@species"], f"species used but not declared: {missing}")
    crn = CRN.from_names(species, reactions)
    idx = {s: i for i, s in enumerate(species)}
    ctx = [0] * len(species)
    for s, k in context.items():
        ctx[idx[s]] = k
    invariants = []
    for lineno, modulus, name, w in invs:
        vec = [0] * len(species)
        for s, k in w.items():
            vec[idx[s]] = k
        invariants.append(ModularInvariant(tuple(vec), modulus, name) if modulus
                          else LinearInvariant(tuple(vec), name))
    common = dict(crn=crn, inputs=tuple(idx[s] for s in inputs), context=tuple(ctx),
                  invariants=tuple(invariants), oracle=oracle)
    if kind == "crd":
        if output or minus:
            raise ValidationError("@output is only valid for crc devices")
        return CRD(yes=frozenset(idx[s] for s in yes), no=frozenset(idx[s] for s in no), **common)
    if yes or no:
        raise ValidationError("@yes/@no are only valid for crd devices")
    if kind == "crc":
        if output is None:
            raise ParseError(0, "crc device needs @output")
        return CRC(output_species=idx[output],
                   minus_species=idx[minus] if minus is not None else None, **common)
    if output or minus:
        raise ValidationError("@output is only valid for crc devices")
    return Device(**common)


def _format_weights(crn: CRN, weights) -> str:
    return " ".join(f"{crn.species[i]}:{w}" for i, w in enumerate(weights) if w)


def serialize_device(dev: Device) -> str:
    crn = dev.crn
    sp = crn.species
    out = [f"@type {dev.kind}", "@species " + " ".join(sp),
           "@inputs " + " ".join(sp[s] for s in dev.inputs)]
    if any(dev.context):
        out.append("@context " + _format_weights(crn, dev.context))
    if isinstance(dev, CRD):
        out.append("@yes " + " ".join(sp[s] for s in sorted(dev.yes)))
        out.append("@no " + " ".join(sp[s] for s in sorted(dev.no)))
    if isinstance(dev, CRC):
        out.append(f"@output {sp[dev.output_species]}")
        if dev.minus_species is not None:
            out.append(f"@output-minus {sp[dev.minus_species]}")
    for inv in dev.invariants:
        head = f"mod {inv.modulus}" if isinstance(inv, ModularInvariant) else "linear"
        name = f" {inv.name}" if inv.name else ""
        out.append(f"@invariant {head}{name} {_format_weights(crn, inv.weights)}".rstrip())
    if dev.oracle is not None and hasattr(dev.oracle, "to_expr"):
        out.append("@oracle " + oracle_line(dev.oracle))
    for i in range(len(crn.reactions)):
        out.append("@rxn " + crn.format_reaction(i).replace(" -> 0", " ->"))
    return "\n".join(out) + "\n"


def parse_config(crn: CRN, text: str, lineno: int = 0) -> tuple[int, ...]:
    """``X:2 Y:1`` (or ``X=2,Y=1``) to a configuration; unnamed species are 0."""
    c = [0] * len(crn.species)
    for tok in re.split(r"[\s,]+", text.strip()):
        if not tok:
            continue
        name, sep, val = tok.replace("=", ":").rpartition(":")
        if not sep:
            raise ParseError(lineno, f"expected Species:count, got {tok!r}")
        try:
            c[crn.index(name)] += int(val)
        except (KeyError, ValueError) as exc:
            raise ParseError(lineno, f"bad count {tok!r}: {exc}") from None
    if any(k < 0 for k in c):
        raise ParseError(lineno, "negative count")
    return tuple(c)


def format_config(crn: CRN, c) -> str:
    return " ".join(f"{crn.species[i]}:{k}" for i, k in enumerate(c) if k)


def parse_trace(crn: CRN, text: str) -> Execution:
    start = None
    steps: list[Step] = []
    for lineno, line in _lines(text):
        if line.startswith("@start"):
            if start is not None:
                raise ParseError(lineno, "@start repeated")
            start = parse_config(crn, line[len("@start"):], lineno)
            continue
        if start is None:
            raise ParseError(lineno, "steps before @start")
        for tok in line.split():
            m = _STEP.match(tok)
            if not m:
                raise ParseError(lineno, f"bad step token {tok!r}")
            steps.append(Step(int(m.group(1)), Direction(m.group(2))))
    if start is None:
        raise ParseError(0, "missing @start")
    return Execution(start, tuple(steps))


def format_trace(crn: CRN, execution: Execution) -> str:
    body = execution.tokens()
    return f"@start {format_config(crn, execution.start)}\n" + (body + "\n" if body else "")
