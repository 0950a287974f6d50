"""Arithmetic descriptions of semilinear predicates and functions.

These are the reference oracles bundled with compiled devices.  Each spec is
callable on an input vector and round-trips through a small text syntax::

    mod(2,3;1;4)              2 x1 + 3 x2 = 1 (mod 4)
    threshold(1,-1;0)         x1 - x2 >= 0
    not(P)  and(P,Q)  or(P,Q)
    affine(1/2;1;2)           2 + (x1 - 1)/2, defined for x1 >= 1
    affine(...) when P | affine(...) when Q      piecewise function
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Sequence, Union

from .errors import BadModulus, DomainError

DEFAULT_DOMAIN_GRID = 8


def _ints(xs) -> tuple[int, ...]:
    return tuple(int(v) for v in xs)


def _join(xs) -> str:
    return ",".join(str(v) for v in xs)


def _check_arity(spec, x) -> tuple[int, ...]:
    x = tuple(x)
    if len(x) != spec.arity:
        raise ValueError(f"expected {spec.arity} inputs, got {len(x)}")
    return x


@dataclass(frozen=True)
class ModSpec:
    weights: tuple[int, ...]
    residue: int
    modulus: int

    def __post_init__(self) -> None:
        if self.modulus < 2:
            raise BadModulus(f"modulus must be >= 2, got {self.modulus}")
        if not self.weights:
            raise ValueError("at least one input is required")
        object.__setattr__(self, "weights", _ints(self.weights))
        object.__setattr__(self, "residue", self.residue % self.modulus)

    @property
    def arity(self) -> int:
        return len(self.weights)

    def __call__(self, x: Sequence[int]) -> bool:
        x = _check_arity(self, x)
        return sum(w * v for w, v in zip(self.weights, x)) % self.modulus == self.residue

    def to_expr(self) -> str:
        return f"mod({_join(self.weights)};{self.residue};{self.modulus})"


@dataclass(frozen=True)
class ThresholdSpec:
    weights: tuple[int, ...]
    threshold: int

    def __post_init__(self) -> None:
        if not self.weights:
            raise ValueError("at least one input is required")
        object.__setattr__(self, "weights", _ints(self.weights))

    @property
    def arity(self) -> int:
        return len(self.weights)

    @property
    def clamp(self) -> int:
        return max(max(abs(w) for w in self.weights), abs(self.threshold)) + 1

    def __call__(self, x: Sequence[int]) -> bool:
        x = _check_arity(self, x)
        return sum(w * v for w, v in zip(self.weights, x)) >= self.threshold

    def to_expr(self) -> str:
        return f"threshold({_join(self.weights)};{self.threshold})"


@dataclass(frozen=True)
class Not:
    operand: "Predicate"

    @property
    def arity(self) -> int:
        return self.operand.arity

    def __call__(self, x) -> bool:
        return not self.operand(x)

    def to_expr(self) -> str:
        return f"not({self.operand.to_expr()})"


@dataclass(frozen=True)
class And:
    left: "Predicate"
    right: "Predicate"

    def __post_init__(self) -> None:
        if self.left.arity != self.right.arity:
            raise ValueError("operands have different arity")

    @property
    def arity(self) -> int:
        return self.left.arity

    def __call__(self, x) -> bool:
        return self.left(x) and self.right(x)

    def to_expr(self) -> str:
        return f"and({self.left.to_expr()},{self.right.to_expr()})"


@dataclass(frozen=True)
class Or:
    left: "Predicate"
    right: "Predicate"

    def __post_init__(self) -> None:
        if self.left.arity != self.right.arity:
            raise ValueError("operands have different arity")

    @property
    def arity(self) -> int:
        return self.left.arity

    def __call__(self, x) -> bool:
        return self.left(x) or self.right(x)

    def to_expr(self) -> str:
        return f"or({self.left.to_expr()},{self.right.to_expr()})"


Predicate = Union[ModSpec, ThresholdSpec, Not, And, Or]


def negate(p: Predicate) -> Predicate:
    return p.operand if isinstance(p, Not) else Not(p)


@dataclass(frozen=True)
class AffineSpec:
    """``f(x) = b + sum_i a_i (x_i - c_i)``, defined where every ``x_i >= c_i``."""

    coefficients: tuple[Fraction, ...]
    offsets: tuple[int, ...]
    constant: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "coefficients", tuple(Fraction(a) for a in self.coefficients))
        object.__setattr__(self, "offsets", _ints(self.offsets))
        if not self.coefficients:
            raise ValueError("at least one input is required")
        if len(self.offsets) != len(self.coefficients):
            raise ValueError("one offset per coefficient is required")
        if any(c < 0 for c in self.offsets) or self.constant < 0:
            raise ValueError("offsets and constant must be nonnegative")

    @property
    def arity(self) -> int:
        return len(self.coefficients)

    @property
    def d(self) -> int:
        return lcm(*(a.denominator for a in self.coefficients))

    @property
    def n(self) -> tuple[int, ...]:
        return tuple(int(a * self.d) for a in self.coefficients)

    def in_domain(self, x) -> bool:
        return all(v >= c for v, c in zip(x, self.offsets))

    def exact(self, x) -> Fraction:
        x = _check_arity(self, x)
        return self.constant + sum((a * (v - c) for a, v, c in
                                    zip(self.coefficients, x, self.offsets)), Fraction(0))

    def __call__(self, x) -> int:
        x = _check_arity(self, x)
        if not self.in_domain(x):
            raise DomainError(f"{x} lies below the offsets {self.offsets}")
        v = self.exact(x)
        if v.denominator != 1 or v < 0:
            raise DomainError(f"f{x} = {v} is not a natural number")
        return int(v)

    def to_expr(self) -> str:
        return f"affine({_join(self.coefficients)};{_join(self.offsets)};{self.constant})"


@dataclass(frozen=True)
class SemilinearSpec:
    pieces: tuple[tuple[AffineSpec, Predicate], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "pieces", tuple((f, p) for f, p in self.pieces))
        if not self.pieces:
            raise ValueError("at least one piece is required")
        arities = {f.arity for f, _ in self.pieces} | {p.arity for _, p in self.pieces}
        if len(arities) != 1:
            raise ValueError("pieces have different arity")

    @property
    def arity(self) -> int:
        return self.pieces[0][0].arity

    def piece(self, x) -> int:
        hits = [j for j, (_, p) in enumerate(self.pieces) if p(x)]
        if len(hits) != 1:
            raise DomainError(f"{tuple(x)} lies in {len(hits)} piece domains")
        return hits[0]

    def __call__(self, x) -> int:
        x = _check_arity(self, x)
        return self.pieces[self.piece(x)][0](x)

    def check_domains(self, grid: int = DEFAULT_DOMAIN_GRID) -> None:
        """Sample ``[0, grid]^k``: every point must lie in exactly one domain,
        at or above that piece's offsets, with a natural-number value."""
        for x in itertools.product(range(grid + 1), repeat=self.arity):
            self(x)

    def to_expr(self) -> str:
        return " | ".join(f"{f.to_expr()} when {p.to_expr()}" for f, p in self.pieces)


Spec = Union[Predicate, AffineSpec, SemilinearSpec]


# ---------------------------------------------------------------------------
# Text syntax
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<word>[a-z]+)|(?P<num>-?\d+(?:/\d+)?)|(?P<punct>[(),;|]))")


class SyntaxProblem(ValueError):
    pass


class _Parser:
    def __init__(self, text: str) -> None:
        self.tokens = []
        pos = 0
        text = text.rstrip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise SyntaxProblem(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
            self.tokens.append(m.group("word") or m.group("num") or m.group("punct"))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self, expect=None) -> str:
        tok = self.peek()
        if tok is None or (expect is not None and tok != expect):
            raise SyntaxProblem(f"expected {expect or 'more input'}, found {tok or 'end of input'}")
        self.i += 1
        return tok

    def end(self) -> None:
        if self.peek() is not None:
            raise SyntaxProblem(f"trailing input at {self.peek()!r}")

    def numbers(self, conv) -> list:
        out = [conv(self.take())]
        while self.peek() == ",":
            self.take(",")
            out.append(conv(self.take()))
        return out

    def number(self, conv):
        try:
            return conv(self.take())
        except ValueError as exc:
            raise SyntaxProblem(str(exc)) from None

    def predicate(self) -> Predicate:
        word = self.take()
        self.take("(")
        if word == "mod":
            w = self.numbers(int)
            self.take(";")
            c = self.number(int)
            self.take(";")
            m = self.number(int)
            p = ModSpec(tuple(w), c, m)
        elif word == "threshold":
            w = self.numbers(int)
            self.take(";")
            p = ThresholdSpec(tuple(w), self.number(int))
        elif word == "not":
            p = Not(self.predicate())
        elif word in ("and", "or"):
            a = self.predicate()
            self.take(",")
            b = self.predicate()
            p = And(a, b) if word == "and" else Or(a, b)
        else:
            raise SyntaxProblem(f"unknown predicate {word!r}")
        self.take(")")
        return p

    def affine(self) -> AffineSpec:
        self.take("affine")
        self.take("(")
        a = self.numbers(Fraction)
        self.take(";")
        c = self.numbers(int)
        self.take(";")
        b = self.number(int)
        self.take(")")
        return AffineSpec(tuple(a), tuple(c), b)

    def semilinear(self) -> SemilinearSpec:
        pieces = []
        while True:
            f = self.affine()
            self.take("when")
            pieces.append((f, self.predicate()))
            if self.peek() != "|":
                break
            self.take("|")
        return SemilinearSpec(tuple(pieces))


def _whole(text: str, rule: str):
    p = _Parser(text)
    try:
        out = getattr(p, rule)()
    except (BadModulus, ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, SyntaxProblem):
            raise
        raise SyntaxProblem(str(exc)) from exc
    p.end()
    return out


def parse_predicate(text: str) -> Predicate:
    return _whole(text, "predicate")


def parse_affine(text: str) -> AffineSpec:
    return _whole(text, "affine")


def parse_semilinear(text: str) -> SemilinearSpec:
    return _whole(text, "semilinear")


def _fracs(s: str) -> tuple[Fraction, ...]:
    return tuple(Fraction(v) for v in s.split(","))


def oracle_line(spec: Spec) -> str:
    """Body of an ``@oracle`` line (without the keyword)."""
    if isinstance(spec, ModSpec):
        return f"mod {_join(spec.weights)} {spec.residue} {spec.modulus}"
    if isinstance(spec, ThresholdSpec):
        return f"threshold {_join(spec.weights)} {spec.threshold}"
    if isinstance(spec, AffineSpec):
        return f"affine {_join(spec.coefficients)} {_join(spec.offsets)} {spec.constant}"
    if isinstance(spec, SemilinearSpec):
        return f"semilinear {spec.to_expr()}"
    return f"bool {spec.to_expr()}"


def parse_oracle(text: str) -> Spec:
    kind, _, rest = text.strip().partition(" ")
    rest = rest.strip()
    try:
        if kind == "mod":
            w, c, m = rest.split()
            return ModSpec(_ints(w.split(",")), int(c), int(m))
        if kind == "threshold":
            w, t = rest.split()
            return ThresholdSpec(_ints(w.split(",")), int(t))
        if kind == "affine":
            a, c, b = rest.split()
            return AffineSpec(_fracs(a), _ints(c.split(",")), int(b))
    except (BadModulus, ValueError, ZeroDivisionError) as exc:
        raise SyntaxProblem(f"bad {kind} oracle: {exc}") from exc
    if kind == "bool":
        return parse_predicate(rest)
    if kind == "semilinear":
        return parse_semilinear(rest)
    raise SyntaxProblem(f"unknown oracle kind {kind!r}")
