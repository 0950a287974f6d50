"""Species, reactions, configurations and devices.

Configurations are plain tuples of nonnegative counts indexed by species id,
so they hash and compare in O(1) during exploration.  All types are frozen
after construction.
"""

from __future__ import annotations

import enum
import logging
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, NamedTuple, Optional, Sequence

from .errors import NotApplicable, ValidationError

log = logging.getLogger(__name__)

Config = tuple[int, ...]

NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_#'^.\-]*\Z")


class Direction(enum.Enum):
    FORWARD = "F"
    REVERSE = "R"

    @property
    def opposite(self) -> "Direction":
        return Direction.REVERSE if self is Direction.FORWARD else Direction.FORWARD


class Mode(enum.Enum):
    FORWARD_ONLY = "forward"
    BIDIRECTIONAL = "bidirectional"


class Vote(enum.Enum):
    YES = "yes"
    NO = "no"
    UNDEFINED = "undefined"


class Step(NamedTuple):
    rxn: int
    direction: Direction

    def __str__(self) -> str:
        return f"{self.rxn}{self.direction.value}"


F = Direction.FORWARD
R = Direction.REVERSE


@dataclass(frozen=True)
class Reaction:
    """A forward reaction ``reactants -> products`` as dense count vectors."""

    reactants: tuple[int, ...]
    products: tuple[int, ...]
    label: Optional[str] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if len(self.reactants) != len(self.products):
            raise ValidationError("reactant and product vectors differ in length")
        if any(n < 0 for n in self.reactants) or any(n < 0 for n in self.products):
            raise ValidationError("negative stoichiometry")

    def net_change(self) -> tuple[int, ...]:
        return tuple(p - a for a, p in zip(self.reactants, self.products))

    @property
    def is_self_inverse(self) -> bool:
        return self.reactants == self.products

    def consumed(self, direction: Direction) -> tuple[int, ...]:
        """What a step in ``direction`` requires: reactants forward, products in reverse."""
        return self.reactants if direction is F else self.products

    def produced(self, direction: Direction) -> tuple[int, ...]:
        return self.products if direction is F else self.reactants


def net_change(r: Reaction) -> tuple[int, ...]:
    return r.net_change()


class _Move(NamedTuple):
    code: int  # 2 * rxn + (0 forward, 1 reverse): the canonical enumeration order
    step: Step
    need: tuple[tuple[int, int], ...]
    delta: tuple[tuple[int, int], ...]
    dtotal: int


@dataclass(frozen=True)
class CRN:
    species: tuple[str, ...]
    reactions: tuple[Reaction, ...]

    def __post_init__(self) -> None:
        if len(set(self.species)) != len(self.species):
            raise ValidationError("duplicate species names")
        for name in self.species:
            if not NAME_RE.match(name):
                raise ValidationError(f"invalid species name {name!r}")
        n = len(self.species)
        for i, r in enumerate(self.reactions):
            if len(r.reactants) != n:
                raise ValidationError(f"reaction {i} is not indexed by the species table")

    @classmethod
    def from_names(cls, species: Sequence[str],
                   reactions: Iterable[tuple[Mapping[str, int], Mapping[str, int]]]) -> "CRN":
        idx = {s: i for i, s in enumerate(species)}
        built = []
        for lhs, rhs in reactions:
            a = [0] * len(species)
            p = [0] * len(species)
            for s, k in lhs.items():
                a[idx[s]] += k
            for s, k in rhs.items():
                p[idx[s]] += k
            built.append(Reaction(tuple(a), tuple(p)))
        return cls(tuple(species), tuple(built))

    @cached_property
    def _index(self) -> dict[str, int]:
        return {s: i for i, s in enumerate(self.species)}

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown species {name!r}") from None

    def __len__(self) -> int:
        return len(self.species)

    # -- configurations -------------------------------------------------

    def zero(self) -> Config:
        return (0,) * len(self.species)

    def config(self, counts: Mapping[str, int] | None = None, **kw: int) -> Config:
        c = [0] * len(self.species)
        for name, n in {**(counts or {}), **kw}.items():
            if n < 0:
                raise ValueError(f"negative count for {name}")
            c[self.index(name)] += n
        return tuple(c)

    def format(self, c: Config) -> str:
        parts = [f"{n}{self.species[i]}" if n != 1 else self.species[i]
                 for i, n in enumerate(c) if n]
        return "{" + ", ".join(parts) + "}"

    def as_dict(self, c: Config) -> dict[str, int]:
        return {self.species[i]: n for i, n in enumerate(c) if n}

    def format_side(self, v: Sequence[int]) -> str:
        terms = [(f"{n} {self.species[i]}" if n != 1 else self.species[i])
                 for i, n in enumerate(v) if n]
        return " + ".join(terms)

    def format_reaction(self, i: int) -> str:
        r = self.reactions[i]
        lhs = self.format_side(r.reactants) or "0"
        rhs = self.format_side(r.products) or "0"
        return f"{lhs} -> {rhs}"

    # -- single-step semantics ------------------------------------------

    @cached_property
    def _moves(self) -> tuple[_Move, ...]:
        moves = []
        for i, r in enumerate(self.reactions):
            for d in (F, R):
                need = tuple((s, k) for s, k in enumerate(r.consumed(d)) if k)
                delta = tuple((s, p - a) for s, (a, p) in
                              enumerate(zip(r.consumed(d), r.produced(d))) if p != a)
                moves.append(_Move(2 * i + (d is R), Step(i, d), need, delta,
                                   sum(k for _, k in delta)))
        return tuple(moves)

    @cached_property
    def _triggers(self) -> dict[Mode, tuple[tuple[_Move, ...], tuple[tuple[_Move, ...], ...]]]:
        # Each move is filed under its first required species; moves that need
        # nothing (reverse of an annihilation) are candidates everywhere.
        out = {}
        for mode in Mode:
            always: list[_Move] = []
            by_species: list[list[_Move]] = [[] for _ in self.species]
            for m in self._moves:
                if mode is Mode.FORWARD_ONLY and m.step.direction is R:
                    continue
                if m.need:
                    by_species[m.need[0][0]].append(m)
                else:
                    always.append(m)
            out[mode] = (tuple(always), tuple(tuple(ms) for ms in by_species))
        return out

    def _candidate_moves(self, c: Config, mode: Mode) -> list[_Move]:
        always, by_species = self._triggers[mode]
        cand = list(always)
        for s, n in enumerate(c):
            if n:
                for m in by_species[s]:
                    for t, k in m.need:
                        if c[t] < k:
                            break
                    else:
                        cand.append(m)
        cand.sort()
        return cand

    def is_applicable(self, c: Config, rxn: int, direction: Direction) -> bool:
        need = self.reactions[rxn].consumed(direction)
        return all(x >= k for x, k in zip(c, need))

    def apply(self, c: Config, rxn: int, direction: Direction = F) -> Config:
        r = self.reactions[rxn]
        if not self.is_applicable(c, rxn, direction):
            raise NotApplicable(rxn, direction)
        return tuple(x - a + p for x, a, p in zip(c, r.consumed(direction), r.produced(direction)))

    def enabled(self, c: Config, mode: Mode = Mode.BIDIRECTIONAL) -> list[Step]:
        """Every applicable (reaction, direction) pair, in canonical order."""
        return [m.step for m in self._candidate_moves(c, mode)]

    def successors(self, c: Config, mode: Mode) -> Iterator[tuple[Step, Config, int]]:
        """Yield ``(step, successor, successor_total)`` for each state-changing enabled move.

        Self-inverse moves are skipped: they never change the configuration.
        """
        total = sum(c)
        for m in self._candidate_moves(c, mode):
            if not m.delta:
                continue
            nxt = list(c)
            for s, k in m.delta:
                nxt[s] += k
            yield m.step, tuple(nxt), total + m.dtotal

    def is_quiescent(self, c: Config) -> bool:
        """True when no forward reaction can change ``c``."""
        return not any(m.delta for m in self._candidate_moves(c, Mode.FORWARD_ONLY))


def apply(crn: CRN, c: Config, rxn: int, d: Direction = F) -> Config:
    return crn.apply(c, rxn, d)


def enabled(crn: CRN, c: Config, mode: Mode = Mode.BIDIRECTIONAL) -> list[Step]:
    return crn.enabled(c, mode)


# ---------------------------------------------------------------------------
# Devices
# ---------------------------------------------------------------------------


@dataclass(frozen=True, kw_only=True)
class Device:
    """A CRN with ordered input species and an initial context.

    Plain devices (``@type crn``) carry no output; :class:`CRD` and :class:`CRC`
    add voters or an output species.  ``invariants`` holds the invariants a
    compiler proved for the construction and ``oracle`` the arithmetic
    predicate or function the device is meant to compute.
    """

    crn: CRN
    inputs: tuple[int, ...]
    context: Config = ()
    invariants: tuple = ()
    oracle: object = None
    quantities: Mapping[str, object] = field(default_factory=dict, compare=False)

    kind = "crn"

    def __post_init__(self) -> None:
        n = len(self.crn.species)
        if not self.context:
            object.__setattr__(self, "context", (0,) * n)
        if len(self.context) != n:
            raise ValidationError("context is not indexed by the species table")
        if any(k < 0 for k in self.context):
            raise ValidationError("negative context count")
        if len(set(self.inputs)) != len(self.inputs):
            raise ValidationError("repeated input species")
        for s in self.inputs:
            if not 0 <= s < n:
                raise ValidationError(f"input species id {s} out of range")
            if self.context[s]:
                raise ValidationError(f"input species {self.crn.species[s]} appears in the context")
        for i, r in enumerate(self.crn.reactions):
            if not any(r.reactants):
                raise ValidationError(f"reaction {i} ({self.crn.format_reaction(i)}) has no reactants")
        selfinv = [i for i, r in enumerate(self.crn.reactions) if r.is_self_inverse]
        if selfinv:
            log.info("%d self-inverse reaction(s) never change state: %s",
                        len(selfinv), ", ".join(map(str, selfinv[:8])) + (" ..." if len(selfinv) > 8 else ""))
        for inv in self.invariants:
            if len(inv.weights) != n:
                raise ValidationError("invariant is not indexed by the species table")

    @property
    def arity(self) -> int:
        return len(self.inputs)

    @property
    def input_names(self) -> tuple[str, ...]:
        return tuple(self.crn.species[s] for s in self.inputs)

    def initial_configuration(self, x: Sequence[int] | Mapping[str, int]) -> Config:
        if isinstance(x, Mapping):
            unknown = set(x) - set(self.input_names)
            if unknown:
                raise ValueError(f"not input species: {sorted(unknown)}")
            x = [x.get(name, 0) for name in self.input_names]
        if len(x) != len(self.inputs):
            raise ValueError(f"expected {len(self.inputs)} input counts, got {len(x)}")
        c = list(self.context)
        for s, k in zip(self.inputs, x):
            if k < 0:
                raise ValueError("negative input count")
            c[s] += k
        return tuple(c)

    def output(self, c: Config):
        return None

    def expected(self, x: Sequence[int]):
        """Expected output on input ``x`` according to the bundled oracle."""
        if self.oracle is None:
            raise ValueError("device has no oracle; supply the expected output explicitly")
        return self.oracle(tuple(x))

    def is_correct(self, out, expected) -> bool:
        return out == expected


@dataclass(frozen=True, kw_only=True)
class CRD(Device):
    yes: frozenset[int]
    no: frozenset[int]

    kind = "crd"

    def __post_init__(self) -> None:
        super().__post_init__()
        object.__setattr__(self, "yes", frozenset(self.yes))
        object.__setattr__(self, "no", frozenset(self.no))
        overlap = self.yes & self.no
        if overlap:
            names = sorted(self.crn.species[s] for s in overlap)
            raise ValidationError(f"species vote both yes and no: {names}")
        n = len(self.crn.species)
        if any(not 0 <= s < n for s in self.yes | self.no):
            raise ValidationError("voter id out of range")

    def output(self, c: Config) -> Vote:
        # Unanimity: a yes-vote needs some yes voter present and no no-voter.
        has_yes = any(c[s] for s in self.yes)
        has_no = any(c[s] for s in self.no)
        if has_yes and not has_no:
            return Vote.YES
        if has_no and not has_yes:
            return Vote.NO
        return Vote.UNDEFINED

    def expected(self, x: Sequence[int]) -> Vote:
        val = super().expected(x)
        if isinstance(val, Vote):
            return val
        return Vote.YES if val else Vote.NO


@dataclass(frozen=True, kw_only=True)
class CRC(Device):
    """A computer whose output is ``c(output)``, or ``c(output) - c(minus)``.

    The two-species form is the diff-representation: its observable output is
    the pair of counts, and a value is correct when their difference matches.
    """

    output_species: int
    minus_species: Optional[int] = None

    kind = "crc"

    def __post_init__(self) -> None:
        super().__post_init__()
        n = len(self.crn.species)
        outs = [self.output_species] + ([self.minus_species] if self.minus_species is not None else [])
        for s in outs:
            if not 0 <= s < n:
                raise ValidationError("output species id out of range")
            if s in self.inputs:
                raise ValidationError(f"output species {self.crn.species[s]} is an input")
        if self.minus_species == self.output_species:
            raise ValidationError("output and minus species coincide")

    @property
    def is_diff(self) -> bool:
        return self.minus_species is not None

    def output(self, c: Config):
        if self.minus_species is None:
            return c[self.output_species]
        return (c[self.output_species], c[self.minus_species])

    def value(self, c: Config) -> int:
        out = self.output(c)
        return out[0] - out[1] if self.is_diff else out

    def is_correct(self, out, expected) -> bool:
        if self.is_diff:
            return out[0] - out[1] == expected
        return out == expected


def initial_configuration(dev: Device, x) -> Config:
    return dev.initial_configuration(x)


def crd_output(dev: CRD, c: Config) -> Vote:
    return dev.output(c)


def crc_output(dev: CRC, c: Config):
    return dev.output(c)


def multiset(*names: str) -> Counter:
    """``multiset('Y0', 'Y0')`` -> Counter({'Y0': 2}); handy for building reactions."""
    return Counter(names)


@dataclass(frozen=True)
class Execution:
    """A start configuration plus a sequence of directed reaction steps."""

    start: Config
    steps: tuple[Step, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "steps", tuple(Step(r, d) for r, d in self.steps))

    def __len__(self) -> int:
        return len(self.steps)

    def tokens(self) -> str:
        return " ".join(map(str, self.steps))

    def replace_steps(self, steps) -> "Execution":
        return Execution(self.start, tuple(steps))
