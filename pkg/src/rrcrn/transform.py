"""Rewriting of executions: replay, commuting adjacent steps, cancelling inverse
pairs, and normalizing input-split reactions to a forward-only prefix.

A reverse step of ``r = (a, p)`` is treated as the forward reaction ``(p, a)``,
so commutation applies uniformly to directed steps.
"""

from __future__ import annotations

from typing import Iterable

from .core import CRN, Config, Direction, Execution, Step
from .errors import (
    CommutationBlocked,
    NotAnInversePair,
    PairingFailed,
    PreconditionViolated,
    ReplayFailure,
)


def replay(crn: CRN, execution: Execution) -> list[Config]:
    """Configurations visited by ``execution``, start included."""
    c = tuple(execution.start)
    if len(c) != len(crn.species):
        raise ReplayFailure(0, "start configuration is not indexed by the species table")
    if any(x < 0 for x in c):
        raise ReplayFailure(0, "negative count in start configuration")
    out = [c]
    nrx = len(crn.reactions)
    for i, (rxn, d) in enumerate(execution.steps):
        if not 0 <= rxn < nrx:
            raise ReplayFailure(i, f"no reaction {rxn}")
        if not crn.is_applicable(c, rxn, d):
            raise ReplayFailure(i, f"{rxn}{d.value} not applicable at {crn.format(c)}")
        c = crn.apply(c, rxn, d)
        out.append(c)
    return out


def _blocking_species(crn: CRN, first: Step, second: Step) -> list[int]:
    made = crn.reactions[first.rxn].produced(first.direction)
    used = crn.reactions[second.rxn].consumed(second.direction)
    return [s for s, (p, a) in enumerate(zip(made, used)) if p and a]


def _swap(crn: CRN, steps: list[Step], i: int) -> None:
    if not 0 <= i < len(steps) - 1:
        raise IndexError(f"no adjacent pair at step {i}")
    blocked = _blocking_species(crn, steps[i], steps[i + 1])
    if blocked:
        names = ", ".join(crn.species[s] for s in blocked)
        raise CommutationBlocked(f"step {i} produces {names}, consumed by step {i + 1}")
    steps[i], steps[i + 1] = steps[i + 1], steps[i]


def commute_adjacent(crn: CRN, execution: Execution, i: int) -> Execution:
    """Swap steps ``i`` and ``i + 1``.

    Allowed when nothing the first step produces is consumed by the second;
    under that hypothesis the swapped execution replays to the same end point.
    """
    steps = list(execution.steps)
    _swap(crn, steps, i)
    return execution.replace_steps(steps)


def cancel_inverse_pair(execution: Execution, i: int) -> Execution:
    steps = execution.steps
    if not 0 <= i < len(steps) - 1:
        raise NotAnInversePair(f"no adjacent pair at step {i}")
    a, b = steps[i], steps[i + 1]
    if a.rxn != b.rxn or a.direction is b.direction:
        raise NotAnInversePair(f"steps {a} and {b} are not a reaction and its reverse")
    return execution.replace_steps(steps[:i] + steps[i + 2:])


def _check_split_preconditions(crn: CRN, final: Config, split_ids: set[int]) -> None:
    for sid in split_ids:
        if not 0 <= sid < len(crn.reactions):
            raise PreconditionViolated(f"no reaction {sid}")
        r = crn.reactions[sid]
        for s, k in enumerate(r.reactants):
            if not k:
                continue
            if final[s]:
                raise PreconditionViolated(
                    f"final configuration still holds split reactant {crn.species[s]}")
            for j, other in enumerate(crn.reactions):
                if j != sid and (other.reactants[s] or other.products[s]):
                    raise PreconditionViolated(
                        f"split reactant {crn.species[s]} also occurs in reaction {j}")
            if r.products[s]:
                raise PreconditionViolated(f"split reaction {sid} reproduces its reactant")


def eliminate_reverse_splits(crn: CRN, execution: Execution,
                             split_ids: Iterable[int]) -> Execution:
    """Rewrite ``execution`` so split reactions run only forward, all at the start.

    Each reverse split is paired with the next occurrence of the same reaction
    (which must be forward once the last reverse of a run is reached), shuffled
    up to it by commutation and cancelled.  The remaining forward splits are
    then commuted to the front, keeping their relative order.
    """
    split_ids = set(split_ids)
    configs = replay(crn, execution)
    _check_split_preconditions(crn, configs[-1], split_ids)

    steps = list(execution.steps)

    def fail(msg: str):
        return PairingFailed(msg, execution.replace_steps(steps))

    while True:
        j = next((t for t, s in enumerate(steps)
                  if s.rxn in split_ids and s.direction is Direction.REVERSE), None)
        if j is None:
            break
        rxn = steps[j].rxn
        while True:
            k = next((t for t in range(j + 1, len(steps)) if steps[t].rxn == rxn), None)
            if k is None:
                raise fail(f"reverse split at step {j} has no later forward split")
            if steps[k].direction is Direction.REVERSE:
                j = k
                continue
            break
        for t in range(j, k - 1):
            try:
                _swap(crn, steps, t)
            except CommutationBlocked as exc:
                raise fail(str(exc)) from exc
        del steps[k - 1:k + 1]

    prefix = 0
    for idx in range(len(steps)):
        if steps[idx].rxn not in split_ids:
            continue
        for t in range(idx - 1, prefix - 1, -1):
            try:
                _swap(crn, steps, t)
            except CommutationBlocked as exc:
                raise fail(str(exc)) from exc
        prefix += 1

    return execution.replace_steps(steps)


def is_split_normal(execution: Execution, split_ids: Iterable[int]) -> bool:
    """No reverse split steps, and all split steps form a prefix."""
    split_ids = set(split_ids)
    seen_other = False
    for s in execution.steps:
        if s.rxn in split_ids:
            if s.direction is Direction.REVERSE or seen_other:
                return False
        else:
            seen_other = True
    return True
