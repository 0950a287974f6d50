"""Linear and modular invariants over species counts.

An invariant is a weight vector ``w`` with ``w . net_change(r) == 0`` for every
reaction ``r`` (modulo ``m`` for modular invariants).  Such a quantity is then
constant along any bi-execution, forward or reverse.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Optional, Union

from .core import CRN, Config, Execution
from .transform import replay


@dataclass(frozen=True)
class LinearInvariant:
    weights: tuple[int, ...]
    name: Optional[str] = None

    def evaluate(self, c) -> int:
        return sum(w * x for w, x in zip(self.weights, c) if w)

    def residual(self, delta) -> int:
        return self.evaluate(delta)

    def support(self) -> dict[int, int]:
        return {i: w for i, w in enumerate(self.weights) if w}


@dataclass(frozen=True)
class ModularInvariant:
    weights: tuple[int, ...]
    modulus: int
    name: Optional[str] = None

    def __post_init__(self) -> None:
        if self.modulus < 2:
            raise ValueError(f"modulus must be >= 2, got {self.modulus}")
        object.__setattr__(self, "weights", tuple(w % self.modulus for w in self.weights))

    def evaluate(self, c) -> int:
        return sum(w * x for w, x in zip(self.weights, c) if w) % self.modulus

    def residual(self, delta) -> int:
        return self.evaluate(delta)

    def linearization(self) -> LinearInvariant:
        return LinearInvariant(self.weights, self.name)

    def support(self) -> dict[int, int]:
        return {i: w for i, w in enumerate(self.weights) if w}


Invariant = Union[LinearInvariant, ModularInvariant]


@dataclass(frozen=True)
class InvariantReport:
    violations: tuple[tuple[int, int], ...] = field(default=())

    @property
    def holds(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.holds


def evaluate(inv: Invariant, c) -> int:
    return inv.evaluate(c)


def check(crn: CRN, inv: Invariant) -> InvariantReport:
    """Evaluate ``inv`` on each reaction's net change; report the nonzero residuals."""
    if len(inv.weights) != len(crn.species):
        raise ValueError("invariant is not indexed by this CRN's species table")
    bad = []
    for i, r in enumerate(crn.reactions):
        res = inv.residual(r.net_change())
        if res:
            bad.append((i, res))
    return InvariantReport(tuple(bad))


def conserved_along(crn: CRN, inv: Invariant, execution: Execution) -> bool:
    configs = replay(crn, execution)
    first = inv.evaluate(configs[0])
    return all(inv.evaluate(c) == first for c in configs[1:])


def _normalize(v: list[Fraction]) -> tuple[int, ...]:
    den = lcm(*(x.denominator for x in v)) if v else 1
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g:
        ints = [x // g for x in ints]
    for x in ints:
        if x:
            if x < 0:
                ints = [-y for y in ints]
            break
    return tuple(ints)


def nullspace(rows: list[list[int]], ncols: int) -> list[tuple[int, ...]]:
    """Integer basis of ``{w : rows @ w == 0}`` by exact Gauss-Jordan elimination.

    One basis vector per free column, in column order, each scaled to coprime
    integers with its first nonzero entry positive.
    """
    m = [[Fraction(x) for x in row] for row in rows if any(row)]
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][col]
        m[r] = [x / p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -m[i][fc]
        basis.append(_normalize(v))
    return basis


def find_linear_invariants(crn: CRN) -> list[LinearInvariant]:
    rows = [list(r.net_change()) for r in crn.reactions]
    return [LinearInvariant(w) for w in nullspace(rows, len(crn.species))]


def format_invariant(crn: CRN, inv: Invariant) -> str:
    terms = " ".join(f"{crn.species[i]}:{w}" for i, w in inv.support().items())
    name = f" {inv.name}" if inv.name else ""
    if isinstance(inv, ModularInvariant):
        return f"mod {inv.modulus}{name} {terms}".rstrip()
    return f"linear{name} {terms}".rstrip()
