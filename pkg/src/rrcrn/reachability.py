"""Bounded exploration of reachable and bi-reachable configurations, stability
checks, and bounded verification of stable / reverse-robust computation.

Bi-reachable sets are usually infinite (reversing a merge reaction splits one
molecule into two), so every exploration runs under a :class:`Cap`.  A
verified verdict is a claim about the explored members only; a refutation is
unconditional because its certificate is a closed forward set.
"""

from __future__ import annotations

import enum
import random
import time
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from .core import CRN, Config, Device, Execution, Mode, Step
from .errors import CapUnreasonable, NotAMember

DEFAULT_EXTRA = 16
DEFAULT_MAX_STATES = 10**6
DEFAULT_FORWARD_HEADROOM = 16


@dataclass(frozen=True)
class Cap:
    """Exploration bounds.

    ``max_total_count`` bounds the molecule count of every explored
    configuration and ``max_states`` the number of distinct configurations.
    Forward searches launched by :func:`verify` from an explored member may go
    ``forward_headroom`` molecules higher, since splitting inputs temporarily
    raises the count before the computation can finish.
    """

    max_total_count: int
    max_states: int = DEFAULT_MAX_STATES
    forward_headroom: int = 0

    def __post_init__(self) -> None:
        if self.max_total_count < 1 or self.max_states < 1:
            raise ValueError("cap bounds must be >= 1")
        if self.forward_headroom < 0:
            raise ValueError("forward_headroom must be >= 0")

    @classmethod
    def around(cls, start: Sequence[int], extra: int = DEFAULT_EXTRA,
               max_states: int = DEFAULT_MAX_STATES,
               forward_headroom: int = DEFAULT_FORWARD_HEADROOM) -> "Cap":
        return cls(max(1, sum(start) + extra), max_states, forward_headroom)

    @property
    def forward_limit(self) -> int:
        return self.max_total_count + self.forward_headroom


@dataclass
class ReachSet:
    crn: CRN
    start: Config
    mode: Mode
    cap: Cap
    parents: dict = field(default_factory=dict)
    frontier_truncated: int = 0

    @property
    def closed(self) -> bool:
        return self.frontier_truncated == 0

    @property
    def members(self):
        return self.parents.keys()

    def __contains__(self, c) -> bool:
        return c in self.parents

    def __len__(self) -> int:
        return len(self.parents)

    def __iter__(self):
        return iter(self.parents)

    def witness(self, target: Config) -> Execution:
        return witness(self, target)


def _bfs(crn: CRN, start: Config, mode: Mode, cap: Cap, rs: ReachSet) -> Iterator[Config]:
    """Breadth-first discovery; yields each member when it is first inserted."""
    start = tuple(start)
    if sum(start) > cap.max_total_count:
        raise CapUnreasonable(
            f"start holds {sum(start)} molecules, cap is {cap.max_total_count}")
    parents = rs.parents
    parents[start] = None
    discarded: set = set()
    yield start
    queue = deque([start])
    while queue:
        c = queue.popleft()
        for step, nxt, total in crn.successors(c, mode):
            if nxt in parents:
                continue
            if total > cap.max_total_count or len(parents) >= cap.max_states:
                if nxt not in discarded:
                    discarded.add(nxt)
                    rs.frontier_truncated += 1
                continue
            parents[nxt] = (c, step)
            queue.append(nxt)
            yield nxt


def explore(crn: CRN, start: Config, mode: Mode, cap: Cap) -> ReachSet:
    rs = ReachSet(crn, tuple(start), mode, cap)
    for _ in _bfs(crn, start, mode, cap, rs):
        pass
    return rs


def witness(rs: ReachSet, target: Config) -> Execution:
    """Replayable execution from ``rs.start`` to ``target`` along BFS predecessor links."""
    target = tuple(target)
    if target not in rs.parents:
        raise NotAMember(f"{rs.crn.format(target)} was not explored")
    steps: list[Step] = []
    c = target
    while rs.parents[c] is not None:
        c, step = rs.parents[c]
        steps.append(step)
    steps.reverse()
    return Execution(rs.start, tuple(steps))


# ---------------------------------------------------------------------------
# Stability
# ---------------------------------------------------------------------------


class Stability(enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class StabilityResult:
    status: Stability
    witness: Optional[Execution] = None

    def __bool__(self) -> bool:
        return self.status is Stability.STABLE


def is_stable(dev: Device, c: Config, cap: Cap) -> StabilityResult:
    """Stable iff no forward execution from ``c`` changes the device output.

    An unstable verdict carries a forward execution to a configuration with a
    different output; ``UNKNOWN`` means the cap was hit first.
    """
    c = tuple(c)
    out = dev.output(c)
    rs = ReachSet(dev.crn, c, Mode.FORWARD_ONLY, cap)
    for member in _bfs(dev.crn, c, Mode.FORWARD_ONLY, cap, rs):
        if dev.output(member) != out:
            return StabilityResult(Stability.UNSTABLE, witness(rs, member))
    return StabilityResult(Stability.STABLE if rs.closed else Stability.UNKNOWN)


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------


class Model(enum.Enum):
    STABLE = "stable"
    REVERSE_ROBUST = "reverse-robust"


class Outcome(enum.Enum):
    VERIFIED = "VERIFIED-UP-TO-CAP"
    REFUTED = "REFUTED"
    INCONCLUSIVE = "INCONCLUSIVE"

    @property
    def exit_status(self) -> int:
        return {Outcome.VERIFIED: 0, Outcome.REFUTED: 1, Outcome.INCONCLUSIVE: 2}[self]

    @property
    def severity(self) -> int:
        return {Outcome.VERIFIED: 0, Outcome.INCONCLUSIVE: 1, Outcome.REFUTED: 2}[self]


@dataclass
class Stats:
    states: int = 0
    forward_states: int = 0
    undecided: int = 0
    states_minimizing: int = 0
    closed: bool = False
    frontier_truncated: int = 0
    seconds: float = 0.0


@dataclass
class Verdict:
    outcome: Outcome
    model: Model
    cap: Cap
    expected: object
    stats: Stats
    output: object = None
    trap: Optional[Execution] = None
    trap_config: Optional[Config] = None
    certificate: Optional[ReachSet] = None
    reason: Optional[str] = None

    @property
    def states_checked(self) -> int:
        return self.stats.states

    @property
    def exit_status(self) -> int:
        return self.outcome.exit_status


class _Decision(enum.Enum):
    GOOD = 1
    BAD = 2
    UNKNOWN = 3


class _ForwardSearch:
    """Decides, per configuration, whether a correct stable configuration is
    forward-reachable, memoizing answers across calls.

    A depth-first search prefers count-lowering moves and stops at the first
    quiescent correct configuration (quiescent implies stable) or at any
    configuration already known to succeed.  If that fails, the visited forward
    graph is analysed exactly: a node is stable when no node it reaches has a
    different output and nothing it reaches was cut off by the cap.

    Nodes already known to fail, or left undecided by an earlier search, are not
    expanded again.  A failing node can never lead to a stable correct
    configuration with unchanged output, so it is treated like an output change;
    an undecided node is treated like a cut-off.
    """

    def __init__(self, dev: Device, expected, cap: Cap) -> None:
        self.dev = dev
        self.crn = dev.crn
        self.expected = expected
        self.limit = cap.forward_limit
        self.max_states = cap.max_states
        self.good: dict[Config, object] = {}
        self.bad: set[Config] = set()
        self.unknown: set[Config] = set()
        self.visited_total = 0

    def correct(self, c: Config) -> bool:
        return self.dev.is_correct(self.dev.output(c), self.expected)

    def _expand(self, c: Config, edges: dict, opened: set) -> None:
        succ = []
        for _, nxt, total in self.crn.successors(c, Mode.FORWARD_ONLY):
            if total > self.limit:
                opened.add(c)
            else:
                succ.append((total, nxt))
        succ.sort(key=lambda p: p[0])
        edges[c] = [n for _, n in succ]

    def decide(self, c: Config) -> _Decision:
        if c in self.good:
            return _Decision.GOOD
        if c in self.bad:
            return _Decision.BAD
        if c in self.unknown:
            return _Decision.UNKNOWN
        edges: dict[Config, list] = {}
        opened: set = set()
        failing: set = set()
        visited = {c}

        def success(n) -> Optional[object]:
            if n in self.good:
                return self.good[n]
            if not edges[n] and n not in opened and self.correct(n):
                return self.dev.output(n)
            return None

        self._expand(c, edges, opened)
        hit = success(c)
        if hit is not None:
            self.good[c] = hit
            self.visited_total += 1
            return _Decision.GOOD
        stack = [(c, iter(edges[c]))]
        while stack:
            n, it = stack[-1]
            for s in it:
                if s in visited:
                    continue
                if len(visited) >= self.max_states:
                    opened.add(n)
                    continue
                visited.add(s)
                if s in self.bad or s in self.unknown:
                    edges[s] = []
                    (failing if s in self.bad else opened).add(s)
                    continue
                self._expand(s, edges, opened)
                hit = success(s)
                if hit is not None:
                    for node, _ in stack:
                        self.good[node] = hit
                    self.good[s] = hit
                    self.visited_total += len(visited)
                    return _Decision.GOOD
                stack.append((s, iter(edges[s])))
                break
            else:
                stack.pop()
        self.visited_total += len(visited)
        return self._analyse(c, visited, edges, opened, failing)

    def _analyse(self, c, visited, edges, opened, failing) -> _Decision:
        out = {n: self.dev.output(n) for n in visited}
        rev = defaultdict(list)
        seeds = set(opened) | failing
        for n in visited:
            for s in edges[n]:
                if s not in visited:
                    opened.add(n)
                    seeds.add(n)
                    continue
                rev[s].append(n)
                if out[s] != out[n]:
                    seeds.add(n)
        tainted = _backward_closure(seeds, rev)
        reached: dict[Config, object] = {}
        frontier = deque()
        for n in visited:
            if n not in tainted and self.correct(n):
                reached[n] = out[n]
                frontier.append(n)
        while frontier:
            n = frontier.popleft()
            for p in rev[n]:
                if p not in reached:
                    reached[p] = reached[n]
                    frontier.append(p)
        self.good.update(reached)
        # Nodes that cannot reach a cut-off had their whole forward closure explored.
        uncertain = _backward_closure(opened, rev)
        for n in visited:
            if n not in reached:
                (self.unknown if n in uncertain else self.bad).add(n)
        if c in reached:
            return _Decision.GOOD
        return _Decision.UNKNOWN if c in uncertain else _Decision.BAD


def _backward_closure(seeds, rev) -> set:
    seen = set(seeds)
    queue = deque(seeds)
    while queue:
        n = queue.popleft()
        for p in rev[n]:
            if p not in seen:
                seen.add(p)
                queue.append(p)
    return seen


def _tightest_trap(dev: Device, i: Config, mode: Mode, cap: Cap, search: "_ForwardSearch",
                   rs: ReachSet, found: Config) -> tuple[ReachSet, Config]:
    """Re-search for a trap under molecule bounds ``sum(i), sum(i) + 1, ...``.

    The first trap found this way tends to be the most collapsed one (for the
    annihilation trap: the empty configuration rather than a half-converted
    one), and its witness never leaves the tighter bound.  Forward decisions
    are shared with the main search, so this costs little.
    """
    for t in range(max(1, sum(i)), cap.max_total_count):
        tight = Cap(t, cap.max_states, cap.forward_headroom)
        trs = ReachSet(dev.crn, i, mode, tight)
        for c in _bfs(dev.crn, i, mode, tight, trs):
            if search.decide(c) is _Decision.BAD:
                return trs, c
    return rs, found


def verify(dev: Device, x, model: Model = Model.REVERSE_ROBUST, cap: Optional[Cap] = None,
           expected=None) -> Verdict:
    """Bounded correctness check for input ``x``.

    Every configuration reachable from the initial configuration (forward only
    for :attr:`Model.STABLE`, forward and reverse for
    :attr:`Model.REVERSE_ROBUST`) must be able to reach, by forward reactions,
    a stable configuration whose output matches ``expected`` (taken from the
    device oracle when omitted).
    """
    t0 = time.perf_counter()
    i = dev.initial_configuration(x)
    if expected is None:
        expected = dev.expected(x if not isinstance(x, dict) else
                                [x.get(n, 0) for n in dev.input_names])
    if cap is None:
        cap = Cap.around(i)
    mode = Mode.FORWARD_ONLY if model is Model.STABLE else Mode.BIDIRECTIONAL
    rs = ReachSet(dev.crn, i, mode, cap)
    search = _ForwardSearch(dev, expected, cap)
    stats = Stats()
    first_unknown = None

    def finish(outcome: Outcome, **kw) -> Verdict:
        stats.states = len(rs)
        stats.forward_states = search.visited_total
        stats.closed = rs.closed and outcome is not Outcome.REFUTED
        stats.frontier_truncated = rs.frontier_truncated
        stats.seconds = time.perf_counter() - t0
        return Verdict(outcome, model, cap, expected, stats, **kw)

    for c in _bfs(dev.crn, i, mode, cap, rs):
        d = search.decide(c)
        if d is _Decision.BAD:
            trap_rs, c = _tightest_trap(dev, i, mode, cap, search, rs, c)
            stats.states_minimizing = len(trap_rs) if trap_rs is not rs else 0
            cert = explore(dev.crn, c, Mode.FORWARD_ONLY, Cap(search.limit, cap.max_states))
            return finish(Outcome.REFUTED, trap=witness(trap_rs, c), trap_config=c,
                          certificate=cert, output=search.good.get(i),
                          reason="no correct stable configuration is forward-reachable "
                                 f"from {dev.crn.format(c)}")
        if d is _Decision.UNKNOWN:
            stats.undecided += 1
            if first_unknown is None:
                first_unknown = c
    if first_unknown is not None:
        return finish(Outcome.INCONCLUSIVE, output=search.good.get(i),
                      reason=f"{stats.undecided} member(s) undecided within the cap, "
                             f"first {dev.crn.format(first_unknown)}")
    return finish(Outcome.VERIFIED, output=search.good.get(i))


def random_execution(crn: CRN, start: Config, length: int, rng: random.Random,
                     mode: Mode = Mode.BIDIRECTIONAL,
                     max_total: Optional[int] = None) -> Execution:
    """A random walk of at most ``length`` state-changing steps."""
    c = tuple(start)
    steps = []
    for _ in range(length):
        opts = [(step, nxt) for step, nxt, t in crn.successors(c, mode)
                if max_total is None or t <= max_total]
        if not opts:
            break
        step, c = rng.choice(opts)
        steps.append(step)
    return Execution(tuple(start), tuple(steps))
