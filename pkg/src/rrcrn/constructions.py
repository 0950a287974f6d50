"""Compilers for the reverse-robust mod, threshold, Boolean, affine and
semilinear constructions.

Every compiler returns a device bundling the invariants that make its
correctness argument go through and the arithmetic spec as oracle.  Species
of embedded sub-devices are renamed by suffixing ``#<unit>``, so output is
deterministic and names never collide with top-level species.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .core import CRC, CRD, CRN, Device
from .errors import ArityMismatch
from .invariants import LinearInvariant, ModularInvariant
from .specs import (
    AffineSpec,
    And,
    ModSpec,
    Not,
    Or,
    Predicate,
    SemilinearSpec,
    ThresholdSpec,
    negate,
)


def input_name(i: int) -> str:
    return f"X{i + 1}"


class _Builder:
    """Accumulates species, reactions and invariants by species name."""

    def __init__(self) -> None:
        self.species: list[str] = []
        self._known: set[str] = set()
        self.reactions: list[tuple[Counter, Counter]] = []
        self._seen: set = set()
        self.invariants: list[tuple[str, Optional[str], dict, Optional[int]]] = []
        self.quantities: dict[str, dict] = {}

    def add(self, *names: str) -> None:
        for n in names:
            if n not in self._known:
                self._known.add(n)
                self.species.append(n)

    def rxn(self, lhs: Mapping[str, int], rhs: Mapping[str, int]) -> None:
        lhs = Counter({s: k for s, k in lhs.items() if k})
        rhs = Counter({s: k for s, k in rhs.items() if k})
        key = (frozenset(lhs.items()), frozenset(rhs.items()))
        if key in self._seen:
            return
        self._seen.add(key)
        self.add(*lhs, *rhs)
        self.reactions.append((lhs, rhs))

    def linear(self, weights: Mapping[str, int], name: Optional[str] = None) -> None:
        self.invariants.append(("linear", name, dict(weights), None))

    def modular(self, weights: Mapping[str, int], modulus: int, name: Optional[str] = None) -> None:
        self.invariants.append(("mod", name, dict(weights), modulus))

    def embed(self, dev: Device, suffix: str, top_inputs: Sequence[str],
              lift_invariants: bool = True) -> dict[str, str]:
        """Copy ``dev`` with every species renamed ``name + suffix``.

        Its invariants and quantities are lifted to the composite: a top-level
        input gets the weight of the embedded copy it is split into, which
        keeps them invariant under the split reaction.
        """
        ren = {s: s + suffix for s in dev.crn.species}
        self.add(*ren.values())
        for r in dev.crn.reactions:
            self.rxn(_named(dev.crn, r.reactants, ren), _named(dev.crn, r.products, ren))
        if lift_invariants:
            for inv in dev.invariants:
                w = self._lift(dev, inv.weights, ren, top_inputs)
                name = inv.name + suffix if inv.name else None
                if isinstance(inv, ModularInvariant):
                    self.modular(w, inv.modulus, name)
                else:
                    self.linear(w, name)
        for qname, q in dev.quantities.items():
            self.quantities[qname + suffix] = self._lift(dev, q.weights, ren, top_inputs)
        return ren

    @staticmethod
    def _lift(dev: Device, weights, ren, top_inputs) -> dict[str, int]:
        w = {ren[s]: k for s, k in zip(dev.crn.species, weights) if k}
        for top, sid in zip(top_inputs, dev.inputs):
            k = weights[sid]
            if k:
                w[top] = w.get(top, 0) + k
        return w

    def crn(self) -> CRN:
        return CRN.from_names(self.species, self.reactions)

    def dense_invariants(self) -> tuple:
        out = []
        for kind, name, w, m in self.invariants:
            vec = self._dense(w)
            out.append(ModularInvariant(vec, m, name) if kind == "mod" else LinearInvariant(vec, name))
        return tuple(out)

    def dense_quantities(self) -> dict[str, LinearInvariant]:
        return {n: LinearInvariant(self._dense(w), n) for n, w in self.quantities.items()}

    def _dense(self, w: Mapping[str, int]) -> tuple[int, ...]:
        idx = {s: i for i, s in enumerate(self.species)}
        vec = [0] * len(self.species)
        for s, k in w.items():
            vec[idx[s]] += k
        return tuple(vec)

    def ids(self, names) -> list[int]:
        idx = {s: i for i, s in enumerate(self.species)}
        return [idx[n] for n in names]


def _named(crn: CRN, vec, ren) -> Counter:
    return Counter({ren[crn.species[s]]: k for s, k in enumerate(vec) if k})


# ---------------------------------------------------------------------------
# Predicates
# ---------------------------------------------------------------------------


def compile_mod(spec: ModSpec) -> CRD:
    m = spec.modulus
    b = _Builder()
    xs = [input_name(i) for i in range(spec.arity)]
    ys = [f"Y{p}" for p in range(m)]
    b.add(*xs, *ys)
    for x, w in zip(xs, spec.weights):
        b.rxn({x: 1}, {ys[w % m]: 1})
    for p in range(m):
        for q in range(p, m):
            b.rxn(Counter([ys[p], ys[q]]), {ys[(p + q) % m]: 1})
    inv = dict(zip(xs, spec.weights))
    inv.update({ys[p]: p for p in range(1, m)})
    b.modular(inv, m, "I_M")
    return CRD(crn=b.crn(), inputs=tuple(b.ids(xs)), invariants=b.dense_invariants(),
               yes=frozenset(b.ids([ys[spec.residue]])),
               no=frozenset(b.ids([y for p, y in enumerate(ys) if p != spec.residue])),
               oracle=spec)


def compile_threshold(spec: ThresholdSpec) -> CRD:
    c = spec.clamp
    span = range(-c, c + 1)
    b = _Builder()
    xs = [input_name(i) for i in range(spec.arity)]

    def L(p: int) -> str:
        return f"YL_{p}"

    def F(p: int) -> str:
        return f"YF_{p}"

    b.add(*xs, *(L(p) for p in span), *(F(p) for p in span))
    for x, w in zip(xs, spec.weights):
        b.rxn({x: 1}, {L(w): 1})
    for p in span:
        for q in span:
            for role in (L, F):
                s = p + q
                if s < -c:
                    out = Counter([L(-c), F(s + c)])
                elif s > c:
                    out = Counter([L(c), F(s - c)])
                else:
                    out = Counter([L(s)])
                b.rxn(Counter([L(p), role(q)]), out)
    inv = dict(zip(xs, spec.weights))
    for p in span:
        if p:
            inv[L(p)] = p
            inv[F(p)] = p
    b.linear(inv, "I_T")
    return CRD(crn=b.crn(), inputs=tuple(b.ids(xs)), invariants=b.dense_invariants(),
               yes=frozenset(b.ids([L(p) for p in span if p >= spec.threshold])),
               no=frozenset(b.ids([L(p) for p in span if p < spec.threshold])),
               oracle=spec)


def complement(dev: CRD) -> CRD:
    return CRD(crn=dev.crn, inputs=dev.inputs, context=dev.context, invariants=dev.invariants,
               yes=dev.no, no=dev.yes,
               oracle=negate(dev.oracle) if dev.oracle is not None else None,
               quantities=dev.quantities)


_VOTERS = ("V_NN", "V_NY", "V_YN", "V_YY")


def combine_boolean(d1: CRD, d2: CRD, op: str) -> CRD:
    """Decide ``d1 and d2`` or ``d1 or d2`` by running both on split inputs
    and recording their votes in one of four new voter species."""
    if op not in ("and", "or"):
        raise ValueError(f"op must be 'and' or 'or', got {op!r}")
    if d1.arity != d2.arity:
        raise ArityMismatch(f"arity {d1.arity} vs {d2.arity}")
    b = _Builder()
    xs = [input_name(i) for i in range(d1.arity)]
    b.add(*xs, *_VOTERS)
    units = []
    for u, dev in enumerate((d1, d2), start=1):
        ren = {s: s + f"#{u}" for s in dev.crn.species}
        units.append((dev, ren))
    for i, x in enumerate(xs):
        copies = [ren[dev.crn.species[dev.inputs[i]]] for dev, ren in units]
        b.rxn({x: 1}, Counter(copies + ["V_NN"]))
    for u, (dev, _) in enumerate(units, start=1):
        b.embed(dev, f"#{u}", xs)
    for u, (dev, ren) in enumerate(units):
        for vote, voters in (("Y", dev.yes), ("N", dev.no)):
            flip = "N" if vote == "Y" else "Y"
            for s in sorted(voters):
                name = ren[dev.crn.species[s]]
                for other in "YN":
                    if u == 0:
                        before, after = f"V_{flip}{other}", f"V_{vote}{other}"
                    else:
                        before, after = f"V_{other}{flip}", f"V_{other}{vote}"
                    b.rxn({name: 1, before: 1}, {name: 1, after: 1})
    yes = ["V_YY"] if op == "and" else ["V_NY", "V_YN", "V_YY"]
    no = [v for v in _VOTERS if v not in yes]
    oracle = None
    if d1.oracle is not None and d2.oracle is not None:
        oracle = And(d1.oracle, d2.oracle) if op == "and" else Or(d1.oracle, d2.oracle)
    context = _lift_context(b, [(dev, ren) for dev, ren in units])
    return CRD(crn=b.crn(), inputs=tuple(b.ids(xs)), context=context,
               invariants=b.dense_invariants(), yes=frozenset(b.ids(yes)),
               no=frozenset(b.ids(no)), oracle=oracle, quantities=b.dense_quantities())


def _lift_context(b: _Builder, units) -> tuple[int, ...]:
    idx = {s: i for i, s in enumerate(b.species)}
    ctx = [0] * len(b.species)
    for dev, ren in units:
        for s, k in enumerate(dev.context):
            if k:
                ctx[idx[ren[dev.crn.species[s]]]] += k
    return tuple(ctx)


def compile_predicate(p: Predicate) -> CRD:
    if isinstance(p, ModSpec):
        return compile_mod(p)
    if isinstance(p, ThresholdSpec):
        return compile_threshold(p)
    if isinstance(p, Not):
        return complement(compile_predicate(p.operand))
    if isinstance(p, (And, Or)):
        op = "and" if isinstance(p, And) else "or"
        return combine_boolean(compile_predicate(p.left), compile_predicate(p.right), op)
    raise TypeError(f"not a predicate: {p!r}")


# ---------------------------------------------------------------------------
# Parallel composition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Composition:
    """Disjoint union of devices fed by one n-ary split reaction per input."""

    device: Device
    renaming: tuple[dict[str, str], ...]
    split_ids: tuple[int, ...]
    units: tuple[Device, ...] = field(repr=False)

    @property
    def crn(self) -> CRN:
        return self.device.crn

    @property
    def inputs(self) -> tuple[int, ...]:
        return self.device.inputs


def _split_and_embed(b: _Builder, devices: Sequence[Device], xs: Sequence[str],
                     lift: Sequence[bool]) -> tuple[list[dict[str, str]], list[int]]:
    for dev in devices[1:]:
        if dev.arity != devices[0].arity:
            raise ArityMismatch(f"arity {devices[0].arity} vs {dev.arity}")
    rens = [{s: s + f"#{u}" for s in dev.crn.species} for u, dev in enumerate(devices, start=1)]
    b.add(*xs)
    split_ids = []
    for i, x in enumerate(xs):
        split_ids.append(len(b.reactions))
        b.rxn({x: 1}, Counter(ren[dev.crn.species[dev.inputs[i]]]
                              for dev, ren in zip(devices, rens)))
    for u, (dev, keep) in enumerate(zip(devices, lift), start=1):
        b.embed(dev, f"#{u}", xs, lift_invariants=keep)
    return rens, split_ids


def parallel_compose(devices: Sequence[Device]) -> Composition:
    devices = list(devices)
    if not devices:
        raise ValueError("nothing to compose")
    b = _Builder()
    xs = [input_name(i) for i in range(devices[0].arity)]
    rens, split_ids = _split_and_embed(b, devices, xs, [True] * len(devices))
    dev = Device(crn=b.crn(), inputs=tuple(b.ids(xs)), context=_lift_context(b, zip(devices, rens)),
                 invariants=b.dense_invariants(), quantities=b.dense_quantities())
    return Composition(dev, tuple(rens), tuple(split_ids), tuple(devices))


# ---------------------------------------------------------------------------
# Functions
# ---------------------------------------------------------------------------


def compile_affine(spec: AffineSpec) -> CRC:
    """Diff-representation CRC: ``count(YP) - count(YC) = f(x)`` once stable."""
    d, ns, offs, bconst = spec.d, spec.n, spec.offsets, spec.constant
    k = spec.arity
    b = _Builder()
    xs = [input_name(i) for i in range(k)]
    cs = [[f"C{i + 1}_{p}" for p in range(offs[i] + 1)] for i in range(k)]  # index 0 unused
    xp = [f"X{i + 1}'" for i in range(k)]
    dp = [f"DP{p}" for p in range(d)]  # index 0 is the empty multiset
    dc = [f"DC{q}" for q in range(d)]
    b.add(*xs)
    for i in range(k):
        b.add(*cs[i][1:])
    b.add(*xp, "B", *dp[1:], *dc[1:], "YP", "YC")

    def acc(names: list[str], idx: int) -> Counter:
        return Counter([names[idx]]) if idx else Counter()

    for i in range(k):
        first = cs[i][1] if offs[i] else xp[i]
        b.rxn({xs[i]: 1}, Counter({first: 1, "B": 1, "YP": bconst}))
    for i in range(k):
        ci = offs[i]
        for p in range(1, ci + 1):
            for q in range(p, ci + 1):
                if p + q <= ci:
                    out = Counter([cs[i][p + q]])
                else:
                    out = Counter({cs[i][ci]: 1, xp[i]: p + q - ci})
                b.rxn(Counter([cs[i][p], cs[i][q]]), out)
    for i in range(k):
        n = ns[i]
        if d == 1:
            out = Counter({"YP": n}) if n >= 0 else Counter({"YC": -n})
        else:
            out = Counter({dp[1]: n}) if n >= 0 else Counter({dc[1]: -n})
        b.rxn({xp[i]: 1}, out)
    for names, y in ((dp, "YP"), (dc, "YC")):
        for p in range(1, d):
            for q in range(p, d):
                if p + q <= d - 1:
                    out = acc(names, p + q)
                else:
                    out = acc(names, p + q - d) + Counter([y])
                b.rxn(Counter([names[p], names[q]]), out)
    b.rxn({"B": 2}, Counter({"B": 1, "YC": bconst}))

    def input_weights(i: int, n: int) -> dict[str, int]:
        w = {xs[i]: n, xp[i]: n}
        w.update({cs[i][p]: n * p for p in range(1, offs[i] + 1)})
        return w

    f_hat: dict[str, int] = {}
    for i in range(k):
        f_hat.update(input_weights(i, ns[i]))
    f_hat.update({dp[p]: p for p in range(1, d)})
    f_hat.update({dc[q]: -q for q in range(1, d)})
    f_hat.update({"YP": d, "YC": -d, "B": -bconst * d})
    b.linear(f_hat, "I_fhat")
    if d > 1:
        ip: dict[str, int] = {}
        ic: dict[str, int] = {}
        for i in range(k):
            (ip if ns[i] >= 0 else ic).update(input_weights(i, ns[i]))
        ip.update({dp[p]: p for p in range(1, d)})
        ic.update({dc[q]: -q for q in range(1, d)})
        b.modular(ip, d, "I_P")
        b.modular(ic, d, "I_C")
    for i in range(k):
        b.quantities[f"I_c{i + 1}"] = {**{xs[i]: 1}, **{cs[i][p]: p for p in range(1, offs[i] + 1)}}
    ids = b.ids(["YP", "YC"])
    return CRC(crn=b.crn(), inputs=tuple(b.ids(xs)), invariants=b.dense_invariants(),
               output_species=ids[0], minus_species=ids[1], oracle=spec,
               quantities=b.dense_quantities())


def compile_semilinear(spec: SemilinearSpec, grid: Optional[int] = None) -> CRC:
    """Piecewise-affine CRC.

    Each piece's domain decider and affine computer run in parallel on split
    inputs; a yes vote of the domain decider moves the computer's inactive
    outputs into the active ones and onto the global output ``Y``, a no vote
    moves them back.
    """
    if grid is None:
        spec.check_domains()
    else:
        spec.check_domains(grid)
    units: list[Device] = []
    for f, dom in spec.pieces:
        units.append(compile_predicate(dom))
        units.append(compile_affine(f))
    b = _Builder()
    xs = [input_name(i) for i in range(spec.arity)]
    lift = [isinstance(u, CRD) for u in units]
    rens, split_ids = _split_and_embed(b, units, xs, lift)
    m = len(spec.pieces)
    yps = [f"YP_{j + 1}" for j in range(m)]
    ycs = [f"YC_{j + 1}" for j in range(m)]
    b.add(*yps, *ycs, "Y")
    for j in range(m):
        dj, cj = units[2 * j], units[2 * j + 1]
        rd, rc = rens[2 * j], rens[2 * j + 1]
        hat_p = rc[cj.crn.species[cj.output_species]]
        hat_c = rc[cj.crn.species[cj.minus_species]]
        yes = [rd[dj.crn.species[s]] for s in sorted(dj.yes)]
        no = [rd[dj.crn.species[s]] for s in sorted(dj.no)]
        for v in yes:
            b.rxn({v: 1, hat_p: 1}, {v: 1, yps[j]: 1, "Y": 1})
        for v in no:
            b.rxn({v: 1, yps[j]: 1, "Y": 1}, {v: 1, hat_p: 1})
        for v in yes:
            b.rxn({v: 1, hat_c: 1}, {v: 1, ycs[j]: 1})
        for v in no:
            b.rxn({v: 1, ycs[j]: 1}, {v: 1, hat_c: 1})
        b.rxn({yps[j]: 1, ycs[j]: 1, "Y": 1}, {})
    for j in range(m):
        cj, rc, u = units[2 * j + 1], rens[2 * j + 1], 2 * j + 2
        dj_ = spec.pieces[j][0].d
        for inv in cj.invariants:
            w = b._lift(cj, inv.weights, rc, xs)
            if inv.name == "I_fhat":
                w[yps[j]] = dj_
                w[ycs[j]] = -dj_
                b.linear(w, f"I_{j + 1}")
            elif isinstance(inv, ModularInvariant):
                b.modular(w, inv.modulus, f"{inv.name}#{u}")
            else:
                b.linear(w, f"{inv.name}#{u}" if inv.name else None)
    i0 = {y: 1 for y in yps}
    i0["Y"] = -1
    b.linear(i0, "I_0")
    return CRC(crn=b.crn(), inputs=tuple(b.ids(xs)), context=_lift_context(b, zip(units, rens)),
               invariants=b.dense_invariants(), output_species=b.ids(["Y"])[0], oracle=spec,
               quantities=b.dense_quantities())


def split_reactions(dev: Device) -> tuple[int, ...]:
    """Reactions consuming exactly one input molecule whose species occurs in
    no other reaction and is not reproduced: the input-split reactions."""
    out = []
    inputs = set(dev.inputs)
    for i, r in enumerate(dev.crn.reactions):
        used = [s for s, k in enumerate(r.reactants) if k]
        if len(used) != 1 or r.reactants[used[0]] != 1 or used[0] not in inputs:
            continue
        s = used[0]
        if r.products[s]:
            continue
        if any(j != i and (o.reactants[s] or o.products[s]) for j, o in enumerate(dev.crn.reactions)):
            continue
        out.append(i)
    return tuple(out)
