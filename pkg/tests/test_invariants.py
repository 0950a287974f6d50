import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from rrcrn import CRN, Execution, compile_mod, compile_threshold
from rrcrn.core import F
from rrcrn.invariants import (
    LinearInvariant,
    ModularInvariant,
    check,
    conserved_along,
    evaluate,
    find_linear_invariants,
    format_invariant,
    nullspace,
)
from rrcrn.specs import ModSpec, ThresholdSpec

from .conftest import trap_crn
from .strategies import crns, walk


def test_evaluate_examples(parity):
    (i_m,) = parity.invariants
    assert i_m.modulus == 2
    assert evaluate(i_m, parity.crn.config(X1=3)) == 1
    assert evaluate(i_m, parity.crn.zero()) == 0
    thr = compile_threshold(ThresholdSpec((1, -1), 0))
    (i_t,) = thr.invariants
    assert evaluate(i_t, thr.crn.config(X1=2, X2=1)) == 1


def test_check_examples(parity):
    assert check(parity.crn, parity.invariants[0]).holds
    crn = trap_crn()
    rep = check(crn, LinearInvariant((1, 2, 0)))
    # Z -> Y changes the weighted sum by +2; 2X -> Y by 0; Z -> 0 by 0
    assert rep.violations == ((1, 2),)
    assert check(crn, LinearInvariant((0, 0, 0))).holds


def test_modular_weights_reduced():
    inv = ModularInvariant((5, -1, 2), 4)
    assert inv.weights == (1, 3, 2)
    with pytest.raises(ValueError):
        ModularInvariant((1,), 1)


def test_find_examples():
    crn = CRN.from_names(["X", "Y"], [({"X": 2}, {"Y": 1})])
    assert [i.weights for i in find_linear_invariants(crn)] == [(1, 2)]
    assert find_linear_invariants(trap_crn()) == []
    empty = CRN.from_names(["A", "B", "C"], [])
    assert [i.weights for i in find_linear_invariants(empty)] == [(1, 0, 0), (0, 1, 0), (0, 0, 1)]


def test_find_on_mod_device():
    # Y_p weights are only conserved modulo m, so the linear basis misses I_M
    dev = compile_mod(ModSpec((1,), 0, 3))
    for inv in find_linear_invariants(dev.crn):
        assert check(dev.crn, inv).holds


@given(st.lists(st.lists(st.integers(-3, 3), min_size=4, max_size=4), min_size=0, max_size=4))
def test_nullspace_against_sympy(rows):
    basis = nullspace(rows, 4)
    expected = sympy.Matrix(rows).nullspace() if rows else sympy.eye(4).columnspace()
    assert len(basis) == len(expected)
    for v in basis:
        assert all(sum(a * b for a, b in zip(r, v)) == 0 for r in rows)
        nz = [x for x in v if x]
        assert nz and nz[0] > 0
        assert sympy.igcd(*nz) == 1 if len(nz) > 1 else abs(nz[0]) == 1
    if basis:
        assert sympy.Matrix(basis).rank() == len(basis)


@given(crns())
def test_basis_vectors_pass_check(crn):
    for inv in find_linear_invariants(crn):
        assert check(crn, inv).holds


def test_conserved_along_examples(parity):
    crn = trap_crn()
    x_only = LinearInvariant((1, 0, 0))
    assert not conserved_along(crn, x_only, Execution(crn.config(X=2), ((0, F),)))
    assert conserved_along(crn, x_only, Execution(crn.config(X=2)))
    for seed in range(20):
        ex = walk(parity.crn, parity.crn.config(X1=5), 30, seed, max_total=12)
        assert conserved_along(parity.crn, parity.invariants[0], ex)


@given(crns(), st.lists(st.integers(-2, 2), min_size=4, max_size=4), st.integers(2, 4),
       st.integers(0, 10 ** 6))
def test_check_iff_conserved(crn, w, m, seed):
    n = len(crn.species)
    for inv in (LinearInvariant(tuple(w[:n])), ModularInvariant(tuple(w[:n]), m)):
        ex = walk(crn, (2,) * n, 12, seed, max_total=3 * n + 6)
        if check(crn, inv).holds:
            assert conserved_along(crn, inv, ex)
        else:
            # a single step of any violating reaction breaks conservation
            (i, _), *_ = check(crn, inv).violations
            start = tuple(max(a, 0) for a in crn.reactions[i].reactants)
            assert not conserved_along(crn, inv, Execution(start, ((i, F),)))


@given(crns(), st.lists(st.integers(-4, 4), min_size=4, max_size=4), st.integers(2, 5))
def test_modular_matches_linearization_mod_m(crn, w, m):
    n = len(crn.species)
    mod = ModularInvariant(tuple(w[:n]), m)
    lin = mod.linearization()
    lin_bad = [(i, v % m) for i, v in check(crn, lin).violations if v % m]
    assert lin_bad == list(check(crn, mod).violations)


def test_format_invariant(parity):
    assert format_invariant(parity.crn, parity.invariants[0]) == "mod 2 I_M X1:1 Y1:1"
    assert format_invariant(trap_crn(), LinearInvariant((1, 2, 0))) == "linear X:1 Y:2"
