from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rrcrn.errors import BadModulus, DomainError
from rrcrn.specs import (
    AffineSpec,
    And,
    ModSpec,
    Not,
    Or,
    SemilinearSpec,
    SyntaxProblem,
    ThresholdSpec,
    negate,
    oracle_line,
    parse_affine,
    parse_oracle,
    parse_predicate,
    parse_semilinear,
)


def weights(k):
    return st.lists(st.integers(-5, 5), min_size=k, max_size=k).map(tuple)


@st.composite
def predicates(draw, k=2, depth=2):
    if depth == 0 or draw(st.booleans()):
        if draw(st.booleans()):
            return ModSpec(draw(weights(k)), draw(st.integers(-9, 9)), draw(st.integers(2, 6)))
        return ThresholdSpec(draw(weights(k)), draw(st.integers(-6, 6)))
    op = draw(st.sampled_from(["not", "and", "or"]))
    if op == "not":
        return Not(draw(predicates(k, depth - 1)))
    left, right = draw(predicates(k, depth - 1)), draw(predicates(k, depth - 1))
    return And(left, right) if op == "and" else Or(left, right)


@st.composite
def affines(draw, k=2):
    coeffs = draw(st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=4),
                           min_size=k, max_size=k))
    offs = draw(st.lists(st.integers(0, 3), min_size=k, max_size=k))
    return AffineSpec(tuple(coeffs), tuple(offs), draw(st.integers(0, 4)))


def test_mod_residue_reduced():
    assert ModSpec((2, 3), 5, 4).residue == 1
    assert ModSpec((1,), -1, 3).residue == 2


def test_bad_modulus():
    with pytest.raises(BadModulus):
        ModSpec((1,), 0, 1)


def test_oracle_values():
    assert ModSpec((2, 3), 1, 4)((1, 1)) is True  # 5 = 1 mod 4
    assert ModSpec((2, 3), 1, 4)((2, 0)) is False
    assert ThresholdSpec((1, -1), 0)((2, 2)) is True
    assert ThresholdSpec((2,), 3)((1,)) is False
    assert ThresholdSpec((2,), 3).clamp == 4
    assert ThresholdSpec((1, -1), 0).clamp == 2


def test_affine_values_and_domain():
    f = AffineSpec((Fraction(1, 2),), (1,), 2)
    assert (f.d, f.n) == (2, (1,))
    assert [f((x,)) for x in (1, 3, 5, 7)] == [2, 3, 4, 5]
    with pytest.raises(DomainError):
        f((0,))
    with pytest.raises(DomainError):
        f((2,))  # 5/2 is not a natural number
    g = AffineSpec((Fraction(1, 2), Fraction(-1, 3)), (0, 0), 0)
    assert g.d == 6 and g.n == (3, -2)


def test_semilinear_floor_half():
    spec = parse_semilinear("affine(1/2;0;0) when mod(1;0;2) | affine(1/2;1;0) when mod(1;1;2)")
    spec.check_domains(12)
    assert [spec((x,)) for x in range(9)] == [x // 2 for x in range(9)]


def test_overlapping_domains_rejected():
    spec = SemilinearSpec(((AffineSpec((1,), (0,)), ThresholdSpec((1,), 0)),
                           (AffineSpec((1,), (0,)), ThresholdSpec((1,), 3))))
    with pytest.raises(DomainError):
        spec.check_domains()


def test_negate_involution():
    p = ModSpec((1,), 0, 2)
    assert negate(negate(p)) == p


@pytest.mark.parametrize("text", ["mod(1;0;1)", "mod(1;0)", "threshold(1;0", "affine(1/0;0;0)",
                                  "xor(mod(1;0;2),mod(1;1;2))", "and(mod(1;0;2),mod(1,1;0;2))"])
def test_syntax_errors(text):
    with pytest.raises(SyntaxProblem):
        if text.startswith("affine"):
            parse_affine(text)
        else:
            parse_predicate(text)


def test_unknown_oracle_kind():
    with pytest.raises(SyntaxProblem):
        parse_oracle("presburger x > 1")


@given(predicates(), st.lists(st.integers(0, 6), min_size=2, max_size=2))
def test_predicate_text_roundtrip(p, x):
    q = parse_predicate(p.to_expr())
    assert q == p
    assert q(x) == p(x)
    assert parse_oracle(oracle_line(p)) == p


@given(affines())
def test_affine_text_roundtrip(f):
    assert parse_affine(f.to_expr()) == f
    assert parse_oracle(oracle_line(f)) == f


@given(affines(), st.lists(st.integers(0, 8), min_size=2, max_size=2))
def test_affine_n_over_d(f, x):
    # n_i / d recovers a_i, and d is the least common denominator
    assert all(Fraction(n, f.d) == a for n, a in zip(f.n, f.coefficients))
    assert all(f.d % a.denominator == 0 for a in f.coefficients)
    if f.in_domain(x):
        assert f.exact(x) * f.d == f.constant * f.d + sum(
            n * (v - c) for n, v, c in zip(f.n, x, f.offsets))
