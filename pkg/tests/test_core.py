import logging

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rrcrn import CRC, CRD, CRN, Device, Mode, Reaction, Step, Vote, net_change
from rrcrn.core import F, R
from rrcrn.errors import NotApplicable, ValidationError

from .conftest import trap_crn
from .strategies import configs, crns


def test_net_change_examples():
    crn = CRN.from_names(["X", "Y"], [({"X": 2}, {"Y": 1})])
    assert net_change(crn.reactions[0]) == (-2, 1)
    assert net_change(Reaction((1,), (1,))) == (0,)
    assert trap_crn().reactions[2].net_change() == (0, 0, -1)


def test_apply_examples():
    crn = trap_crn()
    assert crn.apply(crn.config(X=4), 0, F) == crn.config(X=2, Y=1)
    assert crn.apply(crn.config(Y=1), 1, R) == crn.config(Z=1)
    with pytest.raises(NotApplicable) as exc:
        crn.apply(crn.config(X=1), 0, F)
    assert exc.value.rxn == 0 and exc.value.direction is F


def test_enabled_examples(parity):
    crn = trap_crn()
    y = crn.config(Y=1)
    assert crn.enabled(y, Mode.FORWARD_ONLY) == []
    # Z -> 0 is reverse-applicable everywhere, so it shows up too
    assert crn.enabled(y, Mode.BIDIRECTIONAL) == [Step(0, R), Step(1, R), Step(2, R)]
    assert crn.enabled(crn.zero(), Mode.FORWARD_ONLY) == []
    pc = parity.crn
    two_y1 = pc.config(Y1=2)
    assert [pc.format_reaction(s.rxn) for s in pc.enabled(two_y1, Mode.FORWARD_ONLY)] == ["2 Y1 -> Y0"]


@given(crns(), st.data())
def test_enabled_matches_precondition(crn, data):
    c = data.draw(configs(len(crn.species)))
    want = []
    for i, r in enumerate(crn.reactions):
        for d, need in ((F, r.reactants), (R, r.products)):
            if all(x >= k for x, k in zip(c, need)):
                want.append(Step(i, d))
    assert crn.enabled(c, Mode.BIDIRECTIONAL) == want
    assert crn.enabled(c, Mode.FORWARD_ONLY) == [s for s in want if s.direction is F]


@given(crns(), st.data())
def test_apply_then_reverse_is_identity(crn, data):
    c = data.draw(configs(len(crn.species)))
    z = data.draw(configs(len(crn.species)))
    for rxn, d in crn.enabled(c, Mode.BIDIRECTIONAL):
        nxt = crn.apply(c, rxn, d)
        assert min(nxt) >= 0
        assert crn.apply(nxt, rxn, d.opposite) == c
        # additivity: enabled at c stays enabled at c + z
        bigger = tuple(a + b for a, b in zip(c, z))
        assert crn.is_applicable(bigger, rxn, d)


@given(crns())
def test_reverse_net_change_is_negated(crn):
    for r in crn.reactions:
        rev = Reaction(r.products, r.reactants)
        assert rev.net_change() == tuple(-v for v in r.net_change())


def test_initial_configuration(parity, trap):
    assert parity.initial_configuration([3]) == parity.crn.config(X1=3)
    assert trap.initial_configuration({"X": 2}) == trap.crn.config(X=2)
    crn = CRN.from_names(["X1", "L", "Y"], [({"X1": 1, "L": 1}, {"L": 1, "Y": 1})])
    dev = CRC(crn=crn, inputs=(0,), context=(0, 1, 0), output_species=2)
    assert dev.initial_configuration([0]) == (0, 1, 0)
    with pytest.raises(ValueError):
        dev.initial_configuration([-1])


def test_crd_output(parity):
    crn = parity.crn
    assert parity.output(crn.config(Y0=1)) is Vote.YES
    assert parity.output(crn.config(Y0=1, Y1=1)) is Vote.UNDEFINED
    assert parity.output(crn.zero()) is Vote.UNDEFINED
    assert parity.output(crn.config(Y1=5, X1=3)) is Vote.NO


@given(st.lists(st.integers(0, 3), min_size=3, max_size=3))
def test_crd_output_depends_only_on_voters(counts):
    from rrcrn import compile_mod
    from rrcrn.specs import ModSpec
    dev = compile_mod(ModSpec((1,), 0, 2))
    c = (counts[0], counts[1], counts[2])
    assert dev.output(c) == dev.output((0, counts[1], counts[2]))


def test_crc_output(trap):
    crn = trap.crn
    assert trap.output(crn.config(Y=1)) == 1
    assert trap.output(crn.zero()) == 0
    assert trap.output(trap.initial_configuration([7])) == 0


def test_validation():
    crn = trap_crn()
    with pytest.raises(ValidationError):
        CRD(crn=crn, inputs=(0,), yes={1}, no={1})
    with pytest.raises(ValidationError):
        CRC(crn=crn, inputs=(0,), output_species=0)
    with pytest.raises(ValidationError):
        CRC(crn=crn, inputs=(0,), context=(1, 0, 0), output_species=1)
    empty = CRN.from_names(["A"], [({}, {"A": 1})])
    with pytest.raises(ValidationError):
        Device(crn=empty, inputs=(0,))
    with pytest.raises(ValidationError):
        CRN.from_names(["A", "A"], [])
    with pytest.raises(ValidationError):
        CRN.from_names(["1A"], [])
    with pytest.raises(ValidationError):
        Reaction((1,), (-1,))


def test_self_inverse_reaction_is_flagged(caplog):
    crn = CRN.from_names(["A", "B"], [({"A": 1}, {"A": 1}), ({"A": 1}, {"B": 1})])
    with caplog.at_level(logging.INFO, logger="rrcrn.core"):
        Device(crn=crn, inputs=(0,))
    assert "self-inverse" in caplog.text
    # never reported as a state change
    assert [s for s, _, _ in crn.successors((1, 0), Mode.BIDIRECTIONAL)] == [Step(1, F)]
    assert not crn.is_quiescent((1, 0))
    assert crn.is_quiescent((0, 1))


def test_format():
    crn = trap_crn()
    assert crn.format(crn.config(X=2, Y=1)) == "{2X, Y}"
    assert crn.format_reaction(0) == "2 X -> Y"
    assert crn.format_reaction(2) == "Z -> 0"
    assert str(Step(2, R)) == "2R"
