"""Bounded model search and the complete PDL decision procedure."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings

from pdlkit.decision import (
    CapacityError,
    SatResult,
    Verdict,
    bounded_sat,
    fl_closure,
    pdl_sat,
)
from pdlkit.fuzzing import random_formula
from pdlkit.semantics import check
from pdlkit.syntax import (
    FALSUM,
    TOP,
    Atomic,
    Box,
    Dialect,
    DialectError,
    Par,
    Star,
    Test,
    Var,
    conj,
    diamond,
    metrics,
    neg,
    parse_formula,
)

from _strategies import formulas

PDL, IPDL, PRSPDL = Dialect.PDL, Dialect.IPDL, Dialect.PRSPDL


# --- bounded search ---


def test_bounded_sat_finds_trivial_witness():
    result = bounded_sat(TOP, PDL, 1)
    assert result.verdict is Verdict.SATISFIABLE
    assert result.bound_used == 1
    assert result.witness.model.num_states == 1
    assert result.witness.state == 0


def test_bounded_sat_cannot_certify_unsat():
    contradiction = conj(Var(1), neg(Var(1)))
    for dialect in (PDL, IPDL, PRSPDL):
        result = bounded_sat(contradiction, dialect, 3)
        assert result.verdict is Verdict.UNKNOWN_AT_BOUND
        assert result.witness is None and result.bound_used == 3


def test_bounded_sat_diamond_witness_verified():
    phi = diamond(Atomic(1), Var(1))
    result = bounded_sat(phi, PDL, 2)
    assert result.verdict is Verdict.SATISFIABLE
    w = result.witness
    assert w.model.num_states <= 2
    assert check(w.model, w.state, phi, PDL) is True


def test_bounded_sat_prspdl_needs_composition():
    phi = diamond(Par(Atomic(1), Atomic(1)), TOP)
    result = bounded_sat(phi, PRSPDL, 1)
    assert result.verdict is Verdict.SATISFIABLE
    assert result.witness.model.star  # parallel step forces a star entry


def test_bounded_sat_universal_vars_forced():
    result = bounded_sat(diamond(Atomic(1), Var(1)), PDL, 2, universal_vars=(2,))
    model = result.witness.model
    assert model.valuation[2] == frozenset(model.states)


def test_bounded_sat_respects_cap_and_bounds():
    result = bounded_sat(Var(1), PDL, 2, per_size_model_cap=1)
    assert result.verdict is Verdict.UNKNOWN_AT_BOUND  # only the empty model per size
    with pytest.raises(ValueError):
        bounded_sat(TOP, PDL, 0)


# --- closure ---


def test_fl_closure_examples():
    plain = Box(Atomic(1), FALSUM)
    assert {plain, FALSUM} <= fl_closure(plain)

    star_box = Box(Star(Atomic(1)), FALSUM)
    assert {star_box, FALSUM, Box(Atomic(1), star_box)} <= fl_closure(star_box)

    with pytest.raises(DialectError):
        fl_closure(Box(Test(Var(1)), Var(1)))


def test_fl_closure_linear_in_formula_size():
    rng = random.Random(5)
    for _ in range(300):
        phi = random_formula(rng, PDL, max_size=14, max_vars=3, max_atoms=2)
        assert len(fl_closure(phi)) <= metrics(phi).size


# --- complete procedure, curated verdicts ---


def test_pdl_sat_simple_verdicts():
    result = pdl_sat(Var(1))
    assert result.verdict is Verdict.SATISFIABLE
    assert check(result.witness.model, result.witness.state, Var(1), PDL) is True

    demanding = conj(diamond(Atomic(1), TOP), Box(Atomic(1), FALSUM))
    assert pdl_sat(demanding).verdict is Verdict.UNSATISFIABLE

    assert pdl_sat(Box(Atomic(1), FALSUM)).verdict is Verdict.SATISFIABLE
    assert pdl_sat(Box(Star(Atomic(1)), FALSUM)).verdict is Verdict.UNSATISFIABLE


def test_pdl_sat_star_conflicts():
    a = Atomic(1)
    eventually = diamond(Star(a), Var(1))
    never = Box(Star(a), neg(Var(1)))
    assert pdl_sat(conj(eventually, never)).verdict is Verdict.UNSATISFIABLE

    # the demand can always be deferred but never met: must still be unsat
    deferring = Box(Star(a), conj(neg(Var(1)), diamond(a, TOP)))
    assert pdl_sat(conj(eventually, deferring)).verdict is Verdict.UNSATISFIABLE

    assert pdl_sat(eventually).verdict is Verdict.SATISFIABLE


def test_pdl_sat_star_witness_needs_steps():
    # p1 now, p1 gone after every step, reachable p1-free dead end
    a = Atomic(1)
    phi = conj(
        Var(1),
        conj(Box(a, neg(Var(1))), diamond(Star(a), conj(neg(Var(1)), Box(a, FALSUM)))),
    )
    result = pdl_sat(phi)
    assert result.verdict is Verdict.SATISFIABLE
    w = result.witness
    assert w.model.num_states >= 2
    assert check(w.model, w.state, phi, PDL) is True


AXIOMS = [
    "[a1](p1 -> p2) -> ([a1]p1 -> [a1]p2)",
    "[a1;a2]p1 <-> [a1][a2]p1",
    "[a1 u a2]p1 <-> [a1]p1 & [a2]p1",
    "[a1*]p1 <-> p1 & [a1][a1*]p1",
    "p1 & [a1*](p1 -> [a1]p1) -> [a1*]p1",
]


@pytest.mark.parametrize("text", AXIOMS)
def test_pdl_sat_axioms_valid(text):
    phi = parse_formula(text, PDL)
    assert pdl_sat(neg(phi)).verdict is Verdict.UNSATISFIABLE
    assert pdl_sat(phi).verdict is Verdict.SATISFIABLE


def test_pdl_sat_capacity_ceiling_is_not_a_verdict():
    with pytest.raises(CapacityError):
        pdl_sat(diamond(Atomic(1), Var(1)), max_nodes=1)


def test_pdl_sat_rejects_other_dialects():
    with pytest.raises(DialectError):
        pdl_sat(Box(Test(Var(1)), Var(1)))


def test_pdl_sat_witnesses_verified_on_corpus():
    rng = random.Random(77)
    sat_count = 0
    for _ in range(120):
        phi = random_formula(rng, PDL, max_size=10, max_vars=2, max_atoms=2)
        result = pdl_sat(phi)
        if result.verdict is Verdict.SATISFIABLE:
            w = result.witness
            assert check(w.model, w.state, phi, PDL) is True
            sat_count += 1
        else:
            assert result.witness is None
    assert sat_count >= 30


# --- properties ---


@settings(max_examples=60, deadline=None)
@given(formulas(PDL))
def test_pdl_sat_stable_under_trivial_wrapping(phi):
    base = pdl_sat(phi).verdict
    assert pdl_sat(neg(neg(phi))).verdict is base
    assert pdl_sat(conj(phi, TOP)).verdict is base


@settings(max_examples=80, deadline=None)
@given(formulas(PDL))
def test_bounded_witness_implies_complete_sat(phi):
    bounded = bounded_sat(phi, PDL, 2, per_size_model_cap=2000)
    if bounded.verdict is Verdict.SATISFIABLE:
        assert pdl_sat(phi).verdict is Verdict.SATISFIABLE


@settings(max_examples=60, deadline=None)
@given(formulas(PDL))
def test_bounded_sat_monotone_in_bound(phi):
    small = bounded_sat(phi, PDL, 1, per_size_model_cap=600)
    large = bounded_sat(phi, PDL, 2, per_size_model_cap=600)
    if small.verdict is Verdict.SATISFIABLE:
        assert large.verdict is Verdict.SATISFIABLE
        assert large.bound_used <= small.bound_used


def test_sat_result_shape():
    result = SatResult(Verdict.UNSATISFIABLE)
    assert result.witness is None and result.bound_used is None
