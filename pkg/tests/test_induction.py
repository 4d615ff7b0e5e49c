from __future__ import annotations

import pytest

from clonekit.config import Budget
from clonekit.core.clones import initial_hom
from clonekit.core.laws import LawReport, LawResult
from clonekit.core.sorts import BASE, arrow
from clonekit.core.terms import CloneApp, Op
from clonekit.free.algebra import fold_hom
from clonekit.induction.harness import SoundnessViolation, assert_conclusion, check_induction_hypotheses
from clonekit.induction.predicates import ClonePredicate, everything, open_predicate, osubstpred, substpred
from clonekit.induction.relations import (
    adequacy_by_induction,
    check_kripke_sandwich,
    kripke_relation,
    logical_relation,
    raw_terms,
)
from clonekit.stlc.set_model import set_model
from clonekit.stlc.suite import stlc_free
from clonekit.stlc.variants import make_variant

TINY = Budget(max_context=1, max_size=3, max_terms=20, max_cases=300, sort_height=0)


def _constant_tt(table, sort) -> bool:
    return all(value == 0 for value in table)


def test_everything_satisfies_the_hypotheses_and_conclusion() -> None:
    free = stlc_free()
    model = set_model(2)
    algebra = model.algebra(free.presentation)
    f = initial_hom(model)
    pred = everything(model)
    hypotheses = check_induction_hypotheses(algebra, f, pred, TINY, [BASE])
    assert hypotheses.passed
    conclusion = assert_conclusion(free, fold_hom(free, algebra, f), pred, TINY, [BASE], hypotheses)
    assert conclusion.passed
    assert not conclusion.exhaustive


def test_failing_image_hypothesis_is_reported() -> None:
    model = set_model(2)
    pred = open_predicate(model, lambda table, context, sort: _constant_tt(table, sort), "tt")
    report = check_induction_hypotheses(model.algebra(), initial_hom(model), pred, TINY, [BASE])
    _closure, image = report.results
    assert not image.passed
    assert image.counterexample["sort"] == "b"


def test_conclusion_failure_after_passing_hypotheses_is_a_soundness_bug() -> None:
    free = stlc_free()
    model = set_model(2)
    algebra = model.algebra(free.presentation)
    nothing = ClonePredicate(model, lambda *_: False, "∅")
    claimed = LawReport("claimed", [LawResult("hypotheses", True, 1, True)])
    with pytest.raises(SoundnessViolation) as info:
        assert_conclusion(free, fold_hom(free, algebra, initial_hom(model)), nothing, TINY, [BASE], claimed)
    assert not info.value.report.passed


def test_substpred_quantifies_over_closing_substitutions() -> None:
    model = set_model(2)
    pred = substpred(model, _constant_tt, TINY)
    assert pred((0,), (), BASE)
    assert not pred((1,), (), BASE)
    # only tt closes the context, and the variable maps it to tt
    assert pred(model.var((BASE,), 1), (BASE,), BASE)
    membership = pred.member((1, 1), (BASE,), BASE)
    assert not membership.holds
    assert membership.witness is not None
    assert not membership.approximate


def test_osubstpred_keeps_families_closed_under_substitution() -> None:
    model = set_model(2)
    pred = osubstpred(model, lambda table, context, sort: True, TINY, [BASE])
    membership = pred.member(model.var((BASE,), 1), (BASE,), BASE)
    assert membership.holds
    assert not membership.approximate


def test_predicates_memoize() -> None:
    calls = []
    model = set_model(2)
    pred = ClonePredicate(model, lambda term, context, sort: calls.append(term) or True)
    assert pred((0,), (), BASE)
    assert pred((0,), (), BASE)
    assert calls == [(0,)]


def test_logical_relation_at_base_sort() -> None:
    free = stlc_free("bool")
    relation = logical_relation(free, set_model(2), budget=TINY)
    true = CloneApp(Op("true"), (), BASE, ())
    assert relation((true, (0,)), BASE)
    assert not relation((true, (1,)), BASE)


def test_kripke_relation_sits_between_neutrals_and_normals() -> None:
    budget = TINY.replace(max_size=4)
    report = check_kripke_sandwich(stlc_free(), make_variant("stlc"), budget, [BASE])
    assert report.passed


def test_kripke_sandwich_covers_arrow_sorts() -> None:
    fun = arrow(BASE, BASE)
    budget = TINY.replace(max_size=4, max_terms=40, max_cases=2000, sort_height=2)
    report = check_kripke_sandwich(stlc_free(), make_variant("stlc"), budget, [BASE, fun, arrow(fun, BASE)])
    assert report.passed
    assert all(result.cases > 0 for result in report.results)


def test_kripke_sandwich_sees_raw_redexes() -> None:
    free = stlc_free()
    terms, complete = raw_terms(free, (BASE,), BASE, TINY.replace(max_size=4, max_terms=100, sort_height=1))
    assert complete
    # app(abs(x. x), y) is a beta redex, kept alongside its normal form
    assert any(isinstance(t, Op) and t.name == "app" and isinstance(t.args[0], Op) for t in terms)


def test_kripke_sandwich_rejects_a_relation_missing_neutral_functions() -> None:
    free = stlc_free()
    variant = make_variant("stlc")
    fun = arrow(BASE, BASE)
    budget = TINY.replace(max_context=2, max_size=1, sort_height=1)

    def no_applications(term, context) -> bool:
        return not (isinstance(term, Op) and term.name == "app")

    relation = kripke_relation(free, variant, no_applications, budget, [BASE, fun])
    report = check_kripke_sandwich(free, variant, budget, [BASE, fun], relation)
    lower, _upper = report.results
    assert not lower.passed
    assert lower.counterexample["sort"] == "b => b"


def test_adequacy_by_induction() -> None:
    hypotheses, conclusion = adequacy_by_induction(TINY, [BASE])
    assert hypotheses.passed
    assert conclusion.passed
