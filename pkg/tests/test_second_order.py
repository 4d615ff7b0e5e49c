from __future__ import annotations

import pytest

from clonekit.config import Budget
from clonekit.core.clones import WordClone, proj_hom
from clonekit.core.elaborate import Slot
from clonekit.core.sorts import BASE, Sort, SortError, SortSet, arrow
from clonekit.core.terms import MetaApp, Op, Var
from clonekit.presentations.first_order import PresentationError
from clonekit.second_order.algebra import (
    Algebra,
    algebra_product,
    algebra_terminal,
    check_algebra,
    check_algebra_hom,
    interpret_term,
)
from clonekit.second_order.syntax import (
    MetaVar,
    SoEquation,
    SoOperator,
    SoPresentation,
    SoSignature,
    so_check_term,
    so_metasubst,
    stlc_presentation,
    stlc_signature,
)

WORD = Sort("m")
TINY = Budget(max_context=1, max_depth=1, max_terms=20, max_cases=500, sort_height=0)


def _doubling() -> Algebra:
    signature = SoSignature(SortSet(name="Mon", base=("m",)), (SoOperator("twice", (Slot((), WORD),), WORD),))
    collapse = SoEquation("collapse", (MetaVar("M", (), WORD),), WORD, Op("twice", (MetaApp(1),)), MetaApp(1))
    presentation = SoPresentation("doubling", signature, (collapse,))
    return Algebra(WordClone("m"), presentation, lambda name, params, context, args: args[0] + args[0], "words")


def test_signature_rejects_duplicate_operator() -> None:
    op = SoOperator("c", (), BASE)
    with pytest.raises(PresentationError, match="Duplicate operator"):
        SoSignature(stlc_signature().sorts, (op, op))


def test_operator_arity_checks_parameter_count() -> None:
    app = stlc_signature().lookup("app")
    slots, output = app.arity((BASE, BASE))
    assert slots[0].sort == arrow(BASE, BASE)
    assert output == BASE
    with pytest.raises(SortError):
        app.arity((BASE,))


def test_ill_sorted_equation_names_equation() -> None:
    bad = SoEquation(
        "bad",
        (MetaVar("M", (), BASE),),
        BASE,
        Op("app", (MetaApp(1), MetaApp(1))),
        MetaApp(1),
    )
    with pytest.raises(PresentationError, match="bad is ill-sorted"):
        SoPresentation("broken", stlc_signature(), (bad,))


def test_stlc_presentation_has_beta_and_eta() -> None:
    pres = stlc_presentation()
    assert [eq.name for eq in pres.equations] == ["beta", "eta"]
    with pytest.raises(PresentationError):
        pres.equation("gamma")


def test_check_term_infers_binder_from_expected_sort() -> None:
    identity = Op("abs", (Var(1),))
    term, sort = so_check_term(stlc_signature(), (), (), identity, arrow(BASE, BASE))
    assert sort == arrow(BASE, BASE)
    assert term.binders == ((BASE,),)


def test_metasubst_instantiates_beta() -> None:
    beta = stlc_presentation().equation("beta")
    # M := its own parameter, N := the outer variable
    instantiation = (Var(2), Var(1))
    assert so_metasubst(beta.rhs, instantiation, 1) == Var(1)
    lhs = so_metasubst(beta.lhs, instantiation, 1)
    assert lhs.name == "app"
    assert lhs.args[0].args[0] == Var(2)
    assert lhs.args[1] == Var(1)


def test_metasubst_rejects_missing_instantiation() -> None:
    with pytest.raises(SortError):
        so_metasubst(MetaApp(2), (Var(1),), 1)


def test_terminal_algebra_models_stlc() -> None:
    report = check_algebra(algebra_terminal(stlc_presentation()), budget=TINY)
    assert report.passed
    assert report.exhaustive
    assert len(report.results) == 2


def test_product_of_terminal_algebras_models_stlc() -> None:
    one = algebra_terminal(stlc_presentation())
    report = check_algebra(algebra_product(one, one), budget=TINY)
    assert report.passed


def test_product_rejects_different_presentations() -> None:
    with pytest.raises(PresentationError):
        algebra_product(algebra_terminal(stlc_presentation()), _doubling())


def test_interpret_term_reads_metavariables() -> None:
    algebra = _doubling()
    equation = algebra.presentation.equation("collapse")
    shapes = (((), WORD),)
    assert interpret_term(algebra, equation.lhs, (WORD,), ((1,),), shapes) == (1, 1)
    assert interpret_term(algebra, equation.rhs, (WORD,), ((1,),), shapes) == (1,)


def test_check_algebra_reports_failing_equation() -> None:
    report = check_algebra(_doubling(), budget=TINY)
    commutation, equation = report.results
    assert commutation.passed
    assert not equation.passed
    assert equation.counterexample["equation"] == "collapse"
    assert not report.passed
    frame = report.to_frame()
    assert list(frame["passed"]) == [True, False]


def test_projection_preserves_operators() -> None:
    words = _doubling()
    pair = algebra_product(words, words)
    report = check_algebra_hom(proj_hom(pair.clone, 0), pair, words, TINY)
    assert report.passed
    assert report.exhaustive
    assert report.results[0].cases == 5


def test_hom_check_samples_past_the_case_limit() -> None:
    words = _doubling()
    pair = algebra_product(words, words)
    small = TINY.replace(max_cases=3, seed=7)
    first = check_algebra_hom(proj_hom(pair.clone, 1), pair, words, small)
    again = check_algebra_hom(proj_hom(pair.clone, 1), pair, words, small)
    assert first.passed
    assert first.results[0].cases == 3
    assert not first.exhaustive
    assert first.to_dict() == again.to_dict()
