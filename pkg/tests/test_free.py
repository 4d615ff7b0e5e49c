from __future__ import annotations

import pytest

from clonekit.config import Budget
from clonekit.core.clones import (
    CloneError,
    VarClone,
    compose_subst,
    enumerate_renamings,
    enumerate_substitutions,
    initial_hom,
    renaming_to_subst,
)
from clonekit.core.laws import check_clone_laws
from clonekit.core.sorts import BASE, SortError, SortSet, arrow
from clonekit.core.terms import CloneApp, Op, Var
from clonekit.free.algebra import FreeAlgebraClone, fold_hom, initial_algebra, unit_hom
from clonekit.free.base import VarBase
from clonekit.free.derivations import check_free_derivation, free_derivation_from_dict, free_derivation_to_dict
from clonekit.free.equality import NOT_EQUAL, free_equal
from clonekit.free.search import EQUAL, UNKNOWN, orientations, search_free_equal
from clonekit.free.terms import enumerate_free_terms, free_check_term
from clonekit.presentations.derivations import AxiomInstance, Refl
from clonekit.second_order.syntax import stlc_presentation
from clonekit.stlc.nbe import nbe_normalize
from clonekit.stlc.set_model import set_model
from clonekit.stlc.suite import stlc_free

TINY = Budget(max_context=1, max_size=3, max_terms=30, max_cases=1000, sort_height=0)
IDENTITY_BODY = (BASE, BASE)


def _redex() -> Op:
    """(λx. x) y in the context y : b."""
    return Op("app", (Op("abs", (Var(2),)), Var(1)))


def test_free_algebra_needs_matching_sorts() -> None:
    words = VarClone(SortSet(name="Mon", base=("m",)))
    with pytest.raises(CloneError):
        FreeAlgebraClone(words, stlc_presentation())


def test_free_check_rejects_foreign_element() -> None:
    free = initial_algebra(stlc_presentation())
    with pytest.raises(SortError):
        free_check_term(free.base, free.presentation.signature, (BASE,), CloneApp(5, (BASE,), BASE, (Var(1),)))


def test_free_check_turns_base_operators_into_clone_applications() -> None:
    free = stlc_free("bool")
    term, sort = free.check(Op("ite", (Op("true"), Var(1), Var(2))), (BASE, BASE))
    assert sort == BASE
    assert isinstance(term, CloneApp)
    assert term.element == Op("ite", (Var(1), Var(2), Var(3)), (BASE,))
    assert term.context == (BASE, BASE, BASE)


def test_enumerate_free_terms_smallest_first() -> None:
    free = initial_algebra(stlc_presentation())
    found = list(enumerate_free_terms(free.base, free.presentation.signature, (), arrow(BASE, BASE), 2, (BASE,)))
    assert found == [Op("abs", (Var(1),), IDENTITY_BODY, ((BASE,),))]
    assert list(enumerate_free_terms(free.base, free.presentation.signature, (BASE,), BASE, 3, (BASE,))) == [Var(1)]
    with pytest.raises(ValueError):
        enumerate_free_terms(free.base, free.presentation.signature, (), BASE, -1, (BASE,))


def test_search_orientations_skip_bare_metavariable_sides() -> None:
    found = {(o.equation.name, o.reversed) for o in orientations(stlc_presentation())}
    assert found == {("beta", False), ("eta", False)}


def test_beta_instance_checks() -> None:
    free = stlc_free()
    proof = AxiomInstance("beta", (Var(2), Var(1)), IDENTITY_BODY)
    verdict = check_free_derivation(free, proof, (BASE,), _redex(), Var(1))
    assert verdict.accepted
    assert verdict.conclusion.rhs == Var(1)
    assert verdict.nodes == 1


def test_derivation_checker_reports_wrong_conclusion() -> None:
    free = stlc_free()
    verdict = check_free_derivation(free, Refl(Var(1)), (BASE, BASE), Var(1), Var(2))
    assert not verdict.accepted
    assert verdict.rule == "conclusion rhs"


def test_derivation_checker_rejects_short_instantiation() -> None:
    free = stlc_free()
    verdict = check_free_derivation(free, AxiomInstance("beta", (Var(2),), IDENTITY_BODY), (BASE,))
    assert not verdict.accepted


def test_free_derivation_json_form_still_checks() -> None:
    free = stlc_free()
    proof = AxiomInstance("beta", (Var(2), Var(1)), IDENTITY_BODY)
    decoded = free_derivation_from_dict(free_derivation_to_dict(proof))
    assert check_free_derivation(free, decoded, (BASE,), _redex(), Var(1)).accepted


def test_normalizer_equality_replays_its_witness() -> None:
    verdict = free_equal(stlc_free(), _redex(), Var(1), (BASE,))
    assert verdict.verdict == EQUAL
    assert verdict.tier == "normalizer"
    assert verdict.checked
    assert verdict.normal_forms == (Var(1), Var(1))
    assert "witness" in verdict.to_dict(witness=True)


def test_normalizer_separates_distinct_variables_in_the_set_model() -> None:
    verdict = free_equal(stlc_free(), Var(1), Var(2), (BASE, BASE))
    assert verdict.verdict == NOT_EQUAL
    assert verdict.certificate["environment"] == ["tt", "ff"]
    assert verdict.certificate["left"] == "tt"
    assert verdict.certificate["right"] == "ff"


def test_search_equality_finds_beta() -> None:
    verdict = free_equal(stlc_free(strategy="search"), _redex(), Var(1), (BASE,))
    assert verdict.verdict == EQUAL
    assert verdict.tier == "bounded-search"
    assert verdict.checked
    assert "expanded" in verdict.to_dict()


def test_search_equality_is_unknown_without_a_proof() -> None:
    verdict = free_equal(stlc_free(strategy="search"), Var(1), Var(2), (BASE, BASE))
    assert verdict.verdict == UNKNOWN
    assert verdict.witness is None


def test_unknown_strategy_is_rejected() -> None:
    with pytest.raises(ValueError):
        stlc_free(strategy="guess")


def test_unit_sends_element_to_generic_application() -> None:
    free = stlc_free()
    eta = unit_hom(free)
    context = (BASE, BASE)
    image = eta(1, context, BASE)
    assert image == CloneApp(1, context, BASE, (Var(1), Var(2)))
    assert free.equal(image, Var(1), context, BASE)


def test_fold_after_unit_is_the_base_map() -> None:
    free = stlc_free()
    model = set_model(2)
    f = initial_hom(model)
    fold = fold_hom(free, model.algebra(free.presentation), f)
    eta = unit_hom(free)
    context = (BASE, BASE)
    for index in (1, 2):
        assert fold(eta(index, context, BASE), context, BASE) == f(index, context, BASE)


def test_fold_rejects_map_into_another_carrier() -> None:
    free = stlc_free()
    model = set_model(2)
    with pytest.raises(CloneError):
        fold_hom(free, model.algebra(free.presentation), initial_hom(set_model(3)))


def test_free_clone_laws_hold_on_small_terms() -> None:
    report = check_clone_laws(stlc_free(), TINY)
    assert report.passed


def test_var_base_reads_variables() -> None:
    base = VarBase(VarClone(stlc_presentation().sorts))
    assert base.member(2, (BASE, BASE), BASE)
    assert not base.member(3, (BASE, BASE), BASE)
    assert base.unfold(2, (BASE, BASE), BASE, (Var(7), Var(8))) == Var(8)


@pytest.mark.parametrize("variant", ["bool", "gs"])
def test_free_clone_laws_hold_over_presented_bases(variant) -> None:
    budget = Budget(max_context=2, max_size=3, max_terms=30, max_cases=1500, sort_height=0)
    report = check_clone_laws(stlc_free(variant), budget)
    assert report.passed, report.to_dict()


def test_renaming_distributes_over_substitution() -> None:
    free = stlc_free()
    budget = Budget(max_context=2, max_size=4, max_terms=8, sort_height=0)
    contexts = [(BASE,), (BASE, BASE)]
    for delta in contexts:
        for term in enumerate_free_terms(free.base, free.presentation.signature, delta, BASE, 4, [BASE]):
            for gamma in contexts:
                for sigma in enumerate_substitutions(free, gamma, delta, budget).terms:
                    for theta in contexts:
                        for rho in enumerate_renamings(theta, gamma):
                            moved = free.rename(free.subst(term, sigma), rho)
                            composed = compose_subst(free, sigma, renaming_to_subst(free, rho))
                            assert moved == free.subst(term, composed)


def test_normalizer_agrees_with_bounded_search() -> None:
    free = stlc_free()
    context = (BASE, arrow(BASE, BASE))
    terms = list(enumerate_free_terms(free.base, free.presentation.signature, context, BASE, 5, [BASE]))
    normal = {term: nbe_normalize(free, term, context, BASE) for term in terms}
    assert len(set(normal.values())) > 1
    for term, form in normal.items():
        found = search_free_equal(free, term, form, context, BASE)
        assert found.found, term
        assert check_free_derivation(free, found.derivation, context, term, form).accepted
    forms = sorted(set(normal.values()), key=str)
    for i, left in enumerate(forms):
        for right in forms[i + 1:]:
            found = search_free_equal(free, left, right, context, BASE, Budget(search_nodes=40))
            assert not found.found
