from __future__ import annotations

import pytest

from clonekit.config import Budget
from clonekit.core.sorts import BASE, stlc_sorts
from clonekit.core.terms import Op, Var
from clonekit.presentations.derivations import (
    AxiomInstance,
    Refl,
    Trans,
    check_fo_derivation,
    fo_derivation_from_dict,
    fo_derivation_to_dict,
)
from clonekit.presentations.first_order import (
    FoEquation,
    FoOperator,
    FoPresentation,
    FoSignature,
    PresentationError,
    enumerate_fo_terms,
    fo_check,
)
from clonekit.presentations.rewrite import (
    RewriteDivergence,
    RewriteRule,
    RewriteSystem,
    is_normal,
    rewrite_normalize,
)
from clonekit.presentations.search import EQUAL, UNKNOWN, search_equal, search_expansions
from clonekit.presentations.stock import (
    GlobalStateCompletion,
    MONOID,
    bool_clone,
    bool_presentation,
    global_state_clone,
    global_state_lemmas,
    global_state_presentation,
    global_state_rewrite_system,
    gs_state_table,
    monoid_clone,
    monoid_presentation,
    monoid_word,
    state_values,
)

x, y, z = Var(1), Var(2), Var(3)


def _mul(left, right) -> Op:
    return Op("mul", (left, right))


def _looping_presentation() -> FoPresentation:
    signature = FoSignature(stlc_sorts(), (FoOperator("f", (BASE,), BASE),))
    grow = FoEquation("grow", (BASE,), BASE, Op("f", (x,)), Op("f", (Op("f", (x,)),)))
    return FoPresentation("loop", signature, (grow,))


def test_signature_rejects_duplicate_operator() -> None:
    with pytest.raises(PresentationError, match="Duplicate operator"):
        FoSignature(stlc_sorts(), (FoOperator("c", (), BASE), FoOperator("c", (BASE,), BASE)))


def test_presentation_rejects_ill_sorted_equation() -> None:
    signature = monoid_presentation().signature
    bad = FoEquation("bad", (MONOID,), MONOID, Op("e"), Op("nope"))
    with pytest.raises(PresentationError, match="bad is ill-sorted"):
        FoPresentation("broken", signature, (bad,))


def test_presentation_rejects_duplicate_equation() -> None:
    pres = monoid_presentation()
    with pytest.raises(PresentationError, match="Duplicate equation"):
        FoPresentation("twice", pres.signature, pres.equations + pres.equations[:1])


def test_fo_check_fills_schema_parameters() -> None:
    pres = bool_presentation()
    term, sort = fo_check(pres.signature, (BASE, BASE), Op("ite", (Op("true"), x, y)))
    assert sort == BASE
    assert term.params == (BASE,)


def test_enumerate_fo_terms_lists_variables_first() -> None:
    terms = list(enumerate_fo_terms(monoid_presentation().signature, (MONOID,), MONOID, 1))
    assert terms[0] == x
    assert Op("e") in terms
    assert _mul(x, Op("e")) in terms
    with pytest.raises(ValueError):
        list(enumerate_fo_terms(monoid_presentation().signature, (MONOID,), MONOID, -1))


def test_rewrite_rule_rejects_bare_variable_lhs() -> None:
    unit_left = monoid_presentation().equation("unit_left")
    with pytest.raises(PresentationError, match="bare variable"):
        RewriteRule.from_equation(unit_left, reversed=True)


def test_rewrite_system_rejects_unknown_strategy() -> None:
    with pytest.raises(PresentationError, match="Unknown rewrite strategy"):
        RewriteSystem.from_presentation(bool_presentation(), "sideways")


def test_bool_rewriting_with_checked_derivation() -> None:
    pres = bool_presentation()
    context = (BASE, BASE)
    term, _ = fo_check(pres.signature, context, Op("ite", (Op("true"), x, y)))
    system = RewriteSystem.from_presentation(pres)
    result = rewrite_normalize(system, term)
    assert result.term == x
    assert [step.equation for step in result.steps] == ["ite_true"]
    assert is_normal(system, result.term)
    verdict = check_fo_derivation(pres, result.derivation, context)
    assert verdict.accepted
    assert verdict.conclusion.lhs == term
    assert verdict.conclusion.rhs == x


def test_nested_ite_rewrites_innermost_first() -> None:
    pres = bool_presentation()
    inner = Op("ite", (Op("false"), Op("true"), Op("false")))
    term, _ = fo_check(pres.signature, (BASE, BASE), Op("ite", (inner, x, y)))
    result = rewrite_normalize(RewriteSystem.from_presentation(pres), term)
    assert result.term == y
    assert [step.position for step in result.steps] == [(1,), ()]


def test_rewrite_divergence_reports_trace() -> None:
    pres = _looping_presentation()
    system = RewriteSystem.from_presentation(pres)
    with pytest.raises(RewriteDivergence) as info:
        rewrite_normalize(system, Op("f", (x,)), Budget(step_ceiling=5))
    assert info.value.trace
    assert all(line.startswith("grow") for line in info.value.trace)


def test_global_state_put_put_rewrites_to_last_put() -> None:
    clone = global_state_clone(("v1", "v2"))
    term = Op("put_v1", (Op("put_v2", (x,)),))
    result = rewrite_normalize(clone.strategy.system, term)
    assert result.term == Op("put_v2", (x,))
    verdict = check_fo_derivation(clone.presentation, result.derivation, (BASE,))
    assert verdict.accepted


def test_global_state_presentation_counts_equations() -> None:
    pres = global_state_presentation(("a", "b", "c"))
    assert len(pres.equations) == 1 + 3 + 9
    assert state_values(pres) == ("a", "b", "c")


@pytest.mark.parametrize("values", [(), ("v1", "v1"), ("v-1",)])
def test_global_state_rejects_bad_values(values) -> None:
    with pytest.raises(PresentationError):
        global_state_presentation(values)


def test_state_values_rejects_other_presentations() -> None:
    with pytest.raises(PresentationError):
        state_values(bool_presentation())


def test_gs_state_table_runs_each_initial_state() -> None:
    term = Op("get", (Op("put_v2", (x,)), y))
    assert gs_state_table(("v1", "v2"), term) == ((1, 1), (1, 2))


def test_global_state_completion_derivations_check() -> None:
    values = ("v1", "v2")
    completion = GlobalStateCompletion(values)
    pres = global_state_presentation(values)
    cases = {
        x: x,
        Op("put_v1", (x,)): Op("put_v1", (x,)),
        Op("get", (Op("put_v1", (x,)), Op("put_v2", (x,)))): x,
    }
    for term, expected in cases.items():
        canonical, proof = completion.derive(term)
        assert canonical == expected
        assert completion.canonical(term) == expected
        verdict = check_fo_derivation(pres, proof, (BASE,))
        assert verdict.accepted, verdict.reason
        assert verdict.conclusion.lhs == term
        assert verdict.conclusion.rhs == expected


def test_global_state_clone_witnesses_equal_terms() -> None:
    clone = global_state_clone(("v1", "v2"))
    context = (BASE, BASE)
    left = Op("put_v1", (Op("get", (x, y)),))
    right = Op("put_v1", (x,))
    assert clone.equal(left, right, context, BASE)
    proof = clone.witness(left, right, context, BASE)
    verdict = check_fo_derivation(clone.presentation, proof, context)
    assert verdict.accepted
    assert not clone.equal(Op("put_v1", (x,)), Op("put_v2", (x,)), (BASE,), BASE)


def test_search_finds_associativity() -> None:
    pres = monoid_presentation()
    context = (MONOID,) * 3
    result = search_equal(pres, _mul(_mul(x, y), z), _mul(x, _mul(y, z)), context)
    assert result.verdict == EQUAL
    assert result.found
    verdict = check_fo_derivation(pres, result.derivation, context)
    assert verdict.accepted


def test_search_with_no_nodes_is_unknown() -> None:
    pres = monoid_presentation()
    context = (MONOID,) * 3
    result = search_equal(
        pres, _mul(_mul(x, y), z), _mul(x, _mul(y, z)), context, budget=Budget(search_nodes=0)
    )
    assert result.verdict == UNKNOWN
    assert result.derivation is None


def test_search_exhausts_on_commutativity() -> None:
    result = search_equal(monoid_presentation(), _mul(x, y), _mul(y, x), (MONOID, MONOID))
    assert result.verdict == UNKNOWN
    assert result.to_dict()["expanded"] == result.expanded


def test_monoid_clone_is_semi_decided() -> None:
    clone = monoid_clone()
    assert clone.strategy.tier == "bounded-search"
    assert not clone.strategy.decides
    assert clone.equal(_mul(Op("e"), x), x, (MONOID,), MONOID)


def test_monoid_word_flattens() -> None:
    assert monoid_word(_mul(_mul(x, Op("e")), _mul(y, x))) == (1, 2, 1)
    with pytest.raises(PresentationError):
        monoid_word(Op("true"))


def test_bool_clone_enumeration_identifies_equal_terms() -> None:
    clone = bool_clone()
    found = clone.enumerate((BASE,), BASE, Budget(max_depth=1, max_terms=50, sort_height=0))
    assert found.exhaustive
    assert x in found.terms
    assert Op("true") in found.terms
    assert Op("false") in found.terms
    assert len(found.terms) == len(set(found.terms))


def test_derivation_checker_pinpoints_bad_trans() -> None:
    pres = bool_presentation()
    bad = Trans(Refl(Op("true")), Refl(Op("false")))
    verdict = check_fo_derivation(pres, bad, ())
    assert not verdict.accepted
    assert verdict.rule == "Trans"
    assert "middle terms disagree" in verdict.reason


def test_derivation_checker_rejects_wrong_instance_length() -> None:
    verdict = check_fo_derivation(bool_presentation(), AxiomInstance("ite_true", (x,), (BASE,)), (BASE,))
    assert not verdict.accepted
    assert verdict.rule == "AxiomInstance"


def test_derivation_json_form_still_checks() -> None:
    pres = bool_presentation()
    context = (BASE, BASE)
    term, _ = fo_check(pres.signature, context, Op("ite", (Op("false"), x, y)))
    proof = rewrite_normalize(RewriteSystem.from_presentation(pres), term).derivation
    decoded = fo_derivation_from_dict(fo_derivation_to_dict(proof))
    assert check_fo_derivation(pres, decoded, context).accepted


def _get(*args) -> Op:
    return Op("get", args)


def _put(value: str, arg) -> Op:
    return Op(f"put_{value}", (arg,))


def test_global_state_normal_forms_do_not_depend_on_strategy() -> None:
    values = ("v1", "v2")
    pres = global_state_presentation(values)
    inner = global_state_rewrite_system(pres, "innermost")
    outer = inner.with_strategy("outermost")
    normal_by_table: dict = {}
    for term in enumerate_fo_terms(pres.signature, (BASE,), BASE, 3):
        first = rewrite_normalize(inner, term, witness=False).term
        assert rewrite_normalize(outer, term, witness=False).term == first, term
        assert is_normal(outer, first)
        table = gs_state_table(values, term)
        assert gs_state_table(values, first) == table
        assert normal_by_table.setdefault(table, first) == first
    # identity, the two constant writes and the swap
    assert len(normal_by_table) == 4


def test_global_state_rewriting_collapses_trivial_reads() -> None:
    system = global_state_clone(("v1", "v2")).strategy.system
    for term in (_get(x, x), _get(x, _put("v2", x)), _get(_get(x, x), x)):
        result = rewrite_normalize(system, term)
        assert result.term == x
        verdict = check_fo_derivation(system.presentation, result.derivation, (BASE,))
        assert verdict.accepted, verdict.reason
        assert (verdict.conclusion.lhs, verdict.conclusion.rhs) == (term, x)


def test_global_state_normal_forms_over_two_variables() -> None:
    values = ("v1", "v2")
    pres = global_state_presentation(values)
    system = global_state_rewrite_system(pres)
    context = (BASE, BASE)
    normal_by_table: dict = {}
    for term in enumerate_fo_terms(pres.signature, context, BASE, 2):
        result = rewrite_normalize(system, term)
        assert check_fo_derivation(pres, result.derivation, context).accepted
        table = gs_state_table(values, term)
        assert normal_by_table.setdefault(table, result.term) == result.term


@pytest.mark.parametrize("values", [("a",), ("v1", "v2"), ("a", "b", "c")])
def test_global_state_lemmas_are_checked_derivations(values) -> None:
    pres = global_state_presentation(values)
    k = len(values)
    system = global_state_rewrite_system(pres)
    assert len(system.lemmas) == 2 * k + 1 + (k if k > 1 else 1)
    for rule in global_state_lemmas(values):
        verdict = check_fo_derivation(pres, rule.proof, rule.context)
        assert verdict.accepted, rule.equation
        assert (verdict.conclusion.lhs, verdict.conclusion.rhs) == (rule.lhs, rule.rhs)


def test_single_value_state_forgets_writes() -> None:
    system = global_state_clone(("a",)).strategy.system
    assert rewrite_normalize(system, _put("a", _get(_put("a", x)))).term == x


def test_rewrite_system_rejects_a_lemma_with_the_wrong_conclusion() -> None:
    pres = global_state_presentation(("v1", "v2"))
    good = global_state_lemmas(("v1", "v2"))[0]
    bogus = RewriteRule.lemma("bogus", good.lhs, _put("v1", x), good.context, BASE, good.proof)
    with pytest.raises(PresentationError, match="bogus"):
        RewriteSystem(pres, (bogus,))
    shadowing = RewriteRule.lemma("get_put", good.lhs, good.rhs, good.context, BASE, good.proof)
    with pytest.raises(PresentationError, match="shadows"):
        RewriteSystem(pres, (shadowing,))


def test_search_proves_reads_of_an_unchanged_state() -> None:
    pres = global_state_presentation(("v1", "v2"))
    result = search_equal(pres, x, _get(x, x), (BASE,))
    assert result.found
    verdict = check_fo_derivation(pres, result.derivation, (BASE,))
    assert verdict.accepted, verdict.reason
    assert (verdict.conclusion.lhs, verdict.conclusion.rhs) == (x, _get(x, x))


def test_search_expansion_draws_unbound_variables_from_the_term() -> None:
    pres = global_state_presentation(("v1", "v2"))
    expansions = {(e.equation.name, e.reversed): e for e in search_expansions(pres)}
    assert expansions[("get_put", True)].unbound == ()
    assert expansions[("put_get_v1", True)].unbound == (2,)
    assert ("put_put_v1_v2", False) not in expansions


def test_search_agrees_with_the_state_tables() -> None:
    values = ("v1", "v2")
    clone = global_state_clone(values)
    pres = clone.presentation
    lemmas = clone.strategy.system.lemmas
    classes: dict = {}
    for term in enumerate_fo_terms(pres.signature, (BASE,), BASE, 2):
        classes.setdefault(gs_state_table(values, term), []).append(term)
    for members in classes.values():
        first = members[0]
        for other in members[1:]:
            result = search_equal(pres, first, other, (BASE,), lemmas=lemmas)
            assert result.found, (first, other)
            verdict = check_fo_derivation(pres, result.derivation, (BASE,))
            assert verdict.accepted, verdict.reason
    representatives = [members[0] for members in classes.values()]
    for i, left in enumerate(representatives):
        for right in representatives[i + 1:]:
            result = search_equal(pres, left, right, (BASE,), budget=Budget(search_nodes=60), lemmas=lemmas)
            assert not result.found
