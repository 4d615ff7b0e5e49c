from __future__ import annotations

from itertools import product

import pytest

from clonekit.config import Budget
from clonekit.core.clones import (
    CloneError,
    CloneHom,
    Renaming,
    Substitution,
    VarClone,
    WordClone,
    compose_renamings,
    compose_subst,
    context_extension,
    enumerate_renamings,
    enumerate_substitutions,
    extend_context_hom,
    initial_hom,
    lift_subst,
    product_clone,
    terminal_clone,
    weaken_hom,
)
from clonekit.core.laws import check_clone_laws, check_hom_laws
from clonekit.core.sorts import BASE, SortError, arrow, curry, lookup, stlc_sorts
from clonekit.core.terms import Op, Var, substitute, term_depth, term_size, weaken
from clonekit.presentations.stock import bool_clone, global_state_clone
from clonekit.stlc.set_model import set_model

SMALL = Budget(max_context=2, max_depth=2, max_terms=50, max_cases=2000, sort_height=0)


def test_var_clone_substitution_picks_component() -> None:
    clone = VarClone(stlc_sorts())
    gamma = (BASE, BASE, BASE)
    delta = (BASE, BASE)
    sigma = Substitution(gamma, delta, (3, 1))
    assert clone.subst(clone.var(delta, 1), sigma) == 3
    assert clone.subst(clone.var(delta, 2), sigma) == 1
    with pytest.raises(CloneError):
        clone.var(delta, 3)


def test_substitution_arity_is_checked() -> None:
    with pytest.raises(CloneError) as exc:
        Substitution((BASE,), (BASE, BASE), (1,))
    assert exc.value.position == 2


def test_renaming_rejects_sort_mismatch() -> None:
    f = arrow(BASE, BASE)
    with pytest.raises(CloneError):
        Renaming((BASE, f), (f,), (1,))
    rho = Renaming((BASE, f), (f,), (2,))
    assert compose_renamings(Renaming.identity((f,)), rho) == rho


def test_enumerate_renamings_counts_sort_preserving_maps() -> None:
    renamings = list(enumerate_renamings((BASE, BASE), (BASE, BASE)))
    assert len(renamings) == 4
    assert Renaming.identity((BASE, BASE)) in renamings


def test_clone_laws_hold_for_stock_clones() -> None:
    sorts = stlc_sorts()
    for clone in (VarClone(sorts), terminal_clone(sorts), product_clone(VarClone(sorts), terminal_clone(sorts))):
        report = check_clone_laws(clone, SMALL)
        assert report.passed, report.to_dict()
        assert report.exhaustive


def test_word_clone_laws_and_substitution() -> None:
    clone = WordClone()
    m = clone.sorts.sorts(0)[0]
    sigma = Substitution((m, m), (m, m), ((2, 1), ()))
    assert clone.subst((1, 2, 1), sigma) == (2, 1, 2, 1)
    assert check_clone_laws(clone, SMALL).passed


def test_context_extension_is_a_clone() -> None:
    extended = context_extension(VarClone(stlc_sorts()), (BASE,))
    assert extended.var((BASE,), 1) == 1
    assert 2 in extended.enumerate((BASE,), BASE, SMALL).terms
    assert check_clone_laws(extended, SMALL).passed


def test_homs_satisfy_laws() -> None:
    sorts = stlc_sorts()
    base = VarClone(sorts)
    assert check_hom_laws(initial_hom(terminal_clone(sorts)), SMALL).passed
    assert check_hom_laws(weaken_hom(base, (BASE,)), SMALL).passed


def test_extend_context_hom_sends_extension_to_sigma() -> None:
    words = WordClone()
    m = words.sorts.sorts(0)[0]
    identity = CloneHom(words, words, lambda t, ctx, sort: t, "id")
    extended = extend_context_hom(identity, Substitution((), (m,), ((),)))
    # in context (m) the word 1 2 reads x1 followed by the extension entry
    assert extended((1, 2), (m,), m) == (1,)
    assert extended((2,), (m,), m) == ()
    with pytest.raises(CloneError):
        extend_context_hom(identity, Substitution((m,), (m,), ((1,),)))


def test_lift_subst_keeps_new_variables() -> None:
    clone = VarClone(stlc_sorts())
    sigma = Substitution((BASE,), (BASE,), (1,))
    lifted = lift_subst(clone, sigma, (BASE,))
    assert lifted.components == (1, 2)
    assert lifted.target == (BASE, BASE)


def test_level_substitution_rebases_binders() -> None:
    # body of a binder in context (b) + (b): #2 is the bound variable
    body = Op("f", (Var(1), Var(2)))
    moved = substitute(body, (Var(3),), 4)
    assert moved == Op("f", (Var(3), Var(5)))
    assert weaken(Var(1), 1, 3) == Var(1)
    assert term_size(body) == 3
    assert term_depth(body) == 1


def test_sort_helpers() -> None:
    f = arrow(BASE, BASE)
    assert str(arrow(f, BASE)) == "(b => b) => b"
    assert curry((BASE, BASE), BASE) == arrow(BASE, f)
    assert f.height == 1
    with pytest.raises(SortError):
        lookup((BASE,), 2)


class _BackwardsVarClone(VarClone):
    """Reads substitution components from the wrong end."""

    def subst(self, term: int, sigma: Substitution) -> int:
        return sigma.components[len(sigma.target) - term]


def test_clone_laws_catch_a_broken_substitution() -> None:
    report = check_clone_laws(_BackwardsVarClone(stlc_sorts()), SMALL)
    assert not report.passed
    var_law = report.results[0]
    assert not var_law.passed
    counterexample = var_law.counterexample
    assert counterexample["got"] != counterexample["expected"]
    assert counterexample["target"] == "b, b"


def test_clone_laws_hold_for_presented_clones() -> None:
    budget = SMALL.replace(max_depth=2, max_terms=40)
    for clone in (bool_clone(), global_state_clone(("v1", "v2"))):
        report = check_clone_laws(clone, budget)
        assert report.passed, report.to_dict()
        assert all(result.cases > 0 for result in report.results)


def test_compose_subst_is_associative() -> None:
    clone = WordClone()
    m = clone.sorts.sorts(0)[0]
    budget = Budget(max_depth=2, max_terms=5)
    contexts = [(m,), (m, m)]
    for c0, c1, c2, c3 in product(contexts, repeat=4):
        for a in enumerate_substitutions(clone, c1, c0, budget).terms:
            for b in enumerate_substitutions(clone, c2, c1, budget).terms:
                for c in enumerate_substitutions(clone, c3, c2, budget).terms:
                    left = compose_subst(clone, compose_subst(clone, a, b), c)
                    right = compose_subst(clone, a, compose_subst(clone, b, c))
                    assert left == right


def test_extend_context_hom_is_the_only_extension() -> None:
    model = set_model(2)
    f = initial_hom(model)
    sigma = Substitution((), (BASE,), ((1,),))
    g = extend_context_hom(f, sigma)
    contexts = [(), (BASE,), (BASE, BASE)]

    def candidate(value: int):
        # a hom out of <b>Var is fixed by where it sends the extension entry
        def action(index: int, context, sort):
            if index <= len(context):
                return model.var(context, index)
            return model.constant(context, value)

        return action

    extensions = []
    for value in range(model.size(BASE)):
        h = candidate(value)
        after_weakening = all(
            h(i, ctx, BASE) == f(i, ctx, BASE) for ctx in contexts for i in range(1, len(ctx) + 1)
        )
        on_extension = all(h(len(ctx) + 1, ctx, BASE) == model.constant(ctx, 1) for ctx in contexts)
        if after_weakening and on_extension:
            extensions.append(h)
    (only,) = extensions
    for ctx in contexts:
        for i in range(1, len(ctx) + 2):
            assert g(i, ctx, BASE) == only(i, ctx, BASE)


def test_clone_laws_are_exhaustive_on_contexts_of_length_three() -> None:
    sorts = stlc_sorts()
    budget = Budget(max_context=3, max_depth=3, max_terms=100, max_cases=10_000, sort_height=0)
    for clone in (VarClone(sorts), terminal_clone(sorts), WordClone()):
        report = check_clone_laws(clone, budget)
        assert report.passed, report.to_dict()
        if not isinstance(clone, WordClone):
            assert report.exhaustive
