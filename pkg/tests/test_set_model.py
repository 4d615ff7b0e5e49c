from __future__ import annotations

import pytest

from clonekit.config import Budget
from clonekit.core.clones import CloneError, Substitution, initial_hom
from clonekit.core.laws import check_clone_laws, check_hom_laws
from clonekit.core.sorts import BASE, arrow
from clonekit.core.terms import CloneApp, Op, Var
from clonekit.free.equality import NOT_EQUAL, free_equal
from clonekit.presentations.stock import global_state_clone
from clonekit.second_order.algebra import check_algebra
from clonekit.stlc.set_model import (
    SetModel,
    StateModel,
    bool_model_hom,
    eval_closed,
    model_hom,
    render_value,
    set_model,
    state_model_hom,
    value_frame,
    value_to_json,
)
from clonekit.stlc.suite import stlc_free
from clonekit.stlc.variants import make_variant

FUN = arrow(BASE, BASE)
SMALL = Budget(max_context=1, max_terms=50, max_cases=2000, sort_height=0)


def _identity() -> Op:
    return Op("abs", (Var(1),), (), ((BASE,),))


def test_labels() -> None:
    assert set_model(2).labels == ("tt", "ff")
    assert set_model(3).labels == ("z0", "z1", "z2")
    assert set_model(("a", "b")).name == "M{a, b}"
    with pytest.raises(CloneError):
        set_model(0)
    with pytest.raises(CloneError):
        SetModel(("a", "a"))


def test_sizes_and_environments() -> None:
    model = set_model(2)
    assert model.size(FUN) == 4
    assert model.size(arrow(FUN, BASE)) == 16
    assert model.var((BASE, BASE), 1) == (0, 0, 1, 1)
    assert model.var((BASE, BASE), 2) == (0, 1, 0, 1)
    assert model.environments(()).shape == (1, 0)


def test_environment_limit() -> None:
    big = arrow(FUN, FUN)
    with pytest.raises(CloneError):
        set_model(2).count((big, big, big))


def test_substitution_swaps_columns() -> None:
    model = set_model(2)
    context = (BASE, BASE)
    swap = Substitution(context, context, (model.var(context, 2), model.var(context, 1)))
    assert model.subst(model.var(context, 1), swap) == model.var(context, 2)
    closed = Substitution((), (BASE,), ((1,),))
    assert model.subst((0, 1), closed) == (1,)


def test_set_model_clone_laws() -> None:
    report = check_clone_laws(set_model(2), SMALL)
    assert report.passed
    assert report.exhaustive


def test_set_model_is_an_stlc_algebra() -> None:
    report = check_algebra(set_model(2).algebra(), budget=SMALL)
    assert report.passed


def test_identity_renders_as_table() -> None:
    model = set_model(2)
    free = stlc_free()
    value = eval_closed(free, model, initial_hom(model), _identity(), FUN)
    assert value == 2
    assert render_value(model, FUN, value) == "{tt ↦ tt, ff ↦ ff}"
    assert value_to_json(model, FUN, value) == [{"in": "tt", "out": "tt"}, {"in": "ff", "out": "ff"}]
    frame = value_frame(model, FUN, value)
    assert list(frame.columns) == ["argument", "value"]
    assert list(frame["value"]) == ["tt", "ff"]


def test_bool_constants_and_ite() -> None:
    model = set_model(2)
    variant = make_variant("bool")
    free = stlc_free(variant)
    g = model_hom(variant, model)
    assert eval_closed(free, model, g, Op("true")) == 0
    assert eval_closed(free, model, g, Op("ite", (Op("false"), Op("true"), Op("false")))) == 1
    negation = Op("abs", (Op("ite", (Var(1), Op("false"), Op("true"))),))
    assert render_value(model, FUN, eval_closed(free, model, g, negation, FUN)) == "{tt ↦ ff, ff ↦ tt}"


def test_ite_on_extra_element_picks_first_branch() -> None:
    model = set_model(3)
    g = bool_model_hom(model)
    context = (BASE, BASE, BASE)
    table = g(Op("ite", (Var(1), Var(2), Var(3)), (BASE,)), context, BASE)
    rows = model.environments(context).tolist()
    for (c, a, b), value in zip(rows, table):
        assert value == {0: a, 1: b}.get(c, a)


def test_gs_needs_a_state_model() -> None:
    with pytest.raises(CloneError):
        model_hom(make_variant("gs"), set_model(2))
    with pytest.raises(CloneError):
        bool_model_hom(set_model(1))


def test_state_model_tables() -> None:
    model = StateModel(("v1", "v2"), results=2)
    assert model.size(BASE) == 16
    table = ((1, 0), (0, 1))
    assert model.decode(model.encode(table)) == table
    assert model.labels[model.encode(table)] == "(v1→v2·z0, v2→v1·z1)"
    with pytest.raises(CloneError):
        StateModel(("v1",), results=0)


def test_state_model_satisfies_the_global_state_equations() -> None:
    values = ("v1", "v2")
    clone = global_state_clone(values)
    model = StateModel(values, results=2)
    g = state_model_hom(model, clone)
    for equation in clone.presentation.equations:
        assert g(equation.lhs, equation.context, BASE) == g(equation.rhs, equation.context, BASE), equation.name


def test_state_model_hom_laws() -> None:
    values = ("v1", "v2")
    model = StateModel(values, results=1)
    budget = Budget(max_context=1, max_depth=2, max_terms=30, max_cases=500, sort_height=0)
    report = check_hom_laws(state_model_hom(model, global_state_clone(values)), budget)
    assert report.passed, report.to_dict()


def test_gs_disequality_comes_with_a_state_model_certificate() -> None:
    def put(value: str) -> CloneApp:
        return CloneApp(Op(f"put_{value}", (Var(1),)), (BASE,), BASE, (Var(1),))

    verdict = free_equal(stlc_free("gs"), put("v1"), put("v2"), (BASE,), BASE)
    assert verdict.verdict == NOT_EQUAL
    assert verdict.certificate["model"].startswith("M_state")
    assert verdict.certificate["left"] != verdict.certificate["right"]
    assert verdict.to_dict()["certified"] is True
