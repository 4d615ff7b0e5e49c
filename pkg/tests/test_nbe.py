from __future__ import annotations

import pytest

from clonekit.core.sorts import BASE, arrow
from clonekit.core.terms import CloneApp, Op, Var
from clonekit.free.derivations import check_free_derivation
from clonekit.presentations.first_order import PresentationError
from clonekit.stlc.nbe import nbe_normalize
from clonekit.stlc.normal_forms import check_normal
from clonekit.stlc.suite import gs_normalize, stlc_free
from clonekit.stlc.variants import make_variant
from clonekit.stlc.witness import gs_witness_chains, witness_normalize

FUN = arrow(BASE, BASE)


def _app(head, arg) -> Op:
    return Op("app", (head, arg))


def _abs(body, dom=BASE) -> Op:
    return Op("abs", (body,), (), ((dom,),))


def _gs(name: str, *args) -> CloneApp:
    element = Op(name, tuple(Var(i) for i in range(1, len(args) + 1)))
    return CloneApp(element, (BASE,) * len(args), BASE, tuple(args))


def test_beta_reduces_to_argument() -> None:
    assert nbe_normalize(stlc_free(), _app(_abs(Var(2)), Var(1)), (BASE,)) == Var(1)


def test_variable_of_arrow_sort_is_eta_expanded() -> None:
    normal = nbe_normalize(stlc_free(), Var(1), (FUN,))
    assert normal == Op("abs", (Op("app", (Var(1), Var(2)), (BASE, BASE)),), (BASE, BASE), ((BASE,),))
    assert check_normal(make_variant("stlc"), (FUN,), normal, FUN).normal


def test_constant_function_drops_its_argument() -> None:
    # (λx. λy. x) z w in the context z, w : b
    term = _app(_app(_abs(_abs(Var(3))), Var(1)), Var(2))
    assert nbe_normalize(stlc_free(), term, (BASE, BASE)) == Var(1)


def test_bool_ite_on_constant_selects_branch() -> None:
    free = stlc_free("bool")
    term = Op("ite", (Op("true"), Var(1), Var(2)))
    assert nbe_normalize(free, term, (BASE, BASE)) == Var(1)


def test_bool_redex_reaches_constant() -> None:
    free = stlc_free("bool")
    negation = _abs(Op("ite", (Var(1), Op("false"), Op("true"))))
    normal = nbe_normalize(free, _app(negation, Op("true")))
    expected, _ = free.check(Op("false"), ())
    assert normal == expected


def test_bool_stuck_ite_at_arrow_sort_is_normal() -> None:
    free = stlc_free("bool")
    context = (BASE, FUN, FUN)
    normal = nbe_normalize(free, Op("ite", (Var(1), Var(2), Var(3))), context, FUN)
    verdict = check_normal(make_variant("bool"), context, normal, FUN)
    assert verdict.normal, verdict.reason


def test_gs_put_put_keeps_last_write() -> None:
    result = gs_normalize(("v1", "v2"), Op("put_v1", (Op("put_v2", (Var(1),)),)), (BASE,))
    last = _gs("put_v2", Var(1))
    assert result == _gs("get", last, last)
    assert check_normal(make_variant("gs"), (BASE,), result, BASE).normal


def test_gs_variable_is_completed() -> None:
    result = gs_normalize(("v1", "v2"), Var(1), (BASE,))
    assert result == _gs("get", _gs("put_v1", Var(1)), _gs("put_v2", Var(1)))


def test_unknown_variant_is_rejected() -> None:
    with pytest.raises(PresentationError):
        make_variant("state")


@pytest.mark.parametrize(
    "variant, context, term",
    [
        ("stlc", (BASE,), _app(_abs(Var(2)), Var(1))),
        ("stlc", (FUN,), Var(1)),
        ("stlc", (FUN, BASE), _app(_abs(_app(Var(1), Var(3))), Var(2))),
        ("bool", (), _app(_abs(Op("ite", (Var(1), Op("false"), Op("true")))), Op("true"))),
        ("gs", (BASE,), Op("put_v1", (Op("put_v2", (Var(1),)),))),
    ],
)
def test_witness_normalization_replays(variant, context, term) -> None:
    free = stlc_free(variant)
    normal, proof = witness_normalize(free, term, context)
    verdict = check_free_derivation(free, proof, context, term, normal)
    assert verdict.accepted, verdict.reason
    assert normal == nbe_normalize(free, term, context)


def test_gs_completion_facts_replay() -> None:
    values = ("v1", "v2")
    free = stlc_free("gs", values)
    chains = gs_witness_chains(free, values)
    assert [chain.name for chain in chains] == ["complete_neutral", "select_v1", "select_v2", "flatten_get"]
    for chain in chains:
        verdict = check_free_derivation(free, chain.derivation, chain.context, chain.lhs, chain.rhs)
        assert verdict.accepted, f"{chain.name}: {verdict.reason}"


def test_check_normal_rejects_redex_and_short_forms() -> None:
    free = stlc_free()
    redex, _ = free.check(_app(_abs(Var(2)), Var(1)), (BASE,))
    assert not check_normal(make_variant("stlc"), (BASE,), redex, BASE).normal
    short = check_normal(make_variant("stlc"), (FUN,), Var(1), FUN)
    assert not short.normal
    assert "λ-abstraction" in short.reason
    assert short.to_dict()["normal"] is False


def test_check_normal_rejects_ite_on_constant() -> None:
    free = stlc_free("bool")
    term, _ = free.check(Op("ite", (Op("true"), Var(1), Var(2))), (BASE, BASE))
    verdict = check_normal(make_variant("bool"), (BASE, BASE), term, BASE)
    assert not verdict.normal
    assert "constant condition" in verdict.reason
