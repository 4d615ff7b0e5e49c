from __future__ import annotations

from pathlib import Path

import pytest

from clonekit.cli.bundle import BundleError, load_bundle, parse_bundle
from clonekit.cli.surface import Printer, SurfaceError, closing_names, parse_context, parse_sort, print_term, read_term
from clonekit.config import DEFAULT_BUNDLE
from clonekit.core.sorts import BASE, arrow
from clonekit.core.terms import CloneApp, Op, Var
from clonekit.presentations.tm_clone import SearchEquality

BROKEN_BETA = """\
theory broken {
  sorts Ty : b
  typeformers =>
  operators
    app[A, B] : (A => B, A) -> B;
    abs[A, B] : ((A). B) -> A => B;
  equations
    beta[A, B] : M : (A). B, N : A |- app(abs(x. ?M(x)), ?N, ?N) = ?M(?N);
}

theory fine {
  sorts T : b
}
"""


def _shipped():
    return parse_bundle(DEFAULT_BUNDLE.read_text(encoding="utf-8"), DEFAULT_BUNDLE)


def test_shipped_bundle_declares_four_theories() -> None:
    bundle = _shipped()
    assert list(bundle.theories) == ["stlc", "bool", "gs", "monoid"]
    for theory in bundle.theories.values():
        theory.assemble()


def test_shipped_theories_pick_their_bases() -> None:
    bundle = _shipped()
    assert bundle.theory("stlc").kind == "var"
    assert bundle.theory("stlc").base_presentation is None
    assert bundle.theory("bool").stlc_shaped
    gs = bundle.theory("gs")
    assert gs.variant.name == "gs"
    assert gs.variant.values == ("v1", "v2")
    monoid = bundle.theory("monoid")
    assert monoid.first_order
    assert monoid.presentation is None
    assert monoid.variant is None
    assert isinstance(monoid.base_clone.strategy, SearchEquality)
    with pytest.raises(BundleError):
        monoid.free()


def test_unknown_theory_lists_the_declared_ones() -> None:
    with pytest.raises(BundleError, match="declared: stlc, bool, gs, monoid"):
        _shipped().theory("lambda")


def test_duplicate_theory_is_rejected_with_its_line() -> None:
    text = "theory a {\n  sorts T : b\n}\ntheory a {\n  sorts T : b\n}\n"
    with pytest.raises(BundleError) as info:
        parse_bundle(text)
    assert info.value.line == 4


def test_syntax_error_carries_position() -> None:
    with pytest.raises(BundleError) as info:
        parse_bundle("theory a {\n  sorts T b\n}\n")
    assert info.value.line == 2
    assert info.value.column is not None


def test_unknown_base_kind() -> None:
    with pytest.raises(BundleError, match="Unknown base kind"):
        parse_bundle("theory a {\n  sorts T : b\n  base magic\n}\n")


def test_ill_formed_equation_only_breaks_its_theory() -> None:
    bundle = parse_bundle(BROKEN_BETA)
    with pytest.raises(BundleError) as info:
        bundle.theory("broken").assemble()
    assert info.value.line == 8
    assert "takes 2 arguments" in str(info.value)
    bundle.theory("fine").assemble()


def test_gs_base_must_carry_the_state_equations() -> None:
    text = """\
theory partial {
  sorts Ty : b
  base gs {
    operators
      get : (b, b) -> b;
      put_v1 : (b) -> b;
      put_v2 : (b) -> b;
    equations
      get_put : x : b |- get(put_v1(x), put_v2(x)) = x;
  }
}
"""
    with pytest.raises(BundleError, match="global-state equations"):
        parse_bundle(text).theory("partial").assemble()


def test_missing_bundle_file(tmp_path: Path) -> None:
    with pytest.raises(BundleError, match="Cannot read bundle"):
        load_bundle(tmp_path / "absent.bundle")


def test_sorts_and_contexts_parse() -> None:
    fun = arrow(BASE, BASE)
    assert parse_sort("b => b") == fun
    assert parse_sort("(b => b) => b") == arrow(fun, BASE)
    assert parse_context("f : b => b, x : b") == (fun, BASE)
    with pytest.raises(SurfaceError):
        parse_sort("=> b")


def test_read_term_opens_unknown_names_at_the_base_sort() -> None:
    stlc = _shipped().theory("stlc")
    names, context, term = read_term("\\x : b. f x", stlc.shape)
    assert names == ("f",)
    assert context == (BASE,)
    assert term == Op("abs", (Op("app", (Var(1), Var(2))),), (), ((BASE,),))


def test_read_term_operator_spine_takes_its_arity() -> None:
    bool_theory = _shipped().theory("bool")
    names, context, term = read_term("ite c t e", bool_theory.shape)
    assert names == ("c", "t", "e")
    assert context == (BASE, BASE, BASE)
    assert term == Op("ite", (Var(1), Var(2), Var(3)))


def test_read_term_explicit_context_and_levels() -> None:
    stlc = _shipped().theory("stlc")
    names, context, term = read_term("x : b, y : b |- #2", stlc.shape)
    assert names == ("x", "y")
    assert context == (BASE, BASE)
    assert term == Var(2)


def test_closed_reading_rejects_unknown_names() -> None:
    stlc = _shipped().theory("stlc")
    with pytest.raises(SurfaceError, match="Unknown name f"):
        read_term("f", stlc.shape, open=False)


def test_printer_fresh_names() -> None:
    assert Printer().names((BASE, BASE, BASE)) == ("x", "y", "z")
    assert Printer(["x"]).fresh([]) == "y"
    assert Printer().fresh(["x", "y", "z", "u", "v", "w"]) == "x1"
    assert closing_names((BASE,), reserved=["x"]) == ("y",)


def test_printer_reads_back() -> None:
    stlc = _shipped().theory("stlc")
    names, _context, term = read_term("\\x : b. f x", stlc.shape)
    assert print_term(term, names) == "\\x : b. f x"
    assert print_term(Op("app", (Var(1), Var(2))), ("f", "y")) == "f y"


def test_printer_shows_generic_clone_applications_by_name() -> None:
    true = CloneApp(Op("true"), (), BASE, ())
    put = CloneApp(Op("put_v1", (Var(1),)), (BASE,), BASE, (Var(1),))
    assert print_term(true) == "true"
    assert print_term(put, ("s",)) == "put_v1(s)"


def test_put_with_a_separate_value_name() -> None:
    gs = _shipped().theory("gs")
    expected = Op("put_v1", (Op("put_v2", (Var(1),)),))
    for text in ("put v1 (put v2 x)", "put_v1(put_v2(x))", "put v1 (put_v2 x)"):
        names, context, term = read_term(text, gs.shape)
        assert names == ("x",)
        assert term == expected
