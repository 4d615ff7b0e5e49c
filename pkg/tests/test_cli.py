from __future__ import annotations

import json
from pathlib import Path

import pytest

from clonekit import config
from clonekit.cli.main import EXIT_BUDGET, EXIT_FAILED, EXIT_OK, EXIT_USAGE, SCHEMA_VERSION, run


def _reset_settings(monkeypatch) -> None:
    for name in (
        "LOG_LEVEL",
        "CLONEKIT_MAX_CONTEXT",
        "CLONEKIT_MAX_SIZE",
        "CLONEKIT_SEARCH_NODES",
        "CLONEKIT_MODEL_SIZE",
        "CLONEKIT_BUNDLE",
    ):
        monkeypatch.delenv(name, raising=False)
    config._SETTINGS = None


def _json(capsys) -> dict:
    return json.loads(capsys.readouterr().out)


def test_normalize_bool_redex(monkeypatch, capsys) -> None:
    _reset_settings(monkeypatch)
    assert run(["normalize", "--theory", "bool", "(\\x : b. x) true"]) == EXIT_OK
    assert capsys.readouterr().out == "true\n"


def test_normalize_gs_rewrites_first_order_terms(monkeypatch, capsys) -> None:
    _reset_settings(monkeypatch)
    assert run(["normalize", "--variant", "gs", "put v1 (put v2 x)"]) == EXIT_OK
    assert capsys.readouterr().out == "put_v2(x)\n"


def test_normalize_gs_eta_long_uses_the_normalizer(monkeypatch, capsys) -> None:
    _reset_settings(monkeypatch)
    assert run(["normalize", "--theory", "gs", "--eta-long", "--json", "put_v1(put_v2(x))"]) == EXIT_OK
    data = _json(capsys)
    assert data["normal_form"] == "get(put_v2(x), put_v2(x))"
    assert data["grammar_checked"] is True


def test_normalize_witness_is_replayed(monkeypatch, capsys) -> None:
    _reset_settings(monkeypatch)
    assert run(["normalize", "--witness", "--json", "(\\x : b. x) y"]) == EXIT_OK
    data = _json(capsys)
    assert data["schema_version"] == SCHEMA_VERSION
    assert data["command"] == "normalize"
    assert data["normal_form"] == "y"
    assert data["witness_checked"] is True


def test_eval_defaults_to_the_boolean_theory(monkeypatch, capsys) -> None:
    _reset_settings(monkeypatch)
    assert run(["eval", "true"]) == EXIT_OK
    assert capsys.readouterr().out == "tt\n"


def test_eval_function_as_json(monkeypatch, capsys) -> None:
    _reset_settings(monkeypatch)
    assert run(["eval", "--json", "\\x : b. ite x false true"]) == EXIT_OK
    data = _json(capsys)
    assert data["exit"] == EXIT_OK
    assert data["value"] == [{"in": "tt", "out": "ff"}, {"in": "ff", "out": "tt"}]


def test_eval_needs_a_closed_term(monkeypatch, capsys) -> None:
    _reset_settings(monkeypatch)
    assert run(["eval", "x"]) == EXIT_USAGE
    assert "closed term" in capsys.readouterr().err


def test_equal_verdicts_map_to_exit_codes(monkeypatch, capsys) -> None:
    _reset_settings(monkeypatch)
    assert run(["equal", "(\\x : b. x) y", "--other", "y"]) == EXIT_OK
    assert run(["equal", "x", "--other", "y"]) == EXIT_FAILED
    assert capsys.readouterr().out == "equal\nnot-equal\n"


def test_monoid_search_is_equal_or_unknown(monkeypatch, capsys) -> None:
    _reset_settings(monkeypatch)
    assert run(["equal", "--theory", "monoid", "mul(e, x)", "--other", "x"]) == EXIT_OK
    assert run(["equal", "--theory", "monoid", "--budget", "50", "mul(x, y)", "--other", "mul(y, x)"]) == EXIT_BUDGET
    assert capsys.readouterr().out == "equal\nunknown\n"


def test_provecheck_accepts_the_shipped_corpus(monkeypatch, capsys) -> None:
    _reset_settings(monkeypatch)
    assert run(["provecheck", "--json"]) == EXIT_OK
    data = _json(capsys)
    assert data["total"] > 0
    assert data["accepted"] == data["total"]


def test_provecheck_rejects_a_wrong_conclusion(monkeypatch, capsys, tmp_path: Path) -> None:
    _reset_settings(monkeypatch)
    corpus = {
        "witnesses": [
            {
                "name": "beta_wrong",
                "theory": "bool",
                "lhs": "(\\x : b. x) true",
                "rhs": "false",
                "derivation": {
                    "rule": "axiom",
                    "equation": "beta",
                    "params": ["b", "b"],
                    "left": [{"var": 1}, {"op": "true", "args": []}],
                    "children": [],
                },
            }
        ]
    }
    path = tmp_path / "wrong.json"
    path.write_text(json.dumps(corpus), encoding="utf-8")
    assert run(["provecheck", str(path)]) == EXIT_FAILED
    out = capsys.readouterr().out
    assert "beta_wrong: REJECTED" in out
    assert out.splitlines()[-1] == "0/1 accepted"


def test_provecheck_unreadable_corpus_is_a_usage_error(monkeypatch, tmp_path: Path) -> None:
    _reset_settings(monkeypatch)
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    assert run(["provecheck", str(path)]) == EXIT_USAGE


def test_check_empty_bundle_passes(monkeypatch, capsys, tmp_path: Path) -> None:
    _reset_settings(monkeypatch)
    path = tmp_path / "empty.bundle"
    path.write_text("-- nothing here\n", encoding="utf-8")
    assert run(["check", "--bundle", str(path)]) == EXIT_OK
    assert capsys.readouterr().out == "no theories declared\n"


def test_check_reports_an_ill_formed_theory(monkeypatch, capsys, tmp_path: Path) -> None:
    _reset_settings(monkeypatch)
    path = tmp_path / "broken.bundle"
    path.write_text(
        "theory broken {\n"
        "  sorts Ty : b\n"
        "  typeformers =>\n"
        "  operators\n"
        "    app[A, B] : (A => B, A) -> B;\n"
        "  equations\n"
        "    bad[A, B] : M : A => B, N : A |- app(?M, ?N, ?N) = ?M;\n"
        "}\n",
        encoding="utf-8",
    )
    assert run(["check", "--bundle", str(path), "--json"]) == EXIT_FAILED
    data = _json(capsys)
    assert data["passed"] is False
    assert "line 7" in data["theories"][0]["error"]


def test_bundle_syntax_error_is_a_usage_error(monkeypatch, capsys, tmp_path: Path) -> None:
    _reset_settings(monkeypatch)
    path = tmp_path / "bad.bundle"
    path.write_text("theory {\n", encoding="utf-8")
    assert run(["check", "--bundle", str(path)]) == EXIT_USAGE
    assert "error:" in capsys.readouterr().err


def test_enumerate_lists_variables_first(monkeypatch, capsys) -> None:
    _reset_settings(monkeypatch)
    assert run(["enumerate", "--theory", "monoid", "--depth", "1", "--json", "x : m"]) == EXIT_OK
    data = _json(capsys)
    assert data["sort"] == "m"
    assert data["terms"][0] == {"term": "x", "size": 1}


def test_adequacy_command(monkeypatch, capsys) -> None:
    _reset_settings(monkeypatch)
    assert run(["adequacy", "--size", "3"]) == EXIT_OK
    assert "normal forms: false, true" in capsys.readouterr().out
    assert run(["adequacy", "--theory", "stlc"]) == EXIT_USAGE


def test_usage_errors(monkeypatch) -> None:
    _reset_settings(monkeypatch)
    assert run(["normalize"]) == EXIT_USAGE
    assert run(["normalize", "--theory", "lambda", "x"]) == EXIT_USAGE
    assert run(["eval", "--model-size", "0", "true"]) == EXIT_USAGE
    with pytest.raises(SystemExit) as info:
        run(["frobnicate"])
    assert info.value.code == EXIT_USAGE


def test_check_runs_every_law_on_the_requested_budget(monkeypatch, capsys) -> None:
    _reset_settings(monkeypatch)
    monkeypatch.setenv("CLONEKIT_MAX_CONTEXT", "2")
    monkeypatch.setenv("CLONEKIT_MAX_CASES", "200")
    assert run(["check", "--theory", "stlc", "--size", "4", "--json"]) == EXIT_OK
    data = _json(capsys)
    (theory,) = data["theories"]
    assert len(theory["reports"]) >= 2
    for report in theory["reports"]:
        assert report["budget"]["max_context"] == 2
        assert report["budget"]["max_size"] == 4
