from __future__ import annotations

from pathlib import Path

import pytest

from clonekit import config


def _reset_settings(monkeypatch, **env: str) -> None:
    for name in (
        "LOG_LEVEL",
        "CLONEKIT_MAX_CONTEXT",
        "CLONEKIT_MAX_SIZE",
        "CLONEKIT_SEARCH_NODES",
        "CLONEKIT_MODEL_SIZE",
        "CLONEKIT_BUNDLE",
    ):
        monkeypatch.delenv(name, raising=False)
    for name, value in env.items():
        monkeypatch.setenv(name, value)
    config._SETTINGS = None


def test_settings_defaults(monkeypatch) -> None:
    _reset_settings(monkeypatch)
    settings = config.get_settings()
    assert settings.log_level == "INFO"
    assert settings.budget == config.Budget()
    assert settings.model_size == 2
    assert settings.bundle_path == config.DEFAULT_BUNDLE
    assert config.DEFAULT_BUNDLE.exists()
    assert config.DEFAULT_WITNESSES.exists()


def test_settings_read_environment(monkeypatch, tmp_path: Path) -> None:
    bundle = tmp_path / "mine.bundle"
    _reset_settings(
        monkeypatch,
        CLONEKIT_MAX_CONTEXT="2",
        CLONEKIT_SEARCH_NODES="50",
        CLONEKIT_MODEL_SIZE="3",
        CLONEKIT_BUNDLE=str(bundle),
    )
    settings = config.get_settings()
    assert settings.budget.max_context == 2
    assert settings.budget.search_nodes == 50
    assert settings.model_size == 3
    assert settings.bundle_path == bundle.resolve()


def test_malformed_numbers_fall_back(monkeypatch) -> None:
    _reset_settings(monkeypatch, CLONEKIT_MAX_SIZE="lots", CLONEKIT_MAX_CONTEXT=" ")
    budget = config.default_budget()
    assert budget.max_size == 7
    assert budget.max_context == 3


def test_settings_are_cached(monkeypatch) -> None:
    _reset_settings(monkeypatch)
    first = config.get_settings()
    monkeypatch.setenv("CLONEKIT_MAX_SIZE", "2")
    assert config.get_settings() is first


def test_budget_replace_and_validation() -> None:
    budget = config.Budget().replace(max_size=3, seed=9)
    assert budget.max_size == 3
    assert budget.seed == 9
    assert budget.to_dict()["max_context"] == 3
    with pytest.raises(ValueError):
        config.Budget(max_terms=-1)
