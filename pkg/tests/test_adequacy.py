from __future__ import annotations

import pytest

from clonekit.config import Budget
from clonekit.core.sorts import BASE
from clonekit.stlc.adequacy import adequacy_harness, enumerate_closed_terms
from clonekit.stlc.suite import stlc_free
from clonekit.stlc.variants import make_variant

BUDGET = Budget(max_cases=500, sort_height=0)


def test_adequacy_holds_on_small_terms() -> None:
    report = adequacy_harness(4, BUDGET)
    assert report.passed, report.counterexamples
    assert report.exhaustive
    assert report.terms > 2
    assert report.normal_forms == ["false", "true"]
    assert report.pairs > 0


def test_closed_terms_come_smallest_first() -> None:
    terms = list(enumerate_closed_terms(stlc_free("bool"), BASE, 1, BUDGET))
    assert len(terms) == 2
    assert len(set(terms)) == len(terms)


def test_report_serializes_without_timing_by_default() -> None:
    report = adequacy_harness(1, BUDGET)
    data = report.to_dict()
    assert data["bound"] == 1
    assert data["terms"] == 2
    assert "seconds" not in data
    assert "seconds" in report.to_dict(timing=True)
    assert report.to_frame().empty


def test_truncation_clears_exhaustive() -> None:
    report = adequacy_harness(4, BUDGET.replace(max_cases=3))
    assert report.terms == 3
    assert not report.exhaustive


def test_adequacy_rejects_other_variants() -> None:
    with pytest.raises(ValueError):
        adequacy_harness(2, BUDGET, make_variant("stlc"))
    with pytest.raises(ValueError):
        adequacy_harness(-1, BUDGET)
