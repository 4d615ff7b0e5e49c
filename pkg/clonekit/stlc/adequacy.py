"""Adequacy of the two-element set model for STLC with booleans.

Closed boolean terms with the same value in the model must have the same
normal form, and that normal form must be ``true`` or ``false``.
"""
from __future__ import annotations

import logging
import time
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterator

import pandas as pd

from clonekit.config import Budget, default_budget
from clonekit.core.sorts import BASE, Sort
from clonekit.core.terms import CloneApp, Op, Term, show
from clonekit.free.algebra import FreeAlgebraClone
from clonekit.free.terms import enumerate_free_terms
from clonekit.presentations.stock import FALSE, TRUE
from clonekit.second_order.syntax import SoPresentation
from clonekit.stlc.nbe import nbe_normalize
from clonekit.stlc.normal_forms import check_normal
from clonekit.stlc.set_model import bool_model_hom, eval_closed, render_value, set_model
from clonekit.stlc.suite import stlc_free
from clonekit.stlc.variants import Variant, make_variant

logger = logging.getLogger(__name__)


def enumerate_closed_terms(free: FreeAlgebraClone, sort: Sort, bound: int, budget: Budget | None = None) -> Iterator[Term]:
    """Closed free terms of ``sort`` with at most ``bound`` nodes, smallest first."""
    budget = budget or default_budget()
    pool = free.sorts.sorts(budget.sort_height)
    seen: set[Term] = set()
    for term in enumerate_free_terms(free.base, free.presentation.signature, (), sort, bound, pool):
        if term in seen:
            continue
        seen.add(term)
        yield term


@dataclass
class AdequacyReport:
    bound: int
    terms: int = 0
    pairs: int = 0
    normal_forms: list[str] = field(default_factory=list)
    counterexamples: list[dict] = field(default_factory=list)
    exhaustive: bool = True
    seconds: float = 0.0
    budget: Budget | None = None

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    def to_dict(self, timing: bool = False) -> dict:
        data = {
            "bound": self.bound,
            "passed": self.passed,
            "terms": self.terms,
            "pairs_checked": self.pairs,
            "normal_forms": self.normal_forms,
            "counterexamples": self.counterexamples,
            "exhaustive": self.exhaustive,
            "budget": self.budget.to_dict() if self.budget else None,
        }
        if timing:
            data["seconds"] = round(self.seconds, 3)
        return data

    def to_frame(self) -> pd.DataFrame:
        columns = ["kind", "term", "other", "value", "normal_form"]
        return pd.DataFrame(self.counterexamples, columns=columns)


def adequacy_harness(
    bound: int | None = None,
    budget: Budget | None = None,
    variant: Variant | None = None,
    presentation: SoPresentation | None = None,
) -> AdequacyReport:
    """Compare model values and normal forms on every closed boolean term up to ``bound`` nodes."""
    budget = budget or default_budget()
    bound = budget.max_size if bound is None else bound
    if bound < 0:
        raise ValueError(f"Size bound must be non-negative, got {bound}")
    started = time.perf_counter()
    variant = variant or make_variant("bool")
    if variant.name != "bool":
        raise ValueError(f"Adequacy is stated for the bool variant, not {variant.name}")
    free = stlc_free(variant, presentation=presentation)
    model = set_model(2, free.sorts)
    g = bool_model_hom(model, variant.base.clone)
    booleans = {CloneApp(Op(name), (), BASE, ()) for name in (TRUE, FALSE)}

    report = AdequacyReport(bound=bound, budget=budget)
    classes: dict[int, list[tuple[Term, Term]]] = defaultdict(list)
    forms: set[str] = set()
    for term in enumerate_closed_terms(free, BASE, bound, budget):
        if report.terms >= budget.max_cases:
            logger.warning("Adequacy enumeration truncated at %s terms", budget.max_cases)
            report.exhaustive = False
            break
        report.terms += 1
        value = eval_closed(free, model, g, term, BASE)
        normal = nbe_normalize(free, term, (), BASE)
        rendered = show(normal)
        forms.add(rendered)
        row = {"term": show(term), "value": render_value(model, BASE, value), "normal_form": rendered}
        if not check_normal(variant, (), normal, BASE).normal:
            report.counterexamples.append({"kind": "not normal", **row})
        if normal not in booleans:
            report.counterexamples.append({"kind": "not a boolean", **row})
        if eval_closed(free, model, g, normal, BASE) != value:
            report.counterexamples.append({"kind": "normalizing changed the value", **row})
        classes[value].append((term, normal))

    for value, members in classes.items():
        report.pairs += len(members) * (len(members) - 1) // 2
        first_term, first_form = members[0]
        for term, normal in members[1:]:
            if normal != first_form:
                report.counterexamples.append(
                    {
                        "kind": "equal values, different normal forms",
                        "term": show(first_term),
                        "other": show(term),
                        "value": render_value(model, BASE, value),
                        "normal_form": f"{show(first_form)} / {show(normal)}",
                    }
                )
    report.normal_forms = sorted(forms)
    report.seconds = time.perf_counter() - started
    logger.info(
        "Adequacy up to size %s: %s terms, %s pairs, %s counterexamples",
        bound,
        report.terms,
        report.pairs,
        len(report.counterexamples),
    )
    return report

