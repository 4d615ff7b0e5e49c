"""Induction over second-order syntax, checked on bounded enumerations.

If a predicate on an algebra's carrier is closed under every operator and
contains the image of the base clone, then every free term folds into it.
``check_induction_hypotheses`` tests the two hypotheses; ``assert_conclusion``
tests the conclusion and treats any violation after passing hypotheses as a
soundness bug.
"""
from __future__ import annotations

import logging
from itertools import islice, product
from typing import Iterator

from clonekit.config import Budget, default_budget
from clonekit.core.clones import CloneHom
from clonekit.core.laws import LawReport, law_contexts, render, run_law
from clonekit.core.sorts import Sort, format_context
from clonekit.free.algebra import FreeAlgebraClone
from clonekit.free.terms import enumerate_free_terms
from clonekit.induction.predicates import ClonePredicate
from clonekit.second_order.algebra import Algebra, operator_instances

logger = logging.getLogger(__name__)


class SoundnessViolation(RuntimeError):
    def __init__(self, message: str, report: LawReport) -> None:
        self.report = report
        super().__init__(message)


def _filtered(pred: ClonePredicate, context, sort: Sort, budget: Budget, exhaustive: list[bool]) -> tuple:
    found = pred.clone.enumerate(context, sort, budget)
    exhaustive.append(found.exhaustive)
    kept = []
    for term in found.terms:
        membership = pred.member(term, context, sort)
        if membership.approximate:
            exhaustive.append(False)
        if membership.holds:
            kept.append(term)
    return tuple(kept)


def check_induction_hypotheses(
    algebra: Algebra,
    f: CloneHom,
    pred: ClonePredicate,
    budget: Budget | None = None,
    sorts: list[Sort] | None = None,
) -> LawReport:
    """(a) arguments in P give ⟦o⟧(arguments) in P; (b) f(t) is in P for every enumerated base element t."""
    budget = budget or default_budget()
    clone = algebra.clone
    pool = sorts if sorts is not None else clone.sorts.sorts(budget.sort_height)
    contexts = law_contexts(clone, budget, pool)
    exhaustive: list[bool] = []

    def operator_cases() -> Iterator:
        for op, params, slots, output in operator_instances(algebra.presentation, pool):
            for gamma in contexts:
                columns = [_filtered(pred, gamma + s.binder, s.sort, budget, exhaustive) for s in slots]
                for args in _rows(columns, budget, exhaustive):
                    yield op.name, params, output, gamma, args

    def closed_under(case) -> dict | None:
        name, params, output, gamma, args = case
        image = algebra.interpret(name, params, gamma, args)
        membership = pred.member(image, gamma, output)
        if membership.approximate:
            exhaustive.append(False)
        if membership.holds:
            return None
        return {
            "operator": name,
            "params": [str(p) for p in params],
            "context": format_context(gamma),
            "args": [render(a) for a in args],
            "image": render(image),
        }

    def image_cases() -> Iterator:
        for gamma in contexts:
            for sort in pool:
                found = f.source.enumerate(gamma, sort, budget)
                exhaustive.append(found.exhaustive)
                for term in found.terms:
                    yield gamma, sort, term

    def in_image(case) -> dict | None:
        gamma, sort, term = case
        image = f(term, gamma, sort)
        membership = pred.member(image, gamma, sort)
        if membership.approximate:
            exhaustive.append(False)
        if membership.holds:
            return None
        return {"context": format_context(gamma), "sort": str(sort), "element": render(term), "image": render(image)}

    report = LawReport(subject=f"{pred.name} on {algebra.name}", budget=budget)
    report.results.append(run_law("P closed under operators", operator_cases(), closed_under, budget, exhaustive))
    report.results.append(run_law(f"{f.name}(X) ⊆ P", image_cases(), in_image, budget, exhaustive))
    return report


def _rows(columns: list[tuple], budget: Budget, exhaustive: list[bool]) -> Iterator[tuple]:
    for count, row in enumerate(islice(product(*columns), budget.max_terms + 1)):
        if count >= budget.max_terms:
            exhaustive.append(False)
            return
        yield row


def assert_conclusion(
    free: FreeAlgebraClone,
    fold: CloneHom,
    pred: ClonePredicate,
    budget: Budget | None = None,
    sorts: list[Sort] | None = None,
    hypotheses: LawReport | None = None,
) -> LawReport:
    """Every enumerated free term folds into P.

    When ``hypotheses`` passed exhaustively, a violation raises
    ``SoundnessViolation`` instead of being reported as data.
    """
    budget = budget or default_budget()
    pool = sorts if sorts is not None else free.sorts.sorts(budget.sort_height)
    contexts = law_contexts(free, budget, pool)
    bound = min(free.size, budget.max_size)
    exhaustive: list[bool] = [False]

    def cases() -> Iterator:
        for gamma in contexts:
            for sort in pool:
                for term in enumerate_free_terms(free.base, free.presentation.signature, gamma, sort, bound, pool):
                    yield gamma, sort, term

    def holds(case) -> dict | None:
        gamma, sort, term = case
        image = fold(term, gamma, sort)
        if pred(image, gamma, sort):
            return None
        return {"context": format_context(gamma), "sort": str(sort), "term": render(term), "image": render(image)}

    report = LawReport(subject=f"{fold.name}(F) ⊆ {pred.name}", budget=budget)
    report.results.append(run_law("conclusion", cases(), holds, budget, exhaustive))
    if hypotheses is not None and hypotheses.passed and hypotheses.exhaustive and not report.passed:
        logger.error("Induction hypotheses held but the conclusion failed: %s", report.results[0].counterexample)
        raise SoundnessViolation("Induction hypotheses held but the conclusion failed", report)
    return report
