from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import islice
from typing import Hashable, Iterator

import numpy as np
import pandas as pd

from clonekit.config import Budget, default_budget
from clonekit.core.clones import (
    Clone,
    CloneHom,
    Substitution,
    compose_subst,
    enumerate_substitutions,
)
from clonekit.core.sorts import Context, Sort, enumerate_contexts, format_context
from clonekit.core.terms import Op, Var, MetaApp, CloneApp, show

logger = logging.getLogger(__name__)


def render(value: Hashable) -> str:
    if isinstance(value, (Var, Op, MetaApp, CloneApp)):
        return show(value)
    if isinstance(value, Substitution):
        return "(" + ", ".join(render(c) for c in value.components) + ")"
    return repr(value)


@dataclass
class LawResult:
    law: str
    passed: bool
    cases: int
    exhaustive: bool
    counterexample: dict | None = None

    def to_dict(self) -> dict:
        return {
            "law": self.law,
            "passed": self.passed,
            "cases": self.cases,
            "exhaustive": self.exhaustive,
            "counterexample": self.counterexample,
        }


@dataclass
class LawReport:
    subject: str
    results: list[LawResult] = field(default_factory=list)
    budget: Budget | None = None

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    @property
    def exhaustive(self) -> bool:
        return all(result.exhaustive for result in self.results)

    def to_dict(self) -> dict:
        return {
            "subject": self.subject,
            "passed": self.passed,
            "exhaustive": self.exhaustive,
            "results": [result.to_dict() for result in self.results],
            "budget": self.budget.to_dict() if self.budget else None,
        }

    def to_frame(self) -> pd.DataFrame:
        rows = [
            {
                "subject": self.subject,
                "law": r.law,
                "passed": r.passed,
                "cases": r.cases,
                "exhaustive": r.exhaustive,
            }
            for r in self.results
        ]
        return pd.DataFrame(rows, columns=["subject", "law", "passed", "cases", "exhaustive"])


class _Cases:
    """Feeds at most ``limit`` cases to a law and remembers whether anything was cut."""

    def __init__(self, limit: int) -> None:
        self.limit = limit
        self.count = 0
        self.exhaustive = True

    def take(self, cases: Iterator) -> Iterator:
        for case in islice(cases, self.limit + 1):
            if self.count >= self.limit:
                self.exhaustive = False
                return
            self.count += 1
            yield case


SAMPLE_POOL = 4


def sample_cases(cases: Iterator, budget: Budget, exhaustive: list[bool]) -> list:
    """At most ``max_cases`` cases, drawn with ``budget.seed`` from the first ``SAMPLE_POOL`` multiples of that."""
    pool = list(islice(cases, SAMPLE_POOL * budget.max_cases + 1))
    if len(pool) <= budget.max_cases:
        return pool
    exhaustive.append(False)
    rng = np.random.default_rng(budget.seed)
    picked = np.sort(rng.choice(len(pool), size=budget.max_cases, replace=False))
    logger.debug("Sampled %s of %s cases with seed %s", budget.max_cases, len(pool), budget.seed)
    return [pool[i] for i in picked]


def law_contexts(clone: Clone, budget: Budget, sorts: list[Sort] | None) -> list[Context]:
    pool = sorts if sorts is not None else clone.sorts.sorts(budget.sort_height)
    return list(enumerate_contexts(pool, budget.max_context))


def run_law(law: str, cases: Iterator, check, budget: Budget, exhaustive: list[bool]) -> LawResult:
    runner = _Cases(budget.max_cases)
    for case in runner.take(cases):
        failure = check(case)
        if failure is not None:
            return LawResult(law, False, runner.count, runner.exhaustive and all(exhaustive), failure)
    result = LawResult(law, True, runner.count, runner.exhaustive and all(exhaustive))
    logger.info("%s: %s cases, passed=%s", law, result.cases, result.passed)
    return result


def check_clone_laws(
    clone: Clone, budget: Budget | None = None, sorts: list[Sort] | None = None
) -> LawReport:
    budget = budget or default_budget()
    contexts = law_contexts(clone, budget, sorts)
    pool = sorts if sorts is not None else clone.sorts.sorts(budget.sort_height)
    exhaustive: list[bool] = []

    def substitutions(source: Context, target: Context) -> tuple[Substitution, ...]:
        found = enumerate_substitutions(clone, source, target, budget)
        exhaustive.append(found.exhaustive)
        return found.terms

    def terms(context: Context, sort: Sort) -> tuple:
        found = clone.enumerate(context, sort, budget)
        exhaustive.append(found.exhaustive)
        return found.terms

    def var_law_cases() -> Iterator:
        for gamma in contexts:
            for delta in contexts:
                if not delta:
                    continue
                for sigma in substitutions(gamma, delta):
                    for i in range(1, len(delta) + 1):
                        yield gamma, delta, sigma, i

    def var_law(case) -> dict | None:
        gamma, delta, sigma, i = case
        left = clone.subst(clone.var(delta, i), sigma)
        if clone.equal(left, sigma.components[i - 1], gamma, delta[i - 1]):
            return None
        return {
            "context": format_context(gamma),
            "target": format_context(delta),
            "index": i,
            "sigma": render(sigma),
            "got": render(left),
            "expected": render(sigma.components[i - 1]),
        }

    def identity_cases() -> Iterator:
        for gamma in contexts:
            for sort in pool:
                for t in terms(gamma, sort):
                    yield gamma, sort, t

    def identity_law(case) -> dict | None:
        gamma, sort, t = case
        left = clone.subst(t, clone.identity(gamma))
        if clone.equal(left, t, gamma, sort):
            return None
        return {"context": format_context(gamma), "sort": str(sort), "term": render(t), "got": render(left)}

    def assoc_cases() -> Iterator:
        for theta in contexts:
            for sort in pool:
                for t in terms(theta, sort):
                    for delta in contexts:
                        for inner in substitutions(delta, theta):
                            for gamma in contexts:
                                for outer in substitutions(gamma, delta):
                                    yield sort, t, inner, outer

    def assoc_law(case) -> dict | None:
        sort, t, inner, outer = case
        left = clone.subst(t, compose_subst(clone, inner, outer))
        right = clone.subst(clone.subst(t, inner), outer)
        if clone.equal(left, right, outer.source, sort):
            return None
        return {
            "term": render(t),
            "inner": render(inner),
            "outer": render(outer),
            "composed_first": render(left),
            "sequential": render(right),
        }

    report = LawReport(subject=clone.name, budget=budget)
    report.results.append(run_law("var_i[σ] = σ_i", var_law_cases(), var_law, budget, exhaustive))
    report.results.append(run_law("t[var] = t", identity_cases(), identity_law, budget, exhaustive))
    report.results.append(run_law("t[σ'][σ] = t[σ'∘σ]", assoc_cases(), assoc_law, budget, exhaustive))
    return report


def check_hom_laws(
    hom: CloneHom, budget: Budget | None = None, sorts: list[Sort] | None = None
) -> LawReport:
    budget = budget or default_budget()
    source, target = hom.source, hom.target
    contexts = law_contexts(source, budget, sorts)
    pool = sorts if sorts is not None else source.sorts.sorts(budget.sort_height)
    exhaustive: list[bool] = []

    def var_cases() -> Iterator:
        for gamma in contexts:
            for i in range(1, len(gamma) + 1):
                yield gamma, i

    def var_law(case) -> dict | None:
        gamma, i = case
        image = hom(source.var(gamma, i), gamma, gamma[i - 1])
        if target.equal(image, target.var(gamma, i), gamma, gamma[i - 1]):
            return None
        return {"context": format_context(gamma), "index": i, "got": render(image)}

    def subst_cases() -> Iterator:
        for delta in contexts:
            for sort in pool:
                found = source.enumerate(delta, sort, budget)
                exhaustive.append(found.exhaustive)
                for t in found.terms:
                    for gamma in contexts:
                        subs = enumerate_substitutions(source, gamma, delta, budget)
                        exhaustive.append(subs.exhaustive)
                        for sigma in subs.terms:
                            yield sort, t, sigma

    def subst_law(case) -> dict | None:
        sort, t, sigma = case
        left = hom(source.subst(t, sigma), sigma.source, sort)
        right = target.subst(hom(t, sigma.target, sort), hom.map_subst(sigma))
        if target.equal(left, right, sigma.source, sort):
            return None
        return {"term": render(t), "sigma": render(sigma), "image_of_subst": render(left), "subst_of_images": render(right)}

    report = LawReport(subject=hom.name, budget=budget)
    report.results.append(run_law("f(var_i) = var_i", var_cases(), var_law, budget, exhaustive))
    report.results.append(run_law("f(t[σ]) = f(t)[f(σ)]", subst_cases(), subst_law, budget, exhaustive))
    return report
