"""The two logical relations behind adequacy and normalization.

``logical_relation`` relates closed free terms to set-model values: at base
sort by a given family, at arrow sorts by sending related arguments to related
results. ``kripke_relation`` is the context-indexed predicate that quantifies
over every renaming into a budgeted future context; ``check_kripke_sandwich``
tests that it sits between neutral and normal terms.
"""
from __future__ import annotations

import logging
from itertools import islice
from typing import Callable, Hashable, Iterator

from clonekit.config import Budget, default_budget
from clonekit.core.clones import enumerate_renamings, pair_homs
from clonekit.core.laws import LawReport, law_contexts, render, run_law
from clonekit.core.sorts import BASE, Context, Sort, enumerate_contexts, format_context, is_arrow
from clonekit.core.terms import CloneApp, Op, Term
from clonekit.free.algebra import FreeAlgebraClone, fold_hom, unit_hom
from clonekit.free.derivations import check_free_derivation
from clonekit.free.terms import enumerate_free_terms
from clonekit.induction.harness import assert_conclusion, check_induction_hypotheses
from clonekit.induction.predicates import ClonePredicate, Membership, substpred
from clonekit.presentations.stock import FALSE, TRUE
from clonekit.second_order.algebra import algebra_product
from clonekit.stlc.normal_forms import Grammar, NotNormal, check_normal
from clonekit.stlc.set_model import SetModel, bool_model_hom, set_model
from clonekit.stlc.suite import stlc_free
from clonekit.stlc.variants import Variant, make_variant
from clonekit.stlc.witness import witness_normalize

logger = logging.getLogger(__name__)

Pair = tuple[Term, tuple[int, ...]]


def boolean_observation(free: FreeAlgebraClone) -> Callable[[Pair], bool]:
    """P(b) = {(true, tt), (false, ff)} up to ≈."""
    constants = {0: CloneApp(Op(TRUE), (), BASE, ()), 1: CloneApp(Op(FALSE), (), BASE, ())}

    def observe(pair: Pair) -> bool:
        term, (value,) = pair
        expected = constants.get(value)
        return expected is not None and free.equal(term, expected, (), BASE)

    return observe


class LogicalRelation:
    """A closed family on pairs (free term, model table of length one)."""

    def __init__(
        self,
        free: FreeAlgebraClone,
        model: SetModel,
        base: Callable[[Pair], bool] | None = None,
        budget: Budget | None = None,
    ) -> None:
        self.free = free
        self.model = model
        self.base = base or boolean_observation(free)
        self.budget = budget or default_budget()
        self.related: dict[Sort, tuple[Pair, ...]] = {}
        self.exhaustive = True

    def pairs(self, sort: Sort) -> tuple[Pair, ...]:
        if sort not in self.related:
            found = self.free.enumerate((), sort, self.budget)
            self.exhaustive = self.exhaustive and found.exhaustive
            candidates = ((t, (v,)) for t in found.terms for v in range(self.model.size(sort)))
            self.related[sort] = tuple(p for p in candidates if self(p, sort))
        return self.related[sort]

    def __call__(self, pair: Pair, sort: Sort) -> bool:
        if not is_arrow(sort):
            return self.base(pair)
        dom, cod = sort.args
        term, (value,) = pair
        for argument, (image,) in self.pairs(dom):
            applied = self.free.operation("app", (dom, cod), (), (term, argument))
            if not self((applied, (self.model.apply(sort, value, image),)), cod):
                return False
        return True


def logical_relation(
    free: FreeAlgebraClone, model: SetModel, base: Callable[[Pair], bool] | None = None, budget: Budget | None = None
) -> LogicalRelation:
    return LogicalRelation(free, model, base, budget)


def normal_observation(free: FreeAlgebraClone, variant: Variant) -> Callable[[Term, Context], bool]:
    """P(Γ; b) = Nf(Γ; b): the witness chain replays to a term the normal-form grammar accepts."""

    def observe(term: Term, context: Context) -> bool:
        normal, proof = witness_normalize(free, term, context, BASE)
        if not check_free_derivation(free, proof, context, term, normal).accepted:
            return False
        return check_normal(variant, context, normal, BASE).normal

    return observe


def raw_terms(free: FreeAlgebraClone, context: Context, sort: Sort, budget: Budget) -> tuple[tuple[Term, ...], bool]:
    """Enumerated terms without identifying equal ones, so redexes and neutrals both show up."""
    pool = free.sorts.sorts(budget.sort_height)
    found = enumerate_free_terms(
        free.base, free.presentation.signature, context, sort, min(free.size, budget.max_size), pool
    )
    terms = tuple(islice(found, budget.max_terms + 1))
    return terms[: budget.max_terms], len(terms) <= budget.max_terms


def kripke_relation(
    free: FreeAlgebraClone,
    variant: Variant,
    base: Callable[[Term, Context], bool] | None = None,
    budget: Budget | None = None,
    sorts: list[Sort] | None = None,
) -> ClonePredicate:
    """At arrow sorts t is related when, for every renaming ρ into a budgeted Δ and every related u, app(t[ρ], u) is."""
    budget = budget or default_budget()
    base = base or normal_observation(free, variant)
    pool = sorts if sorts is not None else free.sorts.sorts(budget.sort_height)
    futures = list(enumerate_contexts(pool, budget.max_context))

    def test(term: Term, context: Context, sort: Sort) -> Membership:
        if not is_arrow(sort):
            return Membership(base(term, context))
        dom, cod = sort.args
        approximate = False
        for delta in futures:
            arguments = free.enumerate(delta, dom, budget)
            approximate = approximate or not arguments.exhaustive
            related = [u for u in arguments.terms if predicate(u, delta, dom)]
            for rho in enumerate_renamings(delta, context):
                moved = free.rename(term, rho)
                for u in related:
                    applied = free.operation("app", (dom, cod), delta, (moved, u))
                    verdict = predicate.member(applied, delta, cod)
                    approximate = approximate or verdict.approximate
                    if not verdict.holds:
                        return Membership(False, approximate)
        return Membership(True, approximate)

    predicate = ClonePredicate(free, test, "Kripke")
    return predicate


def _is_neutral(variant: Variant, context: Context, term: Term, sort: Sort) -> bool:
    try:
        return Grammar(variant).neutral(context, term) == sort
    except NotNormal:
        return False


def check_kripke_sandwich(
    free: FreeAlgebraClone,
    variant: Variant,
    budget: Budget | None = None,
    sorts: list[Sort] | None = None,
    relation: ClonePredicate | None = None,
) -> LawReport:
    """Ne(Γ; A) ⊆ P(Γ; A) ⊆ Nf(Γ; A) on enumerated terms."""
    budget = budget or default_budget()
    pool = sorts if sorts is not None else free.sorts.sorts(budget.sort_height)
    relation = relation or kripke_relation(free, variant, budget=budget, sorts=pool)
    contexts = law_contexts(free, budget, pool)
    exhaustive: list[bool] = []

    def cases() -> Iterator[tuple[Context, Sort, Hashable]]:
        for gamma in contexts:
            for sort in pool:
                terms, complete = raw_terms(free, gamma, sort, budget)
                exhaustive.append(complete)
                for term in terms:
                    yield gamma, sort, term

    def lower(case) -> dict | None:
        gamma, sort, term = case
        if not _is_neutral(variant, gamma, term, sort):
            return None
        verdict = relation.member(term, gamma, sort)
        if verdict.approximate:
            exhaustive.append(False)
        if verdict.holds:
            return None
        return {"context": format_context(gamma), "sort": str(sort), "neutral": render(term)}

    def upper(case) -> dict | None:
        gamma, sort, term = case
        if not relation(term, gamma, sort):
            return None
        normal, proof = witness_normalize(free, term, gamma, sort)
        if check_normal(variant, gamma, normal, sort).normal and check_free_derivation(free, proof, gamma, term, normal).accepted:
            return None
        return {"context": format_context(gamma), "sort": str(sort), "term": render(term), "normal_form": render(normal)}

    report = LawReport(subject=f"Ne ⊆ {relation.name} ⊆ Nf in {free.name}", budget=budget)
    report.results.append(run_law("Ne ⊆ P", cases(), lower, budget, exhaustive))
    report.results.append(run_law("P ⊆ Nf", cases(), upper, budget, exhaustive))
    return report


def adequacy_by_induction(budget: Budget | None = None, sorts: list[Sort] | None = None) -> tuple[LawReport, LawReport]:
    """Run the induction harness with the logical relation over F(Bool) × M_B.

    Returns the hypothesis report and the conclusion report.
    """
    budget = budget or default_budget()
    variant = make_variant("bool")
    free = stlc_free(variant)
    model = set_model(2)
    algebra = algebra_product(free.algebra(), model.algebra(free.presentation))
    f = pair_homs(unit_hom(free), bool_model_hom(model, variant.base.clone), into=algebra.clone)
    relation = logical_relation(free, model, budget=budget)
    pred = substpred(algebra.clone, relation, budget, name="R‡")
    hypotheses = check_induction_hypotheses(algebra, f, pred, budget, sorts)
    conclusion = assert_conclusion(free, fold_hom(free, algebra, f), pred, budget, sorts, hypotheses)
    return hypotheses, conclusion
