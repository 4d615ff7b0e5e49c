"""Predicates over a clone, and the two liftings that make families substitution-closed.

A family is an arbitrary decidable test. ``substpred`` lifts a family of closed
terms to every context by quantifying over closing substitutions drawn from
the family; ``osubstpred`` does the same for open families, quantifying over
substitutions into every budgeted context. Quantifiers range over bounded
enumerations, so a membership answer says whether it looked at everything.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import islice, product
from typing import Callable, Hashable, Sequence

from clonekit.config import Budget, default_budget
from clonekit.core.clones import Clone, Substitution
from clonekit.core.sorts import Context, Sort, enumerate_contexts

logger = logging.getLogger(__name__)

ClosedFamily = Callable[[Hashable, Sort], bool]
OpenFamily = Callable[[Hashable, Context, Sort], bool]


@dataclass(frozen=True)
class Membership:
    holds: bool
    approximate: bool = False
    witness: Substitution | None = None

    def __bool__(self) -> bool:
        return self.holds


class ClonePredicate:
    """A decidable P(Γ; A) ⊆ Y(Γ; A); answers are memoized."""

    def __init__(self, clone: Clone, test: Callable[[Hashable, Context, Sort], Membership | bool], name: str = "P") -> None:
        self.clone = clone
        self.test = test
        self.name = name
        self.memo: dict[tuple[Hashable, Context, Sort], Membership] = {}

    def member(self, term: Hashable, context: Context, sort: Sort) -> Membership:
        key = (term, context, sort)
        found = self.memo.get(key)
        if found is None:
            answer = self.test(term, context, sort)
            found = answer if isinstance(answer, Membership) else Membership(bool(answer))
            self.memo[key] = found
        return found

    def __call__(self, term: Hashable, context: Context, sort: Sort) -> bool:
        return self.member(term, context, sort).holds

    def __repr__(self) -> str:
        return f"ClonePredicate({self.name} on {self.clone.name})"


def everything(clone: Clone) -> ClonePredicate:
    return ClonePredicate(clone, lambda *_: True, "⊤")


def open_predicate(clone: Clone, family: OpenFamily, name: str = "P") -> ClonePredicate:
    """Take an open family at its word, with no closure manufactured."""
    return ClonePredicate(clone, family, name)


def _members(clone: Clone, context: Context, sort: Sort, keep, budget: Budget) -> tuple[tuple, bool]:
    found = clone.enumerate(context, sort, budget)
    return tuple(t for t in found.terms if keep(t, sort)), found.exhaustive


def _quantify(
    clone: Clone,
    term: Hashable,
    source: Context,
    target: Context,
    columns: Sequence[tuple],
    complete: bool,
    holds: Callable[[Hashable], bool],
    budget: Budget,
) -> Membership:
    rows = islice(product(*columns), budget.max_cases + 1)
    for count, row in enumerate(rows):
        if count >= budget.max_cases:
            complete = False
            break
        sigma = Substitution(source, target, tuple(row))
        if not holds(clone.subst(term, sigma)):
            return Membership(False, False, sigma)
    return Membership(True, not complete)


def substpred(clone: Clone, family: ClosedFamily, budget: Budget | None = None, name: str = "P‡") -> ClonePredicate:
    """P‡(Γ; A) = {t | t[σ] ∈ P(A) for every closing σ ∈ P(Γ)}; at Γ = ⋄ this is P itself."""
    budget = budget or default_budget()
    closed: dict[Sort, tuple[tuple, bool]] = {}

    def column(sort: Sort) -> tuple[tuple, bool]:
        if sort not in closed:
            closed[sort] = _members(clone, (), sort, family, budget)
        return closed[sort]

    def test(term: Hashable, context: Context, sort: Sort) -> Membership:
        if not context:
            return Membership(bool(family(term, sort)))
        columns = [column(entry) for entry in context]
        complete = all(done for _, done in columns)
        return _quantify(
            clone, term, (), context, [terms for terms, _ in columns], complete, lambda t: family(t, sort), budget
        )

    return ClonePredicate(clone, test, name)


def osubstpred(
    clone: Clone,
    family: OpenFamily,
    budget: Budget | None = None,
    sorts: Sequence[Sort] | None = None,
    name: str = "P°",
) -> ClonePredicate:
    """{t ∈ Y(Γ; A) | t[σ] ∈ P(Δ; A) for every Δ and every σ ∈ P(Δ; Γ)}, with Δ up to the context budget."""
    budget = budget or default_budget()
    pool = list(sorts) if sorts is not None else clone.sorts.sorts(budget.sort_height)
    deltas = list(enumerate_contexts(pool, budget.max_context))
    cache: dict[tuple[Context, Sort], tuple[tuple, bool]] = {}

    def column(delta: Context, sort: Sort) -> tuple[tuple, bool]:
        key = (delta, sort)
        if key not in cache:
            cache[key] = _members(clone, delta, sort, lambda t, s: family(t, delta, s), budget)
        return cache[key]

    def test(term: Hashable, context: Context, sort: Sort) -> Membership:
        approximate = False
        for delta in deltas:
            columns = [column(delta, entry) for entry in context]
            complete = all(done for _, done in columns)
            verdict = _quantify(
                clone,
                term,
                delta,
                context,
                [terms for terms, _ in columns],
                complete,
                lambda t: family(t, delta, sort),
                budget,
            )
            if not verdict.holds:
                return verdict
            approximate = approximate or verdict.approximate
        return Membership(True, approximate)

    return ClonePredicate(clone, test, name)
