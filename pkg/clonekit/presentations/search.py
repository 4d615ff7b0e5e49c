from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import product
from typing import Iterator, Sequence

from clonekit.config import Budget, default_budget
from clonekit.core.search import meet_in_middle
from clonekit.core.sorts import Context, Sort, match_sort
from clonekit.core.terms import Term, Var, free_indices, term_size
from clonekit.presentations.derivations import AxiomInstance, FoDerivation, Sym, Trans, chain
from clonekit.presentations.first_order import FoEquation, FoPresentation, PresentationError, fo_check, fo_subst
from clonekit.presentations.rewrite import (
    RewriteRule,
    axiom_step,
    in_context,
    match,
    positions,
    replace_at,
    try_rule,
)

logger = logging.getLogger(__name__)

EQUAL = "equal"
UNKNOWN = "unknown"
# frontier terms are capped at SIZE_FACTOR * (larger endpoint) + SIZE_SLACK nodes
SIZE_FACTOR = 3
SIZE_SLACK = 6


@dataclass
class SearchResult:
    verdict: str
    derivation: FoDerivation | None
    expanded: int

    @property
    def found(self) -> bool:
        return self.verdict == EQUAL

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "expanded": self.expanded}


@dataclass(frozen=True)
class Expansion:
    """An orientation whose matched side leaves ``unbound`` variables to be chosen from the term at hand."""

    equation: FoEquation
    reversed: bool
    unbound: tuple[int, ...]

    @property
    def pattern(self) -> Term:
        return self.equation.rhs if self.reversed else self.equation.lhs


def search_rules(presentation: FoPresentation) -> tuple[RewriteRule, ...]:
    """Both orientations of every equation whose pattern side is a usable left-hand side."""
    rules = []
    for equation in presentation.equations:
        for reversed in (False, True):
            try:
                rules.append(RewriteRule.from_equation(equation, reversed))
            except PresentationError:
                logger.debug("Skipping %s orientation of %s", "reversed" if reversed else "forward", equation.name)
    return tuple(rules)


def search_expansions(presentation: FoPresentation) -> tuple[Expansion, ...]:
    """The orientations ``search_rules`` skips: a bare variable, or a side missing some variables."""
    found = []
    for equation in presentation.equations:
        width = len(equation.context)
        for reversed in (False, True):
            side = equation.rhs if reversed else equation.lhs
            unbound = tuple(sorted(set(range(1, width + 1)) - free_indices(side, width)))
            if isinstance(side, Var) or unbound:
                found.append(Expansion(equation, reversed, unbound))
    return tuple(found)


def subterm_pool(term: Term, context: Context) -> list[Term]:
    """Context variables and the distinct subterms of ``term``, in a fixed order."""
    pool: dict[Term, None] = {Var(i): None for i in range(1, len(context) + 1)}
    for _path, sub in positions(term, "outermost"):
        pool.setdefault(sub, None)
    return list(pool)


def successors(
    presentation: FoPresentation,
    context: Context,
    rules: Sequence[RewriteRule],
    expansions: Sequence[Expansion] = (),
):
    sorts: dict[Term, Sort] = {}
    memo: dict[Term, list[tuple[Term, FoDerivation]]] = {}

    def sort_of(term: Term) -> Sort:
        if term not in sorts:
            sorts[term] = fo_check(presentation.signature, context, term)[1]
        return sorts[term]

    def expand(expansion: Expansion, sub: Term, pool: list[Term]) -> Iterator[tuple[tuple[Term, ...], tuple[Sort, ...]]]:
        equation = expansion.equation
        params = frozenset(equation.params)
        binding: dict[str, Sort] = {}
        bound: dict[int, Term] = {}
        if not match(expansion.pattern, sub, params, binding, bound):
            return
        for index, found in bound.items():
            if not match_sort(equation.context[index - 1], sort_of(found), params, binding):
                return
        if any(p not in binding for p in equation.params):
            return
        sort_args = tuple(binding[p] for p in equation.params)
        instance = equation.instantiate(sort_args)
        choices = [[t for t in pool if sort_of(t) == instance.context[j - 1]] for j in expansion.unbound]
        for picked in product(*choices):
            filled = dict(bound)
            filled.update(zip(expansion.unbound, picked))
            yield tuple(filled[i] for i in range(1, len(equation.context) + 1)), sort_args

    def step(term: Term) -> list[tuple[Term, FoDerivation]]:
        if term in memo:
            return memo[term]
        found: list[tuple[Term, FoDerivation]] = []
        pool = subterm_pool(term, context) if expansions else []
        for path, sub in positions(term, "outermost"):
            for rule in rules:
                redex = try_rule(rule, sub)
                if redex is None:
                    continue
                proof = in_context(term, path, axiom_step(rule, redex.params, redex.components))
                found.append((replace_at(term, path, redex.result), proof))
            for expansion in expansions:
                equation = expansion.equation
                for components, sort_args in expand(expansion, sub, pool):
                    instance = equation.instantiate(sort_args)
                    target = fo_subst(instance.lhs if expansion.reversed else instance.rhs, components)
                    axiom: FoDerivation = AxiomInstance(equation.name, components, sort_args)
                    if expansion.reversed:
                        axiom = Sym(axiom)
                    found.append((replace_at(term, path, target), in_context(term, path, axiom)))
        memo[term] = found
        return found

    return step


def search_equal(
    presentation: FoPresentation,
    left: Term,
    right: Term,
    context: Context,
    sort: Sort | None = None,
    budget: Budget | None = None,
    lemmas: Sequence[RewriteRule] = (),
) -> SearchResult:
    """Bounded proof search; ``unknown`` means the node budget ran out, not that the terms differ.

    Steps are equation instances in both directions. Orientations that leave
    variables open draw them from the subterms of the current term. ``lemmas``
    are proof-backed rules (``RewriteRule.lemma``) used forwards as extra steps.
    """
    budget = budget or default_budget()
    left, found_sort = fo_check(presentation.signature, context, left, sort)
    right, _ = fo_check(presentation.signature, context, right, found_sort)
    rules = search_rules(presentation) + tuple(lemmas)
    cap = SIZE_FACTOR * max(term_size(left), term_size(right)) + SIZE_SLACK
    meeting = meet_in_middle(
        left,
        right,
        successors(presentation, context, rules, search_expansions(presentation)),
        term_size,
        budget.search_nodes,
        cap,
    )
    if not meeting.found:
        logger.info("Search for %s gave up after %s nodes", presentation.name, meeting.expanded)
        return SearchResult(UNKNOWN, None, meeting.expanded)
    forward = chain(meeting.left_steps, left)
    backward = chain(meeting.right_steps, right)
    if not meeting.right_steps:
        proof = forward
    elif not meeting.left_steps:
        proof = Sym(backward)
    else:
        proof = Trans(forward, Sym(backward))
    return SearchResult(EQUAL, proof, meeting.expanded)
