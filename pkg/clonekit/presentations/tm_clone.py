from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from typing import Protocol

from clonekit.config import Budget, default_budget
from clonekit.core.clones import Clone, Enumeration, Substitution
from clonekit.core.sorts import Context, Sort
from clonekit.core.terms import Term, Var
from clonekit.presentations.derivations import FoDerivation, Refl, Sym, Trans
from clonekit.presentations.first_order import FoPresentation, PresentationError, enumerate_fo_terms, fo_check, fo_subst
from clonekit.presentations.rewrite import RewriteSystem, rewrite_normalize
from clonekit.presentations.search import search_equal

logger = logging.getLogger(__name__)

ENUMERATION_DEPTH = 2


class Completion(Protocol):
    """Post-processing of rewrite normal forms into canonical representatives."""

    def canonical(self, term: Term) -> Term: ...

    def derive(self, term: Term) -> tuple[Term, FoDerivation]: ...


class EqualityStrategy(ABC):
    tier: str = ""

    def bind(self, presentation: FoPresentation) -> None:
        pass

    @property
    def decides(self) -> bool:
        return True

    @abstractmethod
    def canonical(self, term: Term, context: Context, sort: Sort) -> Term: ...

    def equal(self, left: Term, right: Term, context: Context, sort: Sort) -> bool:
        return self.canonical(left, context, sort) == self.canonical(right, context, sort)

    @abstractmethod
    def witness(self, left: Term, right: Term, context: Context, sort: Sort) -> FoDerivation | None: ...


class StructuralEquality(EqualityStrategy):
    tier = "structural"

    def bind(self, presentation: FoPresentation) -> None:
        if presentation.equations:
            raise PresentationError(
                f"Structural equality needs an equation-free presentation; {presentation.name} has "
                f"{len(presentation.equations)} equations"
            )

    def canonical(self, term: Term, context: Context, sort: Sort) -> Term:
        return term

    def witness(self, left: Term, right: Term, context: Context, sort: Sort) -> FoDerivation | None:
        return Refl(left) if left == right else None


class RewriteEquality(EqualityStrategy):
    tier = "rewrite"

    def __init__(self, system: RewriteSystem, completion: Completion | None = None, budget: Budget | None = None) -> None:
        self.system = system
        self.completion = completion
        self.budget = budget

    def bind(self, presentation: FoPresentation) -> None:
        own = self.system.presentation
        if own is presentation:
            return
        if own.name != presentation.name or own.equations != presentation.equations:
            raise PresentationError(
                f"Rewrite rules are drawn from {own.name}, not from the equations of {presentation.name}"
            )

    def canonical(self, term: Term, context: Context, sort: Sort) -> Term:
        normal = rewrite_normalize(self.system, term, self.budget, witness=False).term
        if self.completion is not None:
            return self.completion.canonical(normal)
        return normal

    def derive(self, term: Term) -> tuple[Term, FoDerivation]:
        result = rewrite_normalize(self.system, term, self.budget)
        proof = result.derivation
        if self.completion is None:
            return result.term, proof
        canonical, completed = self.completion.derive(result.term)
        return canonical, Trans(proof, completed)

    def witness(self, left: Term, right: Term, context: Context, sort: Sort) -> FoDerivation | None:
        left_form, left_proof = self.derive(left)
        right_form, right_proof = self.derive(right)
        if left_form != right_form:
            return None
        return Trans(left_proof, Sym(right_proof))


class SearchEquality(EqualityStrategy):
    tier = "bounded-search"

    def __init__(self, budget: Budget | None = None) -> None:
        self.budget = budget
        self.presentation: FoPresentation | None = None

    def bind(self, presentation: FoPresentation) -> None:
        self.presentation = presentation

    @property
    def decides(self) -> bool:
        return False

    def canonical(self, term: Term, context: Context, sort: Sort) -> Term:
        return term

    def equal(self, left: Term, right: Term, context: Context, sort: Sort) -> bool:
        return left == right or self.witness(left, right, context, sort) is not None

    def witness(self, left: Term, right: Term, context: Context, sort: Sort) -> FoDerivation | None:
        if self.presentation is None:
            raise PresentationError("Search strategy is not bound to a presentation")
        return search_equal(self.presentation, left, right, context, sort, self.budget).derivation


class TmClone(Clone):
    """The clone presented by a first-order presentation, with equality decided by a strategy."""

    def __init__(self, presentation: FoPresentation, strategy: EqualityStrategy, depth: int = ENUMERATION_DEPTH) -> None:
        super().__init__(presentation.sorts)
        strategy.bind(presentation)
        self.presentation = presentation
        self.strategy = strategy
        self.depth = depth
        self.name = f"Tm[{presentation.name}]"

    def var(self, context: Context, index: int) -> Var:
        self._check_index(context, index)
        return Var(index)

    def subst(self, term: Term, sigma: Substitution) -> Term:
        return fo_subst(term, sigma.components)

    def check(self, term: Term, context: Context, sort: Sort | None = None) -> tuple[Term, Sort]:
        return fo_check(self.presentation.signature, context, term, sort)

    def canonical(self, term: Term, context: Context, sort: Sort) -> Term:
        return self.strategy.canonical(term, context, sort)

    def equal(self, left: Term, right: Term, context: Context, sort: Sort) -> bool:
        return self.strategy.equal(left, right, context, sort)

    def witness(self, left: Term, right: Term, context: Context, sort: Sort) -> FoDerivation | None:
        return self.strategy.witness(left, right, context, sort)

    def enumerate(self, context: Context, sort: Sort, budget: Budget | None = None) -> Enumeration:
        budget = budget or default_budget()
        depth = min(self.depth, budget.max_depth)
        if not self.strategy.decides:
            found = tuple(enumerate_fo_terms(self.presentation.signature, context, sort, depth))
            if len(found) > budget.max_terms:
                return Enumeration(found[: budget.max_terms], False)
            return Enumeration(found, True)
        seen: dict[Term, None] = {}
        for term in enumerate_fo_terms(self.presentation.signature, context, sort, depth):
            key = self.canonical(term, context, sort)
            if key in seen:
                continue
            if len(seen) >= budget.max_terms:
                logger.warning("Enumeration of %s at %s truncated at %s classes", self.name, sort, budget.max_terms)
                return Enumeration(tuple(seen), False)
            seen[key] = None
        return Enumeration(tuple(seen), True)


def tm_clone(presentation: FoPresentation, strategy: EqualityStrategy, depth: int = ENUMERATION_DEPTH) -> TmClone:
    return TmClone(presentation, strategy, depth)
