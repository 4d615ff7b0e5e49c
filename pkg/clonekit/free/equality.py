from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Callable

from clonekit.config import Budget
from clonekit.core.sorts import Context, Sort
from clonekit.core.terms import Term, show
from clonekit.free.derivations import FreeDerivation, check_free_derivation, free_derivation_to_dict
from clonekit.free.search import EQUAL, UNKNOWN, search_free_equal
from clonekit.free.terms import free_check_term, free_term_eq
from clonekit.presentations.derivations import Refl, Sym, Trans

if TYPE_CHECKING:
    from clonekit.free.algebra import FreeAlgebraClone

logger = logging.getLogger(__name__)

NOT_EQUAL = "not-equal"

Normalizer = Callable[["FreeAlgebraClone", Term, Context, Sort], Term]
Deriver = Callable[["FreeAlgebraClone", Term, Context, Sort], tuple[Term, FreeDerivation]]
Separator = Callable[["FreeAlgebraClone", Term, Term, Context, Sort], dict | None]


class FreeEquality(ABC):
    tier: str = ""

    def bind(self, free: FreeAlgebraClone) -> None:
        self.free = free

    @property
    def decides(self) -> bool:
        return True

    @abstractmethod
    def canonical(self, term: Term, context: Context, sort: Sort) -> Term: ...

    def equal(self, left: Term, right: Term, context: Context, sort: Sort) -> bool:
        return self.canonical(left, context, sort) == self.canonical(right, context, sort)

    @abstractmethod
    def witness(self, left: Term, right: Term, context: Context, sort: Sort) -> FreeDerivation | None: ...


class NormalizerEquality(FreeEquality):
    """Equality of normal forms; ``derive`` additionally proves ``t ≈ normal(t)``."""

    tier = "normalizer"

    def __init__(self, normalize: Normalizer, derive: Deriver | None = None, separate: Separator | None = None) -> None:
        self.normalize = normalize
        self.derive = derive
        self.separate = separate

    def canonical(self, term: Term, context: Context, sort: Sort) -> Term:
        return self.normalize(self.free, term, context, sort)

    def witness(self, left: Term, right: Term, context: Context, sort: Sort) -> FreeDerivation | None:
        if self.derive is None:
            return None
        left_form, left_proof = self.derive(self.free, left, context, sort)
        right_form, right_proof = self.derive(self.free, right, context, sort)
        if left_form != right_form:
            return None
        return Trans(left_proof, Sym(right_proof))


class SearchFreeEquality(FreeEquality):
    tier = "bounded-search"

    def __init__(self, budget: Budget | None = None) -> None:
        self.budget = budget

    @property
    def decides(self) -> bool:
        return False

    def canonical(self, term: Term, context: Context, sort: Sort) -> Term:
        return term

    def equal(self, left: Term, right: Term, context: Context, sort: Sort) -> bool:
        return left == right or self.witness(left, right, context, sort) is not None

    def witness(self, left: Term, right: Term, context: Context, sort: Sort) -> FreeDerivation | None:
        return search_free_equal(self.free, left, right, context, sort, self.budget).derivation


@dataclass
class EqualityVerdict:
    verdict: str
    tier: str
    witness: FreeDerivation | None = None
    normal_forms: tuple[Term, Term] | None = None
    certificate: dict | None = None
    checked: bool | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self, witness: bool = False) -> dict:
        data: dict = {"verdict": self.verdict, "tier": self.tier}
        if self.normal_forms is not None:
            data["normal_forms"] = [show(t) for t in self.normal_forms]
        if self.certificate is not None:
            data["certificate"] = self.certificate
        if self.checked is not None:
            data["witness_checked"] = self.checked
        if witness and self.witness is not None:
            data["witness"] = free_derivation_to_dict(self.witness)
        data.update(self.extra)
        return data


def free_equal(
    free: FreeAlgebraClone,
    left: Term,
    right: Term,
    context: Context = (),
    sort: Sort | None = None,
    budget: Budget | None = None,
) -> EqualityVerdict:
    """Decide ``left ≈ right`` with the registered strategy; every witness is replayed before it is returned."""
    strategy = free.equality
    signature = free.presentation.signature
    left, sort = free_check_term(free.base, signature, context, left, sort)
    right, _ = free_check_term(free.base, signature, context, right, sort)
    if free_term_eq(free.base, left, right):
        return EqualityVerdict(EQUAL, strategy.tier, Refl(left), checked=True)

    if isinstance(strategy, NormalizerEquality):
        forms = (strategy.canonical(left, context, sort), strategy.canonical(right, context, sort))
        if forms[0] != forms[1]:
            certificate = strategy.separate(free, left, right, context, sort) if strategy.separate else None
            if certificate is None:
                logger.info("No separating model for %s and %s", show(left), show(right))
            return EqualityVerdict(
                NOT_EQUAL, strategy.tier, normal_forms=forms, certificate=certificate,
                extra={"certified": certificate is not None},
            )
        proof = strategy.witness(left, right, context, sort)
        verdict = EqualityVerdict(EQUAL, strategy.tier, proof, forms)
    else:
        found = search_free_equal(free, left, right, context, sort, budget or getattr(strategy, "budget", None))
        verdict = EqualityVerdict(found.verdict, strategy.tier, found.derivation, extra={"expanded": found.expanded})
        if found.verdict == UNKNOWN:
            return verdict

    if verdict.witness is not None:
        replay = check_free_derivation(free, verdict.witness, context, left, right)
        verdict.checked = replay.accepted
        if not replay.accepted:
            logger.error("Witness for %s ≈ %s failed to replay: %s", show(left), show(right), replay.reason)
    return verdict
