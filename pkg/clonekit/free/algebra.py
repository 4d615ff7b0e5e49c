"""The free algebra F X on a base clone X, its unit η and the fold f†."""
from __future__ import annotations

import logging
from typing import Hashable

from clonekit.config import Budget, default_budget
from clonekit.core.clones import Clone, CloneError, CloneHom, Enumeration, Substitution, VarClone
from clonekit.core.sorts import Context, Sort
from clonekit.core.terms import CloneApp, Op, Term, Var, variables
from clonekit.free.base import BaseAdapter, base_adapter
from clonekit.free.derivations import FreeDerivation
from clonekit.free.equality import FreeEquality, SearchFreeEquality
from clonekit.free.terms import enumerate_free_terms, free_check_term, free_subst
from clonekit.second_order.algebra import Algebra
from clonekit.second_order.syntax import SoPresentation

logger = logging.getLogger(__name__)

ENUMERATION_SIZE = 4


class FreeAlgebraClone(Clone):
    """Free terms over X modulo ≈, with representatives chosen by an equality strategy."""

    def __init__(
        self,
        base: Clone | BaseAdapter,
        presentation: SoPresentation,
        equality: FreeEquality | None = None,
        size: int = ENUMERATION_SIZE,
    ) -> None:
        super().__init__(presentation.sorts)
        self.base = base_adapter(base)
        if self.base.clone.sorts != presentation.sorts:
            raise CloneError(
                f"Base clone {self.base.name} is over {self.base.clone.sorts.name}, "
                f"{presentation.name} over {presentation.sorts.name}"
            )
        self.presentation = presentation
        self.equality = equality or SearchFreeEquality()
        self.equality.bind(self)
        self.size = size
        self.name = f"F[{presentation.name}]({self.base.name})"

    def var(self, context: Context, index: int) -> Var:
        self._check_index(context, index)
        return Var(index)

    def subst(self, term: Term, sigma: Substitution) -> Term:
        return free_subst(term, sigma.components, len(sigma.source))

    def check(self, term: Term, context: Context, sort: Sort | None = None) -> tuple[Term, Sort]:
        return free_check_term(self.base, self.presentation.signature, context, term, sort)

    def canonical(self, term: Term, context: Context, sort: Sort) -> Term:
        return self.equality.canonical(term, context, sort)

    def equal(self, left: Term, right: Term, context: Context, sort: Sort) -> bool:
        return self.equality.equal(left, right, context, sort)

    def witness(self, left: Term, right: Term, context: Context, sort: Sort) -> FreeDerivation | None:
        return self.equality.witness(left, right, context, sort)

    def operation(self, name: str, params: tuple[Sort, ...], context: Context, args: tuple) -> Op:
        op = self.presentation.signature.lookup(name)
        if op is None:
            raise CloneError(f"{self.presentation.name} has no operator {name}")
        slots, _ = op.arity(params)
        binders = tuple(slot.binder for slot in slots) if op.shape.binds else ()
        return Op(name, tuple(args), tuple(params), binders)

    def enumerate(self, context: Context, sort: Sort, budget: Budget | None = None) -> Enumeration:
        budget = budget or default_budget()
        bound = min(self.size, budget.max_size)
        pool = self.sorts.sorts(budget.sort_height)
        terms = enumerate_free_terms(self.base, self.presentation.signature, context, sort, bound, pool)
        seen: dict[Term, None] = {}
        for term in terms:
            key = self.canonical(term, context, sort) if self.equality.decides else term
            if key in seen:
                continue
            if len(seen) >= budget.max_terms:
                logger.warning("Enumeration of %s at %s truncated at %s terms", self.name, sort, budget.max_terms)
                return Enumeration(tuple(seen), False)
            seen[key] = None
        return Enumeration(tuple(seen), True)

    def algebra(self) -> Algebra:
        return Algebra(self, self.presentation, self.operation, self.name)


def free_algebra(base: Clone | BaseAdapter, presentation: SoPresentation, equality: FreeEquality | None = None) -> FreeAlgebraClone:
    return FreeAlgebraClone(base, presentation, equality)


def initial_algebra(presentation: SoPresentation, equality: FreeEquality | None = None) -> FreeAlgebraClone:
    """The free algebra on Var_S."""
    return FreeAlgebraClone(VarClone(presentation.sorts), presentation, equality)


def unit_hom(free: FreeAlgebraClone) -> CloneHom:
    """η(t) = t(x1, ..., xn)."""
    return CloneHom(
        free.base.clone,
        free,
        lambda t, ctx, sort: CloneApp(t, ctx, sort, variables(len(ctx))),
        "η",
    )


def fold_hom(free: FreeAlgebraClone, target: Algebra, f: CloneHom) -> CloneHom:
    """The algebra homomorphism f† : F X → target with f† ∘ η = f."""
    clone = target.clone
    if clone.sorts != free.sorts:
        raise CloneError(f"Cannot fold {free.name} into an algebra over {clone.sorts.name}")
    if f.target is not clone:
        raise CloneError(f"{f.name} does not land in the carrier of {target.name}")
    signature = free.presentation.signature

    def go(term: Term, context: Context, sort: Sort) -> Hashable:
        match term:
            case Var(index):
                return clone.var(context, index)
            case CloneApp(element, element_context, element_sort, args):
                images = tuple(go(arg, context, entry) for arg, entry in zip(args, element_context))
                return clone.subst(f(element, element_context, element_sort), Substitution(context, element_context, images))
            case Op(name, args, params):
                slots, _ = signature.lookup(name).arity(params)
                bodies = tuple(go(arg, context + slot.binder, slot.sort) for arg, slot in zip(args, slots))
                return target.interpret(name, params, context, bodies)
        raise CloneError(f"Cannot fold {term!r}")

    return CloneHom(free, clone, go, f"{f.name}†")
