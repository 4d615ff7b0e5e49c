from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import islice, product
from typing import Callable, Hashable, Iterator, Sequence

from clonekit.config import Budget, default_budget
from clonekit.core.clones import (
    Clone,
    CloneHom,
    ProductClone,
    Substitution,
    TerminalClone,
    TOP,
    lift_subst,
)
from clonekit.core.elaborate import Slot
from clonekit.core.laws import LawReport, law_contexts, render, run_law, sample_cases
from clonekit.core.sorts import Context, Sort, format_context
from clonekit.core.terms import CloneApp, MetaApp, Op, Term, Var
from clonekit.presentations.first_order import PresentationError
from clonekit.second_order.syntax import SoEquation, SoOperator, SoPresentation, so_equation_instance

logger = logging.getLogger(__name__)

Interpretation = Callable[[str, tuple[Sort, ...], Context, tuple], Hashable]


@dataclass(frozen=True)
class Algebra:
    """A clone with an interpretation ⟦o⟧_Γ for every operator instance.

    ``operations(name, params, context, args)`` receives one argument per slot,
    each living in ``context`` extended by that slot's binder.
    """

    clone: Clone
    presentation: SoPresentation
    operations: Interpretation
    name: str = "algebra"

    def interpret(self, name: str, params: tuple[Sort, ...], context: Context, args: tuple) -> Hashable:
        return self.operations(name, params, context, args)


def interpret_term(
    algebra: Algebra,
    term: Term,
    context: Context,
    sigma: Sequence[Hashable],
    metas: Sequence[tuple[Context, Sort]] = (),
    inner: Context = (),
) -> Hashable:
    """⟦term⟧ at ``context`` with metavariable M_i read as ``sigma[i-1]`` ∈ X(Γ, Δ_i; A_i).

    ``inner`` is the term's own variable context Ξ; the result lives in Γ, Ξ.
    """
    clone = algebra.clone
    n = len(context)

    def go(t: Term, local: Context) -> Hashable:
        here = context + local
        match t:
            case Var(index):
                return clone.var(here, n + index)
            case MetaApp(meta, args):
                params, _sort = metas[meta - 1]
                values = tuple(go(arg, local) for arg in args)
                padding = tuple(clone.var(here, i) for i in range(1, n + 1))
                return clone.subst(sigma[meta - 1], Substitution(here, context + params, padding + values))
            case Op(name, args, params, _binders):
                bodies = tuple(go(arg, local + t.binder(i)) for i, arg in enumerate(args))
                return algebra.interpret(name, params, here, bodies)
            case CloneApp():
                raise PresentationError("Clone applications have no meaning in an arbitrary algebra")
        raise TypeError(f"Unexpected term {t!r}")

    return go(term, inner)


def operator_instances(presentation: SoPresentation, pool: Sequence[Sort]) -> Iterator[tuple[SoOperator, tuple[Sort, ...], tuple[Slot, ...], Sort]]:
    for op in presentation.signature.operators:
        for params in product(pool, repeat=len(op.params)):
            slots, output = op.arity(params)
            yield op, tuple(params), slots, output


def equation_instances(presentation: SoPresentation, pool: Sequence[Sort]) -> Iterator[SoEquation]:
    for eq in presentation.equations:
        for params in product(pool, repeat=len(eq.params)):
            yield so_equation_instance(eq, params)


def _tuples(clone: Clone, contexts: Sequence[Context], sorts: Sequence[Sort], budget: Budget, exhaustive: list[bool]) -> Iterator[tuple]:
    columns = []
    for ctx, sort in zip(contexts, sorts):
        found = clone.enumerate(ctx, sort, budget)
        exhaustive.append(found.exhaustive)
        columns.append(found.terms)
    limited = islice(product(*columns), budget.max_terms + 1)
    for count, row in enumerate(limited):
        if count >= budget.max_terms:
            exhaustive.append(False)
            return
        yield row


def check_algebra(algebra: Algebra, presentation: SoPresentation | None = None, budget: Budget | None = None, sorts: list[Sort] | None = None) -> LawReport:
    """Substitution commutation for every operator and validity of every equation, on enumerated instances."""
    budget = budget or default_budget()
    presentation = presentation or algebra.presentation
    clone = algebra.clone
    pool = sorts if sorts is not None else clone.sorts.sorts(budget.sort_height)
    contexts = law_contexts(clone, budget, pool)
    exhaustive: list[bool] = []

    def commutation_cases() -> Iterator:
        for op, params, slots, output in operator_instances(presentation, pool):
            for delta in contexts:
                arg_contexts = [delta + s.binder for s in slots]
                for args in _tuples(clone, arg_contexts, [s.sort for s in slots], budget, exhaustive):
                    for gamma in contexts:
                        subs = _tuples(clone, [gamma] * len(delta), list(delta), budget, exhaustive)
                        for row in subs:
                            yield op.name, params, slots, output, args, Substitution(gamma, delta, row)

    def commutation(case) -> dict | None:
        name, params, slots, output, args, sigma = case
        left = clone.subst(algebra.interpret(name, params, sigma.target, args), sigma)
        lifted = tuple(clone.subst(a, lift_subst(clone, sigma, s.binder)) for a, s in zip(args, slots))
        right = algebra.interpret(name, params, sigma.source, lifted)
        if clone.equal(left, right, sigma.source, output):
            return None
        return {
            "operator": name,
            "params": [str(p) for p in params],
            "args": [render(a) for a in args],
            "sigma": render(sigma),
            "interpret_then_subst": render(left),
            "subst_then_interpret": render(right),
        }

    def equation_cases() -> Iterator:
        for eq in equation_instances(presentation, pool):
            for gamma in contexts:
                arg_contexts = [gamma + m.params for m in eq.metas]
                for row in _tuples(clone, arg_contexts, [m.sort for m in eq.metas], budget, exhaustive):
                    yield eq, gamma, row

    def equation(case) -> dict | None:
        eq, gamma, row = case
        shapes = tuple((m.params, m.sort) for m in eq.metas)
        left = interpret_term(algebra, eq.lhs, gamma, row, shapes)
        right = interpret_term(algebra, eq.rhs, gamma, row, shapes)
        if clone.equal(left, right, gamma, eq.sort):
            return None
        return {
            "equation": eq.name,
            "sort": str(eq.sort),
            "context": format_context(gamma),
            "instantiation": [render(r) for r in row],
            "lhs": render(left),
            "rhs": render(right),
        }

    report = LawReport(subject=f"{algebra.name} ⊨ {presentation.name}", budget=budget)
    report.results.append(run_law("⟦o⟧(t)[σ] = ⟦o⟧(t[lift σ])", commutation_cases(), commutation, budget, exhaustive))
    report.results.append(run_law("⟦lhs⟧ = ⟦rhs⟧", equation_cases(), equation, budget, exhaustive))
    return report


def _require_same(left: Algebra, right: Algebra) -> None:
    if left.presentation is not right.presentation and left.presentation != right.presentation:
        raise PresentationError(
            f"Algebras for {left.presentation.name} and {right.presentation.name} cannot be combined"
        )


def algebra_product(left: Algebra, right: Algebra) -> Algebra:
    _require_same(left, right)

    def operations(name: str, params: tuple[Sort, ...], context: Context, args: tuple) -> tuple:
        return (
            left.interpret(name, params, context, tuple(a[0] for a in args)),
            right.interpret(name, params, context, tuple(a[1] for a in args)),
        )

    return Algebra(ProductClone(left.clone, right.clone), left.presentation, operations, f"{left.name} × {right.name}")


def algebra_terminal(presentation: SoPresentation) -> Algebra:
    return Algebra(TerminalClone(presentation.sorts), presentation, lambda *_: TOP, "1")


def check_algebra_hom(
    hom: CloneHom,
    source: Algebra,
    target: Algebra,
    budget: Budget | None = None,
    sorts: list[Sort] | None = None,
) -> LawReport:
    """Operator preservation h(⟦o⟧(t)) = ⟦o⟧(h(t)); past ``max_cases`` the arguments are a seeded sample."""
    budget = budget or default_budget()
    _require_same(source, target)
    pool = sorts if sorts is not None else source.clone.sorts.sorts(budget.sort_height)
    contexts = law_contexts(source.clone, budget, pool)
    exhaustive: list[bool] = []

    def cases() -> Iterator:
        for op, params, slots, output in operator_instances(source.presentation, pool):
            for gamma in contexts:
                arg_contexts = [gamma + s.binder for s in slots]
                for args in _tuples(source.clone, arg_contexts, [s.sort for s in slots], budget, exhaustive):
                    yield op.name, params, slots, output, gamma, args

    def preserved(case) -> dict | None:
        name, params, slots, output, gamma, args = case
        left = hom(source.interpret(name, params, gamma, args), gamma, output)
        images = tuple(hom(a, gamma + s.binder, s.sort) for a, s in zip(args, slots))
        right = target.interpret(name, params, gamma, images)
        if target.clone.equal(left, right, gamma, output):
            return None
        return {"operator": name, "args": [render(a) for a in args], "image": render(left), "expected": render(right)}

    report = LawReport(subject=f"{hom.name} : {source.name} → {target.name}", budget=budget)
    sampled = sample_cases(cases(), budget, exhaustive)
    report.results.append(run_law("h(⟦o⟧(t)) = ⟦o⟧(h(t))", iter(sampled), preserved, budget, exhaustive))
    return report

