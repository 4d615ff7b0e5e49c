"""Second-order signatures, terms with metavariables, substitution and metasubstitution.

Terms use level indices: a variable points at a position of the context read
left to right, and an operator argument with binder Δ sees the context extended
by Δ at its end. Metavariables are positions in the metacontext.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Hashable, Sequence

from clonekit.core.elaborate import Elaborator, OperatorShape, Slot
from clonekit.core.sorts import (
    Context,
    Sort,
    SortError,
    SortSet,
    arrow,
    format_context,
    instantiate_context,
    instantiate_sort,
    stlc_sorts,
)
from clonekit.core.terms import CloneApp, MetaApp, Op, Term, Var, instantiate_term, substitute, variables
from clonekit.presentations.first_order import PresentationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SoOperator:
    name: str
    slots: tuple[Slot, ...]
    output: Sort
    params: tuple[str, ...] = ()

    @property
    def shape(self) -> OperatorShape:
        return OperatorShape(self.name, self.params, self.slots, self.output)

    def arity(self, params: Sequence[Sort] = ()) -> tuple[tuple[Slot, ...], Sort]:
        if len(params) != len(self.params):
            raise SortError(f"Operator {self.name} takes {len(self.params)} sort parameters, got {len(params)}")
        binding = dict(zip(self.params, params))
        slots = tuple(Slot(instantiate_context(s.binder, binding), instantiate_sort(s.sort, binding)) for s in self.slots)
        return slots, instantiate_sort(self.output, binding)

    def __str__(self) -> str:
        head = f"{self.name}[{', '.join(self.params)}]" if self.params else self.name
        slots = ", ".join(f"({format_context(s.binder)}; {s.sort})" for s in self.slots)
        return f"{head} : ({slots}; {self.output})"


@dataclass(frozen=True)
class SoSignature:
    sorts: SortSet
    operators: tuple[SoOperator, ...] = ()

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for op in self.operators:
            if op.name in seen:
                raise PresentationError(f"Duplicate operator {op.name}")
            seen.add(op.name)
            scope = Elaborator(self.sorts, lambda _name: None, rigid=frozenset(op.params))
            sorts = [op.output] + [s.sort for s in op.slots] + [b for s in op.slots for b in s.binder]
            for sort in sorts:
                try:
                    scope.check_sort(sort, ())
                except SortError as exc:
                    raise PresentationError(f"Operator {op.name}: {exc}") from None

    def lookup(self, name: str) -> SoOperator | None:
        for op in self.operators:
            if op.name == name:
                return op
        return None

    def shape(self, name: str) -> OperatorShape | None:
        op = self.lookup(name)
        return op.shape if op is not None else None


@dataclass(frozen=True)
class MetaVar:
    name: str
    params: Context
    sort: Sort

    def __str__(self) -> str:
        return f"{self.name} : ({format_context(self.params)}; {self.sort})"


MetaContext = tuple[MetaVar, ...]


def meta_shapes(metas: MetaContext) -> tuple[tuple[Context, Sort], ...]:
    return tuple((m.params, m.sort) for m in metas)


def instantiate_metas(metas: MetaContext, binding: dict[str, Sort]) -> MetaContext:
    return tuple(MetaVar(m.name, instantiate_context(m.params, binding), instantiate_sort(m.sort, binding)) for m in metas)


@dataclass(frozen=True)
class SoEquation:
    name: str
    metas: MetaContext
    sort: Sort
    lhs: Term
    rhs: Term
    params: tuple[str, ...] = ()


def so_equation_instance(equation: SoEquation, params: Sequence[Sort] = ()) -> SoEquation:
    if len(params) != len(equation.params):
        raise PresentationError(
            f"Equation {equation.name} takes {len(equation.params)} sort parameters, got {len(params)}"
        )
    if not equation.params:
        return equation
    binding = dict(zip(equation.params, params))
    return SoEquation(
        equation.name,
        instantiate_metas(equation.metas, binding),
        instantiate_sort(equation.sort, binding),
        instantiate_term(equation.lhs, binding),
        instantiate_term(equation.rhs, binding),
    )


@dataclass(frozen=True)
class SoPresentation:
    name: str
    signature: SoSignature
    equations: tuple[SoEquation, ...] = ()

    def __post_init__(self) -> None:
        seen: set[str] = set()
        checked = []
        for eq in self.equations:
            if eq.name in seen:
                raise PresentationError(f"Duplicate equation {eq.name}")
            seen.add(eq.name)
            rigid = frozenset(eq.params)
            try:
                lhs, _ = so_check_term(self.signature, eq.metas, (), eq.lhs, eq.sort, rigid)
                rhs, _ = so_check_term(self.signature, eq.metas, (), eq.rhs, eq.sort, rigid)
            except SortError as exc:
                raise PresentationError(f"Equation {eq.name} is ill-sorted: {exc}") from None
            checked.append(SoEquation(eq.name, eq.metas, eq.sort, lhs, rhs, eq.params))
        object.__setattr__(self, "equations", tuple(checked))

    @property
    def sorts(self) -> SortSet:
        return self.signature.sorts

    def equation(self, name: str) -> SoEquation:
        for eq in self.equations:
            if eq.name == name:
                return eq
        raise PresentationError(f"No equation named {name} in {self.name}")


def so_elaborator(
    signature: SoSignature,
    metas: MetaContext = (),
    rigid: frozenset[str] = frozenset(),
    base: Callable[[str], OperatorShape | None] | None = None,
    generic: Callable[[OperatorShape, tuple[Sort, ...]], Hashable] | None = None,
) -> Elaborator:
    return Elaborator(signature.sorts, signature.shape, meta_shapes(metas), rigid, base, generic)


def so_check_term(
    signature: SoSignature,
    metas: MetaContext,
    context: Context,
    term: Term,
    expected: Sort | None = None,
    rigid: frozenset[str] = frozenset(),
) -> tuple[Term, Sort]:
    return so_elaborator(signature, metas, rigid).elaborate(term, context, expected)


def so_subst(term: Term, components: Sequence[Term], context_length: int) -> Term:
    """Substitute for the free variables of ``term``; the components live in a context of ``context_length``."""
    return substitute(term, components, context_length)


def so_metasubst(term: Term, instantiation: Sequence[Term], outer: int, inner: int = 0) -> Term:
    """Replace each metavariable M_j by ``instantiation[j-1]``.

    ``term`` lives in a context of length ``inner``; each instantiation lives in
    the outer context (length ``outer``) extended by its metavariable's
    parameters. The result lives in the outer context followed by the inner one.
    """

    def go(t: Term, length: int) -> Term:
        match t:
            case Var(index):
                return Var(outer + index)
            case MetaApp(meta, args):
                if meta < 1 or meta > len(instantiation):
                    raise SortError(f"No instantiation for metavariable ?{meta}")
                inner_args = tuple(go(arg, length) for arg in args)
                return substitute(instantiation[meta - 1], variables(outer) + inner_args, outer + length)
            case Op(name, args, params, binders):
                return Op(
                    name,
                    tuple(go(arg, length + len(t.binder(i))) for i, arg in enumerate(args)),
                    params,
                    binders,
                )
            case CloneApp(element, context, sort, args):
                return CloneApp(element, context, sort, tuple(go(arg, length) for arg in args))
        raise SortError(f"Unexpected term {t!r}")

    return go(term, inner)


def stlc_signature(sorts: SortSet | None = None) -> SoSignature:
    a, b = Sort("A"), Sort("B")
    return SoSignature(
        sorts or stlc_sorts(),
        (
            SoOperator("app", (Slot((), arrow(a, b)), Slot((), a)), b, ("A", "B")),
            SoOperator("abs", (Slot((a,), b),), arrow(a, b), ("A", "B")),
        ),
    )


def stlc_presentation(sorts: SortSet | None = None) -> SoPresentation:
    """Application and abstraction with the β and η laws."""
    a, b = Sort("A"), Sort("B")
    beta = SoEquation(
        "beta",
        (MetaVar("M", (a,), b), MetaVar("N", (), a)),
        b,
        Op("app", (Op("abs", (MetaApp(1, (Var(1),)),)), MetaApp(2))),
        MetaApp(1, (MetaApp(2),)),
        ("A", "B"),
    )
    eta = SoEquation(
        "eta",
        (MetaVar("M", (), arrow(a, b)),),
        arrow(a, b),
        Op("abs", (Op("app", (MetaApp(1), Var(1))),)),
        MetaApp(1),
        ("A", "B"),
    )
    return SoPresentation("stlc", stlc_signature(sorts), (beta, eta))
