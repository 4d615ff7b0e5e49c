from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import product
from typing import Iterator, Sequence

from clonekit.core.clones import CloneError
from clonekit.core.elaborate import Elaborator, OperatorShape, Slot
from clonekit.core.sorts import (
    Context,
    Sort,
    SortError,
    SortSet,
    format_context,
    instantiate_context,
    instantiate_sort,
    match_sort,
)
from clonekit.core.terms import Op, Term, Var, instantiate_term

logger = logging.getLogger(__name__)


class PresentationError(ValueError):
    pass


@dataclass(frozen=True)
class FoOperator:
    name: str
    inputs: Context
    output: Sort
    params: tuple[str, ...] = ()

    @property
    def shape(self) -> OperatorShape:
        return OperatorShape(self.name, self.params, tuple(Slot((), sort) for sort in self.inputs), self.output)

    def arity(self, params: Sequence[Sort] = ()) -> tuple[Context, Sort]:
        if len(params) != len(self.params):
            raise SortError(f"Operator {self.name} takes {len(self.params)} sort parameters, got {len(params)}")
        binding = dict(zip(self.params, params))
        return instantiate_context(self.inputs, binding), instantiate_sort(self.output, binding)

    def __str__(self) -> str:
        head = f"{self.name}[{', '.join(self.params)}]" if self.params else self.name
        return f"{head} : ({format_context(self.inputs)}; {self.output})"


@dataclass(frozen=True)
class FoSignature:
    sorts: SortSet
    operators: tuple[FoOperator, ...] = ()

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for op in self.operators:
            if op.name in seen:
                raise PresentationError(f"Duplicate operator {op.name}")
            seen.add(op.name)
            scope = Elaborator(self.sorts, lambda _name: None, rigid=frozenset(op.params))
            for sort in op.inputs + (op.output,):
                try:
                    scope.check_sort(sort, ())
                except SortError as exc:
                    raise PresentationError(f"Operator {op.name}: {exc}") from None

    def lookup(self, name: str) -> FoOperator | None:
        for op in self.operators:
            if op.name == name:
                return op
        return None

    def shape(self, name: str) -> OperatorShape | None:
        op = self.lookup(name)
        return op.shape if op is not None else None

    def elaborator(self, rigid: frozenset[str] = frozenset()) -> Elaborator:
        return Elaborator(self.sorts, self.shape, rigid=rigid)


@dataclass(frozen=True)
class FoEquation:
    name: str
    context: Context
    sort: Sort
    lhs: Term
    rhs: Term
    params: tuple[str, ...] = ()

    def instantiate(self, params: Sequence[Sort] = ()) -> FoEquation:
        if len(params) != len(self.params):
            raise PresentationError(
                f"Equation {self.name} takes {len(self.params)} sort parameters, got {len(params)}"
            )
        if not self.params:
            return self
        binding = dict(zip(self.params, params))
        return FoEquation(
            self.name,
            instantiate_context(self.context, binding),
            instantiate_sort(self.sort, binding),
            instantiate_term(self.lhs, binding),
            instantiate_term(self.rhs, binding),
        )


@dataclass(frozen=True)
class FoPresentation:
    name: str
    signature: FoSignature
    equations: tuple[FoEquation, ...] = ()

    def __post_init__(self) -> None:
        seen: set[str] = set()
        checked = []
        for eq in self.equations:
            if eq.name in seen:
                raise PresentationError(f"Duplicate equation {eq.name}")
            seen.add(eq.name)
            rigid = frozenset(eq.params)
            try:
                lhs, _ = fo_check(self.signature, eq.context, eq.lhs, eq.sort, rigid)
                rhs, _ = fo_check(self.signature, eq.context, eq.rhs, eq.sort, rigid)
            except SortError as exc:
                raise PresentationError(f"Equation {eq.name} is ill-sorted: {exc}") from None
            checked.append(FoEquation(eq.name, eq.context, eq.sort, lhs, rhs, eq.params))
        object.__setattr__(self, "equations", tuple(checked))

    @property
    def sorts(self) -> SortSet:
        return self.signature.sorts

    def equation(self, name: str) -> FoEquation:
        for eq in self.equations:
            if eq.name == name:
                return eq
        raise PresentationError(f"No equation named {name} in {self.name}")

    def has_equation(self, name: str) -> bool:
        return any(eq.name == name for eq in self.equations)


def fo_check(
    signature: FoSignature,
    context: Context,
    term: Term,
    expected: Sort | None = None,
    rigid: frozenset[str] = frozenset(),
) -> tuple[Term, Sort]:
    """Sort-check a first-order term, filling in the sort parameters of schema operators."""
    return signature.elaborator(rigid).elaborate(term, context, expected)


def fo_subst(term: Term, components: Sequence[Term]) -> Term:
    match term:
        case Var(index):
            if index < 1 or index > len(components):
                raise CloneError(f"No component for variable #{index}", index)
            return components[index - 1]
        case Op(name, args, params, binders):
            return Op(name, tuple(fo_subst(arg, components) for arg in args), params, binders)
    raise SortError(f"Not a first-order term: {term!r}")


def enumerate_fo_terms(
    signature: FoSignature, context: Context, sort: Sort, depth: int
) -> Iterator[Term]:
    """Every well-sorted term of depth at most ``depth``: variables first, then operators in declaration order."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    memo: dict[tuple[Sort, int], tuple[Term, ...]] = {}
    pool = signature.sorts.sorts(0)

    def instances(target: Sort) -> Iterator[tuple[FoOperator, tuple[Sort, ...], Context]]:
        for op in signature.operators:
            binding: dict[str, Sort] = {}
            if not match_sort(op.output, target, frozenset(op.params), binding):
                continue
            loose = [p for p in op.params if p not in binding]
            for extra in product(pool, repeat=len(loose)):
                full = {**binding, **dict(zip(loose, extra))}
                params = tuple(full[p] for p in op.params)
                yield op, params, op.arity(params)[0]

    def level(target: Sort, bound: int) -> Iterator[Term]:
        for index, entry in enumerate(context, start=1):
            if entry == target:
                yield Var(index)
        if bound == 0:
            return
        for op, params, inputs in instances(target):
            columns = [cached(arg, bound - 1) for arg in inputs]
            for args in product(*columns):
                yield Op(op.name, tuple(args), params)

    def cached(target: Sort, bound: int) -> tuple[Term, ...]:
        key = (target, bound)
        if key not in memo:
            memo[key] = tuple(level(target, bound))
            logger.debug("%s terms of sort %s up to depth %s", len(memo[key]), target, bound)
        return memo[key]

    yield from level(sort, depth)

