"""Free terms over a base clone: checking, substitution, comparison and enumeration.

A free term is a variable, a base-clone element applied to arguments
(``CloneApp``), or a second-order operator with its bodies. Variables are
levels, so a body under a binder sees the enclosing context followed by the
binder.
"""
from __future__ import annotations

import logging
from itertools import product
from typing import Iterator, Sequence

from clonekit.core.codec import term_from_json, term_to_json
from clonekit.core.sorts import Context, Sort, SortError, match_sort
from clonekit.core.terms import CloneApp, MetaApp, Op, Term, Var, substitute, term_size
from clonekit.free.base import BaseAdapter
from clonekit.second_order.syntax import SoSignature, so_elaborator

logger = logging.getLogger(__name__)


def _check_elements(base: BaseAdapter, term: Term, path: tuple[int, ...] = ()) -> None:
    match term:
        case Var():
            return
        case CloneApp(element, context, sort, args):
            if not base.member(element, context, sort):
                raise SortError(f"{element!r} is not an element of {base.name} at ({context}; {sort})", path)
            for i, arg in enumerate(args, start=1):
                _check_elements(base, arg, path + (i,))
        case Op(args=args):
            for i, arg in enumerate(args, start=1):
                _check_elements(base, arg, path + (i,))
        case MetaApp():
            raise SortError("Free terms have no metavariables", path)


def free_check_term(
    base: BaseAdapter,
    signature: SoSignature,
    context: Context,
    term: Term,
    expected: Sort | None = None,
) -> tuple[Term, Sort]:
    """Elaborate ``term`` against the variable, clone-application and operator rules.

    Base operators written as ordinary operators become applications of the
    base clone's generic element for that operator.
    """
    elaborator = so_elaborator(signature, base=base.shape, generic=base.generic)
    checked, sort = elaborator.elaborate(term, context, expected)
    _check_elements(base, checked)
    return checked, sort


def free_subst(term: Term, components: Sequence[Term], context_length: int) -> Term:
    return substitute(term, components, context_length)


def free_term_size(term: Term) -> int:
    return term_size(term)


def free_term_eq(base: BaseAdapter, left: Term, right: Term) -> bool:
    """Syntactic equality up to equality of base-clone elements."""
    if left == right:
        return True
    match left, right:
        case CloneApp(f, ctx, sort, args), CloneApp(g, ctx2, sort2, args2):
            return (
                ctx == ctx2
                and sort == sort2
                and len(args) == len(args2)
                and all(free_term_eq(base, a, b) for a, b in zip(args, args2))
                and base.equal(f, g, ctx, sort)
            )
        case Op(name, args, params, binders), Op(name2, args2, params2, binders2):
            return (
                name == name2
                and params == params2
                and binders == binders2
                and len(args) == len(args2)
                and all(free_term_eq(base, a, b) for a, b in zip(args, args2))
            )
    return False


def free_term_to_dict(term: Term) -> dict:
    return term_to_json(term)


def free_term_from_dict(data: dict) -> Term:
    return term_from_json(data)


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


class FreeTermEnumerator:
    """Terms of exactly a given size, memoized per (context, sort, size).

    Sort parameters fixed by the result sort are read off it; the others range
    over ``pool``. Variables come first, then base operators, then the
    signature's operators, each in declaration order.
    """

    def __init__(self, base: BaseAdapter, signature: SoSignature, pool: Sequence[Sort]) -> None:
        self.base = base
        self.signature = signature
        self.pool = tuple(pool)
        self.memo: dict[tuple[Context, Sort, int], tuple[Term, ...]] = {}

    def _instances(self, name_params: tuple[str, ...], output: Sort, sort: Sort) -> Iterator[dict[str, Sort]]:
        binding: dict[str, Sort] = {}
        if not match_sort(output, sort, frozenset(name_params), binding):
            return
        loose = [p for p in name_params if p not in binding]
        for choice in product(self.pool, repeat=len(loose)):
            yield {**binding, **dict(zip(loose, choice))}

    def _fill(self, contexts: Sequence[Context], sorts: Sequence[Sort], size: int) -> Iterator[tuple[Term, ...]]:
        for sizes in _compositions(size, len(sorts)):
            columns = [self.of_size(ctx, s, n) for ctx, s, n in zip(contexts, sorts, sizes)]
            if any(not column for column in columns):
                continue
            yield from product(*columns)

    def of_size(self, context: Context, sort: Sort, size: int) -> tuple[Term, ...]:
        key = (context, sort, size)
        if key in self.memo:
            return self.memo[key]
        found: list[Term] = []
        if size == 1:
            found.extend(Var(i) for i, entry in enumerate(context, start=1) if entry == sort)
        if size >= 1 and self.base.signature is not None:
            for op in self.base.signature.operators:
                for binding in self._instances(op.params, op.output, sort):
                    params = tuple(binding[p] for p in op.params)
                    inputs, _output = op.arity(params)
                    element = self.base.generic(op.shape, params)
                    for args in self._fill([context] * len(inputs), inputs, size - 1):
                        found.append(CloneApp(element, inputs, sort, args))
        if size >= 1:
            for op in self.signature.operators:
                for binding in self._instances(op.params, op.output, sort):
                    params = tuple(binding[p] for p in op.params)
                    slots, _output = op.arity(params)
                    binders = tuple(slot.binder for slot in slots) if op.shape.binds else ()
                    contexts = [context + slot.binder for slot in slots]
                    for args in self._fill(contexts, [slot.sort for slot in slots], size - 1):
                        found.append(Op(op.name, args, params, binders))
        self.memo[key] = tuple(found)
        return self.memo[key]

    def up_to(self, context: Context, sort: Sort, bound: int) -> Iterator[Term]:
        for size in range(1, bound + 1):
            yield from self.of_size(context, sort, size)


def enumerate_free_terms(
    base: BaseAdapter,
    signature: SoSignature,
    context: Context,
    sort: Sort,
    bound: int,
    pool: Sequence[Sort],
) -> Iterator[Term]:
    """All well-sorted free terms of size at most ``bound``, smallest first, without duplicates."""
    if bound < 0:
        raise ValueError(f"Size bound must be non-negative, got {bound}")
    return FreeTermEnumerator(base, signature, pool).up_to(context, sort, bound)
