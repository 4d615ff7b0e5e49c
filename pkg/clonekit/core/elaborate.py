"""Bidirectional sort checking shared by first-order, second-order and free terms.

Operators may be schemas over sort parameters (``ite[A]``, ``app[A, B]``); the
parameters are recovered by matching argument and result sorts. Arguments whose
binder sorts are still unknown are deferred until another argument fixes them.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Hashable

from clonekit.core.sorts import (
    Context,
    Sort,
    SortError,
    SortSet,
    format_context,
    instantiate_context,
    instantiate_sort,
    lookup,
)
from clonekit.core.terms import CloneApp, MetaApp, Op, Term, Var

HOLE = Sort("?")


class Underdetermined(SortError):
    pass


@dataclass(frozen=True)
class Slot:
    binder: Context
    sort: Sort


@dataclass(frozen=True)
class OperatorShape:
    name: str
    params: tuple[str, ...]
    slots: tuple[Slot, ...]
    output: Sort

    @property
    def binds(self) -> bool:
        return any(slot.binder for slot in self.slots)


def has_hole(sort: Sort) -> bool:
    if sort == HOLE:
        return True
    return any(has_hole(arg) for arg in sort.args)


def compatible(left: Sort, right: Sort) -> bool:
    if left == HOLE or right == HOLE:
        return True
    if left.name != right.name or len(left.args) != len(right.args):
        return False
    return all(compatible(a, b) for a, b in zip(left.args, right.args))


def unify(template: Sort, actual: Sort, params: frozenset[str], binding: dict[str, Sort]) -> bool:
    """Match a schema sort against a possibly partial sort; holes carry no information."""
    if actual == HOLE:
        return True
    if not template.args and template.name in params:
        bound = binding.get(template.name)
        if bound is None:
            if not has_hole(actual):
                binding[template.name] = actual
            return True
        return compatible(bound, actual)
    if template.name != actual.name or len(template.args) != len(actual.args):
        return False
    return all(unify(t, a, params, binding) for t, a in zip(template.args, actual.args))


def resolve(template: Sort, params: frozenset[str], binding: dict[str, Sort]) -> Sort:
    partial = {name: binding.get(name, HOLE) for name in params}
    return instantiate_sort(template, partial)


MetaShape = tuple[Context, Sort]


class Elaborator:
    def __init__(
        self,
        sorts: SortSet,
        operators: Callable[[str], OperatorShape | None],
        metas: tuple[MetaShape, ...] = (),
        rigid: frozenset[str] = frozenset(),
        base: Callable[[str], OperatorShape | None] | None = None,
        generic: Callable[[OperatorShape, tuple[Sort, ...]], Hashable] | None = None,
    ) -> None:
        self.sorts = sorts
        self.operators = operators
        self.metas = metas
        self.rigid = rigid
        self.base = base
        self.generic = generic

    def check_sort(self, sort: Sort, path: tuple[int, ...]) -> Sort:
        if self._in_scope(sort):
            return sort
        raise SortError(f"Sort {sort} is not an element of sort set {self.sorts.name}", path)

    def _in_scope(self, sort: Sort) -> bool:
        if not sort.args:
            return sort.name in self.rigid or sort.name in self.sorts.base
        return sort.name in self.sorts.formers and len(sort.args) == 2 and all(self._in_scope(a) for a in sort.args)

    def elaborate(self, term: Term, context: Context, expected: Sort | None = None) -> tuple[Term, Sort]:
        for position, sort in enumerate(context, start=1):
            self.check_sort(sort, (position,))
        return self.check(term, context, expected if expected is not None else HOLE, ())

    def check(self, term: Term, context: Context, expected: Sort, path: tuple[int, ...]) -> tuple[Term, Sort]:
        match term:
            case Var(index):
                try:
                    sort = lookup(context, index)
                except SortError as exc:
                    raise SortError(str(exc), path) from None
                return term, self._agree(sort, expected, term, path)
            case MetaApp(meta, args):
                if meta < 1 or meta > len(self.metas):
                    raise SortError(f"Unknown metavariable ?{meta}", path)
                parameters, sort = self.metas[meta - 1]
                if len(args) != len(parameters):
                    raise SortError(
                        f"Metavariable ?{meta} takes {len(parameters)} arguments, got {len(args)}", path
                    )
                checked = tuple(
                    self.check(arg, context, parameters[i], path + (i + 1,))[0] for i, arg in enumerate(args)
                )
                return MetaApp(meta, checked), self._agree(sort, expected, term, path)
            case CloneApp(element, element_context, sort, args):
                if len(args) != len(element_context):
                    raise SortError(
                        f"Clone element of arity [{format_context(element_context)}] applied to {len(args)} arguments",
                        path,
                    )
                checked = tuple(
                    self.check(arg, context, element_context[i], path + (i + 1,))[0] for i, arg in enumerate(args)
                )
                return CloneApp(element, element_context, sort, checked), self._agree(sort, expected, term, path)
            case Op():
                return self._check_op(term, context, expected, path)
        raise SortError(f"Unexpected term {term!r}", path)

    def _agree(self, sort: Sort, expected: Sort, term: Term, path: tuple[int, ...]) -> Sort:
        if not compatible(sort, expected):
            raise SortError(f"Expected sort {expected}, found {sort}", path)
        return sort

    def _check_op(self, term: Op, context: Context, expected: Sort, path: tuple[int, ...]) -> tuple[Term, Sort]:
        shape = self.operators(term.name)
        from_base = False
        if shape is None and self.base is not None:
            shape = self.base(term.name)
            from_base = shape is not None
        if shape is None:
            raise SortError(f"Unknown operator {term.name}", path)
        if len(term.args) != len(shape.slots):
            raise SortError(f"Operator {term.name} takes {len(shape.slots)} arguments, got {len(term.args)}", path)
        params = frozenset(shape.params)
        binding: dict[str, Sort] = {}
        if term.params:
            if len(term.params) != len(shape.params):
                raise SortError(f"Operator {term.name} takes {len(shape.params)} sort parameters", path)
            for name, sort in zip(shape.params, term.params):
                binding[name] = self.check_sort(sort, path)
        if term.binders:
            if len(term.binders) != len(shape.slots):
                raise SortError(f"Operator {term.name} has {len(shape.slots)} argument scopes", path)
            for position, (given, slot) in enumerate(zip(term.binders, shape.slots), start=1):
                if len(given) != len(slot.binder):
                    raise SortError(
                        f"Argument {position} of {term.name} binds {len(slot.binder)} variables, got {len(given)}",
                        path + (position,),
                    )
                for template, actual in zip(slot.binder, given):
                    if not unify(template, actual, params, binding):
                        raise SortError(f"Binder sort {actual} does not fit {term.name}", path + (position,))
        if not unify(shape.output, expected, params, binding):
            raise SortError(f"Operator {term.name} cannot produce sort {expected}", path)

        done: dict[int, Term] = {}
        pending = list(range(len(term.args)))
        while pending:
            progressed = False
            for position in list(pending):
                slot = shape.slots[position]
                binder = tuple(resolve(sort, params, binding) for sort in slot.binder)
                if any(has_hole(sort) for sort in binder):
                    continue
                want = resolve(slot.sort, params, binding)
                try:
                    checked, found = self.check(term.args[position], context + binder, want, path + (position + 1,))
                except Underdetermined:
                    continue
                if not unify(slot.sort, found, params, binding):
                    raise SortError(
                        f"Argument {position + 1} of {term.name} has sort {found}", path + (position + 1,)
                    )
                done[position] = checked
                pending.remove(position)
                progressed = True
            if not progressed:
                raise Underdetermined(
                    f"Cannot infer the sort parameters of {term.name}; annotate its binders", path
                )

        missing = [name for name in shape.params if name not in binding]
        if missing:
            raise Underdetermined(f"Cannot infer sort parameters {', '.join(missing)} of {term.name}", path)
        resolved = tuple(binding[name] for name in shape.params)
        full = dict(zip(shape.params, resolved))
        output = instantiate_sort(shape.output, full)
        args = tuple(done[i] for i in range(len(term.args)))
        if from_base:
            inputs = tuple(instantiate_sort(slot.sort, full) for slot in shape.slots)
            element = self.generic(shape, resolved) if self.generic else Op(term.name, (), resolved)
            return CloneApp(element, inputs, output, args), self._agree(output, expected, term, path)
        binders = tuple(instantiate_context(slot.binder, full) for slot in shape.slots) if shape.binds else ()
        return Op(term.name, args, resolved, binders), self._agree(output, expected, term, path)
