from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Mapping, Sequence, Union

from clonekit.core.sorts import Context, Sort, instantiate_context, instantiate_sort


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Op:
    name: str
    args: tuple[Term, ...] = ()
    params: tuple[Sort, ...] = ()
    binders: tuple[Context, ...] = ()

    def binder(self, position: int) -> Context:
        if not self.binders:
            return ()
        return self.binders[position]


@dataclass(frozen=True)
class MetaApp:
    meta: int
    args: tuple[Term, ...] = ()


@dataclass(frozen=True)
class CloneApp:
    element: Hashable
    context: Context
    sort: Sort
    args: tuple[Term, ...] = ()


Term = Union[Var, Op, MetaApp, CloneApp]


def variables(length: int, start: int = 1) -> tuple[Var, ...]:
    return tuple(Var(i) for i in range(start, start + length))


def substitute(term: Term, components: Sequence[Term], new_length: int) -> Term:
    """Simultaneous substitution on level-indexed terms.

    ``term`` lives in a context of length ``len(components)`` extended by its own
    binders; the result lives in a context of length ``new_length``. Indices above
    the substituted prefix belong to binders and are re-based.
    """
    width = len(components)
    match term:
        case Var(index):
            if index <= width:
                return components[index - 1]
            return Var(index - width + new_length)
        case Op(name, args, params, binders):
            return Op(name, tuple(substitute(arg, components, new_length) for arg in args), params, binders)
        case MetaApp(meta, args):
            return MetaApp(meta, tuple(substitute(arg, components, new_length) for arg in args))
        case CloneApp(element, context, sort, args):
            return CloneApp(element, context, sort, tuple(substitute(arg, components, new_length) for arg in args))
    raise TypeError(f"Unexpected term in substitute: {term!r}")


def weaken(term: Term, old_length: int, new_length: int) -> Term:
    if old_length == new_length:
        return term
    return substitute(term, variables(old_length), new_length)


def term_size(term: Term) -> int:
    match term:
        case Var():
            return 1
        case Op(args=args) | MetaApp(args=args) | CloneApp(args=args):
            return 1 + sum(term_size(arg) for arg in args)
    raise TypeError(f"Unexpected term in term_size: {term!r}")


def term_depth(term: Term) -> int:
    match term:
        case Var():
            return 0
        case Op(args=args) | MetaApp(args=args) | CloneApp(args=args):
            return 1 + max((term_depth(arg) for arg in args), default=0)
    raise TypeError(f"Unexpected term in term_depth: {term!r}")


def free_indices(term: Term, length: int) -> set[int]:
    match term:
        case Var(index):
            return {index} if index <= length else set()
        case Op(args=args) | MetaApp(args=args) | CloneApp(args=args):
            found: set[int] = set()
            for arg in args:
                found |= free_indices(arg, length)
            return found
    raise TypeError(f"Unexpected term in free_indices: {term!r}")


def show(term: Term) -> str:
    """Debug rendering: variables as ``#i``, metavariables as ``?i``."""
    match term:
        case Var(index):
            return f"#{index}"
        case MetaApp(meta, args):
            return f"?{meta}({', '.join(show(arg) for arg in args)})"
        case CloneApp(element, _context, _sort, args):
            inner = ", ".join(show(arg) for arg in args)
            if isinstance(element, Op) and element.args == variables(len(element.args)):
                return f"{element.name}({inner})" if args else element.name
            label = show(element) if isinstance(element, (Var, Op, MetaApp, CloneApp)) else str(element)
            return f"[{label}]({inner})"
        case Op(name, args, _params, binders):
            if not args:
                return name
            parts = []
            for position, arg in enumerate(args):
                bound = binders[position] if binders else ()
                parts.append(f"{len(bound)}.{show(arg)}" if bound else show(arg))
            return f"{name}({', '.join(parts)})"
    raise TypeError(f"Unexpected term in show: {term!r}")


def instantiate_term(term: Term, binding: Mapping[str, Sort]) -> Term:
    """Replace sort parameters inside operator annotations."""
    if not binding:
        return term
    match term:
        case Var():
            return term
        case MetaApp(meta, args):
            return MetaApp(meta, tuple(instantiate_term(arg, binding) for arg in args))
        case Op(name, args, params, binders):
            return Op(
                name,
                tuple(instantiate_term(arg, binding) for arg in args),
                tuple(instantiate_sort(p, binding) for p in params),
                tuple(instantiate_context(b, binding) for b in binders),
            )
        case CloneApp(element, context, sort, args):
            if isinstance(element, (Var, Op, MetaApp, CloneApp)):
                element = instantiate_term(element, binding)
            return CloneApp(
                element,
                instantiate_context(context, binding),
                instantiate_sort(sort, binding),
                tuple(instantiate_term(arg, binding) for arg in args),
            )
    raise TypeError(f"Unexpected term in instantiate_term: {term!r}")
