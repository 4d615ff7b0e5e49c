"""Surface syntax: parsing named terms into level-indexed ones, and printing them back.

Variables are written by name and resolved to levels at parse time; ``#i``
names the i-th context entry directly. ``\\x : A. t`` abbreviates ``abs``,
juxtaposition abbreviates ``app``, and an operator written first in a spine
takes the rest of the spine as its arguments (``ite c t e``). Inside an
operator's parentheses ``x y. t`` binds ``x`` and ``y`` in ``t``; outside them
``op x. t`` is ``op`` applied to one such scoped argument. ``put v (t)`` is
read as ``put_v(t)`` when the latter is an operator. Names that are neither
bound nor operators become fresh context entries at the base sort.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedInput, VisitError

from clonekit.core.elaborate import HOLE, OperatorShape
from clonekit.core.sorts import BASE, Context, Sort
from clonekit.core.terms import CloneApp, MetaApp, Op, Term, Var
from clonekit.stlc.variants import generic_name

logger = logging.getLogger(__name__)

GRAMMAR = Path(__file__).resolve().parent / "bundle.lark"
START = ["bundle", "term_input", "context_input", "sort_input"]
FRESH = ("x", "y", "z", "u", "v", "w")


class SurfaceError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None) -> None:
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" at line {line}, column {column}" if column is not None else f" at line {line}"
        super().__init__(f"{message}{where}")


_PARSER: Lark | None = None


def parser() -> Lark:
    global _PARSER
    if _PARSER is None:
        _PARSER = Lark.open(str(GRAMMAR), start=START, parser="earley", propagate_positions=True)
    return _PARSER


@dataclass(frozen=True)
class SName:
    name: str
    line: int | None = None
    column: int | None = None


@dataclass(frozen=True)
class SLevel:
    index: int


@dataclass(frozen=True)
class SMeta:
    name: str
    args: tuple | None = None


@dataclass(frozen=True)
class SCall:
    name: str
    args: tuple = ()
    line: int | None = None
    column: int | None = None


@dataclass(frozen=True)
class SDotted:
    names: tuple[str, ...]
    body: object


@dataclass(frozen=True)
class SLam:
    binders: tuple[tuple[str, Sort | None], ...]
    body: object


@dataclass(frozen=True)
class SSpine:
    items: tuple


@dataclass(frozen=True)
class SGroup:
    term: object


Surface = SName | SLevel | SMeta | SCall | SDotted | SLam | SSpine | SGroup


@dataclass(frozen=True)
class SurfaceInput:
    context: tuple[tuple[str, Sort], ...]
    term: Surface


@v_args(inline=True)
class SurfaceTransformer(Transformer):
    """Lark tree to surface nodes; shared by the bundle reader."""

    def sort_name(self, token: Token) -> Sort:
        return Sort(str(token))

    def sort_former(self, left: Sort, former: Token, right: Sort) -> Sort:
        return Sort(str(former), (left, right))

    def sort_input(self, sort: Sort) -> Sort:
        return sort

    def binding(self, name: Token, sort: Sort) -> tuple[str, Sort]:
        return str(name), sort

    def context(self, *bindings: tuple[str, Sort]) -> tuple[tuple[str, Sort], ...]:
        return tuple(bindings)

    def context_input(self, context=None) -> tuple[tuple[str, Sort], ...]:
        return context or ()

    def term_input(self, context, term) -> SurfaceInput:
        return SurfaceInput(context or (), term)

    def name(self, token: Token) -> SName:
        return SName(str(token), token.line, token.column)

    def level(self, token: Token) -> SLevel:
        return SLevel(int(str(token)[1:]))

    def meta_bare(self, token: Token) -> SMeta:
        return SMeta(str(token)[1:], None)

    def meta_call(self, token: Token, *args) -> SMeta:
        return SMeta(str(token)[1:], tuple(a for a in args if a is not None))

    def call(self, token: Token, *args) -> SCall:
        return SCall(str(token), tuple(a for a in args if a is not None), token.line, token.column)

    def group(self, term) -> SGroup:
        return SGroup(term)

    def spine(self, *items) -> Surface:
        return items[0] if len(items) == 1 else SSpine(tuple(items))

    def dotted(self, *parts) -> SDotted:
        *names, body = parts
        return SDotted(tuple(str(n) for n in names), body)

    def lam_binder(self, name: Token, sort: Sort | None = None) -> tuple[str, Sort | None]:
        return str(name), sort

    def lam(self, *parts) -> SLam:
        *binders, body = parts
        return SLam(tuple(binders), body)


def _parse(text: str, start: str):
    try:
        tree = parser().parse(text, start=start)
    except UnexpectedInput as exc:
        raise SurfaceError(f"Unexpected input {exc.get_context(text).strip()!r}", exc.line, exc.column) from None
    try:
        return SurfaceTransformer().transform(tree)
    except VisitError as exc:
        raise SurfaceError(str(exc.orig_exc)) from None


def parse_sort(text: str) -> Sort:
    return _parse(text, "sort_input")


def parse_context_names(text: str) -> tuple[tuple[str, Sort], ...]:
    return _parse(text, "context_input")


def parse_context(text: str) -> Context:
    return tuple(sort for _, sort in parse_context_names(text))


def parse_surface(text: str) -> SurfaceInput:
    return _parse(text, "term_input")


@dataclass
class Resolver:
    """Names to levels, against a lookup of operator shapes.

    ``metas`` names the metavariables in order; ``open`` lets unknown names
    become new context entries at ``base``.
    """

    shape: Callable[[str], OperatorShape | None]
    metas: Sequence[str] = ()
    meta_arity: Sequence[int] = ()
    base: Sort = BASE
    open: bool = True
    opened: list[str] = field(default_factory=list)

    def is_operator(self, name: str) -> bool:
        return self.shape(name) is not None

    def scan(self, node: Surface, bound: tuple[str, ...]) -> None:
        """Collect unknown names, in order of first use."""
        match node:
            case SName(name, line, column):
                if name not in bound and not self.is_operator(name) and name not in self.opened:
                    if not self.open:
                        raise SurfaceError(f"Unknown name {name}", line, column)
                    self.opened.append(name)
            case SCall(name, args):
                if name in bound or self.is_operator(name):
                    pass
                elif not self.open:
                    raise SurfaceError(f"Unknown operator {name}", node.line, node.column)
                elif name not in self.opened:
                    self.opened.append(name)
                for arg in args:
                    if isinstance(arg, SDotted) and self.is_operator(name):
                        self.scan(arg.body, bound + arg.names)
                    else:
                        self.scan(arg, bound)
            case SDotted(names, body):
                self.scan(body, bound + names[1:])
            case SLam(binders, body):
                self.scan(body, bound + tuple(name for name, _ in binders))
            case SSpine(items):
                items = self._merged(items, bound)
                for item in items:
                    self.scan(item, bound)
            case SGroup(term):
                self.scan(term, bound)
            case SMeta(_, args):
                for arg in args or ():
                    self.scan(arg, bound)

    def _merged(self, items: tuple, bound: tuple[str, ...]) -> tuple:
        head = items[0]
        if (
            len(items) < 2
            or not isinstance(head, SName)
            or not isinstance(items[1], (SName, SCall))
            or head.name in bound
            or self.is_operator(head.name)
        ):
            return items
        joined = f"{head.name}_{items[1].name}"
        if not self.is_operator(joined):
            return items
        # ``put v1 (t)`` may arrive as ``put`` followed by the call ``v1(t)``
        if isinstance(items[1], SCall):
            return (SCall(joined, items[1].args, head.line, head.column),) + items[2:]
        return (SName(joined, head.line, head.column),) + items[2:]

    def resolve(self, node: Surface, scope: tuple[str, ...]) -> Term:
        match node:
            case SName(name, line, column):
                level = _level(scope, name)
                if level is not None:
                    return Var(level)
                if self.is_operator(name):
                    return Op(name)
                raise SurfaceError(f"Unknown name {name}", line, column)
            case SLevel(index):
                return Var(index)
            case SMeta(name, args):
                return MetaApp(self._meta(name), tuple(self.resolve(a, scope) for a in args or ()))
            case SCall(name, args):
                if _level(scope, name) is not None:
                    return self._apply(Var(_level(scope, name)), [self.resolve(a, scope) for a in args])
                return self._operator(name, args, scope)
            case SDotted(names, body):
                head, binder = names[0], names[1:]
                if not self.is_operator(head):
                    raise SurfaceError(f"{head} is not an operator that binds")
                return Op(head, (self.resolve(body, scope + binder),), (), ((HOLE,) * len(binder),))
            case SLam(binders, body):
                if not self.is_operator("abs"):
                    raise SurfaceError("λ-abstraction needs an abs operator")
                (name, sort), rest = binders[0], binders[1:]
                inner = SLam(rest, body) if rest else body
                return Op("abs", (self.resolve(inner, scope + (name,)),), (), ((sort or HOLE,),))
            case SSpine(items):
                return self._spine(self._merged(items, scope), scope)
            case SGroup(term):
                return self.resolve(term, scope)
        raise SurfaceError(f"Cannot read {node!r}")

    def _meta(self, name: str) -> int:
        if name not in self.metas:
            raise SurfaceError(f"Unknown metavariable ?{name}")
        return list(self.metas).index(name) + 1

    def _operator(self, name: str, args: Sequence, scope: tuple[str, ...]) -> Op:
        if not self.is_operator(name):
            raise SurfaceError(f"Unknown operator {name}")
        resolved = []
        binders = []
        for arg in args:
            if isinstance(arg, SDotted):
                resolved.append(self.resolve(arg.body, scope + arg.names))
                binders.append((HOLE,) * len(arg.names))
            else:
                resolved.append(self.resolve(arg, scope))
                binders.append(())
        return Op(name, tuple(resolved), (), tuple(binders) if any(binders) else ())

    def _spine(self, items: tuple, scope: tuple[str, ...]) -> Term:
        head, rest = items[0], list(items[1:])
        if isinstance(head, SName) and _level(scope, head.name) is None and self.is_operator(head.name):
            arity = len(self.shape(head.name).slots)
            taken, rest = rest[:arity], rest[arity:]
            term: Term = self._operator(head.name, taken, scope) if taken else Op(head.name)
        elif isinstance(head, SMeta) and head.args is None:
            arity = self.meta_arity[self._meta(head.name) - 1] if self.meta_arity else 0
            taken, rest = rest[:arity], rest[arity:]
            term = MetaApp(self._meta(head.name), tuple(self.resolve(a, scope) for a in taken))
        else:
            term = self.resolve(head, scope)
        return self._apply(term, [self.resolve(item, scope) for item in rest])

    def _apply(self, head: Term, args: list[Term]) -> Term:
        if args and not self.is_operator("app"):
            raise SurfaceError("Application needs an app operator")
        for arg in args:
            head = Op("app", (head, arg))
        return head


def _level(scope: tuple[str, ...], name: str) -> int | None:
    for position in range(len(scope), 0, -1):
        if scope[position - 1] == name:
            return position
    return None


def read_term(
    text: str,
    shape: Callable[[str], OperatorShape | None],
    base: Sort = BASE,
    open: bool = True,
) -> tuple[tuple[str, ...], Context, Term]:
    """Parse ``[x : A, ... |-] t``; returns the context names, the context and the term."""
    surface = parse_surface(text)
    names = tuple(name for name, _ in surface.context)
    resolver = Resolver(shape, base=base, open=open)
    resolver.scan(surface.term, names)
    names += tuple(resolver.opened)
    context = tuple(sort for _, sort in surface.context) + (base,) * len(resolver.opened)
    if resolver.opened:
        logger.debug("Opened %s at sort %s", ", ".join(resolver.opened), base)
    return names, context, resolver.resolve(surface.term, names)


class Printer:
    """Level-indexed terms back to surface text with deterministic fresh names."""

    def __init__(self, reserved: Sequence[str] = ()) -> None:
        self.reserved = set(reserved)

    def fresh(self, taken: Sequence[str]) -> str:
        used = set(taken) | self.reserved
        for name in FRESH:
            if name not in used:
                return name
        counter = 1
        while True:
            for name in FRESH:
                candidate = f"{name}{counter}"
                if candidate not in used:
                    return candidate
            counter += 1

    def names(self, context: Context) -> tuple[str, ...]:
        names: list[str] = []
        for _ in context:
            names.append(self.fresh(names))
        return tuple(names)

    def context(self, names: Sequence[str], context: Context) -> str:
        return ", ".join(f"{n} : {s}" for n, s in zip(names, context))

    def term(self, term: Term, names: Sequence[str] = (), metas: Sequence[str] = ()) -> str:
        return self._lam(term, tuple(names), tuple(metas))

    def _lam(self, term: Term, names: tuple[str, ...], metas: tuple[str, ...]) -> str:
        if isinstance(term, Op) and term.name == "abs" and len(term.args) == 1:
            name = self.fresh(names)
            binder = term.binder(0)
            annotation = f" : {binder[0]}" if binder and binder[0] != HOLE else ""
            return f"\\{name}{annotation}. {self._lam(term.args[0], names + (name,), metas)}"
        return self._spine(term, names, metas)

    def _spine(self, term: Term, names: tuple[str, ...], metas: tuple[str, ...]) -> str:
        if isinstance(term, Op) and term.name == "app" and len(term.args) == 2:
            head, arg = term.args
            return f"{self._spine(head, names, metas)} {self._atom(arg, names, metas)}"
        return self._atom(term, names, metas)

    def _atom(self, term: Term, names: tuple[str, ...], metas: tuple[str, ...]) -> str:
        match term:
            case Var(index):
                return names[index - 1] if 1 <= index <= len(names) else f"#{index}"
            case MetaApp(meta, args):
                label = metas[meta - 1] if 1 <= meta <= len(metas) else f"M{meta}"
                inner = ", ".join(self._lam(a, names, metas) for a in args)
                return f"?{label}({inner})" if args else f"?{label}"
            case CloneApp(element, _context, _sort, args):
                head = generic_name(element)
                inner = ", ".join(self._lam(a, names, metas) for a in args)
                if head is None:
                    head = f"[{element}]"
                    return f"{head}({inner})"
                return f"{head}({inner})" if args else head
            case Op("abs" | "app"):
                return f"({self._lam(term, names, metas)})"
            case Op(name, args, _params, binders):
                if not args:
                    return name
                parts = []
                for position, arg in enumerate(args):
                    bound: tuple[str, ...] = ()
                    for _ in binders[position] if binders else ():
                        bound += (self.fresh(names + bound),)
                    body = self._lam(arg, names + bound, metas)
                    parts.append(f"{' '.join(bound)}. {body}" if bound else body)
                return f"{name}({', '.join(parts)})"
        raise SurfaceError(f"Cannot print {term!r}")


def print_term(term: Term, names: Sequence[str] = (), reserved: Sequence[str] = ()) -> str:
    return Printer(reserved).term(term, names)


def closing_names(context: Context, reserved: Sequence[str] = ()) -> tuple[str, ...]:
    return Printer(reserved).names(context)
