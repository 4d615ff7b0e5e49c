"""Normalization by evaluation for the simply typed λ-calculus over a base clone.

Values at arrow sorts are Kripke functions taking the context they are used in.
Values at the base sort are normal terms tagged with the length of the context
they were built in, and weakened on the way back into syntax. Clone
applications are settled by the base clone: the cluster is collapsed, its
canonical element unfolded, and arrow-sorted pieces below the root η-expanded.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Union

from clonekit.core.sorts import BASE, Context, Sort, is_arrow
from clonekit.core.terms import CloneApp, Op, Term, Var, weaken
from clonekit.free.algebra import FreeAlgebraClone
from clonekit.free.base import BaseAdapter
from clonekit.free.clusters import normalize_cluster

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Ground:
    term: Term
    length: int


@dataclass(frozen=True)
class Kripke:
    apply: Callable[[Context, "Value"], "Value"]


Value = Union[Ground, Kripke]


def abstraction(dom: Sort, cod: Sort, body: Term) -> Op:
    return Op("abs", (body,), (dom, cod), ((dom,),))


def application(dom: Sort, cod: Sort, head: Term, arg: Term) -> Op:
    return Op("app", (head, arg), (dom, cod))


class Evaluator:
    def __init__(self, base: BaseAdapter) -> None:
        self.base = base

    def complete(self, context: Context, neutral: Term) -> Term:
        return normalize_cluster(self.base, neutral, BASE).term

    def reflect(self, context: Context, sort: Sort, neutral: Term) -> Value:
        if is_arrow(sort):
            dom, cod = sort.args
            length = len(context)

            def apply(later: Context, value: Value) -> Value:
                head = weaken(neutral, length, len(later))
                return self.reflect(later, cod, application(dom, cod, head, self.reify(later, dom, value)))

            return Kripke(apply)
        return Ground(self.complete(context, neutral), len(context))

    def reify(self, context: Context, sort: Sort, value: Value) -> Term:
        if is_arrow(sort):
            dom, cod = sort.args
            extended = context + (dom,)
            fresh = self.reflect(extended, dom, Var(len(extended)))
            return abstraction(dom, cod, self.reify(extended, cod, value.apply(extended, fresh)))
        return weaken(value.term, value.length, len(context))

    def identity(self, context: Context) -> tuple[Value, ...]:
        return tuple(self.reflect(context, sort, Var(i)) for i, sort in enumerate(context, start=1))

    def eval(self, context: Context, env: tuple[Value, ...], term: Term, sort: Sort) -> Value:
        match term:
            case Var(index):
                return env[index - 1]
            case Op("abs", (body,), (dom, cod)):
                return Kripke(lambda later, value: self.eval(later, env + (value,), body, cod))
            case Op("app", (head, arg), (dom, cod)):
                function = self.eval(context, env, head, Sort("=>", (dom, cod)))
                return function.apply(context, self.eval(context, env, arg, dom))
            case CloneApp(element, element_context, element_sort, args):
                read = tuple(
                    self.reify(context, entry, self.eval(context, env, arg, entry))
                    for arg, entry in zip(args, element_context)
                )
                return self.cluster(context, CloneApp(element, element_context, element_sort, read), element_sort)
        raise TypeError(f"Cannot evaluate {term!r}")

    def cluster(self, context: Context, node: CloneApp, sort: Sort) -> Value:
        normal = normalize_cluster(self.base, node, sort)
        if normal.leaf is not None:
            if is_arrow(sort):
                return self.eval(context, self.identity(context), normal.term, sort)
            return Ground(normal.term, len(context))
        settled = self.settle(context, normal.term)
        if is_arrow(sort):
            return self.reflect(context, sort, settled)
        return Ground(settled, len(context))

    def settle(self, context: Context, term: Term) -> Term:
        """η-expand the arrow-sorted clone applications strictly below the root."""
        if not isinstance(term, CloneApp):
            return term
        args = []
        for arg, entry in zip(term.args, term.context):
            if isinstance(arg, CloneApp):
                inner = self.settle(context, arg)
                if is_arrow(entry):
                    inner = self.reify(context, entry, self.reflect(context, entry, inner))
                arg = inner
            args.append(arg)
        return CloneApp(term.element, term.context, term.sort, tuple(args))

    def normalize(self, context: Context, term: Term, sort: Sort) -> Term:
        return self.reify(context, sort, self.eval(context, self.identity(context), term, sort))


def nbe_normalize(free: FreeAlgebraClone, term: Term, context: Context = (), sort: Sort | None = None) -> Term:
    term, sort = free.check(term, context, sort)
    return Evaluator(free.base).normalize(context, term, sort)
