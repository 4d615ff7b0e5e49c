"""The η-long β-normal grammar, per variant.

Neutrals are a variable applied to normals. In the ``bool`` variant a stuck
``ite`` at an arrow sort is also a neutral head, and base normals add true,
false and ite over a non-constant condition. In the ``gs`` variant the base
normals are exactly get(put_w1(n1), ..., put_wk(nk)) over neutrals.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

from clonekit.core.sorts import BASE, Context, Sort, SortError, arrow, format_context, is_arrow
from clonekit.core.terms import CloneApp, Op, Term, Var, show
from clonekit.presentations.stock import GET, ITE, put_name
from clonekit.stlc.variants import Variant, generic_name, is_constant

logger = logging.getLogger(__name__)


class NotNormal(SortError):
    def __init__(self, message: str, term: Term) -> None:
        self.term = term
        super().__init__(f"{message}: {show(term)}")


@dataclass
class NormalVerdict:
    normal: bool
    offending: Term | None = None
    reason: str = ""

    def to_dict(self) -> dict:
        data: dict = {"normal": self.normal}
        if not self.normal:
            data["offending"] = show(self.offending) if self.offending is not None else None
            data["reason"] = self.reason
        return data


class Grammar:
    def __init__(self, variant: Variant) -> None:
        self.variant = variant

    def normal(self, context: Context, term: Term, sort: Sort) -> None:
        if is_arrow(sort):
            dom, cod = sort.args
            if not (isinstance(term, Op) and term.name == "abs" and term.params == (dom, cod)):
                raise NotNormal(f"normal of sort {sort} must be a λ-abstraction", term)
            self.normal(context + (dom,), term.args[0], cod)
            return
        self.base_normal(context, term)

    def base_normal(self, context: Context, term: Term) -> None:
        name = self.variant.name
        if name == "bool" and isinstance(term, CloneApp):
            head = generic_name(term.element)
            if is_constant(term):
                return
            if head == ITE and term.sort == BASE:
                condition, left, right = term.args
                if is_constant(condition):
                    raise NotNormal("ite on a constant condition", term)
                self.base_normal(context, condition)
                self.base_normal(context, left)
                self.base_normal(context, right)
                return
        if name == "gs":
            self.completed(context, term)
            return
        found = self.neutral(context, term)
        if found != BASE:
            raise NotNormal(f"neutral of sort {found} where {BASE} is expected", term)

    def completed(self, context: Context, term: Term) -> None:
        values = self.variant.values
        if not (isinstance(term, CloneApp) and generic_name(term.element) == GET and len(term.args) == len(values)):
            raise NotNormal("base normal must be get(put..)", term)
        names = {put_name(v) for v in values}
        for branch in term.args:
            if not (isinstance(branch, CloneApp) and generic_name(branch.element) in names and len(branch.args) == 1):
                raise NotNormal("get branch must be a put", branch)
            inner = branch.args[0]
            if self.neutral(context, inner) != BASE:
                raise NotNormal("put must wrap a base neutral", inner)

    def neutral(self, context: Context, term: Term) -> Sort:
        match term:
            case Var(index):
                if index < 1 or index > len(context):
                    raise NotNormal(f"variable outside [{format_context(context)}]", term)
                return context[index - 1]
            case Op("app", (head, arg), (dom, cod)):
                if self.neutral(context, head) != arrow(dom, cod):
                    raise NotNormal("application head has the wrong sort", term)
                self.normal(context, arg, dom)
                return cod
            case CloneApp(element, _ctx, sort, (condition, left, right)) if (
                self.variant.name == "bool" and generic_name(element) == ITE and is_arrow(sort)
            ):
                if is_constant(condition):
                    raise NotNormal("ite on a constant condition", term)
                self.base_normal(context, condition)
                self.normal(context, left, sort)
                self.normal(context, right, sort)
                return sort
        raise NotNormal("not a neutral term", term)


def check_normal(variant: Variant, context: Context, term: Term, sort: Sort) -> NormalVerdict:
    try:
        Grammar(variant).normal(context, term, sort)
    except NotNormal as exc:
        return NormalVerdict(False, exc.term, str(exc))
    return NormalVerdict(True)
