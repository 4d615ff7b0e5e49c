"""The three stock base clones under the simply typed λ-calculus.

``stlc`` has no base operations (base clone Var), ``bool`` adds true, false and
ite, and ``gs`` adds global state over a finite value set. Global-state base
terms are always kept in the fully expanded get(put..) shape.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Hashable, Sequence

from clonekit.core.clones import VarClone
from clonekit.core.sorts import Context, Sort, stlc_sorts
from clonekit.core.terms import CloneApp, Op, Term, variables
from clonekit.free.base import BaseAdapter, PresentedBase, VarBase
from clonekit.presentations.first_order import PresentationError
from clonekit.presentations.stock import (
    FALSE,
    TRUE,
    bool_clone,
    default_values,
    full_form,
    global_state_clone,
    gs_state_table,
)
from clonekit.presentations.tm_clone import TmClone

logger = logging.getLogger(__name__)

VARIANTS = ("stlc", "bool", "gs")


class GlobalStateBase(PresentedBase):
    def __init__(self, clone: TmClone, values: Sequence[str]) -> None:
        super().__init__(clone)
        self.values = tuple(values)

    def canonical(self, element: Hashable, context: Context, sort: Sort) -> Term:
        normal = self.clone.canonical(element, context, sort)
        return full_form(self.values, gs_state_table(self.values, normal))


@dataclass(frozen=True)
class Variant:
    name: str
    base: BaseAdapter
    values: tuple[str, ...] = ()


def make_variant(name: str, values: Sequence[str] | None = None) -> Variant:
    match name:
        case "stlc":
            return Variant(name, VarBase(VarClone(stlc_sorts())))
        case "bool":
            return Variant(name, PresentedBase(bool_clone()))
        case "gs":
            values = tuple(values) if values else default_values(2)
            return Variant(name, GlobalStateBase(global_state_clone(values), values), values)
    raise PresentationError(f"Unknown variant {name!r}; expected one of {', '.join(VARIANTS)}")


def generic_name(element: Hashable) -> str | None:
    """The operator name when ``element`` is op(x1, ..., xn)."""
    if isinstance(element, Op) and element.args == variables(len(element.args)):
        return element.name
    return None


def is_constant(term: Term) -> bool:
    return isinstance(term, CloneApp) and generic_name(term.element) in (TRUE, FALSE) and not term.args
