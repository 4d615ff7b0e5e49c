"""How a free algebra talks to its base clone X.

Elements of X appear inside free terms as ``CloneApp`` nodes. An adapter knows
how to check such elements, pick canonical representatives, recognise
variables, and unfold an element back into nested applications of the base
signature's operators.
"""
from __future__ import annotations

import logging
from typing import Hashable, Sequence

from clonekit.core.clones import Clone, VarClone
from clonekit.core.elaborate import OperatorShape
from clonekit.core.sorts import Context, Sort, SortError
from clonekit.core.terms import CloneApp, Op, Term, Var, variables
from clonekit.presentations.first_order import FoSignature, fo_check
from clonekit.presentations.tm_clone import TmClone

logger = logging.getLogger(__name__)


class BaseAdapter:
    def __init__(self, clone: Clone, signature: FoSignature | None = None) -> None:
        self.clone = clone
        self.signature = signature

    @property
    def name(self) -> str:
        return self.clone.name

    def shape(self, name: str) -> OperatorShape | None:
        if self.signature is None:
            return None
        return self.signature.shape(name)

    def generic(self, shape: OperatorShape, params: tuple[Sort, ...]) -> Hashable:
        """The element op(x1, ..., xn) standing for a base operator inside free terms."""
        raise SortError(f"{self.name} has no operator {shape.name}")

    def member(self, element: Hashable, context: Context, sort: Sort) -> bool:
        raise NotImplementedError

    def canonical(self, element: Hashable, context: Context, sort: Sort) -> Hashable:
        return self.clone.canonical(element, context, sort)

    def equal(self, left: Hashable, right: Hashable, context: Context, sort: Sort) -> bool:
        return left == right or self.clone.equal(left, right, context, sort)

    def as_variable(self, element: Hashable, context: Context) -> int | None:
        raise NotImplementedError

    def unfold(self, element: Hashable, context: Context, sort: Sort, leaves: Sequence[Term]) -> Term:
        """Rebuild ``element`` applied to ``leaves`` as nested generic operator applications."""
        raise NotImplementedError


class VarBase(BaseAdapter):
    """Base clone Var_S: every element is a variable, so clusters always collapse to a leaf."""

    def __init__(self, clone: VarClone) -> None:
        super().__init__(clone)

    def member(self, element: Hashable, context: Context, sort: Sort) -> bool:
        return isinstance(element, int) and 1 <= element <= len(context) and context[element - 1] == sort

    def as_variable(self, element: Hashable, context: Context) -> int | None:
        return element

    def unfold(self, element: Hashable, context: Context, sort: Sort, leaves: Sequence[Term]) -> Term:
        return leaves[element - 1]


class PresentedBase(BaseAdapter):
    """Base clone presented by a first-order presentation; elements are first-order terms."""

    def __init__(self, clone: TmClone) -> None:
        super().__init__(clone, clone.presentation.signature)

    def generic(self, shape: OperatorShape, params: tuple[Sort, ...]) -> Term:
        return Op(shape.name, variables(len(shape.slots)), params)

    def member(self, element: Hashable, context: Context, sort: Sort) -> bool:
        if not isinstance(element, (Var, Op)):
            return False
        try:
            fo_check(self.signature, context, element, sort)
        except SortError:
            return False
        return True

    def as_variable(self, element: Hashable, context: Context) -> int | None:
        return element.index if isinstance(element, Var) else None

    def unfold(self, element: Hashable, context: Context, sort: Sort, leaves: Sequence[Term]) -> Term:
        match element:
            case Var(index):
                return leaves[index - 1]
            case Op(name, args, params):
                op = self.signature.lookup(name)
                inputs, output = op.arity(params)
                return CloneApp(
                    self.generic(op.shape, params),
                    inputs,
                    output,
                    tuple(self.unfold(arg, context, s, leaves) for arg, s in zip(args, inputs)),
                )
        raise SortError(f"Not an element of {self.name}: {element!r}")


def base_adapter(base: Clone | BaseAdapter) -> BaseAdapter:
    if isinstance(base, BaseAdapter):
        return base
    if isinstance(base, VarClone):
        return VarBase(base)
    if isinstance(base, TmClone):
        return PresentedBase(base)
    raise SortError(f"No adapter for base clone {base.name}")
