"""The finite set model of the simply typed λ-calculus.

A term at (Γ; A) is its function table: one value of A per environment of Γ,
environments listed in row-major order with the last context entry varying
fastest. Values are integer codes: a base value is an index into the label
set, and a function value of sort A => B is the little-endian base-|B| number
whose a-th digit is the image of a.
"""
from __future__ import annotations

import logging
from itertools import product
from math import prod
from typing import Hashable, Sequence

import numpy as np
import pandas as pd

from clonekit.config import Budget, default_budget
from clonekit.core.clones import Clone, CloneError, CloneHom, Enumeration, Substitution, _capped, initial_hom
from clonekit.core.sorts import BASE, Context, Sort, SortSet, arrow, format_context, is_arrow, stlc_sorts
from clonekit.core.terms import Op, Term, Var
from clonekit.free.algebra import FreeAlgebraClone, fold_hom
from clonekit.presentations.stock import FALSE, GET, ITE, TRUE, bool_clone, put_name
from clonekit.second_order.algebra import Algebra
from clonekit.second_order.syntax import SoPresentation, stlc_presentation
from clonekit.stlc.variants import Variant

logger = logging.getLogger(__name__)

MAX_ENVIRONMENTS = 1 << 16
MAX_VALUES = 1 << 60
BOOL_LABELS = ("tt", "ff")

Table = tuple[int, ...]


class SetModel(Clone):
    def __init__(self, labels: Sequence[str], sorts: SortSet | None = None) -> None:
        super().__init__(sorts or stlc_sorts())
        labels = tuple(labels)
        if not labels:
            raise CloneError("A set model needs at least one element")
        if len(set(labels)) != len(labels):
            raise CloneError(f"Duplicate labels in {list(labels)}")
        self.labels = labels
        self.name = f"M{{{', '.join(labels)}}}"

    def size(self, sort: Sort) -> int:
        if not is_arrow(sort):
            return len(self.labels)
        dom, cod = sort.args
        count = self.size(cod) ** self.size(dom)
        if count > MAX_VALUES:
            raise CloneError(f"{self.name} has too many values at {sort}")
        return count

    def dims(self, context: Context) -> tuple[int, ...]:
        return tuple(self.size(sort) for sort in context)

    def count(self, context: Context) -> int:
        total = prod(self.dims(context))
        if total > MAX_ENVIRONMENTS:
            raise CloneError(f"[{format_context(context)}] has {total} environments in {self.name}")
        return total

    def environments(self, context: Context) -> np.ndarray:
        self.count(context)
        dims = self.dims(context)
        if not dims:
            return np.zeros((1, 0), dtype=np.int64)
        return np.indices(dims).reshape(len(dims), -1).T

    def var(self, context: Context, index: int) -> Table:
        self._check_index(context, index)
        return tuple(self.environments(context)[:, index - 1].tolist())

    def subst(self, term: Table, sigma: Substitution) -> Table:
        rows = self.count(sigma.source)
        if not sigma.target:
            return tuple(term) * rows
        coordinates = np.array(sigma.components, dtype=np.int64).reshape(len(sigma.target), rows)
        index = np.ravel_multi_index(coordinates, self.dims(sigma.target))
        return tuple(np.asarray(term, dtype=object)[index].tolist())

    def enumerate(self, context: Context, sort: Sort, budget: Budget | None = None) -> Enumeration:
        budget = budget or default_budget()
        rows = self.count(context)
        return _capped(product(range(self.size(sort)), repeat=rows), budget.max_terms)

    def constant(self, context: Context, value: int) -> Table:
        return (value,) * self.count(context)

    def apply(self, sort: Sort, function: int, argument: int) -> int:
        width = self.size(sort.args[1])
        return (function // width**argument) % width

    def curry(self, codomain: Sort, images: Sequence[int]) -> int:
        width = self.size(codomain)
        return sum(value * width**position for position, value in enumerate(images))

    def operations(self, name: str, params: tuple[Sort, ...], context: Context, args: tuple) -> Table:
        dom, cod = params
        match name, args:
            case "app", (function, argument):
                sort = arrow(dom, cod)
                return tuple(self.apply(sort, f, a) for f, a in zip(function, argument))
            case "abs", (body,):
                width = self.size(dom)
                return tuple(self.curry(cod, body[r * width:(r + 1) * width]) for r in range(len(body) // width))
        raise CloneError(f"{self.name} does not interpret {name}")

    def algebra(self, presentation: SoPresentation | None = None) -> Algebra:
        return Algebra(self, presentation or stlc_presentation(self.sorts), self.operations, self.name)


def set_model(z: int | Sequence[str] = BOOL_LABELS, sorts: SortSet | None = None) -> SetModel:
    """M_Z for a label sequence, or for ``z`` anonymous elements."""
    if isinstance(z, int):
        if z < 1:
            raise CloneError(f"A set model needs at least one element, got {z}")
        labels = BOOL_LABELS if z == 2 else tuple(f"z{i}" for i in range(z))
        return SetModel(labels, sorts)
    return SetModel(z, sorts)


class StateModel(SetModel):
    """A set model for global state: a base value is a table s ↦ (s', z).

    States are the value names and ``results`` anonymous outcomes z0, z1, ...;
    a table is encoded little-endian with one digit per initial state.
    """

    def __init__(self, values: Sequence[str], results: int = 2, sorts: SortSet | None = None) -> None:
        if results < 1:
            raise CloneError(f"A state model needs at least one result, got {results}")
        self.values = tuple(values)
        self.results = results
        self.width = len(self.values) * results
        labels = tuple(self._label(code) for code in range(self.width ** len(self.values)))
        super().__init__(labels, sorts)
        self.name = f"M_state{{{', '.join(self.values)}; z×{results}}}"

    def decode(self, code: int) -> tuple[tuple[int, int], ...]:
        digits = ((code // self.width**s) % self.width for s in range(len(self.values)))
        return tuple(divmod(digit, self.results) for digit in digits)

    def encode(self, table: Sequence[tuple[int, int]]) -> int:
        return sum((state * self.results + z) * self.width**s for s, (state, z) in enumerate(table))

    def _label(self, code: int) -> str:
        pairs = (f"{self.values[s]}→{self.values[t]}·z{z}" for s, (t, z) in enumerate(self.decode(code)))
        return "(" + ", ".join(pairs) + ")"


def state_model_hom(model: StateModel, source: Clone) -> CloneHom:
    """get reads the state, put_v runs its argument from state v."""
    k = len(model.values)
    puts = {put_name(v): i for i, v in enumerate(model.values)}

    def go(term: Term, context: Context, sort: Sort) -> Table:
        match term:
            case Var(index):
                return model.var(context, index)
            case Op(name, args) if name == GET and len(args) == k:
                parts = [go(arg, context, BASE) for arg in args]
                return tuple(
                    model.encode(tuple(model.decode(parts[s][row])[s] for s in range(k)))
                    for row in range(len(parts[0]))
                )
            case Op(name, (arg,)) if name in puts:
                v = puts[name]
                return tuple(model.encode((model.decode(code)[v],) * k) for code in go(arg, context, BASE))
        raise CloneError(f"Not a global-state term: {term!r}")

    return CloneHom(source, model, go, "g")


def bool_model_hom(model: SetModel, source: Clone | None = None) -> CloneHom:
    """true ↦ tt, false ↦ ff, ite ↦ the conditional table.

    With more than two elements a condition outside {tt, ff} picks the first
    branch at base sort and the constantly-first function at arrow sorts.
    """
    if len(model.labels) < 2:
        raise CloneError(f"{model.name} has no room for two truth values")
    source = source or bool_clone()

    def go(term: Term, context: Context, sort: Sort) -> Table:
        match term:
            case Var(index):
                return model.var(context, index)
            case Op(name) if name == TRUE:
                return model.constant(context, 0)
            case Op(name) if name == FALSE:
                return model.constant(context, 1)
            case Op(name, (condition, left, right), (result,)) if name == ITE:
                test = np.asarray(go(condition, context, BASE), dtype=object)
                yes = np.asarray(go(left, context, result), dtype=object)
                no = np.asarray(go(right, context, result), dtype=object)
                stuck = np.zeros_like(yes) if is_arrow(result) else yes
                return tuple(np.where(test == 0, yes, np.where(test == 1, no, stuck)).tolist())
        raise CloneError(f"Not a boolean term: {term!r}")

    return CloneHom(source, model, go, "g")


def model_hom(variant: Variant, model: SetModel) -> CloneHom:
    match variant.name:
        case "stlc":
            return initial_hom(model)
        case "bool":
            return bool_model_hom(model, variant.base.clone)
        case "gs" if isinstance(model, StateModel):
            return state_model_hom(model, variant.base.clone)
    raise CloneError(f"The {variant.name} variant has no set model")


def evaluate(
    free: FreeAlgebraClone, model: SetModel, f: CloneHom, term: Term, context: Context = (), sort: Sort | None = None
) -> Table:
    term, sort = free.check(term, context, sort)
    return fold_hom(free, model.algebra(free.presentation), f)(term, context, sort)


def eval_closed(free: FreeAlgebraClone, model: SetModel, f: CloneHom, term: Term, sort: Sort | None = None) -> int:
    """The value of a closed term under f†."""
    return evaluate(free, model, f, term, (), sort)[0]


def render_value(model: SetModel, sort: Sort, value: int) -> str:
    if not is_arrow(sort):
        return model.labels[value]
    dom, cod = sort.args
    pairs = (f"{render_value(model, dom, a)} ↦ {render_value(model, cod, model.apply(sort, value, a))}" for a in range(model.size(dom)))
    return "{" + ", ".join(pairs) + "}"


def value_to_json(model: SetModel, sort: Sort, value: int) -> Hashable:
    if not is_arrow(sort):
        return model.labels[value]
    dom, cod = sort.args
    return [
        {"in": value_to_json(model, dom, a), "out": value_to_json(model, cod, model.apply(sort, value, a))}
        for a in range(model.size(dom))
    ]


def value_frame(model: SetModel, sort: Sort, value: int) -> pd.DataFrame:
    """One row per argument for a function value, a single row otherwise."""
    if not is_arrow(sort):
        return pd.DataFrame([{"value": model.labels[value]}])
    dom, cod = sort.args
    return pd.DataFrame(
        [
            {"argument": render_value(model, dom, a), "value": render_value(model, cod, model.apply(sort, value, a))}
            for a in range(model.size(dom))
        ]
    )


def separate_in_model(
    variant: Variant, free: FreeAlgebraClone, left: Term, right: Term, context: Context, sort: Sort, sizes: Sequence[int] = (2, 3)
) -> dict | None:
    """An environment of a small set model where the two terms differ, if one is found."""
    for model in candidate_models(variant, free.sorts, sizes):
        try:
            f = model_hom(variant, model)
            first = evaluate(free, model, f, left, context, sort)
            second = evaluate(free, model, f, right, context, sort)
        except CloneError as exc:
            logger.debug("No separation in %s: %s", model.name, exc)
            continue
        for row, (a, b) in enumerate(zip(first, second)):
            if a != b:
                env = model.environments(context)[row].tolist()
                return {
                    "model": model.name,
                    "environment": [render_value(model, s, v) for s, v in zip(context, env)],
                    "left": render_value(model, sort, a),
                    "right": render_value(model, sort, b),
                }
    return None


def candidate_models(variant: Variant, sorts: SortSet, sizes: Sequence[int] = (2, 3)) -> list[SetModel]:
    if variant.name == "gs":
        return [StateModel(variant.values, results, sorts) for results in (1, 2)]
    return [set_model(size, sorts) for size in sizes]
