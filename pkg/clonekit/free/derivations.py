"""Derivations of ≈ between free terms, and their checker.

The shared nodes (``Refl``, ``Sym``, ``Trans``, ``CongOp``, ``AxiomInstance``)
come from the first-order logic. In a free derivation ``AxiomInstance.left``
holds one instantiation per metavariable of the equation, each living in the
current context extended by that metavariable's parameters. Three extra nodes
handle base-clone elements: congruence, collapse of a variable element, and
collapse of a substituted element.

Terms are compared up to equality of the base-clone elements they carry.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, Hashable, Union

from clonekit.core.clones import CloneError, Substitution
from clonekit.core.codec import (
    CodecError,
    context_from_json,
    context_to_json,
    element_from_json,
    element_to_json,
    sort_from_json,
    sort_to_json,
    term_from_json,
    term_to_json,
)
from clonekit.core.sorts import Context, Sort, SortError, format_context
from clonekit.core.terms import CloneApp, Op, Term, show
from clonekit.free.terms import free_check_term, free_term_eq
from clonekit.presentations.derivations import (
    AxiomInstance,
    Conclusion,
    CongOp,
    DerivationError,
    Refl,
    Sym,
    Trans,
    Verdict,
)
from clonekit.presentations.first_order import PresentationError
from clonekit.second_order.syntax import so_equation_instance, so_metasubst

if TYPE_CHECKING:
    from clonekit.free.algebra import FreeAlgebraClone

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CongCloneApp:
    element: Hashable
    context: Context
    sort: Sort
    premises: tuple


@dataclass(frozen=True)
class CloneVarLaw:
    """``var_i(t1, ..., tn) ≈ t_i`` for the i-th variable element at ``context``."""

    index: int
    context: Context
    args: tuple[Term, ...]


@dataclass(frozen=True)
class CloneSubstLaw:
    """``f[σ](t1, ..., tm) ≈ f(σ1(t1, ..., tm), ..., σn(t1, ..., tm))``.

    ``element`` lives at (``context``; ``sort``), each σ_j at (``inner``; context_j),
    and the arguments fill ``inner``.
    """

    element: Hashable
    context: Context
    sort: Sort
    sigma: tuple
    inner: Context
    args: tuple[Term, ...]


FreeDerivation = Union[Refl, Sym, Trans, CongOp, AxiomInstance, CongCloneApp, CloneVarLaw, CloneSubstLaw]

RULES = {
    Refl: "refl",
    Sym: "sym",
    Trans: "trans",
    CongOp: "cong",
    AxiomInstance: "axiom",
    CongCloneApp: "cong_clone",
    CloneVarLaw: "clone_var",
    CloneSubstLaw: "clone_subst",
}


def free_rule_name(node: FreeDerivation) -> str:
    return type(node).__name__


def free_count_nodes(node: FreeDerivation) -> int:
    match node:
        case Sym(proof):
            return 1 + free_count_nodes(proof)
        case Trans(left, right):
            return 1 + free_count_nodes(left) + free_count_nodes(right)
        case CongOp(premises=premises) | AxiomInstance(premises=premises) | CongCloneApp(premises=premises):
            return 1 + sum(free_count_nodes(p) for p in premises)
        case Refl() | CloneVarLaw() | CloneSubstLaw():
            return 1
    raise TypeError(f"Not a derivation node: {node!r}")


def conclude_free(
    free: FreeAlgebraClone, node: FreeDerivation, context: Context, path: tuple[int, ...] = ()
) -> Conclusion:
    base = free.base
    presentation = free.presentation
    signature = presentation.signature
    rule = free_rule_name(node)

    def fail(message: str) -> DerivationError:
        return DerivationError(message, path, rule)

    def checked(term: Term, where: Context, expected: Sort | None = None) -> tuple[Term, Sort]:
        try:
            return free_check_term(base, signature, where, term, expected)
        except SortError as exc:
            raise fail(str(exc)) from None

    def sub(child: FreeDerivation, where: Context, position: int) -> Conclusion:
        return conclude_free(free, child, where, path + (position,))

    def element(value: Hashable, ctx: Context, sort: Sort) -> None:
        if not base.member(value, ctx, sort):
            raise fail(f"{value!r} is not an element of {base.name} at ({format_context(ctx)}; {sort})")

    def arguments(args: tuple[Term, ...], sorts: Context) -> tuple[Term, ...]:
        if len(args) != len(sorts):
            raise fail(f"expected {len(sorts)} arguments for [{format_context(sorts)}], got {len(args)}")
        return tuple(checked(arg, context, sort)[0] for arg, sort in zip(args, sorts))

    match node:
        case Refl(term):
            term, sort = checked(term, context)
            return Conclusion(term, term, sort)
        case Sym(proof):
            inner = sub(proof, context, 1)
            return Conclusion(inner.rhs, inner.lhs, inner.sort)
        case Trans(left, right):
            first = sub(left, context, 1)
            second = sub(right, context, 2)
            if first.sort != second.sort:
                raise fail(f"sorts {first.sort} and {second.sort} differ")
            if not free_term_eq(base, first.rhs, second.lhs):
                raise fail(f"middle terms disagree: {show(first.rhs)} vs {show(second.lhs)}")
            return Conclusion(first.lhs, second.rhs, first.sort)
        case CongOp(name, premises, params):
            op = signature.lookup(name)
            if op is None:
                raise fail(f"unknown operator {name}")
            if len(params) != len(op.params):
                raise fail(f"{name} needs its {len(op.params)} sort parameters spelled out")
            slots, output = op.arity(params)
            if len(premises) != len(slots):
                raise fail(f"{name} takes {len(slots)} premises, got {len(premises)}")
            parts = []
            for position, (premise, slot) in enumerate(zip(premises, slots), start=1):
                part = sub(premise, context + slot.binder, position)
                if part.sort != slot.sort:
                    raise fail(f"premise {position} has sort {part.sort}, expected {slot.sort}")
                parts.append(part)
            binders = tuple(slot.binder for slot in slots) if op.shape.binds else ()
            return Conclusion(
                Op(name, tuple(p.lhs for p in parts), params, binders),
                Op(name, tuple(p.rhs for p in parts), params, binders),
                output,
            )
        case CongCloneApp(value, ctx, sort, premises):
            element(value, ctx, sort)
            if len(premises) != len(ctx):
                raise fail(f"expected {len(ctx)} premises, got {len(premises)}")
            parts = []
            for position, (premise, entry) in enumerate(zip(premises, ctx), start=1):
                part = sub(premise, context, position)
                if part.sort != entry:
                    raise fail(f"premise {position} has sort {part.sort}, expected {entry}")
                parts.append(part)
            return Conclusion(
                CloneApp(value, ctx, sort, tuple(p.lhs for p in parts)),
                CloneApp(value, ctx, sort, tuple(p.rhs for p in parts)),
                sort,
            )
        case AxiomInstance(name, left, params, right, premises):
            try:
                equation = so_equation_instance(presentation.equation(name), params)
            except PresentationError as exc:
                raise fail(str(exc)) from None
            metas = equation.metas
            if len(left) != len(metas):
                raise fail(f"{name} needs {len(metas)} instantiations, got {len(left)}")
            lefts = tuple(checked(t, context + m.params, m.sort)[0] for t, m in zip(left, metas))
            if premises:
                if len(premises) != len(metas):
                    raise fail(f"{name} needs one premise per metavariable")
                rights = []
                for position, (premise, meta, start) in enumerate(zip(premises, metas, lefts), start=1):
                    part = sub(premise, context + meta.params, position)
                    if part.sort != meta.sort or not free_term_eq(base, part.lhs, start):
                        raise fail(f"premise {position} does not start at the instantiation of {meta.name}")
                    rights.append(part.rhs)
                rights = tuple(rights)
                if right is not None:
                    declared = tuple(checked(t, context + m.params, m.sort)[0] for t, m in zip(right, metas))
                    if not all(free_term_eq(base, a, b) for a, b in zip(declared, rights)):
                        raise fail("premises do not end at the declared right instantiations")
            else:
                rights = lefts
                if right is not None:
                    declared = tuple(checked(t, context + m.params, m.sort)[0] for t, m in zip(right, metas))
                    if not all(free_term_eq(base, a, b) for a, b in zip(declared, lefts)):
                        raise fail("distinct right instantiations need premises")
            n = len(context)
            return Conclusion(so_metasubst(equation.lhs, lefts, n), so_metasubst(equation.rhs, rights, n), equation.sort)
        case CloneVarLaw(index, ctx, args):
            if index < 1 or index > len(ctx):
                raise fail(f"no variable #{index} in [{format_context(ctx)}]")
            args = arguments(args, ctx)
            variable = base.clone.var(ctx, index)
            return Conclusion(CloneApp(variable, ctx, ctx[index - 1], args), args[index - 1], ctx[index - 1])
        case CloneSubstLaw(value, ctx, sort, sigma, inner, args):
            element(value, ctx, sort)
            if len(sigma) != len(ctx):
                raise fail(f"σ has {len(sigma)} components for [{format_context(ctx)}]")
            for component, entry in zip(sigma, ctx):
                element(component, inner, entry)
            args = arguments(args, inner)
            try:
                composite = base.clone.subst(value, Substitution(inner, ctx, tuple(sigma)))
            except CloneError as exc:
                raise fail(str(exc)) from None
            spread = tuple(CloneApp(c, inner, entry, args) for c, entry in zip(sigma, ctx))
            return Conclusion(CloneApp(composite, inner, sort, args), CloneApp(value, ctx, sort, spread), sort)
    raise fail(f"unknown node {node!r}")


def check_free_derivation(
    free: FreeAlgebraClone,
    node: FreeDerivation,
    context: Context = (),
    lhs: Term | None = None,
    rhs: Term | None = None,
) -> Verdict:
    """Replay ``node``; when ``lhs``/``rhs`` are given the conclusion must match them."""
    try:
        conclusion = conclude_free(free, node, context)
        for side, claimed, found in (("lhs", lhs, conclusion.lhs), ("rhs", rhs, conclusion.rhs)):
            if claimed is None:
                continue
            claimed, _ = free_check_term(free.base, free.presentation.signature, context, claimed, conclusion.sort)
            if not free_term_eq(free.base, claimed, found):
                raise DerivationError(f"concludes {show(found)}, claimed {show(claimed)}", (), f"conclusion {side}")
    except (DerivationError, SortError) as exc:
        path = getattr(exc, "path", ())
        rule = getattr(exc, "rule", "conclusion")
        logger.info("Free derivation rejected: %s", exc)
        return Verdict(False, path=path, rule=rule, reason=str(exc))
    return Verdict(True, conclusion, nodes=free_count_nodes(node))


def free_derivation_to_dict(node: FreeDerivation) -> dict:
    data: dict[str, Any] = {"rule": RULES.get(type(node), "")}
    match node:
        case Refl(term):
            data["term"] = term_to_json(term)
        case Sym(proof):
            data["children"] = [free_derivation_to_dict(proof)]
        case Trans(left, right):
            data["children"] = [free_derivation_to_dict(left), free_derivation_to_dict(right)]
        case CongOp(name, premises, params):
            data["op"] = name
            data["params"] = [sort_to_json(p) for p in params]
            data["children"] = [free_derivation_to_dict(p) for p in premises]
        case AxiomInstance(name, left, params, right, premises):
            data["equation"] = name
            data["params"] = [sort_to_json(p) for p in params]
            data["left"] = [term_to_json(t) for t in left]
            if right is not None:
                data["right"] = [term_to_json(t) for t in right]
            data["children"] = [free_derivation_to_dict(p) for p in premises]
        case CongCloneApp(value, ctx, sort, premises):
            data["element"] = element_to_json(value)
            data["context"] = context_to_json(ctx)
            data["sort"] = sort_to_json(sort)
            data["children"] = [free_derivation_to_dict(p) for p in premises]
        case CloneVarLaw(index, ctx, args):
            data["index"] = index
            data["context"] = context_to_json(ctx)
            data["args"] = [term_to_json(a) for a in args]
        case CloneSubstLaw(value, ctx, sort, sigma, inner, args):
            data["element"] = element_to_json(value)
            data["context"] = context_to_json(ctx)
            data["sort"] = sort_to_json(sort)
            data["sigma"] = [element_to_json(c) for c in sigma]
            data["inner"] = context_to_json(inner)
            data["args"] = [term_to_json(a) for a in args]
        case _:
            raise CodecError(f"Not a derivation node: {node!r}")
    return data


def free_derivation_from_dict(data: dict) -> FreeDerivation:
    if not isinstance(data, dict) or "rule" not in data:
        raise CodecError(f"Not a derivation node: {data!r}")
    rule = data["rule"]
    children = tuple(free_derivation_from_dict(child) for child in data.get("children", []))
    arity = {"refl": 0, "sym": 1, "trans": 2, "clone_var": 0, "clone_subst": 0}.get(rule)
    if arity is not None and len(children) != arity:
        raise CodecError(f"Rule {rule} takes {arity} children, got {len(children)}")
    params = tuple(sort_from_json(p) for p in data.get("params", []))
    args = tuple(term_from_json(a) for a in data.get("args", []))
    try:
        match rule:
            case "refl":
                return Refl(term_from_json(data["term"]))
            case "sym":
                return Sym(children[0])
            case "trans":
                return Trans(children[0], children[1])
            case "cong":
                return CongOp(data["op"], children, params)
            case "axiom":
                right = data.get("right")
                return AxiomInstance(
                    data["equation"],
                    tuple(term_from_json(t) for t in data.get("left", [])),
                    params,
                    tuple(term_from_json(t) for t in right) if right is not None else None,
                    children,
                )
            case "cong_clone":
                return CongCloneApp(
                    element_from_json(data["element"]),
                    context_from_json(data["context"]),
                    sort_from_json(data["sort"]),
                    children,
                )
            case "clone_var":
                return CloneVarLaw(int(data["index"]), context_from_json(data["context"]), args)
            case "clone_subst":
                return CloneSubstLaw(
                    element_from_json(data["element"]),
                    context_from_json(data["context"]),
                    sort_from_json(data["sort"]),
                    tuple(element_from_json(c) for c in data["sigma"]),
                    context_from_json(data["inner"]),
                    args,
                )
    except KeyError as exc:
        raise CodecError(f"Rule {rule} is missing field {exc}") from None
    raise CodecError(f"Unknown rule {rule!r}")
