"""Proof trees for the first-order equational logic and their checker.

A derivation concludes ``Γ ⊢ lhs ≈ rhs : B``. The checker recomputes each
conclusion bottom-up and reports the first node (as a child-index path) whose
rule does not apply.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Union

from clonekit.core.codec import CodecError, context_to_json, sort_from_json, sort_to_json, term_from_json, term_to_json
from clonekit.core.sorts import Context, Sort, SortError, format_context
from clonekit.core.terms import Op, Term, show
from clonekit.presentations.first_order import FoPresentation, PresentationError, fo_check, fo_subst

logger = logging.getLogger(__name__)


class DerivationError(ValueError):
    def __init__(self, message: str, path: tuple[int, ...] = (), rule: str = "") -> None:
        self.path = path
        self.rule = rule
        where = "/".join(str(p) for p in path) or "root"
        super().__init__(f"{rule or 'node'} at {where}: {message}")


@dataclass(frozen=True)
class Refl:
    term: Term


@dataclass(frozen=True)
class Sym:
    proof: FoDerivation


@dataclass(frozen=True)
class Trans:
    left: FoDerivation
    right: FoDerivation


@dataclass(frozen=True)
class CongOp:
    name: str
    premises: tuple[FoDerivation, ...]
    params: tuple[Sort, ...] = ()


@dataclass(frozen=True)
class AxiomInstance:
    """An equation instance: ``left`` is substituted into its lhs, ``right`` into its rhs.

    With no premises ``right`` defaults to ``left``; otherwise there is one premise
    ``left_i ≈ right_i`` per context entry.
    """

    equation: str
    left: tuple[Term, ...]
    params: tuple[Sort, ...] = ()
    right: tuple[Term, ...] | None = None
    premises: tuple[FoDerivation, ...] = ()


FoDerivation = Union[Refl, Sym, Trans, CongOp, AxiomInstance]


@dataclass(frozen=True)
class Conclusion:
    lhs: Term
    rhs: Term
    sort: Sort


@dataclass
class Verdict:
    accepted: bool
    conclusion: Conclusion | None = None
    path: tuple[int, ...] = ()
    rule: str = ""
    reason: str = ""
    nodes: int = 0
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        data: dict = {"accepted": self.accepted, "nodes": self.nodes}
        if self.conclusion is not None:
            data["lhs"] = show(self.conclusion.lhs)
            data["rhs"] = show(self.conclusion.rhs)
            data["sort"] = str(self.conclusion.sort)
        if not self.accepted:
            data["path"] = list(self.path)
            data["rule"] = self.rule
            data["reason"] = self.reason
        data.update(self.extra)
        return data


def rule_name(node: FoDerivation) -> str:
    return type(node).__name__


def count_nodes(node: FoDerivation) -> int:
    match node:
        case Refl():
            return 1
        case Sym(proof):
            return 1 + count_nodes(proof)
        case Trans(left, right):
            return 1 + count_nodes(left) + count_nodes(right)
        case CongOp(premises=premises) | AxiomInstance(premises=premises):
            return 1 + sum(count_nodes(p) for p in premises)
    raise TypeError(f"Not a derivation node: {node!r}")


def conclude_fo(
    presentation: FoPresentation, node: FoDerivation, context: Context, path: tuple[int, ...] = ()
) -> Conclusion:
    signature = presentation.signature
    rule = rule_name(node)

    def checked(term: Term, expected: Sort | None = None) -> tuple[Term, Sort]:
        try:
            return fo_check(signature, context, term, expected)
        except SortError as exc:
            raise DerivationError(str(exc), path, rule) from None

    match node:
        case Refl(term):
            term, sort = checked(term)
            return Conclusion(term, term, sort)
        case Sym(proof):
            inner = conclude_fo(presentation, proof, context, path + (1,))
            return Conclusion(inner.rhs, inner.lhs, inner.sort)
        case Trans(left, right):
            first = conclude_fo(presentation, left, context, path + (1,))
            second = conclude_fo(presentation, right, context, path + (2,))
            if first.sort != second.sort:
                raise DerivationError(f"sorts {first.sort} and {second.sort} differ", path, rule)
            if first.rhs != second.lhs:
                raise DerivationError(
                    f"middle terms disagree: {show(first.rhs)} vs {show(second.lhs)}", path, rule
                )
            return Conclusion(first.lhs, second.rhs, first.sort)
        case CongOp(name, premises, params):
            parts = [conclude_fo(presentation, p, context, path + (i,)) for i, p in enumerate(premises, start=1)]
            lhs, sort = checked(Op(name, tuple(c.lhs for c in parts), params))
            rhs, _ = checked(Op(name, tuple(c.rhs for c in parts), params), sort)
            return Conclusion(lhs, rhs, sort)
        case AxiomInstance(name, left, params, right, premises):
            try:
                equation = presentation.equation(name).instantiate(params)
            except PresentationError as exc:
                raise DerivationError(str(exc), path, rule) from None
            if len(left) != len(equation.context):
                raise DerivationError(
                    f"{name} needs {len(equation.context)} terms for [{format_context(equation.context)}], got {len(left)}",
                    path,
                    rule,
                )
            lefts = tuple(checked(t, sort)[0] for t, sort in zip(left, equation.context))
            if premises:
                if len(premises) != len(equation.context):
                    raise DerivationError(f"{name} needs one premise per context entry", path, rule)
                parts = [
                    conclude_fo(presentation, p, context, path + (i,)) for i, p in enumerate(premises, start=1)
                ]
                for position, (part, term, sort) in enumerate(zip(parts, lefts, equation.context), start=1):
                    if part.lhs != term or part.sort != sort:
                        raise DerivationError(f"premise {position} does not start at the instantiating term", path, rule)
                rights = tuple(part.rhs for part in parts)
                if right is not None and tuple(checked(t)[0] for t in right) != rights:
                    raise DerivationError("premises do not end at the declared right terms", path, rule)
            else:
                rights = lefts if right is None else tuple(checked(t, s)[0] for t, s in zip(right, equation.context))
                if rights != lefts:
                    raise DerivationError("distinct right terms need premises", path, rule)
            return Conclusion(fo_subst(equation.lhs, lefts), fo_subst(equation.rhs, rights), equation.sort)
    raise DerivationError(f"unknown node {node!r}", path, rule)


def check_fo_derivation(
    presentation: FoPresentation, node: FoDerivation, context: Context = ()
) -> Verdict:
    try:
        conclusion = conclude_fo(presentation, node, context)
    except DerivationError as exc:
        logger.info("Derivation rejected: %s", exc)
        return Verdict(False, path=exc.path, rule=exc.rule, reason=str(exc))
    return Verdict(True, conclusion, nodes=count_nodes(node))


def subst_derivation(node: FoDerivation, components: tuple[Term, ...]) -> FoDerivation:
    """The same proof with ``components`` substituted for its variables."""

    def terms(found: tuple[Term, ...]) -> tuple[Term, ...]:
        return tuple(fo_subst(t, components) for t in found)

    match node:
        case Refl(term):
            return Refl(fo_subst(term, components))
        case Sym(proof):
            return Sym(subst_derivation(proof, components))
        case Trans(left, right):
            return Trans(subst_derivation(left, components), subst_derivation(right, components))
        case CongOp(name, premises, params):
            return CongOp(name, tuple(subst_derivation(p, components) for p in premises), params)
        case AxiomInstance(name, left, params, right, premises):
            return AxiomInstance(
                name,
                terms(left),
                params,
                None if right is None else terms(right),
                tuple(subst_derivation(p, components) for p in premises),
            )
    raise TypeError(f"Not a derivation node: {node!r}")


def chain(steps: list[FoDerivation], start: Term) -> FoDerivation:
    """Compose a list of single-step proofs with Trans; an empty list is Refl."""
    if not steps:
        return Refl(start)
    proof = steps[0]
    for step in steps[1:]:
        proof = Trans(proof, step)
    return proof


def fo_derivation_to_dict(node: FoDerivation) -> dict:
    match node:
        case Refl(term):
            return {"rule": "refl", "term": term_to_json(term)}
        case Sym(proof):
            return {"rule": "sym", "children": [fo_derivation_to_dict(proof)]}
        case Trans(left, right):
            return {"rule": "trans", "children": [fo_derivation_to_dict(left), fo_derivation_to_dict(right)]}
        case CongOp(name, premises, params):
            return {
                "rule": "cong",
                "op": name,
                "params": [sort_to_json(p) for p in params],
                "children": [fo_derivation_to_dict(p) for p in premises],
            }
        case AxiomInstance(name, left, params, right, premises):
            data: dict[str, Any] = {
                "rule": "axiom",
                "equation": name,
                "params": [sort_to_json(p) for p in params],
                "left": [term_to_json(t) for t in left],
                "children": [fo_derivation_to_dict(p) for p in premises],
            }
            if right is not None:
                data["right"] = [term_to_json(t) for t in right]
            return data
    raise CodecError(f"Not a derivation node: {node!r}")


def fo_derivation_from_dict(data: dict) -> FoDerivation:
    if not isinstance(data, dict) or "rule" not in data:
        raise CodecError(f"Not a derivation node: {data!r}")
    children = [fo_derivation_from_dict(child) for child in data.get("children", [])]
    params = tuple(sort_from_json(p) for p in data.get("params", []))
    arity = {"refl": 0, "sym": 1, "trans": 2}.get(data["rule"])
    if arity is not None and len(children) != arity:
        raise CodecError(f"Rule {data['rule']} takes {arity} children, got {len(children)}")
    match data["rule"]:
        case "refl":
            return Refl(term_from_json(data["term"]))
        case "sym":
            return Sym(children[0])
        case "trans":
            return Trans(children[0], children[1])
        case "cong":
            return CongOp(data["op"], tuple(children), params)
        case "axiom":
            right = data.get("right")
            return AxiomInstance(
                data["equation"],
                tuple(term_from_json(t) for t in data.get("left", [])),
                params,
                tuple(term_from_json(t) for t in right) if right is not None else None,
                tuple(children),
            )
    raise CodecError(f"Unknown rule {data['rule']!r}")


def conclusion_to_dict(conclusion: Conclusion, context: Context) -> dict:
    return {
        "context": context_to_json(context),
        "lhs": term_to_json(conclusion.lhs),
        "rhs": term_to_json(conclusion.rhs),
        "sort": sort_to_json(conclusion.sort),
    }
