"""Bounded proof search for ≈ between free terms.

Steps are equation instances found by pattern matching (each metavariable
applied to distinct bound variables) and collapses of base-clone clusters. Both
endpoints are simplified with the same steps until they meet.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterator

from clonekit.config import Budget, default_budget
from clonekit.core.search import meet_in_middle
from clonekit.core.sorts import Context, Sort, match_sort
from clonekit.core.terms import CloneApp, MetaApp, Op, Term, Var, free_indices, substitute, term_size
from clonekit.free.clusters import normalize_cluster
from clonekit.free.derivations import CongCloneApp, FreeDerivation
from clonekit.free.terms import free_check_term, free_term_eq
from clonekit.presentations.derivations import AxiomInstance, CongOp, Refl, Sym, Trans, chain
from clonekit.second_order.syntax import SoEquation, SoPresentation, so_equation_instance, so_metasubst

if TYPE_CHECKING:
    from clonekit.free.algebra import FreeAlgebraClone

logger = logging.getLogger(__name__)

EQUAL = "equal"
UNKNOWN = "unknown"


def _pattern_metas(pattern: Term) -> set[int] | None:
    """Metavariables of a pattern, or None when some metavariable is applied to a non-pattern."""
    match pattern:
        case Var():
            return set()
        case MetaApp(meta, args):
            indices = [arg.index for arg in args if isinstance(arg, Var)]
            if len(indices) != len(args) or len(set(indices)) != len(indices):
                return None
            return {meta}
        case Op(args=args):
            found: set[int] = set()
            for arg in args:
                inner = _pattern_metas(arg)
                if inner is None:
                    return None
                found |= inner
            return found
    return None


@dataclass(frozen=True)
class Orientation:
    equation: SoEquation
    reversed: bool = False

    @property
    def pattern(self) -> Term:
        return self.equation.rhs if self.reversed else self.equation.lhs


def orientations(presentation: SoPresentation) -> tuple[Orientation, ...]:
    """Both directions of each equation whose matching side is an operator pattern binding every metavariable."""
    found = []
    for eq in presentation.equations:
        for flipped in (False, True):
            side = Orientation(eq, flipped)
            if isinstance(side.pattern, MetaApp):
                continue
            metas = _pattern_metas(side.pattern)
            if metas is None or metas != set(range(1, len(eq.metas) + 1)):
                continue
            found.append(side)
    return tuple(found)


def pattern_match(
    pattern: Term, term: Term, outer: int, params: frozenset[str]
) -> tuple[dict[str, Sort], dict[int, Term]] | None:
    """Match an equation side against ``term`` living in a context of length ``outer``.

    Returns the sort-parameter binding and the instantiation of each metavariable,
    which lives in the outer context followed by the metavariable's parameters.
    """
    binding: dict[str, Sort] = {}
    found: dict[int, Term] = {}

    def go(p: Term, t: Term, depth: int) -> bool:
        match p:
            case Var(index):
                return t == Var(outer + index)
            case MetaApp(meta, args):
                positions = {outer + arg.index: k for k, arg in enumerate(args, start=1)}
                width = outer + depth
                for index in free_indices(t, width):
                    if index > outer and index not in positions:
                        return False
                components = tuple(
                    Var(i) if i <= outer else Var(outer + positions[i]) if i in positions else Var(0)
                    for i in range(1, width + 1)
                )
                candidate = substitute(t, components, outer + len(args))
                if meta in found:
                    return found[meta] == candidate
                found[meta] = candidate
                return True
            case Op(name, args, p_params, p_binders):
                if not isinstance(t, Op) or t.name != name or len(t.args) != len(args):
                    return False
                if len(p_params) != len(t.params):
                    return False
                for template, actual in zip(p_params, t.params):
                    if not match_sort(template, actual, params, binding):
                        return False
                return all(go(pa, ta, depth + len(p.binder(i))) for i, (pa, ta) in enumerate(zip(args, t.args)))
        return False

    if not go(pattern, term, 0):
        return None
    return binding, found


@dataclass(frozen=True)
class Position:
    path: tuple[int, ...]
    term: Term
    outer: int


def positions(term: Term, outer: int = 0, path: tuple[int, ...] = ()) -> Iterator[Position]:
    yield Position(path, term, outer)
    match term:
        case Op(args=args):
            for i, arg in enumerate(args):
                yield from positions(arg, outer + len(term.binder(i)), path + (i,))
        case CloneApp(args=args):
            for i, arg in enumerate(args):
                yield from positions(arg, outer, path + (i,))


def replace_at(term: Term, path: tuple[int, ...], new: Term) -> Term:
    if not path:
        return new
    head, rest = path[0], path[1:]
    args = list(term.args)
    args[head] = replace_at(args[head], rest, new)
    match term:
        case Op(name, _, params, binders):
            return Op(name, tuple(args), params, binders)
        case CloneApp(element, context, sort, _):
            return CloneApp(element, context, sort, tuple(args))
    raise TypeError(f"Cannot descend into {term!r}")


def in_context(term: Term, path: tuple[int, ...], proof: FreeDerivation) -> FreeDerivation:
    """Lift a proof about the subterm at ``path`` to the whole term by congruence."""
    if not path:
        return proof
    head, rest = path[0], path[1:]
    inner = in_context(term.args[head], rest, proof)
    premises = tuple(inner if i == head else Refl(arg) for i, arg in enumerate(term.args))
    match term:
        case Op(name, _, params, _):
            return CongOp(name, premises, params)
        case CloneApp(element, context, sort, _):
            return CongCloneApp(element, context, sort, premises)
    raise TypeError(f"Cannot descend into {term!r}")


def _cluster_roots(presentation: SoPresentation, term: Term, sort: Sort) -> Iterator[tuple[tuple[int, ...], Term, Sort]]:
    """Roots of maximal clusters with their sorts."""

    def walk(t: Term, s: Sort, path: tuple[int, ...], inside: bool) -> Iterator:
        match t:
            case CloneApp(_, context, _, args):
                if not inside:
                    yield path, t, s
                for i, (arg, entry) in enumerate(zip(args, context)):
                    yield from walk(arg, entry, path + (i,), True)
            case Op(name, args, params):
                slots, _ = presentation.signature.lookup(name).arity(params)
                for i, (arg, slot) in enumerate(zip(args, slots)):
                    yield from walk(arg, slot.sort, path + (i,), False)

    return walk(term, sort, (), False)


def successors(free: FreeAlgebraClone, sort: Sort, rules: tuple[Orientation, ...]):
    presentation = free.presentation

    def step(term: Term) -> Iterator[tuple[Term, FreeDerivation]]:
        for position in positions(term):
            for rule in rules:
                eq = rule.equation
                matched = pattern_match(rule.pattern, position.term, position.outer, frozenset(eq.params))
                if matched is None:
                    continue
                binding, found = matched
                if any(p not in binding for p in eq.params):
                    continue
                params = tuple(binding[p] for p in eq.params)
                instance = so_equation_instance(eq, params)
                instantiation = tuple(found[i] for i in range(1, len(eq.metas) + 1))
                target = so_metasubst(
                    instance.lhs if rule.reversed else instance.rhs, instantiation, position.outer
                )
                proof: FreeDerivation = AxiomInstance(eq.name, instantiation, params)
                if rule.reversed:
                    proof = Sym(proof)
                yield replace_at(term, position.path, target), in_context(term, position.path, proof)
        for path, root, root_sort in _cluster_roots(presentation, term, sort):
            normal = normalize_cluster(free.base, root, root_sort)
            if normal.term == root:
                continue
            yield replace_at(term, path, normal.term), in_context(term, path, normal.proof)

    return step


@dataclass
class FreeSearchResult:
    verdict: str
    derivation: FreeDerivation | None = None
    expanded: int = 0

    @property
    def found(self) -> bool:
        return self.verdict == EQUAL

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "expanded": self.expanded}


def search_free_equal(
    free: FreeAlgebraClone,
    left: Term,
    right: Term,
    context: Context = (),
    sort: Sort | None = None,
    budget: Budget | None = None,
) -> FreeSearchResult:
    budget = budget or default_budget()
    signature = free.presentation.signature
    left, sort = free_check_term(free.base, signature, context, left, sort)
    right, _ = free_check_term(free.base, signature, context, right, sort)
    if free_term_eq(free.base, left, right):
        return FreeSearchResult(EQUAL, Refl(left), 0)
    meeting = meet_in_middle(
        left, right, successors(free, sort, orientations(free.presentation)), term_size, budget.search_nodes
    )
    if not meeting.found:
        logger.info("No free derivation within %s expansions", budget.search_nodes)
        return FreeSearchResult(UNKNOWN, None, meeting.expanded)
    forward = chain(meeting.left_steps, left)
    backward = chain(meeting.right_steps, right)
    if not meeting.right_steps:
        proof = forward
    elif not meeting.left_steps:
        proof = Sym(backward)
    else:
        proof = Trans(forward, Sym(backward))
    return FreeSearchResult(EQUAL, proof, meeting.expanded)
