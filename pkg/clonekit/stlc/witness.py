"""A proof-producing twin of the NbE normalizer.

``witness_normalize`` reaches the same η-long β-normal form as
``nbe_normalize`` by syntactic steps (β at the head of an application spine,
η at arrow sorts, cluster normalization for base-clone applications) and
records every step as a free derivation that ``check_free_derivation`` replays.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

from clonekit.core.sorts import BASE, Context, Sort, is_arrow
from clonekit.core.terms import CloneApp, Op, Term, Var, show, substitute, variables, weaken
from clonekit.free.algebra import FreeAlgebraClone
from clonekit.free.base import BaseAdapter
from clonekit.free.clusters import normalize_cluster
from clonekit.free.derivations import CongCloneApp, FreeDerivation, free_derivation_to_dict
from clonekit.free.search import in_context
from clonekit.presentations.derivations import AxiomInstance, CongOp, Refl, Sym, Trans
from clonekit.presentations.stock import GET, put_name
from clonekit.stlc.nbe import abstraction, application

logger = logging.getLogger(__name__)

Step = tuple[Term, FreeDerivation]


def _then(first: FreeDerivation, second: FreeDerivation) -> FreeDerivation:
    if isinstance(first, Refl):
        return second
    if isinstance(second, Refl):
        return first
    return Trans(first, second)


@dataclass(frozen=True)
class Spine:
    head: Term
    args: tuple[Term, ...]
    sorts: tuple[tuple[Sort, Sort], ...]


def spine(term: Term) -> Spine:
    args: list[Term] = []
    sorts: list[tuple[Sort, Sort]] = []
    while isinstance(term, Op) and term.name == "app":
        head, arg = term.args
        args.append(arg)
        sorts.append(term.params)
        term = head
    return Spine(term, tuple(reversed(args)), tuple(reversed(sorts)))


def rebuild(head: Term, args: Sequence[Term], sorts: Sequence[tuple[Sort, Sort]]) -> Term:
    for arg, (dom, cod) in zip(args, sorts):
        head = application(dom, cod, head, arg)
    return head


class Witness:
    def __init__(self, base: BaseAdapter) -> None:
        self.base = base

    def normal(self, context: Context, term: Term, sort: Sort) -> Step:
        if not is_arrow(sort):
            return self.ground(context, term)
        dom, cod = sort.args
        extended = context + (dom,)
        if isinstance(term, Op) and term.name == "abs":
            body, proof = self.normal(extended, term.args[0], cod)
            return abstraction(dom, cod, body), CongOp("abs", (proof,), (dom, cod))
        n = len(context)
        applied = application(dom, cod, weaken(term, n, n + 1), Var(n + 1))
        body, proof = self.normal(extended, applied, cod)
        return abstraction(dom, cod, body), Trans(Sym(AxiomInstance("eta", (term,), (dom, cod))), CongOp("abs", (proof,), (dom, cod)))

    def ground(self, context: Context, term: Term) -> Step:
        shape = spine(term)
        head = shape.head
        if isinstance(head, Op) and head.name == "abs":
            return self.beta(context, term, shape)
        if isinstance(head, Var):
            neutral, proof = self.arguments(context, head, Refl(head), shape)
            done, last = self.complete(neutral)
            return done, _then(proof, last)
        if isinstance(head, CloneApp):
            if not shape.args:
                return self.cluster(context, head)
            resolved, proof = self.cluster(context, head)
            if isinstance(resolved, Op) and resolved.name == "abs":
                moved = rebuild(resolved, shape.args, shape.sorts)
                rest, tail = self.beta(context, moved, spine(moved))
                return rest, _then(self.head_step(term, len(shape.args), proof), tail)
            neutral, args_proof = self.arguments(context, resolved, proof, shape)
            done, last = self.complete(neutral)
            return done, _then(args_proof, last)
        raise TypeError(f"Cannot normalize {term!r}")

    def head_step(self, term: Term, depth: int, proof: FreeDerivation) -> FreeDerivation:
        return in_context(term, (0,) * depth, proof)

    def beta(self, context: Context, term: Term, shape: Spine) -> Step:
        depth = len(shape.args) - 1
        dom, cod = shape.sorts[0]
        body = shape.head.args[0]
        arg = shape.args[0]
        reduced = substitute(body, variables(len(context)) + (arg,), len(context))
        moved = rebuild(reduced, shape.args[1:], shape.sorts[1:])
        step = in_context(term, (0,) * depth, AxiomInstance("beta", (body, arg), (dom, cod)))
        rest, tail = self.ground(context, moved)
        return rest, _then(step, tail)

    def arguments(self, context: Context, head: Term, head_proof: FreeDerivation, shape: Spine) -> Step:
        """Normalize the arguments of a neutral spine, starting from a proof of ``shape.head ≈ head``."""
        proof = head_proof
        for arg, (dom, cod) in zip(shape.args, shape.sorts):
            normal, arg_proof = self.normal(context, arg, dom)
            head = application(dom, cod, head, normal)
            if isinstance(proof, Refl) and isinstance(arg_proof, Refl):
                proof = Refl(head)
            else:
                proof = CongOp("app", (proof, arg_proof), (dom, cod))
        return head, proof

    def complete(self, neutral: Term) -> Step:
        normal = normalize_cluster(self.base, neutral, BASE)
        if normal.term == neutral:
            return neutral, Refl(neutral)
        return normal.term, normal.proof

    def cluster(self, context: Context, node: CloneApp) -> Step:
        parts = [self.normal(context, arg, entry) for arg, entry in zip(node.args, node.context)]
        inner = CloneApp(node.element, node.context, node.sort, tuple(t for t, _ in parts))
        if all(isinstance(p, Refl) for _, p in parts):
            proof: FreeDerivation = Refl(inner)
        else:
            proof = CongCloneApp(node.element, node.context, node.sort, tuple(p for _, p in parts))
        normal = normalize_cluster(self.base, inner, node.sort)
        if normal.term != inner:
            proof = _then(proof, normal.proof)
        if normal.leaf is not None:
            return normal.term, proof
        settled, last = self.settle(context, normal.term)
        return settled, _then(proof, last)

    def settle(self, context: Context, term: Term) -> Step:
        if not isinstance(term, CloneApp):
            return term, Refl(term)
        parts = []
        for arg, entry in zip(term.args, term.context):
            if isinstance(arg, CloneApp):
                inner, proof = self.settle(context, arg)
                if is_arrow(entry):
                    inner, more = self.expand(context, inner, entry)
                    proof = _then(proof, more)
                parts.append((inner, proof))
            else:
                parts.append((arg, Refl(arg)))
        settled = CloneApp(term.element, term.context, term.sort, tuple(t for t, _ in parts))
        if all(isinstance(p, Refl) for _, p in parts):
            return settled, Refl(settled)
        return settled, CongCloneApp(term.element, term.context, term.sort, tuple(p for _, p in parts))

    def expand(self, context: Context, neutral: Term, sort: Sort) -> Step:
        """η-long form of a neutral without touching its head."""
        if not is_arrow(sort):
            return self.complete(neutral)
        dom, cod = sort.args
        n = len(context)
        extended = context + (dom,)
        fresh, fresh_proof = self.expand(extended, Var(n + 1), dom)
        head = weaken(neutral, n, n + 1)
        applied = application(dom, cod, head, fresh)
        body, body_proof = self.expand(extended, applied, cod)
        if isinstance(fresh_proof, Refl):
            inside = body_proof
        else:
            inside = _then(CongOp("app", (Refl(head), fresh_proof), (dom, cod)), body_proof)
        eta = Sym(AxiomInstance("eta", (neutral,), (dom, cod)))
        return abstraction(dom, cod, body), Trans(eta, CongOp("abs", (inside,), (dom, cod)))


def witness_normalize(
    free: FreeAlgebraClone, term: Term, context: Context = (), sort: Sort | None = None
) -> tuple[Term, FreeDerivation]:
    """The normal form of ``term`` and a derivation of ``term ≈ normal``."""
    term, sort = free.check(term, context, sort)
    return Witness(free.base).normal(context, term, sort)


@dataclass(frozen=True)
class WitnessChain:
    name: str
    context: Context
    sort: Sort
    lhs: Term
    rhs: Term
    derivation: FreeDerivation

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": show(self.lhs),
            "rhs": show(self.rhs),
            "derivation": free_derivation_to_dict(self.derivation),
        }


def _gs_op(name: str, args: tuple[Term, ...]) -> CloneApp:
    return CloneApp(Op(name, variables(len(args))), (BASE,) * len(args), BASE, args)


def gs_witness_chains(free: FreeAlgebraClone, values: Sequence[str]) -> tuple[WitnessChain, ...]:
    """The three completion facts for global state over neutrals, each as a checkable derivation.

    * a neutral x is get(put_v1(x), ..., put_vk(x));
    * put_vi of a get selects the i-th branch;
    * get of completed branches flattens to one get of the selected puts.
    """
    k = len(values)
    witness = Witness(free.base)

    def fact(name: str, context: Context, lhs: Term, rhs: Term) -> WitnessChain:
        lhs, _ = free.check(lhs, context, BASE)
        rhs, _ = free.check(rhs, context, BASE)
        left_form, left_proof = witness.normal(context, lhs, BASE)
        right_form, right_proof = witness.normal(context, rhs, BASE)
        if left_form != right_form:
            raise ValueError(f"{name}: sides normalize apart")
        return WitnessChain(name, context, BASE, lhs, rhs, _then(left_proof, Sym(right_proof)))

    x = Var(1)
    completed = _gs_op(GET, tuple(_gs_op(put_name(v), (x,)) for v in values))
    chains = [fact("complete_neutral", (BASE,), x, completed)]

    branches = variables(k)
    context = (BASE,) * k
    for i, v in enumerate(values):
        lhs = _gs_op(put_name(v), (_gs_op(GET, branches),))
        rhs = _gs_op(GET, tuple(_gs_op(put_name(v), (branches[i],)) for _ in values))
        chains.append(fact(f"select_{v}", context, lhs, rhs))

    grid = variables(k * k)
    rows = tuple(
        _gs_op(GET, tuple(_gs_op(put_name(values[j]), (grid[i * k + j],)) for j in range(k))) for i in range(k)
    )
    flat = _gs_op(GET, tuple(_gs_op(put_name(values[i]), (grid[i * k + i],)) for i in range(k)))
    chains.append(fact("flatten_get", (BASE,) * (k * k), _gs_op(GET, rows), flat))
    return tuple(chains)

