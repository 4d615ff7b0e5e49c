"""Collapsing nested base-clone applications into one element, with proofs.

A cluster is a maximal nest of ``CloneApp`` nodes; its leaves are the first
subterms below it that are not clone applications. Collapsing proves
``t ≈ s(ℓ1, ..., ℓm)`` for a single element ``s`` over the deduplicated leaves,
using only congruence and the two collapse rules.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Hashable, Sequence

from clonekit.core.clones import Substitution
from clonekit.core.sorts import Context, Sort
from clonekit.core.terms import CloneApp, Term
from clonekit.free.base import BaseAdapter
from clonekit.free.derivations import CloneSubstLaw, CloneVarLaw, CongCloneApp, FreeDerivation
from clonekit.presentations.derivations import Sym, Trans

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Leaves:
    terms: tuple[Term, ...]
    context: Context

    def position(self, term: Term) -> int | None:
        for i, leaf in enumerate(self.terms, start=1):
            if leaf == term:
                return i
        return None


def cluster_leaves(term: Term, sort: Sort) -> Leaves:
    terms: list[Term] = []
    sorts: list[Sort] = []

    def walk(t: Term, s: Sort) -> None:
        if isinstance(t, CloneApp):
            for arg, entry in zip(t.args, t.context):
                walk(arg, entry)
        elif t not in terms:
            terms.append(t)
            sorts.append(s)

    walk(term, sort)
    return Leaves(tuple(terms), tuple(sorts))


def collapse(base: BaseAdapter, term: Term, sort: Sort, leaves: Leaves) -> tuple[Hashable, FreeDerivation]:
    """An element s at (leaves; sort) and a proof of ``term ≈ s(leaves)``.

    Subterms found among the leaves are treated as leaves even when they are
    clone applications themselves.
    """
    position = leaves.position(term)
    if position is not None:
        element = base.clone.var(leaves.context, position)
        return element, Sym(CloneVarLaw(position, leaves.context, leaves.terms))
    if not isinstance(term, CloneApp):
        raise ValueError(f"Leaf {term!r} is missing from the leaf list")
    parts = [collapse(base, arg, entry, leaves) for arg, entry in zip(term.args, term.context)]
    sigma = tuple(element for element, _ in parts)
    composite = base.clone.subst(term.element, Substitution(leaves.context, term.context, sigma))
    proof = Trans(
        CongCloneApp(term.element, term.context, term.sort, tuple(proof for _, proof in parts)),
        Sym(CloneSubstLaw(term.element, term.context, term.sort, sigma, leaves.context, leaves.terms)),
    )
    return composite, proof


def embed_witness(
    base: BaseAdapter, element: Hashable, context: Context, sort: Sort, args: Sequence[Term]
) -> tuple[Term, FreeDerivation]:
    """The unfolded rendering u of ``element(args)`` and a proof of ``u ≈ element(args)``.

    The proof ends at an element equal to ``element`` in the base clone.
    """
    leaves = Leaves(tuple(args), context)
    unfolded = base.unfold(element, context, sort, leaves.terms)
    _, proof = collapse(base, unfolded, sort, leaves)
    return unfolded, proof


@dataclass(frozen=True)
class ClusterNormal:
    term: Term
    proof: FreeDerivation
    leaf: int | None


def normalize_cluster(base: BaseAdapter, term: Term, sort: Sort) -> ClusterNormal:
    """Collapse, pick the base clone's canonical element, and unfold it again.

    When the canonical element is a variable the result is that leaf.
    """
    leaves = cluster_leaves(term, sort)
    element, proof = collapse(base, term, sort, leaves)
    canonical = base.canonical(element, leaves.context, sort)
    position = base.as_variable(canonical, leaves.context)
    if position is not None:
        step = CloneVarLaw(position, leaves.context, leaves.terms)
        return ClusterNormal(leaves.terms[position - 1], Trans(proof, step), position)
    unfolded = base.unfold(canonical, leaves.context, sort, leaves.terms)
    _, back = collapse(base, unfolded, sort, leaves)
    return ClusterNormal(unfolded, Trans(proof, Sym(back)), None)
