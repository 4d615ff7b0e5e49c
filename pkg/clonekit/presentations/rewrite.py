from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from clonekit.config import Budget, default_budget
from clonekit.core.sorts import Context, Sort, match_sort
from clonekit.core.terms import Op, Term, Var, free_indices, instantiate_term, show
from clonekit.presentations.derivations import (
    AxiomInstance,
    CongOp,
    FoDerivation,
    Refl,
    Sym,
    chain,
    check_fo_derivation,
    subst_derivation,
)
from clonekit.presentations.first_order import FoEquation, FoPresentation, PresentationError, fo_subst

logger = logging.getLogger(__name__)

STRATEGIES = ("innermost", "outermost")
TRACE_TAIL = 20


class RewriteDivergence(RuntimeError):
    def __init__(self, message: str, trace: list[str]) -> None:
        self.trace = trace
        super().__init__(message)


@dataclass(frozen=True)
class RewriteRule:
    equation: str
    lhs: Term
    rhs: Term
    context: Context
    sort: Sort
    params: tuple[str, ...] = ()
    reversed: bool = False
    proof: FoDerivation | None = None

    def __post_init__(self) -> None:
        if isinstance(self.lhs, Var):
            raise PresentationError(f"Rule from {self.equation} has a bare variable on the left")
        unbound = set(range(1, len(self.context) + 1)) - free_indices(self.lhs, len(self.context))
        if unbound:
            raise PresentationError(
                f"Rule from {self.equation} leaves variables {sorted(unbound)} unbound on the left"
            )
        if self.proof is not None and self.params:
            raise PresentationError(f"Derived rule {self.equation} cannot take sort parameters")

    @property
    def derived(self) -> bool:
        return self.proof is not None

    @classmethod
    def from_equation(cls, equation: FoEquation, reversed: bool = False) -> RewriteRule:
        lhs, rhs = (equation.rhs, equation.lhs) if reversed else (equation.lhs, equation.rhs)
        return cls(equation.name, lhs, rhs, equation.context, equation.sort, equation.params, reversed)

    @classmethod
    def lemma(cls, name: str, lhs: Term, rhs: Term, context: Context, sort: Sort, proof: FoDerivation) -> RewriteRule:
        """A rule that is not an equation, carried by a derivation of ``lhs ≈ rhs`` over ``context``."""
        return cls(name, lhs, rhs, context, sort, proof=proof)


@dataclass(frozen=True)
class RewriteSystem:
    presentation: FoPresentation
    rules: tuple[RewriteRule, ...]
    strategy: str = "innermost"

    def __post_init__(self) -> None:
        if self.strategy not in STRATEGIES:
            raise PresentationError(f"Unknown rewrite strategy {self.strategy!r}; expected one of {STRATEGIES}")
        for rule in self.rules:
            if rule.derived:
                check_lemma(self.presentation, rule)
                continue
            if not self.presentation.has_equation(rule.equation):
                raise PresentationError(f"Rule cites {rule.equation}, which is not an equation of {self.presentation.name}")
            expected = RewriteRule.from_equation(self.presentation.equation(rule.equation), rule.reversed)
            if (expected.lhs, expected.rhs) != (rule.lhs, rule.rhs):
                raise PresentationError(f"Rule {rule.equation} is not an orientation of its equation")

    @classmethod
    def from_presentation(
        cls, presentation: FoPresentation, strategy: str = "innermost", names: Sequence[str] | None = None
    ) -> RewriteSystem:
        chosen = names if names is not None else [eq.name for eq in presentation.equations]
        rules = tuple(RewriteRule.from_equation(presentation.equation(name)) for name in chosen)
        return cls(presentation, rules, strategy)

    def with_strategy(self, strategy: str) -> RewriteSystem:
        return RewriteSystem(self.presentation, self.rules, strategy)

    @property
    def lemmas(self) -> tuple[RewriteRule, ...]:
        return tuple(rule for rule in self.rules if rule.derived)


def check_lemma(presentation: FoPresentation, rule: RewriteRule) -> None:
    if presentation.has_equation(rule.equation):
        raise PresentationError(f"Derived rule {rule.equation} shadows an equation of {presentation.name}")
    verdict = check_fo_derivation(presentation, rule.proof, rule.context)
    if not verdict.accepted:
        raise PresentationError(f"Derived rule {rule.equation} does not check: {verdict.reason}")
    if (verdict.conclusion.lhs, verdict.conclusion.rhs) != (rule.lhs, rule.rhs):
        raise PresentationError(
            f"Derived rule {rule.equation} proves {show(verdict.conclusion.lhs)} ≈ {show(verdict.conclusion.rhs)}"
        )


def match(
    pattern: Term, term: Term, params: frozenset[str], binding: dict[str, Sort], subst: dict[int, Term]
) -> bool:
    match pattern:
        case Var(index):
            bound = subst.get(index)
            if bound is None:
                subst[index] = term
                return True
            return bound == term
        case Op(name, args, pattern_params):
            if not isinstance(term, Op) or term.name != name or len(term.args) != len(args):
                return False
            if len(term.params) != len(pattern_params):
                return False
            for template, actual in zip(pattern_params, term.params):
                if not match_sort(template, actual, params, binding):
                    return False
            return all(match(p, t, params, binding, subst) for p, t in zip(args, term.args))
    return False


@dataclass(frozen=True)
class Redex:
    rule: RewriteRule
    position: tuple[int, ...]
    params: tuple[Sort, ...]
    components: tuple[Term, ...]
    result: Term


def try_rule(rule: RewriteRule, term: Term) -> Redex | None:
    binding: dict[str, Sort] = {}
    subst: dict[int, Term] = {}
    if not match(rule.lhs, term, frozenset(rule.params), binding, subst):
        return None
    components = tuple(subst[i] for i in range(1, len(rule.context) + 1))
    params = tuple(binding[p] for p in rule.params)
    result = fo_subst(instantiate_term(rule.rhs, binding), components)
    return Redex(rule, (), params, components, result)


def positions(term: Term, strategy: str) -> Iterator[tuple[tuple[int, ...], Term]]:
    """Subterm positions in the order the strategy visits them."""
    if strategy == "outermost":
        yield (), term
    if isinstance(term, Op):
        for i, arg in enumerate(term.args, start=1):
            for path, sub in positions(arg, strategy):
                yield (i,) + path, sub
    if strategy == "innermost":
        yield (), term


def subterm(term: Term, path: tuple[int, ...]) -> Term:
    for i in path:
        term = term.args[i - 1]
    return term


def replace_at(term: Term, path: tuple[int, ...], new: Term) -> Term:
    if not path:
        return new
    head, rest = path[0], path[1:]
    args = list(term.args)
    args[head - 1] = replace_at(args[head - 1], rest, new)
    return Op(term.name, tuple(args), term.params, term.binders)


def find_redex(system: RewriteSystem, term: Term) -> Redex | None:
    for path, sub in positions(term, system.strategy):
        for rule in system.rules:
            found = try_rule(rule, sub)
            if found is not None:
                return Redex(found.rule, path, found.params, found.components, found.result)
    return None


def axiom_step(rule: RewriteRule, params: tuple[Sort, ...], components: tuple[Term, ...]) -> FoDerivation:
    if rule.proof is not None:
        return subst_derivation(rule.proof, components)
    instance = AxiomInstance(rule.equation, components, params)
    return Sym(instance) if rule.reversed else instance


def in_context(term: Term, path: tuple[int, ...], proof: FoDerivation) -> FoDerivation:
    """Wrap a proof about the subterm at ``path`` in congruence steps up to the root."""
    if not path:
        return proof
    head, rest = path[0], path[1:]
    premises = tuple(
        in_context(arg, rest, proof) if i == head else Refl(arg) for i, arg in enumerate(term.args, start=1)
    )
    return CongOp(term.name, premises, term.params)


@dataclass(frozen=True)
class RewriteStep:
    equation: str
    position: tuple[int, ...]
    before: Term
    after: Term

    def to_dict(self) -> dict:
        return {
            "equation": self.equation,
            "position": list(self.position),
            "before": show(self.before),
            "after": show(self.after),
        }


@dataclass
class RewriteResult:
    term: Term
    steps: list[RewriteStep] = field(default_factory=list)
    derivation: FoDerivation | None = None


def rewrite_once(system: RewriteSystem, term: Term) -> tuple[Term, RewriteStep, FoDerivation] | None:
    redex = find_redex(system, term)
    if redex is None:
        return None
    after = replace_at(term, redex.position, redex.result)
    proof = in_context(term, redex.position, axiom_step(redex.rule, redex.params, redex.components))
    return after, RewriteStep(redex.rule.equation, redex.position, term, after), proof


def rewrite_normalize(
    system: RewriteSystem, term: Term, budget: Budget | None = None, witness: bool = True
) -> RewriteResult:
    budget = budget or default_budget()
    current = term
    steps: list[RewriteStep] = []
    proofs: list[FoDerivation] = []
    while True:
        found = rewrite_once(system, current)
        if found is None:
            break
        if len(steps) >= budget.step_ceiling:
            trace = [f"{s.equation} at {list(s.position)}: {show(s.after)}" for s in steps[-TRACE_TAIL:]]
            logger.warning("Rewriting %s exceeded %s steps", show(term), budget.step_ceiling)
            raise RewriteDivergence(f"Step ceiling {budget.step_ceiling} exceeded", trace)
        current, step, proof = found
        steps.append(step)
        if witness:
            proofs.append(proof)
    logger.debug("Normalized %s in %s steps", show(term), len(steps))
    return RewriteResult(current, steps, chain(proofs, term) if witness else None)


def is_normal(system: RewriteSystem, term: Term) -> bool:
    return find_redex(system, term) is None
