"""Ready-made presentations: global state, booleans and monoids."""
from __future__ import annotations

import logging
import re
from typing import Sequence

from clonekit.core.clones import CloneHom, WordClone
from clonekit.core.sorts import BASE, Sort, SortSet, stlc_sorts
from clonekit.core.terms import Op, Term, Var
from clonekit.presentations.derivations import AxiomInstance, CongOp, FoDerivation, Sym, Trans, chain
from clonekit.presentations.first_order import (
    FoEquation,
    FoOperator,
    FoPresentation,
    FoSignature,
    PresentationError,
)
from clonekit.presentations.rewrite import RewriteRule, RewriteSystem
from clonekit.presentations.tm_clone import RewriteEquality, SearchEquality, TmClone

logger = logging.getLogger(__name__)

VALUE_LABEL = re.compile(r"^[A-Za-z0-9]+$")
GET = "get"
ITE = "ite"
TRUE = "true"
FALSE = "false"
MONOID = Sort("m")


def put_name(value: str) -> str:
    return f"put_{value}"


def _validate_values(values: Sequence[str]) -> tuple[str, ...]:
    values = tuple(values)
    if not values:
        raise PresentationError("Global state needs at least one value")
    if len(set(values)) != len(values):
        raise PresentationError(f"Duplicate state values in {list(values)}")
    for value in values:
        if not VALUE_LABEL.match(value):
            raise PresentationError(f"State value {value!r} must be alphanumeric")
    return values


def default_values(count: int) -> tuple[str, ...]:
    return tuple(f"v{i}" for i in range(1, count + 1))


def global_state_signature(values: Sequence[str], sorts: SortSet | None = None) -> FoSignature:
    values = _validate_values(values)
    k = len(values)
    operators = [FoOperator(GET, (BASE,) * k, BASE)]
    operators += [FoOperator(put_name(v), (BASE,), BASE) for v in values]
    return FoSignature(sorts or stlc_sorts(), tuple(operators))


def global_state_presentation(values: Sequence[str], sorts: SortSet | None = None) -> FoPresentation:
    """get/put over a finite value set with the three interaction families, 1 + k + k² equations."""
    values = _validate_values(values)
    k = len(values)
    x = Var(1)
    equations = [
        FoEquation(
            "get_put",
            (BASE,),
            BASE,
            Op(GET, tuple(Op(put_name(v), (x,)) for v in values)),
            x,
        )
    ]
    for i, v in enumerate(values, start=1):
        equations.append(
            FoEquation(
                f"put_get_{v}",
                (BASE,) * k,
                BASE,
                Op(put_name(v), (Op(GET, tuple(Var(j) for j in range(1, k + 1))),)),
                Op(put_name(v), (Var(i),)),
            )
        )
    for v in values:
        for w in values:
            equations.append(
                FoEquation(
                    f"put_put_{v}_{w}",
                    (BASE,),
                    BASE,
                    Op(put_name(v), (Op(put_name(w), (x,)),)),
                    Op(put_name(w), (x,)),
                )
            )
    return FoPresentation("gs", global_state_signature(values, sorts), tuple(equations))


def global_state_rewrite_system(presentation: FoPresentation, strategy: str = "innermost") -> RewriteSystem:
    """The equations left to right, completed by ``global_state_lemmas``."""
    axioms = RewriteSystem.from_presentation(presentation, strategy).rules
    lemmas = global_state_lemmas(state_values(presentation))
    return RewriteSystem(presentation, axioms + lemmas, strategy)


def global_state_lemmas(values: Sequence[str]) -> tuple[RewriteRule, ...]:
    """Size-reducing derived rules under which every ≈-class has exactly one normal form.

    A normal form is a variable, ``put_w(x)``, or ``get(a1, ..., ak)`` whose i-th
    argument is a variable or ``put_w(y)`` with w not the i-th value. Each rule
    carries a derivation from the equations, built by ``GlobalStateCompletion``.
    """
    values = _validate_values(values)
    k = len(values)
    completion = GlobalStateCompletion(values)
    rules: list[RewriteRule] = []

    def lemma(name: str, lhs: Term, rhs: Term, width: int) -> None:
        left_form, left_proof = completion.derive(lhs)
        right_form, right_proof = completion.derive(rhs)
        if left_form != right_form:
            raise PresentationError(f"Lemma {name} relates different state tables")
        rules.append(RewriteRule.lemma(name, lhs, rhs, (BASE,) * width, BASE, Trans(left_proof, Sym(right_proof))))

    xs = tuple(Var(j) for j in range(1, k + 1))
    outer = [Var(j) for j in range(1, k)]
    inner = tuple(Var(j) for j in range(k, 2 * k))
    for i, v in enumerate(values):
        dropped = xs[:i] + (Op(put_name(v), (xs[i],)),) + xs[i + 1:]
        lemma(f"get_drop_{v}", Op(GET, dropped), Op(GET, xs), k)
        nested = outer[:i] + [Op(GET, inner)] + outer[i:]
        picked = outer[:i] + [inner[i]] + outer[i:]
        lemma(f"get_get_{v}", Op(GET, tuple(nested)), Op(GET, tuple(picked)), 2 * k - 1)
    x = Var(1)
    lemma("get_same", Op(GET, (x,) * k), x, 1)
    if k == 1:
        lemma(f"put_idle_{values[0]}", Op(put_name(values[0]), (x,)), x, 1)
    for w, v in enumerate(values if k > 1 else ()):
        args = tuple(x if s == w else Op(put_name(v), (x,)) for s in range(k))
        lemma(f"get_collapse_{v}", Op(GET, args), Op(put_name(v), (x,)), 1)
    return tuple(rules)


def state_values(presentation: FoPresentation) -> tuple[str, ...]:
    values = tuple(op.name[len("put_"):] for op in presentation.signature.operators if op.name.startswith("put_"))
    if presentation.signature.lookup(GET) is None or not values:
        raise PresentationError(f"{presentation.name} is not a global-state presentation")
    return values


StateTable = tuple[tuple[int, int], ...]


def gs_state_table(values: Sequence[str], term: Term) -> StateTable:
    """For each initial state, the final state and the variable a term returns."""
    index = {put_name(v): i for i, v in enumerate(values)}

    def run(t: Term, state: int) -> tuple[int, int]:
        match t:
            case Var(j):
                return state, j
            case Op(name, args) if name == GET:
                if len(args) != len(values):
                    raise PresentationError(f"get takes {len(values)} arguments, got {len(args)}")
                return run(args[state], state)
            case Op(name, (arg,)) if name in index:
                return run(arg, index[name])
        raise PresentationError(f"Not a global-state term: {t!r}")

    return tuple(run(term, state) for state in range(len(values)))


def full_form(values: Sequence[str], table: StateTable) -> Term:
    return Op(GET, tuple(Op(put_name(values[w]), (Var(j),)) for w, j in table))


def compact_form(values: Sequence[str], table: StateTable) -> Term:
    variables = {j for _, j in table}
    if len(variables) == 1:
        (j,) = variables
        if all(w == state for state, (w, _) in enumerate(table)):
            return Var(j)
        if len(set(table)) == 1:
            return Op(put_name(values[table[0][0]]), (Var(j),))
    return full_form(values, table)


def gs_canonical(values: Sequence[str], term: Term) -> Term:
    return compact_form(values, gs_state_table(values, term))


class GlobalStateCompletion:
    """Canonical forms from state tables, each backed by a derivation from the three equation families."""

    def __init__(self, values: Sequence[str]) -> None:
        self.values = _validate_values(values)

    def canonical(self, term: Term) -> Term:
        return gs_canonical(self.values, term)

    def _put(self, w: int, y: Term) -> Term:
        return Op(put_name(self.values[w]), (y,))

    def _full(self, parts: tuple[tuple[int, Term], ...]) -> Term:
        return Op(GET, tuple(self._put(w, y) for w, y in parts))

    def _put_put(self, v: int, w: int, y: Term) -> FoDerivation:
        return AxiomInstance(f"put_put_{self.values[v]}_{self.values[w]}", (y,))

    def _put_get(self, v: int, args: tuple[Term, ...]) -> FoDerivation:
        return AxiomInstance(f"put_get_{self.values[v]}", args)

    def expand(self, term: Term) -> tuple[tuple[tuple[int, Term], ...], FoDerivation]:
        """A derivation of ``term ≈ get(put_w1(y1), ..., put_wk(yk))`` and the parts (w_i, y_i)."""
        k = len(self.values)
        match term:
            case Var():
                parts = tuple((i, term) for i in range(k))
                return parts, Sym(AxiomInstance("get_put", (term,)))
            case Op(name, args) if name == GET:
                expanded = [self.expand(arg) for arg in args]
                fulls = tuple(self._full(parts) for parts, _ in expanded)
                outer = Op(GET, fulls)
                steps = [CongOp(GET, tuple(proof for _, proof in expanded)), Sym(AxiomInstance("get_put", (outer,)))]
                premises = []
                parts = []
                for i, (inner_parts, _) in enumerate(expanded):
                    w, y = inner_parts[i]
                    inner = tuple(self._put(wj, yj) for wj, yj in inner_parts)
                    premises.append(chain([self._put_get(i, fulls), self._put_get(i, inner), self._put_put(i, w, y)], term))
                    parts.append((w, y))
                steps.append(CongOp(GET, tuple(premises)))
                return tuple(parts), chain(steps, term)
            case Op(name, (arg,)):
                v = [put_name(value) for value in self.values].index(name)
                inner_parts, inner_proof = self.expand(arg)
                w, y = inner_parts[v]
                z = self._put(w, y)
                steps = [
                    CongOp(name, (inner_proof,)),
                    self._put_get(v, tuple(self._put(wj, yj) for wj, yj in inner_parts)),
                    self._put_put(v, w, y),
                    Sym(AxiomInstance("get_put", (z,))),
                    CongOp(GET, tuple(self._put_put(i, w, y) for i in range(k))),
                ]
                return tuple((w, y) for _ in range(k)), chain(steps, term)
        raise PresentationError(f"Not a global-state term: {term!r}")

    def derive(self, term: Term) -> tuple[Term, FoDerivation]:
        parts, proof = self.expand(term)
        table = tuple((w, y.index) for w, y in parts)
        canonical = compact_form(self.values, table)
        full = self._full(parts)
        if canonical == full:
            return canonical, proof
        if isinstance(canonical, Var):
            return canonical, Trans(proof, AxiomInstance("get_put", (canonical,)))
        _, back = self.expand(canonical)
        return canonical, Trans(proof, Sym(back))


def global_state_clone(values: Sequence[str], strategy: str = "innermost") -> TmClone:
    presentation = global_state_presentation(values)
    system = global_state_rewrite_system(presentation, strategy)
    return TmClone(presentation, RewriteEquality(system, GlobalStateCompletion(values)))


def bool_presentation(sorts: SortSet | None = None) -> FoPresentation:
    a = Sort("A")
    signature = FoSignature(
        sorts or stlc_sorts(),
        (
            FoOperator(TRUE, (), BASE),
            FoOperator(FALSE, (), BASE),
            FoOperator(ITE, (BASE, a, a), a, ("A",)),
        ),
    )
    equations = (
        FoEquation("ite_true", (a, a), a, Op(ITE, (Op(TRUE), Var(1), Var(2))), Var(1), ("A",)),
        FoEquation("ite_false", (a, a), a, Op(ITE, (Op(FALSE), Var(1), Var(2))), Var(2), ("A",)),
    )
    return FoPresentation("bool", signature, equations)


def bool_clone(strategy: str = "innermost") -> TmClone:
    presentation = bool_presentation()
    return TmClone(presentation, RewriteEquality(RewriteSystem.from_presentation(presentation, strategy)))


def monoid_presentation() -> FoPresentation:
    signature = FoSignature(
        SortSet(name="Mon", base=(MONOID.name,)),
        (FoOperator("e", (), MONOID), FoOperator("mul", (MONOID, MONOID), MONOID)),
    )
    x, y, z = Var(1), Var(2), Var(3)
    e = Op("e")
    equations = (
        FoEquation("unit_left", (MONOID,), MONOID, Op("mul", (e, x)), x),
        FoEquation("unit_right", (MONOID,), MONOID, Op("mul", (x, e)), x),
        FoEquation(
            "assoc",
            (MONOID,) * 3,
            MONOID,
            Op("mul", (Op("mul", (x, y)), z)),
            Op("mul", (x, Op("mul", (y, z)))),
        ),
    )
    return FoPresentation("monoid", signature, equations)


def monoid_clone() -> TmClone:
    return TmClone(monoid_presentation(), SearchEquality())


def monoid_word(term: Term) -> tuple[int, ...]:
    match term:
        case Var(index):
            return (index,)
        case Op("e"):
            return ()
        case Op("mul", (left, right)):
            return monoid_word(left) + monoid_word(right)
    raise PresentationError(f"Not a monoid term: {term!r}")


def monoid_word_hom(source: TmClone, target: WordClone | None = None) -> CloneHom:
    """Flattening into words; two monoid terms are equal exactly when their words agree."""
    return CloneHom(source, target or WordClone(MONOID.name), lambda t, ctx, sort: monoid_word(t), "flatten")
