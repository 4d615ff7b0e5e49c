"""Theory bundles: several named theories in one text file.

A theory declares its sort set, an optional first-order base presentation
with the strategy that decides it, and an optional second-order presentation
on top. Parsing checks the syntax; each theory is assembled on first use, so
one ill-formed theory does not hide the others from ``check``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

from lark import Token, v_args
from lark.exceptions import UnexpectedInput, VisitError

from clonekit.cli.surface import Resolver, Surface, SurfaceError, SurfaceTransformer, parser
from clonekit.config import Budget
from clonekit.core.clones import Clone, VarClone
from clonekit.core.elaborate import Slot
from clonekit.core.sorts import Sort, SortError, SortSet
from clonekit.free.algebra import FreeAlgebraClone
from clonekit.free.base import BaseAdapter, PresentedBase, VarBase
from clonekit.free.equality import SearchFreeEquality
from clonekit.presentations.first_order import (
    FoEquation,
    FoOperator,
    FoPresentation,
    FoSignature,
    PresentationError,
    fo_check,
)
from clonekit.presentations.rewrite import RewriteSystem
from clonekit.presentations.rewrite import STRATEGIES as REWRITE_STRATEGIES
from clonekit.presentations.stock import (
    GlobalStateCompletion,
    global_state_presentation,
    global_state_rewrite_system,
    state_values,
)
from clonekit.presentations.tm_clone import RewriteEquality, SearchEquality, TmClone
from clonekit.second_order.syntax import MetaVar, SoEquation, SoOperator, SoPresentation, SoSignature, so_check_term
from clonekit.stlc.suite import stlc_free
from clonekit.stlc.variants import GlobalStateBase, Variant

logger = logging.getLogger(__name__)

BASE_KINDS = {"var": "stlc", "bool": "bool", "gs": "gs", "plain": None}
BASE_STRATEGIES = REWRITE_STRATEGIES + ("search",)


class BundleError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None) -> None:
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}, column {column}: " if column is not None else f"line {line}: "
        super().__init__(f"{where}{message}")


@dataclass(frozen=True)
class OperatorDecl:
    name: str
    params: tuple[str, ...]
    slots: tuple[Slot, ...]
    output: Sort
    line: int


@dataclass(frozen=True)
class EquationDecl:
    name: str
    params: tuple[str, ...]
    declarations: tuple[tuple[str, Slot], ...]
    lhs: Surface
    rhs: Surface
    sort: Sort | None
    line: int


@dataclass(frozen=True)
class BaseDecl:
    kind: str
    operators: tuple[OperatorDecl, ...] = ()
    equations: tuple[EquationDecl, ...] = ()
    strategy: str = "innermost"
    line: int = 0


@dataclass(frozen=True)
class TheoryDecl:
    name: str
    sort_set: str
    base_sorts: tuple[str, ...]
    formers: tuple[str, ...]
    base: BaseDecl | None
    operators: tuple[OperatorDecl, ...]
    equations: tuple[EquationDecl, ...]
    line: int


@v_args(inline=True)
class BundleTransformer(SurfaceTransformer):
    def bundle(self, *theories: TheoryDecl) -> tuple[TheoryDecl, ...]:
        return theories

    def theory(self, name: Token, *items) -> TheoryDecl:
        sort_set, base_sorts, formers = str(name), (), ()
        base = None
        operators: tuple[OperatorDecl, ...] = ()
        equations: tuple[EquationDecl, ...] = ()
        for kind, value in items:
            match kind:
                case "sorts":
                    sort_set, base_sorts = value
                case "formers":
                    formers = value
                case "base":
                    if base is not None:
                        raise BundleError(f"Theory {name} declares two bases", value.line)
                    base = value
                case "operators":
                    operators += value
                case "equations":
                    equations += value
        return TheoryDecl(str(name), sort_set, base_sorts, formers, base, operators, equations, name.line)

    def sorts_decl(self, name: Token, *sorts: Token):
        return "sorts", (str(name), tuple(str(s) for s in sorts))

    def formers_decl(self, *formers: Token):
        return "formers", tuple(str(f) for f in formers)

    def base_decl(self, kind: Token, *items):
        if str(kind) not in BASE_KINDS:
            raise BundleError(f"Unknown base kind {kind}; expected one of {', '.join(BASE_KINDS)}", kind.line, kind.column)
        operators: tuple[OperatorDecl, ...] = ()
        equations: tuple[EquationDecl, ...] = ()
        strategy = "innermost"
        for item in items:
            if item is None:
                continue
            tag, value = item
            match tag:
                case "operators":
                    operators += value
                case "equations":
                    equations += value
                case "strategy":
                    strategy = value
        return "base", BaseDecl(str(kind), operators, equations, strategy, kind.line)

    def strategy_decl(self, name: Token):
        if str(name) not in BASE_STRATEGIES:
            raise BundleError(
                f"Unknown strategy {name}; expected one of {', '.join(BASE_STRATEGIES)}", name.line, name.column
            )
        return "strategy", str(name)

    def operators_block(self, *decls: OperatorDecl):
        return "operators", tuple(decls)

    def equations_block(self, *decls: EquationDecl):
        return "equations", tuple(decls)

    def sort_params(self, *names: Token) -> tuple[str, ...]:
        return tuple(str(n) for n in names)

    def slot(self, sort: Sort) -> Slot:
        return Slot((), sort)

    def scoped_slot(self, *parts) -> Slot:
        *binder, sort = parts
        return Slot(tuple(s for s in binder if s is not None), sort)

    def op_decl(self, name: Token, params, *rest) -> OperatorDecl:
        *slots, output = rest
        return OperatorDecl(str(name), params or (), tuple(s for s in slots if s is not None), output, name.line)

    def declaration(self, name: Token, slot: Slot) -> tuple[str, Slot]:
        return str(name), slot

    def eq_decl(self, name: Token, params, *rest) -> EquationDecl:
        split = next(i for i, part in enumerate(rest) if isinstance(part, Token) and part.type == "EQUALS")
        declarations = tuple(d for d in rest[: split - 1] if d is not None)
        lhs, rhs = rest[split - 1], rest[split + 1]
        sort = rest[split + 2] if len(rest) > split + 2 else None
        return EquationDecl(str(name), params or (), declarations, lhs, rhs, sort, name.line)


def _located(exc: Exception, theory: TheoryDecl, line: int | None = None) -> BundleError:
    if isinstance(exc, (BundleError, SurfaceError)) and exc.line is not None:
        return BundleError(f"theory {theory.name}: {exc}", exc.line, exc.column)
    return BundleError(f"theory {theory.name}: {exc}", line or theory.line)


class Theory:
    """A declared theory, assembled lazily; assembly errors are ``BundleError`` with the offending line."""

    def __init__(self, decl: TheoryDecl) -> None:
        self.decl = decl
        self.name = decl.name

    @cached_property
    def sorts(self) -> SortSet:
        bases = self.decl.base_sorts or ("b",)
        return SortSet(name=self.decl.sort_set, base=bases, formers=self.decl.formers)

    @property
    def base_sort(self) -> Sort:
        return Sort(self.sorts.base[0])

    @property
    def kind(self) -> str:
        return self.decl.base.kind if self.decl.base is not None else "var"

    @property
    def first_order(self) -> bool:
        """True when the theory has no second-order operators, like a bare monoid."""
        return not self.decl.operators

    @cached_property
    def base_presentation(self) -> FoPresentation | None:
        base = self.decl.base
        if base is None or base.kind == "var":
            if base is not None and (base.operators or base.equations):
                raise BundleError(f"theory {self.name}: base var takes no operators", base.line)
            return None
        operators = []
        for op in base.operators:
            if any(slot.binder for slot in op.slots):
                raise BundleError(f"theory {self.name}: first-order operator {op.name} cannot bind", op.line)
            operators.append(FoOperator(op.name, tuple(slot.sort for slot in op.slots), op.output, op.params))
        try:
            signature = FoSignature(self.sorts, tuple(operators))
            equations = tuple(self._fo_equation(signature, eq) for eq in base.equations)
            return FoPresentation(self.name, signature, equations)
        except (PresentationError, SortError, SurfaceError) as exc:
            raise _located(exc, self.decl, base.line) from None

    def _fo_equation(self, signature: FoSignature, eq: EquationDecl) -> FoEquation:
        names = tuple(name for name, _ in eq.declarations)
        for name, slot in eq.declarations:
            if slot.binder:
                raise BundleError(f"theory {self.name}: variable {name} of {eq.name} cannot take parameters", eq.line)
        context = tuple(slot.sort for _, slot in eq.declarations)
        resolver = Resolver(signature.shape, open=False)
        try:
            lhs = resolver.resolve(eq.lhs, names)
            rhs = resolver.resolve(eq.rhs, names)
            sort = eq.sort or fo_check(signature, context, lhs, None, frozenset(eq.params))[1]
        except (SortError, SurfaceError) as exc:
            raise BundleError(f"theory {self.name}: equation {eq.name}: {exc}", eq.line) from None
        return FoEquation(eq.name, context, sort, lhs, rhs, eq.params)

    @cached_property
    def base_clone(self) -> Clone:
        presentation = self.base_presentation
        if presentation is None:
            return VarClone(self.sorts)
        strategy = self.decl.base.strategy
        try:
            if strategy == "search":
                return TmClone(presentation, SearchEquality())
            if self.kind != "gs":
                return TmClone(presentation, RewriteEquality(RewriteSystem.from_presentation(presentation, strategy)))
            values = state_values(presentation)
            expected = global_state_presentation(values, self.sorts)
            if presentation.equations != expected.equations:
                raise PresentationError("a gs base must declare exactly the global-state equations")
            system = global_state_rewrite_system(presentation, strategy)
            return TmClone(presentation, RewriteEquality(system, GlobalStateCompletion(values)))
        except PresentationError as exc:
            raise _located(exc, self.decl, self.decl.base.line) from None

    @cached_property
    def adapter(self) -> BaseAdapter:
        clone = self.base_clone
        if isinstance(clone, VarClone):
            return VarBase(clone)
        if self.kind == "gs":
            return GlobalStateBase(clone, state_values(clone.presentation))
        return PresentedBase(clone)

    @cached_property
    def variant(self) -> Variant | None:
        name = BASE_KINDS[self.kind]
        if name is None:
            return None
        values = state_values(self.base_clone.presentation) if name == "gs" else ()
        return Variant(name, self.adapter, values)

    @cached_property
    def presentation(self) -> SoPresentation | None:
        if self.first_order:
            return None
        operators = tuple(SoOperator(op.name, op.slots, op.output, op.params) for op in self.decl.operators)
        try:
            signature = SoSignature(self.sorts, operators)
            equations = tuple(self._so_equation(signature, eq) for eq in self.decl.equations)
            return SoPresentation(self.name, signature, equations)
        except (PresentationError, SortError) as exc:
            raise _located(exc, self.decl) from None

    def _so_equation(self, signature: SoSignature, eq: EquationDecl) -> SoEquation:
        metas = tuple(MetaVar(name, slot.binder, slot.sort) for name, slot in eq.declarations)
        resolver = Resolver(
            signature.shape,
            metas=tuple(m.name for m in metas),
            meta_arity=tuple(len(m.params) for m in metas),
            open=False,
        )
        try:
            lhs = resolver.resolve(eq.lhs, ())
            rhs = resolver.resolve(eq.rhs, ())
            sort = eq.sort or so_check_term(signature, metas, (), lhs, None, frozenset(eq.params))[1]
        except (SortError, SurfaceError) as exc:
            raise BundleError(f"theory {self.name}: equation {eq.name}: {exc}", eq.line) from None
        return SoEquation(eq.name, metas, sort, lhs, rhs, eq.params)

    @property
    def stlc_shaped(self) -> bool:
        signature = self.presentation.signature if self.presentation else None
        return signature is not None and signature.lookup("abs") is not None and signature.lookup("app") is not None

    def free(self, strategy: str = "normalizer", budget: Budget | None = None) -> FreeAlgebraClone:
        """The free algebra over the base; STLC-shaped theories get the NbE-backed equality."""
        if self.presentation is None:
            raise BundleError(f"theory {self.name} has no second-order operators", self.decl.line)
        if self.variant is not None and self.stlc_shaped:
            return stlc_free(self.variant, strategy=strategy, presentation=self.presentation, budget=budget)
        return FreeAlgebraClone(self.adapter, self.presentation, SearchFreeEquality(budget))

    def shape(self, name: str):
        """Operator shapes visible in surface terms: second-order first, then the base."""
        found = self.presentation.signature.shape(name) if self.presentation else None
        if found is None and self.base_presentation is not None:
            found = self.base_presentation.signature.shape(name)
        return found

    def assemble(self) -> None:
        """Build every part, raising the first ``BundleError``."""
        _ = self.base_clone
        _ = self.presentation
        if self.presentation is not None:
            _ = self.free()


@dataclass
class TheoryBundle:
    theories: dict[str, Theory] = field(default_factory=dict)
    path: Path | None = None

    def theory(self, name: str) -> Theory:
        found = self.theories.get(name)
        if found is None:
            known = ", ".join(self.theories) or "none"
            raise BundleError(f"No theory named {name!r} in {self.path or 'the bundle'} (declared: {known})")
        return found

    def __len__(self) -> int:
        return len(self.theories)


def parse_bundle(text: str, path: Path | None = None) -> TheoryBundle:
    """Parse bundle text; syntax errors carry the line and column."""
    try:
        tree = parser().parse(text, start="bundle")
    except UnexpectedInput as exc:
        raise BundleError(f"unexpected input {exc.get_context(text).strip()!r}", exc.line, exc.column) from None
    try:
        decls = BundleTransformer().transform(tree)
    except VisitError as exc:
        if isinstance(exc.orig_exc, BundleError):
            raise exc.orig_exc from None
        raise BundleError(str(exc.orig_exc)) from None
    bundle = TheoryBundle(path=path)
    for decl in decls:
        if decl.name in bundle.theories:
            raise BundleError(f"Duplicate theory {decl.name}", decl.line)
        bundle.theories[decl.name] = Theory(decl)
    logger.debug("Parsed %s theories from %s", len(bundle), path or "text")
    return bundle


def load_bundle(path: Path | str) -> TheoryBundle:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise BundleError(f"Cannot read bundle {path}: {exc.strerror}") from None
    return parse_bundle(text, path)
