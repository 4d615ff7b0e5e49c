from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from itertools import islice, product
from typing import Callable, Hashable, Iterator

from clonekit.config import Budget
from clonekit.core.sorts import Context, Sort, SortSet, format_context

logger = logging.getLogger(__name__)


class CloneError(RuntimeError):
    def __init__(self, message: str, position: int | None = None) -> None:
        self.position = position
        where = f" (position {position})" if position is not None else ""
        super().__init__(f"{message}{where}")


def _first_mismatch(left: Context, right: Context) -> int:
    for position, (a, b) in enumerate(zip(left, right), start=1):
        if a != b:
            return position
    return min(len(left), len(right)) + 1


def require_same_context(expected: Context, actual: Context, what: str) -> None:
    if expected != actual:
        raise CloneError(
            f"{what}: expected context [{format_context(expected)}], got [{format_context(actual)}]",
            _first_mismatch(expected, actual),
        )


@dataclass(frozen=True)
class Substitution:
    """A tuple σ ∈ X(source; target): one term in ``source`` per entry of ``target``."""

    source: Context
    target: Context
    components: tuple

    def __post_init__(self) -> None:
        if len(self.components) != len(self.target):
            raise CloneError(
                f"Substitution has {len(self.components)} components for a target of length {len(self.target)}",
                min(len(self.components), len(self.target)) + 1,
            )


@dataclass(frozen=True)
class Renaming:
    source: Context
    target: Context
    map: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.map) != len(self.target):
            raise CloneError(
                f"Renaming has {len(self.map)} entries for a target of length {len(self.target)}",
                min(len(self.map), len(self.target)) + 1,
            )
        for position, (index, sort) in enumerate(zip(self.map, self.target), start=1):
            if index < 1 or index > len(self.source):
                raise CloneError(f"Renaming index {index} out of range", position)
            if self.source[index - 1] != sort:
                raise CloneError(
                    f"Renaming sends a {sort} entry to a {self.source[index - 1]} variable", position
                )

    @classmethod
    def identity(cls, context: Context) -> Renaming:
        return cls(context, context, tuple(range(1, len(context) + 1)))


@dataclass(frozen=True)
class Enumeration:
    terms: tuple
    exhaustive: bool


class Clone(ABC):
    name: str = "clone"

    def __init__(self, sorts: SortSet) -> None:
        self.sorts = sorts

    @abstractmethod
    def var(self, context: Context, index: int) -> Hashable: ...

    @abstractmethod
    def subst(self, term: Hashable, sigma: Substitution) -> Hashable: ...

    @abstractmethod
    def enumerate(self, context: Context, sort: Sort, budget: Budget) -> Enumeration: ...

    def canonical(self, term: Hashable, context: Context, sort: Sort) -> Hashable:
        return term

    def equal(self, left: Hashable, right: Hashable, context: Context, sort: Sort) -> bool:
        return self.canonical(left, context, sort) == self.canonical(right, context, sort)

    def rename(self, term: Hashable, rho: Renaming) -> Hashable:
        return self.subst(term, renaming_to_subst(self, rho))

    def identity(self, context: Context) -> Substitution:
        return Substitution(context, context, tuple(self.var(context, i) for i in range(1, len(context) + 1)))

    def _check_index(self, context: Context, index: int) -> None:
        if index < 1 or index > len(context):
            raise CloneError(f"No variable #{index} in context [{format_context(context)}]", index)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name})"


def _capped(items: Iterator, limit: int) -> Enumeration:
    taken = tuple(islice(items, limit + 1))
    if len(taken) > limit:
        return Enumeration(taken[:limit], exhaustive=False)
    return Enumeration(taken, exhaustive=True)


class VarClone(Clone):
    """Var_S: the terms at (Γ; B) are the positions of Γ holding B."""

    def __init__(self, sorts: SortSet) -> None:
        super().__init__(sorts)
        self.name = f"Var[{sorts.name}]"

    def var(self, context: Context, index: int) -> int:
        self._check_index(context, index)
        return index

    def subst(self, term: int, sigma: Substitution) -> Hashable:
        self._check_index(sigma.target, term)
        return sigma.components[term - 1]

    def rename(self, term: int, rho: Renaming) -> int:
        return rho.map[term - 1]

    def enumerate(self, context: Context, sort: Sort, budget: Budget) -> Enumeration:
        return Enumeration(tuple(i for i, entry in enumerate(context, start=1) if entry == sort), True)


TOP = "*"


class TerminalClone(Clone):
    def __init__(self, sorts: SortSet) -> None:
        super().__init__(sorts)
        self.name = f"1[{sorts.name}]"

    def var(self, context: Context, index: int) -> str:
        self._check_index(context, index)
        return TOP

    def subst(self, term: str, sigma: Substitution) -> str:
        return TOP

    def enumerate(self, context: Context, sort: Sort, budget: Budget) -> Enumeration:
        return Enumeration((TOP,), True)


class ProductClone(Clone):
    def __init__(self, left: Clone, right: Clone) -> None:
        if left.sorts != right.sorts:
            raise CloneError(f"Sort-set mismatch: {left.sorts.name} vs {right.sorts.name}")
        super().__init__(left.sorts)
        self.left = left
        self.right = right
        self.name = f"{left.name} × {right.name}"

    def var(self, context: Context, index: int) -> tuple:
        return (self.left.var(context, index), self.right.var(context, index))

    def _split(self, sigma: Substitution, side: int) -> Substitution:
        return Substitution(sigma.source, sigma.target, tuple(c[side] for c in sigma.components))

    def subst(self, term: tuple, sigma: Substitution) -> tuple:
        return (
            self.left.subst(term[0], self._split(sigma, 0)),
            self.right.subst(term[1], self._split(sigma, 1)),
        )

    def canonical(self, term: tuple, context: Context, sort: Sort) -> tuple:
        return (self.left.canonical(term[0], context, sort), self.right.canonical(term[1], context, sort))

    def enumerate(self, context: Context, sort: Sort, budget: Budget) -> Enumeration:
        lefts = self.left.enumerate(context, sort, budget)
        rights = self.right.enumerate(context, sort, budget)
        pairs = _capped(product(lefts.terms, rights.terms), budget.max_terms)
        return Enumeration(pairs.terms, pairs.exhaustive and lefts.exhaustive and rights.exhaustive)


class ContextExtension(Clone):
    """⟨Ξ⟩X: terms at (Γ; A) are the terms of X at (Γ, Ξ; A)."""

    def __init__(self, base: Clone, extension: Context) -> None:
        super().__init__(base.sorts)
        self.base = base
        self.extension = extension
        self.name = f"<{format_context(extension)}>{base.name}"

    def var(self, context: Context, index: int) -> Hashable:
        self._check_index(context, index)
        return self.base.var(context + self.extension, index)

    def pad(self, sigma: Substitution) -> Substitution:
        source = sigma.source + self.extension
        tail = tuple(self.base.var(source, len(sigma.source) + j) for j in range(1, len(self.extension) + 1))
        return Substitution(source, sigma.target + self.extension, sigma.components + tail)

    def subst(self, term: Hashable, sigma: Substitution) -> Hashable:
        return self.base.subst(term, self.pad(sigma))

    def canonical(self, term: Hashable, context: Context, sort: Sort) -> Hashable:
        return self.base.canonical(term, context + self.extension, sort)

    def enumerate(self, context: Context, sort: Sort, budget: Budget) -> Enumeration:
        return self.base.enumerate(context + self.extension, sort, budget)


class WordClone(Clone):
    """The monosorted clone of the free monoid: a term over n variables is a word in 1..n."""

    def __init__(self, sort_name: str = "m") -> None:
        super().__init__(SortSet(name="Mon", base=(sort_name,)))
        self.name = "Mon"

    def var(self, context: Context, index: int) -> tuple[int, ...]:
        self._check_index(context, index)
        return (index,)

    def subst(self, term: tuple[int, ...], sigma: Substitution) -> tuple[int, ...]:
        word: tuple[int, ...] = ()
        for index in term:
            word += sigma.components[index - 1]
        return word

    def enumerate(self, context: Context, sort: Sort, budget: Budget) -> Enumeration:
        letters = range(1, len(context) + 1)

        def words() -> Iterator[tuple[int, ...]]:
            for length in range(budget.max_depth + 1):
                yield from product(letters, repeat=length)

        return _capped(words(), budget.max_terms)


@dataclass(frozen=True)
class CloneHom:
    source: Clone
    target: Clone
    action: Callable[[Hashable, Context, Sort], Hashable]
    name: str = "hom"

    def __call__(self, term: Hashable, context: Context, sort: Sort) -> Hashable:
        return self.action(term, context, sort)

    def map_subst(self, sigma: Substitution) -> Substitution:
        return Substitution(
            sigma.source,
            sigma.target,
            tuple(self.action(c, sigma.source, sort) for c, sort in zip(sigma.components, sigma.target)),
        )

    def then(self, other: CloneHom) -> CloneHom:
        if other.source is not self.target:
            raise CloneError(f"Cannot compose {self.name} with {other.name}: clones differ")
        return CloneHom(
            self.source,
            other.target,
            lambda t, ctx, sort: other.action(self.action(t, ctx, sort), ctx, sort),
            f"{other.name}∘{self.name}",
        )


def renaming_to_subst(clone: Clone, rho: Renaming) -> Substitution:
    return Substitution(rho.source, rho.target, tuple(clone.var(rho.source, index) for index in rho.map))


def compose_subst(clone: Clone, outer: Substitution, inner: Substitution) -> Substitution:
    """outer ∘ inner: component i is outer_i[inner]."""
    require_same_context(outer.source, inner.target, "compose_subst")
    return Substitution(inner.source, outer.target, tuple(clone.subst(c, inner) for c in outer.components))


def compose_renamings(outer: Renaming, inner: Renaming) -> Renaming:
    require_same_context(outer.source, inner.target, "compose_renamings")
    return Renaming(inner.source, outer.target, tuple(inner.map[index - 1] for index in outer.map))


def enumerate_renamings(source: Context, target: Context) -> Iterator[Renaming]:
    choices = [[i for i, sort in enumerate(source, start=1) if sort == entry] for entry in target]
    for picked in product(*choices):
        yield Renaming(source, target, tuple(picked))


def initial_hom(clone: Clone) -> CloneHom:
    """▷ : Var_S → X, sending position i to var_i."""
    return CloneHom(VarClone(clone.sorts), clone, lambda i, ctx, sort: clone.var(ctx, i), f"▷{clone.name}")


def weakening(context: Context, extension: Context) -> Renaming:
    return Renaming(context + extension, context, tuple(range(1, len(context) + 1)))


def rename(clone: Clone, term: Hashable, rho: Renaming) -> Hashable:
    return clone.rename(term, rho)


def lift_subst(clone: Clone, sigma: Substitution, extension: Context) -> Substitution:
    source = sigma.source + extension
    wk = weakening(sigma.source, extension)
    head = tuple(clone.rename(c, wk) for c in sigma.components)
    fresh = tuple(clone.var(source, len(sigma.source) + j) for j in range(1, len(extension) + 1))
    return Substitution(source, sigma.target + extension, head + fresh)


def terminal_clone(sorts: SortSet) -> TerminalClone:
    return TerminalClone(sorts)


def product_clone(left: Clone, right: Clone) -> ProductClone:
    return ProductClone(left, right)


def context_extension(clone: Clone, extension: Context) -> ContextExtension:
    return ContextExtension(clone, extension)


def var_clone(sorts: SortSet) -> VarClone:
    return VarClone(sorts)


def word_clone(sort_name: str = "m") -> WordClone:
    return WordClone(sort_name)


def weaken_hom(clone: Clone, extension: Context) -> CloneHom:
    extended = ContextExtension(clone, extension)
    return CloneHom(
        clone,
        extended,
        lambda t, ctx, sort: clone.rename(t, weakening(ctx, extension)),
        f"wk<{format_context(extension)}>",
    )


def extend_context_hom(
    f: CloneHom, sigma: Substitution, extension: Context | None = None
) -> CloneHom:
    """The unique g : ⟨Ξ⟩X → Y with g ∘ weaken = f and g(var_Ξ) = σ."""
    if sigma.source:
        raise CloneError(f"Closing substitution must live in the empty context, got [{format_context(sigma.source)}]")
    xi = sigma.target if extension is None else extension
    require_same_context(xi, sigma.target, "extend_context_hom")
    target = f.target

    def action(term: Hashable, context: Context, sort: Sort) -> Hashable:
        image = f(term, context + xi, sort)
        closing = weakening((), context)
        padding = tuple(target.var(context, i) for i in range(1, len(context) + 1))
        tail = tuple(target.rename(c, closing) for c in sigma.components)
        return target.subst(image, Substitution(context, context + xi, padding + tail))

    return CloneHom(ContextExtension(f.source, xi), target, action, f"{f.name}[σ]")


def pair_homs(f: CloneHom, g: CloneHom, into: ProductClone | None = None) -> CloneHom:
    if f.source is not g.source:
        raise CloneError("Pairing needs homomorphisms out of the same clone")
    target = into or ProductClone(f.target, g.target)
    return CloneHom(
        f.source,
        target,
        lambda t, ctx, sort: (f(t, ctx, sort), g(t, ctx, sort)),
        f"<{f.name}, {g.name}>",
    )


def proj_hom(clone: ProductClone, side: int) -> CloneHom:
    component = clone.left if side == 0 else clone.right
    return CloneHom(clone, component, lambda t, ctx, sort: t[side], f"π{side + 1}")


def enumerate_substitutions(
    clone: Clone, source: Context, target: Context, budget: Budget
) -> Enumeration:
    columns = [clone.enumerate(source, sort, budget) for sort in target]
    exhaustive = all(column.exhaustive for column in columns)
    rows = _capped(product(*(column.terms for column in columns)), budget.max_terms)
    subs = tuple(Substitution(source, target, tuple(row)) for row in rows.terms)
    if not rows.exhaustive:
        logger.debug("Substitutions %s -> %s truncated at %s", format_context(source), format_context(target), budget.max_terms)
    return Enumeration(subs, exhaustive and rows.exhaustive)
