from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterator, Mapping

ARROW = "=>"


class SortError(ValueError):
    def __init__(self, message: str, path: tuple[int, ...] = ()) -> None:
        self.path = path
        where = f" at {'/'.join(str(p) for p in path)}" if path else ""
        super().__init__(f"{message}{where}")


@dataclass(frozen=True, order=True)
class Sort:
    name: str
    args: tuple[Sort, ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return self.name
        left, right = self.args
        left_text = f"({left})" if left.args else str(left)
        return f"{left_text} {self.name} {right}"

    @property
    def height(self) -> int:
        if not self.args:
            return 0
        return 1 + max(arg.height for arg in self.args)


Context = tuple[Sort, ...]

BASE = Sort("b")


def arrow(domain: Sort, codomain: Sort) -> Sort:
    return Sort(ARROW, (domain, codomain))


def is_arrow(sort: Sort) -> bool:
    return sort.name == ARROW and len(sort.args) == 2


def curry(context: Context, result: Sort) -> Sort:
    for entry in reversed(context):
        result = arrow(entry, result)
    return result


def lookup(context: Context, index: int) -> Sort:
    if index < 1 or index > len(context):
        raise SortError(f"Variable #{index} is out of range for a context of length {len(context)}")
    return context[index - 1]


def format_context(context: Context) -> str:
    if not context:
        return "⋄"
    return ", ".join(str(sort) for sort in context)


def instantiate_sort(sort: Sort, binding: Mapping[str, Sort]) -> Sort:
    if not sort.args:
        return binding.get(sort.name, sort)
    return Sort(sort.name, tuple(instantiate_sort(arg, binding) for arg in sort.args))


def instantiate_context(context: Context, binding: Mapping[str, Sort]) -> Context:
    return tuple(instantiate_sort(sort, binding) for sort in context)


def match_sort(template: Sort, actual: Sort, params: frozenset[str], binding: dict[str, Sort]) -> bool:
    """One-way matching of a schema sort against a concrete sort, extending ``binding``."""
    if not template.args and template.name in params:
        bound = binding.get(template.name)
        if bound is None:
            binding[template.name] = actual
            return True
        return bound == actual
    if template.name != actual.name or len(template.args) != len(actual.args):
        return False
    return all(match_sort(t, a, params, binding) for t, a in zip(template.args, actual.args))


def free_params(sort: Sort, params: frozenset[str]) -> set[str]:
    if not sort.args:
        return {sort.name} if sort.name in params else set()
    found: set[str] = set()
    for arg in sort.args:
        found |= free_params(arg, params)
    return found


@dataclass(frozen=True)
class SortSet:
    name: str
    base: tuple[str, ...] = ("b",)
    formers: tuple[str, ...] = ()

    def __contains__(self, sort: object) -> bool:
        if not isinstance(sort, Sort):
            return False
        if not sort.args:
            return sort.name in self.base
        return sort.name in self.formers and len(sort.args) == 2 and all(arg in self for arg in sort.args)

    def check(self, sort: Sort, path: tuple[int, ...] = ()) -> Sort:
        if sort not in self:
            raise SortError(f"Sort {sort} is not an element of sort set {self.name}", path)
        return sort

    def sorts(self, height: int) -> list[Sort]:
        """All sorts of height at most ``height``, ordered by height then structure."""
        levels: list[list[Sort]] = [[Sort(name) for name in self.base]]
        for _ in range(height):
            known = [sort for level in levels for sort in level]
            fresh = []
            for former in self.formers:
                for left, right in product(known, repeat=2):
                    candidate = Sort(former, (left, right))
                    if candidate.height == len(levels):
                        fresh.append(candidate)
            levels.append(fresh)
        return [sort for level in levels for sort in level]


def stlc_sorts() -> SortSet:
    return SortSet(name="Ty", base=("b",), formers=(ARROW,))


def enumerate_contexts(sorts: list[Sort], max_length: int) -> Iterator[Context]:
    for length in range(max_length + 1):
        for entries in product(sorts, repeat=length):
            yield tuple(entries)

