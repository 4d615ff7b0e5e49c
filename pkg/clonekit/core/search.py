"""Bidirectional best-first search over a rewriting neighbourhood.

Both endpoints grow a frontier ordered by (size, depth, serial); the search
stops as soon as one frontier reaches a term already seen by the other.
"""
from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable

logger = logging.getLogger(__name__)

Successors = Callable[[Hashable], Iterable[tuple[Hashable, object]]]


@dataclass
class Meeting:
    found: bool
    expanded: int
    meet: Hashable | None = None
    left_steps: list = field(default_factory=list)
    right_steps: list = field(default_factory=list)


class _Frontier:
    def __init__(self, start: Hashable, size: Callable[[Hashable], int]) -> None:
        self.size = size
        self.parents: dict[Hashable, tuple[Hashable, object] | None] = {start: None}
        self.heap: list = []
        self.serial = 0
        self.push(start, 0)

    def push(self, term: Hashable, depth: int) -> None:
        heapq.heappush(self.heap, (self.size(term), depth, self.serial, term))
        self.serial += 1

    def peek(self) -> tuple | None:
        return self.heap[0][:3] if self.heap else None

    def steps_to(self, term: Hashable) -> list:
        steps = []
        while self.parents[term] is not None:
            parent, step = self.parents[term]
            steps.append(step)
            term = parent
        steps.reverse()
        return steps


def meet_in_middle(
    left: Hashable,
    right: Hashable,
    successors: Successors,
    size: Callable[[Hashable], int],
    limit: int,
    max_size: int | None = None,
) -> Meeting:
    """Search for a chain left → ... ← right; each side records the step used to reach a term."""
    if left == right:
        return Meeting(True, 0, left)
    sides = (_Frontier(left, size), _Frontier(right, size))
    expanded = 0
    while expanded < limit:
        keys = [side.peek() for side in sides]
        if keys[0] is None and keys[1] is None:
            break
        turn = 0 if keys[1] is None or (keys[0] is not None and keys[0] <= keys[1]) else 1
        own, other = sides[turn], sides[1 - turn]
        _size, depth, _serial, term = heapq.heappop(own.heap)
        expanded += 1
        for successor, step in successors(term):
            if successor in own.parents:
                continue
            if max_size is not None and size(successor) > max_size:
                continue
            own.parents[successor] = (term, step)
            if successor in other.parents:
                found = Meeting(True, expanded, successor)
                mine, theirs = own.steps_to(successor), other.steps_to(successor)
                found.left_steps, found.right_steps = (mine, theirs) if turn == 0 else (theirs, mine)
                logger.debug("Search met after %s expansions", expanded)
                return found
            own.push(successor, depth + 1)
    logger.debug("Search gave up after %s expansions", expanded)
    return Meeting(False, expanded)
