"""Inclusion-minimal empty-intersection subfamilies and Helly numbers.

A subfamily is *minimal* when its intersection is empty but dropping any one
member makes it nonempty.  The search extends families in index order and
prunes as soon as some member becomes redundant: a redundant member stays
redundant in every larger family, so nothing below that node can be minimal.
"""

from __future__ import annotations

from typing import Iterator, Sequence

DEFAULT_NODE_LIMIT = 5_000_000


class SearchBudgetExceeded(RuntimeError):
    pass


def _all_essential(chosen: list[int], masks: Sequence[int]) -> bool:
    for skip in range(len(chosen)):
        rest = -1
        full = -1
        for j, idx in enumerate(chosen):
            full &= masks[idx]
            if j != skip:
                rest &= masks[idx]
        if rest == full:
            return False
    return True


def minimal_empty_families(
    masks: Sequence[int],
    max_size: int | None = None,
    node_limit: int = DEFAULT_NODE_LIMIT,
) -> Iterator[tuple[int, ...]]:
    """Yield index tuples of every minimal empty-intersection subfamily.

    Families larger than ``max_size`` are not explored.
    """
    n = len(masks)
    cap = n if max_size is None else min(n, max_size)
    chosen: list[int] = []
    nodes = 0

    def walk(start: int, inter: int) -> Iterator[tuple[int, ...]]:
        nonlocal nodes
        for i in range(start, n):
            nodes += 1
            if nodes > node_limit:
                raise SearchBudgetExceeded(f"more than {node_limit} search nodes")
            chosen.append(i)
            nxt = inter & masks[i]
            if _all_essential(chosen, masks):
                if nxt == 0:
                    yield tuple(chosen)
                elif len(chosen) < cap:
                    yield from walk(i + 1, nxt)
            chosen.pop()

    yield from walk(0, -1)


def helly_number(masks: Sequence[int], node_limit: int = DEFAULT_NODE_LIMIT) -> int:
    """Largest minimal empty-intersection subfamily; 0 if every subfamily meets."""
    n = len(masks)
    best = 0
    chosen: list[int] = []
    nodes = 0

    def walk(start: int, inter: int) -> None:
        nonlocal best, nodes
        for i in range(start, n):
            # even taking every remaining set cannot beat the incumbent
            if len(chosen) + (n - i) <= best:
                return
            nodes += 1
            if nodes > node_limit:
                raise SearchBudgetExceeded(f"more than {node_limit} search nodes")
            chosen.append(i)
            nxt = inter & masks[i]
            if _all_essential(chosen, masks):
                if nxt == 0:
                    best = max(best, len(chosen))
                else:
                    walk(i + 1, nxt)
            chosen.pop()

    walk(0, -1)
    return best
