"""Coverage games: a learner picks a label distribution, the adversary picks a set.

The payoff to the learner is the mass the distribution puts on the chosen
set, so the value is ``max_mu min_A mu(A)`` over a finite collection.
Values are solved from the adversary's side (a packing LP whose origin is
feasible), and the learner's optimal measure is then pinned down by a
lexicographic pass so that results are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .rational import RationalDistribution, bits
from .simplex import maximize


@dataclass(frozen=True)
class GameSolution:
    value: Fraction
    measure: RationalDistribution
    # adversary mixture over the (deduplicated, sorted) collection masks
    masks: tuple[int, ...]
    mixture: tuple[Fraction, ...]


def _normalize(masks: Iterable[int]) -> tuple[int, ...]:
    out = tuple(sorted(set(masks)))
    if not out:
        raise ValueError("game over an empty collection")
    if any(a == 0 for a in out):
        raise ValueError("collection contains the empty set")
    return out


class GameSolver:
    """Solves coverage games over labels ``0..m-1`` with per-collection caches."""

    def __init__(self, m: int):
        self.m = m
        self._values: dict[tuple[int, ...], tuple[Fraction, tuple[Fraction, ...]]] = {}
        self._solutions: dict[tuple[int, ...], GameSolution] = {}

    def _dual(self, masks: tuple[int, ...]) -> tuple[Fraction, tuple[Fraction, ...]]:
        hit = self._values.get(masks)
        if hit is not None:
            return hit
        common = -1
        for a in masks:
            common &= a
        if common:
            # some label lies in every set: full coverage
            mix = tuple(Fraction(1) if i == 0 else Fraction(0) for i in range(len(masks)))
            result = (Fraction(1), mix)
        else:
            union = 0
            for a in masks:
                union |= a
            labels = list(bits(union))
            rows = [[1 if (a >> y) & 1 else 0 for a in masks] for y in labels]
            sol = maximize([1] * len(masks), rows, [1] * len(rows))
            result = (1 / sol.value, tuple(w / sol.value for w in sol.x))
        self._values[masks] = result
        return result

    def value(self, masks: Iterable[int]) -> Fraction:
        return self._dual(_normalize(masks))[0]

    def solve(self, masks: Iterable[int]) -> GameSolution:
        key = _normalize(masks)
        hit = self._solutions.get(key)
        if hit is not None:
            return hit
        v, mix = self._dual(key)
        # Complementary slackness: an optimal measure only charges labels whose
        # payoff against the adversary mixture equals the value.
        candidates = [
            y for y in range(self.m)
            if sum((q for q, a in zip(mix, key) if (a >> y) & 1), Fraction(0)) == v
        ]
        weights = [Fraction(0)] * self.m
        fixed: dict[int, Fraction] = {}
        for y in candidates:
            if sum(fixed.values()) == 1:
                break
            weights[y] = _lex_step(key, candidates, v, fixed, y)
            fixed[y] = weights[y]
        solution = GameSolution(v, RationalDistribution(weights), key, mix)
        self._solutions[key] = solution
        return solution


def _lex_step(masks, labels, v, fixed, target) -> Fraction:
    """Largest mass on ``target`` among optimal measures agreeing with ``fixed``."""
    n = len(labels)
    col = {y: i for i, y in enumerate(labels)}
    A_ub = [[-1 if (a >> y) & 1 else 0 for y in labels] for a in masks]
    b_ub = [-v] * len(masks)
    A_eq = [[1] * n]
    b_eq = [1]
    for y, w in fixed.items():
        row = [0] * n
        row[col[y]] = 1
        A_eq.append(row)
        b_eq.append(w)
    c = [0] * n
    c[col[target]] = 1
    return maximize(c, A_ub, b_ub, A_eq, b_eq).value


_SOLVERS: dict[int, GameSolver] = {}


def game_value(m: int, masks: Iterable[int]) -> tuple[Fraction, RationalDistribution]:
    """Value and the lexicographically largest optimal measure for a collection."""
    solver = _SOLVERS.setdefault(m, GameSolver(m))
    sol = solver.solve(masks)
    return sol.value, sol.measure
