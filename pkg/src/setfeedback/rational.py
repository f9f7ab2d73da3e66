"""Exact rationals and probability vectors over a finite label space."""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Sequence

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse ``"a/b"`` (or a bare integer) into a reduced Fraction.

    Decimal strings are rejected on purpose: scales sit on exact boundaries.
    """
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int) and not isinstance(text, bool):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"not a rational: {text!r}")
    match = _RATIONAL_RE.match(text)
    if match is None:
        raise ValueError(f"not a rational of the form a/b: {text!r}")
    num, den = match.groups()
    if den is not None and int(den) == 0:
        raise ValueError(f"zero denominator: {text!r}")
    return Fraction(int(num), int(den) if den is not None else 1)


def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def bits(mask: int) -> Iterable[int]:
    """Yield the indices of the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class RationalDistribution:
    """A probability vector with exact rational weights summing to one."""

    __slots__ = ("weights", "_hash")

    def __init__(self, weights: Sequence[Fraction | int]):
        ws = tuple(Fraction(w) for w in weights)
        if not ws:
            raise ValueError("distribution over an empty label space")
        if any(w < 0 for w in ws):
            raise ValueError("negative probability weight")
        if sum(ws) != 1:
            raise ValueError(f"weights sum to {sum(ws)}, not 1")
        self.weights = ws
        self._hash = hash(ws)

    @classmethod
    def point(cls, m: int, label: int) -> RationalDistribution:
        ws = [Fraction(0)] * m
        ws[label] = Fraction(1)
        return cls(ws)

    @classmethod
    def uniform(cls, m: int, labels: Iterable[int] | None = None) -> RationalDistribution:
        support = sorted(set(range(m) if labels is None else labels))
        if not support:
            raise ValueError("uniform distribution over no labels")
        share = Fraction(1, len(support))
        ws = [Fraction(0)] * m
        for y in support:
            ws[y] = share
        return cls(ws)

    @classmethod
    def mixture(cls, parts: Sequence[tuple[Fraction, RationalDistribution]]) -> RationalDistribution:
        total = sum(w for w, _ in parts)
        m = len(parts[0][1].weights)
        acc = [Fraction(0)] * m
        for w, dist in parts:
            if w:
                for y, p in enumerate(dist.weights):
                    if p:
                        acc[y] += w * p
        return cls([a / total for a in acc])

    @property
    def size(self) -> int:
        return len(self.weights)

    def mass(self, mask: int) -> Fraction:
        """Probability of the label set encoded by ``mask``."""
        ws = self.weights
        return sum((ws[y] for y in bits(mask) if y < len(ws)), Fraction(0))

    def support(self) -> list[int]:
        return [y for y, w in enumerate(self.weights) if w]

    def mode(self) -> int:
        best = max(self.weights)
        return self.weights.index(best)

    def is_point(self) -> bool:
        return len(self.support()) == 1

    def sample(self, rng) -> int:
        """Draw a label exactly: integer weights over a common denominator."""
        den = 1
        for w in self.weights:
            den = den * w.denominator // math.gcd(den, w.denominator)
        ticket = rng.randrange(den)
        for y, w in enumerate(self.weights):
            ticket -= w.numerator * (den // w.denominator)
            if ticket < 0:
                return y
        raise AssertionError("unreachable: weights sum to one")

    def to_text(self) -> str:
        return "|".join(f"{y}:{format_rational(w)}" for y, w in enumerate(self.weights) if w)

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalDistribution) and self.weights == other.weights

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"RationalDistribution({self.to_text()})"

