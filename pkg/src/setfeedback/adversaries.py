"""Stream sources, oblivious and adaptive.

Each adversary answers ``next_instance()`` (an instance index, or None when
the stream is over) and then ``reveal(prediction)`` with a set index.
Adaptive adversaries see the learner's label or emitted distribution, never
a sample drawn from it.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .dims import DimensionEngine
from .learners import ConfigurationError
from .model import LabeledStream, ProblemInstance
from .rational import RationalDistribution
from .witness import WitnessNode, WitnessTree


def _as_distribution(prediction, m: int) -> RationalDistribution:
    if isinstance(prediction, RationalDistribution):
        return prediction
    return RationalDistribution.point(m, prediction)


class SLTreeAdversary:
    """Walks a label-branching witness tree along the learner's predictions."""

    realizable = True

    def __init__(self, tree: WitnessTree):
        if tree.kind != "sl":
            raise ConfigurationError("tree adversary needs a label-branching (SL) witness")
        self.tree = tree
        self.node: WitnessNode = tree.root

    def next_instance(self):
        return None if self.node.is_leaf else self.node.instance

    def reveal(self, prediction) -> int:
        if isinstance(prediction, RationalDistribution):
            if not prediction.is_point():
                raise ConfigurationError("tree adversary faces deterministic learners only")
            prediction = prediction.support()[0]
        s, child = self.node.children[prediction]
        self.node = child
        return s

    @property
    def leaf_hypothesis(self):
        return self.node.hypothesis if self.node.is_leaf else None


class MSAdaptiveAdversary:
    """Keeps the learner's mass on the revealed set at most ``1 - gamma``.

    The instance is fixed per round as the smallest index attaining the
    current MS value; among qualifying sets the one whose child keeps the
    largest MS value is revealed (smallest index on ties).
    """

    realizable = True

    def __init__(self, instance: ProblemInstance, gamma, engine: DimensionEngine | None = None):
        self.inst = instance
        self.gamma = Fraction(gamma)
        self.engine = engine or DimensionEngine(instance)
        self.V = instance.full
        self.x: int | None = None

    def next_instance(self):
        d = self.engine.msdim(self.V, self.gamma)
        if d == 0:
            self.x = None
            return None
        self.x = next(
            x for x in range(self.inst.n_instances) if self.engine.ms_at(self.V, x, self.gamma) == d
        )
        return self.x

    def qualifies(self, mu: RationalDistribution, s: int) -> bool:
        mass = mu.mass(self.inst.sets[s])
        return mass < 1 if self.gamma == 0 else mass <= 1 - self.gamma

    def reveal(self, prediction) -> int:
        mu = _as_distribution(prediction, self.inst.m)
        best = None
        for s in self.inst.valid_sets(self.V, self.x):
            if self.qualifies(mu, s):
                W = self.V & self.inst.cover[self.x][s]
                score = self.engine.msdim(W, self.gamma)
                if best is None or score > best[0]:
                    best = (score, s)
        if best is None:
            raise AssertionError("no qualifying set: the MS value was not certified at this instance")
        s = best[1]
        self.V &= self.inst.cover[self.x][s]
        return s


class KhinchineAdversary:
    """Block-sign stream over a two-branch witness tree.

    Round signs are uniform; each block of ``k`` rounds stays at one node and
    reveals the sibling set picked by the round's sign, then the walk descends
    along the sign of the block sum.  Negative signs map to branch 0.
    """

    realizable = False

    def __init__(self, tree: WitnessTree, k: int, rng=None, seed: int | None = None):
        if tree.kind != "psl" or tree.p != 2:
            raise ConfigurationError("Khinchine adversary needs a two-branch witness")
        if k < 1 or k % 2 == 0:
            raise ConfigurationError(f"block length must be odd, got {k}")
        rng = rng if rng is not None else random.Random(seed)
        self.tree = tree
        self.k = k
        self.T = k * tree.depth
        self.signs = [rng.choice((-1, 1)) for _ in range(self.T)]
        self.block_signs = [
            1 if sum(self.signs[i * k:(i + 1) * k]) > 0 else -1 for i in range(tree.depth)
        ]
        self.t = 0
        self.node = tree.root
        node = tree.root
        for sign in self.block_signs:
            node = node.children[0 if sign < 0 else 1][1]
        self.comparator = node.hypothesis

    def next_instance(self):
        if self.t >= self.T:
            return None
        return self.node.instance

    def reveal(self, prediction) -> int:
        sign = self.signs[self.t]
        s = self.node.children[0 if sign < 0 else 1][0]
        self.t += 1
        if self.t % self.k == 0:
            block = self.block_signs[self.t // self.k - 1]
            self.node = self.node.children[0 if block < 0 else 1][1]
        return s


class SeparationAdversary:
    """On a cosingleton system, reveals the complement of the learner's label.

    Distributions are answered through their mode (smallest label on ties).
    Once excluding that label would leave no consistent hypothesis, the
    smallest-index consistent set is revealed instead.
    """

    realizable = True

    def __init__(self, instance: ProblemInstance):
        M = instance.m
        full = (1 << M) - 1
        self.complement = {}
        for y in range(M):
            try:
                self.complement[y] = instance.set_system.index(full & ~(1 << y))
            except ValueError:
                raise ConfigurationError("separation adversary needs every singleton complement")
        self.inst = instance
        self.V = instance.full

    def next_instance(self):
        return 0

    def reveal(self, prediction) -> int:
        y = prediction.mode() if isinstance(prediction, RationalDistribution) else prediction
        s = self.complement[y]
        if not self.V & self.inst.cover[0][s]:
            s = self.inst.valid_sets(self.V, 0)[0]
        self.V &= self.inst.cover[0][s]
        return s


class ScriptedAdversary:
    realizable = False

    def __init__(self, stream: LabeledStream | Sequence[tuple[int, int]], instance: ProblemInstance | None = None):
        self.stream = stream if isinstance(stream, LabeledStream) else LabeledStream(tuple(map(tuple, stream)))
        if instance is not None:
            self.stream.check(instance)
        self.t = 0

    def next_instance(self):
        if self.t >= len(self.stream):
            return None
        return self.stream.rounds[self.t][0]

    def reveal(self, prediction) -> int:
        s = self.stream.rounds[self.t][1]
        self.t += 1
        return s


class IIDAdversary:
    """Draws ``(instance, set)`` pairs independently from rational weights."""

    realizable = False

    def __init__(self, instance: ProblemInstance, weights: dict[tuple[int, int], Fraction], rng=None, seed=None):
        pairs = sorted(weights)
        for x, s in pairs:
            if not (0 <= x < instance.n_instances and 0 <= s < instance.n_sets):
                raise ConfigurationError(f"pair {(x, s)} out of range")
        total = sum(Fraction(weights[p]) for p in pairs)
        self.pairs = pairs
        self.dist = RationalDistribution([Fraction(weights[p]) / total for p in pairs])
        self.rng = rng if rng is not None else random.Random(seed)
        self._pending: tuple[int, int] | None = None

    def next_instance(self):
        self._pending = self.pairs[self.dist.sample(self.rng)]
        return self._pending[0]

    def reveal(self, prediction) -> int:
        return self._pending[1]
