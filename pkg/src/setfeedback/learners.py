"""Online learners for set-valued feedback.

Every learner follows the same two-call contract per round: ``predict(x)``
returns a label or a ``RationalDistribution``, and ``update(x, s)`` receives
the index of the revealed set.  None of the learners look at their own
sampled label, so the harness can run them in exact-expectation mode.
"""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction
from typing import Sequence

from .dims import DimensionEngine
from .model import ProblemInstance, is_example3
from .rational import RationalDistribution, bits


class NotRealizableError(RuntimeError):
    """The feedback left no consistent hypothesis."""


class ConfigurationError(ValueError):
    pass


class VersionSpaceLearner:
    """Shared bookkeeping: a hypothesis mask that only shrinks.

    With ``strict=False`` an update that would empty the version space is
    skipped instead of raising, which lets these learners face streams
    that no hypothesis explains.
    """

    randomized = False

    def __init__(self, instance: ProblemInstance, engine: DimensionEngine | None = None, strict: bool = True):
        self.inst = instance
        self.engine = engine or DimensionEngine(instance)
        self.strict = strict
        self.V = instance.full
        self.rounds = 0

    def _require_nonempty(self):
        if self.V == 0:
            raise NotRealizableError("stream was not realizable: version space is empty")

    def update(self, x: int, s: int) -> None:
        W = self.V & self.inst.cover[x][s]
        if W == 0:
            if self.strict:
                raise NotRealizableError(f"stream was not realizable at round {self.rounds + 1}")
        else:
            self.V = W
        self.rounds += 1


class SOALearner(VersionSpaceLearner):
    """Deterministic learner that predicts against the worst SL continuation."""

    def predict(self, x: int) -> int:
        self._require_nonempty()
        eng = self.engine
        if eng.sldim(self.V) > 0:
            vals = eng.sl_edge_values(self.V, x)
            return min(range(self.inst.m), key=lambda y: (vals[y], y))
        common = self.inst.label_space.full_mask
        for s in self.inst.valid_sets(self.V, x):
            common &= self.inst.sets[s]
        return (common & -common).bit_length() - 1 if common else 0


class RSOAPolicy:
    """Measure-valued fixed-scale rule, cached per (version space, instance)."""

    def __init__(self, engine: DimensionEngine, epsilon):
        eps = Fraction(epsilon)
        if not 0 < eps <= 1:
            raise ValueError(f"epsilon must lie in (0, 1], got {eps}")
        self.engine = engine
        self.eps = eps
        self._cache: dict[tuple[int, int], RationalDistribution] = {}

    def measure(self, V: int, x: int) -> RationalDistribution:
        hit = self._cache.get((V, x))
        if hit is not None:
            return hit
        eng, inst = self.engine, self.engine.inst
        valid = [inst.sets[s] for s in inst.valid_sets(V, x)]
        if not valid:
            mu = RationalDistribution.point(inst.m, 0)
        elif eng.msdim(V, self.eps) == 0:
            mu = eng.games.solve(valid).measure
        else:
            children = eng.ms_child_values(V, x, self.eps)
            mu = None
            for level in itertools.count():
                coll = eng.level_collection(children, level)
                if not coll:
                    # every measure already keeps all continuations below this level
                    mu = eng.games.solve(valid).measure
                    break
                sol = eng.games.solve(coll)
                if sol.value > 1 - self.eps:
                    mu = sol.measure
                    break
        self._cache[(V, x)] = mu
        return mu


class RSOALearner(VersionSpaceLearner):
    randomized = True

    def __init__(self, instance, epsilon, engine=None, strict=True, policy: RSOAPolicy | None = None):
        super().__init__(instance, engine, strict)
        self.policy = policy or RSOAPolicy(self.engine, epsilon)
        self.eps = self.policy.eps

    def predict(self, x: int) -> RationalDistribution:
        self._require_nonempty()
        return self.policy.measure(self.V, x)


def scale(i: int) -> Fraction:
    return Fraction(1, 2**i)


def msp(measures: Sequence[RationalDistribution], valid_sets: Sequence[int], gammas=None) -> int:
    """Pick a measure index (1-based) from a multi-scale sequence.

    Returns the smallest m < N whose prefix moves by at most ``2 gamma_{i-1}``
    per step on every valid set while step m -> m+1 moves by at least
    ``2 gamma_m`` on every valid set; otherwise N.
    """
    N = len(measures)
    if N < 1:
        raise ValueError("need at least one measure")
    if not valid_sets:
        raise ValueError("valid_sets is empty")
    if gammas is None:
        gammas = [scale(i) for i in range(1, N + 1)]
    g = [None] + [Fraction(v) for v in gammas]  # 1-based

    def gap(i: int, j: int) -> list[Fraction]:
        a, b = measures[i - 1], measures[j - 1]
        return [abs(a.mass(A) - b.mass(A)) for A in valid_sets]

    for m in range(1, N):
        if m >= 2 and max(gap(m, m - 1)) > 2 * g[m - 1]:
            break  # the chain condition fails here and for every larger m
        if min(gap(m, m + 1)) >= 2 * g[m]:
            return m
    return N


class MSOLLearner(VersionSpaceLearner):
    """Multi-scale learner with scales 1/2, 1/4, ..., 1/2^N."""

    randomized = True

    def __init__(self, instance, scales: int, engine=None, strict=True):
        if scales < 1:
            raise ValueError("need at least one scale")
        super().__init__(instance, engine, strict)
        self.N = scales
        self.gammas = [scale(i) for i in range(1, scales + 1)]
        self.policies = [RSOAPolicy(self.engine, g) for g in self.gammas]
        self.last_index: int | None = None

    def predict(self, x: int) -> RationalDistribution:
        self._require_nonempty()
        valid = [self.inst.sets[s] for s in self.inst.valid_sets(self.V, x)]
        if self.engine.msdim(self.V, self.gammas[-1]) == 0:
            self.last_index = None
            return self.engine.games.solve(valid).measure
        mus = [p.measure(self.V, x) for p in self.policies]
        self.last_index = msp(mus, valid, self.gammas)
        return mus[self.last_index - 1]


class AgnosticLearner:
    """Exponential weights over RSOA replays that update only on chosen rounds.

    Expert ``L`` (a set of at most ``d = MS_eps(H)`` round numbers) runs the
    fixed-scale rule and updates its version space only on rounds in ``L``.
    Experts whose version spaces coincide share measures through the policy
    cache.
    """

    EXPERT_BUDGET = 10**4
    randomized = True

    def __init__(self, instance, epsilon, horizon: int, mode: str = "exact", rng=None, engine=None):
        if mode not in ("exact", "sample"):
            raise ValueError(f"unknown mode {mode!r}")
        if horizon < 1:
            raise ValueError("horizon must be positive")
        self.inst = instance
        self.engine = engine or DimensionEngine(instance)
        self.policy = RSOAPolicy(self.engine, epsilon)
        self.eps = self.policy.eps
        self.T = horizon
        self.mode = mode
        self.rng = rng if rng is not None else random.Random(0)
        self.d = self.engine.msdim(None, self.eps)
        size = sum(math.comb(horizon, i) for i in range(min(self.d, horizon) + 1))
        if size > self.EXPERT_BUDGET:
            raise ConfigurationError(f"{size} experts exceed the budget of {self.EXPERT_BUDGET}")
        self.experts: list[frozenset[int]] = [
            frozenset(c) for i in range(min(self.d, horizon) + 1)
            for c in itertools.combinations(range(1, horizon + 1), i)
        ]
        self.eta = math.sqrt(2 * math.log(len(self.experts)) / horizon) if len(self.experts) > 1 else 0.0
        self.spaces = [instance.full] * len(self.experts)
        self.losses = [0.0] * len(self.experts)
        self.t = 1
        self._current: list[RationalDistribution] | None = None

    def weights(self) -> list[Fraction]:
        # exp() is irrational; weights are the exact rationals of the float values
        base = min(self.losses)
        raw = [Fraction(math.exp(-self.eta * (L - base))) for L in self.losses]
        total = sum(raw)
        return [w / total for w in raw]

    def predict(self, x: int) -> RationalDistribution:
        self._current = [self.policy.measure(V, x) for V in self.spaces]
        w = self.weights()
        if self.mode == "exact":
            return RationalDistribution.mixture(list(zip(w, self._current)))
        pick = RationalDistribution(w).sample(self.rng)
        return self._current[pick]

    def update(self, x: int, s: int) -> None:
        if self._current is None:
            self._current = [self.policy.measure(V, x) for V in self.spaces]
        A = self.inst.sets[s]
        for i, mu in enumerate(self._current):
            if self.mode == "exact":
                self.losses[i] += float(1 - mu.mass(A))
            else:
                self.losses[i] += 0.0 if (A >> mu.sample(self.rng)) & 1 else 1.0
        cover = self.inst.cover[x][s]
        for i, L in enumerate(self.experts):
            if self.t in L:
                W = self.spaces[i] & cover
                if W:
                    self.spaces[i] = W
        self.t += 1
        self._current = None


class UniformLearner:
    randomized = True

    def __init__(self, m: int):
        self.dist = RationalDistribution.uniform(m)

    def predict(self, x: int) -> RationalDistribution:
        return self.dist

    def update(self, x: int, s: int) -> None:
        pass


class ConstantLearner:
    randomized = False

    def __init__(self, label: int, m: int | None = None):
        if m is not None and not 0 <= label < m:
            raise ConfigurationError(f"label {label} outside 0..{m - 1}")
        self.label = label

    def predict(self, x: int) -> int:
        return self.label

    def update(self, x: int, s: int) -> None:
        pass


class Example3Learner:
    """Uniform on {3,4,5}, then uniform on {3,4,5} intersected with the last set."""

    randomized = True
    CORE = 0b111000

    def __init__(self, instance: ProblemInstance):
        if not is_example3(instance):
            raise ConfigurationError("example3 learner needs the six-label three-triple system")
        self.inst = instance
        self.support = self.CORE

    def predict(self, x: int) -> RationalDistribution:
        return RationalDistribution.uniform(self.inst.m, bits(self.support))

    def update(self, x: int, s: int) -> None:
        self.support = self.CORE & self.inst.sets[s]


class GreedyLearner(VersionSpaceLearner):
    """Predicts the label most hypotheses in the version space agree on."""

    def __init__(self, instance, engine=None):
        super().__init__(instance, engine, strict=False)

    def predict(self, x: int) -> int:
        counts = [bin(self.V & c).count("1") for c in self.inst.label_cover[x]]
        return max(range(self.inst.m), key=lambda y: (counts[y], -y))


def make_learner(kind: str, instance, *, epsilon=None, scales=None, horizon=None, label=0,
                 mode="exact", rng=None, engine=None, strict=True):
    """Factory used by the CLI and harness suites."""
    if kind == "soa":
        return SOALearner(instance, engine, strict)
    if kind == "rsoa":
        return RSOALearner(instance, epsilon if epsilon is not None else Fraction(1, 4), engine, strict)
    if kind == "msol":
        return MSOLLearner(instance, scales or 2, engine, strict)
    if kind == "agnostic":
        if horizon is None:
            raise ConfigurationError("agnostic learner needs a horizon")
        return AgnosticLearner(instance, epsilon if epsilon is not None else Fraction(1, 4),
                               horizon, mode, rng, engine)
    if kind == "uniform":
        return UniformLearner(instance.m)
    if kind == "constant":
        return ConstantLearner(label, instance.m)
    if kind == "example3":
        return Example3Learner(instance)
    if kind == "greedy":
        return GreedyLearner(instance, engine)
    raise ConfigurationError(f"unknown learner {kind!r}")
