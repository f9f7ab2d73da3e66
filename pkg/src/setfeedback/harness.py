"""Game loop, loss accounting and the invariant checks built on it."""

from __future__ import annotations

import csv
import io
import math
import random
import statistics
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

from .dims import DimensionEngine
from .learners import MSOLLearner, NotRealizableError, RSOALearner
from .model import LabeledStream, ProblemInstance, validate_realizable
from .adversaries import ScriptedAdversary
from .rational import RationalDistribution, format_rational, parse_rational


class RealizabilityViolation(RuntimeError):
    """A realizable-kind adversary emitted a set no remaining hypothesis explains."""


@dataclass
class RoundRecord:
    t: int
    x: int
    prediction: int | RationalDistribution
    s: int
    sampled_loss: int | None
    expected_loss: Fraction
    cum_expected: Fraction
    comparator: int
    regret: Fraction
    trace: dict = field(default_factory=dict)


@dataclass
class GameTranscript:
    mode: str
    rounds: list[RoundRecord] = field(default_factory=list)

    @property
    def T(self) -> int:
        return len(self.rounds)

    @property
    def expected_loss(self) -> Fraction:
        return self.rounds[-1].cum_expected if self.rounds else Fraction(0)

    @property
    def sampled_loss(self) -> int | None:
        if any(r.sampled_loss is None for r in self.rounds):
            return None
        return sum(r.sampled_loss for r in self.rounds)

    @property
    def comparator(self) -> int:
        return self.rounds[-1].comparator if self.rounds else 0

    @property
    def regret(self) -> Fraction:
        return self.rounds[-1].regret if self.rounds else Fraction(0)

    @property
    def stream(self) -> LabeledStream:
        return LabeledStream(tuple((r.x, r.s) for r in self.rounds))


def run_game(
    instance: ProblemInstance,
    learner,
    adversary,
    T: int,
    mode: str = "exact",
    seed: int | None = None,
    rng=None,
    engine: DimensionEngine | None = None,
    trace: bool = False,
) -> GameTranscript:
    """Play up to ``T`` rounds (fewer if the adversary stops).

    Exact mode charges the learner ``mu(S^c)`` and never samples; sample mode
    draws the learner's label with the seeded generator and reports regret
    from the sampled losses.
    """
    if mode not in ("exact", "sample"):
        raise ValueError(f"unknown mode {mode!r}")
    rng = rng if rng is not None else random.Random(seed)
    if trace and engine is None:
        engine = DimensionEngine(instance)
    m = instance.m
    per_h = [0] * instance.n_hypotheses
    V = instance.full
    cum_exp = Fraction(0)
    cum_sampled = 0
    out = GameTranscript(mode)
    for t in range(1, T + 1):
        x = adversary.next_instance()
        if x is None:
            break
        pred = learner.predict(x)
        dist = pred if isinstance(pred, RationalDistribution) else None
        if dist is None and not 0 <= pred < m:
            raise ValueError(f"prediction {pred} outside the label space")
        s = adversary.reveal(pred)
        A = instance.sets[s]
        if dist is None:
            exp = Fraction(0 if (A >> pred) & 1 else 1)
            sampled = int(exp)
        else:
            exp = 1 - dist.mass(A)
            if mode == "sample":
                sampled = 0 if (A >> dist.sample(rng)) & 1 else 1
            else:
                sampled = None
        learner.update(x, s)
        V &= instance.cover[x][s]
        if getattr(adversary, "realizable", False) and V == 0:
            raise RealizabilityViolation(f"round {t}: no hypothesis is consistent")
        for h in range(len(per_h)):
            per_h[h] += instance.loss(h, x, s)
        comp = min(per_h)
        cum_exp += exp
        if sampled is not None:
            cum_sampled += sampled
        regret = (cum_sampled if mode == "sample" else cum_exp) - comp
        extra = {}
        if trace and V:
            extra = {"sl": engine.sldim(V)}
        out.rounds.append(
            RoundRecord(t, x, pred, s, sampled, exp, cum_exp, comp, Fraction(regret), extra)
        )
    return out


@dataclass(frozen=True)
class TrialSummary:
    n: int
    mean: float
    se: float
    seed_base: int


def monte_carlo(play: Callable[[int], GameTranscript], trials: int, seed: int = 0,
                metric: Callable[[GameTranscript], float] = lambda g: float(g.regret)) -> TrialSummary:
    """Run ``play(seed + i)`` for each trial and summarize ``metric``."""
    if trials < 1:
        raise ValueError("need at least one trial")
    values = [metric(play(seed + i)) for i in range(trials)]
    mean = statistics.fmean(values)
    se = statistics.stdev(values) / math.sqrt(trials) if trials > 1 else 0.0
    return TrialSummary(trials, mean, se, seed)


# -- invariant checks --------------------------------------------------------

def _realizable_or_raise(instance, stream):
    if validate_realizable(instance, stream) is None:
        raise NotRealizableError("stream is not realizable by the hypothesis class")


@dataclass(frozen=True)
class HighMassMissCount:
    passed: bool
    count: int
    bound: int
    expected_loss: Fraction


def eq1_check(instance, epsilon, stream, engine: DimensionEngine | None = None) -> HighMassMissCount:
    """Count RSOA rounds whose missed mass is at least epsilon; bound is MS_eps(H)."""
    eps = Fraction(epsilon)
    _realizable_or_raise(instance, stream)
    engine = engine or DimensionEngine(instance)
    game = run_game(instance, RSOALearner(instance, eps, engine), ScriptedAdversary(stream), len(stream))
    count = sum(1 for r in game.rounds if r.expected_loss >= eps)
    bound = engine.msdim(None, eps)
    return HighMassMissCount(count <= bound, count, bound, game.expected_loss)


@dataclass(frozen=True)
class PotentialRow:
    t: int
    phi: Fraction
    phi_next: Fraction
    loss: Fraction

    @property
    def ok(self) -> bool:
        return self.phi - self.phi_next >= self.loss


@dataclass(frozen=True)
class PotentialTrace:
    rows: tuple[PotentialRow, ...]
    bound: Fraction
    total_loss: Fraction

    @property
    def passed(self) -> bool:
        return all(r.ok for r in self.rows) and self.total_loss <= self.bound


def potential(engine, V, t, T, gammas) -> Fraction:
    return (T + 1 - t) * gammas[-1] + 16 * sum(
        (g * engine.msdim(V, g) for g in gammas), Fraction(0)
    )


def potential_check(instance, N: int, stream, engine: DimensionEngine | None = None) -> PotentialTrace:
    """Per-round potential drop of the multi-scale learner versus its expected loss."""
    _realizable_or_raise(instance, stream)
    engine = engine or DimensionEngine(instance)
    learner = MSOLLearner(instance, N, engine)
    gammas = learner.gammas
    T = len(stream)
    rows = []
    total = Fraction(0)
    for t, (x, s) in enumerate(stream, start=1):
        before = learner.V
        mu = learner.predict(x)
        loss = 1 - mu.mass(instance.sets[s])
        learner.update(x, s)
        rows.append(PotentialRow(
            t, potential(engine, before, t, T, gammas), potential(engine, learner.V, t + 1, T, gammas), loss
        ))
        total += loss
    bound = gammas[-1] * T + 16 * sum((g * engine.msdim(None, g) for g in gammas), Fraction(0))
    return PotentialTrace(tuple(rows), bound, total)


MINIMAX_GUARD = {"labels": 6, "sets": 5, "instances": 2, "hypotheses": 5, "rounds": 4}


class GuardExceeded(ValueError):
    pass


def minimax_oracle(instance: ProblemInstance, T: int) -> int:
    """Worst-case mistakes of the best deterministic learner over T realizable rounds.

    The adversary shows an instance, the learner commits to a label, and the
    adversary answers with any set that keeps some hypothesis consistent.
    """
    g = MINIMAX_GUARD
    if (instance.m > g["labels"] or instance.n_sets > g["sets"] or instance.n_instances > g["instances"]
            or instance.n_hypotheses > g["hypotheses"] or T > g["rounds"] or T < 0):
        raise GuardExceeded(f"instance or horizon beyond the exhaustive guard {g}")
    memo: dict[tuple[int, int], int] = {}

    def value(V: int, r: int) -> int:
        if r == 0:
            return 0
        hit = memo.get((V, r))
        if hit is not None:
            return hit
        best = 0
        for x in range(instance.n_instances):
            moves = [(instance.sets[s], V & instance.cover[x][s]) for s in instance.valid_sets(V, x)]
            worst_for_learner = min(
                max((0 if (A >> y) & 1 else 1) + value(W, r - 1) for A, W in moves)
                for y in range(instance.m)
            )
            best = max(best, worst_for_learner)
        memo[(V, r)] = best
        return best

    return value(instance.full, T)


# -- CSV transcripts ---------------------------------------------------------

CSV_HEADER = [
    "round", "instance", "prediction", "set", "sampled_loss",
    "expected_loss_num", "expected_loss_den", "cum_expected", "comparator",
    "regret_num", "regret_den",
]


def _prediction_text(pred) -> str:
    return pred.to_text() if isinstance(pred, RationalDistribution) else str(pred)


def write_csv(transcript: GameTranscript, handle) -> None:
    w = csv.writer(handle, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in transcript.rounds:
        w.writerow([
            r.t, r.x, _prediction_text(r.prediction), r.s,
            "" if r.sampled_loss is None else r.sampled_loss,
            r.expected_loss.numerator, r.expected_loss.denominator,
            format_rational(r.cum_expected), r.comparator,
            r.regret.numerator, r.regret.denominator,
        ])


def emit_csv(transcript: GameTranscript, path) -> None:
    with open(path, "w", newline="") as fh:
        write_csv(transcript, fh)


def csv_text(transcript: GameTranscript) -> str:
    buf = io.StringIO()
    write_csv(transcript, buf)
    return buf.getvalue()


def read_csv(handle: Iterable[str]) -> list[dict]:
    """Parse a transcript back into rows with exact rationals."""
    reader = csv.DictReader(handle)
    if reader.fieldnames != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    rows = []
    for rec in reader:
        rows.append({
            "round": int(rec["round"]),
            "instance": int(rec["instance"]),
            "prediction": rec["prediction"],
            "set": int(rec["set"]),
            "sampled_loss": None if rec["sampled_loss"] == "" else int(rec["sampled_loss"]),
            "expected_loss": Fraction(int(rec["expected_loss_num"]), int(rec["expected_loss_den"])),
            "cum_expected": parse_rational(rec["cum_expected"]),
            "comparator": int(rec["comparator"]),
            "regret": Fraction(int(rec["regret_num"]), int(rec["regret_den"])),
        })
    return rows
