"""Finite learning problems with set-valued feedback.

A problem is a label space ``0..m-1``, a family of nonempty label sets, a
list of named instances, and a table of hypotheses (one row per hypothesis,
one column per instance).  Everything downstream works on integer bitmasks:
label sets are masks over labels, version spaces are masks over hypotheses.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .rational import bits


class InstanceError(ValueError):
    """Malformed problem or stream document."""


@dataclass(frozen=True)
class LabelSpace:
    size: int

    def __post_init__(self):
        if not isinstance(self.size, int) or self.size < 1:
            raise InstanceError(f"labels: need a positive integer, got {self.size!r}")

    @property
    def full_mask(self) -> int:
        return (1 << self.size) - 1


def mask_of(labels: Iterable[int]) -> int:
    out = 0
    for y in labels:
        out |= 1 << y
    return out


def members(mask: int) -> list[int]:
    return list(bits(mask))


class SetSystem:
    """Deduplicated label sets in canonical order (lexicographic on member lists)."""

    __slots__ = ("m", "masks")

    def __init__(self, m: int, masks: Iterable[int]):
        full = (1 << m) - 1
        uniq = set()
        for a in masks:
            if a == 0:
                raise InstanceError("sets: empty set is not allowed")
            if a & ~full:
                raise InstanceError(f"sets: label out of range in {members(a)}")
            uniq.add(a)
        if not uniq:
            raise InstanceError("sets: the set system is empty")
        self.m = m
        self.masks: tuple[int, ...] = tuple(sorted(uniq, key=members))

    @classmethod
    def from_lists(cls, m: int, sets: Iterable[Iterable[int]]) -> SetSystem:
        masks = []
        for s in sets:
            s = list(s)
            if any(not isinstance(y, int) or y < 0 or y >= m for y in s):
                raise InstanceError(f"sets: label out of range in {s}")
            masks.append(mask_of(s))
        return cls(m, masks)

    def __len__(self) -> int:
        return len(self.masks)

    def __getitem__(self, i: int) -> int:
        return self.masks[i]

    def as_lists(self) -> list[list[int]]:
        return [members(a) for a in self.masks]

    def index(self, mask: int) -> int:
        return self.masks.index(mask)

    def __eq__(self, other) -> bool:
        return isinstance(other, SetSystem) and (self.m, self.masks) == (other.m, other.masks)

    def __hash__(self) -> int:
        return hash((self.m, self.masks))


class HypothesisClass:
    """Hypothesis table; duplicate rows are dropped keeping first occurrences."""

    __slots__ = ("rows",)

    def __init__(self, rows: Iterable[Sequence[int]]):
        seen: dict[tuple[int, ...], None] = {}
        for r in rows:
            seen.setdefault(tuple(r), None)
        table = tuple(seen)
        if not table:
            raise InstanceError("hypotheses: need at least one hypothesis")
        width = len(table[0])
        if width == 0 or any(len(r) != width for r in table):
            raise InstanceError("hypotheses: rows must be nonempty and of equal length")
        self.rows: tuple[tuple[int, ...], ...] = table

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def n_instances(self) -> int:
        return len(self.rows[0])

    def __eq__(self, other) -> bool:
        return isinstance(other, HypothesisClass) and self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)


class ProblemInstance:
    """Immutable ``(X, Y, S(Y), H)`` with precomputed consistency masks.

    ``cover[x][s]`` is the mask of hypotheses whose output on instance ``x``
    lies in set ``s``; ``label_cover[x][y]`` those that output exactly ``y``.
    """

    def __init__(
        self,
        label_space: LabelSpace,
        set_system: SetSystem,
        instance_names: Sequence[str],
        hypotheses: HypothesisClass,
    ):
        m = label_space.size
        if set_system.m != m:
            raise InstanceError("sets: mask width differs from the label count")
        k = hypotheses.n_instances
        names = [str(n) for n in instance_names]
        if len(names) != k:
            raise InstanceError(f"instances: {len(names)} names for {k} hypothesis columns")
        if len(set(names)) != k:
            raise InstanceError("instances: names must be distinct")
        for row in hypotheses.rows:
            for y in row:
                if not isinstance(y, int) or not 0 <= y < m:
                    raise InstanceError(f"hypotheses: label {y!r} out of range")
        self.label_space = label_space
        self.set_system = set_system
        self.instance_names = tuple(names)
        self.hypotheses = hypotheses
        self.full = (1 << len(hypotheses)) - 1
        self.label_cover = tuple(
            tuple(
                mask_of(i for i, row in enumerate(hypotheses.rows) if row[x] == y)
                for y in range(m)
            )
            for x in range(k)
        )
        self.cover = tuple(
            tuple(
                mask_of(i for i, row in enumerate(hypotheses.rows) if (a >> row[x]) & 1)
                for a in set_system.masks
            )
            for x in range(k)
        )

    @property
    def m(self) -> int:
        return self.label_space.size

    @property
    def sets(self) -> tuple[int, ...]:
        return self.set_system.masks

    @property
    def n_sets(self) -> int:
        return len(self.set_system)

    @property
    def n_instances(self) -> int:
        return len(self.instance_names)

    @property
    def n_hypotheses(self) -> int:
        return len(self.hypotheses)

    def output(self, h: int, x: int) -> int:
        return self.hypotheses.rows[h][x]

    def outputs(self, V: int, x: int) -> int:
        """Mask of labels produced on ``x`` by hypotheses in ``V``."""
        out = 0
        for h in bits(V):
            out |= 1 << self.hypotheses.rows[h][x]
        return out

    def valid_sets(self, V: int, x: int) -> list[int]:
        """Indices of sets that some hypothesis in ``V`` lands in at ``x``."""
        row = self.cover[x]
        return [s for s in range(len(row)) if row[s] & V]

    def loss(self, h: int, x: int, s: int) -> int:
        return 0 if (self.sets[s] >> self.output(h, x)) & 1 else 1

    def __eq__(self, other) -> bool:
        return isinstance(other, ProblemInstance) and (
            self.label_space, self.set_system, self.instance_names, self.hypotheses
        ) == (other.label_space, other.set_system, other.instance_names, other.hypotheses)

    def __hash__(self) -> int:
        return hash((self.label_space, self.set_system, self.instance_names, self.hypotheses))

    def __repr__(self) -> str:
        return (
            f"ProblemInstance(m={self.m}, sets={len(self.sets)}, "
            f"instances={self.n_instances}, hypotheses={self.n_hypotheses})"
        )


@dataclass(frozen=True)
class LabeledStream:
    rounds: tuple[tuple[int, int], ...]

    def __len__(self) -> int:
        return len(self.rounds)

    def __iter__(self):
        return iter(self.rounds)

    def check(self, instance: ProblemInstance) -> None:
        for t, (x, s) in enumerate(self.rounds):
            if not 0 <= x < instance.n_instances:
                raise InstanceError(f"stream round {t}: instance index {x} out of range")
            if not 0 <= s < instance.n_sets:
                raise InstanceError(f"stream round {t}: set index {s} out of range")


def make_instance(
    m: int,
    sets: Iterable[Iterable[int]],
    hypotheses: Iterable[Sequence[int]] | None = None,
    instance_names: Sequence[str] | None = None,
) -> ProblemInstance:
    """Build an instance; hypotheses default to every constant on one instance."""
    space = LabelSpace(m)
    system = SetSystem.from_lists(m, sets)
    if hypotheses is None:
        k = len(instance_names) if instance_names is not None else 1
        hypotheses = constant_hypotheses(m, k)
    table = HypothesisClass(hypotheses)
    if instance_names is None:
        instance_names = [f"x{j}" for j in range(table.n_instances)]
    return ProblemInstance(space, system, instance_names, table)


def constant_hypotheses(m: int, n_instances: int = 1) -> list[list[int]]:
    return [[y] * n_instances for y in range(m)]


# -- documents ---------------------------------------------------------------

def instance_to_dict(instance: ProblemInstance) -> dict:
    return {
        "labels": instance.m,
        "sets": instance.set_system.as_lists(),
        "instances": list(instance.instance_names),
        "hypotheses": [list(r) for r in instance.hypotheses.rows],
    }


def dump_instance(instance: ProblemInstance) -> str:
    return json.dumps(instance_to_dict(instance), indent=1)


def _require(doc: dict, field: str, kind):
    if field not in doc:
        raise InstanceError(f"{field}: missing field")
    value = doc[field]
    if not isinstance(value, kind) or isinstance(value, bool):
        raise InstanceError(f"{field}: expected {kind.__name__}")
    return value


def instance_from_dict(doc: dict) -> ProblemInstance:
    if not isinstance(doc, dict):
        raise InstanceError("document: expected an object")
    m = _require(doc, "labels", int)
    sets = _require(doc, "sets", list)
    hyps = _require(doc, "hypotheses", list)
    for s in sets:
        if not isinstance(s, list) or any(not isinstance(y, int) or isinstance(y, bool) for y in s):
            raise InstanceError("sets: each set must be a list of integers")
    for r in hyps:
        if not isinstance(r, list) or any(not isinstance(y, int) or isinstance(y, bool) for y in r):
            raise InstanceError("hypotheses: each row must be a list of integers")
    names = doc.get("instances")
    if names is None and hyps:
        names = [f"x{j}" for j in range(len(hyps[0]))]
    if not isinstance(names, list):
        raise InstanceError("instances: expected list")
    return make_instance(m, sets, hyps, names)


def load_instance(text: str) -> ProblemInstance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"document: not valid JSON ({exc.msg})") from exc
    return instance_from_dict(doc)


def load_stream(text: str, instance: ProblemInstance | None = None) -> LabeledStream:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"stream: not valid JSON ({exc.msg})") from exc
    if not isinstance(doc, list):
        raise InstanceError("stream: expected a list of [instance, set] pairs")
    rounds = []
    for t, pair in enumerate(doc):
        if (
            not isinstance(pair, list) or len(pair) != 2
            or any(not isinstance(v, int) or isinstance(v, bool) for v in pair)
        ):
            raise InstanceError(f"stream round {t}: expected [instance_index, set_index]")
        rounds.append((pair[0], pair[1]))
    stream = LabeledStream(tuple(rounds))
    if instance is not None:
        stream.check(instance)
    return stream


def dump_stream(stream: LabeledStream) -> str:
    return json.dumps([list(r) for r in stream.rounds])


# -- realizability -----------------------------------------------------------

def consistent_mask(instance: ProblemInstance, stream: Iterable[tuple[int, int]]) -> int:
    V = instance.full
    for x, s in stream:
        V &= instance.cover[x][s]
    return V


def validate_realizable(instance: ProblemInstance, stream: Iterable[tuple[int, int]]) -> int | None:
    """Smallest hypothesis index consistent with every round, or None."""
    V = consistent_mask(instance, stream)
    if V == 0:
        return None
    return (V & -V).bit_length() - 1


def comparator_loss(instance: ProblemInstance, stream: Sequence[tuple[int, int]]) -> int:
    """Best fixed hypothesis's cumulative loss (full scan over the class)."""
    return min(
        sum(instance.loss(h, x, s) for x, s in stream) for h in range(instance.n_hypotheses)
    )


# -- generators --------------------------------------------------------------

def example3_instance() -> ProblemInstance:
    """Six labels, three overlapping triples, constants 0, 1 and 2."""
    return make_instance(6, [[0, 3, 4], [1, 4, 5], [2, 3, 5]], [[0], [1], [2]])


def is_example3(instance: ProblemInstance) -> bool:
    ref = example3_instance()
    return instance.label_space == ref.label_space and instance.set_system == ref.set_system


def ranking_labels(K: int) -> list[tuple[int, ...]]:
    """Rank vectors: entry ``i`` is the rank (1 = top) given to item ``i``."""
    return list(itertools.permutations(range(1, K + 1)))


def ranking_loss(pi: Sequence[int], r: Sequence[int]) -> int:
    """1 iff a less relevant item is ranked strictly above a more relevant one."""
    if len(pi) != len(r):
        raise ValueError("rank vector and relevance string differ in length")
    K = len(pi)
    for i in range(K):
        for j in range(K):
            if r[i] < r[j] and pi[i] < pi[j]:
                return 1
    return 0


def ranking_correct_set(K: int, r: Sequence[int]) -> int:
    """Mask of rank vectors placing every relevant item in the top ``|r|`` ranks."""
    top = sum(r)
    return mask_of(
        idx for idx, pi in enumerate(ranking_labels(K))
        if all(pi[i] <= top for i in range(K) if r[i])
    )


def gen_ranking_instance(
    K: int,
    hypotheses: Iterable[Sequence[Sequence[int]]] | None = None,
    instance_names: Sequence[str] | None = None,
) -> ProblemInstance:
    """Multilabel ranking: labels are rank vectors, feedback is relevance bits.

    ``hypotheses`` rows list one rank vector per instance; the default is every
    constant ranking on a single instance.
    """
    if not isinstance(K, int) or not 2 <= K <= 5:
        raise InstanceError(f"K: need 2 <= K <= 5, got {K!r}")
    labels = ranking_labels(K)
    index = {pi: i for i, pi in enumerate(labels)}
    masks = [ranking_correct_set(K, r) for r in itertools.product((0, 1), repeat=K)]
    sets = [members(a) for a in masks]
    rows = None
    if hypotheses is not None:
        try:
            rows = [[index[tuple(pi)] for pi in row] for row in hypotheses]
        except KeyError as exc:
            raise InstanceError(f"hypotheses: {exc.args[0]} is not a rank vector of length {K}")
    return make_instance(len(labels), sets, rows, instance_names)


def gen_interval_instance(
    G: int,
    hypotheses: Iterable[Sequence[int]] | None = None,
    instance_names: Sequence[str] | None = None,
) -> ProblemInstance:
    """Grid points ``0..G-1`` with every contiguous interval as a feedback set."""
    if not isinstance(G, int) or G < 2:
        raise InstanceError(f"G: need a grid of at least 2 points, got {G!r}")
    sets = [list(range(a, b + 1)) for a in range(G) for b in range(a, G)]
    return make_instance(G, sets, hypotheses, instance_names)


def hamming_distance(a: int, b: int) -> int:
    return bin(a ^ b).count("1")


def gen_hamming_instance(
    K: int,
    q: int,
    hypotheses: Iterable[Sequence[int]] | None = None,
    instance_names: Sequence[str] | None = None,
) -> ProblemInstance:
    """Bitstrings of length K (label ``y`` has bit ``i`` = ``(y >> i) & 1``) with radius-q balls."""
    if not isinstance(K, int) or not 1 <= K <= 6:
        raise InstanceError(f"K: need 1 <= K <= 6, got {K!r}")
    if not isinstance(q, int) or not 1 <= q <= K - 1:
        raise InstanceError(f"q: need 1 <= q <= K-1, got {q!r}")
    m = 1 << K
    sets = [[z for z in range(m) if hamming_distance(y, z) <= q] for y in range(m)]
    return make_instance(m, sets, hypotheses, instance_names)


def gen_cosingleton_instance(M: int) -> ProblemInstance:
    """Labels ``0..M-1``, sets are complements of single labels, all constants."""
    if not isinstance(M, int) or M < 2:
        raise InstanceError(f"M: need M >= 2, got {M!r}")
    return make_instance(M, [[z for z in range(M) if z != y] for y in range(M)])


def gen_singleton_instance(
    m: int,
    hypotheses: Iterable[Sequence[int]] | None = None,
    instance_names: Sequence[str] | None = None,
) -> ProblemInstance:
    """Ordinary multiclass feedback: every singleton is a feedback set."""
    if not isinstance(m, int) or m < 1:
        raise InstanceError(f"m: need m >= 1, got {m!r}")
    return make_instance(m, [[y] for y in range(m)], hypotheses, instance_names)


def gen_cofinite_instance(M: int, k: int) -> ProblemInstance:
    """Finite cut of the cofinite family: complements of nonempty subsets of ``0..k-1``.

    Labels ``k..M-1`` lie in every set, so no subfamily has empty intersection.
    """
    if not isinstance(M, int) or not isinstance(k, int) or not 1 <= k < M or k > 12:
        raise InstanceError(f"need 1 <= k < M and k <= 12, got M={M!r}, k={k!r}")
    full = (1 << M) - 1
    sets = [members(full & ~a) for a in range(1, 1 << k)]
    return make_instance(M, sets)


def random_instance(
    rng,
    m_range=(2, 5),
    sets_range=(2, 6),
    x_range=(1, 3),
    h_range=(2, 8),
) -> ProblemInstance:
    """Small random problem; duplicate draws collapse, so sizes are upper bounds."""
    m = rng.randint(*m_range)
    n_sets = rng.randint(*sets_range)
    sets = [members(rng.randrange(1, 1 << m)) for _ in range(n_sets)]
    k = rng.randint(*x_range)
    n_h = rng.randint(*h_range)
    rows = [[rng.randrange(m) for _ in range(k)] for _ in range(n_h)]
    return make_instance(m, sets, rows)


def random_singleton_instance(rng, m_range=(2, 4), x_range=(1, 3), h_range=(1, 8)) -> ProblemInstance:
    m = rng.randint(*m_range)
    k = rng.randint(*x_range)
    rows = [[rng.randrange(m) for _ in range(k)] for _ in range(rng.randint(*h_range))]
    return gen_singleton_instance(m, rows)


def random_realizable_stream(rng, instance: ProblemInstance, T: int) -> LabeledStream:
    """Pick a target hypothesis, then sets containing its output each round.

    Rounds only use instances where the target's output lies in some set.
    """
    union = 0
    for a in instance.sets:
        union |= a
    usable = {
        h: [x for x in range(instance.n_instances) if (union >> instance.output(h, x)) & 1]
        for h in range(instance.n_hypotheses)
    }
    targets = [h for h, xs in usable.items() if xs]
    if not targets:
        raise InstanceError("no hypothesis output lies in any set; no realizable stream exists")
    h = rng.choice(targets)
    rounds = []
    for _ in range(T):
        x = rng.choice(usable[h])
        y = instance.output(h, x)
        rounds.append((x, rng.choice([s for s, a in enumerate(instance.sets) if (a >> y) & 1])))
    return LabeledStream(tuple(rounds))


def all_streams(instance: ProblemInstance, T: int, realizable: bool = True):
    """Every stream of length T, optionally only the realizable ones (pruned DFS)."""
    pairs = [(x, s) for x in range(instance.n_instances) for s in range(instance.n_sets)]

    def walk(prefix, V):
        if len(prefix) == T:
            yield LabeledStream(tuple(prefix))
            return
        for x, s in pairs:
            W = V & instance.cover[x][s]
            if realizable and not W:
                continue
            prefix.append((x, s))
            yield from walk(prefix, W)
            prefix.pop()

    yield from walk([], instance.full)
