import itertools
import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from setfeedback.model import (
    InstanceError,
    LabeledStream,
    all_streams,
    comparator_loss,
    dump_instance,
    dump_stream,
    example3_instance,
    gen_cofinite_instance,
    gen_cosingleton_instance,
    gen_hamming_instance,
    gen_interval_instance,
    gen_ranking_instance,
    gen_singleton_instance,
    hamming_distance,
    is_example3,
    load_instance,
    load_stream,
    make_instance,
    random_instance,
    random_realizable_stream,
    ranking_labels,
    members,
    ranking_correct_set,
    ranking_loss,
    validate_realizable,
)


def test_example3_tables():
    ex = example3_instance()
    assert ex.set_system.as_lists() == [[0, 3, 4], [1, 4, 5], [2, 3, 5]]
    assert ex.cover[0] == (0b001, 0b010, 0b100)
    assert ex.valid_sets(ex.full, 0) == [0, 1, 2]
    assert is_example3(load_instance(dump_instance(ex)))


def test_sets_deduplicated_and_sorted():
    inst = make_instance(3, [[2, 1], [0], [1, 2], [0]])
    assert inst.set_system.as_lists() == [[0], [1, 2]]


def test_hypotheses_deduplicated():
    inst = make_instance(2, [[0], [1]], [[0], [1], [0]])
    assert inst.n_hypotheses == 2


@pytest.mark.parametrize("doc,field", [
    ({"labels": 2, "sets": [[0, 5]], "hypotheses": [[0]]}, "sets"),
    ({"labels": 2, "sets": [[0]], "hypotheses": [[3]]}, "hypotheses"),
    ({"labels": 2, "sets": [[0]]}, "hypotheses"),
    ({"labels": "2", "sets": [[0]], "hypotheses": [[0]]}, "labels"),
    ({"labels": 2, "sets": [[]], "hypotheses": [[0]]}, "sets"),
    ({"labels": 2, "sets": [[0]], "hypotheses": [[0], [0, 1]]}, "hypotheses"),
])
def test_bad_documents_name_the_field(doc, field):
    with pytest.raises(InstanceError, match=field):
        load_instance(json.dumps(doc))


def test_bad_json():
    with pytest.raises(InstanceError):
        load_instance("{nope")


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**9))
def test_round_trip(seed):
    inst = random_instance(random.Random(seed))
    text = dump_instance(inst)
    again = load_instance(text)
    assert again == inst and dump_instance(again) == text


def test_stream_documents():
    ex = example3_instance()
    st_ = load_stream("[[0, 1], [0, 2]]", ex)
    assert st_.rounds == ((0, 1), (0, 2))
    assert load_stream(dump_stream(st_)) == st_
    with pytest.raises(InstanceError):
        load_stream("[[0, 3]]", ex)
    with pytest.raises(InstanceError):
        load_stream("[[0]]")


def test_validate_realizable():
    ex = example3_instance()
    assert validate_realizable(ex, [(0, 0)] * 4) == 0
    assert validate_realizable(ex, [(0, 0), (0, 1), (0, 2)]) is None
    assert validate_realizable(ex, []) == 0


def test_comparator_loss():
    ex = example3_instance()
    assert comparator_loss(ex, [(0, 0), (0, 1), (0, 2), (0, 0)]) == 2


def test_generator_sizes():
    assert gen_ranking_instance(3).m == 6 and gen_ranking_instance(3).n_sets == 2**3 - 1  # all-0 and all-1 strings coincide
    assert gen_interval_instance(4).n_sets == 10
    ham = gen_hamming_instance(3, 1)
    assert ham.m == 8 and all(len(s) == 4 for s in ham.set_system.as_lists())
    assert gen_cosingleton_instance(3).set_system.as_lists() == [[0, 1], [0, 2], [1, 2]]
    assert gen_singleton_instance(4).n_sets == 4
    assert gen_cofinite_instance(5, 2).n_sets == 3


@pytest.mark.parametrize("call", [
    lambda: gen_ranking_instance(6), lambda: gen_ranking_instance(1), lambda: gen_interval_instance(1),
    lambda: gen_hamming_instance(3, 3), lambda: gen_hamming_instance(7, 1), lambda: gen_cosingleton_instance(1),
    lambda: gen_cofinite_instance(3, 3),
])
def test_generator_ranges(call):
    with pytest.raises(InstanceError):
        call()


@pytest.mark.parametrize("K", [2, 3, 4])
def test_ranking_sets_match_loss(K):
    inst = gen_ranking_instance(K)
    labels = ranking_labels(K)
    for r in itertools.product((0, 1), repeat=K):
        # the set for r: rank vectors with zero loss, checked label by label
        zero = {i for i, pi in enumerate(labels) if ranking_loss(pi, r) == 0}
        assert set(members(ranking_correct_set(K, r))) == zero


def test_ranking_loss_examples():
    # item 1 relevant, ranked last; item 0 irrelevant, ranked first
    assert ranking_loss((1, 2), (0, 1)) == 1
    assert ranking_loss((2, 1), (0, 1)) == 0
    assert ranking_loss((1, 2, 3), (0, 0, 0)) == 0


def test_hamming_symmetry():
    K, q = 4, 2
    ham = gen_hamming_instance(K, q)

    def ball(y):
        return ham.sets[ham.set_system.index(sum(1 << z for z in range(2**K) if hamming_distance(y, z) <= q))]

    for y1 in range(2**K):
        for y2 in range(2**K):
            assert (ball(y2) >> y1) & 1 == (ball(y1) >> y2) & 1


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9), st.integers(1, 6))
def test_random_streams_are_realizable(seed, T):
    rng = random.Random(seed)
    inst = random_instance(rng)
    try:
        stream = random_realizable_stream(rng, inst, T)
    except InstanceError:
        return
    assert len(stream) == T and validate_realizable(inst, stream) is not None


def test_all_streams_counts():
    ex = example3_instance()
    # each set holds exactly one constant, so a realizable stream repeats one set
    assert [sum(1 for _ in all_streams(ex, T)) for T in range(4)] == [1, 3, 3, 3]
    assert sum(1 for _ in all_streams(ex, 2, realizable=False)) == 9
    assert list(all_streams(ex, 0)) == [LabeledStream(())]
