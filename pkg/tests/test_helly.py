import itertools

import pytest
from hypothesis import given, settings, strategies as st

from oracles import helly_brute
from setfeedback.helly import SearchBudgetExceeded, helly_number, minimal_empty_families
from setfeedback.model import (
    example3_instance,
    gen_cofinite_instance,
    gen_cosingleton_instance,
    gen_hamming_instance,
    gen_interval_instance,
    gen_ranking_instance,
)


def as_sets(masks):
    return [frozenset(i for i in range(m.bit_length()) if (m >> i) & 1) for m in masks]


def test_worked_values():
    assert helly_number(example3_instance().sets) == 3
    assert helly_number(gen_ranking_instance(3).sets) == 2
    assert helly_number(gen_cosingleton_instance(10).sets) == 10
    assert all(helly_number(gen_interval_instance(G).sets) == 2 for G in range(2, 9))
    assert 4 <= helly_number(gen_hamming_instance(3, 1).sets) <= 5


def test_vacuous_is_zero():
    assert helly_number([0b011, 0b111]) == 0
    assert helly_number(gen_cofinite_instance(5, 2).sets) == 0


def test_minimal_families_example3():
    assert list(minimal_empty_families(example3_instance().sets)) == [(0, 1, 2)]
    assert list(minimal_empty_families(example3_instance().sets, max_size=2)) == []


def test_budget():
    with pytest.raises(SearchBudgetExceeded):
        list(minimal_empty_families(gen_interval_instance(8).sets, node_limit=50))
    with pytest.raises(SearchBudgetExceeded):
        helly_number(gen_hamming_instance(4, 1).sets, node_limit=50)


@settings(max_examples=150, deadline=None)
@given(st.lists(st.integers(1, 2**5 - 1), min_size=1, max_size=7, unique=True))
def test_matches_brute_force(masks):
    assert helly_number(masks) == helly_brute(as_sets(masks))


@settings(max_examples=80, deadline=None)
@given(st.lists(st.integers(1, 2**5 - 1), min_size=1, max_size=7, unique=True))
def test_families_are_minimal_and_complete(masks):
    found = set(minimal_empty_families(masks))
    sets = as_sets(masks)
    expected = set()
    for r in range(1, len(masks) + 1):
        for fam in itertools.combinations(range(len(masks)), r):
            if frozenset.intersection(*(sets[i] for i in fam)):
                continue
            if r == 1 or all(frozenset.intersection(*(sets[i] for i in sub)) for sub in itertools.combinations(fam, r - 1)):
                expected.add(fam)
    assert found == expected
