import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from oracles import ShatterOracle
from setfeedback.dims import DimensionEngine, check_relations, ldim, msdim, psldim, sldim
from setfeedback.model import (
    example3_instance,
    gen_cosingleton_instance,
    gen_hamming_instance,
    gen_singleton_instance,
    make_instance,
    random_instance,
    random_singleton_instance,
)

SMALL = dict(m_range=(2, 4), sets_range=(2, 5), x_range=(1, 2), h_range=(1, 5))
seeds = st.integers(min_value=0, max_value=10**9)


def small_instance(seed):
    return random_instance(random.Random(seed), **SMALL)


# -- worked values ------------------------------------------------------------

def test_example3_values():
    ex = example3_instance()
    assert sldim(ex) == 1
    assert psldim(ex, p=2) == 0
    assert psldim(ex, p=3) == 1
    assert msdim(ex, gamma=Fraction(1, 3)) == 1
    assert msdim(ex, gamma=Fraction(2, 5)) == 0
    assert msdim(ex, gamma=Fraction(1, 2)) == 0
    assert msdim(ex, gamma=0) == 1


def test_example3_relations():
    r = check_relations(example3_instance(), 3, Fraction(1, 3))
    assert (r.psl, r.ms, r.sl) == (1, 1, 1)
    assert r.sandwich and r.collapse_applies and r.collapse
    r = check_relations(example3_instance(), 2, Fraction(1, 2))
    assert (r.psl, r.ms, r.sl) == (0, 0, 1) and r.sandwich and not r.collapse_applies


def test_singleton_binary_constants():
    inst = gen_singleton_instance(2)
    assert sldim(inst) == ldim(inst) == msdim(inst, gamma=0) == psldim(inst, p=2) == 1


def test_single_hypothesis_is_zero():
    inst = gen_singleton_instance(2, [[1]])
    eng = DimensionEngine(inst)
    assert (eng.sldim(), eng.ldim(), eng.psldim(None, 2), eng.msdim(None, 0)) == (0, 0, 0, 0)


def test_empty_version_space():
    eng = DimensionEngine(example3_instance())
    assert eng.ldim(0) == eng.sldim(0) == eng.psldim(0, 2) == eng.msdim(0, Fraction(1, 3)) == -1


def test_cosingleton_sl():
    assert sldim(gen_cosingleton_instance(3)) == 2
    assert sldim(gen_cosingleton_instance(6)) == 5


def test_hamming_two_constants_psl():
    assert psldim(gen_hamming_instance(3, 1, [[0], [7]]), p=2) >= 1


def test_psl_rejects_small_p():
    with pytest.raises(ValueError):
        psldim(example3_instance(), p=1)


def test_ms_rejects_gamma_out_of_range():
    with pytest.raises(ValueError):
        msdim(example3_instance(), gamma=Fraction(3, 2))


def test_symmetric_and_plain_keys_agree():
    # Hypothesis rows that are label permutations of each other share a memo key
    # only when the set system allows it; values must match a fresh engine either way.
    inst = make_instance(3, [[0, 1], [1, 2], [0, 2]], [[0, 1], [1, 2], [2, 0]])
    eng = DimensionEngine(inst)
    assert eng.sldim() == ShatterOracle(inst).sl()
    assert eng.msdim(None, Fraction(1, 3)) == ShatterOracle(inst).ms(Fraction(1, 3))


# -- oracle cross-checks ------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(seeds)
def test_sl_matches_tree_search(seed):
    inst = small_instance(seed)
    assert sldim(inst) == ShatterOracle(inst).sl()


@settings(max_examples=60, deadline=None)
@given(seeds, st.sampled_from([2, 3]))
def test_psl_matches_tree_search(seed, p):
    inst = small_instance(seed)
    assert DimensionEngine(inst).psldim(None, p) == ShatterOracle(inst).psl(p)


@settings(max_examples=40, deadline=None)
@given(seeds, st.sampled_from([Fraction(0), Fraction(1, 4), Fraction(1, 3), Fraction(1, 2)]))
def test_ms_matches_tree_search(seed, gamma):
    inst = small_instance(seed)
    assert DimensionEngine(inst).msdim(None, gamma) == ShatterOracle(inst).ms(gamma)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_ldim_matches_tree_search(seed):
    inst = small_instance(seed)
    assert ldim(inst) == ShatterOracle(inst).ldim()


# -- invariants ---------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(seeds)
def test_ms_monotone_in_gamma(seed):
    eng = DimensionEngine(random_instance(random.Random(seed)))
    values = [eng.msdim(None, g) for g in (Fraction(0), Fraction(1, 8), Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(1))]
    assert values == sorted(values, reverse=True)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_psl_monotone_in_p(seed):
    eng = DimensionEngine(random_instance(random.Random(seed)))
    assert eng.psldim(None, 2) <= eng.psldim(None, 3) <= eng.psldim(None, 4)


@settings(max_examples=60, deadline=None)
@given(seeds, st.sampled_from([2, 3, 4]))
def test_sandwich(seed, p):
    eng = DimensionEngine(random_instance(random.Random(seed)))
    for gamma in (Fraction(0), Fraction(1, 2 * p), Fraction(1, p)):
        assert eng.psldim(None, p) <= eng.msdim(None, gamma) <= eng.sldim()


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_collapse_at_helly(seed):
    eng = DimensionEngine(random_instance(random.Random(seed)))
    p = eng.helly()
    if 2 <= p <= 4:
        assert eng.psldim(None, p) == eng.msdim(None, Fraction(1, p)) == eng.sldim()


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(min_value=1))
def test_version_space_monotone(seed, sub):
    inst = random_instance(random.Random(seed))
    eng = DimensionEngine(inst)
    W = inst.full & sub
    if not W:
        return
    assert eng.sldim(W) <= eng.sldim()
    assert eng.psldim(W, 2) <= eng.psldim(None, 2)
    assert eng.msdim(W, Fraction(1, 3)) <= eng.msdim(None, Fraction(1, 3))
    assert eng.ldim(W) <= eng.ldim()


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_singleton_reduction(seed):
    eng = DimensionEngine(random_singleton_instance(random.Random(seed)))
    assert eng.sldim() == eng.ldim() == eng.msdim(None, 0)
