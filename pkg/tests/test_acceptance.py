"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line."""

import itertools
import math
import random
import time
from fractions import Fraction

import pytest

from setfeedback.adversaries import (
    KhinchineAdversary,
    MSAdaptiveAdversary,
    ScriptedAdversary,
    SeparationAdversary,
    SLTreeAdversary,
)
from setfeedback.dims import DimensionEngine
from setfeedback.harness import eq1_check, minimax_oracle, monte_carlo, potential_check, run_game
from setfeedback.helly import helly_number
from setfeedback.learners import (
    AgnosticLearner,
    Example3Learner,
    RSOALearner,
    SOALearner,
    UniformLearner,
)
from setfeedback.model import (
    all_streams,
    example3_instance,
    gen_cosingleton_instance,
    gen_hamming_instance,
    gen_interval_instance,
    gen_ranking_instance,
    gen_singleton_instance,
    random_realizable_stream,
    random_singleton_instance,
)
from setfeedback.suites import minimax_instances, potential_instances, structural_instances
from setfeedback.witness import psldim_witness, sldim_witness, validate_witness

SEED = 0


@pytest.fixture
def report(capsys):
    def emit(label, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} [{label}] {detail}")
        assert ok, detail
    return emit


@pytest.fixture(scope="module")
def structural():
    insts = structural_instances(100, SEED)
    return [DimensionEngine(i) for i in insts]


def test_01_sandwich(report, structural):
    start = time.perf_counter()
    bad = [(k, p) for p in (2, 3) for k, e in enumerate(structural)
           if not e.check_relations(p, Fraction(1, p)).sandwich]
    elapsed = time.perf_counter() - start
    report("01 sandwich", not bad and elapsed < 120,
           f"SL_p <= MS_1/p <= SL failures {bad or 'none'} over 100 instances x p in {{2,3}}, {elapsed:.1f}s")


def test_02_helly_collapse(report, structural):
    subset = [(k, e) for k, e in enumerate(structural) if e.helly() in (2, 3)]
    bad = [k for k, e in subset if not e.check_relations(e.helly(), Fraction(1, e.helly())).collapse]
    report("02 collapse", subset and not bad, f"{len(subset) - len(bad)}/{len(subset)} instances with Helly <= 3 collapse")


def test_03_helly_values(report):
    got = {f"ranking K={K}": helly_number(gen_ranking_instance(K).sets) for K in (3, 4)}
    got.update({f"interval G={G}": helly_number(gen_interval_instance(G).sets) for G in range(2, 9)})
    h3 = helly_number(gen_hamming_instance(3, 1).sets)
    h4 = helly_number(gen_hamming_instance(4, 1).sets)
    ok = all(v == 2 for v in got.values()) and 4 <= h3 <= 5 and 4 <= h4 <= 6
    report("03 helly", ok, f"{got}, hamming K=3 {h3} in [4,5], K=4 {h4} in [4,6]")


def test_04_deterministic_optimality(report):
    rng = random.Random(SEED)
    lines, ok = [], True
    for name, inst, want in (("example3", example3_instance(), 1), ("cosingleton M=3", gen_cosingleton_instance(3), 2)):
        eng = DimensionEngine(inst)
        d = eng.sldim()
        tree = sldim_witness(eng)
        vs_tree = run_game(inst, SOALearner(inst, eng), SLTreeAdversary(tree), d + 5).expected_loss
        worst = max(
            run_game(inst, SOALearner(inst, eng), ScriptedAdversary(st), len(st)).expected_loss
            for st in (random_realizable_stream(rng, inst, 2 * d + 4) for _ in range(1000))
        )
        ok &= d == want and vs_tree == d and worst <= d and not validate_witness(inst, tree)
        lines.append(f"{name}: SL={d} tree mistakes={vs_tree} worst of 1000 streams={worst}")
    report("04 SOA optimal", ok, "; ".join(lines))


def test_05_minimax_oracle(report):
    start = time.perf_counter()
    insts = minimax_instances(24, SEED)
    bad = []
    for k, inst in enumerate(insts):
        sl = DimensionEngine(inst).sldim()
        for T in (1, 2, 3):
            v = minimax_oracle(inst, T)
            if v != min(T, sl):
                bad.append((k, T, v, sl))
    elapsed = time.perf_counter() - start
    report("05 minimax", not bad and len(insts) >= 20 and elapsed < 300,
           f"{len(insts)} instances, mismatches {bad or 'none'}, {elapsed:.1f}s")


def test_06_high_mass_misses(report):
    ex = example3_instance()
    eng = DimensionEngine(ex)
    worst_ex = max(eq1_check(ex, Fraction(1, 3), st, eng).count for T in range(6) for st in all_streams(ex, T))
    sb = gen_singleton_instance(2)
    es = DimensionEngine(sb)
    worst_sb = max(eq1_check(sb, Fraction(1, 4), st, es).count for T in range(6) for st in all_streams(sb, T))
    ldim = es.ldim()
    report("06 miss count", worst_ex <= 1 and ldim == 1 and worst_sb <= ldim,
           f"example3 max {worst_ex} <= 1; singleton binary max {worst_sb} <= Ldim {ldim}")


def test_07_fixed_scale_loss_bound(report):
    ex = example3_instance()
    eng = DimensionEngine(ex)
    eps = Fraction(1, 3)
    d = eng.msdim(None, eps)
    gaps = [eq1_check(ex, eps, st, eng).expected_loss - (eps * T + d)
            for T in range(6) for st in all_streams(ex, T)]
    adaptive = []
    for T in range(1, 6):
        g = run_game(ex, RSOALearner(ex, eps, eng), MSAdaptiveAdversary(ex, eps, eng), T)
        adaptive.append(g.expected_loss - (eps * g.T + d))
    ok = max(gaps) <= 0 and max(adaptive) <= 0
    report("07 loss <= eps T + MS", ok,
           f"max slack over {len(gaps)} streams {max(gaps)}, vs MS adversary {max(adaptive)}")


def test_08_potential(report):
    ex = example3_instance()
    eng = DimensionEngine(ex)
    rounds = fails = 0
    for N in (1, 2, 3):
        for T in range(4):
            for st in all_streams(ex, T):
                rows = potential_check(ex, N, st, eng).rows
                rounds += len(rows)
                fails += sum(not r.ok for r in rows)
    rng = random.Random(SEED + 1)
    for inst in potential_instances(SEED):
        en = DimensionEngine(inst)
        for N in (1, 2, 3):
            for _ in range(1000):
                rows = potential_check(inst, N, random_realizable_stream(rng, inst, 4), en).rows
                rounds += len(rows)
                fails += sum(not r.ok for r in rows)
    report("08 potential", fails == 0, f"{fails} of {rounds} rounds violate the potential drop")


def test_09_randomized_lower_bound(report):
    ex = example3_instance()
    eng = DimensionEngine(ex)
    g = Fraction(1, 3)
    game = run_game(ex, RSOALearner(ex, g, eng), MSAdaptiveAdversary(ex, g, eng), 10)
    target = g * eng.msdim(None, g)
    report("09 MS adversary", target == Fraction(1, 3) and game.expected_loss >= target,
           f"expected loss {game.expected_loss} >= {target}")


def test_10_agnostic(report):
    ex = example3_instance()
    eng = DimensionEngine(ex)
    T, eps = 6, Fraction(1, 3)
    d = eng.msdim(None, eps)
    bound = d + eps * T + math.sqrt(2 * d * T * math.log(T))
    start = time.perf_counter()
    worst = max(
        run_game(ex, AgnosticLearner(ex, eps, T, engine=eng), ScriptedAdversary([(0, s) for s in seq]), T).regret
        for seq in itertools.product(range(ex.n_sets), repeat=T)
    )
    elapsed = time.perf_counter() - start
    report("10 agnostic", float(worst) <= bound and elapsed < 600,
           f"max regret over 3^6 streams {float(worst):.4f} <= {bound:.4f}, {elapsed:.1f}s")


def test_11_khinchine(report):
    inst = gen_singleton_instance(2)
    eng = DimensionEngine(inst)
    assert eng.psldim(None, 2) == 1
    tree = psldim_witness(eng, 2)
    makers = {
        "soa": lambda: SOALearner(inst, eng, strict=False),
        "rsoa": lambda: RSOALearner(inst, Fraction(1, 4), eng, strict=False),
        "uniform": lambda: UniformLearner(inst.m),
    }
    start = time.perf_counter()
    parts, ok = [], True
    for name, make in makers.items():
        def play(s, make=make):
            adv = KhinchineAdversary(tree, 25, seed=s)
            return run_game(inst, make(), adv, adv.T, mode="sample", seed=s + 7919)
        summ = monte_carlo(play, 10_000, SEED)
        floor = math.sqrt(25 / 8) - 3 * summ.se
        ok &= summ.mean >= floor
        parts.append(f"{name} {summ.mean:.3f} (SE {summ.se:.3f}) >= {floor:.3f}")
    elapsed = time.perf_counter() - start
    report("11 khinchine", ok and elapsed < 120, "; ".join(parts) + f", {elapsed:.1f}s")


def test_12_example3_tightness(report):
    ex = example3_instance()
    worst = max(
        run_game(ex, Example3Learner(ex), ScriptedAdversary([(0, s) for s in seq]), 5).regret
        for seq in itertools.product(range(ex.n_sets), repeat=5)
    )
    report("12 example3 learner", worst <= Fraction(1, 3), f"max regret over 3^5 streams {worst} <= 1/3")


def test_13_separation(report):
    inst = gen_cosingleton_instance(100)
    eng = DimensionEngine(inst)
    soa = run_game(inst, SOALearner(inst, eng), SeparationAdversary(inst), 20).expected_loss
    uni = run_game(inst, UniformLearner(100), SeparationAdversary(inst), 20).expected_loss
    report("13 separation", soa == 20 and uni == Fraction(1, 5), f"SOA mistakes {soa}, uniform expected loss {uni}")


def test_14_singleton_reduction(report):
    rng = random.Random(SEED)
    bad = []
    for k in range(20):
        e = DimensionEngine(random_singleton_instance(rng))
        if not (e.sldim() == e.ldim() == e.msdim(None, 0)):
            bad.append(k)
    report("14 singleton reduction", not bad, f"SL = MS_0 = Ldim on {20 - len(bad)}/20 instances")


def test_15_disjoint_ball_witness(report):
    ham = gen_hamming_instance(3, 1, [[0], [7]])
    eng = DimensionEngine(ham)
    v = eng.psldim(None, 2)
    tree = psldim_witness(eng, 2, depth=1)
    problems = validate_witness(ham, tree)
    s0, s1 = (tree.root.children[i][0] for i in (0, 1))
    disjoint = ham.sets[s0] & ham.sets[s1] == 0
    report("15 hamming witness", v >= 1 and not problems and disjoint,
           f"SL_2 = {v}, witness problems {problems or 'none'}, balls disjoint {disjoint}")
