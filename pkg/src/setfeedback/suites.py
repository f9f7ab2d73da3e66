"""Verification suites: each returns a report of named pass/fail checks."""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .adversaries import (
    KhinchineAdversary,
    MSAdaptiveAdversary,
    ScriptedAdversary,
    SeparationAdversary,
    SLTreeAdversary,
)
from .dims import DimensionEngine
from .harness import eq1_check, minimax_oracle, monte_carlo, potential_check, run_game
from .helly import helly_number
from .learners import (
    AgnosticLearner,
    ConstantLearner,
    Example3Learner,
    GreedyLearner,
    RSOALearner,
    SOALearner,
    UniformLearner,
)
from .model import (
    InstanceError,
    all_streams,
    example3_instance,
    gen_cosingleton_instance,
    gen_hamming_instance,
    gen_interval_instance,
    gen_ranking_instance,
    gen_singleton_instance,
    random_instance,
    random_realizable_stream,
    random_singleton_instance,
)
from .rational import format_rational
from .witness import psldim_witness, sldim_witness, validate_witness


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    expected: str
    actual: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: expected {self.expected}, actual {self.actual}"


@dataclass
class SuiteReport:
    suite: str
    checks: list[Check] = field(default_factory=list)
    seed: int | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name, passed, expected, actual) -> Check:
        c = Check(name, bool(passed), str(expected), str(actual))
        self.checks.append(c)
        return c

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "passed": self.passed,
            "checks": [c.__dict__ for c in self.checks],
        }


def _fr(q) -> str:
    return format_rational(Fraction(q))


def structural_instances(n: int, seed: int):
    rng = random.Random(seed)
    return [random_instance(rng) for _ in range(n)]


def suite_structural(n_instances: int = 100, seed: int = 0) -> SuiteReport:
    """Sandwich SL_p <= MS_{1/p} <= SL, and equality when p is the Helly number."""
    rep = SuiteReport("structural", seed=seed)
    insts = structural_instances(n_instances, seed)
    engines = [DimensionEngine(i) for i in insts]
    for p in (2, 3):
        gamma = Fraction(1, p)
        bad = [k for k, e in enumerate(engines) if not e.check_relations(p, gamma).sandwich]
        rep.add(f"sandwich p={p} gamma=1/{p}", not bad, f"{n_instances}/{n_instances}",
                f"{n_instances - len(bad)}/{n_instances}" + (f" failing {bad}" if bad else ""))
    collapse = [(k, e) for k, e in enumerate(engines) if e.helly() in (2, 3)]
    bad = [k for k, e in collapse if not e.check_relations(e.helly(), Fraction(1, e.helly())).collapse]
    rep.add("collapse when p = Helly <= 3", not bad, f"{len(collapse)}/{len(collapse)} equal",
            f"{len(collapse) - len(bad)}/{len(collapse)}" + (f" failing {bad}" if bad else ""))
    return rep


def suite_helly() -> SuiteReport:
    rep = SuiteReport("helly")
    for K in (3, 4):
        h = helly_number(gen_ranking_instance(K).sets)
        rep.add(f"ranking K={K}", h == 2, 2, h)
    for G in range(2, 9):
        h = helly_number(gen_interval_instance(G).sets)
        rep.add(f"interval G={G}", h == 2, 2, h)
    for K, hi in ((3, 5), (4, 6)):
        h = helly_number(gen_hamming_instance(K, 1).sets)
        rep.add(f"hamming K={K} q=1", 4 <= h <= hi, f"in [4,{hi}]", h)
    h = helly_number(example3_instance().sets)
    rep.add("example3", h == 3, 3, h)
    h = helly_number(gen_cosingleton_instance(10).sets)
    rep.add("cosingleton M=10", h == 10, 10, h)
    return rep


def suite_bounds(seed: int = 0, streams_per_instance: int = 1000) -> SuiteReport:
    """Deterministic optimality, singleton reduction and the disjoint-ball witness."""
    rep = SuiteReport("bounds", seed=seed)
    rng = random.Random(seed)
    for name, inst in (("example3", example3_instance()), ("cosingleton M=3", gen_cosingleton_instance(3))):
        eng = DimensionEngine(inst)
        d = eng.sldim()
        tree = sldim_witness(eng)
        rep.add(f"{name}: SL witness valid", not validate_witness(inst, tree), "no problems",
                validate_witness(inst, tree) or "none")
        for lname, learner in (
            ("soa", SOALearner(inst, eng)),
            ("constant(0)", ConstantLearner(0)),
            ("greedy", GreedyLearner(inst, eng)),
        ):
            g = run_game(inst, learner, SLTreeAdversary(tree), d + 5)
            mistakes = g.expected_loss
            ok = mistakes == d if lname == "soa" else mistakes >= d
            rep.add(f"{name}: {lname} vs tree adversary", ok, f"{'=' if lname == 'soa' else '>='} {d}", mistakes)
        worst = 0
        for _ in range(streams_per_instance):
            st = random_realizable_stream(rng, inst, 2 * d + 4)
            g = run_game(inst, SOALearner(inst, eng), ScriptedAdversary(st), len(st))
            worst = max(worst, g.expected_loss)
        rep.add(f"{name}: SOA on {streams_per_instance} random realizable streams", worst <= d, f"<= {d}", worst)

    singles = [random_singleton_instance(rng) for _ in range(20)]
    bad = []
    for k, inst in enumerate(singles):
        e = DimensionEngine(inst)
        if not (e.sldim() == e.ldim() == e.msdim(None, 0)):
            bad.append(k)
    rep.add("singleton systems: SL = MS_0 = Ldim", not bad, "20/20", f"{20 - len(bad)}/20")

    ham = gen_hamming_instance(3, 1, [[0], [7]])
    eng = DimensionEngine(ham)
    v = eng.psldim(None, 2)
    rep.add("hamming K=3 q=1, two constants: SL_2", v >= 1, ">= 1", v)
    if v >= 1:
        tree = psldim_witness(eng, 2, depth=1)
        problems = validate_witness(ham, tree)
        s0, s1 = (tree.root.children[i][0] for i in (0, 1))
        disjoint = ham.sets[s0] & ham.sets[s1] == 0
        rep.add("hamming disjoint-ball witness", not problems and disjoint, "valid, disjoint balls",
                f"balls {ham.set_system.as_lists()[s0]} / {ham.set_system.as_lists()[s1]}, problems {problems or 'none'}")
    return rep


def suite_eq1(max_len: int = 5) -> SuiteReport:
    """High-mass miss counts and the fixed-scale expected-loss bound."""
    rep = SuiteReport("eq1")
    ex = example3_instance()
    eng = DimensionEngine(ex)
    eps = Fraction(1, 3)
    d = eng.msdim(None, eps)
    worst_count, worst_gap, n = 0, None, 0
    for T in range(0, max_len + 1):
        for st in all_streams(ex, T):
            r = eq1_check(ex, eps, st, eng)
            n += 1
            worst_count = max(worst_count, r.count)
            gap = r.expected_loss - (eps * T + d)
            worst_gap = gap if worst_gap is None else max(worst_gap, gap)
    rep.add(f"example3 eps=1/3: miss count over {n} realizable streams", worst_count <= d, f"<= {d}", worst_count)
    rep.add("example3 eps=1/3: expected loss <= eps*T + MS", worst_gap <= 0,
            "max(loss - bound) <= 0", _fr(worst_gap))

    sb = gen_singleton_instance(2)
    es = DimensionEngine(sb)
    ld = es.ldim()
    worst = 0
    for T in range(0, max_len + 1):
        for st in all_streams(sb, T):
            worst = max(worst, eq1_check(sb, Fraction(1, 4), st, es).count)
    rep.add("singleton binary eps=1/4: miss count", worst <= ld, f"<= Ldim = {ld}", worst)

    cases = [
        ("example3", ex, Fraction(1, 3)), ("example3", ex, Fraction(1, 4)), ("example3", ex, Fraction(1, 2)),
        ("cosingleton M=3", gen_cosingleton_instance(3), Fraction(1, 3)),
        ("singleton binary", sb, Fraction(1, 4)),
    ]
    for name, inst, e in cases:
        en = DimensionEngine(inst)
        d = en.msdim(None, e)
        for T in range(1, max_len + 1):
            g = run_game(inst, RSOALearner(inst, e, en), MSAdaptiveAdversary(inst, e, en), T)
            bound = e * g.T + d
            rep.add(f"{name} eps={_fr(e)} vs MS adversary T={T}", g.expected_loss <= bound,
                    f"<= {_fr(bound)}", _fr(g.expected_loss))
    return rep


def potential_instances(seed: int, count: int = 5):
    """Random instances with a positive MS value at scale 1/2, so rounds carry weight."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        inst = random_instance(rng)
        try:
            random_realizable_stream(random.Random(0), inst, 1)
        except InstanceError:
            continue
        if DimensionEngine(inst).msdim(None, Fraction(1, 2)) >= 1:
            out.append(inst)
    return out


def suite_potential(seed: int = 0, n_streams: int = 1000, T: int = 4) -> SuiteReport:
    rep = SuiteReport("potential", seed=seed)
    ex = example3_instance()
    eng = DimensionEngine(ex)
    for N in (1, 2, 3):
        rounds = fails = 0
        for L in range(0, 4):
            for st in all_streams(ex, L):
                tr = potential_check(ex, N, st, eng)
                rounds += len(tr.rows)
                fails += sum(1 for r in tr.rows if not r.ok)
        rep.add(f"example3 N={N}: all realizable streams T<=3", fails == 0, f"0 of {rounds} rounds fail", fails)
    rng = random.Random(seed + 1)
    for k, inst in enumerate(potential_instances(seed)):
        en = DimensionEngine(inst)
        for N in (1, 2, 3):
            rounds = fails = 0
            for _ in range(n_streams):
                tr = potential_check(inst, N, random_realizable_stream(rng, inst, T), en)
                rounds += len(tr.rows)
                fails += sum(1 for r in tr.rows if not r.ok)
            rep.add(f"random instance {k} N={N}: {n_streams} streams", fails == 0,
                    f"0 of {rounds} rounds fail", fails)
    return rep


def minimax_instances(n: int, seed: int):
    rng = random.Random(seed)
    fixed = [example3_instance(), gen_cosingleton_instance(3), gen_singleton_instance(2),
             gen_singleton_instance(3, [[0, 1], [1, 2], [2, 0], [0, 0]])]
    rand = [
        random_instance(rng, m_range=(2, 4), sets_range=(2, 5), x_range=(1, 2), h_range=(1, 5))
        for _ in range(max(0, n - len(fixed)))
    ]
    return fixed + rand


def suite_minimax(n_instances: int = 24, seed: int = 0, horizons=(1, 2, 3)) -> SuiteReport:
    rep = SuiteReport("minimax", seed=seed)
    insts = minimax_instances(n_instances, seed)
    bad = []
    for k, inst in enumerate(insts):
        sl = DimensionEngine(inst).sldim()
        for T in horizons:
            v = minimax_oracle(inst, T)
            if v != min(T, sl):
                bad.append((k, T, v, min(T, sl)))
    rep.add(f"oracle = min(T, SL) on {len(insts)} instances, T in {list(horizons)}", not bad,
            "all equal", bad or "all equal")
    return rep


def khinchine_summary(learner_name: str, trials: int, seed: int, k: int = 25, epsilon=Fraction(1, 4)):
    inst = gen_singleton_instance(2)
    eng = DimensionEngine(inst)
    tree = psldim_witness(eng, 2)
    makers = {
        "soa": lambda: SOALearner(inst, eng, strict=False),
        "rsoa": lambda: RSOALearner(inst, epsilon, eng, strict=False),
        "uniform": lambda: UniformLearner(inst.m),
    }

    def play(s):
        adv = KhinchineAdversary(tree, k, seed=s)
        return run_game(inst, makers[learner_name](), adv, adv.T, mode="sample", seed=s + 7919)

    return monte_carlo(play, trials, seed), k * tree.depth


def suite_khinchine(trials: int = 10_000, seed: int = 0, k: int = 25) -> SuiteReport:
    rep = SuiteReport("khinchine", seed=seed)
    for name in ("soa", "rsoa", "uniform"):
        summ, T = khinchine_summary(name, trials, seed, k)
        target = math.sqrt(T / 8)
        rep.add(f"{name}: mean regret over {trials} trials (T={T})", summ.mean >= target - 3 * summ.se,
                f">= sqrt(T/8) - 3SE = {target - 3 * summ.se:.4f}", f"{summ.mean:.4f} (SE {summ.se:.4f})")
    return rep


def suite_example3(agnostic_horizon: int = 6) -> SuiteReport:
    rep = SuiteReport("example3")
    ex = example3_instance()
    eng = DimensionEngine(ex)
    worst = max(
        run_game(ex, Example3Learner(ex), ScriptedAdversary([(0, s) for s in seq]), 5).regret
        for seq in itertools.product(range(ex.n_sets), repeat=5)
    )
    rep.add("example3 learner: max exact regret over all 3^5 streams", worst <= Fraction(1, 3), "<= 1/3", _fr(worst))

    g = Fraction(1, 3)
    game = run_game(ex, RSOALearner(ex, g, eng), MSAdaptiveAdversary(ex, g, eng), 10)
    target = g * eng.msdim(None, g)
    rep.add("MS adversary gamma=1/3 vs RSOA: total expected loss", game.expected_loss >= target,
            f">= {_fr(target)}", _fr(game.expected_loss))

    T = agnostic_horizon
    eps = Fraction(1, 3)
    d = eng.msdim(None, eps)
    bound = d + eps * T + math.sqrt(2 * d * T * math.log(T))
    worst = max(
        run_game(ex, AgnosticLearner(ex, eps, T, engine=eng), ScriptedAdversary([(0, s) for s in seq]), T).regret
        for seq in itertools.product(range(ex.n_sets), repeat=T)
    )
    rep.add(f"agnostic eps=1/3 T={T}: max exact regret over all 3^{T} streams", float(worst) <= bound,
            f"<= {bound:.4f}", f"{float(worst):.4f}")
    return rep


def suite_separation(M: int = 100, T: int = 20) -> SuiteReport:
    rep = SuiteReport("separation")
    inst = gen_cosingleton_instance(M)
    eng = DimensionEngine(inst)
    g = run_game(inst, SOALearner(inst, eng), SeparationAdversary(inst), T)
    rep.add(f"soa mistakes, M={M}, T={T}", g.expected_loss == min(T, M - 1), min(T, M - 1), g.expected_loss)
    g = run_game(inst, UniformLearner(M), SeparationAdversary(inst), T)
    rep.add("uniform expected loss", g.expected_loss == Fraction(T, M), _fr(Fraction(T, M)), _fr(g.expected_loss))
    return rep


SUITES = {
    "structural": suite_structural,
    "helly": suite_helly,
    "bounds": suite_bounds,
    "eq1": suite_eq1,
    "potential": suite_potential,
    "minimax": suite_minimax,
    "khinchine": suite_khinchine,
    "example3": suite_example3,
    "separation": suite_separation,
}
