"""Command-line entry point: gen, dims, play, bench, verify.

Exit codes: 0 success, 1 a verification check failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from fractions import Fraction

from .adversaries import (
    IIDAdversary,
    KhinchineAdversary,
    MSAdaptiveAdversary,
    ScriptedAdversary,
    SeparationAdversary,
    SLTreeAdversary,
)
from .dims import PSL_SUBSET_GUARD, DimensionEngine
from .harness import csv_text, monte_carlo, run_game
from .learners import ConfigurationError, NotRealizableError, make_learner
from .model import (
    InstanceError,
    dump_instance,
    example3_instance,
    gen_cofinite_instance,
    gen_cosingleton_instance,
    gen_hamming_instance,
    gen_interval_instance,
    gen_ranking_instance,
    gen_singleton_instance,
    load_instance,
    load_stream,
)
from .rational import format_rational, parse_rational
from .suites import SUITES
from .witness import psldim_witness, sldim_witness, validate_witness

LEARNERS = ["soa", "rsoa", "msol", "agnostic", "uniform", "constant", "example3"]
ADVERSARIES = ["tree", "ms", "khinchine", "separation", "scripted", "iid"]


class UsageError(Exception):
    pass


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _default_seed() -> int:
    raw = os.environ.get("SFL_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"SFL_SEED must be an integer, got {raw!r}")


def preset_instance(spec: str):
    """``example3``, ``cosingleton:M``, ``singleton:m``, ``ranking:K``, ``interval:G``, ``hamming:K:q``."""
    name, *args = spec.split(":")
    try:
        nums = [int(a) for a in args]
    except ValueError:
        raise UsageError(f"bad preset {spec!r}")
    builders = {
        "example3": (0, lambda: example3_instance()),
        "cosingleton": (1, lambda: gen_cosingleton_instance(*nums)),
        "singleton": (1, lambda: gen_singleton_instance(*nums)),
        "ranking": (1, lambda: gen_ranking_instance(*nums)),
        "interval": (1, lambda: gen_interval_instance(*nums)),
        "hamming": (2, lambda: gen_hamming_instance(*nums)),
        "cofinite": (2, lambda: gen_cofinite_instance(*nums)),
    }
    if name not in builders or len(nums) != builders[name][0]:
        raise UsageError(f"bad preset {spec!r}")
    return builders[name][1]()


def _instance(args):
    if args.instance:
        with open(args.instance) as fh:
            return load_instance(fh.read())
    if args.preset:
        return preset_instance(args.preset)
    raise UsageError("one of --instance or --preset is required")


def _write(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- subcommands -------------------------------------------------------------

def cmd_gen(args) -> int:
    kind = args.kind
    if kind == "example3":
        inst = example3_instance()
    elif kind == "ranking":
        inst = gen_ranking_instance(args.K)
    elif kind == "interval":
        inst = gen_interval_instance(args.G)
    elif kind == "hamming":
        inst = gen_hamming_instance(args.K, args.q)
    elif kind == "singleton":
        inst = gen_singleton_instance(args.m)
    elif kind == "cosingleton":
        inst = gen_cosingleton_instance(args.M)
    else:
        inst = gen_cofinite_instance(args.M, args.k)
    _write(args, dump_instance(inst) + "\n")
    return 0


def cmd_dims(args) -> int:
    inst = _instance(args)
    eng = DimensionEngine(inst)
    helly = eng.helly()
    report: dict = {"Helly": helly}
    if helly == 0:
        report["Helly_vacuous"] = True
    if not args.helly:
        report["Ldim"] = eng.ldim()
        report["SL"] = eng.sldim()
        ps = args.p or list(range(2, max(3, helly) + 1))
        report["SL_p"] = {}
        for p in ps:
            try:
                report["SL_p"][str(p)] = eng.psldim(None, p)
            except ValueError as exc:
                if p < 2:
                    raise UsageError(str(exc))
                report["SL_p"][str(p)] = f"skipped: subset guard {PSL_SUBSET_GUARD}"
        gammas = args.gamma or [Fraction(1, 3)]
        report["MS"] = {format_rational(g): eng.msdim(None, g) for g in gammas}
        if args.witness:
            tree = sldim_witness(eng) if args.witness == "sl" else psldim_witness(eng, args.witness_p)
            report["witness"] = tree.to_dict()
            report["witness_problems"] = validate_witness(inst, tree)
    _write(args, json.dumps(report, indent=1) + "\n")
    return 0


def _build_game(args, inst, eng, seed: int):
    rng = random.Random(seed)
    T = args.rounds
    adv_kind = args.adversary
    if adv_kind == "tree":
        adversary = SLTreeAdversary(sldim_witness(eng))
    elif adv_kind == "ms":
        adversary = MSAdaptiveAdversary(inst, args.gamma if args.gamma is not None else Fraction(1, 3), eng)
    elif adv_kind == "khinchine":
        adversary = KhinchineAdversary(psldim_witness(eng, 2), args.block, rng=rng)
        T = min(T, adversary.T)
    elif adv_kind == "separation":
        adversary = SeparationAdversary(inst)
    elif adv_kind == "scripted":
        if not args.stream:
            raise UsageError("--adversary scripted needs --stream")
        with open(args.stream) as fh:
            stream = load_stream(fh.read(), inst)
        adversary = ScriptedAdversary(stream)
        T = min(T, len(stream))
    else:
        pairs = {(x, s): 1 for x in range(inst.n_instances) for s in range(inst.n_sets)}
        adversary = IIDAdversary(inst, pairs, rng=rng)
    strict = getattr(adversary, "realizable", False) or adv_kind == "scripted"
    learner = make_learner(
        args.learner, inst, epsilon=args.epsilon, scales=args.scales, horizon=T,
        label=args.label, mode=args.mode, rng=rng, engine=eng, strict=strict,
    )
    return learner, adversary, T, rng


def cmd_play(args) -> int:
    inst = _instance(args)
    eng = DimensionEngine(inst)
    seed = args.seed if args.seed is not None else _default_seed()
    learner, adversary, T, rng = _build_game(args, inst, eng, seed)
    game = run_game(inst, learner, adversary, T, mode=args.mode, rng=rng, engine=eng)
    _write(args, csv_text(game))
    return 0


def cmd_bench(args) -> int:
    inst = _instance(args)
    eng = DimensionEngine(inst)
    seed = args.seed if args.seed is not None else _default_seed()

    def play(s):
        learner, adversary, T, rng = _build_game(args, inst, eng, s)
        return run_game(inst, learner, adversary, T, mode=args.mode, rng=rng, engine=eng)

    summ = monte_carlo(play, args.trials, seed)
    out = {"trials": summ.n, "mean_regret": summ.mean, "se": summ.se, "seed_base": summ.seed_base,
           "learner": args.learner, "adversary": args.adversary, "mode": args.mode}
    _write(args, json.dumps(out, indent=1) + "\n")
    return 0


def cmd_verify(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    name = args.suite
    kwargs = {}
    if name in ("structural", "bounds", "potential", "minimax", "khinchine"):
        kwargs["seed"] = seed
    if name == "khinchine" and args.trials:
        kwargs["trials"] = args.trials
    if name == "minimax" and args.max_size not in (None, "tiny"):
        raise UsageError("--max-size only supports 'tiny'")
    report = SUITES[name](**kwargs)
    for c in report.checks:
        print(c.line())
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(report.to_dict(), fh, indent=1)
    return 0 if report.passed else 1


# -- parser ------------------------------------------------------------------

def _add_source(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--instance", help="instance document (JSON)")
    g.add_argument("--preset", help="built-in instance, e.g. example3, cosingleton:3, hamming:3:1")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="setfeedback", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="emit an instance document")
    g.add_argument("kind", choices=["example3", "ranking", "interval", "hamming", "singleton", "cosingleton", "cofinite"])
    g.add_argument("--K", type=int, default=3)
    g.add_argument("--q", type=int, default=1)
    g.add_argument("--G", type=int, default=4)
    g.add_argument("--m", type=int, default=2)
    g.add_argument("--M", type=int, default=3)
    g.add_argument("--k", type=int, default=1)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    d = sub.add_parser("dims", help="print dimensions and the Helly number")
    _add_source(d)
    d.add_argument("--gamma", type=_rational, action="append", help="MS scale a/b (repeatable)")
    d.add_argument("--p", type=int, action="append", help="p for SL_p (repeatable)")
    d.add_argument("--helly", action="store_true", help="only the Helly number")
    d.add_argument("--witness", choices=["sl", "psl"], help="attach a validated witness tree")
    d.add_argument("--witness-p", type=int, default=2)
    d.add_argument("--out")
    d.set_defaults(func=cmd_dims)

    for name, func, help_ in (("play", cmd_play, "one game, CSV transcript"),
                              ("bench", cmd_bench, "Monte-Carlo regret summary")):
        p = sub.add_parser(name, help=help_)
        _add_source(p)
        p.add_argument("--learner", choices=LEARNERS, required=True)
        p.add_argument("--adversary", choices=ADVERSARIES, required=True)
        p.add_argument("--epsilon", type=_rational)
        p.add_argument("--scales", type=int, default=2)
        p.add_argument("--gamma", type=_rational, help="scale for the MS adversary")
        p.add_argument("--label", type=int, default=0, help="label for the constant learner")
        p.add_argument("--block", type=int, default=25, help="Khinchine block length (odd)")
        p.add_argument("--stream", help="stream document for the scripted adversary")
        p.add_argument("--rounds", type=int, default=10)
        p.add_argument("--mode", choices=["exact", "sample"], default="exact")
        p.add_argument("--seed", type=int, help="default: $SFL_SEED or 0")
        p.add_argument("--out")
        if name == "bench":
            p.add_argument("--trials", type=int, default=100)
        p.set_defaults(func=func)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=sorted(SUITES))
    v.add_argument("--seed", type=int, help="default: $SFL_SEED or 0")
    v.add_argument("--trials", type=int)
    v.add_argument("--max-size", choices=["tiny"])
    v.add_argument("--out", help="write the JSON report here")
    v.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, InstanceError, ConfigurationError, NotRealizableError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
