"""Command-line interface: gen | rank-test | stable-rank-test | schatten-test
| opnorm | experiment. Exit code 0 on success, 2 on usage errors."""
from __future__ import annotations

import argparse
import sys

import numpy as np

from .errors import MatprobeError
from .estimators import (
    SamplerParams,
    estimate_opnorm_cycles,
    estimate_opnorm_sampling,
    estimate_opnorm_sensing,
    opnorm_screen,
)
from .fields import DenseMatrix
from .harness import (
    OVERRIDE_REGISTRY,
    TESTERS,
    ExperimentConfig,
    run_experiment,
    substream,
    write_csv,
)
from .instances import FAMILIES, InstanceSpec, materialize
from .matio import load_matrix, save_matrix
from .oracles import EntryOracle, SensingOracle
from .rank_test import RankTestConfig, test_rank, test_rank_sensing
from .spectral_tests import SchattenConfig, StableRankConfig, test_schatten, test_stable_rank


def _parse_set(pairs, path=None):
    out = {}
    lines = []
    if path:
        with open(path) as fh:
            lines = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
    for item in lines + list(pairs or []):  # CLI pairs win over file entries
        if "=" not in item:
            raise ValueError(f"override {item!r} is not name=value")
        k, v = item.split("=", 1)
        if k not in OVERRIDE_REGISTRY:
            raise ValueError(f"unknown override {k!r}; registry: {OVERRIDE_REGISTRY}")
        try:
            out[k] = int(v)
        except ValueError:
            out[k] = float(v)
    return out


def _rng(seed):
    return substream(seed, 1)


def cmd_gen(args):
    spec = InstanceSpec(family=args.family, n=args.n, d=args.d, eps=args.eps,
                        p=args.p, eta=args.eta, trunc_C=args.trunc_C)
    inst = materialize(spec, substream(args.seed, 0))
    if isinstance(inst, DenseMatrix):
        save_matrix(args.out, inst, seed=args.seed, family=args.family)
        print(f"wrote {args.out}")
        return 0
    if not args.out2:
        raise ValueError(f"family {args.family!r} generates a pair; pass --out2")
    save_matrix(args.out, inst[0], seed=args.seed, family=args.family)
    save_matrix(args.out2, inst[1], seed=args.seed, family=args.family)
    print(f"wrote {args.out} and {args.out2}")
    return 0


def cmd_rank_test(args):
    M = load_matrix(getattr(args, "in"))
    if args.sensing:
        v = test_rank_sensing(SensingOracle(M), args.d, _rng(args.seed))
    else:
        cfg = RankTestConfig(d=args.d, eps=args.eps, c_pattern=args.c_pattern,
                             repeats=args.repeats)
        v = test_rank(EntryOracle(M), cfg, _rng(args.seed))
    print(v.decision)
    print(f"statistic={v.statistic} queries={v.queries_used}")
    return 0


def cmd_stable_rank_test(args):
    M = load_matrix(getattr(args, "in"))
    ov = _parse_set(args.set)
    cfg = StableRankConfig(
        d=args.d, eps=args.eps,
        C0=float(ov.get("C0", 0.5)), c1=float(ov.get("c1", 100.0)),
        k0=float(ov.get("k0", 20.0)), k1=float(ov.get("k1", 8.0)),
        d_hint=ov.get("d_hint"), tau_override=ov.get("tau"))
    v = test_stable_rank(EntryOracle(M), cfg, _rng(args.seed))
    print(v.decision)
    print(f"statistic={v.statistic} queries={v.queries_used} stage={v.stage}")
    return 0


def cmd_schatten_test(args):
    M = load_matrix(getattr(args, "in"))
    ov = _parse_set(args.set)
    cfg = SchattenConfig(
        p=args.p, c_threshold=args.c, eps=args.eps,
        C0=float(ov.get("C0", 0.5)), c1=float(ov.get("c1", 100.0)),
        k0=float(ov.get("k0", 20.0)), k1=float(ov.get("k1", 8.0)),
        d_hint=float(ov.get("d_hint", 30.0)), tau_override=ov.get("tau"))
    v = test_schatten(EntryOracle(M), cfg, _rng(args.seed))
    print(v.decision)
    print(f"statistic={v.statistic} queries={v.queries_used} stage={v.stage}")
    return 0


def cmd_opnorm(args):
    M = load_matrix(getattr(args, "in"))
    rng = _rng(args.seed)
    if args.method == "screen":
        rep = opnorm_screen(EntryOracle(M), args.q, rng)
    elif args.method == "sampling":
        params = SamplerParams(tau=args.tau, d_hint=args.d_hint)
        rep = estimate_opnorm_sampling(EntryOracle(M), params, rng)
    elif args.method == "cycles":
        rep = estimate_opnorm_cycles(EntryOracle(M), args.q, args.N, rng)
    else:
        params = SamplerParams(tau=args.tau, d_hint=args.d_hint,
                               q_cycle=args.q, N_cycles=args.N, k_sketch=args.k)
        rep = estimate_opnorm_sensing(SensingOracle(M), params, rng)
    print(f"estimate={rep.estimate} queries={rep.queries_used}")
    return 0


def cmd_experiment(args):
    spec = InstanceSpec(family=args.family, n=args.n, d=args.d, eps=args.eps,
                        p=args.p, eta=args.eta, trunc_C=args.trunc_C)
    cfg = ExperimentConfig(
        tester=args.tester, instance=spec, trials=args.trials, seed=args.seed,
        overrides=_parse_set(args.set, args.config), output=args.out,
        workers=args.workers)
    records, summary = run_experiment(cfg)
    if not args.out:
        write_csv("/dev/stdout", records)
    for k, v in summary.items():
        print(f"{k}={v}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="matprobe",
                                 description="sublinear-query matrix testers")
    sub = ap.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", help="generate an instance matrix file")
    g.add_argument("--family", required=True, choices=FAMILIES)
    g.add_argument("--n", type=int)
    g.add_argument("--d", type=int)
    g.add_argument("--eps", type=float)
    g.add_argument("--p", type=int)
    g.add_argument("--eta", type=float)
    g.add_argument("--trunc-C", dest="trunc_C", type=float)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.add_argument("--out2")
    g.set_defaults(fn=cmd_gen)

    r = sub.add_parser("rank-test", help="non-adaptive rank test")
    r.add_argument("--in", required=True)
    r.add_argument("--d", type=int, required=True)
    r.add_argument("--eps", type=float, default=0.1)
    r.add_argument("--c-pattern", dest="c_pattern", type=float, default=4.0)
    r.add_argument("--repeats", type=int, default=1)
    r.add_argument("--sensing", action="store_true")
    r.add_argument("--seed", type=int, default=0)
    r.set_defaults(fn=cmd_rank_test)

    s = sub.add_parser("stable-rank-test", help="stable-rank tester")
    s.add_argument("--in", required=True)
    s.add_argument("--d", type=float, required=True)
    s.add_argument("--eps", type=float, default=0.1)
    s.add_argument("--set", action="append", default=[])
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(fn=cmd_stable_rank_test)

    c = sub.add_parser("schatten-test", help="Schatten-p tester (p > 2)")
    c.add_argument("--in", required=True)
    c.add_argument("--p", type=float, required=True)
    c.add_argument("--c", type=float, default=0.5)
    c.add_argument("--eps", type=float, default=0.1)
    c.add_argument("--set", action="append", default=[])
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(fn=cmd_schatten_test)

    o = sub.add_parser("opnorm", help="operator-norm estimators")
    o.add_argument("--in", required=True)
    o.add_argument("--method", required=True,
                   choices=("screen", "sampling", "cycles", "sensing"))
    o.add_argument("--tau", type=float, default=0.2)
    o.add_argument("--d-hint", dest="d_hint", type=float, default=1.0)
    o.add_argument("--q", type=int, default=2)
    o.add_argument("--N", type=int, default=1000)
    o.add_argument("--k", type=int, default=8)
    o.add_argument("--seed", type=int, default=0)
    o.set_defaults(fn=cmd_opnorm)

    e = sub.add_parser("experiment", help="Monte Carlo trials with CSV output")
    e.add_argument("--tester", required=True, choices=TESTERS)
    e.add_argument("--family", required=True, choices=FAMILIES)
    e.add_argument("--n", type=int)
    e.add_argument("--d", type=int)
    e.add_argument("--eps", type=float)
    e.add_argument("--p", type=int)
    e.add_argument("--eta", type=float)
    e.add_argument("--trunc-C", dest="trunc_C", type=float)
    e.add_argument("--trials", type=int, required=True)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--out")
    e.add_argument("--set", action="append", default=[])
    e.add_argument("--config", help="plain key=value override file")
    e.add_argument("--workers", type=int)
    e.set_defaults(fn=cmd_experiment)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except (MatprobeError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
