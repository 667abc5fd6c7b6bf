"""Monte Carlo experiment orchestration with deterministic seeding.

Per-trial randomness comes from a counter-based Philox generator keyed by a
per-trial seed derived from (experiment seed, trial id), with separate
substreams for instance generation and the tester. Results are therefore
identical for any worker count.
"""
from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .fields import DenseMatrix
from .instances import InstanceSpec, materialize
from .oracles import EntryOracle, SensingOracle
from .rank_test import RankTestConfig, test_rank, test_rank_sensing
from .spectral_tests import SchattenConfig, StableRankConfig, test_schatten, test_stable_rank

WORKERS_ENV = "MATPROBE_WORKERS"

TESTERS = ("rank", "rank-sensing", "stable-rank", "schatten")

# override names accepted in ExperimentConfig.overrides / --set
OVERRIDE_REGISTRY = (
    "d", "eps", "c_pattern", "repeats",          # rank tester
    "C0", "c1", "k0", "k1", "tau", "d_hint",     # spectral testers
    "schatten_p", "c_threshold",                 # Schatten tester
    "pair_index",                                # which element of a pair family
)


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    seed: int
    verdict: str
    queries: int
    statistic: float
    stage: int
    wall_time_ms: float


@dataclass
class ExperimentConfig:
    tester: str
    instance: InstanceSpec
    trials: int
    seed: int = 0
    overrides: dict = field(default_factory=dict)
    output: str | None = None
    workers: int | None = None

    def __post_init__(self):
        if self.tester not in TESTERS:
            raise ValueError(f"unknown tester {self.tester!r}; known: {TESTERS}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        unknown = set(self.overrides) - set(OVERRIDE_REGISTRY)
        if unknown:
            raise ValueError(
                f"unknown overrides {sorted(unknown)}; registry: {OVERRIDE_REGISTRY}")


def trial_seed(seed: int, trial: int) -> int:
    """Stable 64-bit per-trial seed derived from (seed, trial id)."""
    return int(np.random.SeedSequence([seed, trial]).generate_state(1, np.uint64)[0])


def substream(ts: int, stream: int):
    """Counter-based generator keyed by (per-trial seed, stream id)."""
    return np.random.Generator(np.random.Philox(key=np.array([ts, stream], dtype=np.uint64)))


def _pick(inst, overrides):
    if isinstance(inst, DenseMatrix):
        return inst
    idx = int(overrides.get("pair_index", 0))
    return inst[idx]


def run_trial(tester: str, spec: InstanceSpec, overrides: dict,
              seed: int, trial: int) -> TrialRecord:
    ts = trial_seed(seed, trial)
    t0 = time.perf_counter()
    M = _pick(materialize(spec, substream(ts, 0)), overrides)
    rng = substream(ts, 1)
    ov = overrides
    if tester == "rank":
        cfg = RankTestConfig(
            d=int(ov.get("d", spec.d or 1)),
            eps=float(ov.get("eps", spec.eps or 0.1)),
            c_pattern=float(ov.get("c_pattern", 4.0)),
            repeats=int(ov.get("repeats", 1)))
        v = test_rank(EntryOracle(M), cfg, rng, seed=ts)
    elif tester == "rank-sensing":
        v = test_rank_sensing(SensingOracle(M), int(ov.get("d", spec.d or 1)),
                              rng, seed=ts)
    elif tester == "stable-rank":
        cfg = StableRankConfig(
            d=float(ov.get("d", spec.d or 2)),
            eps=float(ov.get("eps", spec.eps or 0.1)),
            C0=float(ov.get("C0", 0.5)), c1=float(ov.get("c1", 100.0)),
            k0=float(ov.get("k0", 20.0)), k1=float(ov.get("k1", 8.0)),
            d_hint=ov.get("d_hint"), tau_override=ov.get("tau"))
        v = test_stable_rank(EntryOracle(M), cfg, rng, seed=ts)
    else:
        cfg = SchattenConfig(
            p=float(ov.get("schatten_p", 4.0)),
            c_threshold=float(ov.get("c_threshold", 0.5)),
            eps=float(ov.get("eps", spec.eps or 0.1)),
            C0=float(ov.get("C0", 0.5)), c1=float(ov.get("c1", 100.0)),
            k0=float(ov.get("k0", 20.0)), k1=float(ov.get("k1", 8.0)),
            d_hint=float(ov.get("d_hint", 30.0)), tau_override=ov.get("tau"))
        v = test_schatten(EntryOracle(M), cfg, rng, seed=ts)
    ms = (time.perf_counter() - t0) * 1000.0
    return TrialRecord(trial=trial, seed=ts, verdict=v.decision,
                       queries=v.queries_used, statistic=float(v.statistic),
                       stage=v.stage or 0, wall_time_ms=ms)


def _run_trial_args(args):
    return run_trial(*args)


def wilson_interval(k: int, n: int, z: float = 1.96) -> tuple[float, float]:
    if n == 0:
        return 0.0, 1.0
    ph = k / n
    denom = 1.0 + z * z / n
    center = (ph + z * z / (2 * n)) / denom
    half = z * math.sqrt(ph * (1 - ph) / n + z * z / (4 * n * n)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def run_experiment(cfg: ExperimentConfig):
    """Run all trials; returns (records sorted by trial id, summary dict).

    The summary excludes wall time so that it is deterministic for a given
    config regardless of worker count; timing is available on the records.
    """
    workers = cfg.workers or int(os.environ.get(WORKERS_ENV, "1"))
    args = [(cfg.tester, cfg.instance, cfg.overrides, cfg.seed, t)
            for t in range(cfg.trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            records = list(ex.map(_run_trial_args, args, chunksize=1))
    else:
        records = [run_trial(*a) for a in args]
    records.sort(key=lambda r: r.trial)
    detections = sum(1 for r in records if r.verdict == "H1")
    lo, hi = wilson_interval(detections, len(records))
    summary = {
        "trials": len(records),
        "detections": detections,
        "detection_rate": detections / len(records),
        "wilson_low": lo,
        "wilson_high": hi,
        "mean_queries": sum(r.queries for r in records) / len(records),
        "max_queries": max(r.queries for r in records),
    }
    if cfg.output:
        write_csv(cfg.output, records)
    return records, summary


def write_csv(path, records, include_timing: bool = False) -> None:
    """CSV emission. The ms column is 0 unless include_timing is set, keeping
    the default artifact byte-identical across reruns and worker counts."""
    with open(path, "w") as fh:
        fh.write("trial,seed,verdict,queries,statistic,stage,ms\n")
        for r in records:
            ms = repr(round(r.wall_time_ms, 3)) if include_timing else "0"
            fh.write(f"{r.trial},{r.seed},{r.verdict},{r.queries},"
                     f"{repr(r.statistic)},{r.stage},{ms}\n")


def read_csv(path) -> list[TrialRecord]:
    out = []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "trial,seed,verdict,queries,statistic,stage,ms":
            raise ValueError(f"{path}: unexpected CSV header {header!r}")
        for line in fh:
            t, s, v, q, st, sg, ms = line.strip().split(",")
            out.append(TrialRecord(trial=int(t), seed=int(s), verdict=v,
                                   queries=int(q), statistic=float(st),
                                   stage=int(sg), wall_time_ms=float(ms)))
    return out
