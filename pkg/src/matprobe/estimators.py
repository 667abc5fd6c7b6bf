"""Norm estimators: Frobenius sampling, submatrix screen, two-stage
row/column-norm sampling, cycle products, and the bilinear sensing sketch.

Each sampling estimator splits into a plan (all randomness that does not
depend on matrix values, drawn up front) and an execution phase. Standalone
calls seal the planned positions before reading; composite testers seal the
union of their stage plans themselves.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from ._kernels import cycle_mean
from .errors import EmptyPool, InsufficientSketch
from .oracles import EntryOracle, SensingOracle

_MAX_ENUM_CYCLES = 200_000


@dataclass(frozen=True)
class EstimatorReport:
    estimate: float
    queries_used: int
    nominal_samples: int
    aux: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SamplerParams:
    tau: float = 0.1
    d_hint: float = 1.0
    q0: int | None = None
    q: int | None = None
    q_row: int | None = None
    q_col: int | None = None
    pool_rate_const: float = 2.0
    entry_const: float = 2.0
    N_cycles: int = 1000
    q_cycle: int = 2
    k_sketch: int = 8

    def __post_init__(self):
        if not (0.0 < self.tau < 0.5):
            raise ValueError("tau must lie in (0, 1/2)")

    def resample_count(self, n: int) -> int:
        if self.q_row is not None:
            return self.q_row
        return math.ceil(4.0 * self.d_hint * math.log(n) / self.tau**2)


def _maybe_seal(oracle: EntryOracle, ii: np.ndarray, jj: np.ndarray) -> None:
    if not oracle.is_sealed and oracle.queries_used == 0:
        oracle.seal_arrays(ii, jj)


# ---------------------------------------------------------------- Frobenius

@dataclass
class FrobeniusPlan:
    ii: np.ndarray
    jj: np.ndarray


def plan_frobenius(shape, q0: int, rng) -> FrobeniusPlan:
    n, m = shape
    return FrobeniusPlan(ii=rng.integers(0, n, size=q0),
                         jj=rng.integers(0, m, size=q0))


def exec_frobenius(oracle: EntryOracle, plan: FrobeniusPlan) -> EstimatorReport:
    before = oracle.queries_used
    y = oracle.read_at(plan.ii, plan.jj)
    n, m = oracle.shape
    q0 = plan.ii.size
    X = float(n * m / q0 * np.sum(y**2))
    return EstimatorReport(estimate=X, queries_used=oracle.queries_used - before,
                           nominal_samples=q0)


def estimate_frobenius(oracle: EntryOracle, q0: int, rng) -> EstimatorReport:
    """Unbiased ||A||_F^2 estimate from q0 uniform entries (with replacement)."""
    plan = plan_frobenius(oracle.shape, q0, rng)
    _maybe_seal(oracle, plan.ii, plan.jj)
    return exec_frobenius(oracle, plan)


# ------------------------------------------------------------------- screen

@dataclass
class ScreenPlan:
    rows: np.ndarray
    cols: np.ndarray

    def positions(self):
        ii, jj = np.meshgrid(self.rows, self.cols, indexing="ij")
        return ii.ravel(), jj.ravel()


def plan_screen(shape, q: int, rng) -> ScreenPlan:
    n, m = shape
    q = min(q, n, m)
    return ScreenPlan(rows=np.sort(rng.choice(n, size=q, replace=False)),
                      cols=np.sort(rng.choice(m, size=q, replace=False)))


def exec_screen(oracle: EntryOracle, plan: ScreenPlan) -> EstimatorReport:
    before = oracle.queries_used
    ii, jj = plan.positions()
    block = oracle.read_at(ii, jj).reshape(plan.rows.size, plan.cols.size)
    est = float(np.linalg.svd(block, compute_uv=False)[0]) if block.size else 0.0
    return EstimatorReport(estimate=est, queries_used=oracle.queries_used - before,
                           nominal_samples=plan.rows.size * plan.cols.size)


def opnorm_screen(oracle: EntryOracle, q: int, rng) -> EstimatorReport:
    """sigma_1 of a uniform q x q submatrix, unscaled."""
    plan = plan_screen(oracle.shape, q, rng)
    ii, jj = plan.positions()
    _maybe_seal(oracle, ii, jj)
    return exec_screen(oracle, plan)


# ------------------------------------------- two-stage row/column sampling

@dataclass
class SamplingPlan:
    pool_rows: np.ndarray
    pool_cols: np.ndarray
    probe_cols: np.ndarray  # (|pool_rows|, s) column indices for row norms
    s: int

    def positions(self):
        """Sealed superset: row-norm probes plus the full pool block."""
        pi = np.repeat(self.pool_rows, self.s)
        pj = self.probe_cols.ravel()
        gi, gj = np.meshgrid(self.pool_rows, self.pool_cols, indexing="ij")
        return (np.concatenate([pi, gi.ravel()]),
                np.concatenate([pj, gj.ravel()]))


def plan_opnorm_sampling(shape, params: SamplerParams, rng) -> SamplingPlan:
    n, m = shape
    rate_r = min(1.0, params.pool_rate_const / (n * params.tau))
    rate_c = min(1.0, params.pool_rate_const / (m * params.tau))
    pool_rows = np.nonzero(rng.random(n) < rate_r)[0]
    pool_cols = np.nonzero(rng.random(m) < rate_c)[0]
    if pool_rows.size == 0 or pool_cols.size == 0:
        raise EmptyPool("Bernoulli index pool came up empty; retry with a new seed")
    s = math.ceil(params.entry_const / params.tau)
    probe_cols = rng.integers(0, m, size=(pool_rows.size, s))
    return SamplingPlan(pool_rows=pool_rows, pool_cols=pool_cols,
                        probe_cols=probe_cols, s=s)


def exec_opnorm_sampling(oracle: EntryOracle, plan: SamplingPlan,
                         params: SamplerParams, rng) -> EstimatorReport:
    """Two-stage importance sampling for sigma_1 (row stage then column stage).

    Resample draws are folded into multiplicity counts: a pooled row drawn k
    times with inclusion scale w appears once with weight sqrt(k) * w, which
    leaves sigma_1 of the resampled matrix unchanged.
    """
    before = oracle.queries_used
    n, m = oracle.shape
    tau = params.tau
    q = plan.pool_rows.size
    qc = plan.pool_cols.size
    q_row = params.resample_count(n)
    q_col = params.q_col if params.q_col is not None else params.resample_count(m)

    # row stage: estimate row norms from s entries each
    x = oracle.read_at(np.repeat(plan.pool_rows, plan.s),
                       plan.probe_cols.ravel()).reshape(q, plan.s)
    r_i = np.maximum(tau * n * np.sum(x**2, axis=1), tau * n)
    p_i = r_i / np.sum(r_i)
    counts_r = rng.multinomial(q_row, p_i)
    beta_r = q / n
    scale_r = 1.0 / np.sqrt(q_row * beta_r * p_i)  # inverse inclusion scale
    keep_r = counts_r > 0
    rows = plan.pool_rows[keep_r]
    row_w = np.sqrt(counts_r[keep_r]) * scale_r[keep_r]

    # column stage on the weighted sampled rows
    draw = rng.choice(np.nonzero(keep_r)[0], size=(qc, plan.s),
                      p=counts_r[keep_r] / q_row)
    xc = oracle.read_at(plan.pool_rows[draw].ravel(),
                        np.repeat(plan.pool_cols, plan.s)).reshape(qc, plan.s)
    xc = xc * scale_r[draw]
    r_j = np.maximum(tau * q * np.sum(xc**2, axis=1), tau * q)
    p_j = r_j / np.sum(r_j)
    counts_c = rng.multinomial(q_col, p_j)
    beta_c = qc / m
    scale_c = 1.0 / np.sqrt(q_col * beta_c * p_j)
    keep_c = counts_c > 0
    cols = plan.pool_cols[keep_c]
    col_w = np.sqrt(counts_c[keep_c]) * scale_c[keep_c]

    gi, gj = np.meshgrid(rows, cols, indexing="ij")
    block = oracle.read_at(gi.ravel(), gj.ravel()).reshape(rows.size, cols.size)
    B = block * row_w[:, None] * col_w[None, :]
    est = float(np.linalg.svd(B, compute_uv=False)[0]) if B.size else 0.0
    nominal = q * plan.s + qc * plan.s + q_row * q_col
    return EstimatorReport(
        estimate=est,
        queries_used=oracle.queries_used - before,
        nominal_samples=nominal,
        aux={"rescaled": B, "rows": rows, "cols": cols,
             "row_mass": float(np.sum(r_i)), "col_mass": float(np.sum(r_j)),
             "pool_rows": q, "pool_cols": qc,
             "q_row": q_row, "q_col": q_col},
    )


def estimate_opnorm_sampling(oracle: EntryOracle, params: SamplerParams,
                             rng) -> EstimatorReport:
    """Operator-norm estimate by non-uniform row/column sampling."""
    plan = plan_opnorm_sampling(oracle.shape, params, rng)
    ii, jj = plan.positions()
    _maybe_seal(oracle, ii, jj)
    return exec_opnorm_sampling(oracle, plan, params, rng)


# ------------------------------------------------------------------- cycles

@dataclass
class CyclePlan:
    I: np.ndarray  # (N, q) row indices
    J: np.ndarray  # (N, q) column indices

    def positions(self):
        I2 = np.roll(self.I, -1, axis=1)
        return (np.concatenate([self.I.ravel(), I2.ravel()]),
                np.concatenate([self.J.ravel(), self.J.ravel()]))


def plan_cycles(shape, q_cycle: int, N: int, rng) -> CyclePlan:
    n, m = shape
    return CyclePlan(I=rng.integers(0, n, size=(N, q_cycle)),
                     J=rng.integers(0, m, size=(N, q_cycle)))


def exec_cycles(oracle: EntryOracle, plan: CyclePlan) -> EstimatorReport:
    before = oracle.queries_used
    N, q = plan.I.shape
    v1 = oracle.read_at(plan.I.ravel(), plan.J.ravel()).reshape(N, q)
    v2 = oracle.read_at(np.roll(plan.I, -1, axis=1).ravel(),
                        plan.J.ravel()).reshape(N, q)
    Z = float(np.mean(np.prod(v1 * v2, axis=1)))
    n = oracle.shape[0]
    est = max(Z, 0.0) ** (1.0 / (2 * q)) * n
    return EstimatorReport(estimate=float(est),
                           queries_used=oracle.queries_used - before,
                           nominal_samples=2 * q * N, aux={"Z_raw": Z})


def estimate_opnorm_cycles(oracle: EntryOracle, q_cycle: int, N: int,
                           rng) -> EstimatorReport:
    """Z = mean cycle product over N uniform cycles; returns Z^{1/2q} * n."""
    plan = plan_cycles(oracle.shape, q_cycle, N, rng)
    ii, jj = plan.positions()
    _maybe_seal(oracle, ii, jj)
    return exec_cycles(oracle, plan)


# ------------------------------------------------------------------ sensing

def _distinct_cycles(k: int, q: int, N: int, rng):
    """Index tuples with pairwise-distinct entries: exhaustive when small,
    sampled otherwise."""
    n_perm = math.perm(k, q)
    if n_perm * n_perm <= _MAX_ENUM_CYCLES:
        perms = np.array(list(itertools.permutations(range(k), q)), dtype=np.int64)
        pi = np.repeat(np.arange(n_perm), n_perm)
        pj = np.tile(np.arange(n_perm), n_perm)
        return perms[pi], perms[pj]
    I = np.empty((N, q), dtype=np.int64)
    J = np.empty((N, q), dtype=np.int64)
    for t in range(N):
        I[t] = rng.permutation(k)[:q]
        J[t] = rng.permutation(k)[:q]
    return I, J


def estimate_opnorm_sensing(oracle: SensingOracle, params: SamplerParams, rng,
                            G: np.ndarray | None = None,
                            H: np.ndarray | None = None) -> EstimatorReport:
    """Bilinear sketch estimator: Y = mean cycle product over the k x k
    sketch G A H^T (k^2 sensing probes); returns Y^{1/(2 q_cycle)}.

    G, H may be injected (e.g. identity selectors reduce this to the
    sampling cycle estimator on a submatrix).
    """
    k = params.k_sketch
    q = params.q_cycle
    if k < q:
        raise InsufficientSketch(f"k_sketch {k} < q_cycle {q}")
    n, m = oracle.shape
    if G is None:
        G = rng.standard_normal((k, n))
    if H is None:
        H = rng.standard_normal((k, m))
    before = oracle.queries_used
    M = np.ascontiguousarray(oracle.sketch(G, H), dtype=np.float64)
    I, J = _distinct_cycles(k, q, params.N_cycles, rng)
    Y = float(cycle_mean(M, I, J))
    est = max(Y, 0.0) ** (1.0 / (2 * q))
    return EstimatorReport(estimate=float(est),
                           queries_used=oracle.queries_used - before,
                           nominal_samples=k * k,
                           aux={"Y_raw": Y, "cycles": I.shape[0]})
