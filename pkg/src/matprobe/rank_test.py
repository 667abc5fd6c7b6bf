"""Non-adaptive rank testing under entry sampling and matrix sensing.

The sampling tester draws nested row blocks R_1 c ... c R_m and column blocks
C_1 > ... > C_m, reads their union of blocks, and decides by the minimum rank
over all completions of the observed staircase pattern. The completion solver
processes columns with the longest observed prefix first, growing a basis of
completed columns; its result is exact for staircase masks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import MaskNotStaircase, NotFullRankBase, OutOfRange
from .fields import DenseMatrix, PrimeField
from .linalg import rank_exact
from .oracles import EntryOracle, SensingOracle

# max of x * log2(1/x) on the increasing branch (attained at x = 1/e)
ETA_EPS_MAX = math.log2(math.e) / math.e
IN_SPAN_RTOL = 1e-8


@dataclass(frozen=True)
class RankTestConfig:
    d: int
    eps: float
    c_pattern: float = 4.0
    repeats: int = 1

    def __post_init__(self):
        if self.d < 1:
            raise OutOfRange("target rank d must be >= 1")
        if not (0.0 < self.eps <= ETA_EPS_MAX):
            raise OutOfRange(f"eps must lie in (0, {ETA_EPS_MAX:.4f}]")
        if self.c_pattern <= 0:
            raise OutOfRange("c_pattern must be positive")
        if self.repeats < 1:
            raise OutOfRange("repeats must be >= 1")


@dataclass(frozen=True)
class Verdict:
    decision: str  # "H0" | "H1"
    statistic: float
    queries_used: int
    seed: int | None = None
    stage: int | None = None
    aux: dict = field(default_factory=dict)


def solve_eta(eps: float) -> float:
    """The eta in (0, 1/2) with eta * log2(1/eta) = eps, to 1e-12.

    Bisection on the increasing branch (0, 1/e].
    """
    if not (0.0 < eps <= ETA_EPS_MAX):
        raise OutOfRange(f"eps must lie in (0, {ETA_EPS_MAX:.4f}]")

    def f(x):
        return x * math.log2(1.0 / x)

    lo, hi = 1e-300, 1.0 / math.e
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if abs(f(mid) - eps) <= 1e-13:
            return mid
        if f(mid) < eps:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass
class SamplingPattern:
    """Nested block pattern; rows and cols are ordered by entry level.

    rows[k] entered at level row_level[k] (1-based, non-decreasing); a column
    at level j observes exactly the rows of levels <= j, which form a prefix
    of the row ordering. Columns are ordered deepest level first, so observed
    prefixes are non-increasing left to right (the staircase).
    """

    n: int
    m: int
    eta: float
    rows: np.ndarray
    row_level: np.ndarray
    cols: np.ndarray
    col_level: np.ndarray
    row_sizes: list[int]
    col_sizes: list[int]

    def R(self, i: int) -> np.ndarray:
        return self.rows[: self.row_sizes[i - 1]]

    def C(self, i: int) -> np.ndarray:
        return self.cols[: self.col_sizes[i - 1]]

    def mask(self) -> np.ndarray:
        """Local observation mask over rows x cols."""
        return self.row_level[:, None] <= self.col_level[None, :]

    def q_size(self) -> int:
        return int(np.sum(self.mask()))


def build_pattern(n: int, cfg: RankTestConfig, rng) -> SamplingPattern:
    """Draw the nested sampling pattern for an n x n matrix."""
    if n < 1:
        raise OutOfRange("n must be >= 1")
    eta = solve_eta(cfg.eps)
    L = math.log2(1.0 / eta)
    m = math.ceil(L)
    # +1 inside the bracket keeps the size positive at d = 1
    K = math.log2(cfg.d) + math.log2(L) + 1.0
    base = cfg.c_pattern * K * cfg.d * L
    row_sizes = [min(n, math.ceil(base * 2**i)) for i in range(1, m + 1)]
    col_sizes = [min(n, math.ceil(base / (2**i * eta))) for i in range(1, m + 1)]
    # formula guarantees monotonicity; ceil + cap preserves it
    rowperm = rng.permutation(n)
    colperm = rng.permutation(n)
    rows = rowperm[: row_sizes[-1]].astype(np.int64)
    cols = colperm[: col_sizes[0]].astype(np.int64)
    rs = np.asarray(row_sizes)
    row_level = (np.searchsorted(rs, np.arange(rows.size), side="right") + 1).astype(np.int64)
    cs_rev = np.asarray(col_sizes[::-1])
    col_level = (m - np.searchsorted(cs_rev, np.arange(cols.size), side="right")).astype(np.int64)
    return SamplingPattern(n=n, m=m, eta=eta, rows=rows, row_level=row_level,
                           cols=cols, col_level=col_level,
                           row_sizes=row_sizes, col_sizes=col_sizes)


@dataclass
class PartialMatrix:
    """Observed values on a local grid; unobserved cells hold 0 placeholders."""

    values: np.ndarray
    mask: np.ndarray
    field: PrimeField | None = None

    def __post_init__(self):
        if self.values.shape != self.mask.shape:
            raise ValueError("values and mask shapes differ")

    @property
    def n_rows(self):
        return self.values.shape[0]

    @property
    def n_cols(self):
        return self.values.shape[1]


def _column_prefixes(mask: np.ndarray) -> np.ndarray:
    """Per-column observed prefix lengths; raises if any column is no prefix."""
    k = mask.sum(axis=0)
    nr = mask.shape[0]
    idx = np.arange(nr)[:, None]
    if not np.array_equal(mask, idx < k[None, :]):
        raise MaskNotStaircase("each column's observed rows must form a prefix")
    return k.astype(np.int64)


def min_completion_rank(P: PartialMatrix, check_invariants: bool = False,
                        return_completion: bool = False):
    """Minimum rank over all completions of a staircase partial matrix.

    Processes columns with the longest observed prefix first; a column whose
    observed prefix lies in the span of the basis (restricted to that prefix)
    is completed with the basis combination, otherwise its unobserved tail is
    filled with ones and it joins the basis.
    """
    prefixes = _column_prefixes(P.mask)
    nr, nc = P.values.shape
    if nr == 0 or nc == 0:
        return (0, P.values.copy()) if return_completion else 0
    is_field = P.field is not None
    p = P.field.p if is_field else None
    if bool(P.mask.all()) and not check_invariants and not return_completion:
        # fully observed: no completion freedom
        if is_field:
            return int(_kernels.gf_rank(P.values.astype(np.int64).copy(), p))
        return rank_exact(DenseMatrix(P.values))
    order = np.argsort(-prefixes, kind="stable")
    if is_field:
        S = np.zeros((nr, 0), dtype=np.int64)
        completed = P.values.astype(np.int64).copy() % p
    else:
        S = np.zeros((nr, 0), dtype=np.float64)
        completed = P.values.astype(np.float64).copy()
    r = 0
    for j in order:
        k = int(prefixes[j])
        b = completed[:k, j]
        ok, x = _in_span(S[:k], b, p)
        if ok:
            completed[k:, j] = _combine(S[k:], x, p)
        else:
            completed[k:, j] = 1
            S = np.concatenate([S, completed[:, j].reshape(-1, 1)], axis=1)
            r += 1
        if check_invariants:
            assert r == S.shape[1]
            ok2, _ = _in_span(S[:k], completed[:k, j], p)
            assert ok2, "processed column prefix must lie in the basis span"
    if return_completion:
        return r, completed
    return r


def _combine(S: np.ndarray, x: np.ndarray, p: int | None) -> np.ndarray:
    if p is None:
        return S @ x
    # accumulate mod p per term so int64 intermediates cannot overflow
    out = np.zeros(S.shape[0], dtype=np.int64)
    for idx in range(S.shape[1]):
        out = (out + S[:, idx] * x[idx]) % p
    return out


def _in_span(S: np.ndarray, b: np.ndarray, p: int | None):
    """Is b in the column space of S? Returns (flag, coefficients)."""
    k, r = S.shape
    if k == 0 or not np.any(b):
        return True, np.zeros(r, dtype=S.dtype)
    if r == 0:
        return False, np.zeros(0, dtype=S.dtype)
    if p is not None:
        ok, x = _kernels.gf_solve(np.ascontiguousarray(S), np.ascontiguousarray(b), p)
        return bool(ok), x
    x, *_ = np.linalg.lstsq(S, b, rcond=None)
    resid = np.linalg.norm(S @ x - b)
    return bool(resid <= IN_SPAN_RTOL * np.linalg.norm(b)), x


def partial_from_oracle(oracle: EntryOracle, pattern: SamplingPattern) -> PartialMatrix:
    """Read the pattern's cells and assemble the local partial matrix."""
    mask = pattern.mask()
    li, lj = np.nonzero(mask)
    vals = oracle.read_at(pattern.rows[li], pattern.cols[lj])
    if oracle.field is not None:
        values = np.zeros(mask.shape, dtype=np.int64)
    else:
        values = np.zeros(mask.shape, dtype=np.float64)
    values[li, lj] = vals
    return PartialMatrix(values=values, mask=mask, field=oracle.field)


def test_rank(oracle: EntryOracle, cfg: RankTestConfig, rng,
              seed: int | None = None) -> Verdict:
    """One-sided tester: H1 iff the min completion rank exceeds cfg.d."""
    n, m = oracle.shape
    if n != m:
        raise ValueError("rank tester expects a square hidden matrix")
    if n < 2 * cfg.d:
        # degenerate regime: read everything
        ii, jj = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        oracle.seal(np.stack([ii.ravel(), jj.ravel()], axis=1))
        vals = oracle.read_at(ii.ravel(), jj.ravel()).reshape(n, n)
        r = rank_exact(DenseMatrix(vals, field=oracle.field))
        return Verdict(decision="H1" if r > cfg.d else "H0", statistic=float(r),
                       queries_used=oracle.queries_used, seed=seed)
    patterns = [build_pattern(n, cfg, rng) for _ in range(cfg.repeats)]
    parts = []
    for pat in patterns:
        mask = pat.mask()
        li, lj = np.nonzero(mask)
        parts.append(np.stack([pat.rows[li], pat.cols[lj]], axis=1))
    oracle.seal(np.concatenate(parts, axis=0))
    r_max = 0
    for pat in patterns:
        P = partial_from_oracle(oracle, pat)
        r = min_completion_rank(P)
        r_max = max(r_max, r)
        if r > cfg.d:
            break
    return Verdict(decision="H1" if r_max > cfg.d else "H0", statistic=float(r_max),
                   queries_used=oracle.queries_used, seed=seed,
                   aux={"eta": patterns[0].eta, "levels": patterns[0].m})


def test_rank_sensing(oracle: SensingOracle, d: int, rng,
                      seed: int | None = None) -> Verdict:
    """Sensing-model tester: rank(S A T) for random (d+1)-dim sketch factors.

    Uses exactly (d+1)^2 probes; H1 iff the sketch has full rank d+1.
    """
    n, m = oracle.shape
    k = d + 1
    if oracle.field is not None:
        p = oracle.field.p
        S = rng.integers(0, p, size=(k, n), dtype=np.int64)
        T = rng.integers(0, p, size=(m, k), dtype=np.int64)
        B = np.empty((k, k), dtype=np.int64)
        for i in range(k):
            for j in range(k):
                B[i, j] = oracle.sense(np.outer(S[i], T[:, j]))
        r = int(_kernels.gf_rank(B.copy(), p))
    else:
        S = rng.standard_normal((k, n))
        T = rng.standard_normal((m, k))
        B = np.empty((k, k))
        for i in range(k):
            for j in range(k):
                B[i, j] = oracle.sense(np.outer(S[i], T[:, j]))
        r = rank_exact(DenseMatrix(B))
    return Verdict(decision="H1" if r == k else "H0", statistic=float(r),
                   queries_used=oracle.queries_used, seed=seed)


def _submatrix(M: DenseMatrix, rows, cols) -> DenseMatrix:
    sub = M.data[np.ix_(rows, cols)] if len(rows) and len(cols) else \
        np.zeros((len(rows), len(cols)), dtype=M.data.dtype)
    return DenseMatrix(sub, field=M.field)


def augment_set(M: DenseMatrix, R, C) -> set:
    """All pairs (r, c) whose addition strictly increases the base rank."""
    R = sorted(int(i) for i in R)
    C = sorted(int(j) for j in C)
    t = len(R)
    if len(C) != t:
        raise NotFullRankBase("base must be square")
    if t > 0 and rank_exact(_submatrix(M, R, C)) != t:
        raise NotFullRankBase("base submatrix must have full rank")
    n, m = M.shape
    rest_rows = [i for i in range(n) if i not in set(R)]
    rest_cols = [j for j in range(m) if j not in set(C)]
    out = set()
    for r in rest_rows:
        for c in rest_cols:
            if rank_exact(_submatrix(M, R + [r], C + [c])) > t:
                out.add((r, c))
    return out


def has_augment_pattern(M: DenseMatrix, R, C, i: int, eta: float) -> bool:
    """Level-i augment pattern: the (n/2^i)-th largest per-row augment count
    must reach 2^{i-1} * eta * n."""
    n = M.n_rows
    aug = augment_set(M, R, C)
    counts = np.zeros(n, dtype=np.int64)
    for (r, _c) in aug:
        counts[r] += 1
    counts = np.sort(counts)[::-1]
    idx = math.ceil(n / 2**i)
    if idx > n:
        return False
    return bool(counts[idx - 1] >= 2 ** (i - 1) * eta * n)
