"""Instance generators for the testers, plus the exact rigidity oracle
(distance to the nearest rank-r matrix) that certifies eps-farness at tiny n.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ._kernels import rigidity_search
from .errors import TooLarge
from .fields import DenseMatrix, PrimeField
from .linalg import stable_rank

_RIGIDITY_MAX_CANDIDATES = 2_000_000

FAMILIES = (
    "zero", "all-ones", "low-rank-field", "uniform-field", "signed-uniform",
    "rank-one-signed", "planted", "gaussian-pair", "stable-rank-pair",
    "schatten-pair", "orthogonal",
)


@dataclass(frozen=True)
class InstanceSpec:
    family: str
    n: int | None = None
    d: int | None = None
    eps: float | None = None
    p: int | None = None
    eta: float | None = None
    trunc_C: float | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; known: {FAMILIES}")


def gen_low_rank_field(n: int, d: int, F: PrimeField, rng) -> DenseMatrix:
    """U V^T with U, V uniform n x d over GF(p); rank <= d by construction."""
    if d > n:
        raise ValueError("d must be <= n")
    if d == 0:
        return DenseMatrix(np.zeros((n, n), dtype=np.int64), field=F)
    U = rng.integers(0, F.p, size=(n, d), dtype=np.int64)
    V = rng.integers(0, F.p, size=(n, d), dtype=np.int64)
    # accumulate mod p per rank-1 term to keep int64 intermediates safe
    A = np.zeros((n, n), dtype=np.int64)
    for k in range(d):
        A = (A + np.outer(U[:, k], V[:, k]) % F.p) % F.p
    return DenseMatrix(A, field=F)


def gen_uniform_field(n: int, F: PrimeField, rng) -> DenseMatrix:
    return DenseMatrix(rng.integers(0, F.p, size=(n, n), dtype=np.int64), field=F)


def gen_signed_uniform(n: int, rng) -> DenseMatrix:
    """Entries iid uniform on {-1, +1}."""
    return DenseMatrix(rng.choice([-1.0, 1.0], size=(n, n)), bounded=True)


def gen_rank_one_signed(n: int, rng) -> DenseMatrix:
    """u v^T with u, v iid sign vectors; sigma_1 = n."""
    u = rng.choice([-1.0, 1.0], size=n)
    v = rng.choice([-1.0, 1.0], size=n)
    return DenseMatrix(np.outer(u, v), bounded=True)


def gen_planted(inner: DenseMatrix, n: int, rng) -> DenseMatrix:
    """Place a t x t block at random row/column subsets, zeros elsewhere."""
    t = inner.n_rows
    if inner.n_cols != t or t > n:
        raise ValueError("inner block must be square with t <= n")
    rows = np.sort(rng.choice(n, size=t, replace=False))
    cols = np.sort(rng.choice(n, size=t, replace=False))
    if inner.field is not None:
        A = np.zeros((n, n), dtype=np.int64)
    else:
        A = np.zeros((n, n))
    A[np.ix_(rows, cols)] = inner.data
    return DenseMatrix(A, field=inner.field, bounded=inner.bounded)


def gen_gaussian_pair(n: int, d: int, rng) -> tuple[DenseMatrix, DenseMatrix]:
    """(U V^T, U V^T + n^{-14} G) with shared Gaussian factors."""
    U = rng.standard_normal((n, d))
    V = rng.standard_normal((n, d))
    G = rng.standard_normal((n, n))
    B = U @ V.T
    return DenseMatrix(B.copy()), DenseMatrix(B + n**-14.0 * G)


def gen_stable_rank_pair(d: int, eps: float, rng, C: float = 2.0):
    """Hard pair for stable-rank testing: (kappa G, kappa (G0 + s1 u v^T)).

    m x d with m = ceil(d/eps^2), s1 = 3 sqrt(eps/d), kappa = C / log2(d/eps);
    entries clamped to [-1, 1] afterwards (clamp fraction reported in aux).
    """
    if d < 4 or not (0 < eps < 1.0 / 3.0):
        raise ValueError("requires d >= 4 and eps in (0, 1/3)")
    m = math.ceil(d / eps**2)
    kappa = C / math.log2(d / eps)
    s1 = 3.0 * math.sqrt(eps / d)
    G = rng.standard_normal((m, d))
    G0 = rng.standard_normal((m, d))
    u = rng.standard_normal(m)
    v = rng.standard_normal(d)
    A1 = kappa * G
    A2 = kappa * (G0 + s1 * np.outer(u, v))
    clamped = int(np.sum(np.abs(A1) > 1)) + int(np.sum(np.abs(A2) > 1))
    A1 = np.clip(A1, -1.0, 1.0)
    A2 = np.clip(A2, -1.0, 1.0)
    M1 = DenseMatrix(A1, bounded=True)
    M2 = DenseMatrix(A2, bounded=True)
    aux = {
        "clamp_fraction": clamped / (2 * m * d),
        "srank_1": stable_rank(M1),
        "srank_2": stable_rank(M2),
        "kappa": kappa,
        "s1": s1,
    }
    return M1, M2, aux


def gen_random_orthogonal(n: int, rng) -> DenseMatrix:
    """Haar-distributed orthogonal matrix (Gaussian QR with sign correction)."""
    G = rng.standard_normal((n, n))
    Q, R = np.linalg.qr(G)
    Q = Q * np.sign(np.diag(R))[None, :]
    return DenseMatrix(Q)


def gen_schatten_pair(n: int, eta: float, trunc_C: float,
                      rng) -> tuple[DenseMatrix, DenseMatrix]:
    """Hard pair for Schatten/entropy: (1+eta)/sqrt(n) G vs O + eta/sqrt(n) G,
    entrywise truncated at +-C/sqrt(n) then scaled by sqrt(n)/C."""
    if not (0 < eta < 0.5) or trunc_C <= 0:
        raise ValueError("requires eta in (0, 1/2) and trunc_C > 0")
    D1 = (1.0 + eta) / math.sqrt(n) * rng.standard_normal((n, n))
    O = gen_random_orthogonal(n, rng).data
    D2 = O + eta / math.sqrt(n) * rng.standard_normal((n, n))
    lim = trunc_C / math.sqrt(n)
    scale = math.sqrt(n) / trunc_C
    D1 = np.clip(D1, -lim, lim) * scale
    D2 = np.clip(D2, -lim, lim) * scale
    return DenseMatrix(D1, bounded=True), DenseMatrix(D2, bounded=True)


def distance_to_rank(M: DenseMatrix, r: int) -> int:
    """Exact rigidity: min entry changes bringing rank_F(M) down to <= r.

    Enumerates every candidate row space V in F_p^{r x m} and takes, per row
    of M, the nearest codeword in span(V); exact because every rank <= r
    matrix factors through such a V. Feasible only at tiny sizes.
    """
    if M.field is None:
        raise TooLarge("rigidity oracle is defined over GF(p) only")
    p = M.field.p
    n, m = M.shape
    if max(n, m) > 6 or p > 3:
        raise TooLarge("rigidity oracle limited to n <= 6 over GF(2)/GF(3)")
    A = M.data
    if r <= 0:
        return int(np.count_nonzero(A))
    if r >= min(n, m):
        return 0
    if m > n:
        A = A.T
        n, m = m, n
    n_v = p ** (r * m)
    if n_v > _RIGIDITY_MAX_CANDIDATES:
        raise TooLarge("row-space enumeration too large")
    combos = np.array(list(itertools.product(range(p), repeat=r)), dtype=np.int64)
    return int(rigidity_search(np.ascontiguousarray(A, dtype=np.int64),
                               r, p, n_v, combos))


def materialize(spec: InstanceSpec, rng):
    """Instantiate a spec; pair families return (matrix, matrix) or a triple."""
    f = spec.family
    if f == "zero":
        return DenseMatrix(np.zeros((spec.n, spec.n)), bounded=True)
    if f == "all-ones":
        return DenseMatrix(np.ones((spec.n, spec.n)), bounded=True)
    if f == "low-rank-field":
        return gen_low_rank_field(spec.n, spec.d, PrimeField(spec.p), rng)
    if f == "uniform-field":
        return gen_uniform_field(spec.n, PrimeField(spec.p), rng)
    if f == "signed-uniform":
        return gen_signed_uniform(spec.n, rng)
    if f == "rank-one-signed":
        return gen_rank_one_signed(spec.n, rng)
    if f == "planted":
        t = max(1, math.floor(math.sqrt(spec.eps) * spec.n))
        F = PrimeField(spec.p)
        inner = gen_uniform_field(t, F, rng)
        return gen_planted(inner, spec.n, rng)
    if f == "gaussian-pair":
        return gen_gaussian_pair(spec.n, spec.d, rng)
    if f == "stable-rank-pair":
        return gen_stable_rank_pair(spec.d, spec.eps, rng)
    if f == "schatten-pair":
        return gen_schatten_pair(spec.n, spec.eta, spec.trunc_C, rng)
    if f == "orthogonal":
        return gen_random_orthogonal(spec.n, rng)
    raise ValueError(f"unknown family {f!r}")
