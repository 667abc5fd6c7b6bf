"""Exact ranks, singular values, Schatten norms, stable rank and entropy."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ConvergenceFailure, ZeroMatrix
from .fields import DenseMatrix

REAL_RANK_TOL = 1e-9
MAX_SVD_DIM = 4096


@dataclass(frozen=True)
class SpectralSummary:
    """Singular values in non-increasing order plus the derived norms."""

    singular_values: np.ndarray
    frobenius: float
    operator: float


def rank_exact(M: DenseMatrix) -> int:
    """Exact rank over GF(p); numerical rank (tol 1e-9 * sigma_1) over reals."""
    if M.field is not None:
        return int(_kernels.gf_rank(M.data.copy(), M.field.p))
    sv = singular_values(M).singular_values
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > REAL_RANK_TOL * sv[0]))


def singular_values(M: DenseMatrix) -> SpectralSummary:
    """Full singular value set of a real matrix, largest first."""
    if M.field is not None:
        raise ValueError("singular values are defined for real matrices only")
    if max(M.shape) > MAX_SVD_DIM:
        raise ValueError(f"dense SVD limited to {MAX_SVD_DIM}")
    try:
        sv = np.linalg.svd(M.data, compute_uv=False)
    except np.linalg.LinAlgError as e:
        raise ConvergenceFailure(str(e)) from e
    sv = np.sort(sv)[::-1]
    return SpectralSummary(
        singular_values=sv,
        frobenius=float(np.sqrt(np.sum(sv**2))),
        operator=float(sv[0]) if sv.size else 0.0,
    )


def jacobi_singular_values(a: np.ndarray, tol: float = 1e-12,
                           max_sweeps: int = 100) -> np.ndarray:
    """Reference one-sided Jacobi SVD, independent of LAPACK.

    Rotates column pairs until all are numerically orthogonal; singular values
    are then the column norms. Used as the accuracy reference for
    singular_values.
    """
    a = np.array(a, dtype=np.float64)
    if a.shape[0] < a.shape[1]:
        a = a.T
    n = a.shape[1]
    off = float(np.sum(a * a))
    for _ in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                app = a[:, p] @ a[:, p]
                aqq = a[:, q] @ a[:, q]
                apq = a[:, p] @ a[:, q]
                if abs(apq) <= tol * np.sqrt(app * aqq) or apq == 0.0:
                    continue
                rotated = True
                zeta = (aqq - app) / (2.0 * apq)
                t = np.sign(zeta) / (abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                if zeta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                ap = a[:, p].copy()
                a[:, p] = c * ap - s * a[:, q]
                a[:, q] = s * ap + c * a[:, q]
        if not rotated:
            sv = np.sqrt(np.sum(a * a, axis=0))
            return np.sort(sv)[::-1]
    if off == 0.0:
        return np.zeros(n)
    raise ConvergenceFailure(f"one-sided Jacobi did not settle in {max_sweeps} sweeps")


def schatten_norm(M: DenseMatrix, p: float) -> float:
    """(sum_i sigma_i^p)^{1/p} for p >= 1."""
    if p < 1:
        raise ValueError("Schatten order must be >= 1")
    sv = singular_values(M).singular_values
    if sv.size == 0 or sv[0] == 0.0:
        return 0.0
    # factor out sigma_1 to avoid overflow at large p
    return float(sv[0] * np.sum((sv / sv[0]) ** p) ** (1.0 / p))


def stable_rank(M: DenseMatrix) -> float:
    """||A||_F^2 / sigma_1^2, in [1, rank(A)]."""
    s = singular_values(M)
    if s.operator == 0.0:
        raise ZeroMatrix("stable rank undefined for the zero matrix")
    return float(s.frobenius**2 / s.operator**2)


def matrix_entropy(M: DenseMatrix) -> float:
    """Spectral entropy in nats of a bounded-entry square matrix.

    H(A) = -sum_i p_i ln p_i / sum_i p_i with p_i = sigma_i^2 / n^2
    (the weights are left unnormalized in both sums, 0 * ln 0 = 0).

    Requires sigma_1 <= n, the consequence of the bounded-entry model that
    the definition actually relies on; scaled inputs like sqrt(n) * O satisfy
    it without entrywise boundedness.
    """
    if M.n_rows != M.n_cols:
        raise ValueError("matrix_entropy requires a square matrix")
    sv = singular_values(M).singular_values
    if sv.size and sv[0] > M.n_rows * (1 + 1e-9):
        raise ValueError("matrix_entropy requires sigma_1 <= n")
    n = M.n_rows
    w = (sv / n) ** 2
    tot = float(np.sum(w))
    if tot == 0.0:
        raise ZeroMatrix("entropy undefined for the zero matrix")
    nz = w[w > 0]
    return float(-np.sum(nz * np.log(nz)) / tot)
