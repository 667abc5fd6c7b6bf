"""Query oracles mediating all access to the hidden matrix.

EntryOracle serves single entries with distinct-query accounting, an optional
budget, and non-adaptivity sealing: once a query set is sealed, any read
outside it raises. SensingOracle serves trace inner products <X, A>, one
query per probe.
"""
from __future__ import annotations

import numpy as np

from .errors import (
    AlreadyRead,
    BudgetExceeded,
    IndexOutOfRange,
    NonAdaptivityViolation,
    ShapeMismatch,
)
from .fields import DenseMatrix


class EntryOracle:
    def __init__(self, hidden: DenseMatrix, budget: int | None = None,
                 require_seal: bool = False):
        self.hidden = hidden
        self.budget = budget
        self.require_seal = require_seal
        self._seen = np.zeros(hidden.shape, dtype=bool)
        self._sealed: np.ndarray | None = None
        self._log: list[np.ndarray] = []  # (k, 2) arrays of new positions, in order
        self._count = 0

    @property
    def shape(self) -> tuple[int, int]:
        return self.hidden.shape

    @property
    def field(self):
        return self.hidden.field

    @property
    def is_sealed(self) -> bool:
        return self._sealed is not None

    @property
    def queries_used(self) -> int:
        return self._count

    def log_positions(self) -> np.ndarray:
        """Distinct queried positions in first-read order, as an (n, 2) array."""
        if not self._log:
            return np.empty((0, 2), dtype=np.int64)
        return np.concatenate(self._log, axis=0)

    def seal(self, Q) -> None:
        """Commit the query set; later reads outside it raise."""
        if self._count > 0:
            raise AlreadyRead("cannot seal after reads were issued")
        ii, jj = _as_index_arrays(Q)
        self._check_bounds(ii, jj)
        mask = np.zeros(self.hidden.shape, dtype=bool)
        mask[ii, jj] = True
        self._sealed = mask

    def seal_arrays(self, ii, jj) -> None:
        self.seal(np.stack([np.asarray(ii), np.asarray(jj)], axis=1))

    def read_at(self, ii, jj) -> np.ndarray:
        """Read entries at positions (ii[k], jj[k]); returns aligned values.

        Duplicate positions (within the batch or across batches) count once
        toward the budget and the log.
        """
        ii = np.ascontiguousarray(ii, dtype=np.int64).ravel()
        jj = np.ascontiguousarray(jj, dtype=np.int64).ravel()
        if ii.shape != jj.shape:
            raise ShapeMismatch("row and column index arrays differ in length")
        self._check_bounds(ii, jj)
        if self._sealed is not None:
            if not np.all(self._sealed[ii, jj]):
                raise NonAdaptivityViolation("read outside the sealed query set")
        elif self.require_seal:
            raise NonAdaptivityViolation("oracle requires seal() before reads")
        n, m = self.hidden.shape
        lin = ii * m + jj
        new_lin = np.unique(lin[~self._seen.ravel()[lin]])
        if self.budget is not None and self._count + new_lin.size > self.budget:
            raise BudgetExceeded(
                f"{self._count} used + {new_lin.size} new > budget {self.budget}")
        if new_lin.size:
            self._seen.ravel()[new_lin] = True
            self._log.append(
                np.stack([new_lin // m, new_lin % m], axis=1).astype(np.int64))
            self._count += int(new_lin.size)
        return self.hidden.data[ii, jj]

    def read_entries(self, S) -> dict:
        """Read an index set; returns {(i, j): value}."""
        ii, jj = _as_index_arrays(S)
        vals = self.read_at(ii, jj)
        return {(int(i), int(j)): v for i, j, v in zip(ii, jj, vals)}

    def _check_bounds(self, ii, jj):
        n, m = self.hidden.shape
        if ii.size and (ii.min() < 0 or ii.max() >= n or jj.min() < 0 or jj.max() >= m):
            raise IndexOutOfRange("index outside the hidden matrix")


class SensingOracle:
    def __init__(self, hidden: DenseMatrix, budget: int | None = None):
        self.hidden = hidden
        self.budget = budget
        self._count = 0

    @property
    def shape(self) -> tuple[int, int]:
        return self.hidden.shape

    @property
    def field(self):
        return self.hidden.field

    @property
    def queries_used(self) -> int:
        return self._count

    def sense(self, X):
        """Return <X, A> = sum_ij X_ij * A_ij; one query."""
        if isinstance(X, DenseMatrix):
            if (X.field is None) != (self.hidden.field is None):
                raise ShapeMismatch("probe kind does not match the hidden matrix")
            X = X.data
        X = np.asarray(X)
        if X.shape != self.hidden.shape:
            raise ShapeMismatch(f"probe shape {X.shape} != hidden {self.hidden.shape}")
        self._charge(1)
        if self.hidden.field is not None:
            p = self.hidden.field.p
            prods = (X.astype(np.int64) % p) * self.hidden.data % p
            return int(np.sum(prods) % p)
        return float(np.sum(X * self.hidden.data))

    def sketch(self, G: np.ndarray, H: np.ndarray) -> np.ndarray:
        """Batch of outer-product probes: returns G A H^T, charging one query
        per (i, j) pair, i.e. G.shape[0] * H.shape[0] queries."""
        G = np.asarray(G)
        H = np.asarray(H)
        if G.shape[1] != self.hidden.shape[0] or H.shape[1] != self.hidden.shape[1]:
            raise ShapeMismatch("sketch factor widths must match the hidden matrix")
        self._charge(G.shape[0] * H.shape[0])
        if self.hidden.field is not None:
            p = self.hidden.field.p
            GA = (G.astype(np.int64) % p) @ self.hidden.data % p
            return GA @ (H.astype(np.int64).T % p) % p
        return G @ self.hidden.data @ H.T

    def _charge(self, k: int):
        if self.budget is not None and self._count + k > self.budget:
            raise BudgetExceeded(f"{self._count} used + {k} > budget {self.budget}")
        self._count += k


def _as_index_arrays(Q):
    """Accept an iterable of (i, j) pairs or a (k, 2) array."""
    arr = np.asarray(list(Q) if not isinstance(Q, np.ndarray) else Q, dtype=np.int64)
    if arr.size == 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ShapeMismatch("index set must be pairs (i, j)")
    return arr[:, 0], arr[:, 1]
