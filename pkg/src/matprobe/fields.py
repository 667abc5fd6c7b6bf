"""Prime fields GF(p) and the matrix container used throughout the package.

Real matrices are float64 arrays; finite-field matrices are int64 arrays with
entries reduced to [0, p). p is limited to < 2^31 so that products of two
residues fit in signed 64-bit intermediates.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ZeroInverse

_MR_BASES = (2, 3, 5, 7)  # deterministic Miller-Rabin witnesses for n < 3.2e9


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class PrimeField:
    """GF(p) for a prime modulus p, 2 <= p < 2^31."""

    p: int

    def __post_init__(self):
        if not (2 <= self.p < 2**31):
            raise ValueError(f"modulus {self.p} outside [2, 2^31)")
        if not is_prime(self.p):
            raise ValueError(f"modulus {self.p} is not prime")

    def reduce(self, a):
        """Reduce an int or integer array into [0, p)."""
        if isinstance(a, np.ndarray):
            return (a.astype(np.int64) % self.p).astype(np.int64)
        return int(a) % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def inv(self, a):
        return field_inverse(a, self)


def field_inverse(a: int, F: PrimeField) -> int:
    """Multiplicative inverse of a in GF(p)."""
    a = int(a) % F.p
    if a == 0:
        raise ZeroInverse("0 has no inverse")
    return pow(a, -1, F.p)


@dataclass
class DenseMatrix:
    """A dense n x m matrix over the reals or over GF(p).

    `field` is None for real matrices. `bounded` asserts the bounded-entry
    model (|A_ij| <= 1), required by the spectral testers and estimators.
    """

    data: np.ndarray
    field: PrimeField | None = None
    bounded: bool = False

    def __post_init__(self):
        a = np.asarray(self.data)
        if a.ndim != 2:
            raise ValueError("matrix data must be 2-dimensional")
        if self.field is not None:
            self.data = self.field.reduce(a)
        else:
            self.data = np.ascontiguousarray(a, dtype=np.float64)
            if self.bounded and self.data.size and np.max(np.abs(self.data)) > 1 + 1e-12:
                raise ValueError("bounded-entry flag set but |entry| > 1")

    @property
    def n_rows(self) -> int:
        return self.data.shape[0]

    @property
    def n_cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @property
    def is_real(self) -> bool:
        return self.field is None

    def copy(self) -> "DenseMatrix":
        return DenseMatrix(self.data.copy(), field=self.field, bounded=self.bounded)
