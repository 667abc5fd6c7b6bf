"""Hot numeric kernels: GF(p) elimination, cycle products, rigidity search.

Each kernel has a numba @njit build and a pure-numpy fallback. The fallback is
selected when numba is unavailable or when the environment variable
MATPROBE_NO_NUMBA is set to a truthy value.
"""
from __future__ import annotations

import os

import numpy as np

USE_NUMBA = os.environ.get("MATPROBE_NO_NUMBA", "0").lower() not in ("1", "true", "yes")
if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover
        USE_NUMBA = False

if USE_NUMBA:

    @njit(cache=True)
    def _modpow(a, e, p):
        a %= p
        r = 1
        while e > 0:
            if e & 1:
                r = r * a % p
            a = a * a % p
            e >>= 1
        return r

    @njit(cache=True)
    def gf_rank(a, p):
        """Rank of int64 matrix a over GF(p). Destroys a."""
        n, m = a.shape
        r = 0
        for c in range(m):
            piv = -1
            for i in range(r, n):
                if a[i, c] % p != 0:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != r:
                for j in range(m):
                    t = a[r, j]
                    a[r, j] = a[piv, j]
                    a[piv, j] = t
            inv = _modpow(a[r, c], p - 2, p)
            for j in range(m):
                a[r, j] = a[r, j] * inv % p
            for i in range(n):
                if i != r and a[i, c] % p != 0:
                    f = a[i, c] % p
                    for j in range(m):
                        a[i, j] = (a[i, j] - f * a[r, j]) % p
            r += 1
            if r == n:
                break
        return r

    @njit(cache=True)
    def gf_solve(S, b, p):
        """Solve S x = b over GF(p). Returns (solvable, x) with free vars 0."""
        k, r = S.shape
        aug = np.empty((k, r + 1), dtype=np.int64)
        aug[:, :r] = S % p
        aug[:, r] = b % p
        pivcol = np.full(k, -1, dtype=np.int64)
        row = 0
        for c in range(r):
            piv = -1
            for i in range(row, k):
                if aug[i, c] != 0:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != row:
                for j in range(r + 1):
                    t = aug[row, j]
                    aug[row, j] = aug[piv, j]
                    aug[piv, j] = t
            inv = _modpow(aug[row, c], p - 2, p)
            for j in range(r + 1):
                aug[row, j] = aug[row, j] * inv % p
            for i in range(k):
                if i != row and aug[i, c] != 0:
                    f = aug[i, c]
                    for j in range(r + 1):
                        aug[i, j] = (aug[i, j] - f * aug[row, j]) % p
            pivcol[row] = c
            row += 1
            if row == k:
                break
        x = np.zeros(r, dtype=np.int64)
        for i in range(row):
            x[pivcol[i]] = aug[i, r]
        for i in range(row, k):
            if aug[i, r] != 0:
                return False, x
        return True, x

    @njit(cache=True)
    def cycle_mean(A, I, J):
        """Mean over cycles of prod_l A[i_l,j_l] * A[i_{l+1},j_l]."""
        N, q = I.shape
        acc = 0.0
        for t in range(N):
            prod = 1.0
            for l in range(q):
                ln = (l + 1) % q
                prod *= A[I[t, l], J[t, l]] * A[I[t, ln], J[t, l]]
            acc += prod
        return acc / N

    @njit(cache=True)
    def rigidity_search(A, r, p, n_v, combos):
        """Min Hamming distance from A to any rank<=r matrix over GF(p).

        Enumerates all row-space candidates V in F_p^{r x m} (n_v = p^(r*m)),
        taking per row of A the nearest codeword in span(V).
        combos: (p^r, r) array of all coefficient vectors.
        """
        n, m = A.shape
        nc = combos.shape[0]
        best = n * m + 1
        V = np.zeros((r, m), dtype=np.int64)
        code = np.zeros((nc, m), dtype=np.int64)
        for v_id in range(n_v):
            t = v_id
            for a in range(r):
                for b in range(m):
                    V[a, b] = t % p
                    t //= p
            for ci in range(nc):
                for b in range(m):
                    s = 0
                    for a in range(r):
                        s += combos[ci, a] * V[a, b]
                    code[ci, b] = s % p
            total = 0
            for i in range(n):
                dmin = m + 1
                for ci in range(nc):
                    d = 0
                    for b in range(m):
                        if A[i, b] != code[ci, b]:
                            d += 1
                    if d < dmin:
                        dmin = d
                total += dmin
            if total < best:
                best = total
                if best == 0:
                    return 0
        return best

else:

    def gf_rank(a, p):
        n, m = a.shape
        r = 0
        for c in range(m):
            col = a[r:, c] % p
            nz = np.nonzero(col)[0]
            if nz.size == 0:
                continue
            piv = r + nz[0]
            if piv != r:
                a[[r, piv]] = a[[piv, r]]
            inv = pow(int(a[r, c]) % p, -1, p)
            a[r] = a[r] * inv % p
            mask = (a[:, c] % p != 0)
            mask[r] = False
            a[mask] = (a[mask] - np.outer(a[mask, c] % p, a[r])) % p
            r += 1
            if r == n:
                break
        return r

    def gf_solve(S, b, p):
        k, r = S.shape
        aug = np.concatenate([S % p, (b % p).reshape(-1, 1)], axis=1).astype(np.int64)
        pivcol = []
        row = 0
        for c in range(r):
            nz = np.nonzero(aug[row:, c])[0]
            if nz.size == 0:
                continue
            piv = row + nz[0]
            if piv != row:
                aug[[row, piv]] = aug[[piv, row]]
            inv = pow(int(aug[row, c]), -1, p)
            aug[row] = aug[row] * inv % p
            mask = aug[:, c] != 0
            mask[row] = False
            aug[mask] = (aug[mask] - np.outer(aug[mask, c], aug[row])) % p
            pivcol.append(c)
            row += 1
            if row == k:
                break
        x = np.zeros(r, dtype=np.int64)
        for i, c in enumerate(pivcol):
            x[c] = aug[i, r]
        if np.any(aug[row:, r] != 0):
            return False, x
        return True, x

    def cycle_mean(A, I, J):
        vals = A[I, J] * A[np.roll(I, -1, axis=1), J]
        return float(np.mean(np.prod(vals, axis=1)))

    def rigidity_search(A, r, p, n_v, combos):
        n, m = A.shape
        best = n * m + 1
        digits = np.empty(r * m, dtype=np.int64)
        for v_id in range(n_v):
            t = v_id
            for k in range(r * m):
                digits[k] = t % p
                t //= p
            V = digits.reshape(r, m)
            code = combos @ V % p
            total = int(np.sum(np.min(
                np.sum(A[:, None, :] != code[None, :, :], axis=2), axis=1)))
            if total < best:
                best = total
                if best == 0:
                    return 0
        return best
