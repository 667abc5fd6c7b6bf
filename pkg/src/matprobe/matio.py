"""Plain-text matrix file format.

Line 1: ``matrix <rows> <cols> <real | gf:<p>>``; an optional comment line
``# seed=<u64> family=<name>`` may follow; then one whitespace-separated row
per line. Reals use shortest round-trip decimals, so save/load is bit-exact.
"""
from __future__ import annotations

import numpy as np

from .fields import DenseMatrix, PrimeField


def save_matrix(path, M: DenseMatrix, seed: int | None = None,
                family: str | None = None) -> None:
    kind = "real" if M.field is None else f"gf:{M.field.p}"
    with open(path, "w") as fh:
        fh.write(f"matrix {M.n_rows} {M.n_cols} {kind}\n")
        if seed is not None or family is not None:
            parts = ["#"]
            if seed is not None:
                parts.append(f"seed={seed}")
            if family is not None:
                parts.append(f"family={family}")
            fh.write(" ".join(parts) + "\n")
        for row in M.data:
            if M.field is None:
                fh.write(" ".join(repr(float(v)) for v in row) + "\n")
            else:
                fh.write(" ".join(str(int(v)) for v in row) + "\n")


def load_matrix(path) -> DenseMatrix:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 4 or header[0] != "matrix":
            raise ValueError(f"{path}: bad header, expected 'matrix <r> <c> <kind>'")
        n, m = int(header[1]), int(header[2])
        kind = header[3]
        rows = []
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rows.append(line.split())
    if len(rows) != n or any(len(r) != m for r in rows):
        raise ValueError(f"{path}: data shape does not match header {n}x{m}")
    if kind == "real":
        data = np.array([[float(v) for v in r] for r in rows])
        bounded = bool(data.size == 0 or np.max(np.abs(data)) <= 1.0)
        return DenseMatrix(data, bounded=bounded)
    if kind.startswith("gf:"):
        F = PrimeField(int(kind[3:]))
        data = np.array([[int(v) for v in r] for r in rows], dtype=np.int64)
        return DenseMatrix(data, field=F)
    raise ValueError(f"{path}: unknown kind {kind!r}")
