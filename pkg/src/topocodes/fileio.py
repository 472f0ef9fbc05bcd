"""Parity-check matrix files: alist (1-based, MacKay layout) and MatrixMarket
coordinate pattern."""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse as sp

from .errors import IoFailure
from .gf2 import BitMatrix, bits


def alist_text(mat: BitMatrix) -> str:
    """Serialize as alist; index lists are padded with zeros to the maximum weight."""
    cols = mat.transpose()
    col_w = cols.row_weights()
    row_w = mat.row_weights()
    max_c = max(col_w, default=0)
    max_r = max(row_w, default=0)

    def padded(idx: list[int], width: int) -> str:
        return " ".join([str(i + 1) for i in idx] + ["0"] * (width - len(idx)))

    lines = [f"{mat.ncols} {mat.nrows}", f"{max_c} {max_r}",
             " ".join(map(str, col_w)), " ".join(map(str, row_w))]
    lines += [padded(bits(c), max_c) for c in cols.rows]
    lines += [padded(bits(r), max_r) for r in mat.rows]
    return "\n".join(lines) + "\n"


def parse_alist(text: str) -> BitMatrix:
    lines = text.split("\n")
    try:
        n, m = map(int, lines[0].split())
        col_w = [int(x) for x in lines[2].split()]
        row_w = [int(x) for x in lines[3].split()]
        if len(col_w) != n or len(row_w) != m:
            raise ValueError("weight lists do not match the header")
        rows = [0] * m
        for j in range(n):
            idx = [int(x) for x in lines[4 + j].split() if x != "0"]
            if len(idx) != col_w[j]:
                raise ValueError(f"column {j + 1} lists {len(idx)} entries, header says {col_w[j]}")
            for i in idx:
                if not 1 <= i <= m:
                    raise ValueError(f"row index {i} out of range")
                rows[i - 1] |= 1 << j
        # the row section must agree with the column section
        for i in range(m):
            line = lines[4 + n + i] if 4 + n + i < len(lines) else ""
            idx = sorted(int(x) - 1 for x in line.split() if x != "0")
            if idx != bits(rows[i]):
                raise ValueError(f"row {i + 1} disagrees with the column lists")
    except (IndexError, ValueError) as exc:
        raise IoFailure(f"malformed alist: {exc}") from exc
    return BitMatrix(tuple(rows), n)


def write_alist(mat: BitMatrix, path: str | Path) -> None:
    try:
        Path(path).write_text(alist_text(mat))
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


def read_alist(path: str | Path) -> BitMatrix:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    return parse_alist(text)


def _to_sparse(mat: BitMatrix) -> sp.coo_matrix:
    r, c = [], []
    for i, row in enumerate(mat.rows):
        for j in bits(row):
            r.append(i)
            c.append(j)
    data = np.ones(len(r), dtype=np.int8)
    return sp.coo_matrix((data, (r, c)), shape=mat.shape)


def matrixmarket_text(mat: BitMatrix) -> str:
    buf = io.BytesIO()
    scipy.io.mmwrite(buf, _to_sparse(mat), field="pattern")
    return buf.getvalue().decode()


def parse_matrixmarket(text: str) -> BitMatrix:
    try:
        a = scipy.io.mmread(io.BytesIO(text.encode()))
    except Exception as exc:  # scipy raises assorted types on bad input
        raise IoFailure(f"malformed MatrixMarket data: {exc}") from exc
    a = sp.coo_matrix(a)
    rows = [0] * a.shape[0]
    for i, j in zip(a.row.tolist(), a.col.tolist()):
        rows[i] ^= 1 << j
    return BitMatrix(tuple(rows), a.shape[1])


def write_matrixmarket(mat: BitMatrix, path: str | Path) -> None:
    try:
        Path(path).write_text(matrixmarket_text(mat))
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


def read_matrixmarket(path: str | Path) -> BitMatrix:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    return parse_matrixmarket(text)
