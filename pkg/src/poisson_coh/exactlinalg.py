"""Exact rational linear algebra.

``RationalMatrix`` is the dense reference implementation (Bareiss elimination
to a reduced row-echelon form).  ``SparseEliminator`` does the same job
incrementally on sparse integer rows and is what the cohomology code uses for
large slices; the two are cross-checked in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

from .gradedpoly import norm_coeff


class DimensionMismatch(ValueError):
    pass


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class RationalMatrix:
    rows: int
    cols: int
    entries: tuple  # row-major

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(norm_coeff(_frac(e)) for e in self.entries))
        if len(self.entries) != self.rows * self.cols:
            raise DimensionMismatch(f"{len(self.entries)} entries for a {self.rows}x{self.cols} matrix")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int = None) -> "RationalMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise DimensionMismatch("ragged rows")
        return cls(len(rows), cols, tuple(e for r in rows for e in r))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RationalMatrix":
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls(n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def to_rows(self) -> list:
        return [list(self.row(i)) for i in range(self.rows)]

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix(self.cols, self.rows,
                              tuple(self[i, j] for j in range(self.cols) for i in range(self.rows)))

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.rows:
            raise DimensionMismatch("inner dimensions differ")
        out = []
        for i in range(self.rows):
            r = self.row(i)
            for j in range(other.cols):
                out.append(sum(r[k] * other[k, j] for k in range(self.cols) if r[k]))
        return RationalMatrix(self.rows, other.cols, tuple(out))

    def apply(self, v: Sequence) -> list:
        if len(v) != self.cols:
            raise DimensionMismatch("vector length differs from column count")
        return [norm_coeff(_frac(sum(a * b for a, b in zip(self.row(i), v) if a))) for i in range(self.rows)]

    def is_zero(self) -> bool:
        return not any(self.entries)


def _rref(rows: list, cols: int):
    """Bareiss elimination on integer rows, then normalise to RREF over Q.

    Returns (pivot columns, reduced rows as Fractions).
    """
    # clear denominators row by row so the elimination is fraction-free
    work = []
    for r in rows:
        den = 1
        for e in r:
            if isinstance(e, Fraction):
                den = den * e.denominator // gcd(den, e.denominator)
        work.append([int(e * den) for e in r])
    pivots = []
    prev = 1
    rank = 0
    nrows = len(work)
    for c in range(cols):
        p = next((i for i in range(rank, nrows) if work[i][c]), None)
        if p is None:
            continue
        work[rank], work[p] = work[p], work[rank]
        pr = work[rank]
        pv = pr[c]
        for i in range(rank + 1, nrows):
            ri = work[i]
            f = ri[c]
            # Bareiss step: exact division by the previous pivot
            work[i] = [(pv * ri[k] - f * pr[k]) // prev for k in range(cols)]
        prev = pv
        pivots.append(c)
        rank += 1
    red = [[Fraction(e) for e in work[i]] for i in range(rank)]
    for k in range(rank - 1, -1, -1):
        c = pivots[k]
        pv = red[k][c]
        red[k] = [e / pv for e in red[k]]
        for i in range(k):
            f = red[i][c]
            if f:
                red[i] = [a - f * b for a, b in zip(red[i], red[k])]
    return pivots, red


def rref(m: RationalMatrix):
    """(pivot columns, rows of the reduced row-echelon form)."""
    return _rref(m.to_rows(), m.cols)


def rank(m: RationalMatrix) -> int:
    return len(_rref(m.to_rows(), m.cols)[0])


def rank_and_kernel(m: RationalMatrix):
    """Rank and a kernel basis, one vector per free column (free entry = 1)."""
    pivots, red = _rref(m.to_rows(), m.cols)
    pivot_set = set(pivots)
    kernel = []
    for free in range(m.cols):
        if free in pivot_set:
            continue
        v = [Fraction(0)] * m.cols
        v[free] = Fraction(1)
        for k, c in enumerate(pivots):
            v[c] = -red[k][free]
        kernel.append(tuple(norm_coeff(e) for e in v))
    return len(pivots), kernel


def solve(m: RationalMatrix, b: Sequence) -> Optional[tuple]:
    """One solution of ``m x = b`` (free variables set to 0), or ``None``."""
    if len(b) != m.rows:
        raise DimensionMismatch(f"right-hand side has length {len(b)}, expected {m.rows}")
    aug = [list(m.row(i)) + [b[i]] for i in range(m.rows)]
    pivots, red = _rref(aug, m.cols + 1)
    if pivots and pivots[-1] == m.cols:
        return None
    x = [Fraction(0)] * m.cols
    for k, c in enumerate(pivots):
        x[c] = red[k][m.cols]
    return tuple(norm_coeff(e) for e in x)


# -- sparse incremental elimination ----------------------------------------


def _primitive(row: dict) -> dict:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            break
    if g > 1:
        row = {k: v // g for k, v in row.items()}
    # sign normalisation keeps the stored basis deterministic
    if row[min(row)] < 0:
        row = {k: -v for k, v in row.items()}
    return row


def _to_int_row(row: dict) -> dict:
    den = 1
    for v in row.values():
        if isinstance(v, Fraction) and v.denominator != 1:
            den = den * v.denominator // gcd(den, v.denominator)
    if den == 1:
        return {k: int(v) for k, v in row.items() if v}
    return {k: int(v * den) for k, v in row.items() if v}


class SparseEliminator:
    """Incremental row echelon form over Z on sparse rows (dict column -> value).

    Each stored row has a distinct pivot (its smallest column).  Rows are kept
    primitive, so coefficient growth stays modest on the integer matrices the
    cohomology code produces.
    """

    def __init__(self):
        self.pivot_rows: dict = {}

    @property
    def rank(self) -> int:
        return len(self.pivot_rows)

    def reduce(self, row: dict) -> dict:
        row = _to_int_row(row)
        while row:
            c = min(row)
            pr = self.pivot_rows.get(c)
            if pr is None:
                return row
            a = row[c]
            b = pr[c]
            g = gcd(a, b)
            fa, fb = b // g, a // g
            new = {k: v * fa for k, v in row.items()} if fa != 1 else dict(row)
            for k, v in pr.items():
                nv = new.get(k, 0) - fb * v
                if nv:
                    new[k] = nv
                else:
                    new.pop(k, None)
            row = new
        return row

    def add(self, row: dict) -> bool:
        """Insert a row; return True if it increased the rank."""
        r = self.reduce(row)
        if not r:
            return False
        r = _primitive(r)
        self.pivot_rows[min(r)] = r
        return True


def sparse_rank(rows) -> int:
    el = SparseEliminator()
    for r in rows:
        if r:
            el.add(r)
    return el.rank


def _back_substitute(pivot_rows: dict, ncols: int) -> list:
    """Solution with free variables 0 from echelon rows whose column ``ncols`` holds the rhs."""
    x: dict = {}
    for p in sorted(pivot_rows, reverse=True):
        if p == ncols:
            continue
        row = pivot_rows[p]
        acc = Fraction(row.get(ncols, 0))
        for k, v in row.items():
            if k != p and k != ncols and k in x:
                acc -= v * x[k]
        x[p] = acc / row[p]
    return [norm_coeff(x.get(j, Fraction(0))) for j in range(ncols)]


def solve_sparse(rows: Sequence[dict], rhs: Sequence, ncols: int) -> Optional[list]:
    """Solve the sparse system ``rows[i]·x = rhs[i]`` (rows map column -> value).

    Returns one solution with free variables 0, or ``None`` if inconsistent.
    """
    if len(rows) != len(rhs):
        raise DimensionMismatch("one right-hand side entry per row is required")
    el = SparseEliminator()
    for r, b in zip(rows, rhs):
        row = {k: v for k, v in r.items() if v}
        if b:
            row[ncols] = b
        if not row:
            continue
        red = el.reduce(row)
        if red and min(red) == ncols:
            return None
        if red:
            el.pivot_rows[min(red)] = _primitive(red)
    return _back_substitute(el.pivot_rows, ncols)


def sparse_rref(rows: Sequence[dict]) -> dict:
    """Fully reduced echelon form ``{pivot column: row}`` over Q (pivot entries 1)."""
    el = SparseEliminator()
    for r in rows:
        if r:
            el.add(r)
    red: dict = {}
    for p in sorted(el.pivot_rows, reverse=True):
        row = el.pivot_rows[p]
        lead = Fraction(row[p])
        out = {k: Fraction(v) / lead for k, v in row.items()}
        for q in [k for k in out if k != p and k in red]:
            f = out.pop(q)
            for k, v in red[q].items():
                if k == q:
                    continue
                nv = out.get(k, 0) - f * v
                if nv:
                    out[k] = nv
                else:
                    out.pop(k, None)
        red[p] = {k: norm_coeff(v) for k, v in out.items()}
    return red


def sparse_kernel(rows: Sequence[dict], ncols: int) -> list:
    """Kernel basis of the sparse matrix with the given rows; one vector per free column."""
    red = sparse_rref(rows)
    out = []
    for free in range(ncols):
        if free in red:
            continue
        v = {free: 1}
        for p, row in red.items():
            c = row.get(free)
            if c:
                v[p] = norm_coeff(-c)
        out.append(v)
    return out
