"""Exact integer/rational linear algebra for lattice questions.

Everything here works on Python ints and :class:`fractions.Fraction`; no
floating point is ever introduced.  The central routine is a Smith normal
form that returns both unimodular transforms, from which kernels, integer
solvability and the primitivity test are read off.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

from .errors import NonIntegralError, ShapeError, UnspecifiedIntersection


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not matrix entries")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"exact entries only (int, Fraction or 'p/q' string), got {type(x).__name__}")


@dataclass(frozen=True)
class ExactMatrix:
    """Immutable dense matrix of exact rationals."""

    rows: int
    cols: int
    entries: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ShapeError(f"entry table does not match declared shape {self.rows}x{self.cols}")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable], cols: int | None = None) -> "ExactMatrix":
        table = tuple(tuple(_frac(x) for x in r) for r in rows)
        if cols is None:
            if not table:
                raise ShapeError("column count is ambiguous for an empty row list; pass cols=")
            cols = len(table[0])
        return cls(len(table), cols, table)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int | None = None) -> "ExactMatrix":
        columns = [list(c) for c in columns]
        if rows is None:
            if not columns:
                raise ShapeError("row count is ambiguous for an empty column list; pass rows=")
            rows = len(columns[0])
        if any(len(c) != rows for c in columns):
            raise ShapeError("columns have unequal lengths")
        return cls.from_rows(([c[i] for c in columns] for i in range(rows)), cols=len(columns))

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls.from_rows(([int(i == j) for j in range(n)] for i in range(n)), cols=n)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "ExactMatrix":
        return cls.from_rows(([0] * cols for _ in range(rows)), cols=cols)

    @classmethod
    def vstack(cls, blocks: Sequence["ExactMatrix"], cols: int | None = None) -> "ExactMatrix":
        if not blocks:
            return cls.zeros(0, cols or 0)
        widths = {b.cols for b in blocks}
        if len(widths) != 1:
            raise ShapeError(f"cannot stack blocks of widths {sorted(widths)}")
        return cls.from_rows([r for b in blocks for r in b.entries], cols=blocks[0].cols)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def is_integral(self) -> bool:
        return all(x.denominator == 1 for r in self.entries for x in r)

    def to_int_rows(self) -> list[list[int]]:
        if not self.is_integral:
            raise NonIntegralError("matrix has non-integral entries")
        return [[x.numerator for x in r] for r in self.entries]

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self.entries[i]

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(r[j] for r in self.entries)

    def columns(self) -> list[tuple[Fraction, ...]]:
        return [self.column(j) for j in range(self.cols)]

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix.from_rows(zip(*self.entries), cols=self.rows) if self.rows else ExactMatrix.zeros(self.cols, 0)

    @property
    def T(self) -> "ExactMatrix":
        return self.transpose()

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "ExactMatrix":
        return ExactMatrix.from_rows(([self.entries[i][j] for j in cols] for i in rows), cols=len(cols))

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        ocols = other.columns()
        return ExactMatrix.from_rows(
            ([sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in ocols] for r in self.entries),
            cols=other.cols,
        )

    def apply(self, vector: Sequence) -> tuple[Fraction, ...]:
        """Matrix times a column vector given as a plain sequence."""
        if len(vector) != self.cols:
            raise ShapeError(f"vector of length {len(vector)} for matrix with {self.cols} columns")
        v = [_frac(x) for x in vector]
        return tuple(sum((a * b for a, b in zip(r, v)), Fraction(0)) for r in self.entries)

    def _zip_with(self, other: "ExactMatrix", op) -> "ExactMatrix":
        if self.shape != other.shape:
            raise ShapeError(f"shape mismatch {self.shape} vs {other.shape}")
        return ExactMatrix.from_rows(
            ([op(a, b) for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)), cols=self.cols
        )

    def __add__(self, other):
        return self._zip_with(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._zip_with(other, lambda a, b: a - b)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "ExactMatrix":
        c = _frac(c)
        return ExactMatrix.from_rows(([c * x for x in r] for r in self.entries), cols=self.cols)

    def rank(self) -> int:
        return _echelon(self)[1]

    def det(self) -> Fraction:
        if self.rows != self.cols:
            raise ShapeError(f"determinant of non-square {self.shape} matrix")
        return _echelon(self)[2]

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in r) for r in self.entries)
        return f"ExactMatrix({self.rows}x{self.cols}: [{body}])"


def as_matrix(a) -> ExactMatrix:
    return a if isinstance(a, ExactMatrix) else ExactMatrix.from_rows(a)


def _echelon(a: ExactMatrix):
    """Row echelon over Q; returns (reduced rows, rank, determinant-if-square)."""
    m = [list(r) for r in a.entries]
    rows, cols = a.shape
    det = Fraction(1)
    rank = 0
    for c in range(cols):
        piv = next((i for i in range(rank, rows) if m[i][c] != 0), None)
        if piv is None:
            det = Fraction(0)
            continue
        if piv != rank:
            m[rank], m[piv] = m[piv], m[rank]
            det = -det
        p = m[rank][c]
        det *= p
        for i in range(rank + 1, rows):
            if m[i][c]:
                f = m[i][c] / p
                m[i] = [x - f * y for x, y in zip(m[i], m[rank])]
        rank += 1
    if rows != cols or rank < rows:
        det = Fraction(0)
    return m, rank, det


@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ source @ V == S`` with U, V unimodular and S in Smith form."""

    U: ExactMatrix
    S: ExactMatrix
    V: ExactMatrix
    source: ExactMatrix

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(int(self.S[i, i]) for i in range(min(self.S.shape)))

    @property
    def elementary_divisors(self) -> tuple[int, ...]:
        """Nonzero diagonal entries of S."""
        return tuple(d for d in self.diagonal if d)

    @property
    def rank(self) -> int:
        return len(self.elementary_divisors)


def smith_normal_form(a) -> SmithDecomposition:
    """Smith normal form with transforms, by repeated gcd pivoting."""
    a = as_matrix(a)
    s = a.to_int_rows()
    m, n = a.shape
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    v = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, k):
        s[i], s[k] = s[k], s[i]
        u[i], u[k] = u[k], u[i]

    def swap_cols(j, k):
        for r in s:
            r[j], r[k] = r[k], r[j]
        for r in v:
            r[j], r[k] = r[k], r[j]

    def add_row(dst, src, q):
        s[dst] = [x + q * y for x, y in zip(s[dst], s[src])]
        u[dst] = [x + q * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, q):
        for r in s:
            r[dst] += q * r[src]
        for r in v:
            r[dst] += q * r[src]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    x = s[i][j]
                    if x and (best is None or abs(x) < abs(s[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            swap_rows(t, best[0])
            swap_cols(t, best[1])
            p = s[t][t]
            for i in range(t + 1, m):
                if s[i][t]:
                    add_row(i, t, -(s[i][t] // p))
            for j in range(t + 1, n):
                if s[t][j]:
                    add_col(j, t, -(s[t][j] // p))
            if any(s[i][t] for i in range(t + 1, m)) or any(s[t][j] for j in range(t + 1, n)):
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if s[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if best is None:
            break
        if s[t][t] < 0:
            s[t] = [-x for x in s[t]]
            u[t] = [-x for x in u[t]]

    return SmithDecomposition(
        U=ExactMatrix.from_rows(u, cols=m),
        S=ExactMatrix.from_rows(s, cols=n),
        V=ExactMatrix.from_rows(v, cols=n),
        source=a,
    )


def hermite_normal_form(a) -> ExactMatrix:
    """Row-style Hermite normal form of the lattice spanned by the rows of ``a``.

    Zero rows are dropped, so the result is a basis.  Two integer matrices
    span the same row lattice iff their HNFs are equal.
    """
    a = as_matrix(a)
    rows = a.to_int_rows()
    m = len(rows)
    n = a.cols
    pr = 0
    for c in range(n):
        while True:
            nz = [i for i in range(pr, m) if rows[i][c]]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(rows[i][c]))
            rows[pr], rows[i0] = rows[i0], rows[pr]
            clean = True
            for i in range(pr + 1, m):
                if rows[i][c]:
                    q = rows[i][c] // rows[pr][c]
                    rows[i] = [x - q * y for x, y in zip(rows[i], rows[pr])]
                    clean = clean and rows[i][c] == 0
            if clean:
                break
        if pr < m and rows[pr][c]:
            if rows[pr][c] < 0:
                rows[pr] = [-x for x in rows[pr]]
            for i in range(pr):
                q = rows[i][c] // rows[pr][c]
                if q:
                    rows[i] = [x - q * y for x, y in zip(rows[i], rows[pr])]
            pr += 1
    return ExactMatrix.from_rows(rows[:pr], cols=n)


def integer_kernel_basis(a) -> ExactMatrix:
    """Columns form a basis of the integer kernel ``{x in Z^n : a x = 0}``.

    The basis comes from the trailing columns of the right Smith transform,
    which makes it saturated; it is then put in Hermite form for stable output.
    """
    a = as_matrix(a)
    dec = smith_normal_form(a)
    n = a.cols
    raw = [list(dec.V.column(j)) for j in range(dec.rank, n)]
    if not raw:
        return ExactMatrix.zeros(n, 0)
    return hermite_normal_form(ExactMatrix.from_rows(raw, cols=n)).transpose()


def integer_solve(a, b: Sequence) -> tuple[int, ...] | None:
    """An integer x with ``a x = b``, or None when no integer solution exists."""
    a = as_matrix(a)
    if len(b) != a.rows:
        raise ShapeError(f"right-hand side of length {len(b)} for {a.rows} rows")
    bf = [_frac(x) for x in b]
    if any(x.denominator != 1 for x in bf):
        return None
    dec = smith_normal_form(a)
    ub = dec.U.apply(bf)
    y = [0] * a.cols
    for i, x in enumerate(ub):
        d = dec.diagonal[i] if i < len(dec.diagonal) else 0
        if d == 0:
            if x != 0:
                return None
        else:
            if x.numerator % d:
                return None
            y[i] = x.numerator // d
    return tuple(int(x) for x in dec.V.apply(y))


class EmbeddingVerdict(NamedTuple):
    injective: bool
    primitive: bool
    elementary_divisors: tuple[int, ...]


def is_injective_primitive(a) -> EmbeddingVerdict:
    """Treat ``a`` as a map Z^cols -> Z^rows; primitive means torsion-free cokernel.

    ``elementary_divisors`` is the full Smith diagonal, zeros trailing.
    """
    a = as_matrix(a)
    dec = smith_normal_form(a)
    injective = dec.rank == a.cols
    primitive = injective and all(d == 1 for d in dec.elementary_divisors)
    return EmbeddingVerdict(injective, primitive, dec.diagonal)


def is_unimodular(m) -> bool:
    m = as_matrix(m)
    if m.rows != m.cols:
        raise ShapeError(f"unimodularity needs a square matrix, got {m.shape}")
    if not m.is_integral:
        raise NonIntegralError("unimodularity is defined for integral matrices")
    return abs(m.det()) == 1


def _symmetric3(t) -> bool:
    n = len(t)
    for i, j, k in itertools.product(range(n), repeat=3):
        x = t[i][j][k]
        for p in ((i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)):
            if t[p[0]][p[1]][p[2]] != x:
                return False
    return True


@dataclass(frozen=True)
class Lattice:
    """A free Z-module with named basis and optional bilinear/trilinear forms.

    Trilinear entries are exact rationals, or ``None`` where the value is
    deliberately left unspecified; evaluating a product that needs such an
    entry raises :class:`UnspecifiedIntersection`.
    """

    rank: int
    labels: tuple[str, ...]
    bilinear: ExactMatrix | None = None
    trilinear: tuple[tuple[tuple[Fraction | None, ...], ...], ...] | None = field(default=None, repr=False)

    def __post_init__(self):
        if len(self.labels) != self.rank:
            raise ShapeError(f"{len(self.labels)} labels for rank {self.rank}")
        if self.bilinear is not None:
            if self.bilinear.shape != (self.rank, self.rank):
                raise ShapeError("bilinear form has the wrong size")
            if self.bilinear != self.bilinear.transpose():
                raise ValueError("bilinear form must be symmetric")
        if self.trilinear is not None:
            t = self.trilinear
            if len(t) != self.rank or any(len(r) != self.rank or any(len(c) != self.rank for c in r) for r in t):
                raise ShapeError("trilinear form has the wrong size")
            if not _symmetric3(t):
                raise ValueError("trilinear form must be symmetric under index permutation")

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def pair(self, x: Sequence, y: Sequence) -> Fraction:
        if self.bilinear is None:
            raise ValueError("lattice carries no bilinear form")
        return sum((_frac(a) * _frac(b) * self.bilinear[i, j]
                    for i, a in enumerate(x) if a
                    for j, b in enumerate(y) if b), Fraction(0))

    def triple(self, x: Sequence, y: Sequence, z: Sequence) -> Fraction:
        if self.trilinear is None:
            raise ValueError("lattice carries no trilinear form")
        for v in (x, y, z):
            if len(v) != self.rank:
                raise ShapeError(f"coordinate vector of length {len(v)} for rank {self.rank}")
        total = Fraction(0)
        for i, a in enumerate(x):
            if not a:
                continue
            for j, b in enumerate(y):
                if not b:
                    continue
                for k, c in enumerate(z):
                    if not c:
                        continue
                    t = self.trilinear[i][j][k]
                    if t is None:
                        raise UnspecifiedIntersection(
                            f"{self.labels[i]}*{self.labels[j]}*{self.labels[k]} is not specified"
                        )
                    total += _frac(a) * _frac(b) * _frac(c) * t
        return total

    def cube(self, x: Sequence) -> Fraction:
        return self.triple(x, x, x)
