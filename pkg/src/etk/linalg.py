"""Exact rational linear algebra.

Everything here works over ``fractions.Fraction`` with unbounded integers.
Row reduction runs fraction-free on sparse integer rows and only converts
to fractions when the reduced row echelon form is read out, so results are
canonical and bit-reproducible.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

Rational = Fraction

__all__ = [
    "Rational",
    "RatMatrix",
    "Subspace",
    "as_rational",
    "format_rational",
    "parse_rational",
    "rref",
    "kernel",
    "intersect",
    "contains",
    "coset_reduce",
]


def as_rational(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings; floats are refused."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"cannot use {type(x).__name__} as an exact rational")


def parse_rational(s: str | int) -> Fraction:
    if isinstance(s, int) and not isinstance(s, bool):
        return Fraction(s)
    if not isinstance(s, str):
        raise TypeError(f"expected int or 'p/q' string, got {type(s).__name__}")
    text = s.strip()
    if not text or any(ch in text for ch in ".eE"):
        raise ValueError(f"not an exact rational: {s!r}")
    return Fraction(text)


def format_rational(x: Fraction) -> int | str:
    """JSON form: integers stay numbers, everything else becomes ``"p/q"``."""
    x = as_rational(x)
    if x.denominator == 1:
        return x.numerator
    return f"{x.numerator}/{x.denominator}"


class RatMatrix:
    """Dense immutable matrix of Fractions."""

    __slots__ = ("_data", "rows", "cols")

    def __init__(self, data: Iterable[Iterable], cols: int | None = None):
        rows = tuple(tuple(as_rational(x) for x in row) for row in data)
        if rows:
            width = len(rows[0])
            if any(len(r) != width for r in rows):
                raise ValueError("ragged matrix rows")
        else:
            width = cols or 0
        if cols is not None and width != cols:
            raise ValueError(f"expected {cols} columns, got {width}")
        self._data = rows
        self.rows = len(rows)
        self.cols = width

    @classmethod
    def zeros(cls, rows: int, cols: int) -> RatMatrix:
        return cls([[0] * cols for _ in range(rows)], cols=cols)

    @classmethod
    def identity(cls, n: int) -> RatMatrix:
        return cls([[int(i == j) for j in range(n)] for i in range(n)], cols=n)

    @classmethod
    def unit(cls, n: int, i: int, j: int) -> RatMatrix:
        """Elementary matrix E_ij."""
        return cls([[int(r == i and c == j) for c in range(n)] for r in range(n)], cols=n)

    @classmethod
    def diag(cls, entries: Sequence) -> RatMatrix:
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)], cols=n)

    @classmethod
    def from_flat(cls, rows: int, cols: int, entries: Sequence) -> RatMatrix:
        if len(entries) != rows * cols:
            raise ValueError("entries length must equal rows * cols")
        return cls([entries[i * cols:(i + 1) * cols] for i in range(rows)], cols=cols)

    @property
    def entries(self) -> tuple[Fraction, ...]:
        return tuple(x for row in self._data for x in row)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def T(self) -> RatMatrix:
        return RatMatrix(zip(*self._data), cols=self.rows) if self.rows else RatMatrix.zeros(self.cols, 0)

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self._data[i]

    def tolist(self) -> list[list[Fraction]]:
        return [list(r) for r in self._data]

    def vectorize(self) -> tuple[Fraction, ...]:
        """Row-major flattening, the layout used for gl(n) coordinates."""
        return self.entries

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self._data[i][j]

    def __iter__(self):
        return iter(self._data)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatMatrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self) -> int:
        return hash((self.shape, self._data))

    def __repr__(self) -> str:
        body = ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self._data)
        return f"RatMatrix([{body}])"

    def _check_same_shape(self, other: RatMatrix) -> None:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: RatMatrix) -> RatMatrix:
        self._check_same_shape(other)
        return RatMatrix(([a + b for a, b in zip(r, s)] for r, s in zip(self, other)), cols=self.cols)

    def __sub__(self, other: RatMatrix) -> RatMatrix:
        self._check_same_shape(other)
        return RatMatrix(([a - b for a, b in zip(r, s)] for r, s in zip(self, other)), cols=self.cols)

    def __neg__(self) -> RatMatrix:
        return RatMatrix(([-a for a in r] for r in self), cols=self.cols)

    def scale(self, c) -> RatMatrix:
        c = as_rational(c)
        return RatMatrix(([c * a for a in r] for r in self), cols=self.cols)

    def __matmul__(self, other: RatMatrix) -> RatMatrix:
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        other_cols = list(zip(*other._data))
        return RatMatrix(
            ([sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in other_cols] for r in self),
            cols=other.cols,
        )

    def apply(self, v: Sequence) -> tuple[Fraction, ...]:
        if len(v) != self.cols:
            raise ValueError(f"vector of length {len(v)} for matrix with {self.cols} columns")
        v = [as_rational(x) for x in v]
        return tuple(sum((a * b for a, b in zip(r, v)), Fraction(0)) for r in self)

    def is_zero(self) -> bool:
        return all(x == 0 for r in self for x in r)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def det(self) -> Fraction:
        if not self.is_square():
            raise ValueError("determinant of a non-square matrix")
        a = self.tolist()
        n = self.rows
        det = Fraction(1)
        for c in range(n):
            p = next((r for r in range(c, n) if a[r][c] != 0), None)
            if p is None:
                return Fraction(0)
            if p != c:
                a[c], a[p] = a[p], a[c]
                det = -det
            det *= a[c][c]
            for r in range(c + 1, n):
                f = a[r][c] / a[c][c]
                if f:
                    a[r] = [x - f * y for x, y in zip(a[r], a[c])]
        return det

    def inverse(self) -> RatMatrix:
        if not self.is_square():
            raise ValueError("inverse of a non-square matrix")
        n = self.rows
        aug = RatMatrix([list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(self)])
        red, pivots, rank = rref(aug)
        if pivots[:n] != list(range(n)) or rank < n:
            raise ZeroDivisionError("matrix is singular")
        return RatMatrix((red.row(i)[n:] for i in range(n)), cols=n)


def commutator(a: RatMatrix, b: RatMatrix) -> RatMatrix:
    return a @ b - b @ a


# -- sparse fraction-free elimination ------------------------------------------------

def _integer_row(values: Iterable[tuple[int, Fraction]]) -> dict[int, int]:
    """Scale a sparse rational row to a primitive integer row."""
    items = [(k, as_rational(v)) for k, v in values if v != 0]
    if not items:
        return {}
    den = 1
    for _, v in items:
        den = lcm(den, v.denominator)
    return _primitive({k: int(v * den) for k, v in items})


def _primitive(row: dict[int, int]) -> dict[int, int]:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            break
    if row[min(row)] < 0:
        g = -g
    if g != 1:
        row = {k: v // g for k, v in row.items()}
    return row


class _Echelon:
    """Incremental row echelon form over the integers.

    Pivot rows are primitive, have a positive leading entry at their pivot
    column and are zero to its left.
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.pivots: dict[int, dict[int, int]] = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def add(self, row: dict[int, int]) -> bool:
        r = row
        pivots = self.pivots
        while r:
            c = min(r)
            p = pivots.get(c)
            if p is None:
                pivots[c] = _primitive(r)
                return True
            a, b = p[c], r[c]
            g = gcd(a, b)
            a //= g
            b //= g
            new = {k: a * v for k, v in r.items()} if a != 1 else dict(r)
            for k, v in p.items():
                x = new.get(k, 0) - b * v
                if x:
                    new[k] = x
                else:
                    new.pop(k, None)
            r = _primitive(new) if new else new
        return False

    def reduced(self) -> list[tuple[int, dict[int, Fraction]]]:
        """Reduced row echelon form as ``(pivot, sparse row)`` pairs, pivot ascending."""
        order = sorted(self.pivots)
        done: dict[int, dict[int, int]] = {}
        for c in reversed(order):
            r = self.pivots[c]
            hits = [k for k in r if k != c and k in done]
            for k in hits:
                q = done[k]
                if k not in r:
                    continue
                a, b = q[k], r[k]
                g = gcd(a, b)
                a //= g
                b //= g
                new = {j: a * v for j, v in r.items()} if a != 1 else dict(r)
                for j, v in q.items():
                    x = new.get(j, 0) - b * v
                    if x:
                        new[j] = x
                    else:
                        new.pop(j, None)
                r = _primitive(new)
            done[c] = r
        out = []
        for c in order:
            r = done[c]
            lead = r[c]
            out.append((c, {k: Fraction(v, lead) for k, v in sorted(r.items())}))
        return out


def _reduce_rows(rows: Iterable[dict[int, int]], ncols: int) -> list[tuple[int, dict[int, Fraction]]]:
    ech = _Echelon(ncols)
    for r in rows:
        if r:
            ech.add(r)
    return ech.reduced()


def _kernel_vectors(reduced: list[tuple[int, dict[int, Fraction]]], ncols: int) -> list[dict[int, Fraction]]:
    pivot_set = {c for c, _ in reduced}
    free = [f for f in range(ncols) if f not in pivot_set]
    column_hits: dict[int, list[tuple[int, Fraction]]] = {f: [] for f in free}
    for c, r in reduced:
        for k, v in r.items():
            if k != c:
                column_hits[k].append((c, v))
    vecs = []
    for f in free:
        v = {f: Fraction(1)}
        for c, val in column_hits[f]:
            v[c] = -val
        vecs.append(v)
    return vecs


def _dense(row: dict[int, Fraction], ncols: int) -> tuple[Fraction, ...]:
    out = [Fraction(0)] * ncols
    for k, v in row.items():
        out[k] = v
    return tuple(out)


# -- public operations ---------------------------------------------------------------

def rref(m: RatMatrix) -> tuple[RatMatrix, list[int], int]:
    """Reduced row echelon form, pivot columns and rank.

    The result keeps the shape of ``m``; zero rows sit at the bottom.
    """
    red = _reduce_rows((_integer_row(enumerate(r)) for r in m), m.cols)
    rows = [_dense(r, m.cols) for _, r in red]
    rows += [(Fraction(0),) * m.cols] * (m.rows - len(rows))
    return RatMatrix(rows, cols=m.cols), [c for c, _ in red], len(red)


class Subspace:
    """Linear subspace of Q^d stored by its canonical RREF basis.

    Two subspaces are equal exactly when their stored bases agree entry by
    entry, so ``==`` is set equality.
    """

    __slots__ = ("ambient_dim", "_rows", "pivots")

    def __init__(self, ambient_dim: int, reduced: list[tuple[int, dict[int, Fraction]]]):
        self.ambient_dim = ambient_dim
        self.pivots = tuple(c for c, _ in reduced)
        self._rows = tuple(r for _, r in reduced)

    @classmethod
    def span(cls, vectors: Iterable[Sequence], ambient_dim: int) -> Subspace:
        rows = []
        for v in vectors:
            if len(v) != ambient_dim:
                raise ValueError(f"vector of length {len(v)} in ambient dimension {ambient_dim}")
            rows.append(_integer_row(enumerate(v)))
        return cls(ambient_dim, _reduce_rows(rows, ambient_dim))

    @classmethod
    def _from_sparse(cls, vectors: Iterable[dict[int, Fraction]], ambient_dim: int) -> Subspace:
        rows = (_integer_row(v.items()) for v in vectors)
        return cls(ambient_dim, _reduce_rows(rows, ambient_dim))

    @classmethod
    def zero(cls, ambient_dim: int) -> Subspace:
        return cls(ambient_dim, [])

    @classmethod
    def full(cls, ambient_dim: int) -> Subspace:
        return cls(ambient_dim, [(i, {i: Fraction(1)}) for i in range(ambient_dim)])

    @property
    def dim(self) -> int:
        return len(self._rows)

    @property
    def basis(self) -> RatMatrix:
        return RatMatrix((_dense(r, self.ambient_dim) for r in self._rows), cols=self.ambient_dim)

    def vectors(self) -> list[tuple[Fraction, ...]]:
        return [_dense(r, self.ambient_dim) for r in self._rows]

    def sparse_vectors(self) -> list[dict[int, Fraction]]:
        return [dict(r) for r in self._rows]

    def combine(self, coefficients: Sequence) -> tuple[Fraction, ...]:
        """Linear combination of the canonical basis vectors."""
        if len(coefficients) != self.dim:
            raise ValueError("one coefficient per basis vector required")
        out = [Fraction(0)] * self.ambient_dim
        for c, r in zip(coefficients, self._rows):
            c = as_rational(c)
            if c:
                for k, v in r.items():
                    out[k] += c * v
        return tuple(out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self._rows == other._rows

    def __hash__(self) -> int:
        return hash((self.ambient_dim, tuple(tuple(sorted(r.items())) for r in self._rows)))

    def __repr__(self) -> str:
        return f"Subspace(ambient_dim={self.ambient_dim}, dim={self.dim})"

    def __contains__(self, v) -> bool:
        return contains(self, v)

    def _reduce_sparse(self, v: dict[int, Fraction]) -> dict[int, Fraction]:
        v = dict(v)
        for p, r in zip(self.pivots, self._rows):
            c = v.get(p)
            if c:
                for k, x in r.items():
                    y = v.get(k, 0) - c * x
                    if y:
                        v[k] = y
                    else:
                        v.pop(k, None)
        return v

    def is_subspace_of(self, other: Subspace) -> bool:
        if self.ambient_dim != other.ambient_dim:
            raise ValueError("ambient dimension mismatch")
        return all(not other._reduce_sparse(r) for r in self._rows)


def kernel(m: RatMatrix) -> Subspace:
    """Null space {v : m v = 0} in canonical form."""
    red = _reduce_rows((_integer_row(enumerate(r)) for r in m), m.cols)
    return Subspace._from_sparse(_kernel_vectors(red, m.cols), m.cols)


def _kernel_of_rows(rows: Iterable[dict[int, int]], ncols: int) -> Subspace:
    """Kernel of a system given as sparse primitive integer rows."""
    red = _reduce_rows(rows, ncols)
    return Subspace._from_sparse(_kernel_vectors(red, ncols), ncols)


def _check_dim(s: Subspace, v: Sequence) -> None:
    if len(v) != s.ambient_dim:
        raise ValueError(f"vector of length {len(v)} against ambient dimension {s.ambient_dim}")


def coset_reduce(v: Sequence, s: Subspace) -> tuple[Fraction, ...]:
    """Canonical representative of v + s: zero at every pivot column of s."""
    _check_dim(s, v)
    sparse = {k: as_rational(x) for k, x in enumerate(v) if x != 0}
    return _dense(s._reduce_sparse(sparse), s.ambient_dim)


def contains(s: Subspace, v: Sequence) -> bool:
    _check_dim(s, v)
    sparse = {k: as_rational(x) for k, x in enumerate(v) if x != 0}
    return not s._reduce_sparse(sparse)


def intersect(a: Subspace, b: Subspace) -> Subspace:
    if a.ambient_dim != b.ambient_dim:
        raise ValueError(f"ambient dimension mismatch: {a.ambient_dim} vs {b.ambient_dim}")
    if b.dim == b.ambient_dim:
        return a
    # c is admissible iff sum_k c_k a_k reduces to zero modulo b
    residues = [b._reduce_sparse(r) for r in a._rows]
    eqs: dict[int, dict[int, Fraction]] = {}
    for k, res in enumerate(residues):
        for q, x in res.items():
            eqs.setdefault(q, {})[k] = x
    coeffs = _kernel_of_rows((_integer_row(e.items()) for e in eqs.values()), a.dim)
    vecs = []
    for c in coeffs.vectors():
        out: dict[int, Fraction] = {}
        for ck, r in zip(c, a._rows):
            if ck:
                for k, x in r.items():
                    out[k] = out.get(k, 0) + ck * x
        vecs.append(out)
    return Subspace._from_sparse(vecs, a.ambient_dim)
