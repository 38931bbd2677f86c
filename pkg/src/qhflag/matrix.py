"""Sparse matrices with exact polynomial entries.

Entries are stored in a dict keyed by (row, col); absent entries are zero.
Everything the pipeline manipulates (connection forms, gauge factors, change
of basis) is small and sparse, so no dense storage is ever used.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Mapping, Optional, Union

from .poly import Poly, Scalar


class PolyMatrix:
    """Immutable sparse matrix over Poly."""

    __slots__ = ("nrows", "ncols", "entries")

    def __init__(
        self,
        nrows: int,
        ncols: int,
        entries: Optional[Mapping[tuple[int, int], Union[Poly, Scalar]]] = None,
    ):
        clean: dict[tuple[int, int], Poly] = {}
        if entries:
            for (i, j), v in entries.items():
                if not (0 <= i < nrows and 0 <= j < ncols):
                    raise IndexError(f"entry ({i},{j}) outside {nrows}x{ncols}")
                p = v if isinstance(v, Poly) else Poly.rational(v)
                if p:
                    clean[(i, j)] = p
        object.__setattr__(self, "nrows", nrows)
        object.__setattr__(self, "ncols", ncols)
        object.__setattr__(self, "entries", clean)

    def __setattr__(self, name, value):
        raise AttributeError("PolyMatrix is immutable")

    @staticmethod
    def zero(nrows: int, ncols: int) -> "PolyMatrix":
        return PolyMatrix(nrows, ncols)

    @staticmethod
    def identity(n: int) -> "PolyMatrix":
        return PolyMatrix(n, n, {(i, i): Poly.one() for i in range(n)})

    def __getitem__(self, key: tuple[int, int]) -> Poly:
        i, j = key
        if not (0 <= i < self.nrows and 0 <= j < self.ncols):
            raise IndexError(key)
        return self.entries.get((i, j), Poly.zero())

    def is_zero(self) -> bool:
        return not self.entries

    def __bool__(self) -> bool:
        return bool(self.entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return (
            self.nrows == other.nrows
            and self.ncols == other.ncols
            and self.entries == other.entries
        )

    __hash__ = None  # type: ignore[assignment]

    def _check_shape(self, other: "PolyMatrix") -> None:
        if self.nrows != other.nrows or self.ncols != other.ncols:
            raise ValueError("shape mismatch")

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        self._check_shape(other)
        out = dict(self.entries)
        for k, v in other.entries.items():
            s = out.get(k)
            p = v if s is None else s + v
            if p:
                out[k] = p
            else:
                out.pop(k, None)
        return _raw(self.nrows, self.ncols, out)

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        self._check_shape(other)
        out = dict(self.entries)
        for k, v in other.entries.items():
            s = out.get(k)
            p = -v if s is None else s - v
            if p:
                out[k] = p
            else:
                out.pop(k, None)
        return _raw(self.nrows, self.ncols, out)

    def __neg__(self) -> "PolyMatrix":
        return _raw(self.nrows, self.ncols, {k: -v for k, v in self.entries.items()})

    def scale(self, c: Union[Poly, Scalar]) -> "PolyMatrix":
        p = c if isinstance(c, Poly) else Poly.rational(c)
        if not p:
            return PolyMatrix.zero(self.nrows, self.ncols)
        out = {k: v * p for k, v in self.entries.items()}
        return _raw(self.nrows, self.ncols, {k: v for k, v in out.items() if v})

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch in product")
        rows_of_other: dict[int, list[tuple[int, Poly]]] = {}
        for (k, j), v in other.entries.items():
            rows_of_other.setdefault(k, []).append((j, v))
        out: dict[tuple[int, int], Poly] = {}
        for (i, k), a in self.entries.items():
            row = rows_of_other.get(k)
            if row is None:
                continue
            for j, b in row:
                key = (i, j)
                p = a * b
                s = out.get(key)
                p = p if s is None else s + p
                if p:
                    out[key] = p
                else:
                    out.pop(key, None)
        return _raw(self.nrows, other.ncols, out)

    def __mul__(self, other):
        if isinstance(other, PolyMatrix):
            return self.__matmul__(other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def column(self, j: int) -> list[Poly]:
        return [self[i, j] for i in range(self.nrows)]

    def apply_to_vector(self, vec: list[Poly]) -> list[Poly]:
        if len(vec) != self.ncols:
            raise ValueError("vector length mismatch")
        out = [Poly.zero()] * self.nrows
        for (i, j), a in self.entries.items():
            if vec[j]:
                out[i] = out[i] + a * vec[j]
        return out

    def commutator(self, other: "PolyMatrix") -> "PolyMatrix":
        return self @ other - other @ self

    def map_entries(self, fn: Callable[[Poly], Poly]) -> "PolyMatrix":
        out = {}
        for k, v in self.entries.items():
            p = fn(v)
            if p:
                out[k] = p
        return _raw(self.nrows, self.ncols, out)

    def t_derivative(self, i: int) -> "PolyMatrix":
        return self.map_entries(lambda p: p.t_derivative(i))

    def substitute(self, bindings) -> "PolyMatrix":
        return self.map_entries(lambda p: p.substitute(bindings))

    def transpose(self) -> "PolyMatrix":
        return _raw(
            self.ncols, self.nrows, {(j, i): v for (i, j), v in self.entries.items()}
        )

    def is_constant(self) -> bool:
        return all(not v.variables() for v in self.entries.values())

    def rational_entries(self) -> list[list[Fraction]]:
        """Dense Fraction matrix; entries must be constant."""
        out = [[Fraction(0)] * self.ncols for _ in range(self.nrows)]
        for (i, j), v in self.entries.items():
            if v.variables():
                raise ValueError(f"entry ({i},{j}) is not constant: {v}")
            out[i][j] = v.constant_term()
        return out

    def __str__(self) -> str:
        rows = []
        for i in range(self.nrows):
            rows.append("[" + ", ".join(str(self[i, j]) for j in range(self.ncols)) + "]")
        return "[" + ",\n ".join(rows) + "]"

    def __repr__(self) -> str:
        return f"PolyMatrix({self.nrows}x{self.ncols}, {len(self.entries)} nonzero)"

    def to_json(self) -> dict:
        return {
            "nrows": self.nrows,
            "ncols": self.ncols,
            "entries": [
                [i, j, str(v)] for (i, j), v in sorted(self.entries.items())
            ],
        }

    @staticmethod
    def from_json(data: dict) -> "PolyMatrix":
        from .poly import parse_poly

        return PolyMatrix(
            data["nrows"],
            data["ncols"],
            {(int(i), int(j)): parse_poly(s) for i, j, s in data["entries"]},
        )


def _raw(nrows: int, ncols: int, entries: dict[tuple[int, int], Poly]) -> PolyMatrix:
    m = PolyMatrix.__new__(PolyMatrix)
    object.__setattr__(m, "nrows", nrows)
    object.__setattr__(m, "ncols", ncols)
    object.__setattr__(m, "entries", entries)
    return m


def from_rows(rows: Iterable[Iterable[Union[Poly, Scalar]]]) -> PolyMatrix:
    rows = [list(r) for r in rows]
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    entries = {}
    for i, row in enumerate(rows):
        if len(row) != ncols:
            raise ValueError("ragged rows")
        for j, v in enumerate(row):
            entries[(i, j)] = v if isinstance(v, Poly) else Poly.rational(v)
    return PolyMatrix(nrows, ncols, entries)


def invert_unipotent(m: PolyMatrix, nilpotency_bound: Optional[int] = None) -> PolyMatrix:
    """Invert I + N with N nilpotent, via the finite geometric series.

    Raises if the series fails to terminate (m was not unipotent).
    """
    if m.nrows != m.ncols:
        raise ValueError("not square")
    n = m.nrows
    ident = PolyMatrix.identity(n)
    nil = m - ident
    bound = nilpotency_bound if nilpotency_bound is not None else n + 1
    result = ident
    power = ident
    for k in range(1, bound + 1):
        power = power @ nil
        if power.is_zero():
            return result
        result = result + (power if k % 2 == 0 else -power)
    raise ValueError("matrix is not unipotent (nilpotent part does not vanish)")


def invert_constant(m: PolyMatrix) -> PolyMatrix:
    """Exact inverse of a constant (rational-entry) matrix by elimination."""
    if m.nrows != m.ncols:
        raise ValueError("not square")
    n = m.nrows
    a = m.rational_entries()
    inv = [[Fraction(1) if i == j else Fraction(0) for j in range(n)] for i in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col]), None)
        if pivot is None:
            raise ValueError("matrix is singular")
        a[col], a[pivot] = a[pivot], a[col]
        inv[col], inv[pivot] = inv[pivot], inv[col]
        p = a[col][col]
        a[col] = [v / p for v in a[col]]
        inv[col] = [v / p for v in inv[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
                inv[r] = [v - f * w for v, w in zip(inv[r], inv[col])]
    return PolyMatrix(
        n, n, {(i, j): inv[i][j] for i in range(n) for j in range(n) if inv[i][j]}
    )
