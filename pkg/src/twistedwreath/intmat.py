"""Exact integer matrix algebra: determinants, Smith normal form, affine orbits.

Everything here runs on plain Python ints, so no intermediate value can
overflow regardless of matrix size or entry growth.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from .errors import InputError

Vector = tuple[int, ...]


class _Infinite:
    """Singleton marking a countably infinite answer (e.g. cokernel order)."""

    _instance = None

    def __new__(cls) -> "_Infinite":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITE"


INFINITE = _Infinite()

ExtNat = Union[int, _Infinite]


def vec_add(a: Vector, b: Vector) -> Vector:
    return tuple(x + y for x, y in zip(a, b, strict=True))


def vec_sub(a: Vector, b: Vector) -> Vector:
    return tuple(x - y for x, y in zip(a, b, strict=True))


def vec_neg(a: Vector) -> Vector:
    return tuple(-x for x in a)


def vec_scale(c: int, a: Vector) -> Vector:
    return tuple(c * x for x in a)


@dataclass(frozen=True)
class IntMatrix:
    """A square integer matrix stored as a tuple of row tuples."""

    rows: tuple[Vector, ...]

    def __post_init__(self) -> None:
        k = len(self.rows)
        if k == 0:
            raise InputError("matrix must have at least one row")
        for row in self.rows:
            if len(row) != k:
                raise InputError(f"matrix is not square: {k} rows, row of length {len(row)}")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]]) -> "IntMatrix":
        return cls(tuple(tuple(int(x) for x in row) for row in rows))

    @classmethod
    def identity(cls, k: int) -> "IntMatrix":
        return cls(tuple(tuple(int(i == j) for j in range(k)) for i in range(k)))

    @classmethod
    def zero(cls, k: int) -> "IntMatrix":
        return cls(tuple((0,) * k for _ in range(k)))

    @classmethod
    def parse(cls, text: str) -> "IntMatrix":
        """Parse the row-major text form, e.g. ``"0,1;-1,-1"``."""
        rows = []
        for r, row_text in enumerate(text.strip().split(";")):
            entries = []
            for c, cell in enumerate(row_text.split(",")):
                cell = cell.strip()
                try:
                    entries.append(int(cell))
                except ValueError:
                    raise InputError(
                        f"bad matrix entry {cell!r} at row {r + 1}, column {c + 1}"
                    ) from None
            rows.append(tuple(entries))
        width = len(rows[0])
        if any(len(row) != width for row in rows):
            raise InputError("matrix rows have unequal lengths")
        if len(rows) != width:
            raise InputError(f"matrix is not square: {len(rows)} rows of width {width}")
        return cls(tuple(rows))

    @property
    def k(self) -> int:
        return len(self.rows)

    def format(self) -> str:
        return ";".join(",".join(str(x) for x in row) for row in self.rows)

    def __str__(self) -> str:
        return self.format()

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        return IntMatrix(tuple(vec_add(a, b) for a, b in zip(self.rows, other.rows, strict=True)))

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return IntMatrix(tuple(vec_sub(a, b) for a, b in zip(self.rows, other.rows, strict=True)))

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(tuple(vec_neg(row) for row in self.rows))

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.k != other.k:
            raise InputError(f"size mismatch: {self.k} vs {other.k}")
        cols = tuple(zip(*other.rows))
        return IntMatrix(
            tuple(
                tuple(sum(a * b for a, b in zip(row, col)) for col in cols)
                for row in self.rows
            )
        )

    def __pow__(self, n: int) -> "IntMatrix":
        if n < 0:
            raise InputError("negative matrix powers are not defined here")
        result = IntMatrix.identity(self.k)
        base = self
        while n:
            if n & 1:
                result = result @ base
            base = base @ base
            n >>= 1
        return result

    def apply(self, v: Sequence[int]) -> Vector:
        if len(v) != self.k:
            raise InputError(f"vector length {len(v)} does not match matrix size {self.k}")
        return tuple(sum(a * b for a, b in zip(row, v)) for row in self.rows)

    def det(self) -> int:
        """Exact determinant by fraction-free (Bareiss) elimination."""
        n = self.k
        m = [list(row) for row in self.rows]
        sign = 1
        prev = 1
        for i in range(n - 1):
            if m[i][i] == 0:
                for r in range(i + 1, n):
                    if m[r][i] != 0:
                        m[i], m[r] = m[r], m[i]
                        sign = -sign
                        break
                else:
                    return 0
            for r in range(i + 1, n):
                for c in range(i + 1, n):
                    # the division is exact: Bareiss' identity
                    m[r][c] = (m[r][c] * m[i][i] - m[r][i] * m[i][c]) // prev
                m[r][i] = 0
            prev = m[i][i]
        return sign * m[n - 1][n - 1]

    def is_identity(self) -> bool:
        return self == IntMatrix.identity(self.k)


@dataclass(frozen=True)
class SnfResult:
    """Smith normal form ``u @ m @ v == s`` with unimodular ``u``, ``v``.

    The diagonal of ``s`` is nonnegative and each entry divides the next.
    """

    s: IntMatrix
    u: IntMatrix
    v: IntMatrix

    @property
    def diagonal(self) -> Vector:
        return tuple(self.s.rows[i][i] for i in range(self.s.k))


def _min_abs_pivot(a: list[list[int]], s: int, k: int) -> Optional[tuple[int, int]]:
    """Smallest-absolute-value nonzero entry of the trailing block, earliest wins ties."""
    best = None
    best_abs = None
    for i in range(s, k):
        for j in range(s, k):
            x = a[i][j]
            if x and (best_abs is None or abs(x) < best_abs):
                best = (i, j)
                best_abs = abs(x)
    return best


def smith_normal_form(m: IntMatrix) -> SnfResult:
    """Smith normal form with recorded row and column transforms.

    Pivot selection and elimination order are fixed (smallest absolute value,
    rows cleared before columns), so the output is deterministic.
    """
    k = m.k
    a = [list(row) for row in m.rows]
    u = [[int(i == j) for j in range(k)] for i in range(k)]
    v = [[int(i == j) for j in range(k)] for i in range(k)]

    def row_op(mat: list[list[int]], dst: int, src: int, q: int) -> None:
        mat[dst] = [x - q * y for x, y in zip(mat[dst], mat[src])]

    def col_op(mat: list[list[int]], dst: int, src: int, q: int) -> None:
        for row in mat:
            row[dst] -= q * row[src]

    for s in range(k):
        while True:
            piv = _min_abs_pivot(a, s, k)
            if piv is None:
                break
            pi, pj = piv
            if pi != s:
                a[s], a[pi] = a[pi], a[s]
                u[s], u[pi] = u[pi], u[s]
            if pj != s:
                for row in a:
                    row[s], row[pj] = row[pj], row[s]
                for row in v:
                    row[s], row[pj] = row[pj], row[s]
            d = a[s][s]
            dirty = False
            for i in range(s + 1, k):
                if a[i][s]:
                    q = a[i][s] // d
                    if q:
                        row_op(a, i, s, q)
                        row_op(u, i, s, q)
                    if a[i][s]:
                        dirty = True
            if dirty:
                continue
            for j in range(s + 1, k):
                if a[s][j]:
                    q = a[s][j] // d
                    if q:
                        col_op(a, j, s, q)
                        col_op(v, j, s, q)
                    if a[s][j]:
                        dirty = True
            if dirty:
                continue
            bad = None
            for i in range(s + 1, k):
                if any(a[i][j] % d for j in range(s + 1, k)):
                    bad = i
                    break
            if bad is None:
                break
            # pull a non-divisible row up; the next pass produces a smaller pivot
            a[s] = [x + y for x, y in zip(a[s], a[bad])]
            u[s] = [x + y for x, y in zip(u[s], u[bad])]

    for s in range(k):
        if a[s][s] < 0:
            a[s] = [-x for x in a[s]]
            u[s] = [-x for x in u[s]]

    return SnfResult(
        s=IntMatrix.from_rows(a), u=IntMatrix.from_rows(u), v=IntMatrix.from_rows(v)
    )


def cokernel_order(m: IntMatrix) -> ExtNat:
    """Order of Z^k / (image of m): the product of the invariant factors, or INFINITE."""
    diag = smith_normal_form(m).diagonal
    if any(d == 0 for d in diag):
        return INFINITE
    order = 1
    for d in diag:
        order *= d
    return order


def matrix_order(m: IntMatrix, bound: int) -> Optional[int]:
    """Least t in [1, bound] with m**t = identity, or None if there is none."""
    e = IntMatrix.identity(m.k)
    p = m
    for t in range(1, bound + 1):
        if p == e:
            return t
        p = p @ m
    return None


def sum_powers(m: IntMatrix, length: int) -> IntMatrix:
    """identity + m + m**2 + ... + m**(length-1)."""
    acc = IntMatrix.zero(m.k)
    p = IntMatrix.identity(m.k)
    for _ in range(length):
        acc = acc + p
        p = p @ m
    return acc


def companion_cyclotomic_5() -> IntMatrix:
    """Companion matrix of x^4 + x^3 + x^2 + x + 1; it has multiplicative order 5."""
    return IntMatrix.from_rows(
        [
            (0, 0, 0, -1),
            (1, 0, 0, -1),
            (0, 1, 0, -1),
            (0, 0, 1, -1),
        ]
    )


def direct_sum(blocks: Sequence[IntMatrix]) -> IntMatrix:
    if not blocks:
        raise InputError("direct_sum needs at least one block")
    total = sum(b.k for b in blocks)
    rows = []
    offset = 0
    for b in blocks:
        for row in b.rows:
            rows.append((0,) * offset + row + (0,) * (total - offset - b.k))
        offset += b.k
    return IntMatrix(tuple(rows))


@dataclass(frozen=True)
class AffineOrbit:
    """Forward orbit of a point under u -> m@u + z, up to first return."""

    points: tuple[Vector, ...]
    closed: bool

    @property
    def length(self) -> int:
        return len(self.points)


def affine_orbit(m: IntMatrix, z: Vector, x: Vector, bound: int) -> AffineOrbit:
    """Iterate u -> m@u + z from x until the orbit returns to x or bound steps pass.

    For unimodular m the map is a bijection of Z^k, so a periodic orbit must
    return to its start; revisiting any point means revisiting x.
    """
    points = [tuple(x)]
    cur = vec_add(m.apply(x), z)
    steps = 1
    while cur != tuple(x):
        if steps >= bound:
            return AffineOrbit(points=tuple(points), closed=False)
        points.append(cur)
        cur = vec_add(m.apply(cur), z)
        steps += 1
    return AffineOrbit(points=tuple(points), closed=True)


def solve(m: IntMatrix, b: Vector) -> Optional[Vector]:
    """One integer solution of m @ x == b, or None when none exists."""
    snf = smith_normal_form(m)
    c = snf.u.apply(b)
    y = []
    for ci, di in zip(c, snf.diagonal):
        if di == 0:
            if ci != 0:
                return None
            y.append(0)
        else:
            if ci % di:
                return None
            y.append(ci // di)
    return snf.v.apply(y)


def unimodular_inverse(m: IntMatrix) -> IntMatrix:
    """Exact inverse of a matrix with determinant +-1."""
    snf = smith_normal_form(m)
    if snf.diagonal != (1,) * m.k:
        raise InputError(f"matrix with determinant {m.det()} is not unimodular")
    # u @ m @ v = identity, so m^{-1} = v @ u
    return snf.v @ snf.u
