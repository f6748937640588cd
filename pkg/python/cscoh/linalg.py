"""
Exact linear algebra over Q(i)
Dense matrices, reduced row echelon forms and subspace calculus. Pivoting is
always leftmost column, topmost row, so every basis produced here is reproducible.
"""

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

from .scalars import ONE, ZERO, GaussianRational

Vector = Tuple[GaussianRational, ...]


@dataclass(frozen=True)
class ExactMatrix:
    """Dense row-major matrix of Gaussian rationals"""

    rows: int
    cols: int
    entries: Tuple[GaussianRational, ...]

    def __post_init__(self):
        if self.rows * self.cols != len(self.entries):
            raise ValueError(
                f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} entries, got {len(self.entries)}"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: Optional[int] = None) -> "ExactMatrix":
        rows = [tuple(_scalar(x) for x in row) for row in rows]
        width = cols if cols is not None else (len(rows[0]) if rows else 0)
        for row in rows:
            if len(row) != width:
                raise ValueError("ragged rows")
        return cls(len(rows), width, tuple(x for row in rows for x in row))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int) -> "ExactMatrix":
        cols = len(columns)
        entries = [ZERO] * (rows * cols)
        for j, column in enumerate(columns):
            for i, value in enumerate(column):
                entries[i * cols + j] = _scalar(value)
        return cls(rows, cols, tuple(entries))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "ExactMatrix":
        return cls(rows, cols, (ZERO,) * (rows * cols))

    @classmethod
    def identity(cls, size: int) -> "ExactMatrix":
        return cls(size, size, tuple(ONE if i == j else ZERO for i in range(size) for j in range(size)))

    def __getitem__(self, index: Tuple[int, int]) -> GaussianRational:
        i, j = index
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Vector:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j: int) -> Vector:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def row_list(self) -> List[List[GaussianRational]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot compose {self.rows}x{self.cols} with {other.rows}x{other.cols}")
        out = []
        for i in range(self.rows):
            left = self.row(i)
            for j in range(other.cols):
                acc = ZERO
                for k in range(self.cols):
                    a = left[k]
                    if a:
                        b = other.entries[k * other.cols + j]
                        if b:
                            acc = acc + a * b
                out.append(acc)
        return ExactMatrix(self.rows, other.cols, tuple(out))

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_shape(other)
        return ExactMatrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_shape(other)
        return ExactMatrix(self.rows, self.cols, tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix(self.rows, self.cols, tuple(-a for a in self.entries))

    def scale(self, factor) -> "ExactMatrix":
        factor = _scalar(factor)
        return ExactMatrix(self.rows, self.cols, tuple(a * factor for a in self.entries))

    def apply(self, vector: Sequence[GaussianRational]) -> Vector:
        if len(vector) != self.cols:
            raise ValueError(f"vector of length {len(vector)} does not fit {self.rows}x{self.cols}")
        result = []
        for i in range(self.rows):
            acc = ZERO
            for a, x in zip(self.row(i), vector):
                if a and x:
                    acc = acc + a * x
            result.append(acc)
        return tuple(result)

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.cols, self.rows, tuple(self[i, j] for j in range(self.cols) for i in range(self.rows)))

    def conjugate_transpose(self) -> "ExactMatrix":
        return ExactMatrix(
            self.cols, self.rows, tuple(self[i, j].conjugate() for j in range(self.cols) for i in range(self.rows))
        )

    def conjugate(self) -> "ExactMatrix":
        return ExactMatrix(self.rows, self.cols, tuple(a.conjugate() for a in self.entries))

    def is_zero(self) -> bool:
        return not any(self.entries)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def _check_shape(self, other: "ExactMatrix"):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} vs {other.rows}x{other.cols}")


def _scalar(value) -> GaussianRational:
    if isinstance(value, GaussianRational):
        return value
    return GaussianRational(value)


def _eliminate(work: List[List[GaussianRational]], cols: int) -> List[int]:
    """In-place Gauss-Jordan reduction; returns pivot columns"""
    pivots = []
    pivot_row = 0
    for col in range(cols):
        found = None
        for r in range(pivot_row, len(work)):
            if work[r][col]:
                found = r
                break
        if found is None:
            continue
        if found != pivot_row:
            work[pivot_row], work[found] = work[found], work[pivot_row]
        inverse = work[pivot_row][col].reciprocal()
        work[pivot_row] = [x * inverse for x in work[pivot_row]]
        lead = work[pivot_row]
        for r in range(len(work)):
            if r != pivot_row:
                factor = work[r][col]
                if factor:
                    work[r] = [x - factor * y for x, y in zip(work[r], lead)]
        pivots.append(col)
        pivot_row += 1
        if pivot_row == len(work):
            break
    return pivots


def rref(m: ExactMatrix) -> Tuple[ExactMatrix, int]:
    """Unique reduced row echelon form and rank"""
    work = m.row_list()
    pivots = _eliminate(work, m.cols)
    return ExactMatrix.from_rows(work, cols=m.cols) if work else m, len(pivots)


def rank(m: ExactMatrix) -> int:
    return rref(m)[1]


def pivot_columns(m: ExactMatrix) -> List[int]:
    """Pivot columns of a matrix already in reduced row echelon form"""
    pivots = []
    for i in range(m.rows):
        for j, value in enumerate(m.row(i)):
            if value:
                pivots.append(j)
                break
    return pivots


@dataclass(frozen=True)
class Subspace:
    """Subspace of Q(i)^ambient_dim held as an RREF basis, one vector per row"""

    ambient_dim: int
    basis: ExactMatrix

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, ExactMatrix.zeros(0, ambient_dim))

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, ExactMatrix.identity(ambient_dim))

    @property
    def dim(self) -> int:
        return self.basis.rows

    def vectors(self) -> List[Vector]:
        return [self.basis.row(i) for i in range(self.basis.rows)]

    def pivots(self) -> List[int]:
        return pivot_columns(self.basis)

    def contains(self, vector: Sequence[GaussianRational]) -> bool:
        """Reduce against the RREF basis and test for zero"""
        if len(vector) != self.ambient_dim:
            raise ValueError(f"vector of length {len(vector)} in a space of dimension {self.ambient_dim}")
        residual = list(vector)
        for i, pivot in enumerate(self.pivots()):
            factor = residual[pivot]
            if factor:
                residual = [x - factor * y for x, y in zip(residual, self.basis.row(i))]
        return not any(residual)

    def contains_subspace(self, other: "Subspace") -> bool:
        _check_ambient(self, other)
        return all(self.contains(v) for v in other.vectors())


def span(vectors: Iterable[Sequence[GaussianRational]], ambient_dim: int) -> Subspace:
    rows = [list(_scalar(x) for x in v) for v in vectors]
    if not rows:
        return Subspace.zero(ambient_dim)
    pivots = _eliminate(rows, ambient_dim)
    return Subspace(ambient_dim, ExactMatrix.from_rows(rows[:len(pivots)], cols=ambient_dim))


def kernel(m: ExactMatrix) -> Subspace:
    """Right null space"""
    reduced, r = rref(m)
    pivots = pivot_columns(reduced)[:r]
    free = [j for j in range(m.cols) if j not in pivots]
    vectors = []
    for f in free:
        v = [ZERO] * m.cols
        v[f] = ONE
        for row, pivot in enumerate(pivots):
            v[pivot] = -reduced[row, f]
        vectors.append(v)
    return span(vectors, m.cols)


def image(m: ExactMatrix) -> Subspace:
    """Column space, in the target's coordinates"""
    return span((m.column(j) for j in range(m.cols)), m.rows)


def _check_ambient(a: Subspace, b: Subspace):
    if a.ambient_dim != b.ambient_dim:
        raise ValueError(f"ambient dimensions differ: {a.ambient_dim} vs {b.ambient_dim}")


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    _check_ambient(a, b)
    return span(a.vectors() + b.vectors(), a.ambient_dim)


def subspace_intersect(a: Subspace, b: Subspace) -> Subspace:
    """Kernel of [A^T | -B^T] mapped back through A"""
    _check_ambient(a, b)
    if a.dim == 0 or b.dim == 0:
        return Subspace.zero(a.ambient_dim)
    columns = a.vectors() + [tuple(-x for x in v) for v in b.vectors()]
    relations = kernel(ExactMatrix.from_columns(columns, a.ambient_dim))
    a_vectors = a.vectors()
    result = []
    for coefficients in relations.vectors():
        v = [ZERO] * a.ambient_dim
        for c, basis_vector in zip(coefficients[:a.dim], a_vectors):
            if c:
                v = [x + c * y for x, y in zip(v, basis_vector)]
        result.append(v)
    return span(result, a.ambient_dim)


def solve(m: ExactMatrix, rhs: Sequence[GaussianRational]) -> Optional[Vector]:
    """One solution of m x = rhs with free variables zero, or None"""
    if len(rhs) != m.rows:
        raise ValueError(f"right-hand side of length {len(rhs)} for {m.rows} equations")
    work = [list(m.row(i)) + [_scalar(rhs[i])] for i in range(m.rows)]
    pivots = _eliminate(work, m.cols + 1)
    if pivots and pivots[-1] == m.cols:
        return None
    x = [ZERO] * m.cols
    for row, pivot in enumerate(pivots):
        x[pivot] = work[row][m.cols]
    return tuple(x)


def quotient_basis(space: Subspace, sub: Subspace) -> List[Vector]:
    """RREF basis vectors of space whose pivots are not pivots of sub"""
    if not space.contains_subspace(sub):
        raise ValueError("quotient by a subspace that is not contained in the space")
    taken = set(sub.pivots())
    return [v for v, pivot in zip(space.vectors(), space.pivots()) if pivot not in taken]


def quotient_dim(space: Subspace, sub: Subspace) -> int:
    if not space.contains_subspace(sub):
        raise ValueError("quotient by a subspace that is not contained in the space")
    return space.dim - sub.dim


def determinant(m: ExactMatrix) -> GaussianRational:
    if not m.is_square:
        raise ValueError("determinant of a non-square matrix")
    work = m.row_list()
    det = ONE
    size = m.rows
    for col in range(size):
        found = None
        for r in range(col, size):
            if work[r][col]:
                found = r
                break
        if found is None:
            return ZERO
        if found != col:
            work[col], work[found] = work[found], work[col]
            det = -det
        pivot = work[col][col]
        det = det * pivot
        inverse = pivot.reciprocal()
        for r in range(col + 1, size):
            factor = work[r][col]
            if factor:
                factor = factor * inverse
                work[r] = [x - factor * y for x, y in zip(work[r], work[col])]
    return det


def inverse(m: ExactMatrix) -> ExactMatrix:
    if not m.is_square:
        raise ValueError("inverse of a non-square matrix")
    size = m.rows
    work = [list(m.row(i)) + [ONE if i == j else ZERO for j in range(size)] for i in range(size)]
    pivots = _eliminate(work, 2 * size)
    if pivots[:size] != list(range(size)):
        raise ValueError("matrix is singular")
    return ExactMatrix.from_rows([row[size:] for row in work], cols=size)


def characteristic_polynomial(m: ExactMatrix) -> List[GaussianRational]:
    """Faddeev-LeVerrier; coefficients of det(xI - m), highest degree first"""
    size = m.rows
    coefficients = [ONE]
    adjugate = ExactMatrix.zeros(size, size)
    identity = ExactMatrix.identity(size)
    for k in range(1, size + 1):
        adjugate = (m @ adjugate) + identity.scale(coefficients[-1])
        product = m @ adjugate
        trace = ZERO
        for i in range(size):
            trace = trace + product[i, i]
        coefficients.append(-trace / k)
    return coefficients
