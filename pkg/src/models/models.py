from dataclasses import dataclass, field as dc_field
from functools import reduce
from typing import Optional, Sequence, Union

import numpy as np

from src.field.field_core import FieldElement, FieldSpec, matmul_table, reduce_sum
from src.utils.errors import FieldError, FieldMismatchError, GeometryError, OrthogonalError


def _check_same_field(left: FieldSpec, right: FieldSpec):
    if left != right:
        raise FieldMismatchError(f"Смешение полей: {left!r} и {right!r}")


# ---------------------------------------------------------
# region FqVector
# ---------------------------------------------------------
@dataclass(frozen=True)
class FqVector:
    """Вектор из F_q^d. Координаты хранятся индексами элементов поля."""

    field: FieldSpec
    values: tuple[int, ...]

    @classmethod
    def from_elements(cls, coords: Sequence[FieldElement]) -> "FqVector":
        if not coords:
            raise GeometryError("Пустой вектор")
        field = coords[0].field
        for x in coords:
            _check_same_field(field, x.field)
        return cls(field, tuple(x.value for x in coords))

    @classmethod
    def from_literal(cls, field: FieldSpec, literal: Sequence) -> "FqVector":
        if not isinstance(literal, (list, tuple)) or not literal:
            raise FieldError(f"Ожидался непустой список координат: {literal!r}")
        return cls.from_elements([field.parse(x) for x in literal])

    @classmethod
    def zeros(cls, field: FieldSpec, d: int) -> "FqVector":
        return cls(field, (0,) * d)

    @classmethod
    def basis(cls, field: FieldSpec, d: int, i: int, sign: int = 1) -> "FqVector":
        values = [0] * d
        values[i] = field.embed(sign).value
        return cls(field, tuple(values))

    @property
    def dim(self) -> int:
        return len(self.values)

    @property
    def coords(self) -> tuple[FieldElement, ...]:
        return tuple(FieldElement(self.field, v) for v in self.values)

    def __getitem__(self, i: int) -> FieldElement:
        return FieldElement(self.field, self.values[i])

    def __len__(self):
        return len(self.values)

    def __bool__(self):
        return any(self.values)

    def __lt__(self, other: "FqVector"):
        return self.values < other.values

    def __repr__(self):
        return f"FqVector({self.literal()}@{self.field!r})"

    def _pair(self, other: "FqVector"):
        _check_same_field(self.field, other.field)
        if self.dim != other.dim:
            raise GeometryError(f"Разные размерности: {self.dim} и {other.dim}")
        return zip(self.coords, other.coords)

    def __add__(self, other: "FqVector") -> "FqVector":
        return FqVector.from_elements([x + y for x, y in self._pair(other)])

    def __sub__(self, other: "FqVector") -> "FqVector":
        return FqVector.from_elements([x - y for x, y in self._pair(other)])

    def __neg__(self) -> "FqVector":
        return FqVector.from_elements([-x for x in self.coords])

    def scale(self, c: Union[FieldElement, int]) -> "FqVector":
        return FqVector.from_elements([c * x for x in self.coords])

    def dot(self, other: "FqVector") -> FieldElement:
        return reduce(lambda acc, pair: acc + pair[0] * pair[1], self._pair(other), self.field.zero)

    def norm(self) -> FieldElement:
        """‖x‖ = x_1² + ... + x_d²."""
        return self.dot(self)

    def literal(self) -> list:
        return [x.literal() for x in self.coords]


# endregion
# ---------------------------------------------------------


# ---------------------------------------------------------
# region FqMatrix
# ---------------------------------------------------------
@dataclass(frozen=True)
class FqMatrix:
    """Квадратная матрица над F_q; арифметика по таблицам поля, без таблиц через galois."""

    field: FieldSpec
    values: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        d = len(self.values)
        if d == 0 or any(len(row) != d for row in self.values):
            raise GeometryError("Матрица должна быть квадратной и непустой")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[FieldElement]]) -> "FqMatrix":
        field = rows[0][0].field
        for row in rows:
            for x in row:
                _check_same_field(field, x.field)
        return cls(field, tuple(tuple(x.value for x in row) for row in rows))

    @classmethod
    def from_columns(cls, columns: Sequence[FqVector]) -> "FqMatrix":
        field = columns[0].field
        for column in columns:
            _check_same_field(field, column.field)
        return cls(field, tuple(zip(*(c.values for c in columns))))

    @classmethod
    def from_literal(cls, field: FieldSpec, literal: Sequence) -> "FqMatrix":
        if not isinstance(literal, (list, tuple)) or not literal:
            raise FieldError(f"Ожидался непустой список строк: {literal!r}")
        rows = []
        for row in literal:
            if not isinstance(row, (list, tuple)):
                raise FieldError(f"Строка матрицы должна быть списком: {row!r}")
            rows.append([field.parse(x) for x in row])
        return cls.from_rows(rows)

    @classmethod
    def from_array(cls, field: FieldSpec, array) -> "FqMatrix":
        array = np.asarray(array, dtype=np.int64)
        return cls(field, tuple(tuple(int(x) for x in row) for row in array))

    @classmethod
    def identity(cls, field: FieldSpec, d: int) -> "FqMatrix":
        return cls.from_array(field, np.eye(d, dtype=np.int64))

    @classmethod
    def zeros(cls, field: FieldSpec, d: int) -> "FqMatrix":
        return cls(field, ((0,) * d,) * d)

    @classmethod
    def block_corner(cls, corner: FieldElement, block: "FqMatrix") -> "FqMatrix":
        """diag(corner, block)."""
        d = block.dim + 1
        values = [[0] * d for _ in range(d)]
        values[0][0] = corner.value
        for i, row in enumerate(block.values):
            values[i + 1][1:] = row
        return cls.from_array(block.field, values)

    @property
    def dim(self) -> int:
        return len(self.values)

    @property
    def entries(self) -> tuple[tuple[FieldElement, ...], ...]:
        return tuple(tuple(FieldElement(self.field, v) for v in row) for row in self.values)

    def __getitem__(self, index: tuple[int, int]) -> FieldElement:
        i, j = index
        return FieldElement(self.field, self.values[i][j])

    def __lt__(self, other: "FqMatrix"):
        return self.values < other.values

    def __repr__(self):
        return f"FqMatrix({self.literal()}@{self.field!r})"

    def column(self, j: int) -> FqVector:
        return FqVector(self.field, tuple(row[j] for row in self.values))

    def row(self, i: int) -> FqVector:
        return FqVector(self.field, self.values[i])

    def minor_block(self) -> "FqMatrix":
        """Правый нижний блок без первой строки и первого столбца."""
        return FqMatrix(self.field, tuple(row[1:] for row in self.values[1:]))

    def to_array(self) -> np.ndarray:
        return np.array(self.values, dtype=np.int64)

    def to_galois(self):
        return self.field.galois_field(self.to_array())

    def _wrap(self, array) -> "FqMatrix":
        return FqMatrix.from_array(self.field, array.view(np.ndarray))

    def _check(self, other: "FqMatrix"):
        _check_same_field(self.field, other.field)
        if self.dim != other.dim:
            raise GeometryError(f"Разные размерности: {self.dim} и {other.dim}")

    # при плотных таблицах арифметика идет индексированием, galois только для больших полей
    def __add__(self, other: "FqMatrix") -> "FqMatrix":
        self._check(other)
        if self.field.has_tables:
            return self._wrap(self.field.add_table[self.to_array(), other.to_array()])
        return self._wrap(self.to_galois() + other.to_galois())

    def __sub__(self, other: "FqMatrix") -> "FqMatrix":
        return self + (-other)

    def __neg__(self) -> "FqMatrix":
        if self.field.has_tables:
            return self._wrap(self.field.neg_table[self.to_array()])
        return self._wrap(-self.to_galois())

    def __matmul__(self, other):
        if isinstance(other, FqVector):
            _check_same_field(self.field, other.field)
            column = np.array(other.values, dtype=np.int64).reshape(-1, 1)
            if self.field.has_tables:
                product = matmul_table(self.field, self.to_array(), column).reshape(-1)
            else:
                product = (self.to_galois() @ self.field.galois_field(column)).view(np.ndarray).reshape(-1)
            return FqVector(self.field, tuple(int(x) for x in product))
        if isinstance(other, FqMatrix):
            self._check(other)
            if self.field.has_tables:
                return self._wrap(matmul_table(self.field, self.to_array(), other.to_array()))
            return self._wrap(self.to_galois() @ other.to_galois())
        return NotImplemented

    def scale(self, c: Union[FieldElement, int]) -> "FqMatrix":
        c = c if isinstance(c, FieldElement) else self.field.embed(c)
        if self.field.has_tables:
            return self._wrap(self.field.mul_table[c.value, self.to_array()])
        return self._wrap(self.to_galois() * self.field.galois_field(c.value))

    def transpose(self) -> "FqMatrix":
        return FqMatrix(self.field, tuple(zip(*self.values)))

    @property
    def T(self) -> "FqMatrix":
        return self.transpose()

    def det(self) -> FieldElement:
        if self.dim == 1:
            return self[0, 0]
        if self.dim == 2:
            return self[0, 0] * self[1, 1] - self[0, 1] * self[1, 0]
        return FieldElement(self.field, int(np.linalg.det(self.to_galois())))

    def is_zero(self) -> bool:
        return not any(any(row) for row in self.values)

    def literal(self) -> list:
        return [[x.literal() for x in row] for row in self.entries]


def sum_matrices(parts: Sequence[FqMatrix]) -> FqMatrix:
    return reduce(lambda acc, m: acc + m, parts[1:], parts[0])


def sum_vectors(parts: Sequence[FqVector]) -> FqVector:
    return reduce(lambda acc, v: acc + v, parts[1:], parts[0])


# endregion
# ---------------------------------------------------------


# ---------------------------------------------------------
# region Декомпозиции
# ---------------------------------------------------------
@dataclass(frozen=True)
class TriangleInvariant:
    L1: FieldElement
    L2: FieldElement
    mu: FieldElement

    @property
    def field(self) -> FieldSpec:
        return self.L1.field

    @property
    def discriminant(self) -> FieldElement:
        return self.L1 * self.L2 - self.mu * self.mu

    def key(self) -> tuple[int, int, int]:
        return self.L1.value, self.L2.value, self.mu.value

    def swapped(self) -> "TriangleInvariant":
        return TriangleInvariant(self.L2, self.L1, self.mu)

    def literal(self) -> list:
        return [self.L1.literal(), self.L2.literal(), self.mu.literal()]


@dataclass(frozen=True)
class UnitSumDecomposition:
    target: FqVector
    parts: tuple[FqVector, ...]

    @property
    def count(self) -> int:
        return len(self.parts)

    def verify(self) -> bool:
        one = self.target.field.one
        return (
            bool(self.parts)
            and all(part.norm() == one for part in self.parts)
            and sum_vectors(self.parts) == self.target
        )


@dataclass(frozen=True)
class OrthogonalMatrix:
    matrix: FqMatrix

    def __post_init__(self):
        if not is_orthogonal_matrix(self.matrix):
            raise OrthogonalError(f"Матрица не ортогональна: {self.matrix.literal()}")

    @property
    def dim(self) -> int:
        return self.matrix.dim

    def __matmul__(self, other):
        if isinstance(other, OrthogonalMatrix):
            return OrthogonalMatrix(self.matrix @ other.matrix)
        return self.matrix @ other

    def __neg__(self) -> "OrthogonalMatrix":
        return OrthogonalMatrix(-self.matrix)

    def transpose(self) -> "OrthogonalMatrix":
        return OrthogonalMatrix(self.matrix.transpose())


def is_orthogonal_matrix(A: FqMatrix) -> bool:
    return A.transpose() @ A == FqMatrix.identity(A.field, A.dim)


@dataclass(frozen=True)
class OrthSumDecomposition:
    target: FqMatrix
    parts: tuple[OrthogonalMatrix, ...]
    declared_count: int

    @property
    def count(self) -> int:
        return len(self.parts)

    def verify(self) -> bool:
        """Пересчет с нуля: число слагаемых, PᵀP = I для каждой части и точная сумма."""
        if self.count != self.declared_count or not self.parts:
            return False
        field, d = self.target.field, self.target.dim
        if not field.has_tables:
            return (
                all(is_orthogonal_matrix(part.matrix) for part in self.parts)
                and sum_matrices([part.matrix for part in self.parts]) == self.target
            )

        stack = np.array([part.matrix.values for part in self.parts], dtype=np.int64)
        if stack.shape[1:] != (d, d):
            return False
        gram = matmul_table(field, np.swapaxes(stack, -1, -2), stack)
        orthogonal = np.array_equal(gram, np.broadcast_to(np.eye(d, dtype=np.int64), gram.shape))
        total = reduce_sum(field, stack, axis=0)
        return orthogonal and np.array_equal(total, self.target.to_array())


# endregion
# ---------------------------------------------------------


# ---------------------------------------------------------
# region Спектры и оракул
# ---------------------------------------------------------
@dataclass(frozen=True)
class ConnectionSet:
    """Порождающее множество G орграфа Кэли: матрицы d×d или векторы из F_q^d."""

    label: str
    field: FieldSpec
    d: int
    kind: str  # "matrix" | "vector"
    elements: tuple

    def __len__(self):
        return len(self.elements)

    @property
    def ambient_rank(self) -> int:
        """Число координат элемента окружающего пространства."""
        return self.d * self.d if self.kind == "matrix" else self.d

    def flat_values(self) -> np.ndarray:
        """Элементы G построчно: форма (|G|, ambient_rank)."""
        if self.kind == "matrix":
            rows = [np.array(g.values, dtype=np.int64).reshape(-1) for g in self.elements]
        else:
            rows = [np.array(g.values, dtype=np.int64) for g in self.elements]
        return np.vstack(rows)


@dataclass(frozen=True)
class SpectrumEntry:
    invariant: Optional[TriangleInvariant]
    representative: FqMatrix
    eigenvalue: complex
    branch: str
    bound: float
    passed: bool


@dataclass
class SpectrumReport:
    q: int
    group_order: int
    entries: list[SpectrumEntry]
    gap_param: float
    checks: dict[str, bool] = dc_field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries) and all(self.checks.values())


@dataclass(frozen=True)
class DistanceMap:
    """dist[i] — минимальное число образующих в сумме для элемента с плоским индексом i (0 — недостижим)."""

    field: FieldSpec
    ambient: str
    rank: int
    dist: np.ndarray

    @property
    def diameter(self) -> Optional[int]:
        if np.any(self.dist == 0):
            return None
        return int(self.dist.max())

    def index_of(self, values: Sequence[int]) -> int:
        index = 0
        for v in values:
            index = index * self.field.q + int(v)
        return index

    def distance(self, element: Union[FqVector, FqMatrix]) -> Optional[int]:
        values = element.values if isinstance(element, FqVector) else [v for row in element.values for v in row]
        found = int(self.dist[self.index_of(values)])
        return found or None

    def argmax(self) -> int:
        return int(np.argmax(self.dist))


# endregion
# ---------------------------------------------------------
