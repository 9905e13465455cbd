"""
Треугольники с вершиной в начале координат в F_q^2.

Треугольник задается матрицей t = [[a, b], [c, d]] (столбцы — стороны из нуля)
и классифицируется тройкой (L1, L2, mu): длины столбцов и их скалярное произведение.
"""

from typing import Optional

import numpy as np

from src.config.logger_config import logger
from src.field.field_core import FieldElement, FieldSpec, coordinate_grid, legendre, norm_grid, sqrt
from src.models.models import FqMatrix, FqVector, OrthogonalMatrix, TriangleInvariant
from src.utils.errors import DegenerateTriangleError, UnrealizableInvariantError, ZeroFirstColumnError


def invariants(t: FqMatrix) -> TriangleInvariant:
    first, second = t.column(0), t.column(1)
    return TriangleInvariant(first.norm(), second.norm(), first.dot(second))


def second_column_solutions(
        a: FieldElement, c: FieldElement, L2: FieldElement, mu: FieldElement
) -> list[FqVector]:
    """
    Все (b, d) с b^2 + d^2 = L2 и ab + cd = mu при заданном первом столбце (a, c).

    При L1 = a^2 + c^2 != 0 решения даются формулой
        (mu/L1)(a, c) ± (sqrt(L1·L2 - mu^2)/L1)(-c, a),
    которая не делит на c, поэтому отдельная ветка c = 0 не нужна.
    При L1 = 0 линейное уравнение выражает d через b, и решения перебираются по F_q.
    """
    field = a.field
    if not a and not c:
        raise ZeroFirstColumnError("Первый столбец треугольника нулевой")

    L1 = a * a + c * c
    if L1:
        roots = sqrt(L1 * L2 - mu * mu)
        if roots is None:
            return []
        base = FqVector.from_elements([mu / L1 * a, mu / L1 * c])
        solutions = {
            base + FqVector.from_elements([-(r / L1) * c, r / L1 * a]) for r in roots
        }
        return sorted(solutions)

    # изотропный столбец: a и c оба ненулевые
    solutions = []
    for b in field.elements():
        d = (mu - a * b) / c
        if b * b + d * d == L2:
            solutions.append(FqVector.from_elements([b, d]))
    return sorted(set(solutions))


def is_realizable(inv: TriangleInvariant) -> bool:
    return legendre(inv.discriminant) == 1


def congruent(t: FqMatrix, other: FqMatrix) -> bool:
    if not t.det() or not other.det():
        raise DegenerateTriangleError("Конгруэнтность определена только для невырожденных треугольников")
    return invariants(t) == invariants(other)


def third_side(inv: TriangleInvariant) -> FieldElement:
    """L3 = ‖col1 - col2‖ = L1 + L2 - 2mu."""
    return inv.L1 + inv.L2 - 2 * inv.mu


def mu_from_sides(L1: FieldElement, L2: FieldElement, L3: FieldElement) -> FieldElement:
    return (L1 + L2 - L3) / 2


def triangle_exists_with_sides(L1: FieldElement, L2: FieldElement, L3: FieldElement) -> bool:
    sigma2 = L1 * L2 + L1 * L3 + L2 * L3
    power_sum = L1 * L1 + L2 * L2 + L3 * L3
    return legendre(2 * sigma2 - power_sum) == 1


# ---------------------------------------------------------
# region Перепись классов
# ---------------------------------------------------------
def gl2_order(q: int) -> int:
    return q * (q + 1) * (q - 1) ** 2


def o2_order(q: int) -> int:
    return 2 * (q - 1) if q % 4 == 1 else 2 * (q + 1)


def count_classes(q: int) -> int:
    if q % 4 == 1:
        return q * (q * q - 1) // 2
    return q * (q - 1) ** 2 // 2


def enumerate_classes(field: FieldSpec) -> list[TriangleInvariant]:
    """Все реализуемые (L1, L2, mu) в лексикографическом порядке."""
    triples = coordinate_grid(field, 3)
    L1, L2, mu = triples[:, 0], triples[:, 1], triples[:, 2]
    discriminant = field.add_table[field.mul_table[L1, L2], field.neg_table[field.square_table[mu]]]
    realizable = triples[field.legendre_table[discriminant] == 1]

    classes = [
        TriangleInvariant(*(FieldElement(field, int(x)) for x in row)) for row in realizable
    ]
    logger.debug(f"Перечислены классы треугольников (q={field.q}, count={len(classes)})")
    return classes


# endregion
# ---------------------------------------------------------


# ---------------------------------------------------------
# region Представители и свидетели
# ---------------------------------------------------------
def first_vector_of_length(field: FieldSpec, L: FieldElement) -> Optional[FqVector]:
    """Первый ненулевой вектор плоскости длины L."""
    grid = coordinate_grid(field, 2)
    hits = np.flatnonzero(norm_grid(field, 2)[1:] == L.value) + 1
    if hits.size == 0:
        return None
    return FqVector(field, tuple(int(x) for x in grid[hits[0]]))


def realize_invariant(inv: TriangleInvariant) -> FqMatrix:
    if not is_realizable(inv):
        raise UnrealizableInvariantError(f"Класс {inv.literal()} не реализуется невырожденным треугольником")

    first = first_vector_of_length(inv.field, inv.L1)
    if first is None:
        raise UnrealizableInvariantError(f"Нет ненулевых векторов длины {inv.L1!r}")
    for second in second_column_solutions(first[0], first[1], inv.L2, inv.mu):
        t = FqMatrix.from_columns([first, second])
        if t.det():
            return t
    raise UnrealizableInvariantError(f"Нет невырожденного представителя для {inv.literal()}")


def column_fixing_reflection(first: FqVector) -> FqMatrix:
    """Отражение вдоль прямой через (a, c), L1 != 0: меняет местами два решения второго столбца."""
    a, c = first[0], first[1]
    L1 = first.norm()
    return FqMatrix.from_rows(
        [
            [(a * a - c * c) / L1, 2 * a * c / L1],
            [2 * a * c / L1, (c * c - a * a) / L1],
        ]
    )


def congruence_witness(t: FqMatrix, other: FqMatrix) -> OrthogonalMatrix:
    """g из O(2;q) с g·other = t."""
    from src.orthogonal.isometry import enumerate_O2, witt_map

    if not congruent(t, other):
        raise DegenerateTriangleError("Треугольники не конгруэнтны")

    inv = invariants(t)
    if inv.L1:
        g = witt_map(other.column(0), t.column(0)).matrix
        if g @ other.column(1) != t.column(1):
            g = column_fixing_reflection(t.column(0)) @ g
        if g @ other == t:
            return OrthogonalMatrix(g)

    for g in enumerate_O2(t.field):
        if g.matrix @ other == t:
            return g
    raise DegenerateTriangleError("Свидетель конгруэнтности не найден")


# endregion
# ---------------------------------------------------------
