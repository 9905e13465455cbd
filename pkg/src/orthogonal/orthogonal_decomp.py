"""
Разложение матриц в суммы ортогональных с точным числом слагаемых.

2×2: A = B + C, где B — форма поворота, C — форма отражения; определяющий столбец
каждой части раскладывается в единичные векторы, которые поднимаются до матриц.
d×d: индукция по размерности через матрицы с единичным первым столбцом.
"""

import numpy as np
from cachetools import cached

from src.config.logger_config import logger
from src.field.field_core import FieldSpec
from src.geometry.vector_geometry import decompose_unit_sum, decompose_unit_sum_exact
from src.models.models import FqMatrix, FqVector, OrthogonalMatrix, OrthSumDecomposition
from src.orthogonal.isometry import plane_reflection, rotation, witt_map
from src.utils.cache import cache_key, cache_lock, decomposition_cache
from src.utils.errors import DimensionTooSmallError, OrthogonalError


def orthogonal_count(d: int, q: int) -> int:
    if d < 2:
        raise DimensionTooSmallError(f"Размерность должна быть >= 2 (d={d})")
    if d == 2:
        return 8 if q % 4 == 1 else 6
    return (8 if q % 4 == 1 else 9) * 6 ** (d - 2)


def permutation_swap(field: FieldSpec, d: int) -> OrthogonalMatrix:
    """Перестановка первых двух координат."""
    P = np.eye(d, dtype=np.int64)
    P[[0, 1]] = P[[1, 0]]
    return OrthogonalMatrix(FqMatrix.from_array(field, P))


def verify_orthogonal_decomposition(decomposition: OrthSumDecomposition) -> bool:
    return decomposition.verify()


def _identity_pair(field: FieldSpec, d: int) -> list[OrthogonalMatrix]:
    identity = OrthogonalMatrix(FqMatrix.identity(field, d))
    return [identity, -identity]


# ---------------------------------------------------------
# region 2×2
# ---------------------------------------------------------
def _split_rotation_reflection(A: FqMatrix) -> tuple[FqVector, FqVector]:
    """Столбцы (x, y) поворотной и (w, z) отражательной частей A."""
    a11, a12, a21, a22 = A[0, 0], A[0, 1], A[1, 0], A[1, 1]
    x = (a11 + a22) / 2
    w = (a11 - a22) / 2
    z = (a12 + a21) / 2
    y = (a21 - a12) / 2
    return FqVector.from_elements([x, y]), FqVector.from_elements([w, z])


def decompose_2x2(A: FqMatrix) -> OrthSumDecomposition:
    if A.dim != 2:
        raise DimensionTooSmallError(f"Ожидалась матрица 2×2 (d={A.dim})")
    field = A.field
    rotation_column, reflection_column = _split_rotation_reflection(A)

    if field.q % 4 == 1:
        rotation_terms, reflection_terms = 4, 4
    elif not rotation_column:
        rotation_terms, reflection_terms = 0, 4
    elif not reflection_column:
        rotation_terms, reflection_terms = 4, 0
    else:
        rotation_terms, reflection_terms = 3, 3

    if rotation_terms:
        units = decompose_unit_sum_exact(rotation_column, rotation_terms).parts
        rotation_parts = [rotation(u) for u in units]
    else:
        rotation_parts = _identity_pair(field, 2)

    if reflection_terms:
        units = decompose_unit_sum_exact(reflection_column, reflection_terms).parts
        reflection_parts = [plane_reflection(u) for u in units]
    else:
        reflection_parts = _identity_pair(field, 2)

    parts = tuple(rotation_parts + reflection_parts)
    return OrthSumDecomposition(A, parts, orthogonal_count(2, field.q))


# endregion
# ---------------------------------------------------------


# ---------------------------------------------------------
# region d×d
# ---------------------------------------------------------
def first_col_unit_split(A: FqMatrix) -> list[FqMatrix]:
    """A = Σ P_i, у каждого P_i первый столбец единичный; остальные столбцы A достаются P_0."""
    if A.dim < 3:
        raise DimensionTooSmallError(f"Ожидалась размерность >= 3 (d={A.dim})")
    field, d = A.field, A.dim
    units = decompose_unit_sum(A.column(0)).parts

    parts = []
    for index, unit in enumerate(units):
        columns = [unit] + [
            A.column(j) if index == 0 else FqVector.zeros(field, d) for j in range(1, d)
        ]
        parts.append(FqMatrix.from_columns(columns))
    return parts


def _corner_lift(block_parts, field: FieldSpec) -> list[FqMatrix]:
    """diag(±1, B_j) со знаками +, -, +, ...; при четном r угловые единицы взаимно уничтожаются."""
    lifted = []
    for index, part in enumerate(block_parts):
        sign = field.one if index % 2 == 0 else -field.one
        lifted.append(FqMatrix.block_corner(sign, part.matrix))
    return lifted


def _unit_column_parts(P: FqMatrix) -> list[OrthogonalMatrix]:
    """Разложение матрицы с единичным первым столбцом в 3r ортогональных."""
    field, d = P.field, P.dim
    e1 = FqVector.basis(field, d, 0)
    X = witt_map(P.column(0), e1)
    Y = X.matrix @ P  # первый столбец e1

    swap = permutation_swap(field, d).matrix
    lower = Y.minor_block()
    first_row = np.zeros((d - 1, d - 1), dtype=np.int64)
    first_row[0] = Y.values[0][1:]
    corner = np.zeros((d - 1, d - 1), dtype=np.int64)
    corner[0, 0] = 1

    E_parts = decompose_matrix(lower)
    G_parts = decompose_matrix(FqMatrix.from_array(field, first_row))
    H_parts = decompose_matrix(FqMatrix.from_array(field, corner))
    r = E_parts.declared_count
    assert r % 2 == 0, f"Число слагаемых блока должно быть четным (r={r})"

    pieces = (
        _corner_lift(E_parts.parts, field)
        + [swap @ M for M in _corner_lift(G_parts.parts, field)]
        + [swap @ M @ swap for M in _corner_lift(H_parts.parts, field)]
    )
    back = X.transpose().matrix
    return [OrthogonalMatrix(back @ M) for M in pieces]


def decompose_dxd(A: FqMatrix) -> OrthSumDecomposition:
    field, d = A.field, A.dim
    if d < 3:
        raise DimensionTooSmallError(f"Ожидалась размерность >= 3 (d={d})")

    target = orthogonal_count(d, field.q)
    parts = []
    for P in first_col_unit_split(A):
        parts.extend(_unit_column_parts(P))

    gap = target - len(parts)
    if gap < 0 or gap % 2:
        raise OrthogonalError(f"Число слагаемых {len(parts)} не дополняется до {target}")
    identity, minus_identity = _identity_pair(field, d)
    parts.extend([identity] * (gap // 2) + [minus_identity] * (gap // 2))

    logger.debug(f"Разложение d×d (d={d}, q={field.q}, count={len(parts)}, padded={gap})")
    return OrthSumDecomposition(A, tuple(parts), target)


@cached(cache=decomposition_cache, key=cache_key("decompose_matrix"), lock=cache_lock)
def decompose_matrix(A: FqMatrix) -> OrthSumDecomposition:
    """2×2 или d×d по размерности; блоки повторяются в рекурсии и берутся из кэша."""
    return decompose_2x2(A) if A.dim == 2 else decompose_dxd(A)


# endregion
# ---------------------------------------------------------
