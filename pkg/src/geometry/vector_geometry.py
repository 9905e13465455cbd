"""
Длины, сферы и разложения векторов F_q^d в суммы единичных векторов.
"""

from typing import Optional

import numpy as np
from cachetools import cached

from src.config.config import settings
from src.config.logger_config import logger
from src.field.field_core import (
    FieldElement,
    FieldSpec,
    coordinate_grid,
    encode_grid,
    legendre,
    norm_grid,
    primitive_fourth_root,
)
from src.geometry.triangle_classify import first_vector_of_length, second_column_solutions
from src.models.models import FqVector, UnitSumDecomposition
from src.utils.cache import cache_key, cache_lock, geometry_cache
from src.utils.errors import AmbientTooLargeError, DimensionTooSmallError, GeometryError


def norm(v: FqVector) -> FieldElement:
    return v.norm()


def _check_ambient(field: FieldSpec, d: int):
    if field.q**d > settings.ORACLE_AMBIENT_LIMIT:
        raise AmbientTooLargeError(f"q^d={field.q ** d} больше ORACLE_AMBIENT_LIMIT")


# ---------------------------------------------------------
# region Сферы
# ---------------------------------------------------------
@cached(cache=geometry_cache, key=cache_key("sphere"), lock=cache_lock)
def sphere(t: FieldElement, d: int) -> tuple[FqVector, ...]:
    """S_t = {x : ‖x‖ = t} в лексикографическом порядке."""
    field = t.field
    _check_ambient(field, d)
    grid = coordinate_grid(field, d)
    points = grid[norm_grid(field, d) == t.value]
    return tuple(FqVector(field, tuple(int(x) for x in row)) for row in points)


def sphere_count(t: FieldElement, d: int) -> int:
    _check_ambient(t.field, d)
    return int(np.count_nonzero(norm_grid(t.field, d) == t.value))


def sphere_size_formula(t: FieldElement) -> int:
    """|S_t| в плоскости: q + η(-1)·v(t), где v(0) = q - 1 и v(t) = -1 при t != 0."""
    field = t.field
    eta = int(legendre(-field.one))
    v = field.q - 1 if not t else -1
    return field.q + eta * v


def two_unit_representable(L: FieldElement) -> bool:
    return bool(L) and legendre(4 * L - L * L) >= 0


def good_set_size(q: int) -> int:
    return (q + 3) // 2 if q % 4 == 3 else (q - 1) // 2


def good_lengths(field: FieldSpec) -> set[int]:
    """Длины L, у которых все векторы плоскости являются суммами двух единичных (перебор)."""
    grid = coordinate_grid(field, 2)
    units = grid[norm_grid(field, 2) == 1]
    sums = field.add_table[units[:, None, :], units[None, :, :]].reshape(-1, 2)
    reachable = np.zeros(field.q**2, dtype=bool)
    reachable[encode_grid(field, sums)] = True

    norms = norm_grid(field, 2)
    return {L for L in range(field.q) if np.all(reachable[norms == L])}


def zero_three_units_possible(p: int, n: int) -> bool:
    return p % 12 in (1, 3, 11) or n % 2 == 0


# endregion
# ---------------------------------------------------------


# ---------------------------------------------------------
# region Разложения
# ---------------------------------------------------------
def unit_sum_bound(v: FqVector) -> int:
    q, d = v.field.q, v.dim
    if d < 2:
        raise DimensionTooSmallError(f"Размерность должна быть >= 2 (d={d})")
    if not v:
        return 2
    if d == 2:
        if q == 3:
            return 2
        return 3 if q % 4 == 3 else 4
    if d == 3:
        return 2 if q % 4 == 1 else 3
    return 2


def _zero_split(field: FieldSpec, d: int) -> list[FqVector]:
    e1 = FqVector.basis(field, d, 0)
    return [e1, -e1]


def _two_unit_split(v: FqVector) -> Optional[list[FqVector]]:
    """v = u + (v - u) по формуле второго столбца с L2 = 1, mu = L/2."""
    if not v:
        return _zero_split(v.field, v.dim)
    L = v.norm()
    if not two_unit_representable(L):
        return None
    u = second_column_solutions(v[0], v[1], v.field.one, L / 2)[0]
    return [u, v - u]


def _three_unit_split(v: FqVector) -> Optional[list[FqVector]]:
    """Плоскость, q ≡ 3 (mod 4): v = u + w, где w длины L' раскладывается в две единицы."""
    field = v.field
    tau = v.norm()
    if tau == field.one:
        return [v, -v, v]

    for L in field.nonzero_elements():
        if legendre(4 * L - L * L) < 0:
            continue
        if legendre(-L * L + (2 * tau + 2) * L - (tau - 1) * (tau - 1)) < 0:
            continue
        candidates = second_column_solutions(v[0], v[1], field.one, (tau + 1 - L) / 2)
        if not candidates:
            continue
        u = candidates[0]
        rest = _two_unit_split(v - u)
        if rest is not None:
            return [u] + rest
    return None


def _layered_split(v: FqVector, depth: int) -> Optional[list[FqVector]]:
    """Перебор единичных u в порядке перечисления, пока остаток не станет суммой двух."""
    rest = _two_unit_split(v)
    if rest is not None or depth == 0:
        return rest
    for u in sphere(v.field.one, v.dim):
        tail = _layered_split(v - u, depth - 1)
        if tail is not None:
            return [u] + tail
    return None


def _decompose_plane(v: FqVector) -> list[FqVector]:
    parts = _two_unit_split(v)
    if parts is None and v.field.q % 4 == 3:
        parts = _three_unit_split(v)
    if parts is None:
        parts = _layered_split(v, depth=2)
    if parts is None:
        raise GeometryError(f"Не найдено разложение {v!r} в сумму единичных векторов")
    return parts


def _map_parts(rep: FqVector, v: FqVector, parts: list[FqVector]) -> list[FqVector]:
    """Переносит разложение канонического представителя rep на v изометрией Витта."""
    if rep == v:
        return parts
    from src.orthogonal.isometry import witt_map

    W = witt_map(rep, v).matrix
    return [W @ part for part in parts]


def _pad(field: FieldSpec, head: list[FieldElement], d: int) -> FqVector:
    return FqVector.from_elements(head + [field.zero] * (d - len(head)))


def _space_nonzero_length(v: FqVector) -> list[FqVector]:
    """d = 3, ‖v‖ = L != 0: две единицы (c, t, u) и (a - c, b - t, -u)."""
    field, L = v.field, v.norm()
    rep = v if not v[2] else _pad(field, list(first_vector_of_length(field, L).coords), 3)
    a, b = rep[0], rep[1]

    for u in field.elements():
        if legendre(4 * L - L * L - 4 * L * u * u) < 0:
            continue
        c, t = second_column_solutions(a, b, 1 - u * u, L / 2)[0].coords
        parts = [
            FqVector.from_elements([c, t, u]),
            FqVector.from_elements([a - c, b - t, -u]),
        ]
        return _map_parts(rep, v, parts)
    raise GeometryError(f"Не найдена третья координата для {v!r}")


def _decompose_space(v: FqVector) -> list[FqVector]:
    field = v.field
    L = v.norm()
    if L == field.embed(4):
        half = v.scale(field.one / 2)
        return [half, half]
    if L:
        return _space_nonzero_length(v)

    if field.q % 4 == 1:
        i = primitive_fourth_root(field)
        rep = _pad(field, [field.one, i], 3)
        parts = [
            FqVector.from_elements([field.one, i, field.one]),
            FqVector.basis(field, 3, 2, sign=-1),
        ]
        return _map_parts(rep, v, parts)

    # q ≡ 3 (mod 4): rep = (a, b, 1), a^2 + b^2 = -1
    a, b = first_vector_of_length(field, -field.one).coords
    rep = FqVector.from_elements([a, b, field.one])
    parts = _space_nonzero_length(_pad(field, [a, b], 3)) + [FqVector.basis(field, 3, 2)]
    return _map_parts(rep, v, parts)


def _decompose_high(v: FqVector) -> list[FqVector]:
    """d >= 4: всегда две единицы."""
    field, d = v.field, v.dim
    L = v.norm()
    half = field.one / 2
    if L == field.embed(4):
        return [v.scale(half), v.scale(half)]

    if L:
        a, b = (v[0], v[1]) if not any(v.values[2:]) else first_vector_of_length(field, L).coords
        rep = _pad(field, [a, b], d)
        s, t = first_vector_of_length(field, 1 - L / 4).coords
        parts = [
            _pad(field, [a * half, b * half, s, t], d),
            _pad(field, [a * half, b * half, -s, -t], d),
        ]
        return _map_parts(rep, v, parts)

    isotropic = next(x for x in sphere(field.zero, 3) if x)
    a, b, c = isotropic.coords
    rep = _pad(field, [a, b, c], d)
    parts = [
        _pad(field, [a * half, b * half, c * half, field.one], d),
        _pad(field, [a * half, b * half, c * half, -field.one], d),
    ]
    return _map_parts(rep, v, parts)


def decompose_unit_sum(v: FqVector) -> UnitSumDecomposition:
    d = v.dim
    if d < 2:
        raise DimensionTooSmallError(f"Размерность должна быть >= 2 (d={d})")

    if not v:
        parts = _zero_split(v.field, d)
    elif d == 2:
        parts = _decompose_plane(v)
    elif d == 3:
        parts = _decompose_space(v)
    else:
        parts = _decompose_high(v)

    decomposition = UnitSumDecomposition(v, tuple(parts))
    logger.debug(f"Разложение в единичные векторы (v={v.literal()}, count={decomposition.count})")
    return decomposition


def _exact_parts(v: FqVector, k: int) -> Optional[list[FqVector]]:
    if k < 1:
        return None
    if k == 1:
        return [v] if v.norm() == v.field.one else None

    base = list(decompose_unit_sum(v).parts)
    gap = k - len(base)
    if gap >= 0 and gap % 2 == 0:
        e1 = FqVector.basis(v.field, v.dim, 0)
        return base + [e1, -e1] * (gap // 2)

    for u in sphere(v.field.one, v.dim):
        tail = _exact_parts(v - u, k - 1)
        if tail is not None:
            return [u] + tail
    return None


def decompose_unit_sum_exact(v: FqVector, k: int) -> UnitSumDecomposition:
    """Разложение ровно в k единичных векторов; пары (e1, -e1) заполняют четный остаток."""
    parts = _exact_parts(v, k)
    if parts is None:
        raise GeometryError(f"{v!r} не раскладывается ровно в {k} единичных векторов")
    return UnitSumDecomposition(v, tuple(parts))


# endregion
# ---------------------------------------------------------


# ---------------------------------------------------------
# region Пороги блужданий
# ---------------------------------------------------------
def walk_threshold_holds(field: FieldSpec) -> bool:
    """|S_1| >= (2√q / |S_1|)^3 в плоскости."""
    s1 = sphere_count(field.one, 2)
    return s1 >= (2 * np.sqrt(field.q) / s1) ** 3


def zero_walk_threshold_holds(field: FieldSpec) -> bool:
    """√(|S_1||S_0|) > (2√q / |S_1|)^3; имеет смысл при q ≡ 1 (mod 4)."""
    s1 = sphere_count(field.one, 2)
    s0 = sphere_count(field.zero, 2)
    return np.sqrt(s1 * s0) > (2 * np.sqrt(field.q) / s1) ** 3


# endregion
# ---------------------------------------------------------
