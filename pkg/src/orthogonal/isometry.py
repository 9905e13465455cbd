"""
Ортогональная группа O(d;q): проверка принадлежности, перечисление O(2;q),
отражения и конструктивная изометрия Витта.
"""

from cachetools import cached

from src.config.logger_config import logger
from src.field.field_core import FieldSpec
from src.geometry.vector_geometry import sphere
from src.models.models import FqMatrix, FqVector, OrthogonalMatrix, is_orthogonal_matrix
from src.utils.cache import cache_key, cache_lock, geometry_cache
from src.utils.errors import IsotropicMirrorError, LengthMismatchError, OrthogonalError, ZeroVectorError


def is_orthogonal(A: FqMatrix) -> bool:
    return is_orthogonal_matrix(A)


def rotation(u: FqVector) -> OrthogonalMatrix:
    """[[a, -b], [b, a]] для единичного (a, b)."""
    a, b = u.coords
    return OrthogonalMatrix(FqMatrix.from_rows([[a, -b], [b, a]]))


def plane_reflection(u: FqVector) -> OrthogonalMatrix:
    """[[a, b], [b, -a]] для единичного (a, b)."""
    a, b = u.coords
    return OrthogonalMatrix(FqMatrix.from_rows([[a, b], [b, -a]]))


@cached(cache=geometry_cache, key=cache_key("enumerate_O2"), lock=cache_lock)
def enumerate_O2(field: FieldSpec) -> tuple[OrthogonalMatrix, ...]:
    """Сначала повороты SO(2;q), затем отражения; внутри — порядок точек S_1."""
    units = sphere(field.one, 2)
    group = tuple(rotation(u) for u in units) + tuple(plane_reflection(u) for u in units)
    logger.debug(f"Перечислена O(2;q) (q={field.q}, order={len(group)})")
    return group


def reflection(w: FqVector) -> OrthogonalMatrix:
    """R = I - 2 w wᵀ / ‖w‖."""
    length = w.norm()
    if not length:
        raise IsotropicMirrorError(f"Отражение в изотропном векторе {w!r} не определено")
    field, d = w.field, w.dim
    coefficient = 2 / length
    rows = [
        [(field.one if i == j else field.zero) - coefficient * w[i] * w[j] for j in range(d)]
        for i in range(d)
    ]
    return OrthogonalMatrix(FqMatrix.from_rows(rows))


def _reflection_step(u: FqVector, v: FqVector):
    """Изометрия u -> v из одного-двух отражений или None, если обе разности изотропны."""
    if u == v:
        return OrthogonalMatrix(FqMatrix.identity(u.field, u.dim))
    if (u - v).norm():
        return reflection(u - v)
    if (u + v).norm():
        # R_{u+v} переводит u в -v
        flip = reflection(u + v)
        if v.norm():
            return reflection(v) @ flip
        return -flip
    return None


@cached(cache=geometry_cache, key=cache_key("witt_map"), lock=cache_lock)
def witt_map(u: FqVector, v: FqVector) -> OrthogonalMatrix:
    """Ортогональная A с A·u = v для векторов одинаковой длины."""
    if u.dim != v.dim:
        raise LengthMismatchError(f"Разные размерности: {u.dim} и {v.dim}")
    if not u or not v:
        raise ZeroVectorError("Изометрия Витта строится только для ненулевых векторов")
    if u.norm() != v.norm():
        raise LengthMismatchError(f"Разные длины: {u.norm()!r} и {v.norm()!r}")

    step = _reflection_step(u, v)
    if step is not None:
        return step

    if u.dim == 2:
        for g in enumerate_O2(u.field):
            if g @ u == v:
                return g
        raise OrthogonalError(f"В O(2;q) нет элемента, переводящего {u!r} в {v!r}")

    # промежуточный z той же длины с неизотропными разностями
    for z in sphere(u.norm(), u.dim):
        if not z:
            continue
        first = _reflection_step(u, z)
        if first is None:
            continue
        second = _reflection_step(z, v)
        if second is not None:
            return second @ first
    raise OrthogonalError(f"Не найдена изометрия {u!r} -> {v!r}")
