"""
Независимый перебор: BFS по сумм-множествам G, G+G, ... в F_q^d и Mat_d(F_q).

Элементы окружающего пространства нумеруются плоскими индексами (см. coordinate_grid),
слои BFS хранятся булевыми массивами посещенных вершин.
"""

from typing import Optional, Union

import numpy as np
from cachetools import cached

from src.config.config import settings
from src.config.logger_config import logger
from src.field.field_core import FieldSpec, coordinate_grid, encode_grid, matmul_table, norm_grid
from src.models.models import ConnectionSet, DistanceMap, FqMatrix, FqVector
from src.orthogonal.isometry import enumerate_O2
from src.spectrum.cayley_spectrum import sphere_connection
from src.utils.cache import cache_key, cache_lock, geometry_cache, oracle_cache
from src.utils.errors import AmbientTooLargeError


# ---------------------------------------------------------
# region BFS
# ---------------------------------------------------------
@cached(cache=oracle_cache, key=cache_key("sumset_closure"), lock=cache_lock)
def sumset_closure(generators: ConnectionSet) -> DistanceMap:
    """dist(x) = минимальное m с x ∈ mG; 0 в dist означает недостижимость."""
    field = generators.field
    rank = generators.ambient_rank
    size = field.q**rank
    if size > settings.ORACLE_AMBIENT_LIMIT:
        raise AmbientTooLargeError(f"Окружающее пространство {size} больше ORACLE_AMBIENT_LIMIT")

    G = generators.flat_values()
    dist = np.zeros(size, dtype=np.int64)
    visited = np.zeros(size, dtype=bool)

    frontier = np.unique(encode_grid(field, G))
    layer = 1
    while frontier.size:
        dist[frontier] = layer
        visited[frontier] = True

        digits = coordinate_grid(field, rank)[frontier]
        sums = field.add_table[digits[:, None, :], G[None, :, :]].reshape(-1, rank)
        candidates = np.unique(encode_grid(field, sums))
        frontier = candidates[~visited[candidates]]
        layer += 1

    distance_map = DistanceMap(field, generators.label, rank, dist)
    logger.info(
        f"BFS завершен (label={generators.label}, q={field.q}, size={size}, "
        f"diameter={distance_map.diameter})"
    )
    return distance_map


def min_unit_sum(v: FqVector) -> Optional[int]:
    return sumset_closure(sphere_connection(v.field, v.dim)).distance(v)


def min_orth_sum(A: FqMatrix) -> Optional[int]:
    return sumset_closure(orthogonal_connection(A.field, A.dim)).distance(A)


def min_count(element: Union[FqVector, FqMatrix]) -> Optional[int]:
    if isinstance(element, FqVector):
        return min_unit_sum(element)
    return min_orth_sum(element)


# endregion
# ---------------------------------------------------------


# ---------------------------------------------------------
# region Группы
# ---------------------------------------------------------
def _reflection_arrays(field: FieldSpec, d: int) -> np.ndarray:
    """Все отражения R_w = I - 2 w wᵀ/‖w‖ по неизотропным w, форма (k, d, d)."""
    grid = coordinate_grid(field, d)
    norms = norm_grid(field, d)
    mirrors = grid[norms != 0]
    scale = field.mul_table[2 % field.p, field.inv_table[norms[norms != 0]]]
    outer = field.mul_table[mirrors[:, :, None], mirrors[:, None, :]]
    correction = field.mul_table[scale[:, None, None], outer]
    identity = np.eye(d, dtype=np.int64)
    reflections = field.add_table[identity[None, :, :], field.neg_table[correction]]
    return np.unique(reflections.reshape(len(mirrors), -1), axis=0).reshape(-1, d, d)


@cached(cache=geometry_cache, key=cache_key("orthogonal_group"), lock=cache_lock)
def orthogonal_group(field: FieldSpec, d: int) -> tuple[FqMatrix, ...]:
    """O(2;q) перечислением, O(d;q) при d >= 3 — замыканием отражений по умножению."""
    if d == 2:
        return tuple(g.matrix for g in enumerate_O2(field))
    if field.q ** (d * d) > settings.ORACLE_AMBIENT_LIMIT:
        raise AmbientTooLargeError(f"Mat_{d}(F_{field.q}) слишком велико для замыкания группы")

    reflections = _reflection_arrays(field, d)
    known = np.unique(encode_grid(field, reflections.reshape(len(reflections), -1)))
    frontier = reflections
    while len(frontier):
        products = matmul_table(field, frontier[:, None, :, :], reflections[None, :, :, :])
        products = products.reshape(-1, d, d)
        indices = encode_grid(field, products.reshape(len(products), -1))
        indices, first = np.unique(indices, return_index=True)
        fresh = ~np.isin(indices, known)
        frontier = products[first[fresh]]
        known = np.union1d(known, indices[fresh])

    digits = coordinate_grid(field, d * d)[known]
    group = tuple(FqMatrix.from_array(field, row.reshape(d, d)) for row in digits)
    logger.debug(f"Замкнута группа O(d;q) (d={d}, q={field.q}, order={len(group)})")
    return group


@cached(cache=oracle_cache, key=cache_key("orthogonal_connection"), lock=cache_lock)
def orthogonal_connection(field: FieldSpec, d: int) -> ConnectionSet:
    return ConnectionSet(f"O{d}", field, d, "matrix", orthogonal_group(field, d))


def coset_orbits(field: FieldSpec) -> tuple[np.ndarray, np.ndarray]:
    """
    Орбиты левого действия O(2;q) на GL_2(F_q).

    Возвращает плоские индексы матриц GL_2 и метку орбиты каждой (наименьший индекс в орбите).
    """
    grid = coordinate_grid(field, 4).reshape(-1, 2, 2)
    det = field.add_table[
        field.mul_table[grid[:, 0, 0], grid[:, 1, 1]],
        field.neg_table[field.mul_table[grid[:, 0, 1], grid[:, 1, 0]]],
    ]
    invertible = np.flatnonzero(det != 0)
    matrices = grid[invertible]

    labels = invertible.copy()
    for g in orthogonal_group(field, 2):
        moved = matmul_table(field, np.array(g.values, dtype=np.int64)[None, :, :], matrices)
        labels = np.minimum(labels, encode_grid(field, moved.reshape(len(matrices), -1)))
    return invertible, labels


def zero_three_units_brute(field: FieldSpec) -> bool:
    """0 ∈ S_1 + S_1 + S_1 ⟺ ‖u1 + u2‖ = 1 для некоторых единичных u1, u2."""
    units = coordinate_grid(field, 2)[norm_grid(field, 2) == 1]
    for start in range(0, len(units), 256):
        block = units[start:start + 256]
        sums = field.add_table[block[:, None, :], units[None, :, :]]
        norms = field.add_table[field.square_table[sums[..., 0]], field.square_table[sums[..., 1]]]
        if np.any(norms == 1):
            return True
    return False


# endregion
# ---------------------------------------------------------
