from dataclasses import replace

import numpy as np
import pytest

from src.config.config import settings
from src.field.field_core import FieldElement, coordinate_grid, make_field
from src.geometry.vector_geometry import sphere
from src.models.models import FqMatrix, FqVector, OrthogonalMatrix
from src.orthogonal.isometry import (
    enumerate_O2,
    is_orthogonal,
    plane_reflection,
    reflection,
    rotation,
    witt_map,
)
from src.orthogonal.orthogonal_decomp import (
    decompose_2x2,
    decompose_dxd,
    decompose_matrix,
    first_col_unit_split,
    orthogonal_count,
    permutation_swap,
    verify_orthogonal_decomposition,
)
from src.utils.errors import (
    DimensionTooSmallError,
    IsotropicMirrorError,
    LengthMismatchError,
    OrthogonalError,
    ZeroVectorError,
)


def random_matrices(field, d, size, seed=7):
    rng = np.random.default_rng(seed)
    return [FqMatrix.from_array(field, values) for values in rng.integers(0, field.q, size=(size, d, d))]


# ---------------------------------------------------------
# O(2;q) и отражения
# ---------------------------------------------------------
@pytest.mark.parametrize("p, n, order", [(3, 1, 8), (5, 1, 8), (7, 1, 16), (3, 2, 16), (13, 1, 24)])
def test_enumerate_O2_order(p, n, order):
    group = enumerate_O2(make_field(p, n))
    assert len(group) == order
    assert len({g.matrix for g in group}) == order
    assert all(is_orthogonal(g.matrix) for g in group)


def test_rotation_and_reflection_forms(f5):
    u = FqVector.from_literal(f5, [0, 1])
    assert rotation(u).matrix.literal() == [[0, 4], [1, 0]]
    assert plane_reflection(u).matrix.literal() == [[0, 1], [1, 0]]


def test_orthogonal_matrix_rejects(f5):
    with pytest.raises(OrthogonalError):
        OrthogonalMatrix(FqMatrix.from_literal(f5, [[1, 1], [0, 1]]))


def test_reflection_swaps_mirror(f7):
    w = FqVector.from_literal(f7, [1, 2, 2])
    R = reflection(w)
    assert R @ w == -w
    assert R @ R == OrthogonalMatrix(FqMatrix.identity(f7, 3))


def test_reflection_isotropic(f5):
    with pytest.raises(IsotropicMirrorError):
        reflection(FqVector.from_literal(f5, [1, 2]))


# ---------------------------------------------------------
# Изометрия Витта
# ---------------------------------------------------------
@pytest.mark.parametrize("t", [1, 2, 0])
def test_witt_map_three_space(f5, t):
    points = [v for v in sphere(f5.embed(t), 3) if v][:8]
    for u in points:
        for v in points:
            g = witt_map(u, v)
            assert g @ u == v


def test_witt_map_isotropic_plane(f5):
    u = FqVector.from_literal(f5, [1, 2])
    v = FqVector.from_literal(f5, [2, 1])
    assert witt_map(u, v) @ u == v


def test_witt_map_errors(f5):
    u = FqVector.from_literal(f5, [1, 0])
    with pytest.raises(LengthMismatchError):
        witt_map(u, FqVector.from_literal(f5, [1, 1]))
    with pytest.raises(ZeroVectorError):
        witt_map(FqVector.zeros(f5, 2), FqVector.zeros(f5, 2))
    with pytest.raises(LengthMismatchError):
        witt_map(u, FqVector.from_literal(f5, [1, 0, 0]))


# ---------------------------------------------------------
# Разложения
# ---------------------------------------------------------
def test_orthogonal_count_table():
    assert orthogonal_count(2, 5) == 8
    assert orthogonal_count(2, 7) == 6
    assert orthogonal_count(3, 3) == 54
    assert orthogonal_count(3, 5) == 48
    assert orthogonal_count(4, 3) == 324
    with pytest.raises(DimensionTooSmallError):
        orthogonal_count(1, 5)


@pytest.mark.parametrize("p, n", [(3, 1), (5, 1), (7, 1), (3, 2)])
def test_decompose_2x2_everywhere(p, n):
    field = make_field(p, n)
    expected = orthogonal_count(2, field.q)
    for row in coordinate_grid(field, 4):
        decomposition = decompose_2x2(FqMatrix.from_array(field, row.reshape(2, 2)))
        assert decomposition.count == expected
        assert verify_orthogonal_decomposition(decomposition)


def test_decompose_sharp_example(f5):
    decomposition = decompose_matrix(FqMatrix.from_literal(f5, [[1, 0], [1, 0]]))
    assert decomposition.count == 8
    assert decomposition.verify()


def test_permutation_swap(f3):
    P = permutation_swap(f3, 3)
    assert P.matrix.literal() == [[0, 1, 0], [1, 0, 0], [0, 0, 1]]


def test_first_col_unit_split(f5):
    A = FqMatrix.from_literal(f5, [[2, 1, 0], [2, 3, 4], [0, 1, 1]])
    parts = first_col_unit_split(A)
    total = parts[0]
    for part in parts[1:]:
        total = total + part
    assert total == A
    assert all(part.column(0).norm() == f5.one for part in parts)


@pytest.mark.parametrize("p, d", [(3, 3), (5, 3)])
def test_decompose_dxd_samples(p, d):
    field = make_field(p)
    expected = orthogonal_count(d, p)
    samples = random_matrices(field, d, 5) + [FqMatrix.zeros(field, d), FqMatrix.identity(field, d)]
    for A in samples:
        decomposition = decompose_dxd(A)
        assert decomposition.count == expected
        assert decomposition.verify()


def test_decompose_dxd_four(f3):
    A = random_matrices(f3, 4, 1, seed=11)[0]
    decomposition = decompose_matrix(A)
    assert decomposition.count == 324
    assert decomposition.verify()


def test_decompose_dxd_rejects_plane(f5):
    with pytest.raises(DimensionTooSmallError):
        decompose_dxd(FqMatrix.identity(f5, 2))


# ---------------------------------------------------------
# Табличная арифметика и пересчет
# ---------------------------------------------------------
@pytest.mark.parametrize("d", [2, 3])
def test_table_arithmetic_matches_galois(f9, monkeypatch, d):
    A, B = random_matrices(f9, d, 2, seed=5)
    v = A.row(0)
    with_tables = [A + B, A - B, -A, A @ B, A.scale(FieldElement(f9, 7)), A @ v]

    monkeypatch.setattr(settings, "TABLE_LIMIT", 0)
    assert not f9.has_tables
    assert [A + B, A - B, -A, A @ B, A.scale(FieldElement(f9, 7)), A @ v] == with_tables


def test_verify_rejects_tampered_decomposition(f5, monkeypatch):
    A = FqMatrix.from_literal(f5, [[1, 0], [1, 0]])
    decomposition = decompose_matrix(A)
    assert decomposition.verify()

    shifted = (OrthogonalMatrix(FqMatrix.identity(f5, 2)),) + decomposition.parts[1:]
    short = decomposition.parts[:-1]
    tampered = [
        replace(decomposition, parts=shifted),
        replace(decomposition, parts=short),
        replace(decomposition, parts=short, declared_count=len(short)),
    ]
    if decomposition.parts[0].matrix == FqMatrix.identity(f5, 2):
        tampered = tampered[1:]
    assert not any(item.verify() for item in tampered)

    monkeypatch.setattr(settings, "TABLE_LIMIT", 0)
    assert decomposition.verify()
    assert not any(item.verify() for item in tampered)
