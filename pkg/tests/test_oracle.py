import numpy as np
import pytest

from src.field.field_core import make_field
from src.geometry.triangle_classify import count_classes
from src.models.models import ConnectionSet, FqMatrix, FqVector
from src.oracle.oracle_bruteforce import (
    coset_orbits,
    min_count,
    min_orth_sum,
    min_unit_sum,
    orthogonal_connection,
    orthogonal_group,
    sumset_closure,
    zero_three_units_brute,
)
from src.spectrum.cayley_spectrum import sphere_connection
from src.utils.errors import AmbientTooLargeError


# ---------------------------------------------------------
# BFS
# ---------------------------------------------------------
def test_sharp_four_units(f5):
    assert min_unit_sum(FqVector.from_literal(f5, [2, 2])) == 4


def test_unit_vector_is_one_step(f5):
    assert min_unit_sum(FqVector.from_literal(f5, [0, 1])) == 1
    assert min_unit_sum(FqVector.zeros(f5, 2)) == 2


def test_every_vector_reachable_for_three(f3):
    distance_map = sumset_closure(sphere_connection(f3, 2))
    assert distance_map.diameter == 2
    assert np.all(distance_map.dist > 0)


@pytest.mark.parametrize("p", [7, 11])
def test_isotropic_three_space_vectors(p):
    field = make_field(p)
    minus_one = -field.one
    for a in field.elements():
        for b in field.elements():
            if a * a + b * b == minus_one:
                v = FqVector.from_elements([a, b, minus_one])
                assert min_unit_sum(v) == 3


def test_o2_diameter_at_five(f5):
    witness = FqMatrix.from_literal(f5, [[1, 0], [1, 0]])
    assert min_orth_sum(witness) == 8
    assert sumset_closure(orthogonal_connection(f5, 2)).diameter == 8


def test_min_count_dispatch(f5):
    assert min_count(FqVector.from_literal(f5, [2, 2])) == 4
    assert min_count(FqMatrix.identity(f5, 2)) == 1


def test_distance_map_argmax(f5):
    distance_map = sumset_closure(sphere_connection(f5, 2))
    assert distance_map.dist[distance_map.argmax()] == distance_map.diameter
    assert distance_map.index_of([2, 2]) == 12


@pytest.mark.parametrize("kind", ["vector", "matrix"])
def test_distances_do_not_depend_on_generator_order(f5, kind):
    G = sphere_connection(f5, 2) if kind == "vector" else orthogonal_connection(f5, 2)
    shuffled = ConnectionSet(G.label, G.field, G.d, G.kind, tuple(reversed(G.elements)))
    assert np.array_equal(sumset_closure(shuffled).dist, sumset_closure(G).dist)


def test_ambient_too_large():
    with pytest.raises(AmbientTooLargeError):
        orthogonal_group(make_field(13), 3)


# ---------------------------------------------------------
# Группы и орбиты
# ---------------------------------------------------------
def test_orthogonal_group_plane(f5):
    assert len(orthogonal_group(f5, 2)) == 8


def test_orthogonal_group_three_space(f3):
    group = orthogonal_group(f3, 3)
    # |O(3;q)| = 2q(q^2 - 1)
    assert len(group) == 48
    identity = FqMatrix.identity(f3, 3)
    assert all(g.transpose() @ g == identity for g in group)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_coset_orbits_count(p):
    field = make_field(p)
    invertible, labels = coset_orbits(field)
    assert len(invertible) == p * (p + 1) * (p - 1) ** 2
    assert len(np.unique(labels)) == count_classes(p)


def test_zero_three_units_brute(f3, f5):
    assert zero_three_units_brute(f3)
    assert not zero_three_units_brute(f5)
