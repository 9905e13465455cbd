from collections import defaultdict
from itertools import product

import pytest

from src.field.field_core import field_from_order, make_field
from src.geometry.triangle_classify import (
    congruence_witness,
    congruent,
    count_classes,
    enumerate_classes,
    gl2_order,
    invariants,
    is_realizable,
    mu_from_sides,
    o2_order,
    realize_invariant,
    second_column_solutions,
    third_side,
    triangle_exists_with_sides,
)
from src.models.models import FqMatrix, FqVector, TriangleInvariant
from src.orthogonal.isometry import enumerate_O2
from src.utils.errors import DegenerateTriangleError, UnrealizableInvariantError, ZeroFirstColumnError


def test_count_classes_formula():
    assert count_classes(3) == 6
    assert count_classes(5) == 60
    assert count_classes(7) == 126


@pytest.mark.parametrize("q", [3, 5, 7, 9, 11, 13])
def test_count_is_group_index(q):
    assert count_classes(q) == gl2_order(q) // o2_order(q)


@pytest.mark.parametrize("p, n", [(3, 1), (5, 1), (7, 1), (3, 2), (11, 1), (13, 1)])
def test_enumerate_classes_census(p, n):
    field = make_field(p, n)
    classes = enumerate_classes(field)
    assert len(classes) == count_classes(field.q)
    assert all(is_realizable(inv) for inv in classes)


def test_invariants_of_identity(f5):
    inv = invariants(FqMatrix.identity(f5, 2))
    assert inv.literal() == [1, 1, 0]


# ---------------------------------------------------------
# Второй столбец
# ---------------------------------------------------------
def test_second_column_solutions_axis(f5):
    solutions = second_column_solutions(f5.one, f5.zero, f5.one, f5.zero)
    assert [v.literal() for v in solutions] == [[0, 1], [0, 4]]


def test_second_column_solutions_satisfy_equations(f7):
    a, c = f7.embed(2), f7.embed(3)
    for L2 in f7.elements():
        for mu in f7.elements():
            for v in second_column_solutions(a, c, L2, mu):
                assert v.norm() == L2
                assert a * v[0] + c * v[1] == mu


def test_second_column_isotropic_first(f5):
    # (1, 2) изотропен в F_5
    a, c = f5.one, f5.embed(2)
    for v in second_column_solutions(a, c, f5.embed(3), f5.embed(4)):
        assert v.norm() == f5.embed(3)
        assert a * v[0] + c * v[1] == f5.embed(4)


def test_second_column_zero_first(f5):
    with pytest.raises(ZeroFirstColumnError):
        second_column_solutions(f5.zero, f5.zero, f5.one, f5.zero)


# ---------------------------------------------------------
# Конгруэнтность
# ---------------------------------------------------------
def test_congruent_under_rotation(f5):
    t = FqMatrix.from_literal(f5, [[1, 2], [3, 2]])
    for g in enumerate_O2(f5):
        assert congruent(t, g.matrix @ t)


def test_not_congruent(f5):
    t = FqMatrix.from_literal(f5, [[1, 0], [0, 1]])
    other = FqMatrix.from_literal(f5, [[1, 0], [0, 2]])
    assert not congruent(t, other)


def test_congruent_degenerate(f5):
    singular = FqMatrix.from_literal(f5, [[1, 2], [1, 2]])
    with pytest.raises(DegenerateTriangleError):
        congruent(singular, FqMatrix.identity(f5, 2))


@pytest.mark.parametrize("p, n", [(5, 1), (7, 1), (3, 2)])
def test_realize_every_class(p, n):
    field = make_field(p, n)
    for inv in enumerate_classes(field):
        t = realize_invariant(inv)
        assert t.det()
        assert invariants(t) == inv


def test_realize_unrealizable(f5):
    with pytest.raises(UnrealizableInvariantError):
        realize_invariant(TriangleInvariant(f5.zero, f5.zero, f5.zero))


@pytest.mark.parametrize("p", [3, 5, 7])
def test_congruence_witness(p):
    field = make_field(p)
    for inv in enumerate_classes(field)[::3]:
        t = realize_invariant(inv)
        for g in enumerate_O2(field):
            other = g.matrix @ t
            witness = congruence_witness(t, other)
            assert witness.matrix @ other == t


# ---------------------------------------------------------
# Стороны
# ---------------------------------------------------------
def test_sides_round_trip(f7):
    for L1 in f7.elements():
        for L2 in f7.elements():
            for L3 in f7.elements():
                inv = TriangleInvariant(L1, L2, mu_from_sides(L1, L2, L3))
                assert third_side(inv) == L3
                assert triangle_exists_with_sides(L1, L2, L3) == is_realizable(inv)


def test_unit_right_triangle_exists(f5):
    # e1, e2: стороны 1, 1, 2
    assert triangle_exists_with_sides(f5.one, f5.one, f5.embed(2))


@pytest.mark.parametrize("q", [3, 5, 7, 9])
def test_second_column_solutions_match_exhaustive_scan(q):
    field = field_from_order(q)
    elements = list(field.elements())
    for a, c in product(elements, repeat=2):
        if not a and not c:
            continue
        scan = defaultdict(set)
        for b, d in product(elements, repeat=2):
            scan[(b * b + d * d).value, (a * b + c * d).value].add(FqVector.from_elements([b, d]))
        for L2, mu in product(elements, repeat=2):
            solutions = second_column_solutions(a, c, L2, mu)
            assert len(solutions) == len(set(solutions))
            assert set(solutions) == scan[L2.value, mu.value], (a, c, L2, mu)
