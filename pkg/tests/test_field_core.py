import numpy as np
import pytest

from src.config.config import settings
from src.field.field_core import (
    LegendreValue,
    additive_character,
    coordinate_grid,
    encode_grid,
    field_arith,
    field_from_order,
    galois_trace,
    legendre,
    make_field,
    norm_grid,
    parse_prime_power,
    primitive_fourth_root,
    sqrt,
)
from src.utils.errors import (
    BadDegreeError,
    DivideByZeroError,
    EvenCharacteristicError,
    FieldError,
    FieldMismatchError,
    FieldTooLargeError,
    NonPrimeError,
)


# ---------------------------------------------------------
# Построение полей
# ---------------------------------------------------------
def test_make_field_orders(f5, f9):
    assert f5.q == 5
    assert f9.q == 9
    assert (f9.p, f9.n) == (3, 2)


def test_minimal_modulus_for_nine(f9):
    # x^2 + 1: минимальный неприводимый над F_3
    assert f9.modulus == (1, 0, 1)


def test_make_field_is_cached():
    assert make_field(7) is make_field(7)


@pytest.mark.parametrize(
    "p, n, error",
    [
        (4, 1, NonPrimeError),
        (1, 1, NonPrimeError),
        (2, 1, EvenCharacteristicError),
        (3, 0, BadDegreeError),
        (101, 2, FieldTooLargeError),
    ],
)
def test_make_field_errors(p, n, error):
    with pytest.raises(error):
        make_field(p, n)


def test_parse_prime_power():
    assert parse_prime_power(27) == (3, 3)
    assert parse_prime_power(13) == (13, 1)
    with pytest.raises(NonPrimeError):
        parse_prime_power(12)
    with pytest.raises(EvenCharacteristicError):
        parse_prime_power(8)


def test_field_from_order(f9):
    assert field_from_order(9) == f9


# ---------------------------------------------------------
# Арифметика
# ---------------------------------------------------------
def test_prime_field_arithmetic(f5):
    two, three = f5.embed(2), f5.embed(3)
    assert two * three == f5.one
    assert two + three == f5.zero
    assert two.inverse() == three
    assert -two == three
    assert two - three == f5.embed(4)
    assert f5.one / two == three


def test_int_operand_is_prime_subfield_scalar(f9):
    x = f9.parse([0, 1])
    assert 2 * x == x + x
    assert x + 3 == x


def test_extension_field_tables_match_galois(f9):
    GF = f9.galois_field
    for a in range(9):
        for b in range(9):
            assert f9.add(a, b) == int(GF(a) + GF(b))
            assert f9.mul(a, b) == int(GF(a) * GF(b))


def test_inverse_table(f9):
    for a in range(1, 9):
        assert f9.mul(a, f9.inv(a)) == 1
    assert f9.inv_table[0] == -1


def test_scalar_path_matches_tables(f9, monkeypatch):
    tables = {
        "add": f9.add_table.copy(),
        "mul": f9.mul_table.copy(),
        "legendre": f9.legendre_table.copy(),
        "trace": f9.trace_table.copy(),
    }
    monkeypatch.setattr(settings, "TABLE_LIMIT", 0)
    assert not f9.has_tables
    for a in range(9):
        assert f9.legendre_index(a) == tables["legendre"][a]
        assert f9.trace_index(a) == tables["trace"][a]
        for b in range(9):
            assert f9.add(a, b) == tables["add"][a, b]
            assert f9.mul(a, b) == tables["mul"][a, b]


def test_divide_by_zero(f5):
    with pytest.raises(DivideByZeroError):
        f5.one / f5.zero
    with pytest.raises(ZeroDivisionError):
        f5.zero.inverse()


def test_field_mismatch(f5, f7):
    with pytest.raises(FieldMismatchError):
        f5.one + f7.one


def test_field_arith_dispatch(f5):
    two = f5.embed(2)
    assert field_arith("pow", two, 4) == f5.one
    assert field_arith("mul", two, two) == f5.embed(4)
    assert field_arith("neg", two) == f5.embed(3)
    with pytest.raises(FieldError):
        field_arith("sqrt", two)


# ---------------------------------------------------------
# Литералы
# ---------------------------------------------------------
def test_parse_literals(f9):
    x = f9.parse([1, 2])
    assert x.value == 7
    assert x.literal() == [1, 2]
    assert f9.parse(4) == f9.one
    assert f9.parse([0, 1]).coeffs == [0, 1]


def test_parse_rejects_bad_literals(f9):
    with pytest.raises(FieldError):
        f9.parse(True)
    with pytest.raises(FieldError):
        f9.parse([1, 1, 1])
    with pytest.raises(FieldError):
        f9.parse("1")


def test_prime_field_literal_is_int(f7):
    assert f7.embed(10).literal() == 3


# ---------------------------------------------------------
# Лежандр, корни, след, характер
# ---------------------------------------------------------
def test_legendre_values(f5):
    assert legendre(f5.zero) == LegendreValue.ZERO
    assert legendre(f5.embed(4)) == LegendreValue.RESIDUE
    assert legendre(f5.embed(2)) == LegendreValue.NONRESIDUE


def test_sqrt_sorted_pairs(f5, f7):
    assert sqrt(f5.embed(4)) == (f5.embed(2), f5.embed(3))
    assert sqrt(f5.embed(2)) is None
    assert sqrt(f5.zero) == (f5.zero,)
    # q ≡ 3 (mod 4): корень через x^{(q+1)/4}
    assert sqrt(f7.embed(2)) == (f7.embed(3), f7.embed(4))


def test_sqrt_in_extension(f9):
    for x in f9.nonzero_elements():
        roots = sqrt(x)
        if legendre(x) == LegendreValue.RESIDUE:
            assert len(roots) == 2
            assert all(r * r == x for r in roots)
        else:
            assert roots is None


def test_galois_trace(f9):
    assert galois_trace(f9.one) == 2
    # x^3 = -x при x^2 = -1
    assert galois_trace(f9.parse([0, 1])) == 0
    assert set(f9.trace_table.tolist()) == {0, 1, 2}


def test_additive_character(f9):
    assert additive_character(f9.zero) == pytest.approx(1)
    for x in f9.elements():
        assert abs(additive_character(x)) == pytest.approx(1, abs=settings.tolerance.UNIT_MODULUS_TOL)
    assert abs(sum(additive_character(x) for x in f9.elements())) < 1e-9


def test_primitive_fourth_root(f5, f7, f9):
    assert primitive_fourth_root(f5) == f5.embed(2)
    assert primitive_fourth_root(f7) is None
    i = primitive_fourth_root(f9)
    assert i.literal() == [0, 1]
    assert i * i == -f9.one


# ---------------------------------------------------------
# Сетки координат
# ---------------------------------------------------------
def test_coordinate_grid_order(f3):
    grid = coordinate_grid(f3, 2)
    assert grid.shape == (9, 2)
    assert grid[1].tolist() == [0, 1]
    assert grid[3].tolist() == [1, 0]
    assert np.array_equal(encode_grid(f3, grid), np.arange(9))


def test_norm_grid(f5):
    norms = norm_grid(f5, 2)
    index = int(encode_grid(f5, np.array([1, 2])))
    assert norms[index] == 0
    assert norms[int(encode_grid(f5, np.array([1, 1])))] == 2
