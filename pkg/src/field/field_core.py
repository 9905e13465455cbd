"""
Арифметика в GF(p^n) для нечетного p.

Модель поля берется из galois (минимальный в лексикографическом порядке неприводимый
многочлен), а для q <= TABLE_LIMIT строятся плотные numpy-таблицы сложения, умножения,
символа Лежандра, следа и аддитивного характера. Элемент поля хранится индексом
0 <= value < q: value = c0 + c1*p + ... + c_{n-1}*p^{n-1}.
"""

import operator
from dataclasses import dataclass
from enum import IntEnum
from functools import cached_property, reduce
from typing import Iterator, Optional

import galois
import numpy as np
from cachetools import cached

from src.config.config import settings
from src.config.logger_config import logger
from src.utils.cache import cache_key, cache_lock, field_cache, geometry_cache
from src.utils.errors import (
    BadDegreeError,
    DivideByZeroError,
    EvenCharacteristicError,
    FieldError,
    FieldMismatchError,
    FieldTooLargeError,
    NonPrimeError,
)


class LegendreValue(IntEnum):
    NONRESIDUE = -1
    ZERO = 0
    RESIDUE = 1


# ---------------------------------------------------------
# region FieldSpec
# ---------------------------------------------------------
@dataclass(frozen=True)
class FieldSpec:
    p: int
    n: int
    modulus: tuple[int, ...]  # коэффициенты при x^0..x^n, старший равен 1

    @cached_property
    def q(self) -> int:
        return self.p**self.n

    @cached_property
    def galois_field(self):
        if self.n == 1:
            return galois.GF(self.p)
        prime_field = galois.GF(self.p)
        poly = galois.Poly(list(reversed(self.modulus)), field=prime_field)
        return galois.GF(self.q, irreducible_poly=poly)

    @property
    def has_tables(self) -> bool:
        return self.q <= settings.TABLE_LIMIT

    def __repr__(self):
        return f"F_{self.q}"

    # -----------------------------------------------------
    # Таблицы
    # -----------------------------------------------------
    @cached_property
    def _elements(self):
        return self.galois_field.elements

    @cached_property
    def add_table(self) -> np.ndarray:
        E = self._elements
        return (E[:, None] + E[None, :]).view(np.ndarray).astype(np.int64)

    @cached_property
    def mul_table(self) -> np.ndarray:
        E = self._elements
        return (E[:, None] * E[None, :]).view(np.ndarray).astype(np.int64)

    @cached_property
    def neg_table(self) -> np.ndarray:
        return (-self._elements).view(np.ndarray).astype(np.int64)

    @cached_property
    def inv_table(self) -> np.ndarray:
        """inv_table[0] = -1, обратного у нуля нет."""
        table = np.full(self.q, -1, dtype=np.int64)
        nonzero = self._elements[1:]
        table[1:] = np.reciprocal(nonzero).view(np.ndarray)
        return table

    @cached_property
    def square_table(self) -> np.ndarray:
        return np.diagonal(self.mul_table).copy()

    @cached_property
    def legendre_table(self) -> np.ndarray:
        # критерий Эйлера: x^{(q-1)/2} ∈ {0, 1, -1}
        powers = (self._elements ** ((self.q - 1) // 2)).view(np.ndarray).astype(np.int64)
        table = np.where(powers == 1, 1, -1).astype(np.int64)
        table[powers == 0] = 0
        return table

    @cached_property
    def root_table(self) -> np.ndarray:
        """Наименьший корень r с r^2 = x или -1, если x не квадрат."""
        table = np.full(self.q, -1, dtype=np.int64)
        squares, first_root = np.unique(self.square_table, return_index=True)
        table[squares] = first_root
        return table

    @cached_property
    def trace_table(self) -> np.ndarray:
        E = self._elements
        frobenius_orbit = [E ** (self.p**i) for i in range(self.n)]
        trace = reduce(operator.add, frobenius_orbit).view(np.ndarray).astype(np.int64)
        if np.any(trace >= self.p):
            raise FieldError(f"След вышел за пределы простого подполя (q={self.q})")
        return trace

    @cached_property
    def character_table(self) -> np.ndarray:
        return np.exp(2j * np.pi * self.trace_table / self.p)

    # -----------------------------------------------------
    # Скалярные операции над индексами
    # -----------------------------------------------------
    def _gf(self, value: int):
        return self.galois_field(value)

    def add(self, a: int, b: int) -> int:
        if self.has_tables:
            return int(self.add_table[a, b])
        return int(self._gf(a) + self._gf(b))

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.has_tables:
            return int(self.mul_table[a, b])
        return int(self._gf(a) * self._gf(b))

    def neg(self, a: int) -> int:
        if self.has_tables:
            return int(self.neg_table[a])
        return int(-self._gf(a))

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivideByZeroError(f"Нет обратного к нулю в {self!r}")
        if self.has_tables:
            return int(self.inv_table[a])
        return int(np.reciprocal(self._gf(a)))

    def power(self, a: int, k: int) -> int:
        if a == 0 and k < 0:
            raise DivideByZeroError(f"Отрицательная степень нуля в {self!r}")
        return int(self._gf(a) ** k)

    def legendre_index(self, a: int) -> int:
        if self.has_tables:
            return int(self.legendre_table[a])
        value = int(self._gf(a) ** ((self.q - 1) // 2))
        return 0 if value == 0 else (1 if value == 1 else -1)

    def root_index(self, a: int) -> Optional[int]:
        if self.legendre_index(a) < 0:
            return None
        if self.q % 4 == 3:
            r = self.power(a, (self.q + 1) // 4)
            return min(r, self.neg(r))
        if self.has_tables:
            return int(self.root_table[a])
        return next(r for r in range(self.q) if self.mul(r, r) == a)

    def trace_index(self, a: int) -> int:
        if self.has_tables:
            return int(self.trace_table[a])
        x = self._gf(a)
        return int(reduce(operator.add, [x ** (self.p**i) for i in range(self.n)]))

    def character_index(self, a: int) -> complex:
        if self.has_tables:
            return complex(self.character_table[a])
        return complex(np.exp(2j * np.pi * self.trace_index(a) / self.p))

    # -----------------------------------------------------
    # Элементы
    # -----------------------------------------------------
    def element(self, value: int) -> "FieldElement":
        if not 0 <= value < self.q:
            raise FieldError(f"Индекс {value} вне поля {self!r}")
        return FieldElement(self, value)

    def embed(self, k: int) -> "FieldElement":
        """Целое k как элемент простого подполя: k·1."""
        return FieldElement(self, k % self.p)

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    def elements(self) -> Iterator["FieldElement"]:
        """Все элементы в каноническом (лексикографическом) порядке."""
        for value in range(self.q):
            yield FieldElement(self, value)

    def nonzero_elements(self) -> Iterator["FieldElement"]:
        for value in range(1, self.q):
            yield FieldElement(self, value)

    def from_coeffs(self, coeffs) -> "FieldElement":
        coeffs = [int(c) for c in coeffs]
        if len(coeffs) > self.n or any(not 0 <= c < self.p for c in coeffs):
            raise FieldError(f"Некорректные коэффициенты {coeffs} для {self!r}")
        value = sum(c * self.p**i for i, c in enumerate(coeffs))
        return FieldElement(self, value)

    def parse(self, literal) -> "FieldElement":
        """Литерал: целое (элемент простого подполя) или список коэффициентов [c0, c1, ...]."""
        if isinstance(literal, bool):
            raise FieldError(f"Некорректный литерал элемента: {literal!r}")
        if isinstance(literal, int):
            return self.embed(literal)
        if isinstance(literal, (list, tuple)):
            return self.from_coeffs([c % self.p if isinstance(c, int) else c for c in literal])
        raise FieldError(f"Некорректный литерал элемента: {literal!r}")


# endregion
# ---------------------------------------------------------


# ---------------------------------------------------------
# region FieldElement
# ---------------------------------------------------------
@dataclass(frozen=True, slots=True)
class FieldElement:
    field: FieldSpec
    value: int

    def _other(self, other) -> Optional[int]:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatchError(f"Смешение полей: {self.field!r} и {other.field!r}")
            return other.value
        if isinstance(other, int) and not isinstance(other, bool):
            return self.field.embed(other).value
        return None

    def __add__(self, other):
        b = self._other(other)
        if b is None:
            return NotImplemented
        return FieldElement(self.field, self.field.add(self.value, b))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._other(other)
        if b is None:
            return NotImplemented
        return FieldElement(self.field, self.field.sub(self.value, b))

    def __rsub__(self, other):
        b = self._other(other)
        if b is None:
            return NotImplemented
        return FieldElement(self.field, self.field.sub(b, self.value))

    def __mul__(self, other):
        b = self._other(other)
        if b is None:
            return NotImplemented
        return FieldElement(self.field, self.field.mul(self.value, b))

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._other(other)
        if b is None:
            return NotImplemented
        return FieldElement(self.field, self.field.mul(self.value, self.field.inv(b)))

    def __rtruediv__(self, other):
        b = self._other(other)
        if b is None:
            return NotImplemented
        return FieldElement(self.field, self.field.mul(b, self.field.inv(self.value)))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.value))

    def __pow__(self, k: int):
        return FieldElement(self.field, self.field.power(self.value, k))

    def __bool__(self):
        return self.value != 0

    def __lt__(self, other: "FieldElement"):
        return self.value < other.value

    def __repr__(self):
        return f"{self.literal()}@{self.field!r}"

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field, self.field.inv(self.value))

    @property
    def coeffs(self) -> list[int]:
        digits, rest = [], self.value
        for _ in range(self.field.n):
            rest, digit = divmod(rest, self.field.p)
            digits.append(digit)
        return digits

    def literal(self):
        return self.value if self.field.n == 1 else self.coeffs


# endregion
# ---------------------------------------------------------


# ---------------------------------------------------------
# region operations
# ---------------------------------------------------------
@cached(cache=field_cache, key=cache_key("make_field"), lock=cache_lock)
def make_field(p: int, n: int = 1) -> FieldSpec:
    """Поле GF(p^n) с минимальным неприводимым модулем."""
    if not isinstance(n, int) or n < 1:
        raise BadDegreeError(f"Степень расширения должна быть >= 1 (n={n})")
    if not isinstance(p, int) or p < 2 or not galois.is_prime(p):
        raise NonPrimeError(f"Характеристика должна быть простым числом (p={p})")
    if p == 2:
        raise EvenCharacteristicError("Характеристика 2 не поддерживается")
    if p**n > settings.MAX_FIELD_ORDER:
        raise FieldTooLargeError(f"q={p**n} больше MAX_FIELD_ORDER={settings.MAX_FIELD_ORDER}")

    poly = galois.irreducible_poly(p, n, method="min")
    modulus = tuple(int(c) for c in reversed(poly.coeffs))
    field = FieldSpec(p=p, n=n, modulus=modulus)
    logger.debug(f"Построено поле {field!r} (p={p}, n={n}, modulus={modulus})")
    return field


def parse_prime_power(q: int) -> tuple[int, int]:
    if not isinstance(q, int) or q < 2:
        raise NonPrimeError(f"q должно быть степенью простого (q={q})")
    primes, multiplicities = galois.factors(q)
    if len(primes) != 1:
        raise NonPrimeError(f"q должно быть степенью простого (q={q})")
    p, n = int(primes[0]), int(multiplicities[0])
    if p == 2:
        raise EvenCharacteristicError("Характеристика 2 не поддерживается")
    return p, n


def field_from_order(q: int) -> FieldSpec:
    p, n = parse_prime_power(q)
    return make_field(p, n)


_ARITH = {
    "add": lambda x, y: x + y,
    "sub": lambda x, y: x - y,
    "mul": lambda x, y: x * y,
    "neg": lambda x: -x,
    "inv": lambda x: x.inverse(),
    "pow": lambda x, k: x**k,
}


def field_arith(op: str, *args):
    """Диспетчер операций CLI: add, sub, mul, neg, inv, pow."""
    if op not in _ARITH:
        raise FieldError(f"Неизвестная операция {op!r}")
    return _ARITH[op](*args)


def legendre(x: FieldElement) -> LegendreValue:
    return LegendreValue(x.field.legendre_index(x.value))


def sqrt(x: FieldElement) -> Optional[tuple[FieldElement, ...]]:
    """Корни {r, -r}, упорядоченные по индексу; None для невычетов."""
    r = x.field.root_index(x.value)
    if r is None:
        return None
    roots = sorted({r, x.field.neg(r)})
    return tuple(FieldElement(x.field, value) for value in roots)


def galois_trace(x: FieldElement) -> int:
    return x.field.trace_index(x.value)


def additive_character(x: FieldElement) -> complex:
    return x.field.character_index(x.value)


def primitive_fourth_root(field: FieldSpec) -> Optional[FieldElement]:
    """Первый i с i^2 = -1; существует только при q ≡ 1 (mod 4)."""
    if field.q % 4 != 1:
        return None
    minus_one = -field.one
    return next(x for x in field.nonzero_elements() if x * x == minus_one)


# endregion
# ---------------------------------------------------------


# ---------------------------------------------------------
# region grids
# ---------------------------------------------------------
@cached(cache=geometry_cache, key=cache_key("coordinate_grid"), lock=cache_lock)
def coordinate_grid(field: FieldSpec, k: int) -> np.ndarray:
    """Все наборы из k элементов, форма (q^k, k); первая координата старшая."""
    axes = np.indices((field.q,) * k).reshape(k, -1).T
    return np.ascontiguousarray(axes, dtype=np.int64)


def encode_grid(field: FieldSpec, digits: np.ndarray) -> np.ndarray:
    """Обратно к coordinate_grid: набор координат -> плоский индекс."""
    k = digits.shape[-1]
    weights = field.q ** np.arange(k - 1, -1, -1, dtype=np.int64)
    return digits @ weights


def reduce_sum(field: FieldSpec, terms: np.ndarray, axis: int = -1) -> np.ndarray:
    """Сумма в поле вдоль оси через таблицу сложения."""
    terms = np.moveaxis(terms, axis, -1)
    acc = terms[..., 0]
    for j in range(1, terms.shape[-1]):
        acc = field.add_table[acc, terms[..., j]]
    return acc


@cached(cache=geometry_cache, key=cache_key("norm_grid"), lock=cache_lock)
def norm_grid(field: FieldSpec, k: int) -> np.ndarray:
    """‖x‖ для всех x из coordinate_grid(field, k)."""
    return reduce_sum(field, field.square_table[coordinate_grid(field, k)])


def matmul_table(field: FieldSpec, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Произведение стопок матриц (..., d, d) с бродкастингом по ведущим осям."""
    products = field.mul_table[X[..., :, :, None], Y[..., None, :, :]]
    return reduce_sum(field, products, axis=-2)


# endregion
# ---------------------------------------------------------
