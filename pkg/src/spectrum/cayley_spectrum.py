"""
Спектры орграфов Кэли T_G над Mat_n(F_q) и F_q^d.

Собственные значения — суммы характеров λ_A = Σ_{g ∈ G} χ(Tr(A·g)); для векторного
G — λ_m = Σ_{x ∈ G} χ(m·x). Точные утверждения проверяются на целочисленных данных
поля, комплексные значения сравниваются с допусками из settings.tolerance.
"""

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from cachetools import cached

from src.config.config import settings
from src.config.logger_config import logger
from src.field.field_core import (
    FieldElement,
    FieldSpec,
    additive_character,
    coordinate_grid,
    encode_grid,
    matmul_table,
    primitive_fourth_root,
    reduce_sum,
    sqrt,
)
from src.geometry.triangle_classify import is_realizable, realize_invariant
from src.geometry.vector_geometry import sphere, sphere_count
from src.models.models import (
    ConnectionSet,
    FqMatrix,
    FqVector,
    SpectrumEntry,
    SpectrumReport,
    TriangleInvariant,
)
from src.orthogonal.isometry import enumerate_O2
from src.utils.cache import cache_key, cache_lock, geometry_cache
from src.utils.errors import AmbientTooLargeError, FieldError, UnrealizableInvariantError


# ---------------------------------------------------------
# region Порождающие множества
# ---------------------------------------------------------
def o2_connection(field: FieldSpec) -> ConnectionSet:
    return ConnectionSet("O2", field, 2, "matrix", tuple(g.matrix for g in enumerate_O2(field)))


def sphere_connection(field: FieldSpec, d: int = 2, t: Optional[FieldElement] = None) -> ConnectionSet:
    t = field.one if t is None else t
    points = tuple(x for x in sphere(t, d) if x)
    return ConnectionSet("unit-sphere" if t == field.one else f"sphere-{t.value}", field, d, "vector", points)


def _matrices_by_det(field: FieldSpec, predicate) -> tuple[FqMatrix, ...]:
    grid = coordinate_grid(field, 4)
    dets = field.add_table[
        field.mul_table[grid[:, 0], grid[:, 3]],
        field.neg_table[field.mul_table[grid[:, 1], grid[:, 2]]],
    ]
    chosen = grid[predicate(dets)]
    return tuple(FqMatrix.from_array(field, row.reshape(2, 2)) for row in chosen)


def sl2_connection(field: FieldSpec) -> ConnectionSet:
    return ConnectionSet("SL2", field, 2, "matrix", _matrices_by_det(field, lambda det: det == 1))


def gl2_connection(field: FieldSpec) -> ConnectionSet:
    return ConnectionSet("GL2", field, 2, "matrix", _matrices_by_det(field, lambda det: det != 0))


def power_subgroup_connection(field: FieldSpec, k: int) -> ConnectionSet:
    """Матрицы 1×1 вида x^k, x != 0: классическая задача Варинга в F_q."""
    powers = sorted({field.power(x, k) for x in range(1, field.q)})
    elements = tuple(FqMatrix(field, ((value,),)) for value in powers)
    return ConnectionSet(f"power-subgroup-{k}", field, 1, "matrix", elements)


def connection_by_name(field: FieldSpec, name: str, d: int = 2) -> ConnectionSet:
    if name == "o2":
        return o2_connection(field)
    if name == "sphere":
        return sphere_connection(field, d)
    if name == "sl2":
        return sl2_connection(field)
    if name == "gl2":
        return gl2_connection(field)
    raise FieldError(f"Неизвестное порождающее множество {name!r}")


# endregion
# ---------------------------------------------------------


# ---------------------------------------------------------
# region Собственные значения
# ---------------------------------------------------------
def _pairing_values(G: ConnectionSet) -> np.ndarray:
    """Координаты h(g), для которых λ_A = Σ χ(⟨A, h(g)⟩): gᵀ для матриц, g для векторов."""
    if G.kind == "matrix":
        return np.vstack([np.array(g.values, dtype=np.int64).T.reshape(-1) for g in G.elements])
    return G.flat_values()


def _eigenvalues_for(G: ConnectionSet, points: np.ndarray) -> np.ndarray:
    field = G.field
    H = _pairing_values(G)
    pairing = reduce_sum(field, field.mul_table[points[:, None, :], H[None, :, :]])
    return field.character_table[pairing].sum(axis=1)


@cached(cache=geometry_cache, key=cache_key("all_eigenvalues"), lock=cache_lock)
def all_eigenvalues(G: ConnectionSet) -> np.ndarray:
    """λ для всех элементов окружающего пространства в порядке плоских индексов."""
    field = G.field
    if field.q**G.ambient_rank > settings.ORACLE_AMBIENT_LIMIT:
        raise AmbientTooLargeError(f"Окружающее пространство слишком велико (q={field.q})")
    grid = coordinate_grid(field, G.ambient_rank)
    chunk = max(1, 2**22 // (len(G) * G.ambient_rank))
    eigenvalues = np.concatenate(
        [_eigenvalues_for(G, grid[start:start + chunk]) for start in range(0, len(grid), chunk)]
    )
    logger.debug(f"Посчитан спектр (label={G.label}, q={field.q}, size={len(eigenvalues)})")
    return eigenvalues


def _trace(A: FqMatrix) -> FieldElement:
    total = A.field.zero
    for i in range(A.dim):
        total = total + A[i, i]
    return total


def cayley_eigenvalue(A: Union[FqMatrix, FqVector], G: ConnectionSet) -> complex:
    """Прямое суммирование Σ_g χ(Tr(A·g)) (или Σ_g χ(m·g) для векторов)."""
    is_zero = A.is_zero() if isinstance(A, FqMatrix) else not A
    if is_zero:
        return complex(len(G))
    return complex(sum(character_of(A, g) for g in G.elements))


def character_of(A: Union[FqMatrix, FqVector], X: Union[FqMatrix, FqVector]) -> complex:
    if isinstance(A, FqMatrix):
        return additive_character(_trace(A @ X))
    return additive_character(A.dot(X))


def _random_point(field: FieldSpec, G: ConnectionSet, rng):
    values = rng.integers(0, field.q, size=G.ambient_rank)
    if G.kind == "matrix":
        return FqMatrix.from_array(field, values.reshape(G.d, G.d))
    return FqVector(field, tuple(int(x) for x in values))


def eigenfunction_check(A, G: ConnectionSet, samples: int = 100, seed: Optional[int] = None) -> bool:
    """Σ_g χ_A(x + g) = λ_A·χ_A(x) в случайных точках x."""
    rng = np.random.default_rng(settings.SEED if seed is None else seed)
    eigenvalue = cayley_eigenvalue(A, G)
    for _ in range(samples):
        x = _random_point(G.field, G, rng)
        shifted = sum(character_of(A, x + g) for g in G.elements)
        if abs(shifted - eigenvalue * character_of(A, x)) > settings.tolerance.EXACT_TOL * max(1, len(G)):
            logger.warning(f"Характер не является собственной функцией (label={G.label}, x={x.literal()})")
            return False
    return True


def spectral_gap_param(G: ConnectionSet) -> float:
    """n_* = (q^R / |G|)·max_{A != 0} |λ_A|, R — число координат элемента."""
    eigenvalues = all_eigenvalues(G)
    ambient = G.field.q**G.ambient_rank
    return ambient / len(G) * float(np.abs(eigenvalues[1:]).max())


def parseval_check(G: ConnectionSet) -> bool:
    eigenvalues = all_eigenvalues(G)
    expected = G.field.q**G.ambient_rank * len(G)
    observed = float(np.sum(np.abs(eigenvalues) ** 2))
    return abs(observed - expected) <= settings.tolerance.PARSEVAL_REL_TOL * expected


def equivalence_invariance_check(G: ConnectionSet) -> bool:
    """λ_{xAy} = λ_A для всех x, y из G и всех A (матричный G)."""
    field, d = G.field, G.d
    eigenvalues = all_eigenvalues(G)
    grid = coordinate_grid(field, d * d).reshape(-1, d, d)
    group = np.stack([np.array(g.values, dtype=np.int64) for g in G.elements])

    for x in group:
        left = matmul_table(field, x[None, :, :], grid)
        for y in group:
            moved = matmul_table(field, left, y[None, :, :])
            indices = encode_grid(field, moved.reshape(len(grid), -1))
            if np.abs(eigenvalues[indices] - eigenvalues).max() > settings.tolerance.EXACT_TOL:
                return False
    return True


# endregion
# ---------------------------------------------------------


# ---------------------------------------------------------
# region Замкнутые формулы
# ---------------------------------------------------------
def sphere_fourier(m: FqVector, t: FieldElement) -> complex:
    """F̂(m) = Σ_{x ∈ S_t} χ(-m·x)."""
    return complex(sum(additive_character(-m.dot(x)) for x in sphere(t, m.dim)))


def sphere_bound_check(field: FieldSpec) -> tuple[np.ndarray, float, np.ndarray]:
    """Спектр единичной окружности плоскости: |λ_m| <= 2√q при m != 0."""
    eigenvalues = all_eigenvalues(sphere_connection(field, 2))
    bound = 2 * float(np.sqrt(field.q))
    passed = np.abs(eigenvalues) <= bound + settings.tolerance.CLOSED_FORM_TOL
    passed[0] = abs(eigenvalues[0] - sphere_count(field.one, 2)) <= settings.tolerance.EXACT_TOL
    return eigenvalues, bound, passed


def kloosterman(a: FieldElement, b: FieldElement) -> complex:
    """Σ_{x != 0} χ(a·x + b/x)."""
    return complex(sum(additive_character(a * x + b / x) for x in a.field.nonzero_elements()))


def _closed_form_nonisotropic(L1: FieldElement, L2: FieldElement, mu: FieldElement) -> complex:
    roots = sqrt(L1 * L2 - mu * mu)
    if roots is None:
        raise UnrealizableInvariantError(f"L1·L2 - mu^2 не квадрат (L1={L1!r}, L2={L2!r}, mu={mu!r})")
    r = roots[0]
    one = L1.field.one
    plus = FqVector.from_elements([one + r / L1, mu / L1])
    minus = FqVector.from_elements([one - r / L1, mu / L1])
    return sphere_fourier(plus, L1) + sphere_fourier(minus, L1)


def o2_eigenvalue_closed_form(L1: FieldElement, L2: FieldElement, mu: FieldElement) -> complex:
    """
    λ_{L1,L2,mu} для T_{O(2;q)}:
        L1 != 0:       F̂_{L1}(1 + r/L1, mu/L1) + F̂_{L1}(1 - r/L1, mu/L1), r^2 = L1·L2 - mu^2;
        L1 = 0 != L2:  симметрия λ_{L1,L2,mu} = λ_{L2,L1,mu};
        L1 = L2 = 0:   K(1, -i·mu/2) + K(1, i·mu/2), i^2 = -1.
    """
    if L1:
        return _closed_form_nonisotropic(L1, L2, mu)
    if L2:
        return _closed_form_nonisotropic(L2, L1, mu)

    field = L1.field
    i = primitive_fourth_root(field)
    if i is None or not mu:
        raise UnrealizableInvariantError(f"Класс (0, 0, {mu.literal()}) не реализуется")
    one = field.one
    return kloosterman(one, -i * mu / 2) + kloosterman(one, i * mu / 2)


@dataclass(frozen=True)
class RankOneResult:
    eigenvalue: complex
    exceptional: bool  # a = ±b·i
    form_vanishes: bool
    bound: float
    passed: bool


def _unit_circle_sum(coefficients: tuple[FieldElement, FieldElement]) -> complex:
    alpha, beta = coefficients
    return complex(
        sum(additive_character(alpha * u[0] + beta * u[1]) for u in sphere(alpha.field.one, 2))
    )


def rank_one_eigenvalue(a: FieldElement, b: FieldElement, s: Optional[FieldElement] = None) -> RankOneResult:
    """
    λ для A = [[a, b], [s·a, s·b]] (s = None означает A = [[0, 0], [a, b]]):
    сумма двух S_1-сумм по линейным формам поворотной и отражательной частей.
    """
    field = a.field
    if s is None:
        forms = [(b, -a), (-b, a)]
    else:
        forms = [(a + s * b, b - s * a), (a - s * b, b + s * a)]

    eigenvalue = sum(_unit_circle_sum(form) for form in forms)
    i = primitive_fourth_root(field)
    exceptional = i is not None and (a == i * b or a == -i * b)
    form_vanishes = any(not alpha and not beta for alpha, beta in forms)

    sqrt_q = np.sqrt(field.q)
    bound = sphere_count(field.one, 2) + 2 * sqrt_q if form_vanishes else 4 * sqrt_q
    passed = abs(eigenvalue) <= bound + settings.tolerance.CLOSED_FORM_TOL
    return RankOneResult(complex(eigenvalue), exceptional, form_vanishes, float(bound), bool(passed))


# endregion
# ---------------------------------------------------------


# ---------------------------------------------------------
# region Отчет по границам
# ---------------------------------------------------------
def _matrix_data(field: FieldSpec):
    """Инварианты, определитель и признак обнуления линейной формы для всех матриц 2×2."""
    grid = coordinate_grid(field, 4)
    a11, a12, a21, a22 = grid.T
    add, mul, neg, sq = field.add_table, field.mul_table, field.neg_table, field.square_table

    L1 = add[sq[a11], sq[a21]]
    L2 = add[sq[a12], sq[a22]]
    mu = add[mul[a11, a12], mul[a21, a22]]
    det = add[mul[a11, a22], neg[mul[a12, a21]]]
    rotation_zero = (add[a11, a22] == 0) & (add[a12, neg[a21]] == 0)
    reflection_zero = (add[a11, neg[a22]] == 0) & (add[a12, a21] == 0)
    return grid, L1, L2, mu, det, rotation_zero | reflection_zero


def bound_report(field: FieldSpec) -> SpectrumReport:
    """Полный спектр T_{O(2;q)} и проверка всех ветвей оценок."""
    if field.q > settings.SPECTRUM_MAX_Q:
        raise AmbientTooLargeError(f"Полный спектр считается только до q={settings.SPECTRUM_MAX_Q}")

    G = o2_connection(field)
    eigenvalues = all_eigenvalues(G)
    grid, L1, L2, mu, det, form_zero = _matrix_data(field)

    q = field.q
    sqrt_q = np.sqrt(q)
    so2_order = len(G) // 2
    tolerance = settings.tolerance

    # ветвь для каждой ненулевой матрицы
    equal_lengths = (det != 0) & (L1 == L2) & (L1 != 0) & (mu == 0)
    branch = np.where(det != 0, "nondegenerate", np.where(form_zero, "rank_one_exceptional", "rank_one"))
    branch = np.where(equal_lengths, "equal_lengths", branch)
    bound = np.where(branch == "rank_one_exceptional", so2_order + 2 * sqrt_q, 4 * sqrt_q)
    bound = np.where(equal_lengths, 2 * sqrt_q, bound)
    deviation = np.where(equal_lengths, np.abs(eigenvalues - so2_order), np.abs(eigenvalues))
    passed = deviation <= bound + tolerance.CLOSED_FORM_TOL

    entries: list[SpectrumEntry] = []
    groups: dict[tuple, list[int]] = {}
    for index in range(1, len(grid)):
        key = (int(L1[index]), int(L2[index]), int(mu[index]), str(branch[index]))
        groups.setdefault(key, []).append(index)

    constant = True
    for (l1, l2, m, name), members in sorted(groups.items()):
        representative = FqMatrix.from_array(field, grid[members[0]].reshape(2, 2))
        values = eigenvalues[members]
        if name in ("nondegenerate", "equal_lengths"):
            constant &= bool(np.abs(values - values[0]).max() <= tolerance.EXACT_TOL)
        inv = TriangleInvariant(*(FieldElement(field, x) for x in (l1, l2, m)))
        entries.append(
            SpectrumEntry(
                invariant=inv,
                representative=representative,
                eigenvalue=complex(values[0]),
                branch=name,
                bound=float(bound[members[0]]),
                passed=bool(passed[members].all()),
            )
        )

    by_class = {
        e.invariant.key(): e.eigenvalue for e in entries if e.branch in ("nondegenerate", "equal_lengths")
    }
    symmetric = all(
        abs(e.eigenvalue - by_class[e.invariant.swapped().key()]) <= tolerance.EXACT_TOL
        for e in entries
        if e.branch in ("nondegenerate", "equal_lengths")
    )
    closed_form = all(
        abs(o2_eigenvalue_closed_form(e.invariant.L1, e.invariant.L2, e.invariant.mu) - e.eigenvalue)
        <= tolerance.CLOSED_FORM_TOL
        for e in entries
        if e.branch in ("nondegenerate", "equal_lengths")
    )

    report = SpectrumReport(
        q=q,
        group_order=len(G),
        entries=entries,
        gap_param=spectral_gap_param(G),
        checks={
            "zero_eigenvalue": abs(eigenvalues[0] - len(G)) == 0 and len(G) == (2 * (q - 1) if q % 4 == 1 else 2 * (q + 1)),
            "constant_on_classes": constant,
            "symmetry": symmetric,
            "closed_form": closed_form,
            "parseval": parseval_check(G),
        },
    )
    failed = [e for e in entries if not e.passed]
    if failed or not all(report.checks.values()):
        logger.warning(f"Нарушены оценки спектра (q={q}, failed={len(failed)}, checks={report.checks})")
    else:
        logger.info(f"Оценки спектра выполнены (q={q}, classes={len(entries)}, gap={report.gap_param:.3f})")
    return report


def class_eigenvalue(inv: TriangleInvariant) -> complex:
    """λ по реализующему представителю класса (прямое суммирование)."""
    if not is_realizable(inv):
        raise UnrealizableInvariantError(f"Класс {inv.literal()} не реализуется")
    return cayley_eigenvalue(realize_invariant(inv), o2_connection(inv.field))


# endregion
# ---------------------------------------------------------
