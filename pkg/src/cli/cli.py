"""
Командная строка: все операции библиотеки, сводная проверка и выгрузка таблиц.

Коды возврата: 0 — успех и все проверки пройдены, 1 — проверка не пройдена или
ошибка вычисления, 2 — ошибка аргументов.
"""

import argparse
import asyncio
import json
import multiprocessing
import re
import sys
from asyncio import Semaphore, gather
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, NamedTuple, Optional

import numpy as np
from pydantic import BaseModel, ValidationError

from src.config.config import settings
from src.config.logger_config import logger, set_console_level
from src.field.field_core import (
    FieldElement,
    FieldSpec,
    additive_character,
    coordinate_grid,
    field_arith,
    field_from_order,
    galois_trace,
    legendre,
    make_field,
    sqrt,
)
from src.geometry.triangle_classify import (
    congruent,
    count_classes,
    enumerate_classes,
    gl2_order,
    invariants,
    mu_from_sides,
    o2_order,
    triangle_exists_with_sides,
)
from src.geometry.vector_geometry import decompose_unit_sum, decompose_unit_sum_exact, unit_sum_bound
from src.models.models import FqMatrix, FqVector
from src.models.schemas import (
    ClassRow,
    EigenRow,
    FieldRecord,
    OracleRecord,
    OrthSumRecord,
    RunConfig,
    SphereBoundRow,
    SpectrumRow,
    TriangleCheckRecord,
    TriangleCountRecord,
    UnitSumRecord,
)
from src.oracle.oracle_bruteforce import orthogonal_connection, sumset_closure
from src.oracle.verify_suite import LedgerJob, Runner, execute_job, odd_prime_powers, run_sequential, verify_suite
from src.orthogonal.orthogonal_decomp import decompose_matrix
from src.spectrum.cayley_spectrum import (
    all_eigenvalues,
    bound_report,
    connection_by_name,
    sphere_bound_check,
    sphere_connection,
)
from src.utils.errors import FieldError, UsageError, WaringError
from src.utils.export import write_output


class CommandResult(NamedTuple):
    """Записи, все ли проверки пройдены, заголовок листа, параметры запуска и итоговая строка."""

    records: list[BaseModel]
    ok: bool
    title: str
    config: RunConfig
    summary: Optional[BaseModel] = None


class CliParser(argparse.ArgumentParser):
    """argparse без sys.exit: ошибка разбора поднимает UsageError с именем флага."""

    def error(self, message: str):
        match = re.search(r"argument (\S+?):", message) or re.search(r"(--[\w-]+)", message)
        flag = match.group(1) if match else self.prog
        raise UsageError(flag, message)


# ---------------------------------------------------------
# region Разбор аргументов
# ---------------------------------------------------------
def _json_literal(flag: str, text: Optional[str]):
    if text is None:
        raise UsageError(flag, "обязательный аргумент не указан")
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise UsageError(flag, f"некорректный JSON ({e.msg})") from e


def _parsed(flag: str, text: Optional[str], build: Callable):
    """JSON-литерал -> объект библиотеки; любая ошибка формы — ошибка аргумента."""
    literal = _json_literal(flag, text)
    try:
        return build(literal)
    except (WaringError, TypeError, ValueError) as e:
        raise UsageError(flag, str(e)) from e


def _resolve_field(args) -> FieldSpec:
    try:
        if args.q is not None:
            return field_from_order(args.q)
        if args.p is not None:
            return make_field(args.p, args.n if args.n is not None else 1)
    except FieldError as e:
        raise UsageError("--q" if args.q is not None else "--p", str(e)) from e
    raise UsageError("--q", "нужно указать --q или --p/--n")


def _run_config(args, field: Optional[FieldSpec], q: Optional[int] = None) -> RunConfig:
    return RunConfig(
        command=args.command,
        q=field.q if field is not None else q,
        d=getattr(args, "d", None) or 2,
        output_format=args.format,
        out=args.out,
        jobs=args.jobs if args.jobs is not None else settings.PARALLEL_WIDTH,
        verbosity=args.verbose,
        dims=getattr(args, "dims", None),
        deep=getattr(args, "deep", False),
    )


def _element_literal(field: FieldSpec, digits) -> list:
    return [FieldElement(field, int(v)).literal() for v in digits]


# endregion
# ---------------------------------------------------------


# ---------------------------------------------------------
# region Параллельный запуск
# ---------------------------------------------------------
async def _gather_jobs(jobs: list[LedgerJob], width: int) -> list:
    """
    Задания выполняются в отдельных процессах: ufunc-и galois держат
    глобальное состояние и не переносят вызовы из нескольких потоков.
    """
    loop = asyncio.get_running_loop()
    semaphore = Semaphore(width)

    with ProcessPoolExecutor(max_workers=width, mp_context=multiprocessing.get_context("spawn")) as pool:
        async def guarded(job: LedgerJob):
            async with semaphore:
                logger.debug(f"Старт задания (job={job.name})")
                return await loop.run_in_executor(pool, execute_job, job)

        # gather сохраняет порядок заданий
        return list(await gather(*(guarded(job) for job in jobs)))


def parallel_runner(width: int) -> Runner:
    if width <= 1:
        return run_sequential

    def run(jobs: list[LedgerJob]):
        return asyncio.run(_gather_jobs(jobs, width))

    return run


# endregion
# ---------------------------------------------------------


# ---------------------------------------------------------
# region Команды
# ---------------------------------------------------------
def cmd_field(args) -> CommandResult:
    field = _resolve_field(args)
    config = _run_config(args, field)
    record = FieldRecord(q=field.q, p=field.p, n=field.n, modulus=list(field.modulus))

    x = _parsed("--element", args.element, field.parse) if args.element is not None else None
    if x is not None:
        roots = sqrt(x)
        character = additive_character(x)
        record.element = x.literal()
        record.legendre = int(legendre(x))
        record.sqrt = [r.literal() for r in roots] if roots is not None else None
        record.trace = galois_trace(x)
        record.character_re = round(character.real, 9)
        record.character_im = round(character.imag, 9)

    if args.op is not None:
        if x is None:
            raise UsageError("--element", f"операция {args.op} требует --element")
        if args.op == "pow":
            if args.exponent is None:
                raise UsageError("--exponent", "операция pow требует --exponent")
            result = field_arith("pow", x, args.exponent)
        elif args.op in ("neg", "inv"):
            result = field_arith(args.op, x)
        else:
            other = _parsed("--other", args.other, field.parse)
            result = field_arith(args.op, x, other)
        record.op = args.op
        record.result = result.literal()

    return CommandResult([record], True, "Поле", config)


def cmd_decompose_vector(args) -> CommandResult:
    field = _resolve_field(args)
    v = _parsed("--vector", args.vector, lambda literal: FqVector.from_literal(field, literal))
    args.d = v.dim
    config = _run_config(args, field)

    bound = unit_sum_bound(v)
    if args.count is not None:
        decomposition = decompose_unit_sum_exact(v, args.count)
    else:
        decomposition = decompose_unit_sum(v)
    record = UnitSumRecord.from_decomposition(decomposition, bound, emit_parts=args.emit_parts)
    ok = record.verified and (args.count is not None or record.count <= bound)
    return CommandResult([record], ok, "Единичные векторы", config)


def cmd_decompose_matrix(args) -> CommandResult:
    field = _resolve_field(args)
    A = _parsed("--matrix", args.matrix, lambda literal: FqMatrix.from_literal(field, literal))
    args.d = A.dim
    config = _run_config(args, field)

    decomposition = decompose_matrix(A)
    record = OrthSumRecord.from_decomposition(decomposition, emit_parts=args.emit_parts)
    ok = record.verified and record.count == record.declared_count
    return CommandResult([record], ok, "Ортогональные матрицы", config)


def cmd_triangles(args) -> CommandResult:
    field = _resolve_field(args)
    config = _run_config(args, field)

    if args.action in ("count", "list"):
        classes = enumerate_classes(field)
        census = TriangleCountRecord(
            q=field.q,
            count=count_classes(field.q),
            enumerated=len(classes),
            index=gl2_order(field.q) // o2_order(field.q),
        )
        ok = census.count == census.enumerated == census.index
        if args.action == "count":
            return CommandResult([census], ok, "Перепись треугольников", config)
        rows = [ClassRow.from_invariant(inv) for inv in classes]
        return CommandResult(rows, ok, "Классы треугольников", config, summary=census)

    if args.sides is not None:
        sides = _parsed("--sides", args.sides, lambda literal: [field.parse(x) for x in literal])
        if len(sides) != 3:
            raise UsageError("--sides", "ожидалось три длины [L1, L2, L3]")
        L1, L2, L3 = sides
        record = TriangleCheckRecord(
            q=field.q,
            check="sides",
            result=triangle_exists_with_sides(L1, L2, L3),
            invariants=[L1.literal(), L2.literal(), mu_from_sides(L1, L2, L3).literal()],
        )
        return CommandResult([record], True, "Проверка треугольника", config)

    if args.matrix is None:
        raise UsageError("--matrix", "check требует --sides или --matrix")
    t = _parsed("--matrix", args.matrix, lambda literal: FqMatrix.from_literal(field, literal))
    if args.other_matrix is None:
        record = TriangleCheckRecord(q=field.q, check="invariants", result=True, invariants=invariants(t).literal())
        return CommandResult([record], True, "Проверка треугольника", config)

    other = _parsed("--other-matrix", args.other_matrix, lambda literal: FqMatrix.from_literal(field, literal))
    record = TriangleCheckRecord(
        q=field.q,
        check="congruent",
        result=congruent(t, other),
        invariants=invariants(t).literal(),
        other_invariants=invariants(other).literal(),
    )
    return CommandResult([record], True, "Проверка треугольника", config)


def _eigen_rows(field: FieldSpec, eigenvalues: np.ndarray, rank: int, matrix_shape: Optional[int]) -> list[EigenRow]:
    rows = []
    for digits, value in zip(coordinate_grid(field, rank), eigenvalues):
        element = _element_literal(field, digits)
        if matrix_shape:
            element = [element[i:i + matrix_shape] for i in range(0, rank, matrix_shape)]
        rows.append(EigenRow(element=element, re=round(float(value.real), 9), im=round(float(value.imag), 9)))
    return rows


def cmd_spectrum(args) -> CommandResult:
    field = _resolve_field(args)
    config = _run_config(args, field)

    if args.report == "full":
        G = connection_by_name(field, args.group, args.d)
        shape = G.d if G.kind == "matrix" else None
        return CommandResult(_eigen_rows(field, all_eigenvalues(G), G.ambient_rank, shape), True, f"Спектр {G.label}", config)

    if args.group == "o2":
        report = bound_report(field)
        rows = [SpectrumRow.from_entry(entry) for entry in report.entries]
        return CommandResult(rows, report.passed, "Оценки спектра O2", config)

    if args.group == "sphere":
        eigenvalues, bound, passed = sphere_bound_check(field)
        grid = coordinate_grid(field, 2)
        rows = [
            SphereBoundRow(
                m=_element_literal(field, grid[i]),
                re=round(float(eigenvalues[i].real), 9),
                im=round(float(eigenvalues[i].imag), 9),
                bound=round(bound, 9),
                passed=bool(passed[i]),
            )
            for i in range(1, len(grid))
        ]
        return CommandResult(rows, bool(passed.all()), "Оценки спектра окружности", config)

    raise UsageError("--report", f"для группы {args.group} доступен только отчет full")


def cmd_oracle(args) -> CommandResult:
    field = _resolve_field(args)
    config = _run_config(args, field)

    if args.kind == "vector":
        generators = sphere_connection(field, args.d)
        element = None
        if args.vector is not None:
            element = _parsed("--vector", args.vector, lambda literal: FqVector.from_literal(field, literal))
    else:
        generators = orthogonal_connection(field, args.d)
        element = None
        if args.matrix is not None:
            element = _parsed("--matrix", args.matrix, lambda literal: FqMatrix.from_literal(field, literal))

    if element is not None and element.dim != args.d:
        raise UsageError("--d", f"размерность элемента {element.dim} не совпадает с --d {args.d}")

    distance_map = sumset_closure(generators)
    record = OracleRecord(
        q=field.q,
        d=args.d,
        kind=args.kind,
        element=element.literal() if element is not None else None,
        distance=distance_map.distance(element) if element is not None else None,
        diameter=distance_map.diameter,
    )
    return CommandResult([record], True, "Оракул", config)


def cmd_verify_all(args) -> CommandResult:
    q_values = odd_prime_powers(3, args.qmax)
    if not q_values:
        raise UsageError("--qmax", f"нет нечетных степеней простых до {args.qmax}")
    config = _run_config(args, None, q=max(q_values))

    rows = verify_suite(q_values=q_values, dims=config.dims, deep=config.deep, runner=parallel_runner(config.jobs))
    return CommandResult(rows, all(row.passed for row in rows), "Сводная проверка", config)


# endregion
# ---------------------------------------------------------


def build_parser() -> CliParser:
    common = CliParser(add_help=False)
    common.add_argument("--format", default="json", choices=["json", "csv", "pretty", "xlsx"])
    common.add_argument("--out", default=None, help="файл результата (обязателен для xlsx)")
    common.add_argument("--jobs", type=int, default=None, help="ширина параллельного запуска")
    common.add_argument("-v", "--verbose", action="count", default=0)

    field_args = CliParser(add_help=False)
    field_args.add_argument("--q", type=int, default=None, help="порядок поля, нечетная степень простого")
    field_args.add_argument("--p", type=int, default=None, help="характеристика")
    field_args.add_argument("--n", type=int, default=None, help="степень расширения")

    parser = CliParser(prog="waring-toolkit", description="Задачи типа Варинга над конечными полями")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=CliParser)
    parents = [common, field_args]

    field = commands.add_parser("field", parents=parents, help="арифметика поля")
    field.add_argument("--element", default=None, help="литерал элемента (JSON)")
    field.add_argument("--op", default=None, choices=["add", "sub", "mul", "neg", "inv", "pow"])
    field.add_argument("--other", default=None, help="второй операнд (JSON)")
    field.add_argument("--exponent", type=int, default=None)
    field.set_defaults(handler=cmd_field)

    vector = commands.add_parser("decompose-vector", parents=parents, help="сумма единичных векторов")
    vector.add_argument("--vector", required=True, help="вектор (JSON)")
    vector.add_argument("--count", type=int, default=None, help="точное число слагаемых")
    vector.add_argument("--emit-parts", action=argparse.BooleanOptionalAction, default=True)
    vector.set_defaults(handler=cmd_decompose_vector)

    matrix = commands.add_parser("decompose-matrix", parents=parents, help="сумма ортогональных матриц")
    matrix.add_argument("--matrix", required=True, help="матрица (JSON)")
    matrix.add_argument("--emit-parts", action=argparse.BooleanOptionalAction, default=True)
    matrix.set_defaults(handler=cmd_decompose_matrix)

    triangles = commands.add_parser("triangles", parents=parents, help="классы конгруэнтности треугольников")
    triangles.add_argument("action", choices=["count", "list", "check"])
    triangles.add_argument("--sides", default=None, help="[L1, L2, L3] (JSON)")
    triangles.add_argument("--matrix", default=None, help="треугольник-матрица (JSON)")
    triangles.add_argument("--other-matrix", default=None, help="второй треугольник (JSON)")
    triangles.set_defaults(handler=cmd_triangles)

    spectrum = commands.add_parser("spectrum", parents=parents, help="спектры орграфов Кэли")
    spectrum.add_argument("--group", default="o2", choices=["o2", "sphere", "sl2", "gl2"])
    spectrum.add_argument("--report", default="bounds", choices=["bounds", "full"])
    spectrum.add_argument("--d", type=int, default=2)
    spectrum.set_defaults(handler=cmd_spectrum)

    oracle = commands.add_parser("oracle", parents=parents, help="перебор по сумм-множествам")
    oracle.add_argument("--kind", required=True, choices=["vector", "matrix"])
    oracle.add_argument("--d", type=int, default=2)
    oracle.add_argument("--vector", default=None, help="вектор (JSON)")
    oracle.add_argument("--matrix", default=None, help="матрица (JSON)")
    oracle.set_defaults(handler=cmd_oracle)

    verify = commands.add_parser("verify-all", parents=[common], help="сводная проверка всех утверждений")
    verify.add_argument("--qmax", type=int, default=max(settings.VERIFY_Q_VALUES))
    verify.add_argument("--dims", type=int, nargs="+", default=None, help="размерности векторных проверок")
    verify.add_argument("--deep", action="store_true", help="включить d = 4 и полные переборы")
    verify.set_defaults(handler=cmd_verify_all)

    return parser


def run(argv: Optional[list[str]] = None) -> int:
    """Точка входа CLI; возвращает код завершения."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.verbose:
            set_console_level("DEBUG")
        logger.info(f"Запуск команды (command={args.command}, format={args.format})")

        result = args.handler(args)
        ok = result.ok
        write_output(
            result.records,
            result.config.output_format,
            result.config.out,
            title=result.title,
            summary=result.summary,
        )
    except SystemExit as e:
        # --help
        return e.code if isinstance(e.code, int) else 0
    except UsageError as e:
        logger.error(f"Ошибка аргументов (flag={e.flag}): {e}")
        sys.stderr.write(f"ошибка: {e}\n")
        return 2
    except (ValidationError, json.JSONDecodeError) as e:
        logger.error(f"Некорректные параметры запуска: {e}")
        sys.stderr.write(f"ошибка: {e}\n")
        return 2
    except WaringError as e:
        logger.error(f"Ошибка вычисления ({type(e).__name__}): {e}")
        sys.stderr.write(f"ошибка: {e}\n")
        return 1
    except Exception as e:
        logger.exception(f"Непредвиденная ошибка: {e}")
        return 1

    if not ok:
        logger.warning(f"Проверка не пройдена (command={args.command})")
        return 1
    return 0
