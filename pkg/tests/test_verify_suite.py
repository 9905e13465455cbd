import pytest

from src.config.config import settings
from src.models.schemas import LedgerRow
from src.oracle.verify_suite import (
    LedgerJob,
    congruence_oracle_rows,
    execute_job,
    good_set_rows,
    isotropic_three_units_rows,
    ledger_jobs,
    odd_prime_powers,
    orthogonal_2x2_diameter_rows,
    orthogonal_dxd_rows,
    run_sequential,
    sharp_four_units_rows,
    sphere_size_rows,
    triangle_census_rows,
    unit_sum_bound_rows,
    verify_suite,
    walk_threshold_rows,
    zero_three_units_rows,
)


def test_odd_prime_powers():
    assert odd_prime_powers(3, 13) == [3, 5, 7, 9, 11, 13]
    assert odd_prime_powers(20, 30) == [23, 25, 27, 29]


@pytest.mark.parametrize("q", [3, 5, 7, 9, 11, 13, 25, 27])
def test_sphere_size_rows(q):
    (row,) = sphere_size_rows(q)
    assert row.passed


@pytest.mark.parametrize("q", [3, 5, 7, 9])
def test_good_set_rows(q):
    assert all(row.passed for row in good_set_rows(q))


def test_zero_three_units_rows():
    rows = zero_three_units_rows()
    assert rows
    assert all(row.passed for row in rows)


@pytest.mark.parametrize("q, d", [(3, 2), (5, 2), (7, 2), (3, 3), (5, 3)])
def test_unit_sum_bound_rows(q, d):
    (row,) = unit_sum_bound_rows(q, d)
    assert row.passed, row.detail


@pytest.mark.parametrize("q", [7, 11])
def test_isotropic_three_units_rows(q):
    (row,) = isotropic_three_units_rows(q)
    assert row.passed
    assert row.observed == [3]


def test_sharp_four_units_rows():
    (row,) = sharp_four_units_rows()
    assert row.passed
    assert row.observed == 4


def test_walk_threshold_rows():
    rows = walk_threshold_rows()
    assert [row.theorem for row in rows] == ["walk_threshold", "zero_walk_threshold"]
    assert all(row.passed for row in rows)


def test_diameter_rows():
    (row,) = orthogonal_2x2_diameter_rows(5)
    assert row.observed == [8, 8]
    assert row.passed
    (info,) = orthogonal_2x2_diameter_rows(3)
    assert info.detail == "informational"


def test_orthogonal_dxd_sample():
    (row,) = orthogonal_dxd_rows(3, 3, sample_size=5)
    assert row.passed
    assert "matrices=5" in row.detail


@pytest.mark.parametrize("q", [3, 5, 7])
def test_triangle_census_rows(q):
    rows = triangle_census_rows(q)
    assert [row.theorem for row in rows] == ["triangle_census", "triangle_census_orbits"]
    assert all(row.passed for row in rows)


def test_congruence_oracle_rows():
    (row,) = congruence_oracle_rows(3)
    assert row.passed
    assert row.detail == "orbits=6"


# ---------------------------------------------------------
# Сборка заданий
# ---------------------------------------------------------
def test_job_turns_computation_error_into_failed_row():
    job = LedgerJob("sphere_size", 12, 2, sphere_size_rows, (12,))
    (row,) = job.run()
    assert not row.passed
    assert row.theorem == "sphere_size"
    assert row.detail.startswith("NonPrimeError")


def test_job_turns_unexpected_error_into_failed_row():
    # неверное число аргументов: TypeError вне иерархии WaringError
    job = LedgerJob("good_set_size", 5, 2, good_set_rows, (5, 7))
    (row,) = execute_job(job)
    assert not row.passed
    assert (row.q, row.d) == (5, 2)
    assert row.detail.startswith("TypeError")


def test_ledger_jobs_shallow_and_deep():
    shallow = ledger_jobs([3, 5], [2, 3])
    deep = ledger_jobs([3, 5], [2, 3], deep=True)
    assert shallow[0].theorem == "sphere_size"
    assert shallow[-1].theorem == "walk_threshold"
    assert not any(job.theorem == "unit_sum_bound" and job.d == 4 for job in shallow)
    assert any(job.theorem == "unit_sum_bound" and job.d == 4 for job in deep)

    dxd = [job for job in shallow if job.theorem == "orthogonal_dxd"]
    full = [job for job in dxd if (job.q, job.d) == (3, 3)]
    assert len(full) == settings.DXD_CHUNKS
    assert all(job.args[2] is None for job in full)
    assert {(job.q, job.d) for job in dxd} == {(3, 3), (5, 3), (3, 4)}
    assert all(job.args[2] == settings.DXD_SAMPLE_SIZE for job in dxd if job.q == 5 or job.d == 4)


def test_ledger_jobs_without_three_dims_skip_dxd():
    jobs = ledger_jobs([3, 5], [2])
    assert not any(job.theorem == "orthogonal_dxd" for job in jobs)


def test_orthogonal_dxd_chunks_cover_sample():
    chunks = 3
    rows = [row for chunk in range(chunks) for row in orthogonal_dxd_rows(5, 3, 10, chunk, chunks)]
    assert all(row.passed for row in rows)
    counts = [int(row.detail.split("matrices=")[1].split(",")[0]) for row in rows]
    assert counts == [4, 3, 3]
    assert rows[0].detail.endswith("chunk=1/3")


def test_verify_suite_small():
    rows = verify_suite(q_values=[3, 5], dims=[2])
    assert rows
    assert all(isinstance(row, LedgerRow) for row in rows)
    assert all(row.passed for row in rows), [row.theorem for row in rows if not row.passed]


def test_verify_suite_custom_runner():
    seen = []

    def runner(jobs: list[LedgerJob]):
        seen.extend(job.name for job in jobs)
        return run_sequential(jobs)

    rows = verify_suite(q_values=[3], dims=[2], runner=runner)
    assert seen
    assert len(rows) >= len(seen)
