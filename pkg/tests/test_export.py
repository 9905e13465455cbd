import io
import json

import pytest
from openpyxl import load_workbook
from pydantic import ValidationError

from src.geometry.vector_geometry import decompose_unit_sum
from src.models.models import FqVector
from src.models.schemas import ClassRow, LedgerRow, RunConfig, TriangleCountRecord, UnitSumRecord
from src.utils.errors import UsageError
from src.utils.export import render_csv, render_json, render_pretty, write_output


@pytest.fixture
def ledger():
    return [
        LedgerRow(theorem="sphere_size", q=5, d=2, expected=[9, 4], observed=[9, 4], passed=True),
        LedgerRow(theorem="sharp_four_units", q=5, d=2, expected=4, observed=3, passed=False, detail="x"),
    ]


def test_render_json_uses_pass_alias(ledger):
    lines = render_json(ledger).splitlines()
    assert len(lines) == 2
    first = json.loads(lines[0])
    assert first["pass"] is True
    assert "passed" not in first
    assert first["expected"] == [9, 4]


def test_render_csv_header(ledger):
    lines = render_csv(ledger).splitlines()
    assert lines[0] == "theorem,q,d,expected,observed,pass,detail"
    assert lines[1].startswith("sphere_size,5,2,")
    assert lines[2] == "sharp_four_units,5,2,4,3,False,x"


def test_render_pretty_aligned(ledger):
    lines = render_pretty(ledger).splitlines()
    assert lines[0].startswith("theorem")
    assert len(lines) == 3
    assert lines[1].index("5") == lines[0].index("q")


def test_render_empty():
    assert render_pretty([]) == ""
    assert render_json([]) == ""


def test_write_output_stream(ledger):
    stream = io.StringIO()
    write_output(ledger, "json", stream=stream)
    assert stream.getvalue() == render_json(ledger)


def test_write_output_file(ledger, tmp_path):
    path = tmp_path / "ledger.csv"
    write_output(ledger, "csv", out=str(path))
    assert path.read_text(encoding="utf-8") == render_csv(ledger)


def test_write_output_xlsx(ledger, tmp_path):
    path = tmp_path / "ledger.xlsx"
    write_output(ledger, "xlsx", out=str(path), title="Сводная проверка")
    ws = load_workbook(path).active
    assert ws.title == "Сводная проверка"
    rows = list(ws.values)
    assert list(rows[0]) == ["theorem", "q", "d", "expected", "observed", "pass", "detail"]
    assert rows[1][3] == "[9,4]"
    assert len(rows) == 3


def test_write_output_errors(ledger):
    with pytest.raises(UsageError) as error:
        write_output(ledger, "xlsx")
    assert error.value.flag == "--out"
    with pytest.raises(UsageError) as error:
        write_output(ledger, "yaml")
    assert error.value.flag == "--format"


def test_summary_line_closes_table(ledger, tmp_path):
    census = TriangleCountRecord(q=3, count=6, enumerated=6, index=6)
    assert render_csv(ledger, census).splitlines()[-1] == "# q=3, count=6, enumerated=6, index=6"
    assert render_pretty(ledger, census).splitlines()[-1] == "# q=3, count=6, enumerated=6, index=6"
    assert json.loads(render_json(ledger, census).splitlines()[-1]) == census.model_dump()

    path = tmp_path / "ledger.xlsx"
    write_output(ledger, "xlsx", out=str(path), summary=census)
    rows = list(load_workbook(path).active.values)
    assert len(rows) == 1 + 2 + 2
    assert rows[-1][0] == "# q=3, count=6, enumerated=6, index=6"


# ---------------------------------------------------------
# Записи
# ---------------------------------------------------------
def test_unit_sum_record(f5):
    v = FqVector.from_literal(f5, [2, 2])
    record = UnitSumRecord.from_decomposition(decompose_unit_sum(v), bound=4)
    assert record.verified
    assert record.target == [2, 2]
    assert len(record.parts) == record.count
    hidden = UnitSumRecord.from_decomposition(decompose_unit_sum(v), bound=4, emit_parts=False)
    assert hidden.parts is None


def test_class_row_extension_literals(f9):
    from src.geometry.triangle_classify import enumerate_classes

    row = ClassRow.from_invariant(enumerate_classes(f9)[0])
    assert isinstance(row.L1, list)
    assert len(row.L1) == 2


def test_run_config_fills_characteristic():
    config = RunConfig(command="field", q=27)
    assert (config.p, config.n) == (3, 3)
    with pytest.raises(ValidationError):
        RunConfig(command="field", q=12)
    with pytest.raises(ValidationError):
        RunConfig(command="field", q=5, jobs=0)
