import csv
import io
import json
import sys
from typing import Optional, Sequence

from openpyxl import Workbook
from pydantic import BaseModel

from src.config.logger_config import logger
from src.utils.errors import UsageError


def _flat(value):
    """Вложенные списки в ячейке таблицы пишем JSON-строкой."""
    if isinstance(value, (list, dict)):
        return json.dumps(value, separators=(",", ":"))
    return value


def _table(records: Sequence[BaseModel]) -> tuple[list[str], list[list]]:
    dumped = [record.model_dump(by_alias=True) for record in records]
    headers = list(dumped[0].keys()) if dumped else []
    rows = [[_flat(item.get(h)) for h in headers] for item in dumped]
    return headers, rows


def summary_line(summary: BaseModel) -> str:
    """Итоговая строка под таблицей: # key=value, ..."""
    items = summary.model_dump(by_alias=True).items()
    return "# " + ", ".join(f"{key}={_flat(value)}" for key, value in items)


def render_json(records: Sequence[BaseModel], summary: Optional[BaseModel] = None) -> str:
    """JSON lines: одна запись на строку, сводка последней строкой."""
    lines = [record.model_dump_json(by_alias=True) for record in records]
    if summary is not None:
        lines.append(summary.model_dump_json(by_alias=True))
    return "".join(line + "\n" for line in lines)


def render_csv(records: Sequence[BaseModel], summary: Optional[BaseModel] = None) -> str:
    headers, rows = _table(records)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(headers)
    writer.writerows(rows)
    if summary is not None:
        buffer.write(summary_line(summary) + "\n")
    return buffer.getvalue()


def render_pretty(records: Sequence[BaseModel], summary: Optional[BaseModel] = None) -> str:
    headers, rows = _table(records)
    lines = []
    if headers:
        cells = [headers] + [[str(value) for value in row] for row in rows]
        widths = [max(len(row[i]) for row in cells) for i in range(len(headers))]
        lines = ["  ".join(value.ljust(width) for value, width in zip(row, widths)).rstrip() for row in cells]
    if summary is not None:
        lines.append(summary_line(summary))
    return "".join(line + "\n" for line in lines)


def save_xlsx(records: Sequence[BaseModel], path: str, title: str = "Результаты", summary: Optional[BaseModel] = None):
    # Создаем рабочую книгу и лист Excel
    wb = Workbook()
    ws = wb.active
    ws.title = title[:31]

    headers, rows = _table(records)
    ws.append(headers)
    for row in rows:
        ws.append(row)
    if summary is not None:
        ws.append([])
        ws.append([summary_line(summary)])

    wb.save(path)
    logger.info(f"Таблица сохранена в Excel (path={path}, rows={len(rows)})")


def write_output(
        records: Sequence[BaseModel],
        output_format: str,
        out: Optional[str] = None,
        title: str = "Результаты",
        stream=None,
        summary: Optional[BaseModel] = None,
):
    if output_format == "xlsx":
        if not out:
            raise UsageError("--out", "формат xlsx требует файл для записи")
        save_xlsx(records, out, title, summary)
        return

    renderers = {"json": render_json, "csv": render_csv, "pretty": render_pretty}
    if output_format not in renderers:
        raise UsageError("--format", f"неизвестный формат {output_format!r}")
    text = renderers[output_format](records, summary)

    if out:
        with open(out, "w", encoding="utf-8") as f:
            f.write(text)
        logger.info(f"Результаты записаны (path={out}, format={output_format}, rows={len(records)})")
    else:
        (stream or sys.stdout).write(text)
