"""Output directory management: CSV, JSON and SVG artifacts with content hashes."""

import csv
import hashlib
import io
import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from pathlib import Path

from pydantic import BaseModel

from app.core.errors import SchemaError
from app.models.schemas import OutputRecord

logger = logging.getLogger(__name__)

SCHEMA_PREFIX = "# schema: "

PATHS_SCHEMA = "paths/v1"
STATISTICS_SCHEMA = "statistics/v1"

COLUMNS: dict[str, tuple[str, ...]] = {
    PATHS_SCHEMA: ("tau", "alpha", "re_z", "im_z", "model"),
    STATISTICS_SCHEMA: ("sample_id", "statistic", "value"),
}

Cell = str | int | float


def _format(cell: Cell) -> str:
    # repr round-trips floats exactly
    return repr(cell) if isinstance(cell, float) else str(cell)


def render_csv(schema: str, rows: Iterable[Sequence[Cell]]) -> tuple[str, int]:
    """CSV text with the schema comment and header line.

    Returns:
        (text, number of data rows)
    """
    buffer = io.StringIO()
    buffer.write(f"{SCHEMA_PREFIX}{schema}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(COLUMNS[schema])
    count = 0
    for row in rows:
        writer.writerow([_format(cell) for cell in row])
        count += 1
    return buffer.getvalue(), count


@dataclass(frozen=True)
class CsvTable:
    schema: str
    columns: tuple[str, ...]
    rows: list[list[str]]

    def column(self, name: str) -> list[str]:
        index = self.columns.index(name)
        return [row[index] for row in self.rows]


def read_csv(path: Path, expected: str | None = None) -> CsvTable:
    """Parse a CSV written by ``ArtifactWriter``.

    Raises:
        SchemaError: for a missing or unknown schema line, a header mismatch, or a
            schema different from ``expected``
    """
    lines = path.read_text().splitlines()
    if not lines or not lines[0].startswith(SCHEMA_PREFIX):
        msg = f"{path} has no schema comment"
        raise SchemaError(msg)
    schema = lines[0].removeprefix(SCHEMA_PREFIX).strip()
    if schema not in COLUMNS:
        msg = f"{path} has unknown schema {schema!r}"
        raise SchemaError(msg)
    if expected is not None and schema != expected:
        msg = f"{path} has schema {schema!r}, expected {expected!r}"
        raise SchemaError(msg)
    records = list(csv.reader(lines[1:]))
    if not records or tuple(records[0]) != COLUMNS[schema]:
        msg = f"{path} header does not match schema {schema!r}"
        raise SchemaError(msg)
    return CsvTable(schema=schema, columns=COLUMNS[schema], rows=records[1:])


class ArtifactWriter:
    """Writes run outputs below one directory and records their hashes."""

    def __init__(self, output_dir: str | Path):
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self.records: list[OutputRecord] = []

    def _write(self, name: str, text: str, rows: int | None = None) -> OutputRecord:
        path = self.output_dir / name
        data = text.encode()
        path.write_bytes(data)
        record = OutputRecord(path=str(path), rows=rows, sha256=hashlib.sha256(data).hexdigest())
        self.records.append(record)
        logger.info("Wrote %s", path)
        return record

    def write_csv(self, name: str, schema: str, rows: Iterable[Sequence[Cell]]) -> OutputRecord:
        text, count = render_csv(schema, rows)
        return self._write(name, text, count)

    def write_json(self, name: str, model: BaseModel) -> OutputRecord:
        return self._write(name, model.model_dump_json(indent=2, by_alias=True) + "\n")

    def write_svg(self, name: str, document: str) -> OutputRecord:
        return self._write(name, document)
