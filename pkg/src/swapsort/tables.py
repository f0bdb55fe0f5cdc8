"""Flat-table emission and parsing (CSV and JSON).

Commands produce named tables of flat rows. CSV puts the first table at
the requested path and any further table at a sibling path with the
table name injected before the suffix; JSON holds all tables in one
document keyed by table name, mirroring the CSV fields exactly.

Floats are serialized with 12 significant digits, counts as plain
integers, so identical inputs yield byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np


def format_value(value) -> str:
    """Canonical text form of one cell."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.12g}"
    return str(value)


def parse_value(text: str):
    """Inverse of format_value with numeric coercion."""
    if text == "":
        return None
    if text == "true":
        return True
    if text == "false":
        return False
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def jsonable(value):
    if value is None or isinstance(value, (bool, np.bool_)):
        return bool(value) if value is not None else None
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(f"{float(value):.12g}")
    return str(value)


def render_csv(fieldnames: list[str], rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fieldnames)
    for row in rows:
        writer.writerow([format_value(row.get(name)) for name in fieldnames])
    return buf.getvalue()


def render_json(tables: dict[str, tuple[list[str], list[dict]]]) -> str:
    doc = {
        name: [{k: jsonable(row.get(k)) for k in fieldnames} for row in rows]
        for name, (fieldnames, rows) in tables.items()
    }
    return json.dumps(doc, indent=2) + "\n"


def sibling_path(path: Path, table_name: str) -> Path:
    return path.with_name(f"{path.stem}.{table_name}{path.suffix}")


def write_tables(tables: dict[str, tuple[list[str], list[dict]]],
                 out: str, fmt: str) -> list[Path]:
    """Emit tables to the requested destination; '-' means stdout."""
    if fmt == "json":
        text = render_json(tables)
        if out == "-":
            print(text, end="")
            return []
        path = Path(out)
        path.write_text(text)
        return [path]

    written = []
    items = list(tables.items())
    if out == "-":
        chunks = []
        for name, (fieldnames, rows) in items:
            chunks.append(render_csv(fieldnames, rows))
        print("\n".join(chunks), end="")
        return []
    main_path = Path(out)
    for pos, (name, (fieldnames, rows)) in enumerate(items):
        path = main_path if pos == 0 else sibling_path(main_path, name)
        path.write_text(render_csv(fieldnames, rows))
        written.append(path)
    return written


def read_csv_table(path) -> tuple[list[str], list[dict]]:
    with open(path, newline="") as f:
        reader = csv.reader(f)
        fieldnames = next(reader)
        rows = [dict(zip(fieldnames, map(parse_value, line))) for line in reader]
    return fieldnames, rows


def read_json_tables(path) -> dict[str, list[dict]]:
    with open(path) as f:
        return json.load(f)
