"""CSV tables with a ``#``-prefixed metadata header."""

from __future__ import annotations

import csv
import io
import sys
from pathlib import Path


def _fmt(value):
    if value is None:
        return ""
    if hasattr(value, "item") and not isinstance(value, (str, bytes)):
        value = value.item()  # numpy scalar -> Python scalar
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_csv(fields, rows, metadata=None) -> str:
    buf = io.StringIO()
    for key, value in (metadata or {}).items():
        buf.write(f"# {key}: {value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for row in rows:
        writer.writerow([_fmt(row.get(f)) for f in fields])
    return buf.getvalue()


def write_csv(path, fields, rows, metadata=None) -> str:
    """Write to ``path`` ("-" or None for stdout); returns the rendered text."""
    text = render_csv(fields, rows, metadata)
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")
    return text


def _parse_cell(text):
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def parse_csv(text: str) -> tuple[dict, list[dict]]:
    """Inverse of :func:`render_csv`: (metadata, rows with typed cells)."""
    metadata = {}
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].partition(":")
            metadata[key.strip()] = value.strip()
        else:
            body.append(line)
    reader = csv.DictReader(body)
    rows = [{k: _parse_cell(v) for k, v in row.items()} for row in reader]
    return metadata, rows


def read_csv(path) -> tuple[dict, list[dict]]:
    return parse_csv(Path(path).read_text(encoding="utf-8"))
