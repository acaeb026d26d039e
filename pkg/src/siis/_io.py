import csv
import io
import json
import os
import tempfile
from datetime import datetime, timezone
from pathlib import Path

from .errors import DataIOError


def _fmt(v):
    if isinstance(v, float):
        return "" if v != v else repr(v)
    return str(v)


def meta_line(**info) -> str:
    stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    extras = " ".join(f"{k}={v}" for k, v in info.items())
    return f"# siis generated {stamp} {extras}".rstrip()


def atomic_write(path, text: str) -> None:
    """Write ``text`` to a temp file in the target directory, then rename."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        raise DataIOError(f"cannot write {path}: {exc}") from exc


def write_csv(path, columns, rows, meta: str | None = None) -> None:
    buf = io.StringIO()
    if meta:
        buf.write(meta + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    atomic_write(path, buf.getvalue())


def write_json(path, obj) -> None:
    atomic_write(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def read_csv_body(path):
    """Rows of a CSV written by :func:`write_csv`, skipping ``#`` lines."""
    try:
        with open(path, newline="") as fh:
            lines = [ln for ln in fh if not ln.startswith("#")]
    except OSError as exc:
        raise DataIOError(f"cannot read {path}: {exc}") from exc
    return list(csv.reader(lines))
