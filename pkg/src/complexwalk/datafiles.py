"""Datum files.

CSV: header ``y,c_re,c_im``, one atom per row, UTF-8, LF line ends.  Boundary
data carry a leading comment ``# bc=<kind> L=<value>``.  JSON: an array of
``{"y", "re", "im"}`` objects.  Floats are written with ``repr`` so a round trip
is exact at double precision.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from .boundary import BoundaryDatum
from .spectral import AtomicMeasure, Datum

CSV_HEADER = ["y", "c_re", "c_im"]


def _parse_comment(line: str) -> dict:
    out = {}
    for tok in line.lstrip("#").split():
        if "=" in tok:
            k, v = tok.split("=", 1)
            out[k.strip()] = v.strip()
    return out


def datum_to_csv(d: Datum, comment: dict | None = None) -> str:
    buf = io.StringIO()
    if comment:
        buf.write("# " + " ".join(f"{k}={v}" for k, v in comment.items()) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for y, c in d.measure:
        w.writerow([repr(float(y)), repr(c.real), repr(c.imag)])
    return buf.getvalue()


def datum_from_csv(text: str) -> tuple[Datum, dict]:
    """Parse a datum CSV; returns the datum and any ``key=value`` comment fields."""
    meta: dict = {}
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            meta.update(_parse_comment(line))
        elif line.strip():
            body.append(line)
    rows = list(csv.reader(body))
    if not rows or [h.strip() for h in rows[0]] != CSV_HEADER:
        raise ValueError(f"datum CSV must start with header {','.join(CSV_HEADER)}")
    pairs = []
    for r in rows[1:]:
        if len(r) != 3:
            raise ValueError(f"bad datum row {r!r}")
        pairs.append((float(r[0]), complex(float(r[1]), float(r[2]))))
    return Datum.from_pairs(pairs), meta


def datum_to_json(d: Datum) -> str:
    return json.dumps([{"y": y, "re": c.real, "im": c.imag} for y, c in d.measure])


def datum_from_json(text: str) -> Datum:
    data = json.loads(text)
    if not isinstance(data, list):
        raise ValueError("datum JSON must be an array of {y, re, im}")
    return Datum.from_pairs((float(a["y"]), complex(float(a["re"]), float(a.get("im", 0.0)))) for a in data)


def read_datum(path) -> tuple[Datum, dict]:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json":
        return datum_from_json(text), {}
    return datum_from_csv(text)


def write_datum(d: Datum, path, comment: dict | None = None) -> None:
    path = Path(path)
    text = datum_to_json(d) if path.suffix.lower() == ".json" else datum_to_csv(d, comment)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def boundary_to_csv(bd: BoundaryDatum) -> str:
    comment = {"bc": bd.kind}
    if bd.L is not None:
        comment["L"] = repr(float(bd.L))
    return datum_to_csv(bd.base, comment)


def boundary_from_csv(text: str, kind: str | None = None, L: float | None = None) -> BoundaryDatum:
    """Parse a boundary datum file; explicit ``kind``/``L`` override the header."""
    d, meta = datum_from_csv(text)
    kind = kind or meta.get("bc")
    if kind is None:
        raise ValueError("boundary datum needs a '# bc=<kind> L=<value>' header or an explicit kind")
    if L is None and "L" in meta:
        L = float(meta["L"])
    return BoundaryDatum(d, kind, L)
