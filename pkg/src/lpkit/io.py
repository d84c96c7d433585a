"""File formats: LPGF1 grid files, coefficient binaries, CSV and JSON listings.

LPGF1
    ``LPGF1\\n`` then a header line ``n L T kind`` (kind is ``real`` or
    ``complex``) then little-endian float64 samples in lexicographic order,
    with real and imaginary parts interleaved for complex data.
Coefficient binary
    ``LPCF1\\n`` then one JSON line ``{n, L, T, window, counts, shapes}`` then
    records ``(k: int32, m: int32 x n, re: float64, im: float64)``,
    little-endian, for the nonzero entries in scale then lexicographic order.
Grid CSV
    a ``# LPGF1 n L T kind`` comment line, a column header, then one row per
    grid point with the index columns and ``re`` (and ``im``) written with
    ``repr`` so that the text round trip is exact.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import FormatError
from .grid import GridFunction, GridSpec, make_grid

__all__ = [
    "GRID_MAGIC",
    "COEF_MAGIC",
    "write_lpgf1",
    "read_lpgf1",
    "write_grid_csv",
    "read_grid_csv",
    "write_coefficients",
    "read_coefficients",
    "coefficients_to_json",
    "coefficients_from_json",
    "detect_format",
    "convert",
]

GRID_MAGIC = b"LPGF1\n"
COEF_MAGIC = b"LPCF1\n"


def _header(spec: GridSpec, kind: str) -> str:
    return f"{spec.n} {spec.L} {spec.T!r} {kind}"


def _parse_header(line: str) -> tuple[GridSpec, str]:
    parts = line.split()
    if len(parts) != 4 or parts[3] not in ("real", "complex"):
        raise FormatError(f"bad grid header {line!r}")
    try:
        spec = make_grid(int(parts[0]), int(parts[1]), float(parts[2]))
    except (ValueError, ArithmeticError) as exc:
        raise FormatError(f"bad grid header {line!r}: {exc}") from exc
    return spec, parts[3]


def write_lpgf1(path, f: GridFunction) -> None:
    kind = "real" if f.is_real else "complex"
    data = f.values.astype("<f8" if f.is_real else "<c16").tobytes(order="C")
    with open(path, "wb") as fh:
        fh.write(GRID_MAGIC)
        fh.write((_header(f.spec, kind) + "\n").encode("ascii"))
        fh.write(data)


def read_lpgf1(path) -> GridFunction:
    raw = Path(path).read_bytes()
    if not raw.startswith(GRID_MAGIC):
        raise FormatError(f"{path}: missing LPGF1 magic")
    rest = raw[len(GRID_MAGIC):]
    nl = rest.find(b"\n")
    if nl < 0:
        raise FormatError(f"{path}: truncated header")
    try:
        spec, kind = _parse_header(rest[:nl].decode("ascii"))
    except UnicodeDecodeError as exc:
        raise FormatError(f"{path}: header is not ASCII") from exc
    body = rest[nl + 1:]
    width = 8 if kind == "real" else 16
    if len(body) != spec.size * width:
        raise FormatError(f"{path}: expected {spec.size * width} data bytes, got {len(body)}")
    vals = np.frombuffer(body, dtype="<f8" if kind == "real" else "<c16").reshape(spec.shape)
    return GridFunction(spec, vals)


def write_grid_csv(path, f: GridFunction) -> None:
    kind = "real" if f.is_real else "complex"
    n = f.spec.n
    with open(path, "w", newline="") as fh:
        fh.write(f"# LPGF1 {_header(f.spec, kind)}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"i{a}" for a in range(n)] + (["re"] if f.is_real else ["re", "im"]))
        for idx in np.ndindex(*f.spec.shape):
            v = f.values[idx]
            row = [str(i) for i in idx]
            if f.is_real:
                row.append(repr(float(v)))
            else:
                row += [repr(float(v.real)), repr(float(v.imag))]
            w.writerow(row)


def read_grid_csv(path) -> GridFunction:
    with open(path, newline="") as fh:
        first = fh.readline()
        if not first.startswith("# LPGF1 "):
            raise FormatError(f"{path}: missing '# LPGF1' comment header")
        spec, kind = _parse_header(first[len("# LPGF1 "):])
        rows = list(csv.reader(fh))
    if not rows:
        raise FormatError(f"{path}: no column header")
    body = rows[1:]
    if len(body) != spec.size:
        raise FormatError(f"{path}: expected {spec.size} rows, got {len(body)}")
    vals = np.zeros(spec.shape, dtype=float if kind == "real" else complex)
    n = spec.n
    try:
        for row in body:
            idx = tuple(int(x) for x in row[:n])
            if kind == "real":
                vals[idx] = float(row[n])
            else:
                vals[idx] = complex(float(row[n]), float(row[n + 1]))
    except (ValueError, IndexError) as exc:
        raise FormatError(f"{path}: malformed row: {exc}") from exc
    return GridFunction(spec, vals)


def _record_dtype(n: int) -> np.dtype:
    return np.dtype([("k", "<i4"), ("m", "<i4", (n,)), ("re", "<f8"), ("im", "<f8")])


def _coef_header(lam) -> dict:
    spec = lam.spec
    return {
        "n": spec.n, "L": spec.L, "T": spec.T,
        "window": list(lam.window),
        "counts": [int(np.count_nonzero(lam[k])) for k in lam.scales],
        "shapes": [list(lam[k].shape) for k in lam.scales],
    }


def write_coefficients(path, lam) -> None:
    hdr = _coef_header(lam)
    n = lam.spec.n
    entries = list(lam.entries())
    rec = np.zeros(len(entries), dtype=_record_dtype(n))
    for i, (k, m, v) in enumerate(entries):
        rec[i] = (k, m, v.real, v.imag)
    with open(path, "wb") as fh:
        fh.write(COEF_MAGIC)
        fh.write((json.dumps(hdr, sort_keys=True) + "\n").encode("ascii"))
        fh.write(rec.tobytes())


def _field_from_records(hdr: dict, records):
    from .transform import CoefficientField

    try:
        spec = make_grid(int(hdr["n"]), int(hdr["L"]), float(hdr["T"]))
        window = (int(hdr["window"][0]), int(hdr["window"][1]))
    except (KeyError, ValueError, TypeError, IndexError) as exc:
        raise FormatError(f"bad coefficient header: {exc}") from exc
    entries = {}
    for k, m, re, im in records:
        entries[(int(k), tuple(int(x) for x in np.atleast_1d(m)))] = complex(re, im)
    try:
        return CoefficientField.from_entries(spec, window, entries)
    except (IndexError, ValueError) as exc:
        raise FormatError(f"coefficient entry outside its lattice: {exc}") from exc


def read_coefficients(path):
    raw = Path(path).read_bytes()
    if not raw.startswith(COEF_MAGIC):
        raise FormatError(f"{path}: missing LPCF1 magic")
    rest = raw[len(COEF_MAGIC):]
    nl = rest.find(b"\n")
    if nl < 0:
        raise FormatError(f"{path}: truncated header")
    try:
        hdr = json.loads(rest[:nl].decode("ascii"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"{path}: bad JSON header") from exc
    dt = _record_dtype(int(hdr.get("n", 1)))
    body = rest[nl + 1:]
    if len(body) % dt.itemsize:
        raise FormatError(f"{path}: record data is not a whole number of records")
    rec = np.frombuffer(body, dtype=dt)
    if len(rec) != sum(hdr.get("counts", [])):
        raise FormatError(f"{path}: header counts {hdr.get('counts')} disagree with {len(rec)} records")
    return _field_from_records(hdr, ((r["k"], r["m"], r["re"], r["im"]) for r in rec))


def coefficients_to_json(lam) -> str:
    hdr = _coef_header(lam)
    hdr["entries"] = [[k, *m, v.real, v.imag] for k, m, v in lam.entries()]
    return json.dumps(hdr, sort_keys=True)


def coefficients_from_json(text: str):
    try:
        hdr = json.loads(text)
        n = int(hdr["n"])
        recs = [(e[0], e[1:1 + n], e[1 + n], e[2 + n]) for e in hdr["entries"]]
    except (json.JSONDecodeError, KeyError, TypeError, IndexError, ValueError) as exc:
        raise FormatError(f"bad coefficient listing: {exc}") from exc
    return _field_from_records(hdr, recs)


_EXT = {".lpgf": "lpgf1", ".lpgf1": "lpgf1", ".csv": "csv", ".lpcf": "coef", ".json": "json"}


def detect_format(path) -> str:
    """Format of an existing file, read from its leading bytes."""
    with open(path, "rb") as fh:
        head = fh.read(16)
    if head.startswith(GRID_MAGIC):
        return "lpgf1"
    if head.startswith(COEF_MAGIC):
        return "coef"
    if head.startswith(b"# LPGF1 "):
        return "csv"
    if head.lstrip().startswith(b"{"):
        return "json"
    raise FormatError(f"{path}: unrecognized format")


def convert(src, dst, fmt: str | None = None) -> str:
    """Convert ``src`` to ``dst``; the target format comes from ``fmt`` or the suffix.

    Grid data converts between LPGF1 and CSV; coefficient data between the
    binary format and the JSON listing.  Returns the target format name.
    """
    kind = detect_format(src)
    target = fmt or _EXT.get(Path(dst).suffix.lower())
    if target is None:
        raise FormatError(f"cannot infer target format from {dst!r}")
    grid_like = {"lpgf1", "csv"}
    if kind in grid_like:
        if target not in grid_like:
            raise FormatError(f"grid data cannot be written as {target}")
        f = read_lpgf1(src) if kind == "lpgf1" else read_grid_csv(src)
        (write_lpgf1 if target == "lpgf1" else write_grid_csv)(dst, f)
    else:
        if target not in ("coef", "json"):
            raise FormatError(f"coefficient data cannot be written as {target}")
        lam = read_coefficients(src) if kind == "coef" else coefficients_from_json(Path(src).read_text())
        if target == "coef":
            write_coefficients(dst, lam)
        else:
            Path(dst).write_text(coefficients_to_json(lam))
    return target
