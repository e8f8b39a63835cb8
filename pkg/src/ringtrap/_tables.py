"""Small CSV table reader/writer shared by the dataset loaders and the CLI."""

import csv
import os
import tempfile

import numpy as np

from .errors import DataFormatError


def read_columns(path, required, optional=()):
    """Read named numeric columns; returns an (n, k) array in request order.

    Optional columns are appended only when present in the header. Raises
    DataFormatError on a missing required column, a malformed row, or an
    empty table.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        cols = list(required) + [c for c in optional if c in header]
        idx = []
        for name in required:
            if name not in header:
                raise DataFormatError(f"{path}: missing column '{name}'")
        for name in cols:
            idx.append(header.index(name))
        data = []
        for ln, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                data.append([float(row[i]) for i in idx])
            except (ValueError, IndexError):
                raise DataFormatError(f"{path}: bad row {ln}") from None
    if not data:
        raise DataFormatError(f"{path}: no data rows")
    return np.asarray(data, dtype=float)


def _cell(x) -> str:
    # repr floats round-trip exactly and make reruns byte-identical
    return repr(float(x)) if not isinstance(x, str) else x


def write_columns(path, header, columns):
    """Write named columns as CSV, atomically (temp file + rename).

    columns are parallel sequences; floats are written as their repr so a
    rerun with identical inputs produces an identical file.
    """
    cols = [np.atleast_1d(c) for c in columns]
    if len(cols) != len(header):
        raise DataFormatError("header and column counts differ")
    n = {len(c) for c in cols}
    if len(n) != 1:
        raise DataFormatError("columns have unequal lengths")
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in zip(*cols):
                w.writerow([_cell(x) for x in row])
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
