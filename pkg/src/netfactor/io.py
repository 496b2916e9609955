"""JSON documents for systems and equivalence certificates.

Matrices are nested row-major lists with one row per line. Floats are
written with Python's shortest round-trip representation, so a read-back
reproduces every value bit for bit.
"""

import json
import math

import numpy as np

from .errors import FileFormatError
from .statespace import StateSpace

__all__ = [
    "SCHEMA_VERSION",
    "system_document",
    "parse_system",
    "certificate_document",
    "parse_certificate",
    "dumps",
    "read_document",
    "write_document",
]

SCHEMA_VERSION = 1


def _rows(x):
    return [[float(v) for v in row] for row in np.asarray(x, dtype=float)]


def system_document(sys, labels=None, extra=None):
    """Document dictionary for ``sys``.

    Parameters
    ----------
    sys : StateSpace
    labels : list of str, optional
        Names of the manifest states.
    extra : dict, optional
        Further keys stored alongside the matrices.
    """
    doc = {"schema_version": SCHEMA_VERSION, "kind": "system", "n": sys.n, "p": sys.p, "m": sys.m}
    if labels is not None:
        if len(labels) != sys.p:
            raise FileFormatError("one label per output is required")
        doc["labels"] = [str(x) for x in labels]
    doc.update({"a": _rows(sys.a), "b": _rows(sys.b), "c": _rows(sys.c), "d": _rows(sys.d)})
    if extra:
        doc.update(extra)
    return doc


def _matrix(doc, key, shape):
    if key not in doc:
        raise FileFormatError(f"missing matrix {key!r}")
    raw = doc[key]
    rows, cols = shape
    if not isinstance(raw, list) or len(raw) != rows:
        raise FileFormatError(f"matrix {key!r} must have {rows} rows")
    out = np.zeros(shape)
    for i, row in enumerate(raw):
        if not isinstance(row, list) or len(row) != cols:
            raise FileFormatError(f"row {i} of {key!r} must have {cols} entries")
        for j, v in enumerate(row):
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise FileFormatError(f"{key}[{i}][{j}] is not a finite number")
            out[i, j] = v
    return out


def _check_header(doc, kind):
    if not isinstance(doc, dict):
        raise FileFormatError("document must be a JSON object")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise FileFormatError(f"unsupported schema_version {doc.get('schema_version')!r}")
    if doc.get("kind", kind) != kind:
        raise FileFormatError(f"expected a {kind} document, got {doc.get('kind')!r}")


def _dim(doc, key):
    v = doc.get(key)
    if isinstance(v, bool) or not isinstance(v, int) or v < 0:
        raise FileFormatError(f"{key!r} must be a non-negative integer")
    return v


def parse_system(doc):
    """``StateSpace`` from a document dictionary.

    Raises
    ------
    FileFormatError
    """
    _check_header(doc, "system")
    n, p, m = _dim(doc, "n"), _dim(doc, "p"), _dim(doc, "m")
    a = _matrix(doc, "a", (n, n))
    b = _matrix(doc, "b", (n, m))
    c = _matrix(doc, "c", (p, n))
    d = _matrix(doc, "d", (p, m)) if "d" in doc else np.zeros((p, m))
    labels = doc.get("labels")
    if labels is not None and (not isinstance(labels, list) or len(labels) != p):
        raise FileFormatError("labels must list one name per output")
    return StateSpace(a, b, c, d)


def certificate_document(s, t, j=None, residuals=None):
    """Document dictionary for witnesses ``(S, T, J)``; ``T`` maps as ``A' = T^-1 A T``."""
    doc = {"schema_version": SCHEMA_VERSION, "kind": "certificate", "n": int(np.shape(s)[0]),
           "s": _rows(s), "t": _rows(t)}
    if j is not None:
        doc["j"] = _rows(j)
    if residuals is not None:
        doc["residuals"] = {k: float(v) for k, v in residuals.items()}
    return doc


def parse_certificate(doc):
    """``(S, T, J)`` from a certificate document; ``J`` is None when absent.

    Raises
    ------
    FileFormatError
    """
    _check_header(doc, "certificate")
    n = _dim(doc, "n")
    s = _matrix(doc, "s", (n, n))
    t = _matrix(doc, "t", (n, n))
    j = None
    if "j" in doc:
        raw = doc["j"]
        k = len(raw) if isinstance(raw, list) else -1
        j = _matrix(doc, "j", (k, k))
    return s, t, j


def _encode(value, indent):
    pad = " " * indent
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f'{pad}  {json.dumps(k)}: {_encode(v, indent + 2)}' for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(value, list) and value and all(isinstance(r, list) for r in value):
        rows = [f"{pad}  {json.dumps(r, allow_nan=False)}" for r in value]
        return "[\n" + ",\n".join(rows) + "\n" + pad + "]"
    return json.dumps(value, allow_nan=False)


def dumps(doc):
    """Serialize a document with one matrix row per line."""
    return _encode(doc, 0) + "\n"


def read_document(path):
    """Parse a JSON document from ``path``.

    Raises
    ------
    FileFormatError
    """
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise FileFormatError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def write_document(path, doc):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(doc))
