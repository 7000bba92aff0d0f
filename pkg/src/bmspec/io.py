"""JSON documents for matrices and 3-hypermatrices.

A document is ``{"order": 2|3, "dims": [...], "data": [...], "metadata": {...}}``
with ``data`` flattened last-index-fastest.  Floats are written with Python's
shortest round-trip repr, so parsing returns bit-identical values.
"""

import json
import math
import sys

import numpy as np

from .errors import DocumentError


def to_document(array, metadata=None):
    a = np.asarray(array, dtype=float)
    if a.ndim not in (2, 3):
        raise DocumentError(f"only order 2 or 3 arrays can be serialized, got order {a.ndim}")
    if not np.all(np.isfinite(a)):
        raise DocumentError("non-finite entries cannot be serialized")
    doc = {"order": a.ndim, "dims": list(a.shape), "data": [float(v) for v in a.ravel(order="C")]}
    if metadata:
        doc["metadata"] = metadata
    return doc


def dumps(array, metadata=None):
    return json.dumps(to_document(array, metadata), indent=None, sort_keys=True)


def from_document(doc):
    """Validate a parsed document and return (array, metadata)."""
    if not isinstance(doc, dict):
        raise DocumentError("document: top level must be a JSON object")
    for key in ("order", "dims", "data"):
        if key not in doc:
            raise DocumentError(f"document: missing field '{key}'")
    order, dims, data = doc["order"], doc["dims"], doc["data"]
    if order not in (2, 3):
        raise DocumentError(f"field 'order': expected 2 or 3, got {order!r}")
    if not isinstance(dims, list) or len(dims) != order:
        raise DocumentError(f"field 'dims': expected a list of {order} integers")
    for i, d in enumerate(dims):
        if not isinstance(d, int) or isinstance(d, bool) or d < 1:
            raise DocumentError(f"field 'dims[{i}]': expected a positive integer, got {d!r}")
    if not isinstance(data, list):
        raise DocumentError("field 'data': expected a list of numbers")
    expected = math.prod(dims)
    if len(data) != expected:
        raise DocumentError(f"field 'data': expected {expected} entries, got {len(data)}")
    for i, v in enumerate(data):
        if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
            raise DocumentError(f"field 'data[{i}]': expected a finite number, got {v!r}")
    meta = doc.get("metadata", {})
    if not isinstance(meta, dict):
        raise DocumentError("field 'metadata': expected an object")
    return np.array(data, dtype=float).reshape(dims), meta


def loads(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return from_document(doc)


def read(path):
    """Read a document from ``path`` ('-' for stdin)."""
    if path == "-":
        return loads(sys.stdin.read())
    try:
        with open(path, encoding="utf-8") as fh:
            return loads(fh.read())
    except OSError as exc:
        raise DocumentError(f"{path}: {exc.strerror}") from exc


def write(path, array, metadata=None):
    text = dumps(array, metadata) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def write_json(path, obj):
    text = json.dumps(obj, sort_keys=True) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise DocumentError(f"{path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
