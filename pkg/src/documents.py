"""
Reading and writing JSON documents, plus the scalar/array codec shared by
every domain type's to_dict/from_dict.

Scalars are written as [re, im] float pairs. Exact values with rational
real and imaginary parts are written as ["p/q", "p/q"] strings. On input a
plain number, a "p/q" string or an [re, im] pair are all accepted.
"""
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, List, Optional

import numpy as np
import sympy

from .common import DocumentEnvelope, DocumentKind, InvalidArgumentError
from .exact import rational_parts, to_exact


def _clean(x: float) -> float:
    # -0.0 serializes as "-0.0"
    return float(x) + 0.0


def encode_scalar(value: Any) -> List[Any]:
    """Encode one scalar as an [re, im] pair."""
    if isinstance(value, sympy.Basic):
        parts = rational_parts(value)
        if parts is not None:
            return [str(parts[0]), str(parts[1])]
        value = complex(sympy.N(value, 30))
    z = complex(value)
    return [_clean(z.real), _clean(z.imag)]


def _decode_part(part: Any, exact: bool):
    if isinstance(part, bool) or part is None:
        raise InvalidArgumentError(f"Not a numeric entry: {part!r}")
    if exact:
        return to_exact(part)
    if isinstance(part, str):
        try:
            return float(Fraction(part.strip()))
        except (ValueError, ZeroDivisionError):
            raise InvalidArgumentError(f"Not a rational literal: {part!r}")
    if isinstance(part, (int, float)):
        if not np.isfinite(part):
            raise InvalidArgumentError("Non-finite entry")
        return float(part)
    raise InvalidArgumentError(f"Not a numeric entry: {part!r}")


def decode_scalar(obj: Any, exact: bool = False):
    """Decode a number, "p/q" string or [re, im] pair."""
    if isinstance(obj, list):
        if len(obj) != 2:
            raise InvalidArgumentError(f"Complex entries must be [re, im] pairs, got {obj!r}")
        re, im = obj
    else:
        re, im = obj, 0
    re_v, im_v = _decode_part(re, exact), _decode_part(im, exact)
    if exact:
        return sympy.expand(re_v + sympy.I * im_v)
    return complex(re_v, im_v)


def encode_array(arr: Any) -> Any:
    """Nested lists of encoded scalars with the shape of `arr`."""
    if not isinstance(arr, np.ndarray):
        arr = np.asarray(arr)
    if arr.ndim == 0:
        return encode_scalar(arr[()])
    return [encode_array(sub) for sub in arr]


def _collect(obj: Any, depth: int, flat: list) -> tuple:
    if depth == 0:
        flat.append(obj)
        return ()
    if not isinstance(obj, list):
        raise InvalidArgumentError(f"Expected a nested array, found {type(obj).__name__}")
    if not obj:
        return (0,) * depth
    shapes = {_collect(item, depth - 1, flat) for item in obj}
    if len(shapes) != 1:
        raise InvalidArgumentError("Array is ragged")
    return (len(obj),) + shapes.pop()


def decode_array(obj: Any, ndim: int, exact: bool = False, allow_empty: bool = False) -> np.ndarray:
    """Decode nested lists into a complex (or exact object) array of rank `ndim`."""
    flat: list = []
    shape = _collect(obj, ndim, flat)
    if not flat and not allow_empty:
        raise InvalidArgumentError("Array is empty")
    values = [decode_scalar(v, exact) for v in flat]
    if exact:
        out = np.empty(len(values), dtype=object)
        for i, v in enumerate(values):
            out[i] = v
        return out.reshape(shape)
    return np.array(values, dtype=complex).reshape(shape)


class DocumentStore:
    """
    Reads documents from a path or stdin and writes them to a path or stdout.
    """

    def __init__(self, label: Optional[str] = None):
        self.logger = logging.getLogger("documents" if label is None else f"documents.{label}")

    def read(self, path: Optional[str] = None,
             expected: Optional[tuple] = None) -> DocumentEnvelope:
        """Read one document; `expected` restricts the accepted kinds."""
        if path is None or path == "-":
            text = sys.stdin.read()
            source = "stdin"
        else:
            try:
                text = Path(path).read_text()
            except OSError as e:
                raise InvalidArgumentError(f"Cannot read {path}: {e}")
            source = path
        doc = DocumentEnvelope.from_json(text)
        if expected and doc.kind not in expected:
            names = ", ".join(DocumentKind(k).value for k in expected)
            raise InvalidArgumentError(f"Expected a {names} document, got {doc.kind.value}")
        self.logger.info(f"Read {doc.kind.value} document from {source}")
        return doc

    def write(self, doc: DocumentEnvelope, path: Optional[str] = None):
        """Write one document followed by a newline."""
        text = doc.to_json() + "\n"
        if path is None or path == "-":
            sys.stdout.write(text)
            sys.stdout.flush()
            target = "stdout"
        else:
            try:
                Path(path).write_text(text)
            except OSError as e:
                raise InvalidArgumentError(f"Cannot write {path}: {e}")
            target = path
        self.logger.debug(f"Wrote {doc.kind.value} document to {target}")
