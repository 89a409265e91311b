"""
Tests for the document envelope, the scalar/array codec and document I/O.
"""
import json

import numpy as np
import pytest
import sympy

from src import __version__
from src.common import DocumentEnvelope, DocumentKind, ErrorKind, InvalidArgumentError
from src.documents import DocumentStore, decode_array, decode_scalar, encode_array, encode_scalar


def test_encode_scalar():
    """Test float, complex, exact rational and negative-zero encodings."""
    assert encode_scalar(2.5) == [2.5, 0.0]
    assert encode_scalar(1 - 2j) == [1.0, -2.0]
    assert encode_scalar(sympy.Rational(11, 6)) == ["11/6", "0"]
    assert encode_scalar(sympy.Rational(1, 2) - sympy.I) == ["1/2", "-1"]
    assert json.dumps(encode_scalar(-0.0)) == "[0.0, 0.0]"


def test_encode_irrational_falls_back_to_floats():
    """Test that an irrational exact value is written as floats."""
    re, im = encode_scalar(sympy.sqrt(3) * sympy.I)
    assert re == 0.0
    assert im == pytest.approx(3 ** 0.5)


def test_decode_scalar_forms():
    """Test plain numbers, p/q strings and [re, im] pairs."""
    assert decode_scalar(3) == 3 + 0j
    assert decode_scalar("7/2") == 3.5 + 0j
    assert decode_scalar([0.5, -1]) == 0.5 - 1j
    assert decode_scalar(["1/3", "0"], exact=True) == sympy.Rational(1, 3)
    assert decode_scalar([0, "1/2"], exact=True) == sympy.I / 2


def test_decode_scalar_rejects():
    """Test booleans, nulls, bad strings and wrong pair lengths."""
    for bad in (True, None, "abc", "1/0", [1, 2, 3], float("inf")):
        with pytest.raises(InvalidArgumentError):
            decode_scalar(bad)


def test_decode_array_shapes():
    """Test nested decoding and the rank check."""
    arr = decode_array([[1, [0, 1]], ["1/2", 2]], ndim=2)
    assert arr.shape == (2, 2)
    assert arr[0, 1] == 1j
    assert arr[1, 0] == 0.5
    with pytest.raises(InvalidArgumentError):
        decode_array([1, 2], ndim=2)


def test_decode_array_ragged_and_empty():
    """Test that ragged arrays are refused and empties need permission."""
    with pytest.raises(InvalidArgumentError):
        decode_array([[1, 2], [3]], ndim=2)
    with pytest.raises(InvalidArgumentError):
        decode_array([], ndim=1)
    assert decode_array([], ndim=1, allow_empty=True).size == 0


def test_encode_array_exact():
    """Test that exact arrays encode entrywise as strings."""
    arr = np.empty(2, dtype=object)
    arr[0], arr[1] = sympy.Rational(1, 2), sympy.Integer(0)
    assert encode_array(arr) == [["1/2", "0"], ["0", "0"]]


def test_envelope_validation():
    """Test kind coercion, unknown kinds and required payload keys."""
    doc = DocumentEnvelope(kind="spectrum", payload={'entries': []})
    assert doc.kind == DocumentKind.SPECTRUM
    assert doc.meta['tool_version'] == __version__
    with pytest.raises(InvalidArgumentError):
        DocumentEnvelope(kind="matrix", payload={})
    with pytest.raises(InvalidArgumentError):
        DocumentEnvelope(kind=DocumentKind.BLOCK_MATRIX, payload={'n': 1, 'm': 1})
    with pytest.raises(InvalidArgumentError):
        DocumentEnvelope(kind=DocumentKind.REPORT, payload=[])


def test_envelope_json_roundtrip():
    """Test to_json/from_json."""
    doc = DocumentEnvelope(kind=DocumentKind.CIRCULANT, payload={'first_row': [[0.5, 0.0]]},
                           meta={'command': 'realize-circulant'})
    back = DocumentEnvelope.from_json(doc.to_json())
    assert back.kind == DocumentKind.CIRCULANT
    assert back.payload == doc.payload
    assert back.meta['command'] == 'realize-circulant'


def test_envelope_from_json_rejects():
    """Test invalid JSON and documents without kind or payload."""
    with pytest.raises(InvalidArgumentError):
        DocumentEnvelope.from_json("{not json")
    with pytest.raises(InvalidArgumentError):
        DocumentEnvelope.from_json(json.dumps({'payload': {}}))


def test_store_roundtrip(tmp_path):
    """Test writing and reading a document through files."""
    store = DocumentStore()
    path = tmp_path / "doc.json"
    store.write(DocumentEnvelope(kind=DocumentKind.SPECTRUM, payload={'entries': [4, -3]}), str(path))
    assert path.read_text().endswith("\n")
    doc = store.read(str(path), expected=(DocumentKind.SPECTRUM,))
    assert doc.payload['entries'] == [4, -3]


def test_store_rejects_wrong_kind_and_missing_file(tmp_path):
    """Test the kind restriction and unreadable paths."""
    store = DocumentStore()
    path = tmp_path / "doc.json"
    store.write(DocumentEnvelope(kind=DocumentKind.SPECTRUM, payload={'entries': [1]}), str(path))
    with pytest.raises(InvalidArgumentError) as info:
        store.read(str(path), expected=(DocumentKind.E_MATRIX,))
    assert info.value.kind == ErrorKind.INVALID_ARGUMENT
    with pytest.raises(InvalidArgumentError):
        store.read(str(tmp_path / "missing.json"))
