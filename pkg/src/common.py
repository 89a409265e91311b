"""
Common data structures, document schemas, error types and tolerances.
"""
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional

from . import __version__


DEFAULT_TOL = 1e-10
DEFAULT_MATCH_TOL = 1e-6
RESIDUE_TOL = 1e-9


class DocumentKind(str, Enum):
    """Kinds of documents exchanged by the command-line front end."""
    SPECTRUM = "spectrum"
    CIRCULANT = "circulant"
    S_FAMILY = "s-family"
    BLOCK_MATRIX = "block-matrix"
    E_MATRIX = "e-matrix"
    REPORT = "report"


class ErrorKind(str, Enum):
    """Failure categories raised by the toolkit."""
    INVALID_ARGUMENT = "invalid-argument"
    UNSUPPORTED_SIZE = "unsupported-size"
    UNSUPPORTED_PARITY = "unsupported-parity"
    NUMERIC_FAILURE = "numeric-failure"
    INVALID_ASSIGNMENT = "invalid-assignment"
    STRUCTURAL_ASYMMETRY = "structural-asymmetry"
    NOT_REALIZABLE = "not-realizable"
    SEARCH_INCOMPLETE = "search-incomplete"


class ToolkitError(Exception):
    """Base class for every error the toolkit raises on purpose."""
    kind = ErrorKind.INVALID_ARGUMENT
    exit_code = 2


class InvalidArgumentError(ToolkitError, ValueError):
    kind = ErrorKind.INVALID_ARGUMENT


class UnsupportedSizeError(ToolkitError):
    kind = ErrorKind.UNSUPPORTED_SIZE


class UnsupportedParityError(ToolkitError):
    kind = ErrorKind.UNSUPPORTED_PARITY


class InvalidAssignmentError(ToolkitError):
    kind = ErrorKind.INVALID_ASSIGNMENT


class StructuralAsymmetryError(ToolkitError):
    """An expression that must be real carries an imaginary residue."""
    kind = ErrorKind.STRUCTURAL_ASYMMETRY

    def __init__(self, message: str, position: Optional[tuple] = None):
        super().__init__(message)
        self.position = position


class NumericFailureError(ToolkitError):
    """An iteration did not converge; `partial` holds the last iterate."""
    kind = ErrorKind.NUMERIC_FAILURE
    exit_code = 3

    def __init__(self, message: str, partial: Any = None):
        super().__init__(message)
        self.partial = partial


class NotRealizableError(ToolkitError):
    """The Perron entry is below the construction threshold `phi`."""
    kind = ErrorKind.NOT_REALIZABLE
    exit_code = 4

    def __init__(self, message: str, phi: float):
        super().__init__(message)
        self.phi = phi


class SearchIncompleteError(ToolkitError):
    kind = ErrorKind.SEARCH_INCOMPLETE
    exit_code = 3


# Top-level payload keys each document kind must carry.
_REQUIRED_KEYS: Dict[DocumentKind, tuple] = {
    DocumentKind.SPECTRUM: ("entries",),
    DocumentKind.CIRCULANT: ("first_row",),
    DocumentKind.S_FAMILY: ("matrices",),
    DocumentKind.BLOCK_MATRIX: ("n", "m", "blocks"),
    DocumentKind.E_MATRIX: ("entries",),
    DocumentKind.REPORT: (),
}


@dataclass
class DocumentEnvelope:
    """A single machine-readable document: kind, payload and run metadata."""
    kind: DocumentKind
    payload: Dict[str, Any]
    meta: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.kind, DocumentKind):
            try:
                self.kind = DocumentKind(self.kind)
            except ValueError:
                raise InvalidArgumentError(f"Unknown document kind: {self.kind!r}")
        if not isinstance(self.payload, dict):
            raise InvalidArgumentError("Document payload must be a JSON object")
        missing = [k for k in _REQUIRED_KEYS[self.kind] if k not in self.payload]
        if missing:
            raise InvalidArgumentError(
                f"{self.kind.value} document is missing payload keys: {', '.join(missing)}"
            )
        self.meta.setdefault("tool_version", __version__)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'kind': self.kind.value,
            'payload': self.payload,
            'meta': self.meta,
        }

    def to_json(self) -> str:
        """Serialize the document to JSON."""
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, data: str) -> 'DocumentEnvelope':
        """Deserialize a document from JSON."""
        try:
            obj = json.loads(data)
        except json.JSONDecodeError as e:
            raise InvalidArgumentError(f"Input is not valid JSON: {e}")
        if not isinstance(obj, dict) or 'kind' not in obj or 'payload' not in obj:
            raise InvalidArgumentError("Document must be an object with 'kind' and 'payload'")
        return cls(
            kind=obj['kind'],
            payload=obj['payload'],
            meta=obj.get('meta', {}),
        )


def get_logger_name(component: str, label: Optional[Any] = None) -> str:
    """Get standard logger name for a component, optionally qualified."""
    if label is None:
        return component
    return f"{component}.{label}"
