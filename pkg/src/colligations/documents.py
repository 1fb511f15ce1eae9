"""JSON documents for colligation objects, with a canonical byte format.

A document is a single JSON object ``{"kind": ..., "metadata": ...,
"payload": ...}``.  Complex scalars are two-element ``[re, im]`` arrays and
matrices are nested row-major arrays of those pairs, so any JSON reader can
consume the files.  :func:`emit_document` always produces the canonical
form -- sorted keys, no whitespace, one trailing newline, shortest lossless
float literals -- so parse/emit round-trips are byte-identical.
"""

from __future__ import annotations

import dataclasses
import json
from typing import Union

import numpy as np

from .colligation import Colligation, random_colligation
from .conjugacy import TriColligation, random_tri
from .doublecoset import DoubleCosetFamily, random_family
from .errors import ColligationError, DocumentError
from .linalg import DEFAULT_TOLERANCES, Tolerances
from .multi import MultiColligation, random_multi

__all__ = [
    "SCHEMA_VERSION",
    "KINDS",
    "Document",
    "Payload",
    "matrix_to_json",
    "matrix_from_json",
    "parse_document",
    "emit_document",
    "load_document",
    "save_document",
    "document_for",
    "random_document",
]

SCHEMA_VERSION = "1"
KINDS = ("colligation", "multi", "tri", "doublecoset")

Payload = Union[Colligation, MultiColligation, TriColligation, DoubleCosetFamily]


@dataclasses.dataclass(frozen=True)
class Document:
    """A kind tag, a validated payload object, and free-form metadata."""

    kind: str
    payload: Payload
    metadata: dict


def _parse_error(message: str) -> DocumentError:
    return DocumentError("parse", message)


def matrix_to_json(m) -> list:
    """Row-major nested lists with each entry as a ``[re, im]`` pair."""
    a = np.asarray(m, dtype=complex)
    return [[[float(v.real), float(v.imag)] for v in row] for row in a]


def matrix_from_json(obj, what: str) -> np.ndarray:
    """Inverse of :func:`matrix_to_json`; raises ``DocumentError`` on bad shape."""
    if not isinstance(obj, list) or not obj:
        raise _parse_error(f"{what}: expected a non-empty list of rows")
    width = None
    rows = []
    for i, row in enumerate(obj):
        if not isinstance(row, list) or not row:
            raise _parse_error(f"{what}: row {i} is not a non-empty list")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise _parse_error(f"{what}: row {i} has {len(row)} entries, expected {width}")
        entries = []
        for j, pair in enumerate(row):
            if (
                not isinstance(pair, list)
                or len(pair) != 2
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in pair)
            ):
                raise _parse_error(f"{what}: entry ({i},{j}) is not a [re, im] number pair")
            entries.append(complex(pair[0], pair[1]))
        rows.append(entries)
    m = np.array(rows, dtype=complex)
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise _parse_error(f"{what}: entries must be finite")
    return m


def _require_keys(obj: dict, required: dict, optional: dict, what: str) -> None:
    for key in obj:
        if key not in required and key not in optional:
            raise _parse_error(f"{what}: unexpected key {key!r}")
    for key in required:
        if key not in obj:
            raise _parse_error(f"{what}: missing key {key!r}")


def _natural(obj: dict, key: str, what: str) -> int:
    value = obj[key]
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise _parse_error(f"{what}: {key!r} must be a positive integer")
    return value


def _parse_metadata(obj) -> dict:
    if not isinstance(obj, dict):
        raise _parse_error("metadata must be an object")
    _require_keys(obj, {"schema_version": None}, {"seed": None}, "metadata")
    version = obj["schema_version"]
    if version != SCHEMA_VERSION:
        raise _parse_error(f"unsupported schema_version {version!r}")
    meta = {"schema_version": version}
    if "seed" in obj:
        seed = obj["seed"]
        if not isinstance(seed, int) or isinstance(seed, bool):
            raise _parse_error("metadata: 'seed' must be an integer")
        meta["seed"] = seed
    return meta


def _parse_payload(kind: str, obj, tol: Tolerances) -> Payload:
    if not isinstance(obj, dict):
        raise _parse_error("payload must be an object")
    what = f"{kind} payload"
    if kind == "colligation":
        _require_keys(obj, dict.fromkeys(("alpha", "inner", "matrix")), {}, what)
        alpha = _natural(obj, "alpha", what)
        inner = _natural(obj, "inner", what)
        matrix = matrix_from_json(obj["matrix"], what)
        if matrix.shape != (alpha + inner, alpha + inner):
            raise _parse_error(
                f"{what}: matrix shape {matrix.shape} does not match alpha+inner"
            )
        return Colligation(matrix, alpha, tol)
    if kind in ("multi", "doublecoset"):
        _require_keys(obj, dict.fromkeys(("alpha", "inner", "members")), {}, what)
        alpha = _natural(obj, "alpha", what)
        inner = _natural(obj, "inner", what)
        raw = obj["members"]
        if not isinstance(raw, list) or not raw:
            raise _parse_error(f"{what}: 'members' must be a non-empty list")
        members = []
        for i, entry in enumerate(raw):
            matrix = matrix_from_json(entry, f"{what} member {i}")
            if matrix.shape != (alpha + inner, alpha + inner):
                raise _parse_error(
                    f"{what}: member {i} shape {matrix.shape} does not match alpha+inner"
                )
            members.append(Colligation(matrix, alpha, tol))
        cls = MultiColligation if kind == "multi" else DoubleCosetFamily
        return cls(members)
    # kind == "tri"
    _require_keys(obj, dict.fromkeys(("alpha", "p", "slots", "matrix")), {}, what)
    alpha = _natural(obj, "alpha", what)
    slot_dim = _natural(obj, "p", what)
    slots = _natural(obj, "slots", what)
    matrix = matrix_from_json(obj["matrix"], what)
    size = alpha + slots * slot_dim
    if matrix.shape != (size, size):
        raise _parse_error(f"{what}: matrix shape {matrix.shape} does not match the split")
    return TriColligation(matrix, alpha, slot_dim, slots, tol)


def parse_document(text: str, tol: Tolerances = DEFAULT_TOLERANCES) -> Document:
    """Parse and validate one JSON document.

    Raises ``DocumentError`` with stage ``"parse"`` for malformed input and
    stage ``"invariant"`` when the input is well-formed JSON describing an
    invalid object (for example a non-unitary matrix).
    """
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _parse_error(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise _parse_error("document must be a JSON object")
    _require_keys(obj, dict.fromkeys(("kind", "metadata", "payload")), {}, "document")
    kind = obj["kind"]
    if kind not in KINDS:
        raise _parse_error(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")
    metadata = _parse_metadata(obj["metadata"])
    try:
        payload = _parse_payload(kind, obj["payload"], tol)
    except DocumentError:
        raise
    except ColligationError as exc:
        raise DocumentError("invariant", f"{type(exc).__name__}: {exc}") from exc
    return Document(kind, payload, metadata)


def _payload_to_object(kind: str, payload: Payload) -> dict:
    if kind == "colligation":
        return {
            "alpha": payload.alpha,
            "inner": payload.inner,
            "matrix": matrix_to_json(payload.matrix),
        }
    if kind in ("multi", "doublecoset"):
        return {
            "alpha": payload.alpha,
            "inner": payload.inner,
            "members": [matrix_to_json(member.matrix) for member in payload.members],
        }
    return {
        "alpha": payload.alpha,
        "p": payload.slot_dim,
        "slots": payload.slots,
        "matrix": matrix_to_json(payload.matrix),
    }


def emit_document(doc: Document) -> str:
    """Serialize to the canonical byte form (stable under parse/emit)."""
    obj = {
        "kind": doc.kind,
        "metadata": doc.metadata,
        "payload": _payload_to_object(doc.kind, doc.payload),
    }
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def load_document(path, tol: Tolerances = DEFAULT_TOLERANCES) -> Document:
    """Read and parse a document file (UTF-8)."""
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise _parse_error(f"cannot read {path}: {exc}") from exc
    return parse_document(text, tol)


def save_document(doc: Document, path) -> None:
    """Write the canonical serialization to a file (UTF-8)."""
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(emit_document(doc))


def _kind_of(payload: Payload) -> str:
    if isinstance(payload, Colligation):
        return "colligation"
    if isinstance(payload, MultiColligation):
        return "multi"
    if isinstance(payload, TriColligation):
        return "tri"
    if isinstance(payload, DoubleCosetFamily):
        return "doublecoset"
    raise TypeError(f"not a document payload: {type(payload).__name__}")


def document_for(payload: Payload, seed: int | None = None) -> Document:
    """Wrap an in-memory object as a document with fresh metadata."""
    metadata = {"schema_version": SCHEMA_VERSION}
    if seed is not None:
        metadata["seed"] = int(seed)
    return Document(_kind_of(payload), payload, metadata)


def random_document(
    kind: str,
    seed: int,
    alpha: int = 2,
    inner: int = 2,
    arity: int = 2,
) -> Document:
    """A seeded random document of any kind.

    ``arity`` is the member count for family kinds and the slot count for the
    coupled kind; ``inner`` is the inner dimension (slot dimension for the
    coupled kind).
    """
    if kind == "colligation":
        payload: Payload = random_colligation(alpha, inner, seed)
    elif kind == "multi":
        payload = random_multi(alpha, inner, arity, seed)
    elif kind == "tri":
        payload = random_tri(alpha, inner, arity, seed)
    elif kind == "doublecoset":
        payload = random_family(alpha, inner, arity, seed)
    else:
        raise _parse_error(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")
    return document_for(payload, seed)
