"""Binary and JSON snapshot formats for flow states.

The binary layout is documented in ``docs/SNAPSHOT_FORMAT.md``: a 36-byte
little-endian header followed by the complex128 coefficients of every
component in row-major FFT order.
"""

import json
import logging
import struct
import warnings
from pathlib import Path
from typing import Any

import numpy as np

from nskq.core.errors import SnapshotFormatError
from nskq.core.fields import FlowState
from nskq.core.lattice import FrequencyLattice

logger = logging.getLogger(__name__)

MAGIC = b"NSKQ"
VERSION = 1
HEADER = struct.Struct("<4sHHIddB3xI")
JSON_FORMAT = "nskq-snapshot"
JSON_SIZE_LIMIT = 4096


def encode_snapshot(state: FlowState) -> bytes:
    """Serialize a state to the binary snapshot layout."""
    lattice = state.lattice
    arr = state.as_array()
    header = HEADER.pack(
        MAGIC,
        VERSION,
        lattice.d,
        lattice.N,
        float(lattice.L),
        float(state.t),
        int(state.real),
        arr.shape[0],
    )
    return header + np.ascontiguousarray(arr, dtype="<c16").tobytes()


def decode_snapshot(payload: bytes) -> FlowState:
    """Parse the binary snapshot layout.

    Raises:
        SnapshotFormatError: If the header or the payload size is invalid

    """
    if len(payload) < HEADER.size:
        raise SnapshotFormatError(
            f"Snapshot has {len(payload)} bytes, shorter than the {HEADER.size}-byte header."
        )
    magic, version, d, N, L, t, real, components = HEADER.unpack_from(payload)
    if magic != MAGIC:
        raise SnapshotFormatError(f"Bad snapshot magic {magic!r}, expected {MAGIC!r}.")
    if version != VERSION:
        raise SnapshotFormatError(f"Unsupported snapshot version {version}, expected {VERSION}.")
    if components != d + 1:
        raise SnapshotFormatError(f"Snapshot holds {components} components, expected d+1={d + 1}.")
    expected = components * N**d * 16
    body = payload[HEADER.size :]
    if len(body) != expected:
        raise SnapshotFormatError(
            f"Snapshot body has {len(body)} bytes, expected {expected} for d={d}, N={N}."
        )
    try:
        lattice = FrequencyLattice(d=d, N=N, L=L)
    except ValueError as e:
        raise SnapshotFormatError(f"Snapshot header describes an invalid lattice: {e}") from e
    arr = np.frombuffer(body, dtype="<c16").reshape((components, *lattice.shape))
    return FlowState.from_array(lattice, arr.astype(complex), t=t, real=bool(real))


def save_snapshot(state: FlowState, path: str | Path) -> Path:
    """Write a binary snapshot, creating parent directories."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_bytes(encode_snapshot(state))
    logger.debug(f"Wrote snapshot t={state.t:.6g} to {target}")
    return target


def load_snapshot(path: str | Path) -> FlowState:
    """Read a binary (``.nskq``) or JSON (``.json``) snapshot."""
    source = Path(path)
    if not source.exists():
        raise SnapshotFormatError(f"Snapshot file not found: {source}")
    if source.suffix == ".json":
        return snapshot_from_json(source.read_text())
    return decode_snapshot(source.read_bytes())


def snapshot_to_json(state: FlowState) -> str:
    """JSON text form, intended for small lattices."""
    lattice = state.lattice
    if lattice.N**lattice.d > JSON_SIZE_LIMIT:
        warnings.warn(
            f"JSON snapshot of {lattice.N**lattice.d} modes per component is large; "
            "prefer the binary format.",
            UserWarning,
            stacklevel=2,
        )
    arr = state.as_array().reshape(lattice.d + 1, -1)
    document: dict[str, Any] = {
        "format": JSON_FORMAT,
        "version": VERSION,
        "d": lattice.d,
        "N": lattice.N,
        "L": lattice.L,
        "t": state.t,
        "real": state.real,
        "components": [{"re": row.real.tolist(), "im": row.imag.tolist()} for row in arr],
    }
    return json.dumps(document)


def snapshot_from_json(text: str) -> FlowState:
    """Parse the JSON text form.

    Raises:
        SnapshotFormatError: If required keys are missing or inconsistent

    """
    try:
        document = json.loads(text)
        if document.get("format") != JSON_FORMAT:
            raise SnapshotFormatError(f"Not an nskq snapshot: format={document.get('format')!r}")
        lattice = FrequencyLattice(d=int(document["d"]), N=int(document["N"]), L=float(document["L"]))
        rows = [
            np.asarray(c["re"], dtype=float) + 1j * np.asarray(c["im"], dtype=float)
            for c in document["components"]
        ]
        arr = np.stack(rows).reshape((lattice.d + 1, *lattice.shape))
        return FlowState.from_array(
            lattice, arr, t=float(document["t"]), real=bool(document["real"])
        )
    except SnapshotFormatError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise SnapshotFormatError(f"Invalid JSON snapshot: {e}") from e
