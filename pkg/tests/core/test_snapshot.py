"""Unit tests for binary and JSON snapshots."""

from pathlib import Path

import numpy as np
import pytest

from nskq.core.errors import SnapshotFormatError
from nskq.core.fields import FlowState
from nskq.core.initial_data import generate_initial_data
from nskq.core.lattice import FrequencyLattice
from nskq.core.snapshot import (
    HEADER,
    decode_snapshot,
    encode_snapshot,
    load_snapshot,
    save_snapshot,
    snapshot_from_json,
    snapshot_to_json,
)


@pytest.fixture
def state() -> FlowState:
    """Random-phase power-law state on a small lattice."""
    lattice = FrequencyLattice(d=2, N=8)
    data = generate_initial_data({"kind": "power_law", "random_phase": True}, lattice, seed=3)
    return data.with_time(0.25)


class TestBinarySnapshot:
    """Tests for the binary layout."""

    def test_header_size(self) -> None:
        """Test the fixed 36-byte header."""
        assert HEADER.size == 36

    def test_payload_size(self, state: FlowState) -> None:
        """Test header plus (d + 1) N^d complex128 values."""
        payload = encode_snapshot(state)

        assert len(payload) == 36 + 3 * 8**2 * 16
        assert payload[:4] == b"NSKQ"

    def test_decode_restores_state(self, state: FlowState) -> None:
        """Test that decoding restores coefficients, lattice and time."""
        restored = decode_snapshot(encode_snapshot(state))

        assert restored.lattice == state.lattice
        assert restored.t == 0.25
        assert restored.real is True
        np.testing.assert_array_equal(restored.as_array(), state.as_array())

    def test_bad_magic_raises_error(self, state: FlowState) -> None:
        """Test that a foreign file is rejected."""
        payload = b"XXXX" + encode_snapshot(state)[4:]

        with pytest.raises(SnapshotFormatError, match="Bad snapshot magic"):
            decode_snapshot(payload)

    def test_truncated_body_raises_error(self, state: FlowState) -> None:
        """Test that a short body is rejected."""
        payload = encode_snapshot(state)[:-16]

        with pytest.raises(SnapshotFormatError, match="body has"):
            decode_snapshot(payload)

    def test_short_header_raises_error(self) -> None:
        """Test that a payload shorter than the header is rejected."""
        with pytest.raises(SnapshotFormatError, match="shorter than"):
            decode_snapshot(b"NSKQ")

    def test_save_and_load(self, state: FlowState, tmp_path: Path) -> None:
        """Test writing into a nested directory and reading back."""
        path = save_snapshot(state, tmp_path / "nested" / "state.nskq")

        restored = load_snapshot(path)

        np.testing.assert_array_equal(restored.as_array(), state.as_array())

    def test_missing_file_raises_error(self, tmp_path: Path) -> None:
        """Test that a missing file is a format error."""
        with pytest.raises(SnapshotFormatError, match="not found"):
            load_snapshot(tmp_path / "missing.nskq")


class TestJsonSnapshot:
    """Tests for the JSON text form."""

    def test_json_restores_state(self, state: FlowState) -> None:
        """Test that the JSON form keeps every coefficient."""
        restored = snapshot_from_json(snapshot_to_json(state))

        assert restored.t == 0.25
        np.testing.assert_array_equal(restored.as_array(), state.as_array())

    def test_wrong_format_raises_error(self) -> None:
        """Test that other JSON documents are rejected."""
        with pytest.raises(SnapshotFormatError, match="Not an nskq snapshot"):
            snapshot_from_json('{"format": "other"}')

    def test_missing_keys_raise_error(self) -> None:
        """Test that incomplete documents are rejected."""
        with pytest.raises(SnapshotFormatError, match="Invalid JSON snapshot"):
            snapshot_from_json('{"format": "nskq-snapshot", "d": 2}')

    def test_load_by_suffix(self, state: FlowState, tmp_path: Path) -> None:
        """Test that .json files are parsed as text."""
        path = tmp_path / "state.json"
        path.write_text(snapshot_to_json(state))

        assert load_snapshot(path).lattice == state.lattice

    def test_large_lattice_warns(self) -> None:
        """Test that big JSON snapshots warn."""
        state = FlowState.zeros(FrequencyLattice(d=2, N=128))

        with pytest.warns(UserWarning, match="prefer the binary format"):
            snapshot_to_json(state)
