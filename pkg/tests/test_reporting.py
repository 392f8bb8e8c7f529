"""Unit tests for the CSV writers."""

from pathlib import Path

import pytest

from nskq.core.analyticity import RadiusEstimate
from nskq.utils.reporting import RADIUS_COLUMNS, format_cell, write_csv, write_radius_csv


class TestFormatCell:
    """Tests for cell rendering."""

    def test_missing_values_are_empty(self) -> None:
        """Test None and NaN."""
        assert format_cell(None) == ""
        assert format_cell(float("nan")) == ""

    def test_booleans(self) -> None:
        """Test lower-case booleans."""
        assert format_cell(True) == "true"
        assert format_cell(False) == "false"

    def test_floats_round_trip(self) -> None:
        """Test 17 significant digits."""
        value = 0.1 + 0.2

        assert format_cell(value) == "0.30000000000000004"
        assert float(format_cell(value)) == value
        assert format_cell(0.0) == "0"

    def test_integers_and_strings(self) -> None:
        """Test pass-through of ints and strings."""
        assert format_cell(7) == "7"
        assert format_cell("ok") == "ok"


class TestWriteCsv:
    """Tests for the CSV layout."""

    def test_header_and_rows(self, tmp_path: Path) -> None:
        """Test column order and row rendering."""
        path = write_csv(tmp_path / "out" / "table.csv", ("a", "b"), [(1.5, None), (True, 2)])

        assert path.read_text() == "a,b\n1.5,\ntrue,2\n"

    def test_row_length_raises_error(self, tmp_path: Path) -> None:
        """Test that short rows are rejected."""
        with pytest.raises(ValueError, match="Row has 1 cells, expected 2"):
            write_csv(tmp_path / "table.csv", ("a", "b"), [(1.0,)])

    def test_undefined_radius_is_empty(self, tmp_path: Path) -> None:
        """Test that an undefined estimate leaves sigma_hat empty."""
        path = write_radius_csv(tmp_path / "radius.csv", [RadiusEstimate(t=0.5)])

        lines = path.read_text().splitlines()
        assert lines[0] == ",".join(RADIUS_COLUMNS)
        assert lines[1] == "0.5,,0,,"
