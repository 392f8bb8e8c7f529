"""Report serialisation helpers."""

