"""Spectral core, solver and analysis modules."""

