"""Test suite for nskq."""
