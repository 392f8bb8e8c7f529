"""Basic import tests for the nskq package."""


def test_nskq_import() -> None:
    """Test that nskq package can be imported."""
    import nskq

    assert nskq.__version__ == "0.1.0"


def test_core_import() -> None:
    """Test that nskq.core can be imported."""
    from nskq import core

    assert core is not None


def test_utils_import() -> None:
    """Test that nskq.utils can be imported."""
    from nskq import utils

    assert utils is not None
