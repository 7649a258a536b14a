from thin_junction import __version__, main


def test_main_function_exists():
    """Test that the main function is callable."""
    assert callable(main)


def test_version_is_set():
    """Test that the package exposes its version."""
    assert __version__.count(".") == 2
