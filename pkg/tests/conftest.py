import os
import sys

import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from diagram_core import from_pairs  # noqa: E402

EXAMPLE_PAIRS = [(1, 8), (2, 9), (3, 4), (5, 7), (6, 10), (11, 12)]


@pytest.fixture
def example_diagram():
    """Six chords with 4 crossings, 4 nestings, 3 components and 2 simple chords"""
    return from_pairs(EXAMPLE_PAIRS)


@pytest.fixture
def config_file(tmp_path):
    """A config.json whose log directory lives under tmp_path"""
    path = tmp_path / "config.json"
    path.write_text('{"log_dir": "%s", "log_level": "WARNING"}' % (tmp_path / "logs").as_posix())
    return str(path)
