import subprocess
import sys

import pytest

import anemone


def test_every_export_resolves():
    for name in anemone.__all__:
        assert getattr(anemone, name) is not None


def test_unknown_attribute_raises():
    with pytest.raises(AttributeError):
        anemone.no_such_symbol


def test_version_string():
    assert anemone.__version__.count(".") == 2


def test_import_does_not_pull_numpy():
    # The CLI relies on pinning BLAS threads before numpy first loads, so
    # the bare package import must not import numpy as a side effect.
    code = (
        "import sys; import anemone; "
        "sys.exit(1 if 'numpy' in sys.modules else 0)"
    )
    proc = subprocess.run([sys.executable, "-c", code])
    assert proc.returncode == 0
