"""
Unit tests for the CLI entry point's error handling.
"""

import json

import pytest

from dyadic_rbmo.__main__ import main
from dyadic_rbmo.core.lattice import LatticeError
from dyadic_rbmo.core.toolkit import RBMOToolkit
from config.constants import EXIT_USAGE_ERROR


class TestMainErrors:
    """Test cases for the exit status of failing runs."""

    def _run(self, temp_dir):
        return main(["lattice", "build", "--measure", "builtin:uniform:16", "--out", str(temp_dir)])

    @pytest.mark.parametrize(
        "error",
        [ValueError("bad value"), LatticeError("bad lattice"), FileNotFoundError("gone"), PermissionError("locked")],
    )
    def test_expected_errors_exit_2(self, monkeypatch, capsys, temp_dir, error):
        """Test that value and file errors exit 2 with a JSON record naming the error."""
        def fail(toolkit):
            raise error

        monkeypatch.setattr(RBMOToolkit, "run_lattice", fail)

        with pytest.raises(SystemExit) as exit_info:
            self._run(temp_dir)

        assert exit_info.value.code == EXIT_USAGE_ERROR
        record = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert record["error"] == type(error).__name__

    @pytest.mark.parametrize("error", [RuntimeError("bug"), KeyError("missing"), ZeroDivisionError()])
    def test_unexpected_errors_propagate(self, monkeypatch, temp_dir, error):
        """Test that other exceptions are not turned into a usage exit."""
        def fail(toolkit):
            raise error

        monkeypatch.setattr(RBMOToolkit, "run_lattice", fail)

        with pytest.raises(type(error)):
            self._run(temp_dir)
