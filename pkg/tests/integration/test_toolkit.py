"""
Integration tests for the toolkit.

Runs whole commands on small bundled measures and checks their artifacts.
"""

import json

import pytest

from dyadic_rbmo.core.toolkit import RBMOToolkit
from dyadic_rbmo.kernels import CauchyKernel
from dyadic_rbmo.utils.config_parser import RunConfig


@pytest.fixture
def small_config(temp_dir):
    """Run configuration small enough for a full run."""
    return RunConfig(
        measure="builtin:uniform:16",
        field_count=2,
        matrix_field_count=2,
        matrix_size=2,
        step_levels=[1.0, 4.0],
        out=str(temp_dir / "run"),
    )


class TestToolkit:
    """Integration test cases for RBMOToolkit."""

    def test_run_all(self, small_config, temp_dir):
        """Test that a full run passes and writes every artifact."""
        result = RBMOToolkit(small_config).run_all()

        assert result.passed, result.to_dict()["failures"]
        for name in ("lattice.json", "filtration.json", "norms.json", "apply.json", "czd.json", "weak11.json",
                     "sparse_report.json", "a2_sweep.csv", "matrix_endpoint.json", "summary.json"):
            assert (temp_dir / "run" / name).exists(), name

        summary = json.loads((temp_dir / "run" / "summary.json").read_text())
        assert summary["passed"]
        assert "lattice build" in summary["commands"]

    def test_lattice_is_deterministic(self, small_config, temp_dir):
        """Test that two builds write the same lattice.json."""
        first = RBMOToolkit(small_config)
        first.run_lattice()
        text = (temp_dir / "run" / "lattice.json").read_text()

        small_config.out = str(temp_dir / "again")
        RBMOToolkit(small_config).run_lattice()

        assert (temp_dir / "again" / "lattice.json").read_text() == text

    def test_lattice_reload(self, small_config, temp_dir):
        """Test that a written lattice is reused by later commands."""
        RBMOToolkit(small_config).run_lattice()
        small_config.lattice = str(temp_dir / "run" / "lattice.json")
        toolkit = RBMOToolkit(small_config)

        result = toolkit.run_filtration()

        assert result.passed
        assert toolkit.lattice.to_dict() == RBMOToolkit(RunConfig(measure="builtin:uniform:16")).lattice.to_dict()

    def test_lattice_for_other_measure_rejected(self, small_config, temp_dir):
        """Test that a lattice built over another measure raises."""
        RBMOToolkit(small_config).run_lattice()
        small_config.lattice = str(temp_dir / "run" / "lattice.json")
        small_config.measure = "builtin:gaussian:16"

        with pytest.raises(ValueError):
            RBMOToolkit(small_config).run_filtration()

    def test_invalid_config_rejected(self, small_config):
        """Test that validation issues raise at construction."""
        small_config.sparse_lambda = 0.75
        with pytest.raises(ValueError):
            RBMOToolkit(small_config)

    def test_paper_mode_requires_large_alpha(self, small_config):
        """Test that paper mode with a small alpha raises when the parameters are built."""
        small_config.mode = "paper"
        toolkit = RBMOToolkit(small_config)
        toolkit.config.alpha = 4.0

        with pytest.raises(ValueError):
            toolkit.params

    def test_kernel_registration(self, small_config):
        """Test registering a kernel under a new name."""
        small_config.kernel = "mine"
        toolkit = RBMOToolkit(small_config)
        toolkit.register_kernel("mine", CauchyKernel)

        assert "mine" in toolkit.get_available_kernels()
        assert isinstance(toolkit.kernel, CauchyKernel)

    def test_jobs_do_not_change_results(self, small_config, temp_dir):
        """Test that the norms are independent of the worker count."""
        serial = RBMOToolkit(small_config).run_norms()
        small_config.jobs = 3
        small_config.out = str(temp_dir / "threaded")
        threaded = RBMOToolkit(small_config).run_norms()

        assert serial.summary == threaded.summary

    def test_field_file(self, small_config, temp_dir):
        """Test that --field replaces the random corpus."""
        path = temp_dir / "f.json"
        path.write_text(json.dumps([float(i % 3) for i in range(16)]))
        small_config.field = str(path)
        toolkit = RBMOToolkit(small_config)

        assert len(toolkit.fields) == 1
        assert toolkit.run_sparse().passed
