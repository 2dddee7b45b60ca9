"""
Unit tests for matrix fields, operator-valued kernels, the Jacobi eigensolver
and the column RBMO_Σ norms.
"""

import numpy as np
import pytest

from dyadic_rbmo.core.lattice import build_lattice
from dyadic_rbmo.kernels import CauchyKernel
from dyadic_rbmo.matrixval import (
    MatrixField, MatrixKernel, column_row_report, endpoint_corpus_report, hermitian_eigvalsh, hormander_report,
    jacobi_eigvalsh, kadison_schwarz_check, load_matrix_field, operator_norm, rbmo_sigma_c_norm,
    rbmo_sigma_norm_twosided, save_matrix_field, theorem_d_terms,
)
from dyadic_rbmo.operators import endpoint_terms
from dyadic_rbmo.spaces import rbmo_sigma_norm
from dyadic_rbmo.utils.corpus import random_hermitian_fields, resolve_measure


def _unitary(rng, m):
    raw = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    q, _ = np.linalg.qr(raw)
    return q


class TestLinearAlgebra:
    """Test cases for the Jacobi eigensolver and operator norms."""

    def test_real_symmetric(self):
        """Test the eigenvalues of [[2, 1], [1, 2]]."""
        assert np.allclose(jacobi_eigvalsh(np.array([[2.0, 1.0], [1.0, 2.0]])), [1.0, 3.0])

    def test_complex_hermitian(self):
        """Test the eigenvalues of [[2, i], [-i, 2]] through the real embedding."""
        H = np.array([[2.0, 1j], [-1j, 2.0]])

        assert np.allclose(hermitian_eigvalsh(H), [1.0, 3.0])

    def test_matches_dense_solver(self, rng):
        """Test random Hermitian stacks against numpy."""
        raw = rng.standard_normal((6, 4, 4)) + 1j * rng.standard_normal((6, 4, 4))
        H = raw + np.conj(np.swapaxes(raw, 1, 2))

        assert np.allclose(hermitian_eigvalsh(H), np.linalg.eigvalsh(H), atol=1e-8)

    def test_operator_norm(self, rng):
        """Test ||X|| against the largest singular value."""
        X = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))

        assert float(operator_norm(X)) == pytest.approx(np.linalg.norm(X, 2), rel=1e-8)

    def test_non_square_rejected(self):
        """Test that rectangular input raises."""
        with pytest.raises(ValueError):
            jacobi_eigvalsh(np.zeros((2, 3)))


class TestMatrixField:
    """Test cases for MatrixField."""

    def test_from_scalar(self, uniform_measure, fields):
        """Test the 1 x 1 embedding of a scalar field."""
        f = MatrixField.from_scalar(uniform_measure, fields[0])

        assert f.m == 1
        assert np.allclose(f.values[:, 0, 0], fields[0].values)
        assert not f.values.flags.writeable

    def test_diagonal_norm(self, uniform_measure):
        """Test that the operator norm of a diagonal field is the largest modulus."""
        f = MatrixField.diagonal(uniform_measure, [np.full(16, 2.0), np.full(16, -5.0)])

        assert f.norm_inf() == pytest.approx(5.0)

    def test_adjoint_and_shift(self, uniform_measure, rng):
        """Test f** = f and f + c - c = f."""
        f = MatrixField.random_hermitian(uniform_measure, 2, rng)
        c = np.array([[1.0, 2j], [0.5, -1.0]])

        assert np.allclose(f.adjoint().adjoint().values, f.values)
        assert np.allclose(f.shifted(c).shifted(-c).values, f.values)

    @pytest.mark.parametrize(
        "shape",
        [(16, 2, 3), (15, 2, 2), (16, 9, 9), (16, 2)],
    )
    def test_invalid_shapes(self, uniform_measure, shape):
        """Test that malformed value arrays raise."""
        with pytest.raises(ValueError):
            MatrixField.on(uniform_measure, np.zeros(shape))

    def test_non_finite_rejected(self, uniform_measure):
        """Test that NaN entries raise."""
        values = np.zeros((16, 2, 2))
        values[3, 1, 0] = np.nan
        with pytest.raises(ValueError):
            MatrixField.on(uniform_measure, values)

    def test_measure_checked(self, uniform_measure, three_point_measure):
        """Test that a field rejects a different measure."""
        f = MatrixField.from_scalar(uniform_measure, np.ones(16))
        with pytest.raises(ValueError):
            f.check(three_point_measure)

    def test_file_round_trip(self, uniform_measure, temp_dir, rng):
        """Test saving and loading a complex field as [re, im] pairs."""
        f = MatrixField.random_hermitian(uniform_measure, 3, rng)
        path = temp_dir / "field.json"
        save_matrix_field(f, path)

        assert np.allclose(load_matrix_field(path, uniform_measure).values, f.values)

    def test_bad_file_rejected(self, uniform_measure, temp_dir):
        """Test that entries without an imaginary part raise."""
        path = temp_dir / "field.json"
        path.write_text("[[[1.0]]]")
        with pytest.raises(ValueError):
            load_matrix_field(path, uniform_measure)


class TestMatrixKernel:
    """Test cases for MatrixKernel."""

    def test_scalar_kernel_matches_operator(self, operator, uniform_measure, fields):
        """Test that the 1 x 1 kernel applies like the scalar operator."""
        K = MatrixKernel.from_scalar(CauchyKernel(), uniform_measure)
        f = MatrixField.from_scalar(uniform_measure, fields[0])

        assert np.allclose(K.apply(f)[:, 0, 0], operator.kernel_matrix @ (fields[0].values * uniform_measure.weights))

    def test_table_matches_factor(self, uniform_measure, rng):
        """Test that the explicit table and the factored form agree."""
        U = _unitary(rng, 2)
        factored = MatrixKernel.from_scalar(CauchyKernel(), uniform_measure, U)
        table = MatrixKernel.from_table(uniform_measure, factored.entries())
        f = MatrixField.random_hermitian(uniform_measure, 2, rng)

        assert np.allclose(factored.apply(f), table.apply(f))
        assert table.block_operator_norm() == pytest.approx(factored.block_operator_norm(), rel=1e-6)

    def test_size_constant(self, uniform_measure):
        """Test that the Cauchy kernel keeps its size constant with a unitary factor."""
        K = MatrixKernel.from_scalar(CauchyKernel(), uniform_measure, np.eye(2))

        assert K.size_constant(uniform_measure) == pytest.approx(1.0)

    def test_mismatch_rejected(self, uniform_measure, three_point_measure):
        """Test fields of the wrong size, order or measure."""
        K = MatrixKernel.from_scalar(CauchyKernel(), uniform_measure, np.eye(2))
        with pytest.raises(ValueError):
            K.apply(np.zeros((16, 3, 3)))
        with pytest.raises(ValueError):
            K.apply(MatrixField.on(three_point_measure, np.zeros((3, 2, 2))))
        with pytest.raises(ValueError):
            MatrixKernel.from_table(uniform_measure, np.zeros((16, 15, 2, 2)))

    def test_hormander_sums_finite(self):
        """Test that the Hörmander sums are finite and positive on a 64-point grid."""
        mu = resolve_measure("builtin:uniform:64")
        report = hormander_report(MatrixKernel.from_scalar(CauchyKernel(), mu), build_lattice(mu))

        assert report["finite"]
        assert report["cubes"] > 0
        assert report["max_sum"] > 0


class TestColumnNorms:
    """Test cases for the column RBMO_Σ norms and the Kadison-Schwarz check."""

    def test_scalar_case(self, filtration, fields):
        """Test that m = 1 gives the scalar p = 2 norm."""
        mu = filtration.measure
        for f in fields:
            column = rbmo_sigma_c_norm(filtration, MatrixField.from_scalar(mu, f))
            assert column == pytest.approx(rbmo_sigma_norm(filtration, f, 2.0).norm_value, rel=1e-10, abs=1e-12)

    def test_unitary_invariance(self, filtration, rng):
        """Test ||U f||_c = ||f||_c for a constant unitary U."""
        f = MatrixField.random_hermitian(filtration.measure, 3, rng)
        U = _unitary(rng, 3)

        assert rbmo_sigma_c_norm(filtration, f.left_multiply(U)) == pytest.approx(rbmo_sigma_c_norm(filtration, f),
                                                                                 rel=1e-9)

    def test_constants_vanish(self, filtration):
        """Test that constant matrix fields have norm zero."""
        c = np.array([[1.0, 2.0 - 1j], [3j, -4.0]])
        f = MatrixField.on(filtration.measure, np.broadcast_to(c, (filtration.measure.size, 2, 2)))

        assert rbmo_sigma_c_norm(filtration, f) == pytest.approx(0.0, abs=1e-10)

    def test_twosided_dominates_column(self, filtration, rng):
        """Test that the two-sided norm is the larger of the column norms of f and f*."""
        f = MatrixField.on(filtration.measure, rng.standard_normal((filtration.measure.size, 2, 2)))
        twosided = rbmo_sigma_norm_twosided(filtration, f)

        assert twosided >= rbmo_sigma_c_norm(filtration, f) - 1e-12
        assert twosided >= rbmo_sigma_c_norm(filtration, f.adjoint()) - 1e-12

    def test_kadison_schwarz(self, gaussian_filtration):
        """Test the positivity of the averaged variance on every atom."""
        for f in random_hermitian_fields(gaussian_filtration.measure, 2, 3, seed=5):
            report = kadison_schwarz_check(gaussian_filtration, f)
            assert report.passed
            assert report.get("psd_gap").value >= -1e-8

    def test_column_row_report(self, uniform_measure):
        """Test the exact column constant and the sampled row constant."""
        K = MatrixKernel.from_scalar(CauchyKernel(), uniform_measure, np.eye(2))
        report = column_row_report(K, uniform_measure, random_hermitian_fields(uniform_measure, 3, 2, seed=1))

        assert report["row_samples"] == 3
        assert 0 < report["row_ratio"] <= report["column_norm"] * (1 + 1e-6)


class TestMatrixEndpoint:
    """Test cases for the operator-valued endpoint split."""

    def test_scalar_case(self, operator, filtration, fields):
        """Test that m = 1 reproduces the scalar split."""
        mu = filtration.measure
        K = MatrixKernel.from_scalar(CauchyKernel(), mu)
        atom = next(iter(filtration.sigma_parent))
        scalar = endpoint_terms(operator, filtration, fields[0], atom)
        matrix = theorem_d_terms(filtration, K, MatrixField.from_scalar(mu, fields[0]), atom)

        assert matrix.lhs == pytest.approx(scalar.lhs, rel=1e-9, abs=1e-12)
        assert matrix.total == pytest.approx(scalar.total, rel=1e-9, abs=1e-12)
        assert matrix.norm == pytest.approx(scalar.norm_inf)

    def test_zero_field_rejected(self, filtration):
        """Test that f = 0 raises."""
        mu = filtration.measure
        K = MatrixKernel.from_scalar(CauchyKernel(), mu, np.eye(2))
        atom = next(iter(filtration.sigma_parent))
        with pytest.raises(ValueError):
            theorem_d_terms(filtration, K, MatrixField.on(mu, np.zeros((mu.size, 2, 2))), atom)

    def test_corpus_report(self, filtration):
        """Test that the four terms bound the left-hand side over a small corpus."""
        mu = filtration.measure
        K = MatrixKernel.from_scalar(CauchyKernel(), mu, np.eye(2))
        atoms = list(filtration.sigma_parent)[:4]
        report = endpoint_corpus_report(filtration, K, random_hermitian_fields(mu, 2, 2, seed=7), atoms)

        assert report["fields"] == 2
        assert report["atoms"] == len(atoms)
        assert report["split_failures"] == 0
        assert np.isfinite(report["boundedness_ratio"])
