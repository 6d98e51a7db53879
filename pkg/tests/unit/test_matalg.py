"""Unit tests for sl(n) bases, metrics and structure constants."""

import math

import numpy as np
import pytest

from af_gauge.algebra.matalg import (
    basis_from_generators,
    commutator,
    commutator_residual,
    diagonal_generator,
    gellmann_basis,
    gram_metric,
    is_anti_hermitian,
    jacobi_residual,
    lowered_structure_constants,
    offdiagonal_pair,
    source_basis,
    structure_constants,
)
from af_gauge.exceptions import DegenerateMetricError, InvalidArgumentError


class TestGeneratorFamilies:
    """Test the building blocks of the Gell-Mann basis."""

    def test_offdiagonal_pair_order(self):
        """The symmetric member comes first."""
        sym, anti = offdiagonal_pair(3, 0, 2)
        assert sym[0, 2] == pytest.approx(1j / math.sqrt(2))
        assert sym[2, 0] == pytest.approx(1j / math.sqrt(2))
        assert anti[0, 2] == pytest.approx(1 / math.sqrt(2))
        assert anti[2, 0] == pytest.approx(-1 / math.sqrt(2))

    def test_offdiagonal_pair_rejects_bad_positions(self):
        with pytest.raises(InvalidArgumentError):
            offdiagonal_pair(3, 2, 1)

    def test_diagonal_generator_is_traceless(self):
        for k in range(1, 4):
            generator = diagonal_generator(4, k)
            assert abs(np.trace(generator)) < 1e-15
            assert np.trace(generator @ generator).real == pytest.approx(-1.0)

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_generators_anti_hermitian_and_traceless(self, n):
        basis = gellmann_basis(n)
        assert basis.dim == n * n - 1
        for generator in basis.generators:
            assert is_anti_hermitian(generator)
            assert abs(np.trace(generator)) < 1e-14


class TestGramMetric:
    """Test the trace metric."""

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_orthonormal(self, n):
        basis = gellmann_basis(n)
        assert np.allclose(basis.gram, -np.eye(n * n - 1), atol=1e-14)
        assert basis.is_orthonormal
        assert basis.sqrt_abs_det == pytest.approx(1.0)

    def test_gram_of_raw_stack(self, sl2):
        assert np.allclose(gram_metric(np.asarray(sl2.generators)), sl2.gram)

    def test_degenerate_metric_rejected(self, sl2):
        stack = np.array([sl2.generators[0], sl2.generators[0]])
        with pytest.raises(DegenerateMetricError):
            structure_constants(stack)


class TestStructureConstants:
    """Test C^c_ab for the Gell-Mann bases."""

    def test_sl2_generator_order(self, sl2):
        """Symmetric member of the pair first, antisymmetric second, diagonal last."""
        s = 1 / math.sqrt(2)
        assert np.allclose(sl2.generators[0], [[0, 1j * s], [1j * s, 0]])
        assert np.allclose(sl2.generators[1], [[0, s], [-s, 0]])
        assert np.allclose(sl2.generators[2], [[1j * s, 0], [0, -1j * s]])

    def test_sl2_is_minus_sqrt2_epsilon(self, sl2):
        constants = sl2.structconst
        assert constants[0, 1, 2] == pytest.approx(-math.sqrt(2))
        assert constants[1, 2, 0] == pytest.approx(-math.sqrt(2))
        assert constants[2, 0, 1] == pytest.approx(-math.sqrt(2))
        assert constants[1, 0, 2] == pytest.approx(math.sqrt(2))
        assert constants[0, 0, 1] == 0.0

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_jacobi_identity(self, n):
        assert jacobi_residual(gellmann_basis(n).structconst) <= 1e-10

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_commutators_rebuilt(self, n):
        assert commutator_residual(gellmann_basis(n)) <= 1e-12

    def test_lowered_constants_totally_antisymmetric(self, sl3):
        lowered = lowered_structure_constants(sl3)
        assert np.allclose(lowered, -lowered.transpose(1, 0, 2), atol=1e-12)
        assert np.allclose(lowered, -lowered.transpose(0, 2, 1), atol=1e-12)

    def test_constants_are_real(self, sl3):
        assert sl3.structconst.dtype == np.float64

    def test_expand_recovers_coefficients(self, sl3, rng):
        coefficients = rng.normal(size=sl3.dim)
        matrix = np.einsum("a,aij->ij", coefficients, sl3.generators)
        assert np.allclose(sl3.expand(matrix), coefficients)

    def test_expand_commutator(self, sl2):
        bracket = commutator(sl2.generators[0], sl2.generators[1])
        assert np.allclose(sl2.expand(bracket), sl2.structconst[0, 1])


class TestBasisConstructors:
    """Test edge cases of basis construction."""

    @pytest.mark.parametrize("n", [0, 1, -3])
    def test_gellmann_requires_n_at_least_2(self, n):
        with pytest.raises(InvalidArgumentError):
            gellmann_basis(n)

    def test_source_basis_of_size_one_is_empty(self):
        basis = source_basis(1)
        assert basis.dim == 0
        assert basis.structconst.shape == (0, 0, 0)
        assert basis.sqrt_abs_det == 1.0

    def test_basis_from_generators_rejects_bad_shape(self):
        with pytest.raises(InvalidArgumentError):
            basis_from_generators(np.zeros((3, 2, 3)))

    def test_arrays_are_read_only(self, sl2):
        with pytest.raises(ValueError):
            sl2.generators[0, 0, 0] = 1.0
