"""Unit tests for field configurations and the Higgs potential."""

import numpy as np
import pytest

from af_gauge.exceptions import DimensionMismatchError
from af_gauge.gauge.action import source_potential
from af_gauge.gauge.fields import (
    BlockFields,
    basis_configuration,
    block_fields,
    configuration_from_vector,
    free_size,
    null_configuration,
    random_configuration,
    source_fields,
)
from af_gauge.gauge.potential import (
    commutator_residuals,
    curvature_components,
    get_model,
    gradient_relative_error,
    higgs_gradient,
    higgs_potential,
    potential_density,
    vector_potential,
)


class TestFieldConfigurations:
    """Test packing and materializing field configurations."""

    def test_free_size(self, case1, case2, m2_identity):
        assert free_size(case1) == 5 * 9
        assert free_size(case2) == 9 * 16
        assert free_size(m2_identity) == 0

    def test_inherited_fields_follow_lambda(self, case2):
        config = null_configuration(case2, [0.5, -2.0])
        stack = block_fields(case2, config).blocks[0]
        block = case2.blocks[0]
        for k, (i, _, _) in enumerate(block.inherited):
            expected = (0.5, -2.0)[i] * block.generators[k]
            assert np.allclose(stack[k], expected)
        assert np.allclose(stack[block.n_inherited:], 0.0)

    def test_basis_configuration_reproduces_generators(self, case1):
        stack = block_fields(case1, basis_configuration(case1)).blocks[0]
        assert np.allclose(stack, case1.blocks[0].generators)

    def test_vector_round_trip(self, case2, rng):
        vector = rng.normal(size=free_size(case2))
        config = configuration_from_vector(case2, [1.0, 2.0], vector)
        assert np.array_equal(config.to_vector(), vector)
        assert config.n_free == vector.size

    def test_wrong_sizes(self, case1):
        with pytest.raises(DimensionMismatchError):
            configuration_from_vector(case1, [1.0], np.zeros(3))
        with pytest.raises(DimensionMismatchError):
            null_configuration(case1, [1.0, 2.0])
        with pytest.raises(DimensionMismatchError):
            block_fields(case1, BlockFields(blocks=(np.zeros((3, 3, 3)),)))

    def test_source_fields(self, case2):
        fields = source_fields(case2, [2.0, 3.0])
        assert np.allclose(fields[1], 3.0 * case2.source_bases[1].generators)


class TestPotential:
    """Test the potential and its curvature components."""

    def test_vanishes_at_null_and_basis_configurations(self, lifted_cases):
        for lifted in lifted_cases.values():
            assert higgs_potential(lifted, null_configuration(lifted)) == 0.0
            assert higgs_potential(lifted, basis_configuration(lifted)) == pytest.approx(0.0, abs=1e-20)

    def test_non_negative(self, lifted_cases, rng):
        for lifted in lifted_cases.values():
            for _ in range(5):
                assert higgs_potential(lifted, random_configuration(lifted, rng)) >= 0.0

    @pytest.mark.parametrize("lam", [-1.0, 0.25, 0.5, 1.0, 2.0])
    def test_identity_embedding_matches_source(self, m2_identity, sl2, lam):
        value = higgs_potential(m2_identity, null_configuration(m2_identity, [lam]))
        assert value == pytest.approx(6.0 * (lam * lam - lam) ** 2, abs=1e-12)
        assert value == pytest.approx(source_potential([sl2], [lam]), abs=1e-12)

    @pytest.mark.parametrize("lam", [-1.0, 0.25, 0.5, 1.0, 2.0])
    def test_complement_commutators_feed_inherited_directions(self, case1, lam):
        """On M2 -> M3 the J^c pairs add 3 lambda^2 when their fields are zero."""
        value = higgs_potential(case1, null_configuration(case1, [lam]))
        assert value == pytest.approx(6.0 * (lam * lam - lam) ** 2 + 3.0 * lam * lam, abs=1e-12)

    def test_midpoint_values(self, m2_identity, case1):
        assert higgs_potential(m2_identity, null_configuration(m2_identity, [0.5])) == pytest.approx(0.375)
        assert higgs_potential(case1, null_configuration(case1, [0.5])) == pytest.approx(1.125)
        assert higgs_potential(case1, null_configuration(case1, [0.25])) == pytest.approx(0.3984375)

    def test_residuals_vanish_on_a_representation(self, sl3):
        residuals = commutator_residuals(np.asarray(sl3.generators), sl3.structconst)
        assert np.max(np.abs(residuals)) < 1e-12

    def test_curvature_is_minus_residual(self, case1, rng):
        config = random_configuration(case1, rng)
        curvature = curvature_components(case1, config)[0]
        stack = block_fields(case1, config).blocks[0]
        residuals = commutator_residuals(stack, case1.blocks[0].basis.structconst)
        assert np.allclose(curvature, -residuals)
        assert 0.5 * np.sum(np.abs(curvature) ** 2) == pytest.approx(higgs_potential(case1, config))

    def test_empty_stack(self):
        assert potential_density(np.zeros((0, 1, 1)), np.zeros((0, 0, 0))) == 0.0

    def test_model_matches_direct_evaluation(self, case2, rng):
        vector = rng.uniform(-1, 1, size=free_size(case2))
        model = get_model(case2)
        direct = vector_potential(case2, [0.3, 1.2], vector)
        assert model.value(vector, [0.3, 1.2]) == pytest.approx(direct, rel=1e-12)
        value, _ = model.value_and_gradient(vector, [0.3, 1.2])
        assert value == pytest.approx(direct, rel=1e-12)


class TestGradient:
    """Test the analytic gradient against central differences."""

    @pytest.mark.parametrize("name", ["case1", "case2"])
    def test_matches_finite_differences(self, lifted_cases, rng, name):
        lifted = lifted_cases[name]
        config = random_configuration(lifted, rng, scale=0.8)
        assert gradient_relative_error(lifted, config) < 1e-6

    def test_vanishes_at_the_basis_configuration(self, case1):
        gradient = higgs_gradient(case1, basis_configuration(case1))
        assert np.max(np.abs(gradient)) < 1e-12

    def test_vanishes_at_the_null_configuration(self, case2):
        gradient = higgs_gradient(case2, null_configuration(case2))
        assert np.max(np.abs(gradient)) == 0.0
