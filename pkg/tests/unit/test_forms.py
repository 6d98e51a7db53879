"""Unit tests for the derivation-based differential calculus."""

import math

import numpy as np
import pytest

from af_gauge.algebra.forms import (
    Form,
    basis_one_form,
    conjugate_form,
    connection_from_fields,
    curvature_form,
    evaluate,
    gauge_transform_form,
    hodge_star,
    integral,
    koszul_d,
    permutation_sign,
    random_form,
    scalar_product,
    unit_form,
    volume_form,
    wedge,
    zero_form,
)
from af_gauge.algebra.matalg import basis_from_generators, gellmann_basis
from af_gauge.exceptions import (
    InvalidArgumentError,
    InvalidGaugeElementError,
    UnsupportedDimensionError,
)
from af_gauge.gauge.action import random_unitary
from af_gauge.gauge.potential import potential_density
from af_gauge.processing.checks import random_anti_hermitian


class TestFormStorage:
    """Test component normalization."""

    def test_permutation_sign(self):
        assert permutation_sign((0, 1, 2)) == 1
        assert permutation_sign((1, 0, 2)) == -1
        assert permutation_sign((2, 0, 1)) == 1

    def test_unsorted_keys_pick_up_sign(self, sl2):
        form = Form.from_components([sl2], [{(1, 0): np.eye(2)}])
        assert np.allclose(form.component(0, (0, 1)), -np.eye(2))

    def test_repeated_indices_vanish(self, sl2):
        form = Form.from_components([sl2], [{(1, 1): np.eye(2)}])
        assert form.components[0] == {}

    def test_out_of_range_index(self, sl2):
        with pytest.raises(InvalidArgumentError):
            Form.from_components([sl2], [{(3,): np.eye(2)}])

    def test_mixed_degrees_detected(self, sl2):
        form = unit_form([sl2]) + basis_one_form([sl2], 0, 1)
        assert form.degrees(0) == [0, 1]
        with pytest.raises(InvalidArgumentError):
            form.homogeneous_degree(0)


class TestEvaluation:
    """Test evaluation on derivations."""

    def test_evaluate_with_signs(self, sl2):
        theta = wedge(basis_one_form([sl2], 0, 0), basis_one_form([sl2], 0, 1))
        assert np.allclose(evaluate(theta, [(0, 0), (0, 1)])[0], np.eye(2))
        assert np.allclose(evaluate(theta, [(0, 1), (0, 0)])[0], -np.eye(2))

    def test_mixed_summands_evaluate_to_zero(self, sl2):
        bases = [sl2, sl2]
        form = random_form(bases, 2, np.random.default_rng(1))
        values = evaluate(form, [(0, 0), (1, 1)])
        assert all(np.count_nonzero(v) == 0 for v in values)

    def test_degree_zero(self, sl2):
        a = np.array([[1, 2], [3, 4]])
        assert np.allclose(evaluate(zero_form([sl2], [a]), [])[0], a)


class TestKoszulDifferential:
    """Test d on sl(2) and sl(3)."""

    def test_d_of_zero_form_is_commutator(self, sl2):
        a = np.array([[0, 1], [2, 0]], dtype=complex)
        da = koszul_d(zero_form([sl2], [a]))
        for alpha in range(3):
            expected = sl2.generators[alpha] @ a - a @ sl2.generators[alpha]
            assert np.allclose(da.component(0, (alpha,)), expected)

    def test_d_of_unit_is_zero(self, sl3):
        assert koszul_d(unit_form([sl3])).max_abs() == 0.0

    @pytest.mark.parametrize("n", [2, 3])
    def test_d_squared_vanishes(self, n, rng):
        bases = [gellmann_basis(n)]
        dim = bases[0].dim
        for trial in range(100):
            degree = trial % min(dim, 4)
            omega = random_form(bases, degree, rng, density=1.0 if n == 2 else 0.25)
            assert koszul_d(koszul_d(omega)).max_abs() <= 1e-11 * max(1.0, omega.max_abs())

    def test_graded_leibniz(self, sl2, sl3, rng):
        for bases in ([sl2], [sl3]):
            for trial in range(100):
                p, q = trial % 3, (trial // 3) % 2
                omega = random_form(bases, p, rng, density=0.5)
                eta = random_form(bases, q, rng, density=0.5)
                lhs = koszul_d(wedge(omega, eta))
                rhs = wedge(koszul_d(omega), eta) + ((-1) ** p) * wedge(omega, koszul_d(eta))
                assert (lhs - rhs).max_abs() <= 1e-10

    def test_direct_sum_acts_blockwise(self, sl2, rng):
        omega = random_form([sl2, sl2], 1, rng)
        joint = koszul_d(omega)
        for i in range(2):
            alone = koszul_d(Form.from_components([sl2], [dict(omega.components[i])]))
            for key, value in alone.components[0].items():
                assert np.allclose(joint.component(i, key), value, atol=1e-12)


class TestHodgeAndIntegral:
    """Test the Hodge dual, the integral and the scalar product."""

    def test_integral_of_volume_form(self, sl2, sl3):
        assert integral(volume_form([sl2, sl3])) == pytest.approx(5.0)

    def test_star_of_unit_is_volume(self, sl2):
        star = hodge_star(unit_form([sl2]))
        assert np.allclose(star.component(0, (0, 1, 2)), np.eye(2))

    def test_star_of_theta1(self, sl2):
        """With g = -1, star theta^1 = -theta^2 ^ theta^3."""
        star = hodge_star(basis_one_form([sl2], 0, 0))
        assert np.allclose(star.component(0, (1, 2)), -np.eye(2))

    def test_star_twice_on_sl2(self, sl2, rng):
        for degree in range(4):
            omega = random_form([sl2], degree, rng)
            twice = hodge_star(hodge_star(omega))
            sign = (-1) ** (degree * (3 - degree)) * -1
            assert (twice - omega * sign).max_abs() <= 1e-12

    def test_star_refused_for_large_algebras(self):
        sl4 = gellmann_basis(4)
        with pytest.raises(UnsupportedDimensionError):
            hodge_star(basis_one_form([sl4], 0, 0))

    @pytest.mark.parametrize("degree", [0, 1, 2])
    def test_scalar_product_matches_integral_of_star(self, sl3, rng, degree):
        omega = random_form([sl3], degree, rng, density=0.4)
        eta = random_form([sl3], degree, rng, density=0.4)
        direct = integral(wedge(omega, hodge_star(eta)))
        assert scalar_product(omega, eta) == pytest.approx(direct, abs=1e-10)

    @pytest.mark.parametrize("degree", [0, 1, 2, 3])
    def test_direct_sum_splits_the_integral(self, sl2, rng, degree):
        omega = random_form([sl2, sl2], degree, rng)
        other = random_form([sl2, sl2], degree, rng)
        joint = integral(wedge(omega, hodge_star(other)))
        split = sum(integral(wedge(omega.summand(i), hodge_star(other.summand(i)))) for i in range(2))
        assert joint == pytest.approx(split, abs=1e-9)
        assert scalar_product(omega, other) == pytest.approx(joint, abs=1e-9)

    def test_summand_restriction(self, sl2, sl3, rng):
        omega = random_form([sl2, sl3], 1, rng)
        alone = omega.summand(1)
        assert alone.bases == (sl3,)
        assert alone.components[0] is omega.components[1]

    @pytest.mark.parametrize("degree", [1, 2])
    def test_scalar_product_on_a_scaled_basis(self, sl2, rng, degree):
        scaled = basis_from_generators(2.0 * np.asarray(sl2.generators))
        assert scaled.sqrt_abs_det == pytest.approx(8.0)
        omega = random_form([scaled], degree, rng)
        eta = random_form([scaled], degree, rng)
        direct = integral(wedge(omega, hodge_star(eta)))
        assert scalar_product(omega, eta) == pytest.approx(direct, abs=1e-9)

    def test_scalar_product_degree_mismatch(self, sl2, rng):
        with pytest.raises(InvalidArgumentError):
            scalar_product(random_form([sl2], 1, rng), random_form([sl2], 2, rng))


class TestGaugeTransformations:
    """Test gauge laws of connections, curvatures and general forms."""

    def test_canonical_connection_is_invariant(self, sl2, rng):
        omega = connection_from_fields([sl2], [np.zeros((3, 2, 2))])
        moved = gauge_transform_form(omega, [random_unitary(2, rng)], connection=True)
        assert (moved - omega).max_abs() <= 1e-12

    def test_curvature_of_canonical_connection_vanishes(self, sl3):
        omega = connection_from_fields([sl3], [np.zeros((8, 3, 3))])
        assert curvature_form(omega).max_abs() <= 1e-12

    def test_curvature_covariance(self, sl2, rng):
        for _ in range(5):
            omega = connection_from_fields([sl2], [random_anti_hermitian(2, 3, rng)])
            u = [random_unitary(2, rng)]
            lhs = curvature_form(gauge_transform_form(omega, u, connection=True))
            rhs = conjugate_form(curvature_form(omega), u)
            assert (lhs - rhs).max_abs() <= 1e-10

    def test_curvature_norm_is_minus_potential(self, sl2, rng):
        fields = random_anti_hermitian(2, 3, rng)
        omega = curvature_form(connection_from_fields([sl2], [fields]))
        value = potential_density(fields, sl2.structconst)
        assert scalar_product(omega, omega).real == pytest.approx(-value, rel=1e-10)

    def test_transport_preserves_wedge(self, sl2, rng):
        u = [random_unitary(2, rng)]
        omega, eta = random_form([sl2], 1, rng), random_form([sl2], 1, rng)
        lhs = gauge_transform_form(wedge(omega, eta), u)
        rhs = wedge(gauge_transform_form(omega, u), gauge_transform_form(eta, u))
        assert (lhs - rhs).max_abs() <= 1e-10

    def test_transport_commutes_with_d(self, sl2, rng):
        u = [random_unitary(2, rng)]
        omega = random_form([sl2], 1, rng)
        lhs = koszul_d(gauge_transform_form(omega, u))
        rhs = gauge_transform_form(koszul_d(omega), u)
        assert (lhs - rhs).max_abs() <= 1e-10

    @pytest.mark.parametrize("n, degree", [(2, 1), (2, 2), (3, 1), (3, 2)])
    def test_star_commutes_with_transport(self, n, degree, rng):
        bases = [gellmann_basis(n)]
        u = [random_unitary(n, rng)]
        omega = random_form(bases, degree, rng, density=1.0 if n == 2 else 0.4)
        lhs = hodge_star(gauge_transform_form(omega, u))
        rhs = gauge_transform_form(hodge_star(omega), u)
        assert (lhs - rhs).max_abs() <= 1e-9

    def test_action_integral_is_gauge_invariant(self, sl2, sl3, rng):
        for bases in ([sl2], [sl3], [sl2, sl3]):
            omega = random_form(bases, 2, rng, density=0.5)
            u = [random_unitary(b.n, rng) for b in bases]
            density = wedge(omega, hodge_star(omega))
            assert integral(gauge_transform_form(density, u)) == pytest.approx(integral(density), abs=1e-9)
            moved = gauge_transform_form(omega, u)
            assert scalar_product(moved, moved) == pytest.approx(scalar_product(omega, omega), abs=1e-9)

    def test_non_unitary_rejected(self, sl2):
        omega = basis_one_form([sl2], 0, 0)
        with pytest.raises(InvalidGaugeElementError):
            gauge_transform_form(omega, [2 * np.eye(2)])

    def test_connection_needs_one_form(self, sl2):
        with pytest.raises(InvalidArgumentError):
            gauge_transform_form(unit_form([sl2]), [np.eye(2)], connection=True)

    def test_integral_is_linear(self, sl2):
        assert integral(volume_form([sl2]) * 2.0) == pytest.approx(4.0)
        assert math.isclose(abs(integral(volume_form([sl2]))), 2.0)
