import json

import numpy as np
import pytest

from diskrat import (
    CountOutOfRange,
    FourierExpansion,
    IndexOutOfRange,
    KernelSpec,
    OrderTooSmall,
    PoleSequence,
    TMBasis,
    TrailingPolesMismatch,
    cauchy_integral,
    circle_grid,
    closed_form_J,
    default_grid_size,
    expand_function,
    expand_kernel,
    fourier_coefficient,
    h2_remainder,
    integrate_circle,
    remainder_integral_J,
)

GRID = circle_grid(4096)


def binomial_coefficients(w, count):
    """Series oracle: K_0(x; w) = sum (k+1) (conj(w) x)^k, so the monomial
    coefficients are (k+1) conj(w)^k."""
    return [(k + 1) * np.conj(w) ** k for k in range(count)]


class TestFourierCoefficient:
    def test_orthonormal_reproduction(self):
        basis = TMBasis([0.3, -0.4j, 0.5, 0.2])
        for j in range(4):
            for m in range(4):
                c = fourier_coefficient(lambda t, j=j: basis.eval(j, t), basis, m, GRID)
                expected = 1.0 if m == j else 0.0
                assert abs(c - expected) < 1e-12

    def test_bergman_coefficients_match_binomial_series(self):
        spec = KernelSpec(0, 0.5)
        basis = TMBasis([0j, 0j, 0j])
        expected = binomial_coefficients(0.5, 3)
        for m in range(3):
            c = fourier_coefficient(spec.bergman, basis, m, GRID)
            assert c == pytest.approx(expected[m], abs=1e-12)
        assert expected[1] == pytest.approx(1.0)

    def test_index_validation(self):
        basis = TMBasis([0.3])
        with pytest.raises(IndexOutOfRange):
            fourier_coefficient(lambda t: t, basis, 1, GRID)


class TestPartialSum:
    def test_empty_sum_is_zero(self):
        exp = expand_kernel(KernelSpec(0, 0.5), TMBasis([0j, 0j]))
        assert exp.partial_sum(0, 0.3) == 0.0

    def test_single_term_reproduces_first_function(self):
        basis = TMBasis([0.3, -0.4j])
        exp = expand_function(lambda t: basis.eval(0, t), basis, GRID)
        z = 0.2 - 0.5j
        assert exp.partial_sum(1, z) == pytest.approx(basis.eval(0, z), abs=1e-12)

    def test_truncated_binomial_value(self):
        # oracle: sum_{k<3} (k+1) (0.5 * 0.3)^k = 1.3675
        spec = KernelSpec(0, 0.5)
        exp = expand_kernel(spec, TMBasis([0j, 0j, 0j]))
        expected = sum((k + 1) * 0.15**k for k in range(3))
        assert expected == pytest.approx(1.3675)
        assert exp.partial_sum(3, 0.3) == pytest.approx(expected, abs=1e-12)

    def test_count_validation(self):
        exp = expand_kernel(KernelSpec(0, 0.5), TMBasis([0j, 0j]))
        with pytest.raises(CountOutOfRange):
            exp.partial_sum(3, 0.1)
        with pytest.raises(CountOutOfRange):
            exp.partial_sum(-1, 0.1)


class TestExpansionInvariants:
    def test_bessel_bound_and_monotone_sums(self):
        spec = KernelSpec(1, 0.6)
        basis = TMBasis(PoleSequence.random(8, seed=7, max_modulus=0.8).with_trailing(0.6, 2))
        exp = expand_kernel(spec, basis)
        norm_sq = integrate_circle(lambda t: np.abs(spec.bergman(t)) ** 2, GRID).real
        sums = exp.squared_coefficient_sums()
        assert np.all(np.diff(sums) >= -1e-15)
        assert sums[-1] <= norm_sq + 1e-10

    def test_coefficients_reproducible(self):
        spec = KernelSpec(0, 0.4 - 0.3j)
        basis = TMBasis([0.3, -0.2j, spec.w])
        exp = expand_kernel(spec, basis)
        grid = circle_grid(exp.grid_size)
        for m in range(len(exp)):
            again = fourier_coefficient(spec.bergman, basis, m, grid)
            assert abs(again - exp.coefficients[m]) < 1e-12

    def test_json_round_trip(self):
        spec = KernelSpec(0, 0.5)
        exp = expand_kernel(spec, TMBasis([0.3, 0.5]))
        data = json.loads(json.dumps(exp.to_json_dict()))
        assert set(data) == {"poles", "coefficients", "source"}
        again = FourierExpansion.from_json_dict(data)
        assert np.allclose(again.coefficients, exp.coefficients)
        assert again.basis.poles == exp.basis.poles

    def test_default_grid_escalates_near_boundary(self):
        assert default_grid_size(3) == 4096
        assert default_grid_size(100) == 64 * 101
        assert default_grid_size(3, rho=0.95) == 8192
        assert default_grid_size(3, rho=0.99) == 32768


class TestH2Representation:
    def test_order_zero_remainder_is_cauchy_integral(self):
        spec = KernelSpec(1, 0.4)
        basis = TMBasis([0.3, 0.4, 0.4])
        z = 0.2
        rem = h2_remainder(spec.bergman, basis, 0, z, GRID)
        direct = cauchy_integral(spec.bergman, z, GRID)
        assert rem == pytest.approx(direct, abs=1e-14)
        assert rem == pytest.approx(spec.bergman(z), abs=1e-12)

    def test_function_in_span_has_zero_remainder(self):
        basis = TMBasis([0.3, -0.4j])
        rem = h2_remainder(lambda t: basis.eval(0, t), basis, 1, 0.2 + 0.3j, GRID)
        assert abs(rem) < 1e-12

    def test_two_sided_representation_value(self):
        spec = KernelSpec(1, 0.4)
        basis = TMBasis([0.3, 0.4, 0.4])
        exp = expand_kernel(spec, basis, GRID)
        z = 0.2
        lhs = spec.bergman(z)  # equals 1/0.92^3
        assert lhs == pytest.approx(1.0 / 0.92**3)
        total = exp.partial_sum(3, z) + h2_remainder(spec.bergman, basis, 3, z, GRID)
        assert abs(lhs - total) < 1e-11

    def test_representation_identity_many_functions(self):
        rng = np.random.default_rng(17)
        poles = PoleSequence.random(15, seed=23, max_modulus=0.8)
        basis = TMBasis(poles)
        spec = KernelSpec(2, 0.5 - 0.2j)
        functions = [
            spec.bergman,
            lambda t: basis.eval(3, t),
            lambda t: 1.0 + 2.0 * t - 0.5 * t**3,  # polynomial boundary trace
        ]
        radii = 0.8 * np.sqrt(rng.uniform(0, 1, 50))
        zs = radii * np.exp(2j * np.pi * rng.uniform(0, 1, 50))
        for f in functions:
            exp = expand_function(f, basis, GRID)
            for n in (1, 2, 3, 5, 8, 15):
                for z in zs[:10]:
                    z = complex(z)
                    value = cauchy_integral(f, z, GRID)
                    total = exp.partial_sum(n, z) + h2_remainder(f, basis, n, z, GRID)
                    assert abs(value - total) < 1e-10


class TestRemainderIntegral:
    def test_zero_kernel_point_kills_integral(self):
        spec = KernelSpec(0, 0j)
        basis = TMBasis([0j, 0j, 0j])
        for z in (0.0, 0.3 - 0.2j):
            value = remainder_integral_J(spec, basis, 2, z, GRID)
            assert abs(value) < 1e-14

    def test_trailing_pole_validation(self):
        spec = KernelSpec(0, 0.5)
        with pytest.raises(TrailingPolesMismatch):
            remainder_integral_J(spec, TMBasis([0.3, 0.2]), 1, 0.1, GRID)
        spec2 = KernelSpec(2, 0.5)
        with pytest.raises(OrderTooSmall):
            remainder_integral_J(spec2, TMBasis([0.5, 0.5, 0.5]), 1, 0.1, GRID)

    def test_closed_form_cross_check_alpha0(self):
        spec = KernelSpec(0, 0.5)
        basis = TMBasis([0.3, 0.5])
        quad = remainder_integral_J(spec, basis, 1, 0.1, GRID)
        closed = closed_form_J(spec, basis, 1, 0.1)
        assert abs(quad - closed) / abs(closed) < 1e-10

    def test_closed_form_cross_check_alpha1(self):
        spec = KernelSpec(1, 0.4j)
        basis = TMBasis([0.2, 0.4j, 0.4j])
        quad = remainder_integral_J(spec, basis, 2, -0.3, GRID)
        closed = closed_form_J(spec, basis, 2, -0.3)
        assert abs(quad - closed) / abs(closed) < 1e-10

    def test_consistency_with_kernel_remainder(self):
        # K - S_{n+1} = B_{n+1} * J at random disk points
        spec = KernelSpec(1, 0.4j)
        basis = TMBasis([0.2, 0.4j, 0.4j])
        exp = expand_kernel(spec, basis, GRID)
        rng = np.random.default_rng(29)
        radii = 0.8 * np.sqrt(rng.uniform(0, 1, 20))
        zs = radii * np.exp(2j * np.pi * rng.uniform(0, 1, 20))
        b = basis.blaschke(3)
        for z in zs:
            z = complex(z)
            lhs = spec.bergman(z) - exp.partial_sum(3, z)
            rhs = b(z) * remainder_integral_J(spec, basis, 2, z, GRID)
            assert abs(lhs - rhs) < 1e-10
