import numpy as np
import pytest

from schrodinger_dpg.physics import (SchrodingerOperator, apply_operator,
                                     case_from_derivatives, gaussian_case,
                                     wavepacket_case)


class TestGaussianCase:
    def test_value_at_origin_is_amplitude(self):
        case = gaussian_case(M=1.5, T0=1.5, beta=2.5)
        np.testing.assert_allclose(case.u(0.0, 0.0), 1.5, rtol=1e-15)

    def test_default_parameters(self):
        case = gaussian_case()
        assert case.params == {"M": 1.5, "T0": 1.5, "beta": 2.5}
        assert case.beta == 2.5

    def test_modulus_bounded_by_amplitude(self):
        # |T0^2 - i beta t| >= T0^2 for t >= 0, so |u| <= M on the strip
        case = gaussian_case()
        x, t = np.meshgrid(np.linspace(0, 1, 31), np.linspace(0, 1, 31))
        assert np.max(np.abs(case.u(x, t))) <= 1.5 + 1e-14

    def test_forcing_is_nonzero(self):
        # the printed solution does not annihilate the operator, so the
        # manufactured forcing must carry a genuine residual term
        case = gaussian_case()
        assert abs(case.f(0.4, 0.3)) > 1e-3

    def test_invalid_parameters(self):
        with pytest.raises(ValueError):
            gaussian_case(T0=0.0)
        with pytest.raises(ValueError):
            gaussian_case(beta=-1.0)


class TestWavepacketCase:
    def test_amplitude_formula(self):
        case = wavepacket_case(omega=20.0)
        np.testing.assert_allclose(case.params["a0"], (2.0 / 400.0) ** 0.25,
                                   rtol=1e-15)
        np.testing.assert_allclose(case.params["a0"], 0.26591479484724945,
                                   rtol=1e-12)
        np.testing.assert_allclose(case.u(0.0, 0.0), case.params["a0"],
                                   rtol=1e-15)

    def test_forcing_at_origin(self):
        # d_t u(0,0) = 0 and d_xx u(0,0) = -2 a0 / omega^2, so
        # f(0,0) = (beta/2) * 2 a0 / omega^2
        omega, beta = 20.0, 2.5
        case = wavepacket_case(omega=omega, beta=beta)
        a0 = case.params["a0"]
        np.testing.assert_allclose(case.f(0.0, 0.0), beta * a0 / omega**2,
                                   rtol=1e-14)


@pytest.mark.parametrize("case", [gaussian_case(), wavepacket_case()],
                         ids=["gaussian", "wavepacket"])
class TestDerivativeClosures:
    def test_forcing_matches_finite_difference_operator(self, case):
        rng = np.random.default_rng(11)
        x = rng.uniform(0.05, 0.95, 100)
        t = rng.uniform(0.05, 0.95, 100)
        fd = apply_operator(case.operator, case.u, x, t)
        scale = np.max(np.abs(case.f(x, t))) + 1.0
        np.testing.assert_allclose(case.f(x, t), fd, atol=1e-6 * scale)

    def test_dxx_matches_second_differences(self, case):
        rng = np.random.default_rng(5)
        x = rng.uniform(0.05, 0.95, 100)
        t = rng.uniform(0.05, 0.95, 100)
        h = 1e-4
        fd = (case.u(x + h, t) - 2 * case.u(x, t) + case.u(x - h, t)) / h**2
        np.testing.assert_allclose(case.u_xx(x, t), fd, rtol=1e-5, atol=1e-10)

    def test_dx_and_dt_match_differences(self, case):
        rng = np.random.default_rng(13)
        x = rng.uniform(0.05, 0.95, 50)
        t = rng.uniform(0.05, 0.95, 50)
        h = 1e-6
        fd_x = (case.u(x + h, t) - case.u(x - h, t)) / (2 * h)
        fd_t = (case.u(x, t + h) - case.u(x, t - h)) / (2 * h)
        np.testing.assert_allclose(case.u_x(x, t), fd_x, atol=1e-8)
        np.testing.assert_allclose(case.u_t(x, t), fd_t, atol=1e-8)

    def test_boundary_data_accessors(self, case):
        xs = np.linspace(0, 1, 7)
        np.testing.assert_allclose(case.u0(xs), case.u(xs, 0 * xs))
        np.testing.assert_allclose(case.ul(xs), case.u(0 * xs, xs))
        np.testing.assert_allclose(case.ur(xs), case.u(0 * xs + 1.0, xs))


class TestApplyOperator:
    def test_constant_field_annihilated(self):
        op = SchrodingerOperator(2.5)
        val = apply_operator(op, lambda x, t: 3.0 + 0 * np.asarray(x), 0.3, 0.7)
        np.testing.assert_allclose(val, 0.0, atol=1e-8)

    def test_linear_field_annihilated(self):
        op = SchrodingerOperator(1.7)
        val = apply_operator(op, lambda x, t: np.asarray(x) + 0j, 0.4, 0.2)
        np.testing.assert_allclose(val, 0.0, atol=1e-8)

    def test_free_eigenmode_evolution(self):
        # u = e_k(x) exp(i omega_k^2 t) solves the homogeneous equation
        # at beta = 2 because -e_k'' = omega_k^2 e_k
        k = 3
        om2 = (k * np.pi) ** 2
        case = case_from_derivatives(
            "eigenmode", beta=2.0,
            u=lambda x, t: np.sin(k * np.pi * np.asarray(x)) * np.exp(1j * om2 * np.asarray(t)),
            u_t=lambda x, t: 1j * om2 * np.sin(k * np.pi * np.asarray(x)) * np.exp(1j * om2 * np.asarray(t)),
            u_x=lambda x, t: k * np.pi * np.cos(k * np.pi * np.asarray(x)) * np.exp(1j * om2 * np.asarray(t)),
            u_xx=lambda x, t: -om2 * np.sin(k * np.pi * np.asarray(x)) * np.exp(1j * om2 * np.asarray(t)),
        )
        rng = np.random.default_rng(2)
        x, t = rng.uniform(0, 1, 20), rng.uniform(0, 1, 20)
        np.testing.assert_allclose(apply_operator(case.operator, case, x, t),
                                   0.0, atol=1e-10)

    def test_invalid_beta(self):
        with pytest.raises(ValueError):
            SchrodingerOperator(0.0)
