import numpy as np
import pytest

from arraymc._linalg import NumericalError
from arraymc.constants import BOLTZMANN
from arraymc.em_coupling import (
    ArrayGeometry,
    CouplingModel,
    impedance_matrix,
    inter_array_covariance,
    sample_scatterers,
)
from arraymc.multiport import (
    CircuitParams,
    build_channel,
    channel_covariance,
    channel_from_zart,
    channel_scale,
    gamma_factors,
    input_impedance,
    matching_network,
    noise_covariance,
    q_matrix,
)

LAM = 299792458.0 / 30e9
PARAMS = CircuitParams()


def rng(seed=0):
    return np.random.default_rng(seed)


def random_params(r):
    return CircuitParams(
        generator_impedance=complex(r.uniform(1, 300), r.uniform(-150, 150)),
        load_impedance=complex(r.uniform(1, 300), r.uniform(-150, 150)),
        tx_antenna_impedance=complex(r.uniform(1, 300), r.uniform(-150, 150)),
        rx_antenna_impedance=complex(r.uniform(1, 300), r.uniform(-150, 150)),
        lna_noise_resistance=r.uniform(0.5, 50),
        noise_correlation=0.5 * np.exp(1j * r.uniform(0, 2 * np.pi)),
        antenna_temperature=r.uniform(50, 600),
        bandwidth=r.uniform(1e6, 1e9),
    )


class TestCircuitParams:
    def test_table_defaults(self):
        p = PARAMS
        assert p.generator_impedance == 186 - 31.6j
        assert p.load_impedance == 186 - 31.6j
        assert p.rx_antenna_impedance == 73 + 42.5j
        assert p.tx_antenna_impedance == 73 + 42.5j
        assert p.lna_noise_resistance == 5.0
        assert p.noise_correlation == 0.2730 + 0.1793j
        assert p.antenna_temperature == 290.0
        assert p.bandwidth == 20e6
        assert p.current_noise_variance == pytest.approx(
            2 * BOLTZMANN * 20e6 * 290 / 5.0, rel=1e-15
        )

    def test_invariants(self):
        with pytest.raises(ValueError):
            CircuitParams(generator_impedance=-1 + 0j)
        with pytest.raises(ValueError):
            CircuitParams(noise_correlation=1.2 + 0j)
        with pytest.raises(ValueError):
            CircuitParams(lna_noise_resistance=0.0)
        with pytest.raises(ValueError):
            CircuitParams(normalization=0.0)


class TestMatchingNetwork:
    def test_table_values_give_conjugate_input(self):
        z_t = input_impedance(PARAMS)
        assert z_t == pytest.approx(186 + 31.6j, rel=1e-13)

    def test_reciprocal_and_reactive(self):
        z_mt = matching_network(PARAMS)
        assert z_mt[0, 1] == z_mt[1, 0]
        assert np.all(z_mt.real == 0.0)

    def test_conjugate_match_identity_random_draws(self):
        r = rng(100)
        for _ in range(100):
            p = random_params(r)
            expected = p.generator_impedance.conjugate()
            assert input_impedance(p) == pytest.approx(expected, rel=1e-12)


class TestQMatrix:
    def test_diagonal_case_is_scalar(self):
        z_r = (73 + 42.5j) * np.eye(5)
        q = q_matrix(186 - 31.6j, z_r)
        expected = (186 - 31.6j) / (259 + 10.9j)
        np.testing.assert_allclose(q, expected * np.eye(5), rtol=1e-13)

    def test_definition_residual(self):
        g = ArrayGeometry.from_spacing(16, 0.2 * LAM, LAM)
        z_r = impedance_matrix(g, CouplingModel.HALF_WAVE_DIPOLE, 73 + 42.5j)
        q = q_matrix(186 - 31.6j, z_r)
        lhs = q @ ((186 - 31.6j) * np.eye(16) + z_r)
        np.testing.assert_allclose(lhs, (186 - 31.6j) * np.eye(16), atol=1e-10 * 186)

    def test_ill_conditioned_rejected(self):
        z_l = 50 + 0j
        # one branch nearly cancels the load, the others do not
        z_r = np.diag([-z_l + 1e-14, 0.0, 0.0]).astype(complex)
        with pytest.raises(NumericalError):
            q_matrix(z_l, z_r)


class TestChannelFromZart:
    def test_zero_maps_to_zero(self):
        q = np.eye(4, dtype=complex)
        h = channel_from_zart(np.zeros(4, dtype=complex), q, PARAMS)
        assert np.all(h == 0)

    def test_linearity(self):
        r = rng(1)
        q = r.standard_normal((4, 4)) + 1j * r.standard_normal((4, 4))
        z = r.standard_normal(4) + 1j * r.standard_normal(4)
        a = 2.5 - 0.3j
        np.testing.assert_allclose(
            channel_from_zart(a * z, q, PARAMS), a * channel_from_zart(z, q, PARAMS), rtol=1e-12
        )

    def test_scalar_consistency_with_gamma(self):
        gamma1, _, g_u = gamma_factors(PARAMS)
        q_u = PARAMS.load_impedance / (PARAMS.load_impedance + PARAMS.rx_antenna_impedance)
        z = np.array([1.7 - 0.4j])
        h = channel_from_zart(z, np.array([[q_u]]), PARAMS)
        np.testing.assert_allclose(h, g_u * z, rtol=1e-13)
        assert abs(g_u) ** 2 == pytest.approx(gamma1, rel=1e-15)
        assert g_u == pytest.approx(channel_scale(PARAMS) * q_u, rel=1e-15)


class TestNoiseCovariance:
    def test_uncoupled_is_scalar_identity(self):
        n = 6
        z_r = (73 + 42.5j) * np.eye(n)
        q = q_matrix(186 - 31.6j, z_r)
        c_z = noise_covariance(q, z_r, PARAMS)
        off = c_z - np.diag(np.diag(c_z))
        assert np.abs(off).max() <= 1e-14 * np.abs(np.diag(c_z)).max()
        np.testing.assert_allclose(np.diag(c_z), c_z[0, 0], rtol=1e-12)
        assert c_z[0, 0].real > 0

    def test_hermitian_residual(self):
        g = ArrayGeometry.from_spacing(12, 0.15 * LAM, LAM)
        z_r = impedance_matrix(g, CouplingModel.HALF_WAVE_DIPOLE, 73 + 42.5j)
        q = q_matrix(186 - 31.6j, z_r)
        c_z = noise_covariance(q, z_r, PARAMS)
        assert np.abs(c_z - c_z.conj().T).max() <= 1e-12 * np.trace(c_z).real / 12

    def test_scalar_value_against_arithmetic(self):
        z_a = 73 + 42.5j
        z_r = z_a * np.eye(1)
        q = q_matrix(186 - 31.6j, z_r)
        c_z = noise_covariance(q, z_r, PARAMS)
        q_u = (186 - 31.6j) / (259 + 10.9j)
        sigma_i2 = PARAMS.current_noise_variance
        rho = PARAMS.noise_correlation
        expected = abs(q_u) ** 2 * (
            4 * BOLTZMANN * 290 * 20e6 * 73
            + sigma_i2 * (25 + abs(z_a) ** 2 - 10 * (np.conj(rho) * z_a).real)
        )
        assert c_z[0, 0].real == pytest.approx(expected, rel=1e-12)


class TestChannelCovariance:
    def test_zero_input(self):
        q = np.eye(3, dtype=complex)
        assert np.all(channel_covariance(q, np.zeros((3, 3)), PARAMS) == 0)

    def test_rank_preservation(self):
        g = ArrayGeometry.from_spacing(8, 0.3 * LAM, LAM)
        scene = sample_scatterers(25.0, -30.0, 3.0, 3, rng(2))
        c_art = inter_array_covariance(scene, g, 73.0)
        z_r = impedance_matrix(g, CouplingModel.HALF_WAVE_DIPOLE, 73 + 42.5j)
        q = q_matrix(186 - 31.6j, z_r)
        c_h = channel_covariance(q, c_art, PARAMS)
        eig = np.linalg.eigvalsh(c_h)
        assert np.sum(eig > 1e-10 * eig.max()) == 3

    def test_psd(self):
        g = ArrayGeometry.from_spacing(8, 0.3 * LAM, LAM)
        scene = sample_scatterers(25.0, -30.0, 3.0, 20, rng(3))
        c_art = inter_array_covariance(scene, g, 73.0)
        z_r = impedance_matrix(g, CouplingModel.HALF_WAVE_DIPOLE, 73 + 42.5j)
        q = q_matrix(186 - 31.6j, z_r)
        c_h = channel_covariance(q, c_art, PARAMS)
        assert np.linalg.eigvalsh(c_h).min() >= -1e-10 * np.trace(c_h).real / 8


class TestUncoupledCollapse:
    def test_full_pipeline_reduces_to_scalars(self):
        g = ArrayGeometry.from_spacing(8, 0.25 * LAM, LAM)
        scene = sample_scatterers(25.0, -30.0, 3.0, 20, rng(4))
        ch = build_channel(g, scene, PARAMS, CouplingModel.UNCOUPLED)
        gamma1, gamma2, g_u = gamma_factors(PARAMS)
        np.testing.assert_allclose(ch.c_h, gamma1 * ch.c_art, rtol=1e-12)
        np.testing.assert_allclose(ch.c_z, gamma2 * np.eye(8), atol=1e-12 * gamma2)
        z = np.arange(8) + 1j * np.arange(8, 0, -1)
        np.testing.assert_allclose(
            channel_from_zart(z, ch.q, PARAMS), g_u * z, rtol=1e-12
        )
