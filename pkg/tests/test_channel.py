import numpy as np
import pytest

from ccmrecon.array import ArrayConfig, freq_shift_diag, steering
from ccmrecon.channel import (
    ChannelRealization,
    PasModel,
    RaySet,
    build_rays,
    hermitian_toeplitz,
    quadrature_ccm,
    redraw_phases,
    sample_ccm,
    synthesize,
    true_ccm,
)
from ccmrecon.numerics import ContractError

LAPLACE_MASS = 1.0 - np.exp(-np.sqrt(2.0))


def dense_ccm(cfg, f, model, n):
    """Reference quadrature: full A diag(w) A^H without the Toeplitz shortcut."""
    nodes, w = model.quadrature(n)
    a = cfg.steering_matrix(f, nodes)
    return (a * w) @ a.conj().T


class TestPasModel:
    def test_uniform_density(self):
        m = PasModel("uniform", 1.0, 0.1)
        np.testing.assert_allclose(m.density(np.array([0.95, 1.0, 1.1, 1.2])), [5.0, 5.0, 5.0, 0.0])

    def test_laplacian_mass(self):
        nodes, w = PasModel("laplacian", 1.2, 0.2).quadrature(20001)
        assert w.sum() == pytest.approx(LAPLACE_MASS, abs=1e-7)

    def test_tabulated(self):
        m = PasModel("tabulated", 1.0, 0.5, table_angles=(0.5, 1.5), table_density=(1.0, 1.0))
        assert m.quadrature(101)[1].sum() == pytest.approx(1.0)

    @pytest.mark.parametrize(
        "kind,mean,spread", [("cosine", 1.0, 0.1), ("uniform", 1.0, -0.1), ("uniform", 0.05, 0.1), ("uniform", 3.1, 0.1)]
    )
    def test_invalid(self, kind, mean, spread):
        with pytest.raises(ContractError):
            PasModel(kind, mean, spread)

    def test_open_support(self):
        with pytest.raises(ContractError, match="inside"):
            PasModel("uniform", 0.1, 0.1).check_open_support()
        PasModel("uniform", 0.2, 0.1).check_open_support()


class TestRays:
    def test_specular(self, rng):
        r = build_rays(PasModel("uniform", 1.0, 0.0), 256, rng)
        assert len(r) == 1 and r.amplitudes[0] == 1.0 and r.angles[0] == 1.0

    @pytest.mark.parametrize("n", [2, 7, 256, 1000])
    def test_uniform_power(self, rng, n):
        r = build_rays(PasModel("uniform", 1.0, np.radians(10)), n, rng)
        assert np.sum(r.amplitudes**2) == pytest.approx(1.0, abs=1e-6)

    def test_laplacian_power(self, rng):
        r = build_rays(PasModel("laplacian", 1.0, np.radians(10)), 4096, rng)
        assert np.sum(r.amplitudes**2) == pytest.approx(0.75688, abs=1e-4)

    def test_single_ray_keeps_mass(self, rng):
        r = build_rays(PasModel("laplacian", 1.0, 0.1), 1, rng)
        assert r.amplitudes[0] ** 2 == pytest.approx(LAPLACE_MASS, abs=1e-6)

    def test_bad_count(self, rng):
        with pytest.raises(ContractError):
            build_rays(PasModel("uniform", 1.0, 0.1), 0, rng)

    def test_redraw(self, rng):
        r = build_rays(PasModel("uniform", 1.0, 0.1), 16, rng)
        acc = np.zeros(16, complex)
        for _ in range(10_000):
            s = redraw_phases(r, rng)
            acc += np.exp(1j * s.phases)
        assert np.array_equal(s.amplitudes, r.amplitudes) and np.array_equal(s.angles, r.angles)
        assert np.abs(acc / 10_000).max() < 0.05


class TestSynthesize:
    def test_single_ray(self, cfg):
        rays = RaySet(np.array([0.9]), np.array([1.0]), np.array([0.0]))
        np.testing.assert_allclose(synthesize(cfg, cfg.f_up, rays).vector, steering(cfg, cfg.f_up, 0.9))

    def test_mean_power(self, small_cfg, rng):
        rays = build_rays(PasModel("laplacian", 1.0, 0.2), 64, rng)
        p = [synthesize(small_cfg, small_cfg.f_up, redraw_phases(rays, rng)).power() for _ in range(10_000)]
        assert np.mean(p) == pytest.approx(np.sum(rays.amplitudes**2), rel=0.02)

    def test_downlink_is_shifted_uplink(self, cfg, rng):
        rays = build_rays(PasModel("uniform", 1.1, 0.1), 32, rng)
        h = synthesize(cfg, cfg.f_down, rays)
        ref = (freq_shift_diag(cfg, rays.angles) * cfg.steering_matrix(cfg.f_up, rays.angles)) @ rays.gains
        np.testing.assert_allclose(h.vector, ref, atol=1e-12)
        assert h.link == "downlink"

    def test_realization_checks(self):
        with pytest.raises(ContractError):
            ChannelRealization(np.ones((2, 2)))
        with pytest.raises(ContractError):
            ChannelRealization(np.array([1.0, np.inf]))


class TestTrueCcm:
    def test_specular(self, cfg):
        r = true_ccm(cfg, cfg.f_up, PasModel("uniform", 1.0, 0.0))
        assert r.numerical_rank == 1 and r.trace == pytest.approx(1.0)

    def test_uniform_trace(self, cfg):
        assert true_ccm(cfg, cfg.f_up, PasModel("uniform", 1.0, 0.2)).trace == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("kind", ["uniform", "laplacian"])
    def test_toeplitz_matches_dense(self, cfg, kind):
        model = PasModel(kind, 1.3, np.radians(12))
        fast = quadrature_ccm(cfg, cfg.f_down, model, 512)
        assert np.abs(fast - dense_ccm(cfg, cfg.f_down, model, 512)).max() < 1e-12

    def test_hermitian_psd(self, cfg):
        r = true_ccm(cfg, cfg.f_up, PasModel("laplacian", 2.0, np.radians(15)))
        assert np.abs(r.matrix - r.matrix.conj().T).max() < 1e-12
        assert r.is_psd()

    def test_sample_covariance_oracle(self, small_cfg, rng):
        model = PasModel("uniform", np.radians(60), np.radians(2))
        rays = build_rays(model, 256, rng)
        n = 100_000
        phases = rng.uniform(-np.pi, np.pi, (n, len(rays)))
        a = small_cfg.steering_matrix(small_cfg.f_up, rays.angles)
        h = (rays.amplitudes * np.exp(1j * phases)) @ a.T
        r_hat = sample_ccm(h)
        r = true_ccm(small_cfg, small_cfg.f_up, model)
        assert np.linalg.norm(r_hat.matrix - r.matrix) / np.linalg.norm(r.matrix) < 0.03

    def test_downlink_integrand_form(self, cfg):
        model = PasModel("uniform", 1.0, np.radians(8))
        nodes, w = model.quadrature(1024)
        atoms = freq_shift_diag(cfg, nodes) * cfg.steering_matrix(cfg.f_up, nodes)
        ref = (atoms * w) @ atoms.conj().T
        assert np.abs(true_ccm(cfg, cfg.f_down, model, 1024).matrix - ref).max() < 1e-12

    def test_toeplitz_helper(self):
        t = hermitian_toeplitz(np.array([2.0, 1j, 3.0]))
        np.testing.assert_allclose(t, [[2, -1j, 3], [1j, 2, -1j], [3, 1j, 2]])
