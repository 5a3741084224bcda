import numpy as np
import pytest

from ccmrecon.angles import beamspace, estimate_angles
from ccmrecon.array import ArrayConfig, steering
from ccmrecon.channel import ChannelRealization, PasModel, build_rays, synthesize, true_ccm
from ccmrecon.covariance import CcmEstimate
from ccmrecon.harness.metrics import nmse
from ccmrecon.numerics import ContractError
from ccmrecon.uplink import TrainingConfig, group_observation, ls_preamble, mmse_uplink, sbem_estimate

from conftest import on_grid_angle, random_hermitian


def ch(v, slot=0):
    return ChannelRealization(np.asarray(v, dtype=complex), slot=slot)


class TestTrainingConfig:
    def test_from_db(self):
        t = TrainingConfig.from_db(10.0, kappa=4, nu=8)
        assert t.rho_u == pytest.approx(10.0) and t.rho_d == pytest.approx(10.0) and t.nu == 8

    @pytest.mark.parametrize("kw", [{"rho_u": 0.0}, {"rho_d": -1.0}, {"kappa": 0}, {"nu": 0}, {"grid_size": 0}])
    def test_invalid(self, kw):
        with pytest.raises(ContractError):
            TrainingConfig(**kw)

    def test_check_against_m(self):
        with pytest.raises(ContractError):
            TrainingConfig(nu=20).check(16)


class TestLsPreamble:
    def test_noiseless(self, rng):
        h = ch(rng.standard_normal(8) + 0j)
        np.testing.assert_array_equal(ls_preamble(h, np.inf, rng).vector, h.vector)

    def test_noise_power(self, rng):
        h = ch(np.zeros(32))
        rho = 4.0
        err = np.mean([ls_preamble(h, rho, rng).power() for _ in range(10_000)])
        assert err == pytest.approx(32 / rho, rel=0.03)

    def test_keeps_labels(self, rng):
        h = ChannelRealization(np.ones(4, complex), user=3, slot=1)
        out = ls_preamble(h, 10.0, rng)
        assert (out.user, out.slot) == (3, 1)


class TestGroupObservation:
    def test_single_noiseless(self, rng):
        h = ch(rng.standard_normal(8) + 1j)
        np.testing.assert_array_equal(group_observation([h], np.inf, rng), h.vector)

    def test_sum(self, rng):
        a, b = ch(np.arange(4.0)), ch(np.ones(4))
        np.testing.assert_allclose(group_observation([a, b], np.inf, rng), np.arange(4.0) + 1)

    def test_noise_power(self, rng):
        a, b = ch(np.ones(16)), ch(-np.ones(16))
        err = np.mean([np.sum(np.abs(group_observation([a, b], 2.0, rng)) ** 2) for _ in range(10_000)])
        assert err == pytest.approx(16 / 2.0, rel=0.03)

    def test_empty(self, rng):
        with pytest.raises(ContractError):
            group_observation([], 1.0, rng)

    def test_mixed_slots(self, rng):
        with pytest.raises(ContractError, match="slots"):
            group_observation([ch(np.ones(4), 0), ch(np.ones(4), 1)], 1.0, rng)


class TestSbem:
    def test_full_set(self, rng):
        h = rng.standard_normal(16) + 1j * rng.standard_normal(16)
        np.testing.assert_allclose(sbem_estimate(h, 0.07, np.arange(16)), h, atol=1e-12)

    def test_on_grid(self, cfg):
        q = 23
        a = steering(cfg, cfg.f_up, on_grid_angle(128, q))
        np.testing.assert_allclose(sbem_estimate(a, 0.0, [q]), a, atol=1e-12)

    def test_idempotent(self, rng):
        h = rng.standard_normal(64) + 1j * rng.standard_normal(64)
        once = sbem_estimate(h, -0.02, [3, 4, 5, 60])
        np.testing.assert_allclose(sbem_estimate(once, -0.02, [3, 4, 5, 60]), once, atol=1e-12)

    def test_support(self, rng):
        h = rng.standard_normal(32) + 1j * rng.standard_normal(32)
        b = beamspace(sbem_estimate(h, 0.05, [1, 2]), 0.05)
        assert np.abs(np.delete(b, [1, 2])).max() < 1e-12

    def test_empty(self):
        with pytest.raises(ContractError):
            sbem_estimate(np.ones(4), 0.0, [])


class TestMmse:
    def test_scalar(self):
        r = CcmEstimate(np.array([[2.0]]))
        out = mmse_uplink(np.array([3.0 + 1j]), r, rho_u=4.0)
        np.testing.assert_allclose(out, 2.0 / (2.0 + 0.25) * (3.0 + 1j))

    def test_rank_one(self, cfg, rng):
        a = steering(cfg, cfg.f_up, 1.0)
        r = CcmEstimate(np.outer(a, a.conj()))
        h = rng.standard_normal(128) + 1j * rng.standard_normal(128)
        rho = 5.0
        want = a * np.vdot(a, h) / (1 + 1 / rho)
        np.testing.assert_allclose(mmse_uplink(h, r, rho_u=rho, nu=1), want, atol=1e-12)
        np.testing.assert_allclose(mmse_uplink(h, r, rho_u=rho, nu=1, asymptotic=True), want, atol=1e-12)

    def test_high_snr_limit(self, small_cfg, rng):
        r = CcmEstimate(random_hermitian(rng, 16, psd=True))
        h = rng.standard_normal(16) + 1j * rng.standard_normal(16)
        np.testing.assert_allclose(mmse_uplink(h, r, rho_u=1e12), h, atol=1e-6)

    def test_linear(self, rng):
        r = CcmEstimate(random_hermitian(rng, 8, psd=True))
        o = CcmEstimate(random_hermitian(rng, 8, psd=True))
        x, y = (rng.standard_normal(8) + 1j * rng.standard_normal(8) for _ in range(2))
        f = lambda v: mmse_uplink(v, r, [o], 3.0, 4)
        np.testing.assert_allclose(f(x + 2 * y), f(x) + 2 * f(y), atol=1e-10)

    def test_shrinks(self, rng):
        r = CcmEstimate(random_hermitian(rng, 8, psd=True))
        lam = r.eig.eigenvalues[0]
        rho = 0.1
        h = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        out = mmse_uplink(h, r, rho_u=rho, asymptotic=True)
        assert np.linalg.norm(out) <= lam / (lam + 1 / rho) * np.linalg.norm(h) + 1e-12

    def test_interferer_reduces_gain(self, small_cfg):
        a = steering(small_cfg, small_cfg.f_up, 1.0)
        r = CcmEstimate(np.outer(a, a.conj()))
        alone = mmse_uplink(a, r, rho_u=10.0, nu=1)
        shared = mmse_uplink(a, r, [r], rho_u=10.0, nu=1)
        assert np.linalg.norm(shared) < np.linalg.norm(alone)

    def test_dimension_mismatch(self):
        with pytest.raises(ContractError):
            mmse_uplink(np.ones(3), CcmEstimate(np.eye(4)))

    @pytest.mark.parametrize("snr_db", [0.0, 10.0, 20.0])
    def test_beats_sbem_with_true_ccm(self, cfg, snr_db):
        rng = np.random.default_rng(7)
        model = PasModel("uniform", np.radians(60.0), np.radians(10.0))
        r = true_ccm(cfg, cfg.f_up, model)
        rho = 10 ** (snr_db / 10)
        e_sbem, e_mmse = [], []
        for _ in range(500):
            h = synthesize(cfg, cfg.f_up, build_rays(model, 256, rng))
            y = ls_preamble(h, rho, rng).vector
            est = estimate_angles(y, cfg, 16)
            hs = sbem_estimate(y, est.psi, est.bins)
            e_sbem.append(nmse(h.vector, hs))
            e_mmse.append(nmse(h.vector, mmse_uplink(hs, r, rho_u=rho, nu=16)))
        assert np.mean(e_mmse) <= np.mean(e_sbem)
