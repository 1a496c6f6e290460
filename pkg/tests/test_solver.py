"""
Tests for the ADMM update nodes and the solver loop.
"""

import numpy as np
import pytest

from src.admm import workflow
from src.admm.conditions import all_finite, should_stop
from src.admm.nodes.d_update import update_d1, update_d2
from src.admm.nodes.multipliers import constraint_residuals, update_multipliers
from src.admm.nodes.x_update import apply_x_system, solve_x, update_x, x_right_hand_side
from src.admm.nodes.z_update import update_z
from src.admm.prox import soft_threshold
from src.admm.state import PARAMETER_PRESETS, IterationRecord, Mode, SolverConfig, SolverState
from src.admm.workflow import SolverDivergedError, denoise, step
from src.services import metrics
from src.tensor.core import diff_circular, frobenius_norm
from src.tensor.tsvd import TSvdError


def random_state(rng, dims) -> SolverState:
    fields = {name: rng.standard_normal(dims) for name in ("x", "z", "d1", "d2", "bb", "b1", "b2")}
    return SolverState(**fields)


def dense_system(n1: int, n2: int, a: float, b: float, c: float) -> np.ndarray:
    """Explicit (1 + a + b D2^T D2 + c D1^T D1) on a row-major n1 x n2 slice."""
    d = lambda n: np.roll(np.eye(n), 1, axis=1) - np.eye(n)  # noqa: E731
    d1 = np.kron(d(n1), np.eye(n2))
    d2 = np.kron(np.eye(n1), d(n2))
    return (1.0 + a) * np.eye(n1 * n2) + b * d2.T @ d2 + c * d1.T @ d1


def svt_oracle(l: np.ndarray, thr: float) -> np.ndarray:
    spectrum = np.fft.fft(l, axis=2)
    out = np.empty_like(spectrum)
    for k in range(l.shape[2]):
        u, s, vh = np.linalg.svd(spectrum[:, :, k], full_matrices=False)
        out[:, :, k] = (u * np.maximum(s - thr, 0.0)) @ vh
    return np.fft.ifft(out, axis=2).real


# =============================================================================
# Configuration and state
# =============================================================================

class TestConfig:

    def test_defaults(self):
        cfg = SolverConfig()
        assert (cfg.a, cfg.b, cfg.c, cfg.tau, cfg.lambda1, cfg.lambda2) == (4.0, 0.2, 1.0, 0.5, 0.05, 1.0)
        assert cfg.max_iters == 20
        assert cfg.mode is Mode.TLSM
        assert cfg.rel_tol == 0.0

    @pytest.mark.parametrize("field", ["a", "b", "c", "tau", "lambda1", "lambda2"])
    def test_weights_must_be_positive(self, field):
        with pytest.raises(ValueError):
            SolverConfig(**{field: 0.0})

    def test_zero_iterations_rejected(self):
        with pytest.raises(ValueError):
            SolverConfig(max_iters=0)

    def test_unknown_field_rejected(self):
        with pytest.raises(ValueError):
            SolverConfig(alpha=1.0)

    def test_weight_bindings(self):
        cfg = SolverConfig(b=0.3, c=2.0, lambda1=0.1, lambda2=0.7)
        assert (cfg.footprint_params().penalty_weight, cfg.footprint_params().quad_weight) == (0.7, 2.0)
        assert (cfg.smoothness_params().penalty_weight, cfg.smoothness_params().quad_weight) == (0.1, 0.3)
        assert (cfg.low_rank_params().penalty_weight, cfg.low_rank_params().quad_weight) == (cfg.tau, cfg.a)

    def test_mode_flags(self):
        assert Mode.TLSM.lsm_low_rank and Mode.TLSM.lsm_differences
        assert Mode.TLSM_TNN.lsm_low_rank and not Mode.TLSM_TNN.lsm_differences
        assert not Mode.TLSM_UTV.lsm_low_rank and Mode.TLSM_UTV.lsm_differences
        assert Mode("TLSM-UTV") is Mode.TLSM_UTV

    @pytest.mark.parametrize("name", sorted(PARAMETER_PRESETS))
    def test_presets(self, name):
        cfg = SolverConfig.preset(name, mode=Mode.TLSM_TNN)
        assert (cfg.a, cfg.b, cfg.c, cfg.tau, cfg.lambda1, cfg.lambda2) == PARAMETER_PRESETS[name]
        assert cfg.mode is Mode.TLSM_TNN

    def test_unknown_preset(self):
        with pytest.raises(ValueError):
            SolverConfig.preset("marmousi")

    def test_initial_state(self, rng):
        y = rng.standard_normal((3, 4, 5))
        state = SolverState.initial(y)
        np.testing.assert_array_equal(state.z, y)
        np.testing.assert_array_equal(state.x, y)
        for t in (state.d1, state.d2, state.bb, state.b1, state.b2):
            np.testing.assert_array_equal(t, 0.0)
        assert state.iter == 0 and state.history == []
        assert state.z is not y


# =============================================================================
# X-update
# =============================================================================

class TestXUpdate:

    def test_no_difference_terms(self, rng):
        y, z = rng.standard_normal((2, 4, 5, 3))
        zeros = np.zeros_like(y)
        x = solve_x(y, z, zeros, zeros, zeros, zeros, zeros, a=4.0, b=0.0, c=0.0)
        np.testing.assert_allclose(x, (y + 4.0 * z) / 5.0, atol=1e-12)

    def test_zero_inputs(self):
        zeros = np.zeros((4, 4, 2))
        x = solve_x(zeros, zeros, zeros, zeros, zeros, zeros, zeros, a=4.0, b=0.2, c=1.0)
        np.testing.assert_allclose(x, 0.0, atol=1e-15)

    def test_matches_dense_solve(self, rng):
        n1, n2, n3 = 8, 8, 2
        for _ in range(50):
            a, b, c = rng.uniform(0.1, 5.0, 3)
            y, z, bb, d1, d2, b1, b2 = rng.standard_normal((7, n1, n2, n3))
            rhs = x_right_hand_side(y, z, bb, d1, d2, b1, b2, a, b, c)
            system = dense_system(n1, n2, a, b, c)
            expected = np.stack(
                [np.linalg.solve(system, rhs[:, :, k].ravel()).reshape(n1, n2) for k in range(n3)],
                axis=2,
            )
            x = solve_x(y, z, bb, d1, d2, b1, b2, a, b, c)
            assert frobenius_norm(x - expected) <= 1e-8 * frobenius_norm(expected)

    def test_residual(self, rng):
        y, z, bb, d1, d2, b1, b2 = rng.standard_normal((7, 9, 6, 5))
        a, b, c = 4.0, 0.2, 1.0
        x = solve_x(y, z, bb, d1, d2, b1, b2, a, b, c)
        rhs = x_right_hand_side(y, z, bb, d1, d2, b1, b2, a, b, c)
        assert frobenius_norm(apply_x_system(x, a, b, c) - rhs) <= 1e-8 * frobenius_norm(rhs)

    def test_update_x_uses_state(self, rng):
        state = random_state(rng, (5, 6, 3))
        y = rng.standard_normal((5, 6, 3))
        cfg = SolverConfig()
        expected = solve_x(y, state.z, state.bb, state.d1, state.d2, state.b1, state.b2, cfg.a, cfg.b, cfg.c)
        np.testing.assert_array_equal(update_x(state, y, cfg), expected)


# =============================================================================
# Z-update
# =============================================================================

class TestZUpdate:

    @pytest.mark.parametrize("mode", list(Mode))
    def test_zero_input(self, mode):
        state = SolverState.initial(np.zeros((4, 5, 3)))
        np.testing.assert_array_equal(update_z(state, SolverConfig(mode=mode)), 0.0)

    @pytest.mark.parametrize("mode", [Mode.TLSM, Mode.TLSM_UTV])
    def test_vanishing_weight(self, rng, mode):
        state = SolverState.initial(rng.standard_normal((6, 6, 4)))
        state.bb = rng.standard_normal((6, 6, 4))
        z = update_z(state, SolverConfig(tau=1e-12, mode=mode))
        np.testing.assert_allclose(z, state.x + state.bb, atol=1e-8)

    def test_utv_mode_is_tnn_prox(self, rng):
        cfg = SolverConfig(mode=Mode.TLSM_UTV, tau=2.0, a=4.0)
        state = SolverState.initial(rng.standard_normal((6, 6, 4)))
        np.testing.assert_allclose(update_z(state, cfg), svt_oracle(state.x, 0.5), atol=1e-10)

    def test_frozen_theta_matches_svt_at_sqrt_2n3_tau(self, rng):
        # theta = 1 soft-thresholds sigma / sqrt(n3) at sqrt(2) tau / a, which is
        # SVT at sqrt(2 n3) tau / a; n3 = 4 and a = 4 keep every rescaling exact
        for _ in range(20):
            state = SolverState.initial(rng.standard_normal((5, 7, 4)))
            tau = float(rng.uniform(0.1, 3.0))
            frozen = SolverConfig(tau=tau, freeze_theta=True)
            plain = SolverConfig(tau=2.0 * (np.sqrt(2.0) * tau), mode=Mode.TLSM_UTV)
            np.testing.assert_array_equal(update_z(state, frozen), update_z(state, plain))

    def test_lsm_sees_orthonormal_spectrum(self):
        # an impulse in time puts the same rank-1 matrix in every frequency slice:
        # singular value amp unnormalized, amp / sqrt(n3) orthonormal
        n3 = 16
        pattern = np.outer(np.ones(6) / np.sqrt(6.0), np.ones(5) / np.sqrt(5.0))
        impulses = {}
        for name, amp in (("weak", 2.0), ("strong", 4.0)):
            impulses[name] = np.zeros((6, 5, n3))
            impulses[name][:, :, 0] = amp * np.sqrt(n3) * pattern
        weak = update_z(SolverState.initial(impulses["weak"]), SolverConfig())
        strong = update_z(SolverState.initial(impulses["strong"]), SolverConfig())
        np.testing.assert_allclose(weak, 0.0, atol=1e-12)
        kept = frobenius_norm(strong) / frobenius_norm(impulses["strong"])
        assert 0.9 < kept < 1.0

    def test_lsm_shrinks_norm(self, rng):
        state = SolverState.initial(rng.standard_normal((6, 5, 4)))
        z = update_z(state, SolverConfig())
        assert frobenius_norm(z) <= frobenius_norm(state.x) + 1e-10


# =============================================================================
# D-updates
# =============================================================================

class TestDUpdate:

    @pytest.mark.parametrize("mode", list(Mode))
    def test_zero_target(self, mode):
        y = np.zeros((4, 4, 4))
        state = SolverState.initial(y)
        cfg = SolverConfig(mode=mode)
        np.testing.assert_array_equal(update_d1(state, y, cfg), 0.0)
        np.testing.assert_array_equal(update_d2(state, cfg), 0.0)

    def test_vanishing_weight(self, rng):
        state = random_state(rng, (4, 4, 4))
        y = rng.standard_normal((4, 4, 4))
        cfg = SolverConfig(lambda1=1e-12, lambda2=1e-12, mode=Mode.TLSM_TNN)
        np.testing.assert_allclose(update_d1(state, y, cfg), diff_circular(state.x - y, 1) + state.b1, atol=1e-8)
        np.testing.assert_allclose(update_d2(state, cfg), diff_circular(state.x, 2) + state.b2, atol=1e-8)

    def test_tnn_mode_soft_thresholds(self, rng):
        state = random_state(rng, (4, 4, 4))
        y = rng.standard_normal((4, 4, 4))
        cfg = SolverConfig(mode=Mode.TLSM_TNN, lambda1=0.1, lambda2=0.5, b=0.4, c=2.0)
        k1 = diff_circular(state.x - y, 1) + state.b1
        h2 = diff_circular(state.x, 2) + state.b2
        np.testing.assert_array_equal(update_d1(state, y, cfg), soft_threshold(k1, 0.5 / 2.0))
        np.testing.assert_array_equal(update_d2(state, cfg), soft_threshold(h2, 0.1 / 0.4))

    def test_default_weights_zero_data_gradients(self, rng):
        # gradients of data in [-1, 1] never exceed 2, below both collapse points
        x = rng.uniform(-1.0, 1.0, (6, 6, 4))
        y = np.zeros_like(x)
        state = SolverState.initial(x)
        cfg = SolverConfig()
        np.testing.assert_array_equal(update_d1(state, y, cfg), 0.0)
        np.testing.assert_array_equal(update_d2(state, cfg), 0.0)

    def test_lsm_mode_keeps_large_entries(self):
        y = np.zeros((4, 1, 1))
        state = SolverState.initial(y)
        state.x = np.array([0.0, 10.0, 0.0, 0.0]).reshape(4, 1, 1)
        d1 = update_d1(state, y, SolverConfig())
        assert d1[0, 0, 0] > 5.0 and d1[1, 0, 0] < -5.0
        assert d1[2, 0, 0] == 0.0 and d1[3, 0, 0] == 0.0


# =============================================================================
# Multipliers
# =============================================================================

class TestMultipliers:

    def test_consistent_z_leaves_b(self, rng):
        state = random_state(rng, (3, 4, 2))
        state.z = state.x.copy()
        bb, _, _ = update_multipliers(state, rng.standard_normal((3, 4, 2)))
        np.testing.assert_array_equal(bb, state.bb)

    def test_from_zero(self, rng):
        state = random_state(rng, (3, 4, 2))
        state.bb = np.zeros((3, 4, 2))
        bb, _, _ = update_multipliers(state, np.zeros((3, 4, 2)))
        np.testing.assert_array_equal(bb, -(state.z - state.x))

    def test_formulas(self, rng):
        state = random_state(rng, (3, 4, 2))
        y = rng.standard_normal((3, 4, 2))
        bb, b1, b2 = update_multipliers(state, y)
        np.testing.assert_allclose(bb, state.bb - (state.z - state.x), atol=1e-14)
        np.testing.assert_allclose(b1, state.b1 - (state.d1 - diff_circular(state.x - y, 1)), atol=1e-14)
        np.testing.assert_allclose(b2, state.b2 - (state.d2 - diff_circular(state.x, 2)), atol=1e-14)

    def test_residuals(self, rng):
        state = random_state(rng, (3, 4, 2))
        y = rng.standard_normal((3, 4, 2))
        r_z, _, r_d2 = constraint_residuals(state, y)
        np.testing.assert_array_equal(r_z, state.z - state.x)
        np.testing.assert_array_equal(r_d2, state.d2 - diff_circular(state.x, 2))


# =============================================================================
# Stopping conditions
# =============================================================================

class TestConditions:

    def test_max_iters(self, rng):
        state = SolverState.initial(rng.standard_normal((2, 2, 2)))
        cfg = SolverConfig(max_iters=3)
        assert should_stop(state, cfg) == "continue"
        state.iter = 3
        assert should_stop(state, cfg) == "stop"

    def test_rel_tol(self, rng):
        state = SolverState.initial(rng.standard_normal((2, 2, 2)))
        state.iter = 1
        state.history.append(IterationRecord(iter=1, res_z=0, res_d1=0, res_d2=0, rel_change=1e-5, seconds=0))
        assert should_stop(state, SolverConfig()) == "continue"
        assert should_stop(state, SolverConfig(rel_tol=1e-4)) == "stop"

    def test_all_finite(self, rng):
        state = SolverState.initial(rng.standard_normal((2, 2, 2)))
        assert all_finite(state)
        state.b2[0, 0, 0] = np.inf
        assert not all_finite(state)


# =============================================================================
# Solver loop
# =============================================================================

class TestDenoise:

    @pytest.fixture
    def noisy(self, rng):
        return rng.standard_normal((12, 12, 4)) * 0.1

    def test_single_iteration(self, noisy):
        seen = []
        x, history = denoise(noisy, SolverConfig(max_iters=1), callback=lambda s, r: seen.append((s.iter, r)))
        assert len(history) == 1 and history[0].iter == 1
        assert seen[0][0] == 1
        assert x.shape == noisy.shape
        assert history[0].psnr_db is None

    def test_history_length(self, noisy):
        _, history = denoise(noisy, SolverConfig(max_iters=5))
        assert [r.iter for r in history] == [1, 2, 3, 4, 5]
        assert all(r.seconds >= 0 and r.rel_change >= 0 for r in history)

    def test_step_updates_every_variable(self, noisy):
        state = SolverState.initial(noisy)
        before = {k: getattr(state, k).copy() for k in ("x", "z", "bb", "b1")}
        step(state, noisy, SolverConfig())
        assert state.iter == 1
        for name, old in before.items():
            assert not np.array_equal(getattr(state, name), old), name

    def test_deterministic(self, noisy):
        x1, h1 = denoise(noisy, SolverConfig(max_iters=3))
        x2, h2 = denoise(noisy, SolverConfig(max_iters=3))
        np.testing.assert_array_equal(x1, x2)
        assert [r.res_z for r in h1] == [r.res_z for r in h2]

    def test_early_stop(self, noisy):
        _, history = denoise(noisy, SolverConfig(rel_tol=10.0))
        assert len(history) == 1

    def test_reference_metrics(self, noisy, rng):
        reference = noisy + 0.01 * rng.standard_normal(noisy.shape)
        _, history = denoise(noisy, SolverConfig(max_iters=2), reference=reference, track_ssim=True)
        assert all(r.psnr_db is not None and r.ssim is not None for r in history)
        assert all(-1.0 <= r.ssim <= 1.0 for r in history)

    def test_reference_dims(self, noisy):
        with pytest.raises(ValueError):
            denoise(noisy, reference=np.zeros((12, 12, 5)))

    def test_divergence(self, noisy, monkeypatch):
        monkeypatch.setattr(workflow, "update_z", lambda state, cfg: np.full(state.x.shape, np.nan))
        with pytest.raises(SolverDivergedError) as excinfo:
            denoise(noisy)
        assert excinfo.value.iteration == 1

    def test_svd_failure_propagates(self, noisy, monkeypatch):
        def failing(state, cfg):
            raise TSvdError(3)

        monkeypatch.setattr(workflow, "update_z", failing)
        with pytest.raises(TSvdError) as excinfo:
            denoise(noisy)
        assert excinfo.value.frequency == 3

    @pytest.mark.parametrize("mode", list(Mode))
    def test_modes_run(self, noisy, mode):
        x, history = denoise(noisy, SolverConfig(max_iters=2, mode=mode))
        assert np.all(np.isfinite(x)) and len(history) == 2


# =============================================================================
# Denoising quality
# =============================================================================

class TestDenoisingQuality:
    """
    A separable 16 x 16 x 16 volume in Gaussian noise.

    The clean volume has rank one in the two frequency slices it occupies, each
    with orthonormal singular value 8; noise slices stay below 1, well under the
    LSM collapse point near 2.6 for (tau, a) = (0.5, 4). Near-zero difference
    weights leave the low-rank term in charge.
    """

    @pytest.fixture
    def clean(self):
        n = np.arange(16)
        spatial = np.cos(2.0 * np.pi * n / 16.0)
        carrier = np.cos(2.0 * np.pi * 2.0 * n / 16.0)
        return 0.5 * spatial[:, None, None] * spatial[None, :, None] * carrier[None, None, :]

    @pytest.fixture
    def noisy(self, clean):
        return clean + 0.1 * np.random.default_rng(11).standard_normal(clean.shape)

    @pytest.fixture
    def cfg(self):
        return SolverConfig(lambda1=1e-8, lambda2=1e-8)

    def test_gain_over_noisy_input(self, clean, noisy, cfg):
        x_hat, _ = denoise(noisy, cfg)
        assert metrics.psnr(x_hat, clean) >= metrics.psnr(noisy, clean) + 8.0

    def test_low_rank_residual_decreases(self, noisy, cfg):
        _, history = denoise(noisy, cfg)
        assert history[-1].res_z < 0.1 * history[0].res_z

    def test_psnr_tracked_per_iteration(self, clean, noisy, cfg):
        _, history = denoise(noisy, cfg, reference=clean)
        curve = [record.psnr_db for record in history]
        assert len(curve) == 20
        assert curve[-1] > curve[0]
