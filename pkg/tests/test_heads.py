"""Tests for the head zoo: gradients, limit identities, adaptive state and metric losses."""

import math
from dataclasses import replace

import numpy as np
import pytest

from face_kit.errors import ConfigError, ShapeError
from face_kit.heads import (
    HeadConfig,
    HeadKind,
    HeadState,
    additive_angular,
    adaptive_state_update,
    center_loss_step,
    circle_loss,
    cosine_logits,
    focal_terms,
    head_backward,
    head_forward,
    head_loss_and_grad,
    log_partition,
    margin_transform,
    smoothed_targets,
    softmax_xent,
    sphere_psi,
    triplet_loss,
)
from face_kit.numerics import Prng, finite_diff_grad, l2_normalize_rows, relative_error
from face_kit.trainer import distill_loss

SEEDS = range(20)
GRAD_TOL = 1e-5

# kind -> (s, m) small enough for a well-conditioned finite-difference check
GRAD_CASES = {
    "Softmax": (1.0, 0.0),
    "NormSoftmax": (4.0, 0.0),
    "SphereFace": (4.0, 4.0),
    "CosFace": (4.0, 0.2),
    "AmSoftmax": (4.0, 0.2),
    "ArcFace": (4.0, 0.3),
    "AdaCos": (4.0, 0.0),
    "CurricularFace": (4.0, 0.3),
    "MagFace": (4.0, 0.0),
    "AdaMSoftmax": (4.0, 0.2),
    "ArcNegFace": (4.0, 0.3),
    "NPCFace": (4.0, 0.3),
    "MVSoftmax": (4.0, 0.2),
}


def _instance(seed: int, batch: int = 6, num_classes: int = 7, dim: int = 5):
    rng = Prng(seed)
    x = rng.normal_matrix(batch, dim)
    w = rng.normal_matrix(num_classes, dim)
    labels = rng.integers(batch, num_classes)
    return x, w, labels, rng


def _state_for(cfg: HeadConfig, num_classes: int, dim: int, rng: Prng) -> HeadState:
    state = HeadState.initial(num_classes, dim, cfg)
    if cfg.kind is HeadKind.CURRICULARFACE:
        state.curricular_t = 0.4
    elif cfg.kind is HeadKind.SPHEREFACE:
        state.sphere_lambda = 2.0
    elif cfg.kind is HeadKind.ADAMSOFTMAX:
        state.adam_margins = 0.1 + 0.3 * rng.uniforms(num_classes)
    return state


@pytest.mark.parametrize("seed", SEEDS)
@pytest.mark.parametrize("kind", sorted(GRAD_CASES))
def test_head_gradients_match_finite_differences(kind, seed):
    s, m = GRAD_CASES[kind]
    x, w, labels, rng = _instance(seed)
    if kind == "MagFace":
        # magnitudes inside [l_a, u_a] so the margin path is exercised
        x = l2_normalize_rows(x) * (20.0 + 80.0 * rng.uniforms(x.shape[0]))[:, None]
    cfg = HeadConfig(kind=kind, s=s, m=m)
    state = _state_for(cfg, w.shape[0], w.shape[1], rng)

    lg = head_loss_and_grad(x, w, labels, cfg, state)
    num_x = finite_diff_grad(lambda z: head_loss_and_grad(z, w, labels, cfg, state).loss, x)
    num_w = finite_diff_grad(lambda z: head_loss_and_grad(x, z, labels, cfg, state).loss, w)
    assert relative_error(lg.d_embeddings, num_x) < GRAD_TOL
    assert relative_error(lg.d_weights, num_w) < GRAD_TOL

    if kind == "AdaMSoftmax":
        num_m = finite_diff_grad(
            lambda margins: head_loss_and_grad(x, w, labels, cfg, replace(state, adam_margins=margins)).loss,
            state.adam_margins,
        )
        assert relative_error(lg.d_margins, num_m) < GRAD_TOL


@pytest.mark.parametrize("seed", SEEDS)
@pytest.mark.parametrize("options", [{"epsilon": 0.1}, {"gamma": 2.0}, {"gamma": 0.5}])
def test_smoothing_and_focal_gradients(options, seed):
    x, w, labels, _ = _instance(seed)
    cfg = HeadConfig(kind="ArcFace", s=4.0, m=0.3, **options)
    state = HeadState.initial(w.shape[0], w.shape[1], cfg)
    lg = head_loss_and_grad(x, w, labels, cfg, state)
    num_x = finite_diff_grad(lambda z: head_loss_and_grad(z, w, labels, cfg, state).loss, x)
    assert relative_error(lg.d_embeddings, num_x) < GRAD_TOL


class TestLimitIdentities:
    @pytest.mark.parametrize("seed", range(5))
    @pytest.mark.parametrize("kind", ["ArcFace", "CosFace", "AmSoftmax", "AdaMSoftmax"])
    def test_zero_margin_equals_norm_softmax(self, kind, seed):
        x, w, labels, _ = _instance(seed)
        base_cfg = HeadConfig(kind="NormSoftmax", s=16.0, m=0.0)
        cfg = HeadConfig(kind=kind, s=16.0, m=0.0)
        base = head_loss_and_grad(x, w, labels, base_cfg, HeadState.initial(7, 5, base_cfg))
        got = head_loss_and_grad(x, w, labels, cfg, HeadState.initial(7, 5, cfg))
        if kind == "AdaMSoftmax":
            # the margin-average bonus is -lambda * mean(m_y), zero when every margin is zero
            assert got.loss == base.loss - 0.0
        else:
            assert got.loss == base.loss
        assert np.array_equal(got.d_embeddings, base.d_embeddings)
        assert np.array_equal(got.d_weights, base.d_weights)

    def test_magface_without_margin_range_equals_norm_softmax_logits(self):
        x, w, labels, _ = _instance(1)
        cfg = HeadConfig(kind="MagFace", s=16.0, mag_lm=0.0, mag_um=0.0)
        base_cfg = HeadConfig(kind="NormSoftmax", s=16.0)
        fwd = head_forward(x, w, labels, cfg, HeadState.initial(7, 5, cfg))
        base = head_forward(x, w, labels, base_cfg, HeadState.initial(7, 5, base_cfg))
        assert np.array_equal(fwd.logits, base.logits)

    def test_additive_angular_zero_margin_is_identity(self):
        c = np.linspace(-1.0, 1.0, 101)
        value, d_dc, _ = additive_angular(c, 0.0)
        assert np.array_equal(value, c)
        assert np.all(d_dc == 1.0)

    @pytest.mark.parametrize("seed", range(5))
    @pytest.mark.parametrize(
        "kind,base",
        [("ArcNegFace", "ArcFace"), ("NPCFace", "ArcFace"), ("MVSoftmax", "AmSoftmax")],
    )
    def test_emphasis_off_reduces_to_base_head(self, kind, base, seed):
        x, w, labels, _ = _instance(seed)
        cfg = HeadConfig(kind=kind, s=16.0, m=0.35, emphasis=False)
        base_cfg = HeadConfig(kind=base, s=16.0, m=0.35)
        got = head_loss_and_grad(x, w, labels, cfg, HeadState.initial(7, 5, cfg))
        want = head_loss_and_grad(x, w, labels, base_cfg, HeadState.initial(7, 5, base_cfg))
        assert got.loss == want.loss
        assert np.array_equal(got.d_embeddings, want.d_embeddings)
        assert np.array_equal(got.d_weights, want.d_weights)

    @pytest.mark.parametrize("seed", range(5))
    def test_focal_gamma_zero_is_cross_entropy(self, seed):
        rng = Prng(seed)
        logits = rng.normal_matrix(8, 10, 3.0)
        labels = rng.integers(8, 10)
        log_py = logits[np.arange(8), labels] - log_partition(logits)
        per_sample, coef = focal_terms(log_py, 0.0)
        assert np.array_equal(per_sample, -log_py)
        assert np.all(coef == 1.0)

    @pytest.mark.parametrize("seed", range(5))
    def test_smoothing_zero_is_cross_entropy(self, seed):
        rng = Prng(seed)
        logits = rng.normal_matrix(8, 10, 3.0)
        labels = rng.integers(8, 10)
        loss, grad = softmax_xent(logits, labels, epsilon=0.0)
        rows = np.arange(8)
        assert loss == float((log_partition(logits) - logits[rows, labels]).mean())
        onehot = np.zeros_like(logits)
        onehot[rows, labels] = 1.0
        probs = np.exp(logits - log_partition(logits)[:, None])
        assert np.array_equal(grad, (probs - onehot) / 8)


class TestMarginValues:
    def test_arcface_target_logit(self):
        cfg = HeadConfig(kind="ArcFace", s=64.0, m=0.5)
        cos = np.array([[math.cos(0.5), 0.1]])
        logits = margin_transform(cos, np.array([0]), cfg, HeadState.initial(2, 2, cfg))
        assert logits[0, 0] == pytest.approx(34.579347575560945, abs=1e-9)
        assert logits[0, 1] == pytest.approx(6.4)

    def test_arcface_fallback_past_pi(self):
        c = np.array([math.cos(3.0)])
        value, d_dc, _ = additive_angular(c, 0.5)
        assert value[0] == pytest.approx(c[0] - 0.5 * math.sin(0.5))
        assert d_dc[0] == 1.0

    def test_cosface_subtracts_margin(self):
        cfg = HeadConfig(kind="CosFace", s=10.0, m=0.35)
        logits = margin_transform(np.array([[0.8, 0.2]]), np.array([0]), cfg, HeadState.initial(2, 2, cfg))
        np.testing.assert_allclose(logits, [[4.5, 2.0]])

    def test_sphere_psi_is_monotone_decreasing_in_angle(self):
        theta = np.linspace(0.0, math.pi, 400)
        psi, _ = sphere_psi(np.cos(theta), 4)
        assert np.all(np.diff(psi) <= 1e-12)
        assert psi[0] == pytest.approx(1.0)
        assert psi[-1] == pytest.approx(-7.0)

    def test_adacos_initial_scale(self):
        cfg = HeadConfig(kind="AdaCos")
        state = HeadState.initial(10, 4, cfg)
        assert state.adacos_scale == pytest.approx(3.1073447968483734, abs=1e-12)

    def test_uniform_logits_loss_is_log_k(self):
        loss, _ = softmax_xent(np.zeros((2, 1000)), np.array([0, 5]))
        assert loss == pytest.approx(6.9077552789821368, abs=1e-12)

    def test_smoothed_targets_rows(self):
        q = smoothed_targets(np.array([1]), 5, 0.2)
        np.testing.assert_allclose(q, [[0.05, 0.8, 0.05, 0.05, 0.05]])
        assert q.sum() == pytest.approx(1.0)


    def test_arcnegface_weight_centred_on_margined_target(self):
        cfg = HeadConfig(kind="ArcNegFace", s=1.0, m=0.5)
        cos = np.array([[0.8, 0.3, -0.4]])
        logits = margin_transform(cos, np.array([0]), cfg, HeadState.initial(3, 2, cfg))
        phi = math.cos(math.acos(0.8) + 0.5)
        for j in (1, 2):
            g = 1.2 * math.exp(-((cos[0, j] - phi) ** 2) / 2.0)
            assert logits[0, j] == pytest.approx(g * (cos[0, j] + 1.0) - 1.0, abs=1e-12)
        assert logits[0, 0] == pytest.approx(phi, abs=1e-12)


class TestSymmetries:
    @pytest.mark.parametrize("kind", ["ArcFace", "CosFace"])
    def test_loss_grows_with_margin(self, kind):
        for seed in range(5):
            x, w, labels, _ = _instance(seed)
            losses, targets = [], []
            for m in np.linspace(0.0, 0.9, 19):
                cfg = HeadConfig(kind=kind, s=16.0, m=float(m))
                state = HeadState.initial(7, 5, cfg)
                fwd = head_forward(x, w, labels, cfg, state)
                targets.append(fwd.logits[np.arange(6), labels])
                losses.append(head_loss_and_grad(x, w, labels, cfg, state).loss)
            assert np.all(np.diff(np.array(targets), axis=0) <= 1e-12)
            assert np.all(np.diff(losses) >= -1e-12)

    @pytest.mark.parametrize("seed", range(5))
    def test_cosine_logits_ignore_embedding_scale(self, seed):
        x, w, _, _ = _instance(seed)
        base, _ = cosine_logits(x, w)
        for c in (0.5, 2.0, 1024.0):
            scaled, _ = cosine_logits(c * x, w)
            assert np.array_equal(scaled, base)
        for c in (3.7, 1e-3, 1e6):
            scaled, _ = cosine_logits(c * x, w)
            np.testing.assert_allclose(scaled, base, rtol=0, atol=1e-13)

    @pytest.mark.parametrize("seed", range(3))
    @pytest.mark.parametrize("kind", ["NormSoftmax", "ArcFace", "CosFace", "ArcNegFace", "NPCFace", "MVSoftmax"])
    def test_batch_permutation_permutes_logits(self, kind, seed):
        x, w, labels, rng = _instance(seed)
        cfg = HeadConfig(kind=kind, s=16.0, m=0.3)
        state = HeadState.initial(7, 5, cfg)
        perm = rng.permutation(6)
        base = head_forward(x, w, labels, cfg, state)
        moved = head_forward(x[perm], w, labels[perm], cfg, state)
        np.testing.assert_allclose(moved.logits, base.logits[perm], rtol=0, atol=1e-12)
        got = head_loss_and_grad(x[perm], w, labels[perm], cfg, state)
        want = head_loss_and_grad(x, w, labels, cfg, state)
        assert got.loss == pytest.approx(want.loss, abs=1e-12)
        np.testing.assert_allclose(got.d_embeddings, want.d_embeddings[perm], rtol=0, atol=1e-12)

    @pytest.mark.parametrize("seed", range(3))
    @pytest.mark.parametrize("kind", ["NormSoftmax", "ArcFace", "CosFace", "ArcNegFace", "NPCFace", "MVSoftmax"])
    def test_class_relabeling_leaves_loss_unchanged(self, kind, seed):
        x, w, labels, rng = _instance(seed)
        cfg = HeadConfig(kind=kind, s=16.0, m=0.3)
        state = HeadState.initial(7, 5, cfg)
        # class j moves to row perm_inv[j] of the weights
        perm = rng.permutation(7)
        perm_inv = np.argsort(perm)
        got = head_loss_and_grad(x, w[perm], perm_inv[labels], cfg, state)
        want = head_loss_and_grad(x, w, labels, cfg, state)
        assert got.loss == pytest.approx(want.loss, abs=1e-12)
        np.testing.assert_allclose(got.d_weights, want.d_weights[perm], rtol=0, atol=1e-12)

    @pytest.mark.parametrize("seed", range(5))
    @pytest.mark.parametrize("m", [0.1, 0.35, 0.7])
    def test_cosface_equals_amsoftmax(self, m, seed):
        x, w, labels, _ = _instance(seed)
        cos_cfg = HeadConfig(kind="CosFace", s=30.0, m=m)
        am_cfg = HeadConfig(kind="AmSoftmax", s=30.0, m=m)
        got = head_loss_and_grad(x, w, labels, cos_cfg, HeadState.initial(7, 5, cos_cfg))
        want = head_loss_and_grad(x, w, labels, am_cfg, HeadState.initial(7, 5, am_cfg))
        assert got.loss == want.loss
        assert np.array_equal(got.d_embeddings, want.d_embeddings)
        assert np.array_equal(got.d_weights, want.d_weights)


class TestHeadErrors:
    def test_unknown_kind(self):
        with pytest.raises(ConfigError, match="Unknown head kind"):
            HeadConfig(kind="BogusFace")

    def test_kind_parse_is_case_insensitive(self):
        assert HeadKind.parse("arcface") is HeadKind.ARCFACE

    def test_presets_fill_scale_and_margin(self):
        cfg = HeadConfig(kind="CosFace")
        assert (cfg.s, cfg.m) == (64.0, 0.35)

    @pytest.mark.parametrize("field,value", [("s", 0.0), ("m", -0.1), ("gamma", -1.0), ("epsilon", 1.0)])
    def test_out_of_range_values(self, field, value):
        with pytest.raises(ConfigError):
            HeadConfig(kind="ArcFace", **{field: value})

    def test_sphereface_needs_integer_margin(self):
        with pytest.raises(ConfigError):
            HeadConfig(kind="SphereFace", m=2.5)

    def test_focal_and_smoothing_exclusive(self):
        with pytest.raises(ConfigError):
            softmax_xent(np.zeros((1, 3)), np.array([0]), epsilon=0.1, gamma=1.0)

    def test_label_out_of_range(self):
        x, w, _, _ = _instance(0)
        cfg = HeadConfig(kind="ArcFace", s=4.0, m=0.3)
        with pytest.raises(ShapeError):
            head_loss_and_grad(x, w, np.full(6, 7), cfg, HeadState.initial(7, 5, cfg))

    def test_dim_mismatch(self):
        cfg = HeadConfig(kind="ArcFace")
        with pytest.raises(ShapeError):
            head_loss_and_grad(np.ones((2, 3)), np.ones((4, 5)), np.array([0, 1]), cfg, HeadState.initial(4, 5, cfg))

    def test_single_class_state_rejected(self):
        with pytest.raises(ConfigError):
            HeadState.initial(1, 4, HeadConfig())

    def test_zero_embedding_warns(self, caplog):
        w = np.eye(3)
        with caplog.at_level("WARNING"):
            cos, degenerate = cosine_logits(np.zeros((1, 3)), w)
        assert degenerate == 1
        assert np.all(cos == 0.0)
        assert "zero-norm" in caplog.text


class TestAdaptiveState:
    def _batch(self, kind: str):
        x, w, labels, _ = _instance(3)
        cfg = HeadConfig(kind=kind, s=16.0, m=0.3 if kind in ("ArcFace", "CurricularFace") else None)
        state = HeadState.initial(7, 5, cfg)
        cos, _ = cosine_logits(x, w)
        logits = margin_transform(cos, labels, cfg, state)
        return cfg, state, cos, logits, labels

    def test_adacos_scale_is_positive_and_finite(self):
        cfg, state, cos, logits, labels = self._batch("AdaCos")
        new = adaptive_state_update(state, cos, logits, labels, cfg)
        assert math.isfinite(new.adacos_scale) and new.adacos_scale > 0
        assert state.adacos_scale == pytest.approx(math.sqrt(2.0) * math.log(6))

    def test_adacos_matches_direct_formula(self):
        cfg, state, cos, logits, labels = self._batch("AdaCos")
        new = adaptive_state_update(state, cos, logits, labels, cfg)
        rows = np.arange(labels.size)
        mask = np.ones_like(logits, dtype=bool)
        mask[rows, labels] = False
        b_avg = np.mean(np.sum(np.exp(logits) * mask, axis=1))
        theta = np.median(np.arccos(cos[rows, labels]))
        assert new.adacos_scale == pytest.approx(math.log(b_avg) / math.cos(min(math.pi / 4, theta)))

    def test_curricular_t_moves_toward_mean_target_cosine(self):
        cfg, state, cos, logits, labels = self._batch("CurricularFace")
        new = adaptive_state_update(state, cos, logits, labels, cfg)
        mean_target = float(np.mean(cos[np.arange(labels.size), labels]))
        assert new.curricular_t == pytest.approx(min(max(0.01 * mean_target, 0.0), 1.0))
        assert 0.0 <= new.curricular_t <= 1.0

    def test_sphere_lambda_decays_to_floor(self):
        cfg, state, cos, logits, labels = self._batch("SphereFace")
        for _ in range(2000):
            state = adaptive_state_update(state, cos, logits, labels, cfg)
        assert state.sphere_lambda == cfg.lambda_min

    def test_other_kinds_unchanged(self):
        cfg, state, cos, logits, labels = self._batch("ArcFace")
        assert adaptive_state_update(state, cos, logits, labels, cfg) is state


class TestMetricLosses:
    def test_circle_loss_golden(self):
        loss, _, _ = circle_loss(np.array([0.9]), np.array([0.1]), 0.25, 256.0)
        assert loss == pytest.approx(2.1191628230982759e-12, rel=1e-9)

    @pytest.mark.parametrize("seed", SEEDS)
    def test_circle_gradients_with_frozen_weights(self, seed):
        rng = Prng(seed)
        sp = rng.uniforms(4) * 1.6 - 0.8
        sn = rng.uniforms(5) * 1.6 - 0.8
        m, gamma = 0.25, 4.0
        _, d_sp, d_sn = circle_loss(sp, sn, m, gamma)
        a_p = np.maximum(1.0 + m - sp, 0.0)
        a_n = np.maximum(sn + m, 0.0)

        def frozen(p, n):
            logit_p = -gamma * a_p * (p - (1.0 - m))
            logit_n = gamma * a_n * (n - m)
            return float(np.logaddexp(0.0, np.logaddexp.reduce(logit_n) + np.logaddexp.reduce(logit_p)))

        assert relative_error(d_sp, finite_diff_grad(lambda p: frozen(p, sn), sp)) < GRAD_TOL
        assert relative_error(d_sn, finite_diff_grad(lambda n: frozen(sp, n), sn)) < GRAD_TOL

    def test_circle_loss_monotone(self):
        sn = np.linspace(0.0, 1.0, 50)
        losses_n = [circle_loss(np.array([0.7]), np.array([v]), 0.25, 32.0)[0] for v in sn]
        assert np.all(np.diff(losses_n) >= 0)
        sp = np.linspace(-1.0, 1.0, 50)
        losses_p = [circle_loss(np.array([v]), np.array([0.2]), 0.25, 32.0)[0] for v in sp]
        assert np.all(np.diff(losses_p) <= 0)

    def test_circle_rejects_bad_inputs(self):
        with pytest.raises(ShapeError):
            circle_loss(np.array([]), np.array([0.1]), 0.25, 32.0)
        with pytest.raises(ShapeError):
            circle_loss(np.array([1.5]), np.array([0.1]), 0.25, 32.0)
        with pytest.raises(ConfigError):
            circle_loss(np.array([0.5]), np.array([0.1]), 1.0, 32.0)

    @pytest.mark.parametrize("seed", SEEDS)
    def test_triplet_gradients(self, seed):
        rng = Prng(seed)
        a, p, n = (rng.normal_matrix(5, 4) for _ in range(3))
        loss, (d_a, d_p, d_n) = triplet_loss(a, p, n, 0.5)
        assert relative_error(d_a, finite_diff_grad(lambda z: triplet_loss(z, p, n, 0.5)[0], a)) < GRAD_TOL
        assert relative_error(d_p, finite_diff_grad(lambda z: triplet_loss(a, z, n, 0.5)[0], p)) < GRAD_TOL
        assert relative_error(d_n, finite_diff_grad(lambda z: triplet_loss(a, p, z, 0.5)[0], n)) < GRAD_TOL
        assert loss >= 0.0

    def test_triplet_zero_when_satisfied(self):
        a = np.zeros((1, 2))
        loss, grads = triplet_loss(a, a, np.array([[5.0, 0.0]]), 1.0)
        assert loss == 0.0
        assert all(np.all(g == 0.0) for g in grads)

    @pytest.mark.parametrize("seed", SEEDS)
    def test_center_loss_gradient(self, seed):
        rng = Prng(seed)
        x = rng.normal_matrix(6, 4)
        centers = rng.normal_matrix(3, 4)
        labels = rng.integers(6, 3)
        _, d_x, _ = center_loss_step(x, labels, centers, 0.5)
        num = finite_diff_grad(lambda z: center_loss_step(z, labels, centers, 0.5)[0], x)
        assert relative_error(d_x, num) < GRAD_TOL

    def test_center_update(self):
        x = np.array([[2.0, 0.0], [4.0, 0.0]])
        centers = np.zeros((2, 2))
        _, _, new = center_loss_step(x, np.array([0, 0]), centers, 1.0)
        # c - alpha * sum(c - x) / (1 + n) = 0 - (-6) / 3
        np.testing.assert_allclose(new, [[2.0, 0.0], [0.0, 0.0]])
        assert np.all(centers == 0.0)

    def test_center_alpha_range(self):
        with pytest.raises(ConfigError):
            center_loss_step(np.ones((1, 2)), np.array([0]), np.zeros((1, 2)), 0.0)


class TestDistillation:
    @pytest.mark.parametrize("seed", SEEDS)
    def test_gradient(self, seed):
        rng = Prng(seed)
        student = rng.normal_matrix(5, 6, 2.0)
        teacher = rng.normal_matrix(5, 6, 2.0)
        labels = rng.integers(5, 6)
        _, grad = distill_loss(student, teacher, 3.0, 0.6, labels)
        num = finite_diff_grad(lambda z: distill_loss(z, teacher, 3.0, 0.6, labels)[0], student)
        assert relative_error(grad, num) < GRAD_TOL

    def test_beta_zero_is_cross_entropy(self):
        rng = Prng(1)
        student = rng.normal_matrix(4, 5)
        labels = rng.integers(4, 5)
        loss, grad = distill_loss(student, rng.normal_matrix(4, 5), 2.0, 0.0, labels)
        ce, d_ce = softmax_xent(student, labels)
        assert loss == pytest.approx(ce)
        np.testing.assert_allclose(grad, d_ce)

    def test_identical_teacher_has_zero_kl(self):
        logits = Prng(2).normal_matrix(3, 4)
        loss, _ = distill_loss(logits, logits, 4.0, 1.0, np.array([0, 1, 2]))
        assert loss == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("seed", range(10))
    def test_never_negative(self, seed):
        rng = Prng(seed)
        student = rng.normal_matrix(5, 6, 3.0)
        teacher = rng.normal_matrix(5, 6, 3.0)
        labels = rng.integers(5, 6)
        for temperature in (0.5, 1.0, 4.0):
            for beta in (0.0, 0.3, 1.0):
                loss, _ = distill_loss(student, teacher, temperature, beta, labels)
                assert loss >= 0.0
        near, _ = distill_loss(student, student + 1e-9, 2.0, 1.0, labels)
        assert near >= -1e-15

    def test_bad_temperature(self):
        with pytest.raises(ConfigError):
            distill_loss(np.zeros((1, 2)), np.zeros((1, 2)), 0.0, 0.5, np.array([0]))


def test_head_backward_accepts_external_logit_gradient():
    x, w, labels, rng = _instance(4)
    cfg = HeadConfig(kind="CosFace", s=4.0, m=0.2)
    state = HeadState.initial(7, 5, cfg)
    upstream = rng.normal_matrix(6, 7)
    fwd = head_forward(x, w, labels, cfg, state)
    d_x, _, _ = head_backward(fwd, upstream)
    num = finite_diff_grad(lambda z: float(np.sum(head_forward(z, w, labels, cfg, state).logits * upstream)), x)
    assert relative_error(d_x, num) < GRAD_TOL
