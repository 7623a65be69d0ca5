import math
from dataclasses import replace

import numpy as np
import pytest

from oracles import central_diff
from setembed.histograms import damped_kl, discrete_js, uniform_histogram
from setembed.mc import MCConfig
from setembed.optimizer import (
    EmbeddingConfig,
    NonFiniteGradientError,
    Problem,
    fit,
    init_state,
    prepare,
    realized_gaussian,
    stress,
    stress_and_grad,
    step,
    with_seed,
)
from setembed.sets import SetFamily, compute_atoms
from setembed.gaussian import entropy, kl_gaussian


def fam(**sets):
    return SetFamily.from_dict({k: set(v) for k, v in sets.items()})


KL = EmbeddingConfig.for_divergence("kl")
JS = EmbeddingConfig.for_divergence("js")


class TestInit:
    def test_sigma_starts_at_volume(self):
        f = fam(x="ABC", y="A")
        s = init_state(f, compute_atoms(f), KL)
        np.testing.assert_allclose(realized_gaussian(s, 0, KL).sigma, [3, 3])
        np.testing.assert_allclose(realized_gaussian(s, 1, KL).sigma, [1, 1])
        assert s.log_a == 0.0
        assert np.all(np.abs(s.means) < 1.0)

    def test_same_seed_same_state(self):
        f = fam(x="AB", y="BC")
        a, b = init_state(f, None, KL), init_state(f, None, KL)
        np.testing.assert_array_equal(a.means, b.means)
        c = init_state(f, None, replace(KL, seed=1))
        assert not np.array_equal(a.means, c.means)

    def test_empty_set_rejected(self):
        f = SetFamily.from_dict({"x": {"A"}, "e": set()})
        with pytest.raises(ValueError, match="empty"):
            init_state(f, None, KL)

    def test_fixed_scale(self):
        f = fam(x="AB", y="BC")
        s = init_state(f, None, replace(KL, fixed_scale=2.5))
        assert math.exp(s.log_a) == pytest.approx(2.5)


class TestRealized:
    def test_reparam(self):
        f = fam(x="AB", y="ABC")
        s = init_state(f, None, KL)
        s.tau = np.array([math.log(2), 0.0])
        np.testing.assert_allclose(realized_gaussian(s, 1, KL).sigma, [6, 3])
        np.testing.assert_allclose(realized_gaussian(s, 0, KL).sigma, [4, 2])

    def test_init_only(self):
        cfg = replace(KL, sigma_mode="init_only")
        f = fam(x="AB", y="ABC")
        s = init_state(f, None, cfg)
        s.log_sigma_free = np.array([[0.0, 1.0], [2.0, -1.0]])
        np.testing.assert_allclose(realized_gaussian(s, 1, cfg).sigma, np.exp([2.0, -1.0]))


def problem_from(d_in):
    n = d_in.shape[0]
    f = SetFamily.from_dict({f"s{i}": {f"e{i}"} for i in range(n)})
    pairs = np.array([(i, j) for i in range(n) for j in range(n) if i != j])
    return Problem(f, d_in, pairs)


class TestStress:
    def test_perfect_match_is_zero(self):
        f = fam(x="AB", y="BC", z="C")
        cfg = replace(KL, fixed_scale=2.0)
        s = init_state(f, None, cfg)
        prob = prepare(f, cfg)
        d_out = np.array(
            [[kl_gaussian(realized_gaussian(s, i, KL), realized_gaussian(s, j, KL)) if i != j else 0 for j in range(3)]
             for i in range(3)]
        )
        assert stress(s, Problem(f, 2.0 * d_out, prob.pairs), cfg) == pytest.approx(0, abs=1e-20)

    def test_single_pair_unit_residual(self):
        prob = problem_from(np.array([[0.0, 1.0], [1.0, 0.0]]))
        s = init_state(prob.family, None, KL)
        s.means[:] = 0.0
        # identical Gaussians: D_out = 0 for both ordered pairs, each residual is 1
        assert stress(s, prob, KL) == pytest.approx(2.0)

    def test_input_matrix(self):
        f = fam(x="AB", y="BC")
        p = compute_atoms(f)
        hx, hy = (uniform_histogram(s, p, f.universe) for s in f.sets)
        prob = prepare(f, KL)
        assert prob.d_in[0, 1] == damped_kl(hx, hy, 1e-3)
        assert prob.d_in[0, 0] == 0
        assert prepare(f, JS).d_in[0, 1] == discrete_js(hx, hy)

    def test_override_input_divergence(self):
        f = fam(x="AB", y="BC")
        cfg = replace(JS, input_divergence="damped_kl")
        np.testing.assert_array_equal(prepare(f, cfg).d_in, prepare(f, KL).d_in)


def _full_grad_check(cfg, seed=3, rtol=1e-4):
    rng = np.random.default_rng(seed)
    f = fam(x="AB", y="BCD", z="DA")
    prob = prepare(f, cfg)
    s = init_state(f, None, cfg)
    s.means = rng.normal(0, 1.0, s.means.shape)
    s.tau = rng.normal(-0.5, 0.2, 2)
    s.log_sigma_free = rng.normal(0, 0.3, s.log_sigma_free.shape)
    s.log_a = 0.3
    _, grads = stress_and_grad(s, prob, cfg)
    for name, g in grads.items():
        base = s.copy()

        def f_of(v, name=name):
            t = base.copy()
            if name == "log_a":
                t.log_a = float(v)
            else:
                setattr(t, name, v)
            return stress(t, prob, cfg)

        x0 = np.asarray(getattr(s, name), dtype=float)
        fd = central_diff(f_of, x0, 1e-5)
        scale = np.maximum(np.abs(fd), 1e-8)
        assert np.all(np.abs(g - fd) <= rtol * scale), (name, g, fd)


class TestGradient:
    @pytest.mark.parametrize("mode", ["reparam", "init_only"])
    def test_kl_path(self, mode):
        _full_grad_check(replace(KL, sigma_mode=mode))

    @pytest.mark.parametrize("mode", ["reparam", "init_only"])
    def test_js_path_fixed_noise(self, mode):
        cfg = replace(JS, sigma_mode=mode, mc=MCConfig(sample_count=64, seed=5, resample_each_step=False))
        _full_grad_check(cfg)

    def test_js_path_with_damped_kl_input(self):
        cfg = replace(JS, input_divergence="damped_kl", mc=MCConfig(sample_count=32, seed=1))
        _full_grad_check(cfg, seed=8)

    def test_pair_sampling(self):
        cfg = replace(KL, pair_samples=3)
        _full_grad_check(cfg, seed=4)

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_non_finite_gradient_names_pair(self):
        f = fam(x="AB", y="BC")
        prob = prepare(f, KL)
        s = init_state(f, None, KL)
        s.means[1, 0] = 1e200
        with pytest.raises(NonFiniteGradientError) as err:
            stress_and_grad(s, prob, KL)
        assert set(err.value.pair) == {0, 1}
        assert "x" in str(err.value) and "y" in str(err.value)


class TestStep:
    def test_zero_gradient_leaves_parameters(self):
        prob = problem_from(np.zeros((2, 2)))
        s = init_state(prob.family, None, KL)
        s.means[:] = 0.0
        new, value = step(s, prob, KL)
        assert value == 0.0
        np.testing.assert_array_equal(new.means, s.means)
        np.testing.assert_array_equal(new.tau, s.tau)
        assert new.log_a == s.log_a
        assert new.step == 1

    def test_does_not_mutate_input(self):
        f = fam(x="AB", y="BC")
        prob = prepare(f, KL)
        s = init_state(f, None, KL)
        before = s.means.copy()
        step(s, prob, KL)
        np.testing.assert_array_equal(s.means, before)
        assert s.step == 0

    def test_single_pair_1d_converges(self):
        cfg = replace(KL, dim=1, iterations=500)
        _, report = fit(fam(x="AB", y="BC"), cfg)
        assert report.final_stress < 1e-4

    def test_resampled_trajectories_identical(self):
        f = fam(x="AB", y="BC", z="CD")
        cfg = replace(JS, iterations=30)
        _, r1 = fit(f, cfg)
        _, r2 = fit(f, cfg)
        assert r1.stress == r2.stress
        np.testing.assert_array_equal(r1.state.means, r2.state.means)
        np.testing.assert_array_equal(r1.state.tau, r2.state.tau)


class TestFit:
    def test_singleton_family(self):
        emb, report = fit(fam(x="A"), KL)
        assert len(emb) == 1
        assert report.final_stress == 0.0
        assert report.stress == []

    def test_augmentation_runs_first(self):
        cfg = replace(KL, augment="full", iterations=5)
        emb, report = fit(fam(x="AB", y="BC"), cfg)
        assert len(emb) == 6
        assert report.d_in.shape == (6, 6)

    def test_entropy_tracks_volume(self):
        f = fam(a="A", ab="AB", abc="ABC", bcd="BCD")
        emb, _ = fit(f, replace(JS, iterations=50))
        h = [entropy(g) for g in emb]
        assert h[0] < h[1] < h[2]
        assert h[2] == pytest.approx(h[3], abs=1e-12)

    def test_stress_decreases(self):
        emb, report = fit(fam(x="AB", y="BC", z="A", w="B"), replace(KL, iterations=300))
        assert report.final_stress < report.initial_stress

    def test_seeding_helper(self):
        cfg = with_seed(JS, 9)
        assert cfg.seed == 9 and cfg.mc.seed == 9

    def test_config_validation(self):
        with pytest.raises(ValueError):
            EmbeddingConfig(output_divergence="tv")
        with pytest.raises(ValueError):
            EmbeddingConfig(learning_rate=0)
        with pytest.raises(ValueError):
            EmbeddingConfig(sigma_mode="free")
        with pytest.raises(ValueError):
            EmbeddingConfig(fixed_scale=-1.0)
