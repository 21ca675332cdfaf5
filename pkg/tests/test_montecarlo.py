"""Monte Carlo harness: seeding, determinism, decomposition identities."""

import numpy as np
import pytest

from linksmooth.design import DesignSpec, generate_fixed
from linksmooth.kernels import get_kernel
from linksmooth.models import IdentityMean, get_model
from linksmooth.montecarlo import (
    ConventionalConfig,
    ExperimentConfig,
    ReplicateError,
    run_conventional_comparison,
    run_decomposition,
    run_histogram,
    shared_histogram,
)
from linksmooth.smoother import SmootherConfig, conditional_mean, link_smooth


def _cfg(design="fixed", n=20, rx=1, ry=4, seed=0, law="bernoulli", link="product",
         h=0.3, lam=0.05, constant=0.25, sigma=1.0, **kw):
    return ExperimentConfig(
        design=DesignSpec(kind=design, n=n, dim=1),
        model=get_model(link, law=law, constant=constant, sigma=sigma),
        kernel=get_kernel("boxcar"),
        h=h, lambda_n=lam,
        query=(np.array([0.5]), np.array([0.5])),
        r_covariates=rx, r_outcomes=ry, master_seed=seed, **kw)


class TestReplication:
    def test_replicate_count_and_reproducibility(self):
        cfg = _cfg(design="random", rx=2, ry=3, seed=11)
        run1 = run_histogram(cfg)
        run2 = run_histogram(cfg)
        assert run1.values.shape == (6,)
        np.testing.assert_array_equal(run1.values, run2.values)
        assert int(run1.counts.sum()) == 6

    def test_new_seed_changes_values(self):
        a = run_histogram(_cfg(design="random", rx=4, ry=2, seed=1)).values
        b = run_histogram(_cfg(design="random", rx=4, ry=2, seed=2)).values
        assert np.any(a != b)

    def test_fixed_design_forces_single_covariate_draw(self):
        cfg = _cfg(design="fixed", rx=7, ry=3)
        assert cfg.r_covariates == 1
        assert run_histogram(cfg).values.shape == (3,)

    def test_noiseless_constant_model(self):
        """Zero-noise constant truth: every estimate is exactly the constant."""
        cfg = _cfg(law="gaussian", link="constant", constant=0.25, sigma=0.0, ry=20)
        run = run_histogram(cfg)
        assert np.all(run.values == 0.25)
        assert run.edges[0] == run.edges[-1] == 0.25  # zero-width histogram
        assert run.counts.tolist() == [20]

    def test_thread_determinism(self):
        cfg = _cfg(design="random", n=40, rx=10, ry=3, seed=5)
        one = run_histogram(cfg, threads=1)
        two = run_histogram(cfg, threads=2)
        np.testing.assert_array_equal(one.values, two.values)
        np.testing.assert_array_equal(one.s_nh, two.s_nh)
        np.testing.assert_array_equal(one.t_nh, two.t_nh)

    def test_values_match_direct_evaluation(self):
        """Engine values agree with the public smoother on the same draws."""
        from linksmooth.models import sample_outcomes

        cfg = _cfg(design="fixed", n=12, ry=3, seed=21, h=0.4, lam=0.02)
        run = run_histogram(cfg)
        points = generate_fixed(cfg.design).points
        smooth_cfg = SmootherConfig(kernel=cfg.kernel, h=cfg.h, lambda_n=cfg.lambda_n,
                                    query=cfg.query)
        # replicate (0, i_y) outcome stream: reproduce one by hand
        seq = np.random.SeedSequence((21, 2, 0, 1))
        rng = np.random.default_rng(seq)
        iu, ju = np.triu_indices(12, k=1)
        from linksmooth.models import sample_pair_outcomes
        flat = sample_pair_outcomes(cfg.model, points, iu, ju, rng)
        y = np.zeros((12, 12))
        y[iu, ju] = flat
        y[ju, iu] = flat
        assert run.values[1] == pytest.approx(link_smooth(points, y, smooth_cfg), abs=1e-12)

    def test_replicate_error_carries_indices(self):
        # product truth exceeds 1 on [0, 2], so bernoulli sampling must fail
        cfg = ExperimentConfig(
            design=DesignSpec(kind="random", n=10, dim=1, lower=0.0, upper=2.0),
            model=get_model("product", law="bernoulli"),
            kernel=get_kernel("boxcar"), h=0.3, lambda_n=0.05,
            query=(np.array([0.5]), np.array([0.5])),
            r_covariates=2, r_outcomes=1, master_seed=0)
        with pytest.raises(ReplicateError, match=r"i_x=0"):
            run_histogram(cfg)


class TestDecomposition:
    def test_fixed_design_rho3_zero(self):
        est = run_decomposition(_cfg(design="fixed", ry=30))
        assert est.rho3_hat == 0.0
        assert est.rho3_exact == 0.0

    def test_noiseless_outcomes_rho2_zero(self):
        rx, ry = 12, 3
        est = run_decomposition(_cfg(design="random", law="gaussian", link="product",
                                     sigma=0.0, rx=rx, ry=ry, seed=3))
        assert est.rho2_hat == 0.0
        # all variability is between covariate draws: the total and between
        # sums of squares coincide exactly, up to their ddof normalizations
        assert est.total_variance * (rx * ry - 1) == pytest.approx(
            est.rho3_hat * (rx - 1) * ry, rel=1e-9)
        assert est.rho3_exact == pytest.approx(est.rho3_hat, rel=1e-9)

    def test_replicate_preconditions(self):
        with pytest.raises(ValueError, match="ry >= 2"):
            run_decomposition(_cfg(design="fixed", ry=1))
        with pytest.raises(ValueError, match="rx >= 2"):
            run_decomposition(_cfg(design="random", rx=1, ry=4))

    def test_law_of_total_variance_small(self):
        est = run_decomposition(_cfg(design="random", n=40, rx=100, ry=100, seed=4),
                                threads=2)
        assert est.law_of_total_variance_gap() <= 0.05

    def test_components_nonnegative(self):
        est = run_decomposition(_cfg(design="random", n=30, rx=8, ry=5, seed=9))
        assert est.rho2_hat >= 0.0
        assert est.rho3_hat >= 0.0
        assert est.total_variance >= 0.0
        assert est.n_effective == 40

    def test_epsilon_diagnostics_present(self):
        est = run_decomposition(_cfg(design="random", n=30, rx=8, ry=5, seed=9))
        assert est.t_bar_hat > 0.0
        assert np.isfinite(est.epsilon_hat_max_abs)


class TestConditionalMeanDegeneracy:
    def test_fixed_design_conditional_mean_constant(self):
        """Recomputed per replicate, the conditional mean never changes."""
        spec = DesignSpec(kind="fixed", n=25, dim=1)
        model = get_model("product", law="bernoulli")
        cfg = SmootherConfig(kernel=get_kernel("boxcar"), h=0.3, lambda_n=0.04,
                             query=(np.array([0.5]), np.array([0.5])))
        values = {conditional_mean(generate_fixed(spec), cfg, model) for _ in range(20)}
        assert len(values) == 1


class TestSharedHistogram:
    def test_common_edges(self):
        rng = np.random.default_rng(0)
        a, b = rng.normal(size=300), rng.normal(1.0, 2.0, size=500)
        edges, (ca, cb) = shared_histogram([a, b], bins=16)
        assert ca.sum() == 300 and cb.sum() == 500
        assert edges.shape[0] == 17

    def test_degenerate_values(self):
        edges, (c,) = shared_histogram([np.full(9, 0.25)])
        assert edges.tolist() == [0.25, 0.25]
        assert c.tolist() == [9]


class TestConventional:
    def _cfg(self, reps=40, law="bernoulli", n=60, seed=2):
        return ConventionalConfig(
            design=DesignSpec(kind="fixed", n=n, dim=1),
            mean_fn=IdentityMean(), law=law, kernel=get_kernel("boxcar"),
            h=0.15, lambda_n=n ** -0.5, query=0.5, replicates=reps, master_seed=seed)

    def test_shapes_and_reproducibility(self):
        comp1 = run_conventional_comparison(self._cfg())
        comp2 = run_conventional_comparison(self._cfg())
        np.testing.assert_array_equal(comp1.values_fixed, comp2.values_fixed)
        np.testing.assert_array_equal(comp1.values_random, comp2.values_random)
        assert comp1.values_fixed.shape == (40,)
        assert comp1.truth == 0.5

    def test_thread_determinism(self):
        a = run_conventional_comparison(self._cfg(), threads=1)
        b = run_conventional_comparison(self._cfg(), threads=2)
        np.testing.assert_array_equal(a.values_random, b.values_random)

    def test_multivariate_rejected(self):
        cfg = ConventionalConfig(
            design=DesignSpec(kind="fixed", n=9, dim=2),
            mean_fn=IdentityMean(), kernel=get_kernel("boxcar", dim=2),
            h=0.3, lambda_n=0.1, query=0.5, replicates=4)
        with pytest.raises(ValueError, match="univariate"):
            run_conventional_comparison(cfg)

    def test_shared_edges_across_designs(self):
        comp = run_conventional_comparison(self._cfg())
        assert int(comp.counts_fixed.sum()) == 40
        assert int(comp.counts_random.sum()) == 40

    def test_noiseless_constant_degenerates(self):
        from linksmooth.models import ConstantMean

        cfg = ConventionalConfig(
            design=DesignSpec(kind="fixed", n=30, dim=1),
            mean_fn=ConstantMean(0.5), law="gaussian", sigma=0.0,
            kernel=get_kernel("boxcar"), h=0.2, lambda_n=0.1,
            query=0.5, replicates=15, master_seed=1)
        comp = run_conventional_comparison(cfg)
        assert np.all(comp.values_fixed == 0.5)
        assert np.all(comp.values_random == 0.5)
        assert comp.edges[0] == comp.edges[-1] == 0.5


def test_threads_env_fallback(monkeypatch):
    from linksmooth.montecarlo import resolve_threads

    monkeypatch.setenv("LINKSMOOTH_THREADS", "3")
    assert resolve_threads(None) == 3
    assert resolve_threads(2) == 2  # explicit value wins
    monkeypatch.delenv("LINKSMOOTH_THREADS")
    assert resolve_threads(None) >= 1
