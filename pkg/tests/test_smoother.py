"""Smoother correctness against the brute-force double-loop reference.

Frozen constants below were produced by running ``tests/oracles.py`` on the
stated instances; instances whose covariates land exactly on a kernel support
boundary inherit the binary-rounding inclusion decision, which both routes
share because they form ``(query - X) / h`` identically.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from linksmooth.kernels import get_kernel
from linksmooth.models import ConstantLink, LinkModel, ProductLink, get_model
from linksmooth.smoother import (
    EmptyNeighborhoodError,
    SmootherConfig,
    audit_bandwidth,
    conditional_mean,
    conventional_smooth,
    diagnostics,
    link_smooth,
    link_smooth_weights,
)

PRODUCT = get_model("product", law="bernoulli")


def _cfg(kernel="boxcar", dim=1, h=0.3, lam=0.01, x=(0.5,), xp=(0.5,)):
    return SmootherConfig(kernel=get_kernel(kernel, dim=dim), h=h, lambda_n=lam,
                          query=(np.asarray(x), np.asarray(xp)))


def _symmetric(n, flat):
    y = np.zeros((n, n))
    iu, ju = np.triu_indices(n, k=1)
    y[iu, ju] = flat
    y[ju, iu] = flat
    return y


N3_POINTS = np.array([[0.1], [0.5], [0.9]])
N3_OUTCOMES = _symmetric(3, [1.0, 0.0, 1.0])  # Y12=1, Y13=0, Y23=1


class TestFrozenInstances:
    def test_n3_boxcar_instance(self):
        # no covariate pair lands in the window, so the estimate is the plain
        # mean of the six ordered outcomes: 4/6
        got = link_smooth(N3_POINTS, N3_OUTCOMES, _cfg())
        assert got == pytest.approx(0.6666666666666667, abs=1e-15)

    def test_n3_boxcar_diagnostics(self):
        diag = diagnostics(N3_POINTS, _cfg(), PRODUCT)
        assert diag.s_nh == pytest.approx(-0.0005333333333333333, abs=1e-15)
        assert diag.t_nh == pytest.approx(0.01, abs=1e-15)

    def test_n3_boxcar_conditional_mean(self):
        got = conditional_mean(N3_POINTS, _cfg(), PRODUCT)
        assert got == pytest.approx(0.1966666666666667, abs=1e-15)

    def test_epanechnikov_instance(self):
        pts = np.array([[0.45], [0.7], [0.9]])
        cfg = _cfg("epanechnikov", h=0.35, lam=0.002)
        assert link_smooth(pts, N3_OUTCOMES, cfg) == pytest.approx(0.9993410974056899, abs=1e-14)
        diag = diagnostics(pts, cfg, PRODUCT)
        assert diag.s_nh == pytest.approx(0.06603591700736938, rel=1e-13)
        assert diag.t_nh == pytest.approx(1.0117833385749135, rel=1e-13)
        assert diag.max_weight == pytest.approx(0.49934109740569, rel=1e-13)
        assert conditional_mean(pts, cfg, PRODUCT) == pytest.approx(0.31526685555069556, rel=1e-13)

    def test_d2_boxcar_instance(self):
        pts = np.array([[0.2, 0.3], [0.5, 0.45], [0.55, 0.7], [0.9, 0.1]])
        y = _symmetric(4, [1.0, 0.0, 1.0, 1.0, 0.0, 1.0])
        cfg = _cfg(dim=2, h=0.4, lam=0.05, x=(0.5, 0.5), xp=(0.4, 0.6))
        assert link_smooth(pts, y, cfg) == pytest.approx(0.6666666666666666, abs=1e-14)
        diag = diagnostics(pts, cfg, PRODUCT)
        assert diag.s_nh == pytest.approx(-2.316072916666665, rel=1e-13)
        assert diag.t_nh == pytest.approx(19.581249999999994, rel=1e-13)


class TestSmallCases:
    def test_n2_returns_the_outcome(self):
        y = _symmetric(2, [0.37])
        got = link_smooth(np.array([[0.2], [0.8]]), y, _cfg(h=0.5, lam=0.1))
        assert got == pytest.approx(0.37, abs=1e-15)

    def test_n2_weights_are_half(self):
        w = link_smooth_weights(np.array([[0.2], [0.8]]), _cfg(h=0.5, lam=0.1))
        assert w[0, 1] == pytest.approx(0.5, abs=1e-15)
        assert w[1, 0] == pytest.approx(0.5, abs=1e-15)
        assert w[0, 0] == 0.0

    def test_large_lambda_flattens_weights(self):
        pts = np.random.default_rng(5).random((5, 1))
        w = link_smooth_weights(pts, _cfg(h=0.2, lam=1e6))
        off = ~np.eye(5, dtype=bool)
        np.testing.assert_allclose(w[off], 1.0 / 20.0, atol=1e-6)

    def test_constant_outcomes(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            n = int(rng.integers(2, 8))
            pts = rng.random((n, 1))
            c = float(rng.normal())
            y = np.full((n, n), c)
            np.fill_diagonal(y, 0.0)
            cfg = _cfg(h=float(rng.uniform(0.05, 0.9)), lam=float(rng.uniform(1e-4, 1.0)),
                       x=rng.random(1), xp=rng.random(1))
            assert link_smooth(pts, y, cfg) == pytest.approx(c, abs=1e-12)

    def test_empty_neighborhood_raises(self):
        pts = np.array([[0.0], [0.05]])
        cfg = _cfg(h=0.1, lam=0.0, x=(0.9,), xp=(0.9,))
        with pytest.raises(EmptyNeighborhoodError):
            link_smooth(pts, _symmetric(2, [1.0]), cfg)

    def test_asymmetric_outcomes_rejected(self):
        y = np.zeros((2, 2))
        y[0, 1] = 1.0
        with pytest.raises(ValueError, match="exactly"):
            link_smooth(np.array([[0.2], [0.8]]), y, _cfg())


class TestOracleEquivalence:
    def test_randomized_instances(self):
        """Vectorized path equals the fsum double loop on random problems."""
        rng = np.random.default_rng(314)
        for trial in range(60):
            n = int(rng.integers(2, 7))
            d = int(rng.integers(1, 3))
            kernel = ("boxcar", "epanechnikov")[trial % 2]
            pts = rng.random((n, d))
            flat = rng.random(n * (n - 1) // 2)
            y = _symmetric(n, flat)
            h = float(rng.uniform(0.08, 0.9))
            lam = float(rng.uniform(0.0, 0.2))
            x, xp = rng.random(d), rng.random(d)
            cfg = SmootherConfig(kernel=get_kernel(kernel, dim=d), h=h, lambda_n=lam,
                                 query=(x, xp))
            want = oracles.link_smooth(pts.tolist(), y.tolist(), kernel, h, lam,
                                       x.tolist(), xp.tolist())
            got = link_smooth(pts, y, cfg)
            assert got == pytest.approx(want, abs=1e-12, rel=1e-12)
            w = link_smooth_weights(pts, cfg)
            want_w = oracles.link_weights(pts.tolist(), kernel, h, lam,
                                          x.tolist(), xp.tolist())
            for (i, j), value in want_w.items():
                assert w[i, j] == pytest.approx(value, abs=1e-12)

    def test_diagnostics_match_oracle(self):
        rng = np.random.default_rng(1002)
        f = lambda a, b: sum(u * v for u, v in zip(a, b))
        for _ in range(30):
            n = int(rng.integers(2, 7))
            pts = rng.random((n, 1))
            h = float(rng.uniform(0.1, 0.8))
            lam = float(rng.uniform(1e-4, 0.1))
            x, xp = rng.random(1), rng.random(1)
            cfg = _cfg(h=h, lam=lam, x=x, xp=xp)
            s, t = oracles.s_t_diagnostics(pts.tolist(), "boxcar", h, lam,
                                           x.tolist(), xp.tolist(), f)
            diag = diagnostics(pts, cfg, PRODUCT)
            assert diag.s_nh == pytest.approx(s, abs=1e-12)
            assert diag.t_nh == pytest.approx(t, abs=1e-12)
            cm = oracles.conditional_mean(pts.tolist(), "boxcar", h, lam,
                                          x.tolist(), xp.tolist(), f)
            assert conditional_mean(pts, cfg, PRODUCT) == pytest.approx(cm, abs=1e-12)


class TestInvariants:
    def test_weight_sum_100_configs(self):
        rng = np.random.default_rng(2718)
        for _ in range(100):
            n = int(rng.integers(2, 9))
            d = int(rng.integers(1, 3))
            pts = rng.random((n, d))
            cfg = SmootherConfig(kernel=get_kernel(("boxcar", "epanechnikov")[int(rng.integers(2))], dim=d),
                                 h=float(rng.uniform(0.05, 1.0)),
                                 lambda_n=float(rng.uniform(1e-5, 0.5)),
                                 query=(rng.random(d), rng.random(d)))
            w = link_smooth_weights(pts, cfg)
            assert abs(w.sum() - 1.0) <= 1e-12
            diag = diagnostics(pts, cfg, PRODUCT)
            assert abs(diag.weight_sum - 1.0) <= 1e-12
            assert diag.t_nh >= cfg.lambda_n - 1e-15

    def test_range_preservation(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            n = int(rng.integers(2, 8))
            pts = rng.random((n, 1))
            flat = rng.normal(size=n * (n - 1) // 2)
            y = _symmetric(n, flat)
            cfg = _cfg(h=float(rng.uniform(0.1, 0.9)), lam=float(rng.uniform(1e-4, 0.3)),
                       x=rng.random(1), xp=rng.random(1))
            v = link_smooth(pts, y, cfg)
            assert flat.min() - 1e-12 <= v <= flat.max() + 1e-12

    def test_query_symmetry(self):
        rng = np.random.default_rng(8)
        for _ in range(25):
            n = int(rng.integers(2, 7))
            pts = rng.random((n, 1))
            y = _symmetric(n, rng.random(n * (n - 1) // 2))
            x, xp = rng.random(1), rng.random(1)
            h = float(rng.uniform(0.1, 0.9))
            v1 = link_smooth(pts, y, _cfg(h=h, lam=0.01, x=x, xp=xp))
            v2 = link_smooth(pts, y, _cfg(h=h, lam=0.01, x=xp, xp=x))
            assert v1 == pytest.approx(v2, abs=1e-12)

    def test_conditional_mean_identity(self):
        """cond_mean - truth(query) equals S/T to machine precision."""
        rng = np.random.default_rng(21)
        for _ in range(25):
            n = int(rng.integers(2, 7))
            pts = rng.random((n, 1))
            cfg = _cfg(h=float(rng.uniform(0.1, 0.9)), lam=float(rng.uniform(1e-4, 0.1)),
                       x=rng.random(1), xp=rng.random(1))
            diag = diagnostics(pts, cfg, PRODUCT)
            cm = conditional_mean(pts, cfg, PRODUCT)
            x, xp = cfg.query
            fq = float(ProductLink()(x[None, :], xp[None, :])[0])
            assert cm - fq == pytest.approx(diag.s_nh / diag.t_nh, abs=1e-12)

    def test_constant_model_s_is_zero(self):
        model = LinkModel(truth=ConstantLink(0.3), law="gaussian")
        diag = diagnostics(N3_POINTS, _cfg(), model)
        assert diag.s_nh == 0.0

    def test_constant_model_conditional_mean(self):
        model = LinkModel(truth=ConstantLink(0.3), law="gaussian")
        got = conditional_mean(N3_POINTS, _cfg(), model)
        assert got == pytest.approx(0.3, abs=1e-13)

    def test_t_at_stacked_covariates(self):
        # all nodes at the query and lambda 0: every kernel product is maximal
        pts = np.full((4, 1), 0.5)
        cfg = _cfg(h=0.2, lam=0.0)
        diag = diagnostics(pts, cfg, PRODUCT)
        assert diag.t_nh == pytest.approx(0.2 ** -2, rel=1e-13)


class TestConventional:
    def test_frozen_boundary_instance(self):
        # |0.5 - 0.8| rounds above 0.3 in binary, so node 4 is excluded; the
        # oracle and the implementation agree on that inclusion decision
        pts = np.array([[0.2], [0.4], [0.6], [0.8]])
        got = conventional_smooth(pts, [0, 1, 1, 0], get_kernel("boxcar"), 0.3, 0.1, [0.5])
        assert got == pytest.approx(0.6602564102564102, abs=1e-14)

    def test_frozen_interior_instances(self):
        pts = np.array([[0.2], [0.4], [0.6], [0.8]])
        got = conventional_smooth(pts, [0, 1, 1, 0], get_kernel("boxcar"), 0.25, 0.1, [0.5])
        assert got == pytest.approx(0.9761904761904763, abs=1e-14)
        got = conventional_smooth(pts, [0, 1, 1, 0], get_kernel("epanechnikov"), 0.25, 0.1, [0.5])
        assert got == pytest.approx(0.9632352941176471, abs=1e-14)

    def test_constant_outcomes(self):
        pts = np.linspace(0, 1, 7)[:, None]
        got = conventional_smooth(pts, np.full(7, 0.4), get_kernel("boxcar"), 0.3, 0.05, [0.5])
        assert got == pytest.approx(0.4, abs=1e-13)

    def test_single_point(self):
        got = conventional_smooth(np.array([[0.5]]), [0.9], get_kernel("boxcar"), 0.2, 0.1, [0.5])
        assert got == pytest.approx(0.9, abs=1e-15)

    def test_empty_neighborhood(self):
        with pytest.raises(EmptyNeighborhoodError):
            conventional_smooth(np.array([[0.0]]), [1.0], get_kernel("boxcar"), 0.1, 0.0, [0.9])

    def test_matches_oracle_randomized(self):
        rng = np.random.default_rng(55)
        for _ in range(40):
            n = int(rng.integers(1, 9))
            pts = rng.random((n, 1))
            y = rng.normal(size=n)
            h = float(rng.uniform(0.05, 0.8))
            lam = float(rng.uniform(1e-4, 0.3))
            q = rng.random(1)
            got = conventional_smooth(pts, y, get_kernel("epanechnikov"), h, lam, q)
            want = oracles.conventional_smooth(pts.tolist(), y.tolist(), "epanechnikov",
                                               h, lam, q.tolist())
            assert got == pytest.approx(want, abs=1e-12)


class TestConfig:
    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            _cfg(h=0.0)
        with pytest.raises(ValueError):
            _cfg(lam=-0.1)
        with pytest.raises(ValueError):
            SmootherConfig(kernel=get_kernel("boxcar", dim=2), h=0.1, lambda_n=0.0,
                           query=(np.array([0.5]), np.array([0.5])))

    def test_audit_accepts_reference_schedule(self):
        # lambda = 1/n with h = n^(-1/(beta+d)) needs nu >= (beta+d)/beta,
        # hence the default nu of 2
        n, beta, d = 500, 1.0, 1
        h = n ** (-1.0 / (beta + d))
        assert audit_bandwidth(n, d, h, 1.0 / n) == ()
        assert audit_bandwidth(n, d, h, 1.0 / n, nu=1.0) != ()

    def test_audit_flags_small_lambda(self):
        n, d = 500, 1
        h = n ** (-1.0 / 1.75)  # s = 0.75 schedule
        flags = audit_bandwidth(n, d, h, 1.0 / n)
        assert any("below" in f for f in flags)
        assert _cfg(h=h, lam=1.0 / n).audit(n) == flags


@given(n=st.integers(2, 6), lam=st.floats(1e-6, 0.5), h=st.floats(0.05, 1.0),
       seed=st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_weight_normalization_hypothesis(n, lam, h, seed):
    rng = np.random.default_rng(seed)
    pts = rng.random((n, 1))
    cfg = _cfg(h=h, lam=lam, x=rng.random(1), xp=rng.random(1))
    w = link_smooth_weights(pts, cfg)
    assert abs(w.sum() - 1.0) <= 1e-12
    assert np.all(w >= 0.0)
