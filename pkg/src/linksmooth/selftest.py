"""Fast built-in invariant checks exposed as the `selftest` subcommand.

Each check is independent and cheap (the whole suite runs in seconds); the
smoother checks compare against a local double-loop evaluation written
directly from the defining ratio, so a broken vectorized path cannot hide.
"""

from __future__ import annotations

import math

import numpy as np

from . import design, kernels, models, montecarlo, rates, smoother

__all__ = ["run_selftest", "CHECKS"]


def _loop_smooth(points, outcomes, kernel, h, lam, x, xp) -> float:
    n = points.shape[0]
    d = points.shape[1]
    num = den = 0.0
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            ki = kernels.evaluate(kernel, (x - points[i]) / h) / h**d
            kj = kernels.evaluate(kernel, (xp - points[j]) / h) / h**d
            w = ki * kj + lam
            num += outcomes[i, j] * w
            den += w
    return num / den


def check_kernel_shapes() -> str:
    for dim in (1, 2):
        for name in kernels.KERNEL_NAMES:
            spec = kernels.get_kernel(name, dim=dim)
            rng = np.random.default_rng(11)
            z = rng.uniform(-2.5, 2.5, size=(500, dim))
            for row in z:
                v = kernels.evaluate(spec, row)
                assert v == kernels.evaluate(spec, -row), "kernel must be symmetric"
                if np.linalg.norm(row) > spec.support_radius:
                    assert v == 0.0, "kernel must vanish outside its support"
                assert 0.0 <= v <= spec.k_max + 1e-15, "kernel must lie in [0, k_max]"
    assert kernels.evaluate(kernels.get_kernel("boxcar"), [0.0]) == 1.0
    assert kernels.evaluate(kernels.get_kernel("epanechnikov"), [0.0]) == 0.75
    return "kernel symmetry/support/range"


def check_scaled_identity() -> str:
    rng = np.random.default_rng(12)
    for dim in (1, 2):
        for name in kernels.KERNEL_NAMES:
            spec = kernels.get_kernel(name, dim=dim)
            for _ in range(200):
                u = rng.uniform(-2, 2, size=dim)
                h = float(rng.uniform(0.05, 1.5))
                lhs = kernels.evaluate_scaled(spec, u, h)
                rhs = h ** (-dim) * kernels.evaluate(spec, u / h)
                assert lhs == rhs, "scaled kernel must equal h^-d K(u/h) exactly"
    return "scaled-kernel identity"


def check_weights_and_constants() -> str:
    rng = np.random.default_rng(13)
    for _ in range(20):
        n = int(rng.integers(2, 7))
        points = rng.random((n, 1))
        cfg = smoother.SmootherConfig(
            kernel=kernels.get_kernel("boxcar"),
            h=float(rng.uniform(0.1, 0.8)),
            lambda_n=float(rng.uniform(0.001, 0.5)),
            query=(rng.random(1), rng.random(1)),
        )
        w = smoother.link_smooth_weights(points, cfg)
        assert abs(w.sum() - 1.0) < 1e-12, "weights must sum to one"
        c = float(rng.normal())
        y = np.full((n, n), c)
        np.fill_diagonal(y, 0.0)
        v = smoother.link_smooth(points, y, cfg)
        assert abs(v - c) < 1e-12, "constant outcomes must reproduce the constant"
    return "weight normalization and constant reproduction"


def check_against_loop() -> str:
    rng = np.random.default_rng(14)
    for _ in range(10):
        n = int(rng.integers(2, 6))
        points = rng.random((n, 1))
        flat = rng.random(n * (n - 1) // 2)
        y = np.zeros((n, n))
        iu, ju = np.triu_indices(n, k=1)
        y[iu, ju] = flat
        y[ju, iu] = flat
        kern = kernels.get_kernel("epanechnikov")
        h = float(rng.uniform(0.15, 0.9))
        lam = float(rng.uniform(0.0005, 0.05))
        x, xp = rng.random(1), rng.random(1)
        cfg = smoother.SmootherConfig(kernel=kern, h=h, lambda_n=lam, query=(x, xp))
        got = smoother.link_smooth(points, y, cfg)
        want = _loop_smooth(points, y, kern, h, lam, x, xp)
        assert math.isclose(got, want, rel_tol=1e-12, abs_tol=1e-12), "loop mismatch"
    return "double-loop agreement on random instances"


def check_determinism() -> str:
    spec = design.DesignSpec(kind="random", n=16, dim=1)
    a = design.generate_random(spec, 77).points
    b = design.generate_random(spec, 77).points
    assert np.array_equal(a, b), "same seed must reproduce covariates"
    cfg = montecarlo.ExperimentConfig(
        design=spec,
        model=models.get_model("product", "bernoulli"),
        kernel=kernels.get_kernel("boxcar"),
        h=0.35,
        lambda_n=1 / 16,
        query=(np.array([0.5]), np.array([0.5])),
        r_covariates=6,
        r_outcomes=3,
        master_seed=99,
    )
    one = montecarlo.run_histogram(cfg, threads=1).values
    two = montecarlo.run_histogram(cfg, threads=2).values
    assert np.array_equal(one, two), "thread count must not change results"
    return "seeded determinism across thread counts"


def check_slope_recovery() -> str:
    ns = [100, 200, 400]
    fit = rates.fit_slope(ns, [7.0 * n ** (-2.0) for n in ns])
    assert abs(fit.slope - 2.0) < 1e-10 and abs(fit.r_squared - 1.0) < 1e-10
    return "exact power-law slope recovery"


def check_lattice_scaling() -> str:
    for d, ns in ((1, (8, 27, 64)), (2, (4, 16, 64)), (3, (8, 27, 64))):
        products = []
        for n in ns:
            spec = design.DesignSpec(kind="fixed", n=n, dim=d)
            min_gap, _ = design.verify_spacing(design.generate_fixed(spec))
            products.append(min_gap * (n ** (1.0 / d) - 1.0))
        assert max(products) - min(products) < 1e-9, "lattice gap must scale as n^(-1/d)"
    return "fixed-lattice spacing scaling"


CHECKS = [
    check_kernel_shapes,
    check_scaled_identity,
    check_weights_and_constants,
    check_against_loop,
    check_determinism,
    check_slope_recovery,
    check_lattice_scaling,
]


def run_selftest(write=print) -> bool:
    ok = True
    for check in CHECKS:
        try:
            label = check()
            write(f"PASS {label}")
        except AssertionError as exc:
            ok = False
            write(f"FAIL {check.__name__}: {exc}")
    return ok
