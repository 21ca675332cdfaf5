"""Replicated Monte Carlo experiments over the link and conventional smoothers.

Replicates are organized as an outer loop over covariate draws (``i_x``) and
an inner loop over outcome draws (``i_y``). Every stream is seeded from
``(master_seed, stream_tag, i_x[, i_y])`` through ``SeedSequence``, so any
replicate can run on any worker and the full result is bit-identical
regardless of the degree of parallelism. Aggregation walks replicates in
index order.

The nested structure yields the variance decomposition of the estimate: the
average within-draw variance estimates the outcome-noise component, the
spread of the within-draw means estimates the covariate-design component,
and the noise-free conditional mean sharpens the latter by removing the
inner Monte Carlo error entirely.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .design import CovariateSet, DesignSpec, generate_fixed
from .kernels import KernelSpec
from .models import LinkModel, pair_indices, sample_pair_outcomes
from .smoother import (
    SmootherConfig,
    pair_terms,
    s_t_from_terms,
    smooth_from_terms,
)

__all__ = [
    "ExperimentConfig",
    "ConventionalConfig",
    "DecompositionEstimate",
    "HistogramRun",
    "ConventionalComparison",
    "ReplicateError",
    "run_histogram",
    "run_decomposition",
    "run_conventional_comparison",
    "shared_histogram",
    "resolve_threads",
]

_SEED_MASK = (1 << 64) - 1
_STREAM_COVARIATES = 1
_STREAM_OUTCOMES = 2


class ReplicateError(RuntimeError):
    """A replicate failed; carries the (i_x, i_y) indices that produced it."""

    def __init__(self, i_x: int, i_y: int, message: str):
        super().__init__(f"replicate (i_x={i_x}, i_y={i_y}): {message}")
        self.i_x = i_x
        self.i_y = i_y
        self._message = message

    def __reduce__(self):  # keep picklable across process-pool boundaries
        return (ReplicateError, (self.i_x, self.i_y, self._message))


@dataclass(frozen=True)
class ExperimentConfig:
    """One link-smoothing experiment: design, model, smoother, replication."""

    design: DesignSpec
    model: LinkModel
    kernel: KernelSpec
    h: float
    lambda_n: float
    query: tuple
    r_covariates: int = 1
    r_outcomes: int = 1
    master_seed: int = 0
    bins: object = "fd"

    def __post_init__(self) -> None:
        if self.r_covariates < 1 or self.r_outcomes < 1:
            raise ValueError("replicate counts must be >= 1")
        if self.design.kind == "fixed" and self.r_covariates != 1:
            # covariates are deterministic, extra outer draws are redundant
            object.__setattr__(self, "r_covariates", 1)
        x = np.atleast_1d(np.asarray(self.query[0], dtype=float))
        xp = np.atleast_1d(np.asarray(self.query[1], dtype=float))
        object.__setattr__(self, "query", (x, xp))

    @property
    def total_replicates(self) -> int:
        return self.r_covariates * self.r_outcomes

    def smoother_config(self) -> SmootherConfig:
        return SmootherConfig(kernel=self.kernel, h=self.h, lambda_n=self.lambda_n,
                              query=self.query)


@dataclass(frozen=True)
class ConventionalConfig:
    """Single-node smoother experiment used for the design contrast."""

    design: DesignSpec
    mean_fn: object  # callable (n, d) -> (n,)
    law: str = "bernoulli"
    sigma: float = 1.0
    kernel: KernelSpec = None
    h: float = 0.1
    lambda_n: float = 0.0
    query: object = 0.5
    replicates: int = 1
    master_seed: int = 0
    bins: object = "fd"


@dataclass
class HistogramRun:
    """Raw estimator values plus their histogram for one experiment."""

    values: np.ndarray  # flat, ordered by (i_x, i_y)
    i_x: np.ndarray
    i_y: np.ndarray
    s_nh: np.ndarray  # per replicate (constant within a covariate draw)
    t_nh: np.ndarray
    edges: np.ndarray
    counts: np.ndarray
    truth: float


@dataclass
class DecompositionEstimate:
    """Monte Carlo estimates of the bias/variance components at one query.

    ``rho3_hat`` is the raw across-draw variance of within-draw means; it
    carries an upward bias of ``rho2 / r_outcomes`` that ``rho3_corrected``
    removes. ``rho3_exact`` replaces the inner average with the noise-free
    conditional mean, eliminating inner Monte Carlo error.
    """

    rho1_hat: float
    rho2_hat: float
    rho3_hat: float
    rho3_corrected: float
    rho3_exact: float
    total_variance: float
    risk_hat: float
    mean_value: float
    truth: float
    t_bar_hat: float
    epsilon_hat_max_abs: float
    edges: np.ndarray
    counts: np.ndarray
    r_covariates: int
    r_outcomes: int

    @property
    def n_effective(self) -> int:
        return self.r_covariates * self.r_outcomes

    def law_of_total_variance_gap(self) -> float:
        """Relative gap between total variance and the two-component sum."""
        total = self.rho2_hat + self.rho3_corrected
        if self.total_variance == 0.0 and total == 0.0:
            return 0.0
        return abs(self.total_variance - total) / max(abs(self.total_variance), 1e-300)


@dataclass
class ConventionalComparison:
    """Fixed- vs random-design histograms of the conventional smoother."""

    values_fixed: np.ndarray
    values_random: np.ndarray
    edges: np.ndarray
    counts_fixed: np.ndarray
    counts_random: np.ndarray
    truth: float

    @property
    def variance_ratio(self) -> float:
        return float(np.var(self.values_random, ddof=1) / np.var(self.values_fixed, ddof=1))


def resolve_threads(threads: int | None) -> int:
    """Explicit value, else the LINKSMOOTH_THREADS variable, else CPU count."""
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("LINKSMOOTH_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _covariates_for_draw(cfg: ExperimentConfig, i_x: int) -> np.ndarray:
    if cfg.design.kind == "fixed":
        return generate_fixed(cfg.design).points
    seq = np.random.SeedSequence((cfg.master_seed & _SEED_MASK, _STREAM_COVARIATES, i_x))
    rng = np.random.default_rng(seq)
    spec = cfg.design
    return spec.lower + (spec.upper - spec.lower) * rng.random((spec.n, spec.dim))


def _outcome_rng(master_seed: int, i_x: int, i_y: int) -> np.random.Generator:
    seq = np.random.SeedSequence((master_seed & _SEED_MASK, _STREAM_OUTCOMES, i_x, i_y))
    return np.random.default_rng(seq)


def _run_items(cfg: ExperimentConfig, items: list[tuple[int, int, int]]):
    """Compute replicate values for (i_x, i_y range) work items, in order."""
    values, s_out, t_out, cond = [], [], [], []
    x, xp = cfg.query
    for i_x, y_start, y_stop in items:
        points = _covariates_for_draw(cfg, i_x)
        try:
            terms = pair_terms(cfg.kernel, points, cfg.h, cfg.lambda_n, x, xp)
            iu, ju = terms.iu, terms.ju
            f_flat = np.asarray(cfg.model.truth(points[iu], points[ju]), dtype=float)
            f_query = float(cfg.model.truth(x[None, :], xp[None, :])[0])
            s_nh, t_nh = s_t_from_terms(terms, f_flat, f_query, points.shape[0])
            cond.append(f_query + s_nh / t_nh if t_nh > 0 else np.nan)
        except Exception as exc:  # noqa: BLE001 - annotate with replicate index
            raise ReplicateError(i_x, y_start, str(exc)) from exc
        for i_y in range(y_start, y_stop):
            rng = _outcome_rng(cfg.master_seed, i_x, i_y)
            try:
                y_flat = sample_pair_outcomes(cfg.model, points, iu, ju, rng, means=f_flat)
                values.append(smooth_from_terms(terms, y_flat))
            except Exception as exc:  # noqa: BLE001
                raise ReplicateError(i_x, i_y, str(exc)) from exc
            s_out.append(s_nh)
            t_out.append(t_nh)
    return (np.asarray(values), np.asarray(s_out), np.asarray(t_out), np.asarray(cond))


def _chunk_items(cfg: ExperimentConfig, n_chunks: int) -> list[list[tuple[int, int, int]]]:
    """Split the flattened (i_x, i_y) replicate grid into contiguous chunks."""
    total = cfg.total_replicates
    n_chunks = max(1, min(n_chunks, total))
    bounds = np.linspace(0, total, n_chunks + 1).astype(int)
    chunks = []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        if lo == hi:
            continue
        items: list[tuple[int, int, int]] = []
        k = lo
        while k < hi:
            i_x, i_y = divmod(k, cfg.r_outcomes)
            stop = min(cfg.r_outcomes, i_y + (hi - k))
            items.append((i_x, i_y, stop))
            k += stop - i_y
        chunks.append(items)
    return chunks


def _simulate(cfg: ExperimentConfig, threads: int | None = None):
    """All replicate values plus per-draw diagnostics, deterministically."""
    threads = resolve_threads(threads)
    chunks = _chunk_items(cfg, threads * 4 if threads > 1 else 1)
    if threads == 1 or len(chunks) == 1:
        parts = [_run_items(cfg, items) for items in chunks]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_run_items, [cfg] * len(chunks), chunks))
    values = np.concatenate([p[0] for p in parts])
    s_nh = np.concatenate([p[1] for p in parts])
    t_nh = np.concatenate([p[2] for p in parts])
    # conditional means arrive once per (chunk, i_x) visit; dedupe by index
    cond_by_draw = np.full(cfg.r_covariates, np.nan)
    for chunk, part in zip(chunks, parts):
        for (i_x, _, _), value in zip(chunk, part[3]):
            cond_by_draw[i_x] = value
    shape = (cfg.r_covariates, cfg.r_outcomes)
    return values.reshape(shape), s_nh.reshape(shape), t_nh.reshape(shape), cond_by_draw


def shared_histogram(value_sets: list[np.ndarray], bins: object = "fd"):
    """Common bin edges over pooled values, then one count vector per set."""
    pooled = np.concatenate(value_sets)
    if np.ptp(pooled) == 0.0:
        v = float(pooled[0])
        edges = np.array([v, v])
        return edges, [np.array([len(vs)]) for vs in value_sets]
    edges = np.histogram_bin_edges(pooled, bins=bins)
    return edges, [np.histogram(vs, bins=edges)[0] for vs in value_sets]


def run_histogram(cfg: ExperimentConfig, threads: int | None = None) -> HistogramRun:
    """Estimator values over independent replicates, plus their histogram."""
    values, s_nh, t_nh, _ = _simulate(cfg, threads)
    flat = values.ravel()
    edges, (counts,) = shared_histogram([flat], cfg.bins)
    x, xp = cfg.query
    f_query = float(cfg.model.truth(x[None, :], xp[None, :])[0])
    i_x = np.repeat(np.arange(cfg.r_covariates), cfg.r_outcomes)
    i_y = np.tile(np.arange(cfg.r_outcomes), cfg.r_covariates)
    return HistogramRun(values=flat, i_x=i_x, i_y=i_y, s_nh=s_nh.ravel(),
                        t_nh=t_nh.ravel(), edges=edges, counts=counts, truth=f_query)


def run_decomposition(cfg: ExperimentConfig, threads: int | None = None) -> DecompositionEstimate:
    """Nested-loop estimates of the squared bias and variance components."""
    if cfg.r_outcomes < 2:
        raise ValueError("rho2 requires ry >= 2 outcome replicates per covariate draw")
    if cfg.design.kind == "random" and cfg.r_covariates < 2:
        raise ValueError("rho3 requires rx >= 2 covariate draws under the random design")
    values, _, t_nh, cond_by_draw = _simulate(cfg, threads)
    x, xp = cfg.query
    f_query = float(cfg.model.truth(x[None, :], xp[None, :])[0])
    flat = values.ravel()
    mean_value = float(np.mean(flat))
    rho1_hat = (mean_value - f_query) ** 2
    # anchoring at the first value leaves the variance unchanged but makes it
    # exactly zero for constant data (a plain mean of identical values rounds)
    within_var = np.var(values - values[:, :1], axis=1, ddof=1)
    rho2_hat = float(np.mean(within_var))
    if cfg.r_covariates >= 2:
        within_mean = np.mean(values, axis=1)
        rho3_hat = float(np.var(within_mean - within_mean[0], ddof=1))
        rho3_corrected = max(0.0, rho3_hat - rho2_hat / cfg.r_outcomes)
        rho3_exact = float(np.var(cond_by_draw - cond_by_draw[0], ddof=1))
    else:
        rho3_hat = rho3_corrected = rho3_exact = 0.0
    total_variance = float(np.var(flat - flat[0], ddof=1))
    risk_hat = float(np.mean((flat - f_query) ** 2))
    t_by_draw = t_nh[:, 0]
    t_bar_hat = float(np.mean(t_by_draw))
    epsilon_hat = 1.0 / t_by_draw - 1.0 / t_bar_hat
    edges, (counts,) = shared_histogram([flat], cfg.bins)
    return DecompositionEstimate(
        rho1_hat=rho1_hat,
        rho2_hat=rho2_hat,
        rho3_hat=rho3_hat,
        rho3_corrected=rho3_corrected,
        rho3_exact=rho3_exact,
        total_variance=total_variance,
        risk_hat=risk_hat,
        mean_value=mean_value,
        truth=f_query,
        t_bar_hat=t_bar_hat,
        epsilon_hat_max_abs=float(np.max(np.abs(epsilon_hat))),
        edges=edges,
        counts=counts,
        r_covariates=cfg.r_covariates,
        r_outcomes=cfg.r_outcomes,
    )


def _conventional_covariates(cfg: ConventionalConfig, r: int) -> np.ndarray:
    if cfg.design.kind == "fixed":
        return generate_fixed(cfg.design).points
    seq = np.random.SeedSequence((cfg.master_seed & _SEED_MASK, _STREAM_COVARIATES, r))
    rng = np.random.default_rng(seq)
    spec = cfg.design
    return spec.lower + (spec.upper - spec.lower) * rng.random((spec.n, spec.dim))


def _run_conventional_items(cfg: ConventionalConfig, start: int, stop: int) -> np.ndarray:
    from .smoother import conventional_smooth  # local import keeps pickling light

    out = np.empty(stop - start)
    fixed_points = generate_fixed(cfg.design).points if cfg.design.kind == "fixed" else None
    query = np.atleast_1d(np.asarray(cfg.query, dtype=float))
    for k, r in enumerate(range(start, stop)):
        points = fixed_points if fixed_points is not None else _conventional_covariates(cfg, r)
        means = np.asarray(cfg.mean_fn(points), dtype=float)
        rng = _outcome_rng(cfg.master_seed, r, 0)
        if cfg.law == "bernoulli":
            bad = (means < 0.0) | (means > 1.0)
            if np.any(bad):
                raise ReplicateError(r, 0, "bernoulli law needs means in [0, 1]")
            y = (rng.random(means.shape[0]) < means).astype(float)
        elif cfg.law == "gaussian":
            y = means + cfg.sigma * rng.standard_normal(means.shape[0])
        else:
            raise ValueError(f"conventional experiment supports bernoulli/gaussian, not {cfg.law!r}")
        out[k] = conventional_smooth(points, y, cfg.kernel, cfg.h, cfg.lambda_n, query)
    return out


def _conventional_values(cfg: ConventionalConfig, threads: int) -> np.ndarray:
    total = cfg.replicates
    n_chunks = max(1, min(threads * 4 if threads > 1 else 1, total))
    bounds = np.linspace(0, total, n_chunks + 1).astype(int)
    spans = [(int(lo), int(hi)) for lo, hi in zip(bounds[:-1], bounds[1:]) if lo != hi]
    if threads == 1 or len(spans) == 1:
        parts = [_run_conventional_items(cfg, lo, hi) for lo, hi in spans]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_run_conventional_items, [cfg] * len(spans),
                                  [s[0] for s in spans], [s[1] for s in spans]))
    return np.concatenate(parts)


def run_conventional_comparison(cfg: ConventionalConfig,
                                threads: int | None = None) -> ConventionalComparison:
    """Histograms of the conventional smoother under both designs.

    Uses the same n, schedule, and seed for a fixed-lattice run and a
    random-design run, with shared bin edges for comparability.
    """
    if cfg.design.dim != 1:
        raise ValueError("the conventional design contrast is univariate (dim must be 1)")
    threads = resolve_threads(threads)
    fixed_cfg = replace(cfg, design=replace(cfg.design, kind="fixed"))
    random_cfg = replace(cfg, design=replace(cfg.design, kind="random"))
    values_fixed = _conventional_values(fixed_cfg, threads)
    values_random = _conventional_values(random_cfg, threads)
    edges, (counts_fixed, counts_random) = shared_histogram(
        [values_fixed, values_random], cfg.bins)
    query = np.atleast_1d(np.asarray(cfg.query, dtype=float))
    truth = float(np.asarray(cfg.mean_fn(query[None, :]), dtype=float)[0])
    return ConventionalComparison(values_fixed=values_fixed, values_random=values_random,
                                  edges=edges, counts_fixed=counts_fixed,
                                  counts_random=counts_random, truth=truth)
