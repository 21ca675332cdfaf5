"""True link regression functions and conditional outcome laws.

A :class:`LinkModel` bundles the symmetric mean function ``f(x, x')``, its
smoothness metadata (Hoelder exponent ``beta`` and constant ``L``), and the
conditional law the pair outcomes are drawn from. Samplers fill a symmetric
n-by-n outcome array with one independent draw per unordered pair; the
node-effect law adds shared per-node noise, which correlates outcomes that
touch the same node.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .design import CovariateSet

__all__ = [
    "LinkModel",
    "ProductLink",
    "ConstantLink",
    "IdentityMean",
    "ConstantMean",
    "get_model",
    "truth",
    "sample_outcomes",
    "sample_outcomes_node_effect",
    "sample_pair_outcomes",
    "check_holder",
    "pair_indices",
]

OUTCOME_LAWS = ("bernoulli", "gaussian", "node-effect")
_SEED_MASK = (1 << 64) - 1


class ProductLink:
    """Inner-product mean function ``f(x, x') = <x, x'>`` (``x x'`` in d=1)."""

    def __call__(self, x: np.ndarray, xp: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        xp = np.asarray(xp, dtype=float)
        return np.einsum("...j,...j->...", np.atleast_2d(x), np.atleast_2d(xp))

    def __repr__(self) -> str:
        return "ProductLink()"


class ConstantLink:
    """Constant mean function ``f(x, x') = value``."""

    def __init__(self, value: float = 0.25):
        self.value = float(value)

    def __call__(self, x: np.ndarray, xp: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return np.full(x.shape[:-1], self.value)

    def __repr__(self) -> str:
        return f"ConstantLink({self.value!r})"


class IdentityMean:
    """Single-node mean function ``m(x) = x`` (first coordinate)."""

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return np.asarray(points, dtype=float)[:, 0]

    def __repr__(self) -> str:
        return "IdentityMean()"


class ConstantMean:
    """Single-node mean function ``m(x) = value``."""

    def __init__(self, value: float = 0.5):
        self.value = float(value)

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return np.full(np.asarray(points).shape[0], self.value)

    def __repr__(self) -> str:
        return f"ConstantMean({self.value!r})"


@dataclass(frozen=True)
class LinkModel:
    """Mean function plus smoothness metadata and a conditional outcome law.

    ``sigma`` is the Gaussian law's standard deviation; ``sigma_u`` and
    ``sigma_v`` are the node-effect law's per-node and per-pair noise scales.
    """

    truth: object  # callable (m,d),(m,d) -> (m,)
    beta: float = 1.0
    L: float = 1.0
    law: str = "bernoulli"
    sigma: float = 1.0
    sigma_u: float = 1.0
    sigma_v: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 < self.beta <= 1.0:
            raise ValueError("beta must lie in (0, 1]")
        if self.L <= 0:
            raise ValueError("Hoelder constant L must be positive")
        if self.law not in OUTCOME_LAWS:
            raise ValueError(f"unknown outcome law {self.law!r}; choose from {OUTCOME_LAWS}")

    @property
    def variance_bound(self) -> float:
        """An upper bound tau on the conditional outcome variance."""
        if self.law == "bernoulli":
            return 0.26  # max p(1-p) = 1/4 plus a small margin
        if self.law == "gaussian":
            return self.sigma**2 * 1.05
        return (2.0 * self.sigma_u**2 + self.sigma_v**2) * 1.05


def get_model(
    link: str = "product",
    law: str = "bernoulli",
    beta: float = 1.0,
    L: float = 1.0,
    sigma: float = 1.0,
    sigma_u: float = 1.0,
    sigma_v: float = 1.0,
    constant: float = 0.25,
) -> LinkModel:
    """Build a :class:`LinkModel` from string names used in configs and CLI."""
    if link == "product":
        fn = ProductLink()
    elif link == "constant":
        fn = ConstantLink(constant)
    else:
        raise ValueError(f"unknown link function {link!r}; choose 'product' or 'constant'")
    return LinkModel(truth=fn, beta=beta, L=L, law=law, sigma=sigma, sigma_u=sigma_u, sigma_v=sigma_v)


def truth(model: LinkModel, x, xp) -> float:
    """Evaluate the true mean function at a single pair of points."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    xp = np.atleast_1d(np.asarray(xp, dtype=float))
    return float(model.truth(x[None, :], xp[None, :])[0])


def pair_indices(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Upper-triangle index pair (i, j), i < j, for an n-node link set."""
    return np.triu_indices(n, k=1)


def _pair_means(model: LinkModel, points: np.ndarray, iu: np.ndarray, ju: np.ndarray) -> np.ndarray:
    return np.asarray(model.truth(points[iu], points[ju]), dtype=float)


def sample_pair_outcomes(
    model: LinkModel,
    points: np.ndarray,
    iu: np.ndarray,
    ju: np.ndarray,
    rng: np.random.Generator,
    means: np.ndarray | None = None,
) -> np.ndarray:
    """One draw per unordered pair (i, j) given the realized covariates.

    Fast path shared by the samplers and the Monte Carlo engine: returns a
    flat array aligned with ``(iu, ju)``. ``means`` may pass precomputed
    ``f(X_i, X_j)`` values to avoid recomputing them.
    """
    if means is None:
        means = _pair_means(model, points, iu, ju)
    if model.law == "bernoulli":
        bad = (means < 0.0) | (means > 1.0)
        if np.any(bad):
            k = int(np.argmax(bad))
            raise ValueError(
                "bernoulli law needs means in [0, 1]; "
                f"pair ({int(iu[k])}, {int(ju[k])}) has mean {means[k]!r}"
            )
        return (rng.random(means.shape[0]) < means).astype(float)
    if model.law == "gaussian":
        return means + model.sigma * rng.standard_normal(means.shape[0])
    # node-effect: shared per-node noise plus independent per-pair noise
    n = points.shape[0]
    u = model.sigma_u * rng.standard_normal(n)
    v = model.sigma_v * rng.standard_normal(means.shape[0])
    return means + u[iu] + u[ju] + v


def _mirror(n: int, iu: np.ndarray, ju: np.ndarray, flat: np.ndarray) -> np.ndarray:
    out = np.zeros((n, n))
    out[iu, ju] = flat
    out[ju, iu] = flat
    return out


def sample_outcomes(model: LinkModel, cov: CovariateSet, seed: int) -> np.ndarray:
    """Symmetric n-by-n outcome array under the Bernoulli or Gaussian law.

    Each unordered pair gets one independent draw from the conditional law
    at mean ``f(X_i, X_j)``, mirrored to both orderings; the diagonal is
    unused and left at zero. Deterministic given ``seed``.
    """
    if model.law == "node-effect":
        return sample_outcomes_node_effect(model, cov, seed)
    rng = np.random.default_rng(np.random.SeedSequence(seed & _SEED_MASK))
    n = cov.n
    iu, ju = pair_indices(n)
    flat = sample_pair_outcomes(model, cov.points, iu, ju, rng)
    return _mirror(n, iu, ju, flat)


def sample_outcomes_node_effect(model: LinkModel, cov: CovariateSet, seed: int) -> np.ndarray:
    """Symmetric outcomes ``Y_ij = f(X_i, X_j) + U_i + U_j + V_ij``.

    ``U_i`` is drawn once per node and ``V_ij`` once per unordered pair, so
    outcomes sharing a node are positively correlated.
    """
    if model.law != "node-effect":
        raise ValueError("sample_outcomes_node_effect requires the node-effect law")
    rng = np.random.default_rng(np.random.SeedSequence(seed & _SEED_MASK))
    n = cov.n
    iu, ju = pair_indices(n)
    flat = sample_pair_outcomes(model, cov.points, iu, ju, rng)
    return _mirror(n, iu, ju, flat)


def check_holder(
    model: LinkModel,
    trials: int,
    seed: int = 0,
    lower: float = 0.0,
    upper: float = 1.0,
    dim: int = 1,
) -> float:
    """Max observed ratio ``|f(x,x') - f(x~,x')| / ||x - x~||^beta``.

    Samples random triples from the domain cube; model membership in the
    smoothness class requires the returned value to be at most ``L``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(np.random.SeedSequence(seed & _SEED_MASK))
    x = lower + (upper - lower) * rng.random((trials, dim))
    xt = lower + (upper - lower) * rng.random((trials, dim))
    xp = lower + (upper - lower) * rng.random((trials, dim))
    num = np.abs(np.asarray(model.truth(x, xp)) - np.asarray(model.truth(xt, xp)))
    den = np.linalg.norm(x - xt, axis=1) ** model.beta
    ok = den > 0
    if not np.any(ok):
        return 0.0
    return float(np.max(num[ok] / den[ok]))
