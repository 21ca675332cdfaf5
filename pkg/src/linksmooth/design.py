"""Covariate designs: deterministic near-equispaced lattices and i.i.d. draws.

The fixed design places nodes on a lattice of the domain so that nearest-
neighbour gaps scale as ``n^{-1/d}``; the random design draws nodes i.i.d.
from a bounded density (uniform ships). Every generator is deterministic
given its seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DesignSpec",
    "CovariateSet",
    "generate",
    "generate_fixed",
    "generate_random",
    "verify_spacing",
    "lattice_side",
]

DESIGN_KINDS = ("fixed", "random")
_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class DesignSpec:
    """How node covariates are produced.

    ``kind`` is "fixed" (deterministic lattice) or "random" (i.i.d. draws).
    The domain is the axis-aligned cube ``[lower, upper]^dim``. For the
    random design the marginal density is uniform; its lower/upper density
    bounds are derived from the domain volume and recorded on the spec.
    """

    kind: str
    n: int
    dim: int = 1
    lower: float = 0.0
    upper: float = 1.0
    density: str = "uniform"

    def __post_init__(self) -> None:
        if self.kind not in DESIGN_KINDS:
            raise ValueError(f"unknown design {self.kind!r}; choose from {DESIGN_KINDS}")
        if self.n < 2:
            raise ValueError("n must be >= 2 (at least one link must exist)")
        if self.dim < 1:
            raise ValueError("dim must be a positive integer")
        if not self.upper > self.lower:
            raise ValueError("domain upper bound must exceed lower bound")
        if self.density != "uniform":
            raise ValueError("only the uniform density is implemented")

    @property
    def density_bounds(self) -> tuple[float, float]:
        """Lower and upper bounds (l, u) of the marginal density."""
        volume = (self.upper - self.lower) ** self.dim
        return 1.0 / volume, 1.0 / volume


@dataclass(frozen=True)
class CovariateSet:
    """Realized node covariates: an (n, d) array plus the generating spec."""

    points: np.ndarray
    spec: DesignSpec

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


def lattice_side(n: int, dim: int) -> int:
    """Smallest m with m**dim >= n, computed without float-root pitfalls."""
    m = max(2, int(round(n ** (1.0 / dim))))
    while m**dim < n:
        m += 1
    while m > 2 and (m - 1) ** dim >= n:
        m -= 1
    return m


def generate_fixed(spec: DesignSpec) -> CovariateSet:
    """Deterministic lattice design.

    d=1 gives the equispaced grid ``(i-1)/(n-1)`` mapped onto the domain.
    d>1 takes the first n points, in lexicographic order, of the Cartesian
    lattice with ``lattice_side(n, d)`` points per axis.
    """
    if spec.kind != "fixed":
        raise ValueError("generate_fixed requires a fixed-design spec")
    width = spec.upper - spec.lower
    if spec.dim == 1:
        pts = spec.lower + width * np.linspace(0.0, 1.0, spec.n)[:, None]
        return CovariateSet(points=pts, spec=spec)
    m = lattice_side(spec.n, spec.dim)
    axis = spec.lower + width * np.linspace(0.0, 1.0, m)
    grids = np.meshgrid(*([axis] * spec.dim), indexing="ij")
    lattice = np.stack([g.ravel() for g in grids], axis=1)
    return CovariateSet(points=lattice[: spec.n].copy(), spec=spec)


def generate_random(spec: DesignSpec, seed: int) -> CovariateSet:
    """n i.i.d. uniform draws over the domain, deterministic given seed."""
    if spec.kind != "random":
        raise ValueError("generate_random requires a random-design spec")
    rng = np.random.default_rng(np.random.SeedSequence(seed & _SEED_MASK))
    pts = spec.lower + (spec.upper - spec.lower) * rng.random((spec.n, spec.dim))
    return CovariateSet(points=pts, spec=spec)


def generate(spec: DesignSpec, seed: int = 0) -> CovariateSet:
    """Dispatch on the design kind; ``seed`` is ignored for the fixed design."""
    if spec.kind == "fixed":
        return generate_fixed(spec)
    return generate_random(spec, seed)


def verify_spacing(cov: CovariateSet | np.ndarray) -> tuple[float, float]:
    """Exhaustive O(n^2) gap scan.

    Returns ``(min_gap, max_min_gap)``: the smallest pairwise distance and
    the largest nearest-neighbour distance. Near-equispaced designs keep
    both within constant multiples of ``n^{-1/d}``.
    """
    pts = cov.points if isinstance(cov, CovariateSet) else np.asarray(cov, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    n = pts.shape[0]
    if n < 2:
        raise ValueError("spacing needs at least two points")
    nearest = np.empty(n)
    chunk = max(1, int(4e6) // max(1, n))  # bound the pairwise block size
    for start in range(0, n, chunk):
        stop = min(n, start + chunk)
        diff = pts[start:stop, None, :] - pts[None, :, :]
        dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        for row in range(start, stop):
            dist[row - start, row] = np.inf
        nearest[start:stop] = dist.min(axis=1)
    return float(nearest.min()), float(nearest.max())
