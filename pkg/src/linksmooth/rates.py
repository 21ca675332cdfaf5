"""Bandwidth schedules, predicted decay exponents, and log-log slope fits.

The bandwidth schedule ``h = n^{-1/(s+d)}`` is indexed by the smoothness
``s`` the analyst assumes, which may differ from the true exponent ``beta``
of the mean function; that mismatch is exactly what separates the two
designs' variance decay. Predicted exponents:

* variance, fixed design:   ``2s / (s + d)``
* variance, random design:  ``min(2s, 2 beta + s) / (s + d)``
* risk at the optimal schedule ``s = beta``: ``2 beta / (beta + d)``

Observed decay exponents come from ordinary least squares on
``(log n, log value)``, sign-normalized so a positive slope means decay.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .montecarlo import ExperimentConfig, run_decomposition
from .smoother import audit_bandwidth

__all__ = [
    "Schedule",
    "RateFit",
    "RateStudyResult",
    "bandwidth",
    "regularization_for",
    "predicted_variance_exponent",
    "predicted_risk_exponent",
    "fit_slope",
    "run_rate_study",
    "RATE_STATISTICS",
]

LAMBDA_RULES = ("inverse-n", "inverse-sqrt-n", "fixed")
RATE_STATISTICS = ("total_variance", "rho2_hat", "rho3_exact", "rho1_hat", "risk_hat")


@dataclass(frozen=True)
class Schedule:
    """Assumed smoothness s plus the regularization rule."""

    s: float
    lambda_rule: str = "inverse-n"
    lambda_value: float | None = None
    nu: float = 2.0

    def __post_init__(self) -> None:
        if self.s <= 0:
            raise ValueError("assumed smoothness s must be positive")
        if self.lambda_rule not in LAMBDA_RULES:
            raise ValueError(f"unknown lambda rule {self.lambda_rule!r}; choose from {LAMBDA_RULES}")
        if self.lambda_rule == "fixed" and self.lambda_value is None:
            raise ValueError("lambda_rule='fixed' requires lambda_value")


def bandwidth(n: int, s: float, d: int) -> float:
    """Schedule value ``n^{-1/(s+d)}``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if s <= 0:
        raise ValueError("s must be positive")
    return float(n) ** (-1.0 / (s + d))


def regularization_for(schedule: Schedule, n: int) -> float:
    """Regularization value the schedule assigns at sample size n."""
    if schedule.lambda_rule == "inverse-n":
        return 1.0 / n
    if schedule.lambda_rule == "inverse-sqrt-n":
        return 1.0 / math.sqrt(n)
    return float(schedule.lambda_value)


def predicted_variance_exponent(s: float, beta: float, d: int, design: str) -> float:
    """Theoretical variance decay exponent for ``h = n^{-1/(s+d)}``."""
    if s <= 0 or beta <= 0:
        raise ValueError("s and beta must be positive")
    if design == "fixed":
        return 2.0 * s / (s + d)
    if design == "random":
        return min(2.0 * s, 2.0 * beta + s) / (s + d)
    raise ValueError(f"unknown design {design!r}")


def predicted_risk_exponent(beta: float, d: int) -> float:
    """Optimal risk decay exponent ``2 beta / (beta + d)``."""
    if not 0.0 < beta <= 1.0:
        raise ValueError("beta must lie in (0, 1]")
    if d < 1:
        raise ValueError("d must be a positive integer")
    return 2.0 * beta / (beta + d)


@dataclass
class RateFit:
    """OLS fit of ``value ~ n^{-slope}`` on the log-log scale."""

    ns: list
    values: list
    slope: float
    intercept: float
    r_squared: float
    predicted: float | None = None


def fit_slope(ns, values, predicted: float | None = None) -> RateFit:
    """Least-squares decay exponent of positive statistics against n.

    Requires at least three distinct sample sizes and strictly positive
    values; the reported slope is positive for decaying sequences.
    """
    ns = [int(n) for n in ns]
    values = [float(v) for v in values]
    if len(ns) != len(values):
        raise ValueError("ns and values must have equal length")
    if len(ns) < 3:
        raise ValueError("need >= 3 sample sizes for a slope fit")
    if len(set(ns)) != len(ns):
        raise ValueError("sample sizes must be distinct")
    if any(v <= 0 for v in values):
        raise ValueError("slope fit requires strictly positive values")
    log_n = np.log(np.asarray(ns, dtype=float))
    log_v = np.log(np.asarray(values, dtype=float))
    coeffs = np.polyfit(log_n, log_v, 1)
    fitted = np.polyval(coeffs, log_n)
    ss_res = float(np.sum((log_v - fitted) ** 2))
    ss_tot = float(np.sum((log_v - np.mean(log_v)) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return RateFit(ns=ns, values=values, slope=float(-coeffs[0]),
                   intercept=float(coeffs[1]), r_squared=r_squared, predicted=predicted)


@dataclass
class RateStudyResult:
    """Per-statistic slope fits plus the per-n schedule audit."""

    design: str
    schedule: Schedule
    beta: float
    dim: int
    ns: list
    estimates: dict = field(default_factory=dict)  # n -> DecompositionEstimate
    fits: dict = field(default_factory=dict)  # statistic -> RateFit
    audits: list = field(default_factory=list)  # per-n dicts


def _predicted_for(statistic: str, s: float, beta: float, d: int, design: str) -> float | None:
    if statistic == "total_variance":
        return predicted_variance_exponent(s, beta, d, design)
    if statistic == "rho2_hat":
        return 2.0 * s / (s + d)
    if statistic == "rho3_exact":
        return (2.0 * beta + s) / (s + d) if design == "random" else None
    if statistic == "rho1_hat":
        return 2.0 * beta / (s + d)
    if statistic == "risk_hat":
        return min(2.0 * beta, 2.0 * s) / (s + d)
    return None


def _study_seed(master_seed: int, n: int) -> int:
    seq = np.random.SeedSequence((master_seed & ((1 << 64) - 1), 3, n))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def run_rate_study(base: ExperimentConfig, schedule: Schedule, ns,
                   threads: int | None = None, row_sink=None) -> RateStudyResult:
    """Sweep sample sizes under the schedule and fit decay exponents.

    For each n the bandwidth and regularization follow the schedule, the
    decomposition runs with the base config's replicate counts, and each
    statistic's slope is fitted over n. ``row_sink``, when given, receives
    one ``(n, h, lambda, statistic, value)`` row per statistic as soon as
    that n finishes, so partial results survive a failure.
    """
    ns = sorted(int(n) for n in ns)
    if len(ns) < 3:
        raise ValueError("need >= 3 sample sizes for a rate study")
    if any(n < 2 for n in ns):
        raise ValueError("every n must be >= 2")
    design = base.design.kind
    beta = base.model.beta
    d = base.design.dim
    result = RateStudyResult(design=design, schedule=schedule, beta=beta, dim=d, ns=ns)
    for n in ns:
        h = bandwidth(n, schedule.s, d)
        lam = regularization_for(schedule, n)
        cfg = replace(
            base,
            design=replace(base.design, n=n),
            h=h,
            lambda_n=lam,
            master_seed=_study_seed(base.master_seed, n),
        )
        audit = audit_bandwidth(n, d, h, lam, schedule.nu)
        result.audits.append({"n": n, "h": h, "lambda": lam,
                              "ok": not audit, "violations": list(audit)})
        est = run_decomposition(cfg, threads)
        result.estimates[n] = est
        if row_sink is not None:
            for statistic in RATE_STATISTICS:
                row_sink(n, h, lam, statistic, getattr(est, statistic))
    for statistic in RATE_STATISTICS:
        values = [getattr(result.estimates[n], statistic) for n in ns]
        predicted = _predicted_for(statistic, schedule.s, beta, d, design)
        if all(v > 0 for v in values):
            result.fits[statistic] = fit_slope(ns, values, predicted)
    return result
