"""Independent brute-force references for the smoother operations.

Everything here is written against the defining formulas with plain Python
loops, `math.fsum` accumulation, and its own kernel evaluations, so it shares
no code with the package implementation it checks.
"""

from __future__ import annotations

import math


def boxcar(z: list[float]) -> float:
    return 1.0 if math.sqrt(math.fsum(v * v for v in z)) <= 1.0 else 0.0


def epanechnikov(z: list[float]) -> float:
    out = 1.0
    for v in z:
        if abs(v) > 1.0:
            return 0.0
        out *= 0.75 * (1.0 - v * v)
    return out


KERNELS = {"boxcar": boxcar, "epanechnikov": epanechnikov}


def kh(kernel: str, u: list[float], h: float) -> float:
    d = len(u)
    return KERNELS[kernel]([v / h for v in u]) / h**d


def _rows(points) -> list[list[float]]:
    return [[float(v) for v in row] for row in points]


def ordered_pair_terms(points, kernel, h, lam, x, xp):
    """Per ordered pair (i, j), i != j: the raw weight K_h K_h + lambda."""
    pts = _rows(points)
    x = [float(v) for v in x]
    xp = [float(v) for v in xp]
    n = len(pts)
    terms = {}
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            ku = kh(kernel, [a - b for a, b in zip(x, pts[i])], h)
            kv = kh(kernel, [a - b for a, b in zip(xp, pts[j])], h)
            terms[(i, j)] = ku * kv + lam
    return terms


def link_smooth(points, outcomes, kernel, h, lam, x, xp) -> float:
    """Ratio of pair sums over the ordered index set, straight double loop."""
    terms = ordered_pair_terms(points, kernel, h, lam, x, xp)
    num = math.fsum(outcomes[i][j] * w for (i, j), w in terms.items())
    den = math.fsum(terms.values())
    if den == 0.0:
        raise ZeroDivisionError("empty neighborhood in oracle")
    return num / den


def link_weights(points, kernel, h, lam, x, xp) -> dict:
    """Normalized weight of every ordered pair; they sum to one."""
    terms = ordered_pair_terms(points, kernel, h, lam, x, xp)
    den = math.fsum(terms.values())
    if den == 0.0:
        raise ZeroDivisionError("empty neighborhood in oracle")
    return {key: w / den for key, w in terms.items()}


def s_t_diagnostics(points, kernel, h, lam, x, xp, f) -> tuple[float, float]:
    """Pair-averaged centered numerator S and denominator T.

    ``f`` maps two coordinate lists to the true mean.
    """
    pts = _rows(points)
    terms = ordered_pair_terms(points, kernel, h, lam, x, xp)
    fq = f([float(v) for v in x], [float(v) for v in xp])
    count = len(terms)
    s = math.fsum((f(pts[i], pts[j]) - fq) * w for (i, j), w in terms.items()) / count
    t = math.fsum(terms.values()) / count
    return s, t


def conditional_mean(points, kernel, h, lam, x, xp, f) -> float:
    """Sum of W_ij * f(X_i, X_j) over ordered pairs."""
    pts = _rows(points)
    weights = link_weights(points, kernel, h, lam, x, xp)
    return math.fsum(f(pts[i], pts[j]) * w for (i, j), w in weights.items())


def conventional_smooth(points, y, kernel, h, lam, query) -> float:
    """Regularized Nadaraya-Watson ratio over single nodes."""
    pts = _rows(points)
    q = [float(v) for v in query]
    weights = [kh(kernel, [a - b for a, b in zip(q, row)], h) + lam for row in pts]
    den = math.fsum(weights)
    if den == 0.0:
        raise ZeroDivisionError("empty neighborhood in oracle")
    num = math.fsum(w * float(yi) for w, yi in zip(weights, y))
    return num / den
