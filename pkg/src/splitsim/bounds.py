"""Numerical verification of the third-order obstruction.

Maximizes the alternating triple-product sum S over the constrained box slice
{0 <= x_i <= 1, sum x_i = 2} (grid enumeration plus coordinate-ascent polish),
audits arbitrary schedules for the per-stage obstruction, and converts the
resulting Omega(dt^3) floor into a minimum exponential count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import NORMALIZATION_ATOL, POLISH_IMPROVEMENT_TOL
from .schedules import Word
from .series import _s_value_batch, interleaving_profile, s_value

__all__ = [
    "Lemma2Result",
    "ScheduleAudit",
    "audit_schedule",
    "cubic_sum",
    "equal_split_floor",
    "lemma2_max",
    "lemma2_uniform_value",
    "min_exponentials",
]

_GRID_EXHAUSTIVE_MAX_N = 9
_DEFAULT_GRID_SMALL = 40  # N <= 6
_DEFAULT_GRID_LARGE = 20  # N in 7..9
_LOCAL_STARTS = 8


@dataclass(frozen=True)
class Lemma2Result:
    """Outcome of maximizing S over the feasible slice."""

    n: int
    max_s: float
    argmax: tuple[float, ...]
    method: str  # "grid" or "refined-local"
    grid_steps: int | None = None

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "max_s": self.max_s,
            "argmax": list(self.argmax),
            "method": self.method,
            "grid_steps": self.grid_steps,
        }


def _integer_compositions(total: int, parts: int, cap: int) -> np.ndarray:
    """All int vectors of length ``parts`` with entries in [0, cap] summing to
    ``total``, in lexicographic order."""
    memo: dict[tuple[int, int], np.ndarray] = {}

    def rec(tot: int, p: int) -> np.ndarray:
        if p == 1:
            if 0 <= tot <= cap:
                return np.array([[tot]], dtype=np.int16)
            return np.empty((0, 1), dtype=np.int16)
        key = (tot, p)
        if key in memo:
            return memo[key]
        blocks = []
        for v in range(min(tot, cap) + 1):
            sub = rec(tot - v, p - 1)
            if len(sub):
                col = np.full((len(sub), 1), v, dtype=np.int16)
                blocks.append(np.hstack([col, sub]))
        out = np.vstack(blocks) if blocks else np.empty((0, p), dtype=np.int16)
        memo[key] = out
        return out

    return rec(total, parts)


def _cubic_line_max(x: np.ndarray, i: int, j: int, lo: float, hi: float) -> tuple[float, float]:
    """Maximize S(x + d*e_i - d*e_j) over d in [lo, hi].

    S restricted to the pair move is a cubic in d; fit it on four points,
    then evaluate the true S at the interior critical points and endpoints.
    Returns (best_d, best_value).
    """
    span = hi - lo

    def f(d: float) -> float:
        y = x.copy()
        y[i] += d
        y[j] -= d
        return s_value(y)

    us = np.array([0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0])
    vals = np.array([f(lo + u * span) for u in us])
    poly = np.polyfit(us, vals, 3)
    crit = np.roots(np.polyder(poly))
    candidates = [0.0, 1.0]
    for r in crit:
        if abs(r.imag) < 1e-12 and 0.0 < r.real < 1.0:
            candidates.append(float(r.real))
    best_d, best_v = lo, float(vals[0])
    for u in candidates[1:]:
        d = lo + u * span
        v = f(d)
        if v > best_v:
            best_d, best_v = d, v
    return best_d, best_v


def _polish(x0: Sequence[float]) -> tuple[np.ndarray, float]:
    """Coordinate ascent over coordinate pairs on the sum-constrained slice."""
    x = np.asarray(x0, dtype=float).copy()
    n = len(x)
    best = s_value(x)
    while True:
        sweep_gain = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                lo = max(-x[i], x[j] - 1.0)
                hi = min(1.0 - x[i], x[j])
                if hi - lo < 1e-15:
                    continue
                d, v = _cubic_line_max(x, i, j, lo, hi)
                if v > best:
                    sweep_gain += v - best
                    x[i] += d
                    x[j] -= d
                    best = v
        if sweep_gain < POLISH_IMPROVEMENT_TOL:
            return x, best


def lemma2_max(n: int, grid_steps: int | None = None) -> Lemma2Result:
    """Maximize S over {0 <= x_i <= 1, sum x_i = 2} numerically.

    For n <= 9 the feasible set is enumerated on a grid of resolution
    2/grid_steps (defaults: 40 for n <= 6, 20 for n in 7..9) and the best cell
    is polished by coordinate ascent; ties break toward the lexicographically
    smallest grid point. Larger n skips the grid and polishes several seeded
    starting points instead. The maximum always lands strictly below 1/3; at
    odd n the maximizer is the uniform point x_i = 2/n.
    """
    if n < 3:
        raise ValueError(f"need at least 3 coordinates, got {n}")

    if n > _GRID_EXHAUSTIVE_MAX_N:
        starts = [np.full(n, 2.0 / n)]
        rng = np.random.default_rng(n)
        for _ in range(_LOCAL_STARTS):
            while True:
                p = rng.dirichlet(np.ones(n)) * 2.0
                if p.max() <= 1.0:
                    break
            starts.append(p)
        best_x, best_v = None, -np.inf
        for x0 in starts:
            x, v = _polish(x0)
            if v > best_v:
                best_x, best_v = x, v
        return Lemma2Result(
            n=n, max_s=best_v, argmax=tuple(best_x), method="refined-local"
        )

    if grid_steps is None:
        grid_steps = _DEFAULT_GRID_SMALL if n <= 6 else _DEFAULT_GRID_LARGE
    if grid_steps < 2:
        raise ValueError(f"grid_steps must be >= 2, got {grid_steps}")

    h = 2.0 / grid_steps
    cap = grid_steps // 2  # enforces x_i <= 1
    table = _integer_compositions(grid_steps, n, cap)
    best_v, best_row = -np.inf, None
    chunk = 500_000
    for start in range(0, len(table), chunk):
        xs = table[start : start + chunk].astype(float) * h
        vals = _s_value_batch(xs)
        i = int(np.argmax(vals))
        if vals[i] > best_v:
            best_v = float(vals[i])
            best_row = xs[i]
    x, v = _polish(best_row)
    return Lemma2Result(
        n=n, max_s=v, argmax=tuple(x), method="grid", grid_steps=grid_steps
    )


def lemma2_uniform_value(n: int) -> float:
    """Closed form (1/3)(1 - 1/n^2) of S at the uniform point, odd n only."""
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    if n % 2 == 0:
        raise ValueError(f"the closed form holds for odd n only, got {n}")
    return (1.0 / 3.0) * (1.0 - 1.0 / n**2)


@dataclass(frozen=True)
class ScheduleAudit:
    """Third-order verdict for one schedule and one term pair.

    A correctly timed schedule (both per-term totals equal to one stage unit)
    is 'obstructed': its combined aba + bab coefficient s lands strictly below
    1/3, gap = 1/3 - s. Mistimed schedules already incur a second-order error
    per stage, so s is not computed for them.
    """

    pair: tuple[int, int]
    normalized: bool
    alpha_sum: float
    beta_sum: float
    s: float | None
    gap: float | None
    verdict: str  # "obstructed" or "mistimed"

    def to_json(self) -> dict:
        return {
            "pair": list(self.pair),
            "normalized": self.normalized,
            "alpha_sum": self.alpha_sum,
            "beta_sum": self.beta_sum,
            "s": self.s,
            "gap": self.gap,
            "verdict": self.verdict,
        }


def audit_schedule(w: Word, a: int, b: int, dt_unit: float) -> ScheduleAudit:
    """Audit one word for the per-stage third-order obstruction.

    Durations are divided by ``dt_unit`` so the check is against simulating
    one stage of length dt_unit. If either per-term total differs from 1 the
    verdict is 'mistimed'; otherwise s comes from the interleaving profile.
    """
    if not dt_unit > 0:
        raise ValueError(f"dt_unit must be positive, got {dt_unit}")
    if a == b:
        raise ValueError("the pair must consist of two distinct terms")
    alpha = w.term_total(a) / dt_unit
    beta = w.term_total(b) / dt_unit
    if alpha == 0.0 or beta == 0.0:
        missing = [k for k, tot in ((a, alpha), (b, beta)) if tot == 0.0]
        raise ValueError(f"word has no step of term(s) {missing}")
    normalized = (
        abs(alpha - 1.0) <= NORMALIZATION_ATOL and abs(beta - 1.0) <= NORMALIZATION_ATOL
    )
    if not normalized:
        return ScheduleAudit(
            pair=(a, b),
            normalized=False,
            alpha_sum=alpha,
            beta_sum=beta,
            s=None,
            gap=None,
            verdict="mistimed",
        )
    profile = interleaving_profile(w.scaled(1.0 / dt_unit), a, b)
    s = s_value(profile.x)
    return ScheduleAudit(
        pair=(a, b),
        normalized=True,
        alpha_sum=alpha,
        beta_sum=beta,
        s=s,
        gap=1.0 / 3.0 - s,
        verdict="obstructed",
    )


def cubic_sum(parts: Sequence[float]) -> float:
    """Sum of cubes of a positive partition."""
    ps = [float(p) for p in parts]
    if any(not p > 0 for p in ps):
        raise ValueError("all partition parts must be strictly positive")
    return float(sum(p**3 for p in ps))


def equal_split_floor(t: float, k: int) -> float:
    """t^3 / k^2: the minimum of sum(t_j^3) over positive partitions of t into
    k parts, attained only at the equal split t_j = t/k."""
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    if k < 1:
        raise ValueError(f"part count must be >= 1, got {k}")
    return t**3 / k**2


def min_exponentials(t: float, eps: float, c: float) -> int:
    """Smallest stage count K with c * t^3 / K^2 <= eps.

    The calibration constant ``c`` is instance-dependent (fit it from
    second-order scheme error data); doubling t multiplies the result by
    2**1.5 and quartering eps doubles it.
    """
    if not (t > 0 and eps > 0 and c > 0):
        raise ValueError(f"t, eps, c must all be positive, got {(t, eps, c)}")
    k = max(1, math.ceil(math.sqrt(c * t**3 / eps)))
    while k > 1 and c * t**3 / (k - 1) ** 2 <= eps:
        k -= 1
    while c * t**3 / k**2 > eps:
        k += 1
    return k
