"""Noncommutative power series in m symbols, truncated at total degree 3.

A :class:`TruncatedSeries` maps ordered symbol words (tuples over 1..m, length
0..3) to complex coefficients; durations are numeric and folded into the
coefficients. Ordered words, not symmetrized monomials, because the ordering
is exactly what the third-order obstruction analysis needs: a positive-time
schedule can never reproduce both aba and bab coefficients of the exact
evolution at once, and the shortfall is a purely combinatorial function of the
schedule's interleaving profile.

The degree-3 truncation is hard-coded; the entire analysis lives at third
order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence, Union

import numpy as np

from .config import NORMALIZATION_ATOL
from .schedules import Word

__all__ = [
    "InterleavingProfile",
    "TruncatedSeries",
    "exact_series",
    "exp_step_series",
    "identity_series",
    "interleaving_profile",
    "mixture_mean_series",
    "s_value",
    "series_mul",
    "series_to_json",
    "series_to_matrix",
    "third_order_pair_sum",
    "word_series",
]

MAX_DEGREE = 3


@dataclass(frozen=True)
class TruncatedSeries:
    """Coefficients per ordered symbol word, words no longer than 3."""

    m: int
    coeffs: Mapping[tuple[int, ...], complex]

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"symbol count must be >= 1, got {self.m}")
        clean: dict[tuple[int, ...], complex] = {}
        for word, c in self.coeffs.items():
            word = tuple(int(k) for k in word)
            if len(word) > MAX_DEGREE:
                raise ValueError(f"word {word} exceeds the degree-{MAX_DEGREE} truncation")
            if any(not 1 <= k <= self.m for k in word):
                raise ValueError(f"word {word} uses symbols outside 1..{self.m}")
            clean[word] = complex(c)
        clean.setdefault((), 0j)
        object.__setattr__(self, "coeffs", clean)

    def coeff(self, word: Sequence[int]) -> complex:
        return self.coeffs.get(tuple(word), 0j)


def identity_series(m: int) -> TruncatedSeries:
    return TruncatedSeries(m=m, coeffs={(): 1.0 + 0j})


def exp_step_series(k: int, tau: float, m: int) -> TruncatedSeries:
    """Expansion of exp(-i H_k tau) through degree 3.

    Coefficients: 1 on the identity, -i*tau on (k), -tau^2/2 on (k, k) and
    +i*tau^3/6 on (k, k, k).
    """
    if not 1 <= k <= m:
        raise ValueError(f"symbol {k} outside 1..{m}")
    tau = float(tau)
    return TruncatedSeries(
        m=m,
        coeffs={
            (): 1.0 + 0j,
            (k,): -1j * tau,
            (k, k): -0.5 * tau**2,
            (k, k, k): 1j * tau**3 / 6.0,
        },
    )


def series_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Word-concatenation convolution, discarding words longer than 3."""
    if a.m != b.m:
        raise ValueError(f"symbol counts differ: {a.m} vs {b.m}")
    out: dict[tuple[int, ...], complex] = {}
    for wa, ca in a.coeffs.items():
        if ca == 0 and wa:
            continue
        room = MAX_DEGREE - len(wa)
        for wb, cb in b.coeffs.items():
            if len(wb) > room:
                continue
            key = wa + wb
            out[key] = out.get(key, 0j) + ca * cb
    return TruncatedSeries(m=a.m, coeffs=out)


def word_series(w: Word, m: int) -> TruncatedSeries:
    """Expansion of a word's unitary, factors multiplied in operator order.

    The first step of the word is the leftmost factor, matching
    :func:`splitsim.schedules.word_unitary`, so for the two-step word
    ((1, t), (2, t)) the coefficient of (1, 2) is -t**2 and (2, 1) gets 0.
    """
    if w.max_index() > m:
        raise ValueError(f"word references symbol {w.max_index()} but m={m}")
    s = identity_series(m)
    for k, tau in w.steps:
        s = series_mul(s, exp_step_series(k, tau, m))
    return s


def exact_series(m: int, t: float) -> TruncatedSeries:
    """Expansion of exp(-i (H_1 + ... + H_m) t) through degree 3.

    Every ordered pair gets -t^2/2 and every ordered triple gets +i t^3/6,
    since (-i)^3 / 3! = i/6.
    """
    t = float(t)
    coeffs: dict[tuple[int, ...], complex] = {(): 1.0 + 0j}
    symbols = range(1, m + 1)
    for j in symbols:
        coeffs[(j,)] = -1j * t
    for j in symbols:
        for k in symbols:
            coeffs[(j, k)] = -0.5 * t**2
    for j in symbols:
        for k in symbols:
            for l in symbols:
                coeffs[(j, k, l)] = 1j * t**3 / 6.0
    return TruncatedSeries(m=m, coeffs=coeffs)


def mixture_mean_series(mix, m: int) -> TruncatedSeries:
    """Probability-weighted coefficientwise mean of the entry word series."""
    out: dict[tuple[int, ...], complex] = {}
    for p, w in mix.entries:
        s = word_series(w, m)
        for word, c in s.coeffs.items():
            out[word] = out.get(word, 0j) + p * c
    return TruncatedSeries(m=m, coeffs=out)


def series_to_matrix(s: TruncatedSeries, terms: Sequence[np.ndarray]) -> np.ndarray:
    """Evaluate the series on concrete matrices for the symbols."""
    if len(terms) < s.m:
        raise ValueError(f"need {s.m} matrices, got {len(terms)}")
    mats = [np.asarray(t, dtype=complex) for t in terms]
    d = mats[0].shape[0]
    out = np.zeros((d, d), dtype=complex)
    for word, c in s.coeffs.items():
        if c == 0:
            continue
        prod = np.eye(d, dtype=complex)
        for k in word:
            prod = prod @ mats[k - 1]
        out += c * prod
    return out


def third_order_pair_sum(
    w: Union[Word, TruncatedSeries], a: int, b: int
) -> float:
    """Combined aba + bab third-order coefficient, in units of i * dt^3.

    For a word input the durations of terms ``a`` and ``b`` must each total
    one (normalized units); rescale first for other stage lengths. Returns
    Re[(coeff(a,b,a) + coeff(b,a,b)) / i]. The exact evolution gives exactly
    1/3 (1/6 from each ordering); any strictly positive-duration word comes
    out below 1/3.
    """
    if a == b:
        raise ValueError("the pair must consist of two distinct terms")
    if isinstance(w, TruncatedSeries):
        s = w
        if max(a, b) > s.m:
            raise ValueError(f"pair ({a}, {b}) outside the series symbols 1..{s.m}")
    else:
        ta, tb = w.term_total(a), w.term_total(b)
        if abs(ta - 1.0) > NORMALIZATION_ATOL or abs(tb - 1.0) > NORMALIZATION_ATOL:
            raise ValueError(
                f"per-term totals must be 1 in normalized units, got "
                f"total({a})={ta!r}, total({b})={tb!r}"
            )
        s = word_series(w, max(w.max_index(), a, b))
    combined = s.coeff((a, b, a)) + s.coeff((b, a, b))
    return float((combined / 1j).real)


@dataclass(frozen=True)
class InterleavingProfile:
    """Alternating block totals of two chosen terms within a word.

    ``x[0]`` is the leading block and belongs to ``pair[0]``; consecutive
    blocks belong to alternating members of the pair. Steps of other terms
    are transparent: they separate nothing, so blocks of the same term merge
    across them.
    """

    pair: tuple[int, int]
    x: tuple[float, ...]
    total: float

    def __post_init__(self):
        if len(self.pair) != 2 or self.pair[0] == self.pair[1]:
            raise ValueError(f"pair must be two distinct terms, got {self.pair}")
        if any(not xi > 0 for xi in self.x):
            raise ValueError("all block durations must be strictly positive")


def interleaving_profile(w: Word, a: int, b: int) -> InterleavingProfile:
    """Project a word onto two terms and merge into alternating blocks.

    The returned pair is oriented so that ``pair[0]`` owns the leading block.
    The block counts of the two terms can differ by at most one, since blocks
    alternate.
    """
    if a == b:
        raise ValueError("the pair must consist of two distinct terms")
    blocks: list[tuple[int, float]] = []
    for k, tau in w.steps:
        if k != a and k != b:
            continue
        if blocks and blocks[-1][0] == k:
            blocks[-1] = (k, blocks[-1][1] + tau)
        else:
            blocks.append((k, tau))
    present = {k for k, _ in blocks}
    if a not in present or b not in present:
        missing = [k for k in (a, b) if k not in present]
        raise ValueError(f"word has no step of term(s) {missing}")
    lead = blocks[0][0]
    other = b if lead == a else a
    x = tuple(tau for _, tau in blocks)
    return InterleavingProfile(pair=(lead, other), x=x, total=float(sum(x)))


@lru_cache(maxsize=None)
def _parity_triples(n: int) -> tuple[tuple[int, int, int], ...]:
    """0-based index triples i<j<k with k-i even and j-i odd."""
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            if (j - i) % 2 == 0:
                continue
            for k in range(j + 1, n):
                if (k - i) % 2 == 0:
                    out.append((i, j, k))
    return tuple(out)


def s_value(x: Sequence[float]) -> float:
    """Sum of x_i x_j x_k over triples i<j<k with k-i even and j-i odd.

    On an alternating block profile this is exactly the combined aba + bab
    third-order coefficient of the schedule: the odd/even index parities pick
    out the blocks of the two terms.
    """
    xs = [float(v) for v in x]
    return float(sum(xs[i] * xs[j] * xs[k] for i, j, k in _parity_triples(len(xs))))


def _s_value_batch(x: np.ndarray) -> np.ndarray:
    """Vectorized :func:`s_value` over the rows of ``x``."""
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape[0])
    for i, j, k in _parity_triples(x.shape[1]):
        out += x[:, i] * x[:, j] * x[:, k]
    return out


def series_to_json(s: TruncatedSeries) -> dict:
    """Stable dump: coefficients sorted by word length, then lexicographic."""
    items = sorted(s.coeffs.items(), key=lambda kv: (len(kv[0]), kv[0]))
    return {
        "m": s.m,
        "coeffs": [
            {"word": list(word), "re": float(c.real), "im": float(c.imag)}
            for word, c in items
        ],
    }
