"""Positive-duration exponential schedules.

A :class:`Word` is an ordered list of (term index, duration) steps with every
duration strictly positive. Steps are listed in operator order: the first
step is the LEFTMOST factor of the product, so the last listed step acts on a
state first. Deterministic schedules (plain splitting, palindromic splitting)
and the per-stage mixtures of the two randomized schemes all produce Words;
evaluation to a concrete unitary happens against a TermSet.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .config import PROBABILITY_SUM_ATOL
from .hamiltonians import TermSet
from .matkernel import expm_hermitian

__all__ = [
    "UnitaryMixture",
    "Word",
    "alg1_stage_mixture",
    "alg2_stage_mixture",
    "concat_words",
    "mixture_from_json",
    "mixture_power",
    "mixture_to_json",
    "sample_schedule",
    "strang_word",
    "trotter_word",
    "word_from_json",
    "word_to_json",
    "word_unitary",
]

_ALG2_MAX_TERMS = 6
_MIXTURE_POWER_CAP = 4096


@dataclass(frozen=True)
class Word:
    """Ordered (term index, duration) steps, durations strictly positive."""

    steps: tuple[tuple[int, float], ...]

    def __post_init__(self):
        clean = []
        for i, (k, tau) in enumerate(self.steps):
            k = int(k)
            tau = float(tau)
            if k < 1:
                raise ValueError(f"step {i} has term index {k}, indices are 1-based")
            if not tau > 0.0:
                raise ValueError(
                    f"step {i} has duration {tau}; every duration must be strictly positive"
                )
            clean.append((k, tau))
        object.__setattr__(self, "steps", tuple(clean))

    def __len__(self) -> int:
        return len(self.steps)

    def term_total(self, index: int) -> float:
        """Total duration spent on one term."""
        return sum(tau for k, tau in self.steps if k == index)

    def max_index(self) -> int:
        return max((k for k, _ in self.steps), default=0)

    def scaled(self, factor: float) -> "Word":
        """Word with every duration multiplied by ``factor`` (> 0)."""
        if not factor > 0:
            raise ValueError(f"scale factor must be positive, got {factor}")
        return Word(tuple((k, tau * factor) for k, tau in self.steps))


def concat_words(*words: Word) -> Word:
    return Word(tuple(itertools.chain.from_iterable(w.steps for w in words)))


def word_unitary(ts: TermSet, w: Word) -> np.ndarray:
    """Evaluate a word to its unitary.

    Factors multiply in listed order (first step leftmost), so the product is
    ``exp(-i H_{k_1} t_1) @ exp(-i H_{k_2} t_2) @ ...``; an empty word gives
    the identity.
    """
    bad = w.max_index()
    if bad > ts.m:
        raise ValueError(f"word references term {bad} but the term set has m={ts.m}")
    u = np.eye(ts.dim, dtype=complex)
    cache: dict[tuple[int, float], np.ndarray] = {}
    for k, tau in w.steps:
        key = (k, tau)
        if key not in cache:
            cache[key] = expm_hermitian(ts.term(k), tau)
        u = u @ cache[key]
    return u


def _merge_adjacent(steps: list[tuple[int, float]]) -> tuple[tuple[int, float], ...]:
    merged: list[tuple[int, float]] = []
    for k, tau in steps:
        if merged and merged[-1][0] == k:
            merged[-1] = (k, merged[-1][1] + tau)
        else:
            merged.append((k, tau))
    return tuple(merged)


def trotter_word(ts: TermSet, dt: float, reps: int) -> Word:
    """``reps`` repetitions of one pass (1, dt), (2, dt), ..., (m, dt)."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if reps < 1:
        raise ValueError(f"repetition count must be >= 1, got {reps}")
    one_pass = [(k, dt) for k in range(1, ts.m + 1)]
    return Word(tuple(one_pass * reps))


def strang_word(ts: TermSet, dt: float, reps: int, merge: bool = True) -> Word:
    """``reps`` repetitions of the half-step palindrome.

    One repetition is (1, dt/2), ..., (m, dt/2), (m, dt/2), ..., (1, dt/2).
    With ``merge=True`` (default) adjacent equal-index steps are summed, which
    shortens the word without changing its unitary; pass ``merge=False`` to
    keep the literal palindrome for audits that count exponentials.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if reps < 1:
        raise ValueError(f"repetition count must be >= 1, got {reps}")
    half = dt / 2.0
    ascending = [(k, half) for k in range(1, ts.m + 1)]
    palindrome = ascending + ascending[::-1]
    steps = palindrome * reps
    if merge:
        return Word(_merge_adjacent(steps))
    return Word(tuple(steps))


@dataclass(frozen=True)
class UnitaryMixture:
    """Finite probability distribution over words; one randomized stage."""

    entries: tuple[tuple[float, Word], ...]

    def __post_init__(self):
        if not self.entries:
            raise ValueError("a mixture needs at least one entry")
        clean = []
        for i, (p, w) in enumerate(self.entries):
            p = float(p)
            if not 0.0 < p <= 1.0:
                raise ValueError(f"entry {i} has probability {p}, outside (0, 1]")
            if not isinstance(w, Word):
                w = Word(tuple(w))
            clean.append((p, w))
        s = sum(p for p, _ in clean)
        if abs(s - 1.0) > PROBABILITY_SUM_ATOL:
            raise ValueError(f"probabilities sum to {s!r}, expected 1 within {PROBABILITY_SUM_ATOL:.0e}")
        object.__setattr__(self, "entries", tuple(clean))

    def __len__(self) -> int:
        return len(self.entries)


def alg1_stage_mixture(ts: TermSet, dt: float) -> UnitaryMixture:
    """One stage of the single-term scheme (alg1).

    Uniform choice among the m one-step words (k, dt); m consecutive stages
    together approximate the evolution over dt.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    p = 1.0 / ts.m
    return UnitaryMixture(tuple((p, Word(((k, dt),))) for k in range(1, ts.m + 1)))


def alg2_stage_mixture(ts: TermSet, dt: float) -> UnitaryMixture:
    """One stage of the random-ordering scheme (alg2).

    Uniform choice among the m! words that apply every term once, for dt, in
    a uniformly random order. Capped at m <= 6; beyond that enumerate via
    sampling (:func:`sample_schedule`) instead of building the full mixture.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if ts.m > _ALG2_MAX_TERMS:
        raise ValueError(
            f"m={ts.m} would enumerate {ts.m}! words; the factorial mixture is capped at "
            f"m <= {_ALG2_MAX_TERMS}. Draw schedules with sample_schedule instead."
        )
    perms = list(itertools.permutations(range(1, ts.m + 1)))
    p = 1.0 / len(perms)
    return UnitaryMixture(
        tuple((p, Word(tuple((k, dt) for k in sigma))) for sigma in perms)
    )


def sample_schedule(mix: UnitaryMixture, stages: int, seed: int) -> Word:
    """Concatenate ``stages`` independent draws from the mixture.

    Deterministic for a given seed. Draws are concatenated in draw order, so
    the first draw is the leftmost block of the schedule.
    """
    if stages < 1:
        raise ValueError(f"stage count must be >= 1, got {stages}")
    rng = np.random.default_rng(seed)
    probs = np.array([p for p, _ in mix.entries])
    idx = rng.choice(len(mix.entries), size=stages, p=probs)
    return concat_words(*(mix.entries[i][1] for i in idx))


def mixture_power(mix: UnitaryMixture, stages: int, max_entries: int = _MIXTURE_POWER_CAP) -> UnitaryMixture:
    """The mixture of ``stages`` independent copies, expanded explicitly.

    Enumerates every ordered tuple of entries, multiplying probabilities and
    concatenating words with later stages leftmost (a later stage acts later
    in time, hence further left in the operator product). Entry count grows
    as len(mix)**stages and is capped.
    """
    if stages < 1:
        raise ValueError(f"stage count must be >= 1, got {stages}")
    n = len(mix.entries) ** stages
    if n > max_entries:
        raise ValueError(
            f"expanding {stages} stages of a {len(mix.entries)}-entry mixture needs {n} words, "
            f"above the cap of {max_entries}"
        )
    out = []
    for combo in itertools.product(mix.entries, repeat=stages):
        p = 1.0
        for q, _ in combo:
            p *= q
        out.append((p, concat_words(*(w for _, w in reversed(combo)))))
    return UnitaryMixture(tuple(out))


def word_to_json(w: Word) -> dict:
    return {"steps": [[k, tau] for k, tau in w.steps]}


def word_from_json(doc: dict) -> Word:
    return Word(tuple((int(k), float(tau)) for k, tau in doc["steps"]))


def mixture_to_json(mix: UnitaryMixture) -> dict:
    return {"entries": [{"p": p, "word": word_to_json(w)} for p, w in mix.entries]}


def mixture_from_json(doc: dict) -> UnitaryMixture:
    return UnitaryMixture(
        tuple((float(e["p"]), word_from_json(e["word"])) for e in doc["entries"])
    )
