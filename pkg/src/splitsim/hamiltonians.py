"""Term-set decompositions H = H_1 + ... + H_m.

Provides validated term sets, a reproducible Gaussian random ensemble, a
spin-chain preset with genuinely noncommuting parts, and exact JSON
round-tripping.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import (
    DEGENERATE_COMMUTATOR_FLOOR,
    HERMITIAN_OUTPUT_ATOL,
)
from .matkernel import as_complex_matrix, hermitian_deviation, kron, spectral_norm

__all__ = [
    "PAULI_X",
    "PAULI_Z",
    "TermSet",
    "is_commuting",
    "min_pairwise_commutator",
    "random_termset",
    "spin_chain_termset",
    "termset_from_json",
    "termset_to_json",
    "total",
]

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

_MAX_REGENERATION_ATTEMPTS = 64


@dataclass(frozen=True)
class TermSet:
    """m >= 2 Hermitian matrices of common dimension, with short labels."""

    dim: int
    terms: tuple[np.ndarray, ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.terms) < 2:
            raise ValueError(f"a term set needs m >= 2 terms, got {len(self.terms)}")
        if len(self.labels) != len(self.terms):
            raise ValueError(
                f"got {len(self.labels)} labels for {len(self.terms)} terms"
            )
        frozen = []
        for i, term in enumerate(self.terms):
            m = as_complex_matrix(term)
            if m.shape != (self.dim, self.dim):
                raise ValueError(
                    f"term {i + 1} has shape {m.shape}, expected ({self.dim}, {self.dim})"
                )
            dev = hermitian_deviation(m)
            if dev > HERMITIAN_OUTPUT_ATOL:
                raise ValueError(
                    f"term {i + 1} is not Hermitian: deviation {dev:.3e}"
                )
            m = m.copy()
            m.flags.writeable = False
            frozen.append(m)
        object.__setattr__(self, "terms", tuple(frozen))
        object.__setattr__(self, "labels", tuple(str(s) for s in self.labels))

    @property
    def m(self) -> int:
        return len(self.terms)

    def term(self, index: int) -> np.ndarray:
        """Term by 1-based index."""
        if not 1 <= index <= self.m:
            raise ValueError(f"term index {index} out of range 1..{self.m}")
        return self.terms[index - 1]


def total(ts: TermSet) -> np.ndarray:
    """Entrywise sum of all terms (Hermitian by construction)."""
    out = np.zeros((ts.dim, ts.dim), dtype=complex)
    for term in ts.terms:
        out += term
    return out


def min_pairwise_commutator(ts: TermSet) -> float:
    """Smallest spectral norm of [H_j, H_k] over pairs j < k."""
    best = np.inf
    for j in range(ts.m):
        for k in range(j + 1, ts.m):
            a, b = ts.terms[j], ts.terms[k]
            best = min(best, spectral_norm(a @ b - b @ a))
    return float(best)


def is_commuting(ts: TermSet, tol: float = 1e-8) -> bool:
    """True when every pair of terms commutes within ``tol``.

    Commuting instances are legal but degenerate: every positive-time
    splitting reproduces the evolution exactly, so error fits collapse.
    """
    for j in range(ts.m):
        for k in range(j + 1, ts.m):
            a, b = ts.terms[j], ts.terms[k]
            if spectral_norm(a @ b - b @ a) > tol:
                return False
    return True


def random_termset(d: int, m: int, norm_bound: float, seed: int) -> TermSet:
    """Reproducible random term set.

    Each term is a Gaussian Hermitian matrix (A + A^dagger)/2 with independent
    standard-normal real and imaginary parts, rescaled so its spectral norm
    equals ``norm_bound``. If every pairwise commutator of a draw falls below
    the degeneracy floor the draw is discarded and the seed bumped by one, so
    returned instances are always noncommuting; the output is still a pure
    function of ``(d, m, norm_bound, seed)``.
    """
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    if m < 2:
        raise ValueError(f"term count must be >= 2, got {m}")
    if norm_bound <= 0:
        raise ValueError(f"norm bound must be positive, got {norm_bound}")

    for attempt in range(_MAX_REGENERATION_ATTEMPTS):
        rng = np.random.default_rng(int(seed) + attempt)
        terms = []
        for _ in range(m):
            a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            h = (a + a.conj().T) / 2.0
            h *= norm_bound / spectral_norm(h)
            terms.append(h)
        ts = TermSet(dim=d, terms=tuple(terms), labels=tuple(f"H{k + 1}" for k in range(m)))
        if min_pairwise_commutator(ts) >= DEGENERATE_COMMUTATOR_FLOOR:
            return ts
    raise RuntimeError(
        f"could not draw a noncommuting term set after {_MAX_REGENERATION_ATTEMPTS} attempts"
    )


def _site_operator(op: np.ndarray, site: int, n: int) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for i in range(n):
        out = kron(out, op if i == site else np.eye(2, dtype=complex))
    return out


def spin_chain_termset(n_qubits: int, jx: float, jz: float, hx: float) -> TermSet:
    """Two-term spin chain on an open line of 2..6 qubits.

    Term 1 collects the X-X bond couplings, term 2 the Z-Z bond couplings plus
    a single-site field of strength ``hx``. The field is applied along Z,
    transverse to the X-X bonds, so the two terms fail to commute whenever
    ``jx * hx != 0`` (already at two qubits, where X(x)X commutes with both
    Z(x)Z and single-site X and a field along X would make the split exactly
    solvable).
    """
    if not 2 <= n_qubits <= 6:
        raise ValueError(f"n_qubits must be in 2..6, got {n_qubits}")
    d = 2**n_qubits
    h1 = np.zeros((d, d), dtype=complex)
    h2 = np.zeros((d, d), dtype=complex)
    for i in range(n_qubits - 1):
        h1 += jx * (_site_operator(PAULI_X, i, n_qubits) @ _site_operator(PAULI_X, i + 1, n_qubits))
        h2 += jz * (_site_operator(PAULI_Z, i, n_qubits) @ _site_operator(PAULI_Z, i + 1, n_qubits))
    for i in range(n_qubits):
        h2 += hx * _site_operator(PAULI_Z, i, n_qubits)
    for name, h in (("XX", h1), ("ZZ+field", h2)):
        if spectral_norm(h) == 0.0:
            raise ValueError(
                f"spin-chain term '{name}' is identically zero with these couplings; "
                "a term set needs two nonzero terms"
            )
    return TermSet(dim=d, terms=(h1, h2), labels=("XX", "ZZ+field"))


def termset_to_json(ts: TermSet) -> dict:
    """JSON document: {dim, labels, terms: [[[re, im], ...] row-major]}."""
    return {
        "dim": ts.dim,
        "labels": list(ts.labels),
        "terms": [
            [[float(z.real), float(z.imag)] for z in term.reshape(-1)]
            for term in ts.terms
        ],
    }


def termset_from_json(doc: dict) -> TermSet:
    """Inverse of :func:`termset_to_json`; round-trips exactly."""
    d = int(doc["dim"])
    terms = []
    for flat in doc["terms"]:
        if len(flat) != d * d:
            raise ValueError(f"term has {len(flat)} entries, expected {d * d}")
        m = np.array([complex(re, im) for re, im in flat], dtype=complex).reshape(d, d)
        terms.append(m)
    return TermSet(dim=d, terms=tuple(terms), labels=tuple(doc["labels"]))
