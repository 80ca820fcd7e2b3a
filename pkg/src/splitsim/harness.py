"""Experiment driver: convergence sweeps, slope fits, bound campaigns and
cost-scaling cross-checks.

Error statistic everywhere: the maximum trace distance over a fixed panel of
16 seeded pure input states. That is cheap, reproducible, and a lower bound
on the worst-case error. Deterministic segment words are raised to the K-th
power and randomized stages are composed as superoperator powers, which is
mathematically identical to evaluating the full schedule and keeps sweeps to
log(K) matrix products.

Desk-scale envelope: dim <= 16 instances, K up to a few thousand per sweep
point, bisections capped at 2**22 segments.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .config import COMMUTING_ERROR_FLOOR
from .channels import (
    exact_evolution,
    lemma1_report,
    mixture_superoperator,
    unvec,
    vec,
)
from .hamiltonians import (
    TermSet,
    random_termset,
    spin_chain_termset,
    termset_to_json,
)
from .matkernel import DensityMatrix, pure_density, spectral_norm, trace_norm
from .schedules import (
    UnitaryMixture,
    alg1_stage_mixture,
    alg2_stage_mixture,
    mixture_to_json,
    strang_word,
    trotter_word,
    word_unitary,
)

__all__ = [
    "CampaignReport",
    "RunConfig",
    "SCHEMES",
    "ScalingReport",
    "SchemeEvaluator",
    "SweepResult",
    "fit_cost_constant",
    "fit_loglog",
    "lemma1_campaign",
    "scaling_cross_check",
    "stable_json_dumps",
    "stage_order_ratios",
    "state_panel",
    "sweep_error_vs_K",
]

SCHEMES = ("trotter", "strang", "alg1", "alg2")

_PANEL_SIZE = 16
_BISECTION_K_CAP = 2**22

# Default time grids for the cost cross-check, one per scheme. First-order
# coherent error stops accumulating once ||H|| * t passes the inverse level
# spacings (the leading error generator has no secular part), so the
# first-order pair is probed at short times; the second-order pair needs
# longer times for segment counts large enough that integer rounding does not
# bias the fit.
DEFAULT_SCALING_T_GRID = {
    "trotter": (0.05, 0.1, 0.2, 0.4),
    "strang": (2.0, 4.0, 8.0, 16.0),
    "alg1": (0.5, 1.0, 2.0, 4.0),
    "alg2": (1.0, 2.0, 4.0, 8.0),
}
DEFAULT_SCALING_EPS_GRID = (1e-3, 1e-4, 1e-5)
EXPECTED_EXPONENTS = {
    "trotter": (2.0, 1.0),
    "strang": (1.5, 0.5),
    "alg1": (2.0, 1.0),
    "alg2": (1.5, 0.5),
}


def stable_json_dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


@dataclass(frozen=True)
class RunConfig:
    """One experiment: a scheme, an instance, and a list of segment counts."""

    scheme: str
    t: float
    k_list: tuple[int, ...]
    seed: int = 0
    n_qubits: int | None = None
    jx: float = 1.0
    jz: float = 1.0
    hx: float = 1.0
    d: int = 4
    m: int = 2
    norm_bound: float = 1.0
    panel_size: int = _PANEL_SIZE
    min_r2: float = 0.98
    drop_bend_points: bool = True
    bend_residual_tol: float = 0.25
    out: str | None = None

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}, expected one of {SCHEMES}")
        if not self.t > 0:
            raise ValueError(f"t must be positive, got {self.t}")
        ks = tuple(int(k) for k in self.k_list)
        if not ks:
            raise ValueError("k_list must be nonempty")
        if any(k < 1 for k in ks):
            raise ValueError(f"segment counts must be >= 1, got {ks}")
        if any(b <= a for a, b in zip(ks, ks[1:])):
            raise ValueError(f"k_list must be strictly increasing, got {ks}")
        object.__setattr__(self, "k_list", ks)

    @classmethod
    def from_json(cls, doc: dict) -> "RunConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**doc)

    def to_json(self) -> dict:
        return {
            "scheme": self.scheme,
            "t": self.t,
            "k_list": list(self.k_list),
            "seed": self.seed,
            "n_qubits": self.n_qubits,
            "jx": self.jx,
            "jz": self.jz,
            "hx": self.hx,
            "d": self.d,
            "m": self.m,
            "norm_bound": self.norm_bound,
            "panel_size": self.panel_size,
            "min_r2": self.min_r2,
            "drop_bend_points": self.drop_bend_points,
            "bend_residual_tol": self.bend_residual_tol,
            "out": self.out,
        }

    def build_termset(self) -> TermSet:
        if self.n_qubits is not None:
            return spin_chain_termset(self.n_qubits, self.jx, self.jz, self.hx)
        return random_termset(self.d, self.m, self.norm_bound, self.seed)


def state_panel(dim: int, n_states: int, seed: int) -> np.ndarray:
    """n_states seeded random pure states, rows of a (n_states, dim) array."""
    rng = np.random.default_rng(seed)
    out = np.empty((n_states, dim), dtype=complex)
    for i in range(n_states):
        v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        out[i] = v / np.linalg.norm(v)
    return out


class SchemeEvaluator:
    """Panel-max error of one scheme at any segment count, target cached.

    For deterministic schemes the evolved panel state is U_seg**K applied to
    the vector; for randomized schemes the single-stage superoperator is
    raised to the stage count and applied to the vectorized projector.
    """

    def __init__(self, ts: TermSet, scheme: str, t: float, panel: np.ndarray):
        if scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {scheme!r}")
        self.ts = ts
        self.scheme = scheme
        self.t = float(t)
        self.panel = panel
        u0 = exact_evolution(ts, t)
        self._targets = [
            np.outer(u0 @ v, (u0 @ v).conj()) for v in panel
        ]

    def n_exponentials(self, k: int) -> int:
        m = self.ts.m
        if self.scheme == "strang":
            return k * (2 * m - 2) + 1  # merged palindrome, merged across segments
        return m * k

    def stage_count(self, k: int) -> int:
        return self.ts.m * k if self.scheme == "alg1" else k

    def error(self, k: int) -> float:
        dt = self.t / k
        if self.scheme in ("trotter", "strang"):
            if self.scheme == "trotter":
                seg = word_unitary(self.ts, trotter_word(self.ts, dt, 1))
            else:
                seg = word_unitary(self.ts, strang_word(self.ts, dt, 1))
            u = np.linalg.matrix_power(seg, k)
            worst = 0.0
            for v, target in zip(self.panel, self._targets):
                w = u @ v
                worst = max(worst, trace_norm(np.outer(w, w.conj()) - target))
            return worst
        if self.scheme == "alg1":
            stage = mixture_superoperator(self.ts, alg1_stage_mixture(self.ts, dt))
        else:
            stage = mixture_superoperator(self.ts, alg2_stage_mixture(self.ts, dt))
        s = np.linalg.matrix_power(stage.mat, self.stage_count(k))
        d = self.ts.dim
        worst = 0.0
        for v, target in zip(self.panel, self._targets):
            rho = np.outer(v, v.conj())
            out = unvec(s @ vec(rho), d)
            worst = max(worst, trace_norm(out - target))
        return worst


def fit_loglog(points) -> tuple[float, float, float]:
    """Least-squares line through (log K, log error); returns (slope,
    intercept, r2)."""
    pts = [(float(k), float(e)) for k, e in points]
    if len(pts) < 3:
        raise ValueError(f"need at least 3 points for a fit, got {len(pts)}")
    if any(e <= 0 for _, e in pts):
        raise ValueError("all errors must be positive for a log-log fit")
    lx = np.log([k for k, _ in pts])
    ly = np.log([e for _, e in pts])
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - float(np.sum(resid**2)) / ss_tot
    return float(slope), float(intercept), float(r2)


@dataclass(frozen=True)
class SweepResult:
    """Error-versus-K sweep with its log-log fit."""

    scheme: str
    t: float
    points: tuple[tuple[int, int, float], ...]  # (K, N_exponentials, error)
    slope: float | None
    intercept: float | None
    r2: float | None
    commuting: bool
    dropped_smallest: int
    meta: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "scheme": self.scheme,
            "t": self.t,
            "points": [[k, n, e] for k, n, e in self.points],
            "slope": self.slope,
            "intercept": self.intercept,
            "r2": self.r2,
            "commuting": self.commuting,
            "dropped_smallest": self.dropped_smallest,
            "meta": dict(self.meta),
        }

    def points_csv(self) -> str:
        lines = ["K,N,error"]
        for k, n, e in self.points:
            lines.append(f"{k},{n},{e!r}")
        return "\n".join(lines) + "\n"


def sweep_error_vs_K(cfg: RunConfig) -> SweepResult:
    """Evaluate one scheme over the config's K list and fit the decay slope.

    Commuting instances (every error below the floor) are flagged and left
    unfitted. A fit whose largest-K residual exceeds the bend tolerance is
    retried without the two smallest K points (preasymptotic bend); the
    result records how many points were dropped.
    """
    ts = cfg.build_termset()
    panel = state_panel(ts.dim, cfg.panel_size, cfg.seed)
    ev = SchemeEvaluator(ts, cfg.scheme, cfg.t, panel)
    points = []
    for k in cfg.k_list:
        points.append((k, ev.n_exponentials(k), ev.error(k)))

    meta = {
        "d": ts.dim,
        "m": ts.m,
        "seed": cfg.seed,
        "n_qubits": cfg.n_qubits,
        "couplings": None if cfg.n_qubits is None else {"jx": cfg.jx, "jz": cfg.jz, "hx": cfg.hx},
        "norm_bound": None if cfg.n_qubits is not None else cfg.norm_bound,
        "term_norms": [spectral_norm(term) for term in ts.terms],
        "panel_size": cfg.panel_size,
    }

    commuting = all(e < COMMUTING_ERROR_FLOOR for _, _, e in points)
    if commuting or len(points) < 3:
        return SweepResult(
            scheme=cfg.scheme,
            t=cfg.t,
            points=tuple(points),
            slope=None,
            intercept=None,
            r2=None,
            commuting=commuting,
            dropped_smallest=0,
            meta=meta,
        )

    slope, intercept, r2 = fit_loglog([(k, e) for k, _, e in points])
    dropped = 0
    if cfg.drop_bend_points and len(points) >= 5:
        k_last, e_last = points[-1][0], points[-1][2]
        resid_last = abs(np.log(e_last) - (slope * np.log(k_last) + intercept))
        if resid_last > cfg.bend_residual_tol:
            slope, intercept, r2 = fit_loglog([(k, e) for k, _, e in points[2:]])
            dropped = 2
    return SweepResult(
        scheme=cfg.scheme,
        t=cfg.t,
        points=tuple(points),
        slope=slope,
        intercept=intercept,
        r2=r2,
        commuting=False,
        dropped_smallest=dropped,
        meta=meta,
    )


def stage_order_ratios(ts: TermSet, dts, panel_seed: int = 7, panel_size: int = _PANEL_SIZE) -> dict:
    """Per-stage error and bound across a list of halving dt values.

    The single-term scheme is measured per m-stage group (its natural unit of
    simulated time); the permutation scheme per single stage. Returns, per
    scheme, the panel-max observed errors, the bound values, and the
    consecutive-ratio lists for both (expected to approach 4 and 8 under
    halving).
    """
    dts = [float(dt) for dt in dts]
    panel = state_panel(ts.dim, panel_size, panel_seed)
    out: dict = {"dts": dts}
    for scheme, stages_fn, mix_fn in (
        ("alg1", lambda: ts.m, alg1_stage_mixture),
        ("alg2", lambda: 1, alg2_stage_mixture),
    ):
        errors, bounds = [], []
        for dt in dts:
            mix = mix_fn(ts, dt)
            stages = stages_fn()
            rep = lemma1_report(
                ts,
                mix,
                stages,
                dt,
                pure_density(panel[0]),
                pure_density(panel[0]),
            )
            bounds.append(rep.bound)
            stage = mixture_superoperator(ts, mix)
            s = np.linalg.matrix_power(stage.mat, stages)
            u0 = exact_evolution(ts, dt)
            worst = 0.0
            for v in panel:
                rho = np.outer(v, v.conj())
                target = u0 @ rho @ u0.conj().T
                worst = max(worst, trace_norm(unvec(s @ vec(rho), ts.dim) - target))
            errors.append(worst)
        out[scheme] = {
            "errors": errors,
            "bounds": bounds,
            "error_ratios": [a / b for a, b in zip(errors, errors[1:])],
            "bound_ratios": [a / b for a, b in zip(bounds, bounds[1:])],
        }
    return out


def fit_cost_constant(cfg: RunConfig) -> float:
    """Calibration constant c with error ~= c * t^3 / K^2, fit from a sweep.

    Feeds :func:`splitsim.bounds.min_exponentials`. Meaningful for the
    second-order schemes (slope near -2); c is instance-dependent, so refit
    it whenever the term set changes.
    """
    res = sweep_error_vs_K(cfg)
    if res.slope is None:
        raise ValueError("cannot calibrate on a commuting instance")
    if abs(res.slope + 2.0) > 0.5:
        raise ValueError(
            f"fitted slope {res.slope:.2f} is not second order; calibrate on a "
            "second-order scheme sweep"
        )
    return float(np.exp(res.intercept) / cfg.t**3)


@dataclass(frozen=True)
class CampaignReport:
    """Outcome of a randomized bound-dominance campaign."""

    n_instances: int
    seed: int
    violations: tuple[dict, ...]
    best_observed_over_bound: float
    best_observed_over_mean_dev: float
    best_observed_over_sq_dev: float
    n_controls: int

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "n_instances": self.n_instances,
            "seed": self.seed,
            "ok": self.ok,
            "n_violations": len(self.violations),
            "violations": [dict(v) for v in self.violations],
            "best_observed_over_bound": self.best_observed_over_bound,
            "best_observed_over_mean_dev": self.best_observed_over_mean_dev,
            "best_observed_over_sq_dev": self.best_observed_over_sq_dev,
            "n_controls": self.n_controls,
        }


def _control_instance(rng: np.random.Generator) -> tuple[TermSet, UnitaryMixture, float]:
    """Commuting control: diagonal terms, single-word plain splitting.

    The schedule reproduces the evolution exactly, so both the bound and the
    observed increase must vanish.
    """
    d = int(rng.integers(2, 5))
    terms = tuple(np.diag(rng.standard_normal(d)).astype(complex) for _ in range(2))
    ts = TermSet(dim=d, terms=terms, labels=("D1", "D2"))
    dt = float(rng.uniform(0.05, 0.2))
    mix = UnitaryMixture(((1.0, trotter_word(ts, dt, 1)),))
    return ts, mix, dt


def _random_mixed_state(rng: np.random.Generator, psi: np.ndarray, weight: float) -> DensityMatrix:
    d = len(psi)
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    w = g @ g.conj().T
    w /= np.trace(w).real
    mat = (1.0 - weight) * np.outer(psi, psi.conj()) + weight * w
    return DensityMatrix(mat)


def lemma1_campaign(n_instances: int, seed: int, dominance_slack: float = 1e-8) -> CampaignReport:
    """Random-instance dominance campaign for the trace-distance bound.

    Draws (term set, stage mixture, dt, input state) instances, evaluates the
    bound report for each, and records any instance whose observed increase
    exceeds the bound plus the slack, serialized for reproduction. Also
    tracks the best tightness ratios seen, plus exact commuting controls
    where bound and observed must both vanish.
    """
    if n_instances < 1:
        raise ValueError(f"need at least one instance, got {n_instances}")
    rng = np.random.default_rng(seed)
    violations: list[dict] = []
    best_ob = best_om = best_os = 0.0
    n_controls = 0

    for i in range(n_instances):
        if i % 25 == 24:
            ts, mix, dt = _control_instance(rng)
            psi = state_panel(ts.dim, 1, int(rng.integers(0, 2**31)))[0]
            rho0 = psi0 = pure_density(psi)
            scheme = "control"
            instance_seed = None
        else:
            d = int(rng.integers(2, 9))
            m = int(rng.integers(2, 4))
            instance_seed = int(rng.integers(0, 2**31))
            ts = random_termset(d, m, 1.0, instance_seed)
            dt = float(rng.uniform(0.01, 0.2))
            scheme = ("alg1", "alg2", "trotter", "strang")[int(rng.integers(0, 4))]
            if scheme == "alg1":
                mix = alg1_stage_mixture(ts, dt)
            elif scheme == "alg2":
                mix = alg2_stage_mixture(ts, dt)
            elif scheme == "trotter":
                mix = UnitaryMixture(((1.0, trotter_word(ts, dt, 1)),))
            else:
                mix = UnitaryMixture(((1.0, strang_word(ts, dt, 1)),))
            psi = state_panel(ts.dim, 1, int(rng.integers(0, 2**31)))[0]
            psi0 = pure_density(psi)
            if rng.random() < 0.5:
                rho0 = psi0
            else:
                rho0 = _random_mixed_state(rng, psi, float(rng.uniform(0.0, 0.3)))

        rep = lemma1_report(
            ts,
            mix,
            1,
            dt,
            rho0,
            psi0,
            metadata={
                "scheme": scheme,
                "d": ts.dim,
                "m": ts.m,
                "dt": dt,
                "K": 1,
                "seed": instance_seed,
            },
        )
        if rep.observed_raw > rep.bound + dominance_slack:
            violations.append(
                {
                    "index": i,
                    "scheme": scheme,
                    "dt": dt,
                    "report": rep.to_json(),
                    "termset": termset_to_json(ts),
                    "mixture": mixture_to_json(mix),
                }
            )
        if scheme == "control":
            n_controls += 1
        else:
            if rep.bound > 1e-12:
                best_ob = max(best_ob, rep.observed / rep.bound)
            if rep.mean_dev > 1e-12:
                best_om = max(best_om, rep.observed / rep.mean_dev)
            if rep.sq_dev > 1e-12:
                best_os = max(best_os, rep.observed / rep.sq_dev)

    return CampaignReport(
        n_instances=n_instances,
        seed=seed,
        violations=tuple(violations),
        best_observed_over_bound=best_ob,
        best_observed_over_mean_dev=best_om,
        best_observed_over_sq_dev=best_os,
        n_controls=n_controls,
    )


def _bisect_min_k(ev: SchemeEvaluator, eps: float, k_cap: int) -> int | None:
    """Smallest K with panel error <= eps, by doubling then bisection.

    Relies on the monotone decay of the error over the tested envelope.
    Returns None when eps is unreachable below the cap.
    """
    k = 1
    while ev.error(k) > eps:
        k *= 2
        if k > k_cap:
            return None
    lo, hi = max(1, k // 2), k
    while lo < hi:
        mid = (lo + hi) // 2
        if ev.error(mid) <= eps:
            hi = mid
        else:
            lo = mid + 1
    return lo


@dataclass(frozen=True)
class ScalingReport:
    """Fitted N(t) and N(1/eps) exponents per scheme, with all cells."""

    per_scheme: dict
    fixed_eps: float
    fixed_t: float

    def to_json(self) -> dict:
        return {
            "fixed_eps": self.fixed_eps,
            "fixed_t": self.fixed_t,
            "per_scheme": self.per_scheme,
        }


def scaling_cross_check(
    t_values=None,
    eps_values=DEFAULT_SCALING_EPS_GRID,
    *,
    schemes=SCHEMES,
    fixed_eps: float = 1e-4,
    fixed_t: float = 1.0,
    n_qubits: int = 2,
    couplings: tuple[float, float, float] = (1.0, 1.0, 1.0),
    seed: int = 7,
    panel_size: int = _PANEL_SIZE,
    k_cap: int = _BISECTION_K_CAP,
) -> ScalingReport:
    """Minimum exponential count versus t and versus 1/eps, with fits.

    For each scheme, bisects the smallest K reaching the target error, then
    fits log N against log t (expected exponent 2 for the first-order pair,
    3/2 for the second-order pair) and against log(1/eps) (expected 1 and
    1/2). ``t_values`` may be a sequence applied to every scheme or a mapping
    from scheme to its grid; by default each scheme uses its documented grid.
    Unreachable cells are reported, not raised.
    """
    ts = spin_chain_termset(n_qubits, *couplings)
    panel = state_panel(ts.dim, panel_size, seed)
    per_scheme: dict = {}
    for scheme in schemes:
        if t_values is None:
            t_grid = DEFAULT_SCALING_T_GRID[scheme]
        elif isinstance(t_values, dict):
            t_grid = t_values[scheme]
        else:
            t_grid = tuple(t_values)

        t_cells, failures = [], []
        for t in t_grid:
            ev = SchemeEvaluator(ts, scheme, t, panel)
            k = _bisect_min_k(ev, fixed_eps, k_cap)
            if k is None:
                failures.append({"t": t, "eps": fixed_eps, "reason": "k_cap"})
                continue
            t_cells.append({"t": t, "K": k, "N": ev.n_exponentials(k), "achieved": ev.error(k)})
        exponent_t = None
        if len(t_cells) >= 3:
            lx = np.log([c["t"] for c in t_cells])
            ly = np.log([c["N"] for c in t_cells])
            exponent_t = float(np.polyfit(lx, ly, 1)[0])

        eps_cells = []
        ev = SchemeEvaluator(ts, scheme, fixed_t, panel)
        for eps in eps_values:
            k = _bisect_min_k(ev, eps, k_cap)
            if k is None:
                failures.append({"t": fixed_t, "eps": eps, "reason": "k_cap"})
                continue
            eps_cells.append({"eps": eps, "K": k, "N": ev.n_exponentials(k), "achieved": ev.error(k)})
        exponent_eps = None
        if len(eps_cells) >= 2:
            lx = np.log([1.0 / c["eps"] for c in eps_cells])
            ly = np.log([c["N"] for c in eps_cells])
            exponent_eps = float(np.polyfit(lx, ly, 1)[0])

        per_scheme[scheme] = {
            "t_grid": list(t_grid),
            "t_cells": t_cells,
            "exponent_t": exponent_t,
            "eps_cells": eps_cells,
            "exponent_eps": exponent_eps,
            "expected": list(EXPECTED_EXPONENTS[scheme]),
            "failures": failures,
        }
    return ScalingReport(per_scheme=per_scheme, fixed_eps=fixed_eps, fixed_t=fixed_t)
