"""splitsim: a desk-scale lab for positive-time product-formula simulation.

Simulates exp(-iHt) for H = H_1 + ... + H_m by products of single-term
exponentials with strictly positive durations, deterministically (plain and
palindromic splitting) and randomized (per-stage mixtures evaluated exactly as
mixed-unitary channels). Measures exact trace-distance error, evaluates the
mixture error bound, audits the third-order coefficient obstruction and
reproduces the N = Theta(t^2/eps) and N = Theta(t^{3/2} eps^{-1/2}) cost
scalings.
"""

from .matkernel import (
    DensityMatrix,
    expm_hermitian,
    hermitian_eig,
    kron,
    maximally_mixed,
    pure_density,
    spectral_norm,
    trace_distance,
    trace_norm,
)
from .hamiltonians import (
    TermSet,
    random_termset,
    spin_chain_termset,
    termset_from_json,
    termset_to_json,
    total,
)
from .schedules import (
    UnitaryMixture,
    Word,
    alg1_stage_mixture,
    alg2_stage_mixture,
    sample_schedule,
    strang_word,
    trotter_word,
    word_unitary,
)
from .channels import (
    BoundReport,
    Superoperator,
    apply_channel,
    channel_power,
    exact_evolution,
    expected_sq_deviation,
    lemma1_report,
    mean_unitary,
    mixture_superoperator,
)
from .series import (
    InterleavingProfile,
    TruncatedSeries,
    exact_series,
    exp_step_series,
    interleaving_profile,
    mixture_mean_series,
    s_value,
    series_mul,
    third_order_pair_sum,
    word_series,
)
from .bounds import (
    Lemma2Result,
    ScheduleAudit,
    audit_schedule,
    lemma2_max,
    lemma2_uniform_value,
    min_exponentials,
)
from .harness import (
    RunConfig,
    SweepResult,
    fit_loglog,
    lemma1_campaign,
    scaling_cross_check,
    sweep_error_vs_K,
)

__version__ = "0.1.0"
