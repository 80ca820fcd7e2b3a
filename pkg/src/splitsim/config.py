"""Shared numerical tolerances and reproducibility constants.

Every tolerance used by validation checks lives here so the numbers are
configuration, not magic literals scattered through the code.
"""

# Hermiticity checks: looser on caller-supplied matrices, tighter on matrices
# this package constructs itself.
HERMITIAN_INPUT_ATOL = 1e-8
HERMITIAN_OUTPUT_ATOL = 1e-10

# Density-matrix validation (Hermiticity, unit trace, positivity).
DENSITY_ATOL = 1e-10
# Channel outputs accumulate a little extra floating-point noise.
CHANNEL_OUTPUT_ATOL = 1e-9

# Mixture probabilities must sum to one within this.
PROBABILITY_SUM_ATOL = 1e-12

# Per-term duration totals must equal one unit stage within this before
# third-order coefficients are extracted or audited.
NORMALIZATION_ATOL = 1e-9

# Coordinate-ascent polish stops once a full sweep of pair moves improves the
# objective by less than this.
POLISH_IMPROVEMENT_TOL = 1e-10

# Sweep errors below this floor mean the instance is effectively commuting and
# slope fits would be meaningless.
COMMUTING_ERROR_FLOOR = 1e-12

# All pairwise commutators of a random term draw below this marks the draw as
# degenerate (every splitting would be exact).
DEGENERATE_COMMUTATOR_FLOOR = 1e-6

# All seeded randomness goes through numpy's default_rng (PCG64) so results
# replicate bit-for-bit across platforms.
RNG_NAME = "numpy-PCG64"

# Documented envelope: dense superoperators reach dim**2 = 4096 at dim 64.
SUPPORTED_MAX_DIM = 64
