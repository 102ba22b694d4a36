RANK_RTOL = 1e-12
"""Relative singular-value threshold for numerical rank (scaled by max(dim) and sigma_max)."""

SYMMETRY_RTOL = 1e-12
"""Allowed ||S - S^T|| relative to ||S|| for matrices declared symmetric."""

PSD_RTOL = 1e-10
"""Eigenvalues above -PSD_RTOL * lambda_max are rounding noise and get clamped to zero."""

INVERSE_SQRT_MIN_RATIO = 1e-12
"""Smallest lambda_min / lambda_max accepted before an inverse square root is refused."""

ISOTROPY_RTOL = 1e-8
"""Frobenius tolerance for a candidate family to count as summing to the identity."""

BOUND_ATOL = 1e-8
"""Absolute slack on every epsilon bound check."""

SELECTION_RTOL = 1e-10
"""Relative slack when accepting an index whose upper gain slightly exceeds its lower gain."""

SCALE_FLOOR = 1e-300
"""Scalings at or below this value are treated as zero and dropped from schedules."""

DEFAULT_MEMORY_BUDGET_ENTRIES = 50_000_000
"""Maximum number of float entries an assembled block matrix may hold."""

BUDGET_ROUNDING_WARN_RATIO = 0.01
"""Warn when flooring d*t moves the theoretical epsilon by more than this fraction."""

CSV_SIGNIFICANT_DIGITS = 6
"""Significant digits written to sweep and heatmap CSV cells."""

DEFAULT_SAMPLING_INTERVAL = 0.2
"""Default zero-order-hold sampling interval in seconds for the swing demo."""

DEFAULT_SWING_SEED = 39
"""Seed for the generated swing-equation parameters."""

DEFAULT_RANDOM_SPECTRAL_RADIUS = 0.9
"""Spectral radius the random system generator rescales A to."""

METRIC_SPOT_CHECKS = 16
"""Random trials used to check homogeneity and monotonicity of a registered metric."""

DEFAULT_OUTPUT_FILE_MODE = 0o644
"""Default permissions for schedules, reports and CSV grids."""

DEFAULT_THREADS = 1
"""Default number of sweep cells computed concurrently."""
