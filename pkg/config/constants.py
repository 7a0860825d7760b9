"""Configuration constants"""

# Normalization and validation tolerances
NORM_TOLERANCE = 1e-12
HERMITIAN_TOLERANCE = 1e-12
TRACE_TOLERANCE = 1e-10
PSD_TOLERANCE = 1e-10
IMAGINARY_RESIDUE_TOLERANCE = 1e-10

# Conditioning thresholds
IMPROBABLE_PROBABILITY = 1e-14
IMPOSSIBLE_EVIDENCE = 1e-300
FULL_REFLECTION_TOLERANCE = 1e-24

# Truncation
SQUEEZE_TAIL_TOLERANCE = 1e-10
TRUNCATION_HEADROOM = 8
LADDER_TRUNCATION_TOLERANCE = 1e-12
MAX_AUTO_N_MAX = 4000

# Combinatorics (exact integers below, log-gamma above)
EXACT_FACTORIAL_LIMIT = 20
LOG_SPACE_COEFF_LIMIT = 30

# Beam splitter blocks: binomial sum up to this total photon number, expm above
# (alternating terms lose ~2^(N/2) relative accuracy at theta = pi/4)
BINOMIAL_BLOCK_LIMIT = 24
BLOCK_CACHE_SIZE = 256

# Special functions
SERIES_RELATIVE_TOLERANCE = 1e-16
SERIES_MAX_TERMS = 1_000_000
HYPERGEOMETRIC_TRANSFORM_THRESHOLD = 0.75

# Analytic closed forms
FOCK_FALLBACK_KAPPA = 1e-6

# Detection
PRIOR_CUMULATIVE_TARGET = 1.0 - 1e-10
MAX_PRIOR_COUNT = 400
EXACT_CHOPPING_LIMIT = 20

# Phase-space grids
DEFAULT_GRID_MIN = -4.0
DEFAULT_GRID_MAX = 4.0
DEFAULT_GRID_POINTS = 81
DEFAULT_SLICE_POINTS = 400
DEFAULT_MAX_WORKERS = 8

# Artifacts
CSV_FLOAT_FORMAT = ".17g"
SCHEMA_VERSION = 1
DEFAULT_LOG_FILE = "data/catgen.log"
DEFAULT_OUTPUT_DIR = "output"
LOG_MAX_BYTES = 10 * 1024 * 1024
LOG_BACKUP_COUNT = 5

# Comparison
DEFAULT_COMPARE_TOLERANCE = 1e-6
HUSIMI_COMPARE_TOLERANCE = 1e-8

# Exit codes
EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DOMAIN = 2
EXIT_IMPROBABLE = 3
EXIT_TOLERANCE = 4

# Error messages
ERROR_KAPPA_DOMAIN = "Squeeze parameter must satisfy |kappa| < 1"
ERROR_FOCK_RANGE = "Photon number exceeds truncation n_max"
ERROR_NEGATIVE_COUNT = "Photon counts must be non-negative"
ERROR_ZERO_NORM = "Cannot normalize a zero vector"
ERROR_IMPROBABLE = "Conditioning outcome has vanishing probability"
ERROR_IMPOSSIBLE_EVENT = "Detector event has vanishing evidence"
ERROR_NO_CONVERGENCE = "Series did not converge"
ERROR_DELTA_DOMAIN = "Quadrature width Delta must be positive"
ERROR_COINCIDENCE_RANGE = "Coincidence count k must not exceed channel count N"
ERROR_EFFICIENCY_RANGE = "Detector efficiency must be in (0, 1]"
ERROR_SUCCESS_RANGE = "Binomial success probability must be in (0, 1)"
ERROR_CHANNEL_COUNT = "Detector needs at least one channel"
ERROR_NOT_HERMITIAN = "Density matrix must be Hermitian"
ERROR_SHAPE_MISMATCH = "Operands have incompatible truncation"
ERROR_SCHEMA_VERSION = "Unsupported or missing schema_version"
ERROR_CONFIG_NOT_FOUND = "Config file not found"
ERROR_MISSING_KEY = "Missing required config key"
ERROR_BAD_VALUE = "Invalid config value"
ERROR_UNKNOWN_KEY = "Unknown config key"
