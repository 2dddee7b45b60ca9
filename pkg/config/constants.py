"""
Configuration constants for the dyadic RBMO toolkit.

All magic numbers, tolerances, default parameters and user-facing messages
are defined here.
"""

# Numerical tolerances
BALL_TOLERANCE = 1e-12          # relative slack on closed-ball membership
PROJECTION_TOLERANCE = 1e-12
ORTHOGONALITY_TOLERANCE = 1e-10
ATOMIC_BLOCK_TOLERANCE = 1e-10
KADISON_SCHWARZ_TOLERANCE = 1e-10
RECONSTRUCTION_TOLERANCE = 1e-12
MASS_TOLERANCE = 1e-12
SCALAR_CONSISTENCY_TOLERANCE = 1e-12
SCALAR_CONSISTENCY_ATOMS = 8
UNITARY_INVARIANCE_TOLERANCE = 1e-10
ENDPOINT_SPLIT_TOLERANCE = 1e-9
TOLERANCE_KEYS = ("projection", "mass", "orthogonality")
JACOBI_TOLERANCE = 1e-12
JACOBI_MAX_SWEEPS = 100
POWER_ITERATION_TOLERANCE = 1e-10
POWER_ITERATION_MAX_STEPS = 2000
POWER_ITERATION_BLOCK = 4

# Lattice construction
TEST_MODE = "test"
PAPER_MODE = "paper"
DEFAULT_MODE = TEST_MODE
DEFAULT_ALPHA = 4.0
DEFAULT_ELL = 2
PAPER_MIN_ALPHA = 100.0
PAPER_ALPHA = 2 * 28 ** 2
DEFAULT_RADIUS_INDEX = 0
X0_RADIUS_FACTOR = 7.0 / 8.0
COVER_DILATION = 5.0
CONTAINMENT_DILATION = 28.0
MAX_GENERATIONS = 64
BOUNDARY_CONSTANT = 1.0
BOUNDARY_BALL_DILATION = 90.0
KEY_DECAY_EXPONENT = 10.0

# Filtration and spaces
PROPERTY_IV_DILATION = 56.0
TOLSA_DILATION = 2.0
TOLSA_EXACT_MAX_POINTS = 128
SUPPORTED_NORM_EXPONENTS = (1.0, 2.0)
JN_DEFAULT_STEPS = tuple(0.25 * i for i in range(41))
JN_MIN_DISTINCT_RATIOS = 3
DEFAULT_P_GRID = (1.0, 2.0, 4.0)

# Operators
DEFAULT_KERNEL = "cauchy"
DEFAULT_EPSILON = 0.0
DEFAULT_LIPSCHITZ_GAMMA = 1.0
DEFAULT_LIPSCHITZ_SAMPLES = 2000
SIZE_CONDITION_SLACK = 1e-12
LATTICE_MAXIMAL_DILATION = 56.0
CENTERED_MAXIMAL_DILATION = 5.0
DEFAULT_LAMBDA_GRID = (0.5, 1.0, 2.0, 4.0, 8.0)

# Sparse domination and weights
DEFAULT_SPARSE_LAMBDA = 0.3
SPARSE_LAMBDA_LOWER = 0.25
SPARSE_LAMBDA_UPPER = 0.5
STOPPING_MASS_FRACTION = 0.5
SPARSE_CERTIFICATE_CONSTANT = 2.0
DEFAULT_A2_ALPHA = 2.0
A2_SCALING_FACTOR = 4.0
DEFAULT_STEP_LEVELS = (1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0, 400.0)

# Matrix-valued analysis
DEFAULT_MATRIX_SIZE = 3
MAX_MATRIX_SIZE = 8
DEFAULT_HORMANDER_DILATION = 2.0

# Corpus and runs
DEFAULT_SEED = 0
DEFAULT_FIELD_COUNT = 20
DEFAULT_MATRIX_FIELD_COUNT = 5
DEFAULT_JOBS = 1
DEFAULT_UNIFORM_SIZE = 64
CANTOR_DEPTH = 5
GAUSSIAN_HALF_WIDTH = 4.0
SPIKE_FACTOR = 100.0
COMB_BLOCK = 4
COMB_THIN_FACTOR = 1e-3
BUILTIN_PREFIX = "builtin:"
CUSTOM_KERNEL_PREFIX = "custom:"
RIESZ_KERNEL_PREFIX = "riesz:"

# File formats
UTF8_ENCODING = "utf-8"
JSON_EXTENSION = ".json"
CSV_EXTENSION = ".csv"
YAML_EXTENSIONS = (".yaml", ".yml")
MEASURE_WEIGHT_COLUMN = "weight"
FIELD_VALUE_COLUMN = "value"
JSON_INDENT = 2

# CLI constants
DEFAULT_OUTPUT_FORMAT = "json"
DEFAULT_OUTPUT_DIR = "artifacts"
EXIT_OK = 0
EXIT_INVARIANT_FAILURE = 1
EXIT_USAGE_ERROR = 2
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

ARTIFACT_LATTICE = "lattice.json"
ARTIFACT_FILTRATION = "filtration.json"
ARTIFACT_NORMS = "norms.json"
ARTIFACT_JOHN_NIRENBERG = "john_nirenberg.csv"
ARTIFACT_APPLY = "apply.json"
ARTIFACT_CZD = "czd.json"
ARTIFACT_WEAK11 = "weak11.json"
ARTIFACT_SPARSE = "sparse_report.json"
ARTIFACT_A2_SWEEP = "a2_sweep.csv"
ARTIFACT_MATRIX_ENDPOINT = "matrix_endpoint.json"
ARTIFACT_SUMMARY = "summary.json"
ARTIFACT_FAILURE = "failure.json"

# Error Messages
ERROR_FILE_NOT_FOUND = "Input file not found"
ERROR_EMPTY_MEASURE = "Measure must contain at least one point"
ERROR_NONPOSITIVE_WEIGHT = "Measure weights must be strictly positive"
ERROR_MEASURE_PARSE = "Could not parse measure file"
ERROR_FIELD_LENGTH = "Field length does not match the number of support points"
ERROR_FIELD_MEASURE = "Field belongs to a different measure"
ERROR_EMPTY_INDEX_SET = "Index set must be nonempty"
ERROR_RADIUS = "Ball radius must be positive"
ERROR_ALPHA = "Dilation alpha must be greater than 1"
ERROR_FORCED_RADIUS = "Forced candidate radius is below half the largest candidate radius"
ERROR_NON_DOUBLING_ROOT = "Root cube is not (alpha, beta)-doubling; enlarge the coarse generation k_min"
ERROR_INVALID_LEVEL = "Invalid filtration level"
ERROR_ROOT_HAS_NO_PARENT = "The root atom has no parent"
ERROR_UNKNOWN_ATOM = "Cube is not an atom of the filtration"
ERROR_CONSTANT_FIELDS = "All fields are constant; the inclusion ratio is undefined"
ERROR_ZERO_NORM = "Field has zero norm"
ERROR_NEGATIVE_FIELD = "Calderon-Zygmund decomposition requires a nonnegative field"
ERROR_LAMBDA_TOO_SMALL = "Height lambda must exceed ||f||_1 / ||mu|| for a finite measure"
ERROR_LAMBDA_RANGE = "Oscillation parameter lambda out of range"
ERROR_SUPPORT = "Field must be supported in the starting cube"
ERROR_NONPOSITIVE_WEIGHT_FIELD = "Weight values must be strictly positive"
ERROR_A2_PARAMETERS = "A2 parameters require beta' > alpha'^d"
ERROR_NO_DOUBLING_BALL = "No doubling ball in the canonical family"
ERROR_DIMENSION_MISMATCH = "Operator and field dimensions do not match"
ERROR_UNKNOWN_KERNEL = "Unknown kernel specification"
ERROR_UNKNOWN_MEASURE = "Unknown builtin measure"
ERROR_MATRIX_SIZE = "Matrix size out of the supported range"
ERROR_INVALID_CONFIG = "Invalid run configuration"
ERROR_PAPER_MODE = "Paper mode requires alpha >= 100 and beta = alpha^(d+1)"
ERROR_YAML_UNAVAILABLE = "YAML configuration requires the 'pyyaml' package (pip install dyadic-rbmo[cli])"
ERROR_LATTICE_MEASURE = "Lattice file was built for a different measure"

# Success Messages
SUCCESS_LATTICE_BUILT = "Lattice built and verified"
SUCCESS_FILTRATION_VERIFIED = "Filtration verified"
SUCCESS_RUN_COMPLETED = "All asserted invariants passed"
