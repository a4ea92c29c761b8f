# Presets for the passing transformations
PRESET_IRR = "irr"
PRESET_SPAN = "span"
PRESET_SPAN_BC_EQUAL = "span-bc-equal"
PRESETS = [PRESET_IRR, PRESET_SPAN, PRESET_SPAN_BC_EQUAL]

# Curve constraints
MIN_GENUS = 6  # presets need two identity cuts after the five special ones
MIN_IDENTITY_CUTS = 2
MIN_N = 3

# Certificate names
CHECK_DIMENSION = "dimension"
CHECK_SPAN = "span"
CHECK_IRREDUCIBILITY = "irreducibility"
CHECK_JORDAN = "jordan"
CHECK_SYMPLECTIC = "symplectic"
CHECK_BRAID = "braid"
CHECK_LIE_CLOSURE = "lie_closure"
CHECK_SEPARATION = "component_separation"
CHECK_NO_CHARACTERS = "no_characters"
CHECK_OPEN_ORBIT = "open_orbit"
CHECK_NONCOMPACTNESS = "noncompactness"
CHECK_AD_REGULAR = "ad_regular"
CHECK_HEISENBERG_COMPARISON = "heisenberg_comparison"
ALL_CHECKS = [
    CHECK_DIMENSION,
    CHECK_SPAN,
    CHECK_IRREDUCIBILITY,
    CHECK_JORDAN,
    CHECK_SYMPLECTIC,
    CHECK_BRAID,
    CHECK_AD_REGULAR,
    CHECK_HEISENBERG_COMPARISON,
    CHECK_LIE_CLOSURE,
    CHECK_SEPARATION,
    CHECK_NO_CHARACTERS,
    CHECK_OPEN_ORBIT,
    CHECK_NONCOMPACTNESS,
]

# Certificate statuses
STATUS_PASS = "PASS"
STATUS_FAIL = "FAIL"
STATUS_INCONCLUSIVE = "INCONCLUSIVE"

# Output formats
FORMAT_JSON = "json"
FORMAT_CSV = "csv"

# Exit codes
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

# Report metadata
TOOL_NAME = "dihedral-monodromy"

# Modular engine
MODULAR_PRIME_START = 16_000_000  # p < 2^25 keeps products of two residues below 2^50
MODULAR_PRIME_LIMIT = 1 << 25
MODULAR_ACCUMULATE_BITS = 62  # partial sums in int64 stay below 2^62 before reduction

# Lie closure engines
ENGINE_MODULAR = "modular"
ENGINE_EXACT = "exact"

# Randomness
DEFAULT_SEED = 7
RANDOM_COEFF_RANGE = 5  # random vectors use integer coordinates in [-5, 5]

# Noncompactness search
DEFAULT_MAX_WORD_LENGTH = 0  # 0 disables the search
SEARCH_SAMPLES_PER_LENGTH = 40
NUMERIC_UNIT_TOLERANCE = 1e-6  # screening threshold for | |λ| - 1 |
INTERVAL_PRECISION_BITS = 200


# Component separation: E = A_(2,i) A_(1,2) A_(2,j) A_(1,2) for these (i, j)
SEPARATION_PAIRS = [(11, 7), (11, 9), (9, 7)]
SEPARATION_TRACE_DIVISOR = 4  # trace(E) is 4 times the closed formula
START_LOOP = (2, 11)  # irreducibility starts from v L_(2,11)
