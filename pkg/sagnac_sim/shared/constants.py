import math
import os

# SI definition, exact
SPEED_OF_LIGHT = 299_792_458.0

DEFAULT_GROUP_INDEX = 1.468

# Ge APD heralding detector saturates above 120 kcounts/s
HERALD_RATE_LIMIT_HZ = 1.2e5
# stage limit of the rotating plane
OMEGA_MAX_LIMIT = 10.0
MAX_RESIDUAL_MASS = 1e-3
# quoted P(0), P(1), P(2) are rounded; the unassigned remainder is vacuum
MAX_VACUUM_SLACK = 0.05
MAX_DARK_PROB_PER_GATE = 0.5

REFERENCE_FIBER_LENGTH_M = 550.0
REFERENCE_COIL_DIAMETER_M = 0.2
REFERENCE_WAVELENGTH_M = 1550e-9
REFERENCE_HERALD_RATE_HZ = 1e5
REFERENCE_PHOTON_PROBS = (0.81, 0.17, 5e-3)
REFERENCE_APD_EFFICIENCY = 0.1
REFERENCE_DARK_PROB_PER_NS = 5e-5
REFERENCE_GATE_NS = 5.0
REFERENCE_TURNS = 40.0
REFERENCE_RECORD_DURATION_S = 60.0
REFERENCE_BIN_TIME_S = 0.3
REFERENCE_N_RECORDS = 5
REFERENCE_OMEGA_GRID_STEP = 0.1

# sensitivity of a classical gyroscope, used as the reference target
CLASSICAL_FOG_SIGMA_RAD = 1e-6
# best-case count rate of current APDs
APD_RATE_LIMIT_HZ = 1e7
STANDARD_SENSITIVITY_RATES_HZ = (2e4, 1e5, 1e6, 1e7)

TWO_PI = 2.0 * math.pi

FIT_MAX_NFEV = 500
FIT_XTOL = 1e-9
MIN_FIT_POINTS = 8

CSV_FLOAT_FORMAT = "%.17g"

# read at call time so a running process can be re-pointed
THREADS_ENV = "SAGNAC_SIM_THREADS"
CACHE_DIR_ENV = "SAGNAC_SIM_CACHE_DIR"

SAGNAC_SIM_LOG_LEVEL = os.getenv("SAGNAC_SIM_LOG_LEVEL") or "WARNING"
