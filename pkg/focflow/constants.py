"""
Numerical defaults, thresholds and file-format constants for focflow.
Every tunable number used by the library lives here so that runs, sweeps and
the acceptance suite agree on one set of values.
"""

import math

PI = math.pi
TWO_PI = 2 * math.pi

# Grid chart
MIN_NODES_PER_AXIS = 8
DEFAULT_NODES = 64
DEFAULT_PERIOD = TWO_PI
MAX_SPECTRAL_ORDER = 4

# Curvature
M_MAX = 4
MAX_VALENCE = 4 + M_MAX
SYMMETRY_DEFECT_WARN = 1e-6
BIANCHI_TOLERANCE = 1e-9

# Time integration
DEFAULT_TOLERANCE = 1e-8
DEFAULT_DT0 = 1e-4
DT_MIN = 1e-12
DT_MAX = 1e-1
STEP_SAFETY = 0.9
STEP_GROWTH_MAX = 2.0
STEP_SHRINK_MIN = 0.2
EXPLICIT_KAPPA = 0.05
IMEX_REFRESH_DRIFT = 2.0
MAX_STEPS = 2_000_000

# Diagnostics thresholds
SYSTOLE_COLLAPSE_FRACTION = 0.05
CRITICALITY_FACTOR = 1e-6
BLOWUP_FACTOR = 10.0
CURVATURE_SPIKE_FACTOR = 2.0
MIN_DETECTOR_STEPS = 20
CURVATURE_CAP_FACTOR = 100.0
BUDGET_RTOL = 1e-3
DISTANCE_SLACK_SPACINGS = 2.0
EQUIVALENCE_TOLERANCE = 1e-12

# Snapshot / report formats
SNAPSHOT_MAGIC = b"FOCF1"
SNAPSHOT_SUFFIX = ".focf"
TRAJECTORY_MANIFEST = "trajectory.manifest"
RUN_MANIFEST = "manifest.json"
TIMESERIES_CSV = "timeseries.csv"
SWEEP_SUMMARY_CSV = "sweep_summary.csv"
CSV_SCHEMA_VERSION = "focflow-timeseries-v1"

# Exit codes
EXIT_OK = 0
EXIT_BAD_CONFIG = 2
EXIT_SINGULARITY = 3
EXIT_MONITOR_FAILURE = 4
EXIT_RUNTIME_ERROR = 5
