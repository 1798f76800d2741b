import os
from pathlib import Path

# Output configuration
RESULTS_PATH = Path(os.getenv("SEQTEST_RESULTS_PATH", "./results"))
SOLUTIONS_PATH = RESULTS_PATH / "solutions"
EXPERIMENTS_PATH = RESULTS_PATH / "experiments"

# Logging
LOG_LEVEL = os.getenv("SEQTEST_LOG_LEVEL", "WARNING").upper()

# Monte Carlo workers (default for `simulate --threads`)
DEFAULT_THREADS = max(1, int(os.getenv("SEQTEST_THREADS", "1")))

# Largest number of lattice indices any enumeration may materialize
SUPPORT_CAP = int(os.getenv("SEQTEST_SUPPORT_CAP", str(10_000_000)))

# Extremal solver
SOLVER_RTOL = 1e-10
RESIDUAL_RTOL = 1e-8
GRID_POINTS = 64
MAX_BRACKET_EXPANSIONS = 200
BRACKET_EXPANSION_FACTOR = 4.0

# Monte Carlo
MIN_REPORTED_REPLICATIONS = 100
REPLICATION_CHUNK = 256

# Default rate sweep: eps = 2^-4, ..., 2^-12
DEFAULT_RATE_EPSILONS = tuple(2.0 ** -k for k in range(4, 13))

# Numeric integration oracle
QUADRATURE_EPSABS = 1e-10
QUADRATURE_EPSREL = 1e-10

LIBRARY_VERSION = "0.3.0"
