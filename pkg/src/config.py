import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()


def _optional_int(name: str):
    value = os.getenv(name)
    if value is None or value.strip() == "":
        return None
    return int(value)


# Exact-path caps - Set via environment variables
MAX_CANTOR_DEPTH = int(os.getenv("CANTOR_EI_MAX_DEPTH", "20"))
MAX_DENOMINATOR_BITS = int(os.getenv("CANTOR_EI_MAX_DENOMINATOR_BITS", "4096"))
MAX_MATRIX_ROWS = int(os.getenv("CANTOR_EI_MAX_MATRIX_ROWS", "2000000"))
MAX_OPERATIONS = _optional_int("CANTOR_EI_MAX_OPERATIONS")

# Simulation defaults
DEFAULT_LADDER_CAP = int(os.getenv("CANTOR_EI_LADDER_CAP", "100"))
DEFAULT_BURN_IN = int(os.getenv("CANTOR_EI_BURN_IN", "1000"))
ORBIT_BATCH_SIZE = int(os.getenv("CANTOR_EI_BATCH_SIZE", "64"))
DEFAULT_THREADS = int(os.getenv("CANTOR_EI_THREADS", str(os.cpu_count() or 1)))

# Spectral radius
POWER_ITERATION_TOL = float(os.getenv("CANTOR_EI_POWER_TOL", "1e-10"))
POWER_ITERATION_MAX_ITER = int(os.getenv("CANTOR_EI_POWER_MAX_ITER", "100000"))

ARTIFACT_NAME = "cantor-ei"
