"""
Runtime configuration for the differential-algebra toolkit.
All knobs are read from the environment once, at import time.
"""

import logging
import os

# Logging
LOG_LEVEL = getattr(logging, os.getenv("DDH_LOG_LEVEL", "INFO").upper(), logging.INFO)
LOG_FILE = os.getenv("DDH_LOG_FILE") or None

# Step budget for the saturation (Groebner) fallback of the coherence check
GROEBNER_BUDGET = int(os.getenv("DDH_GROEBNER_BUDGET", "5000"))

# Worker count for independent lifts and per-basis-index solves
N_JOBS = int(os.getenv("DDH_N_JOBS", "1"))

# Seeded sampling used by structure checks
SAMPLE_SEED = int(os.getenv("DDH_SAMPLE_SEED", "42"))
SAMPLE_BUDGET = int(os.getenv("DDH_SAMPLE_BUDGET", "20"))

DEFAULT_SOLVER = os.getenv("DDH_DEFAULT_SOLVER", "exact:deg=2")
