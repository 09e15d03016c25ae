from dotenv import load_dotenv, find_dotenv
import os

load_dotenv(find_dotenv())
TOL_RANK = os.environ.get("FIXEDSPACE_TOL_RANK")
TOL_FIXED = os.environ.get("FIXEDSPACE_TOL_FIXED")
TOL_SPEC = os.environ.get("FIXEDSPACE_TOL_SPEC")
TOL_CERT = os.environ.get("FIXEDSPACE_TOL_CERT")
SEED = os.environ.get("FIXEDSPACE_SEED")
SAMPLES = os.environ.get("FIXEDSPACE_SAMPLES")
LOG_LEVEL = os.environ.get("LOG_LEVEL")
