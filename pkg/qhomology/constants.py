import os

VERSION = "0.2.0"
SCHEMA_TAG = "qhomology/1"
CACHE_FORMAT_VERSION = 1

HEIGHT = os.getenv('QHOMOLOGY_HEIGHT')
SUITE = os.getenv('QHOMOLOGY_SUITE')
SEED = os.getenv('QHOMOLOGY_SEED')
TRIALS = os.getenv('QHOMOLOGY_TRIALS')
OUTPUT_FORMAT = os.getenv('QHOMOLOGY_FORMAT')
TEMPLATE = os.getenv('QHOMOLOGY_TEMPLATE', 'report')
ELIMINATION = os.getenv('QHOMOLOGY_ELIMINATION', 'sparse')
TUPLE_CAP = int(os.getenv('QHOMOLOGY_TUPLE_CAP', 4096))
HOCHSCHILD_MAX_HEIGHT = int(os.getenv('QHOMOLOGY_HOCHSCHILD_MAX_HEIGHT', 3))
QHOMOLOGY_DIR = f"{os.getcwd()}/.qhomology" if os.path.exists(f"{os.getcwd()}/.qhomology") else os.getenv('QHOMOLOGY_DIR')
CACHE_DIR = os.getenv('QHOMOLOGY_CACHE_DIR')

DEFAULT_HEIGHTS = [2, 3]
SUITES = ["relations", "theorem0", "section3", "theorem1", "hochschild"]

DEFAULT_SEED = 0
DEFAULT_TRIALS = 100
DEFAULT_FORMAT = "text"
FORMATS = ["text", "json"]
