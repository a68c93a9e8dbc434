import argparse
import json
import logging
import os
import sys

from ..cache import cache_path, load_or_build
from ..constants import CACHE_DIR, DEFAULT_HEIGHTS
from ..errors import QHomologyError

logging.basicConfig(level=os.environ.get("QHOMOLOGY_LOGLEVEL"))
logger = logging.getLogger(__name__)


def build_models(heights, cache_dir, use_cache=True):
    """Build or load each model and summarize it."""
    summary = []
    for h in heights:
        model = load_or_build(h, cache_dir, use_cache)
        summary.append({"h": h, "dim_F": model.dim_F, "dim_H": model.dim_H, "dim_H_I": model.H_I.dim,
                        "path": str(cache_path(cache_dir, h))})
    return summary


def main():
    parser = argparse.ArgumentParser(description="Build the zero-mode models and store them in the cache")
    parser.add_argument('--height', action='append', type=int, help='Height h >= 2 (repeatable)')
    parser.add_argument('--cache-dir', help='Model cache directory', default=CACHE_DIR)
    parser.add_argument('--no-cache', action='store_true', help='Rebuild even when a cached model exists')
    args = parser.parse_args()

    if not args.cache_dir:
        logger.error("no cache directory; pass --cache-dir or set QHOMOLOGY_CACHE_DIR")
        sys.exit(2)
    try:
        summary = build_models(args.height or DEFAULT_HEIGHTS, args.cache_dir, not args.no_cache)
    except QHomologyError as e:
        logger.error(f"Failed to build model: {e}")
        sys.exit(1)
    print(json.dumps(summary, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
