import argparse
import logging
import os
import sys

from tabulate import tabulate

from ..ndiff import Feasibility, feasibility
from ..report import dump_json

logging.basicConfig(level=os.environ.get("QHOMOLOGY_LOGLEVEL"))
logger = logging.getLogger(__name__)


def cmd_feasibility(dim: int, h: int) -> Feasibility:
    """Feasibility verdict for (dim, h) with every witness Jordan type."""
    result = feasibility(dim, h)
    logger.info("dim %d, h %d: %d witness(es)", dim, h, len(result.witnesses))
    return result


def format_text(result: Feasibility) -> str:
    verdict = "feasible" if result.feasible else "infeasible"
    lines = [f"dim {result.dim}, h {result.h}: {verdict}"]
    if result.witnesses:
        headers = [f"m_{n}" for n in range(1, result.h + 1)]
        lines.append(tabulate(result.witnesses, headers, tablefmt="grid"))
    return "\n".join(lines)


def main():
    parser = argparse.ArgumentParser(
        description="Can an h-nilpotent operator on a space of this dimension have every homology one-dimensional?")
    parser.add_argument('dim', type=int, help='Total dimension')
    parser.add_argument('h', type=int, help='Height h >= 2')
    parser.add_argument('--format', choices=["text", "json"], default=os.getenv('QHOMOLOGY_FORMAT', 'json'))
    args = parser.parse_args()

    try:
        result = cmd_feasibility(args.dim, args.h)
    except ValueError as e:
        logger.error(e)
        sys.exit(2)

    if args.format == "json":
        print(dump_json(result.to_json(), "feasibility"))
    else:
        print(format_text(result))


if __name__ == "__main__":
    main()
