import argparse
import logging
import os
import random
import sys
from typing import Optional, Sequence

from ..cyclo import field_new
from ..linalg import ExactMatrix, inverse, jordan_nilpotent, random_unipotent
from ..report import dump_json

logging.basicConfig(level=os.environ.get("QHOMOLOGY_LOGLEVEL"))
logger = logging.getLogger(__name__)


def jordan_matrix(multiplicities: Sequence[int], field_height: Optional[int] = None,
                  seed: Optional[int] = None) -> ExactMatrix:
    """Nilpotent with the given Jordan multiplicities m_1..m_h, conjugated by a random unipotent when seeded."""
    ctx = field_new(field_height or max(len(multiplicities), 2))
    J = jordan_nilpotent(ctx, multiplicities)
    if seed is None:
        return J
    P = random_unipotent(ctx, J.rows, random.Random(seed))
    return P @ J @ inverse(P)


def main():
    parser = argparse.ArgumentParser(description="Emit a nilpotent matrix with a prescribed Jordan type as JSON")
    parser.add_argument('multiplicities', type=int, nargs='+', help='m_1 ... m_h: number of blocks of each size')
    parser.add_argument('--field-height', type=int, help='Height of the coefficient field (defaults to h)')
    parser.add_argument('--seed', type=int, help='Conjugate by a seeded random unipotent matrix', default=None)
    args = parser.parse_args()

    if any(m < 0 for m in args.multiplicities):
        logger.error("multiplicities must be non-negative")
        sys.exit(2)
    print(dump_json(jordan_matrix(args.multiplicities, args.field_height, args.seed).to_json(), "matrix"))


if __name__ == "__main__":
    main()
