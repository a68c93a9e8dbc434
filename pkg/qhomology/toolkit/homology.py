import argparse
import json
import logging
import os
import sys
from typing import Any, Dict, Optional

from tabulate import tabulate

from ..errors import NotNilpotentError, QHomologyError
from ..linalg import ExactMatrix, nilpotent_profile
from ..ndiff import HDiffSpace, homology_dims_from_multiplicities, homology_report
from ..report import dump_json, validate_with_schema

logging.basicConfig(level=os.environ.get("QHOMOLOGY_LOGLEVEL"))
logger = logging.getLogger(__name__)


def read_matrix(matrix_file: Optional[str]) -> ExactMatrix:
    """Load a matrix file, or stdin when no file is given."""
    if matrix_file:
        with open(matrix_file, 'r') as f:
            text = f.read()
    else:
        text = sys.stdin.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise QHomologyError(f"matrix input is not JSON: {e}")
    validate_with_schema(data, "matrix")
    return ExactMatrix.from_json(data)


def compute_homology(M: ExactMatrix, h: int, k: Optional[int] = None) -> Dict[str, Any]:
    """dim H_(k) of (ctx^n, M) for one k or all k, cross-checked against the Jordan type of M."""
    if not M.is_square():
        raise QHomologyError(f"matrix of shape {M.shape} is not square")
    if h < 2:
        raise QHomologyError(f"height must be >= 2, got {h}")
    if k is not None and not 1 <= k <= h - 1:
        raise QHomologyError(f"k must lie in 1..{h - 1}")
    report = homology_report(HDiffSpace(h, M.rows, M))
    ks = [k] if k is not None else list(range(1, h))
    dims = [report.dims[kk - 1] for kk in ks]
    profile = nilpotent_profile(M, h)
    predicted = homology_dims_from_multiplicities(profile.multiplicities, h)
    predicted = [predicted[kk - 1] for kk in ks]
    result = report.to_json()
    result.update({"k": ks, "dims": dims, "ranks": list(profile.ranks),
                   "multiplicities": list(profile.multiplicities), "predicted": predicted,
                   "agree": dims == predicted})
    return result


def cmd_homology(matrix_file: Optional[str], h: Optional[int] = None, k: Optional[int] = None) -> Dict[str, Any]:
    """Read a matrix file and compute its homology; h defaults to the field height of the file."""
    M = read_matrix(matrix_file)
    h = h or M.ctx.h
    return compute_homology(M, h, k)


def format_text(result: Dict[str, Any]) -> str:
    rows = [[k, d, p] for k, d, p in zip(result["k"], result["dims"], result["predicted"])]
    table = tabulate(rows, ["k", "dim H_(k)", "from Jordan type"], tablefmt="grid")
    return f"{table}\nmultiplicities: {result['multiplicities']}"


def main():
    parser = argparse.ArgumentParser(description="Generalized homology Ker(d^k)/Im(d^(h-k)) of a matrix")
    parser.add_argument('matrix_file', nargs='?', help='Matrix JSON file (reads stdin when omitted)')
    parser.add_argument('--height', type=int, help='h with d^h = 0 (defaults to the field height of the file)')
    parser.add_argument('-k', type=int, help='Only this homology index', default=None)
    parser.add_argument('--format', choices=["text", "json"], default=os.getenv('QHOMOLOGY_FORMAT', 'json'))
    args = parser.parse_args()

    try:
        result = cmd_homology(args.matrix_file, args.height, args.k)
    except NotNilpotentError as e:
        logger.error(e)
        sys.exit(1)
    except (QHomologyError, OSError) as e:
        logger.error(e)
        sys.exit(2)

    if args.format == "json":
        print(dump_json(result, "homology"))
    else:
        print(format_text(result))
    sys.exit(0 if result["agree"] else 1)


if __name__ == "__main__":
    main()
