"""Run verification suites for one height in dependency order."""
import logging
import random
import time
from typing import Dict, List, Optional, Sequence

from .cache import load_or_build
from .constants import CACHE_DIR, HOCHSCHILD_MAX_HEIGHT, SUITES, TUPLE_CAP
from .errors import InvalidHeightError, QHomologyError
from .hochschild import verify_hochschild, verify_theorem1
from .linalg import nilpotent_profile, random_nilpotent
from .ndiff import (HDiffSpace, feasibility, gen_homology, homology_dims_from_multiplicities,
                    witness_space)
from .report import Check, SuiteReport
from .wznw import ZeroModeModel, profile_on_H, verify_matrix_relations, verify_theorem0

logger = logging.getLogger(__name__)

ORACLE_TRIALS = 200


class HochschildRefused(QHomologyError):
    def __init__(self, h: int):
        super().__init__(f"hochschild suite refused for h={h} (limit {HOCHSCHILD_MAX_HEIGHT}); "
                         f"{hochschild_estimate(h)}; pass --force to run it anyway")
        self.h = h


def hochschild_estimate(h: int) -> str:
    dim_H = h ** 4
    return f"dim H = {dim_H}, operators on H are {dim_H}x{dim_H}, image algebra dimension up to {h ** 6}"


def select_suites(requested: Optional[Sequence[str]]) -> List[str]:
    """Expand 'all' and sort the requested suites into dependency order."""
    names = set(requested or ["all"])
    if "all" in names:
        return list(SUITES)
    unknown = names - set(SUITES)
    if unknown:
        raise QHomologyError(f"unknown suite(s): {', '.join(sorted(unknown))}")
    return [s for s in SUITES if s in names]


def verify_section3(model: ZeroModeModel, seed: int = 0, oracle_trials: int = ORACLE_TRIALS) -> SuiteReport:
    """Why H itself cannot carry the physical homology, and the Jordan-type oracle on random nilpotents."""
    ctx, h = model.ctx, model.h
    report = SuiteReport("section3", h, seed=seed)
    profile = profile_on_H(model)
    report.add(Check.of("section3.profile.predicted", profile["predicted"] == profile["dims"], profile))
    report.add(Check.of("section3.profile.not_physical", profile["dims"] != [1] * (h - 1), {"dims": profile["dims"]}))

    full = feasibility(model.dim_H, h)
    report.add(Check.of("section3.feasibility.H", not full.feasible, full.to_json()))
    small = feasibility(2 * h - 1, h)
    expected = [0] * h
    expected[h - 2] += 1
    expected[h - 1] += 1
    report.add(Check.of("section3.feasibility.H_I", small.feasible and expected in small.witnesses, small.to_json()))
    dims = [gen_homology(witness_space(ctx, expected), k, representatives=False)[0] for k in range(1, h)]
    report.add(Check.of("section3.witness", dims == [1] * (h - 1), {"dims": dims}))

    rng = random.Random(seed)
    bad = None
    for t in range(oracle_trials):
        dim = rng.randint(1, 8)
        N, m = random_nilpotent(ctx, dim, h, rng)
        space = HDiffSpace(h, dim, N)
        direct = [gen_homology(space, k, representatives=False)[0] for k in range(1, h)]
        predicted = homology_dims_from_multiplicities(nilpotent_profile(N, h).multiplicities, h)
        if direct != predicted:
            bad = {"trial": t, "multiplicities": m, "direct": direct, "predicted": predicted}
            break
    report.add(Check.of("section3.oracle", bad is None, bad, f"{oracle_trials} random nilpotents"))
    report.data = {"multiplicities": profile["multiplicities"], "dims_on_H": profile["dims"],
                   "ranks": profile["ranks"]}
    return report


def run_suite(name: str, model: ZeroModeModel, seed: int, trials: int, cap: int) -> SuiteReport:
    if name == "relations":
        return verify_matrix_relations(model)
    if name == "theorem0":
        return verify_theorem0(model)
    if name == "section3":
        return verify_section3(model, seed, max(trials * 2, ORACLE_TRIALS))
    if name == "theorem1":
        return verify_theorem1(model, seed)
    if name == "hochschild":
        return verify_hochschild(model, trials, seed, cap)
    raise QHomologyError(f"unknown suite {name!r}")


def run_suites(h: int, suites: Sequence[str], seed: int = 0, trials: int = 100, cache_dir: Optional[str] = CACHE_DIR,
               use_cache: bool = True, force: bool = False, cap: int = TUPLE_CAP) -> List[SuiteReport]:
    """Build (or load) the model for h and run the selected suites in order."""
    if not isinstance(h, int) or h < 2:
        raise InvalidHeightError(h)
    names = select_suites(suites)
    if "hochschild" in names and h > HOCHSCHILD_MAX_HEIGHT and not force:
        raise HochschildRefused(h)
    model = load_or_build(h, cache_dir, use_cache)
    reports: Dict[str, SuiteReport] = {}
    for name in names:
        start = time.perf_counter()
        logger.info("h=%d: running suite %s", h, name)
        report = run_suite(name, model, seed, trials, cap)
        report.elapsed = time.perf_counter() - start
        reports[name] = report
    if "theorem1" in reports and "hochschild" in reports:
        dims1 = reports["theorem1"].data.get("dims")
        dims2 = reports["hochschild"].data.get("theorem2")
        reports["hochschild"].add(Check.of("theorem2.matches_theorem1", dims1 == dims2,
                                           {"theorem1": dims1, "theorem2": dims2}))
    return [reports[name] for name in names]
