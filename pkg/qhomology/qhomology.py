import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from tabulate import tabulate

from .constants import *
from .errors import QHomologyError
from .report import Report, load_yaml_file, render_report
from .suites import HochschildRefused, run_suites, select_suites

PRESETS_DIR = "presets"
CONFIG_FILE_EXTENSION = ".yml"

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

# Configure logging
logging.basicConfig(level=os.environ.get("QHOMOLOGY_LOGLEVEL"))
logger = logging.getLogger(__name__)


class UsageError(QHomologyError):
    """Bad flags, preset or configuration."""


def list_available_presets(qhomology_dir: Optional[str]) -> None:
    """Print the presets under <qhomology_dir>/presets in a table."""
    if not qhomology_dir or not os.path.isdir(f"{qhomology_dir}/{PRESETS_DIR}"):
        raise UsageError("no preset directory; create .qhomology/presets or set QHOMOLOGY_DIR")
    directory = f"{qhomology_dir}/{PRESETS_DIR}"
    headers = ["name", "description", "heights", "suites"]
    table_data = []
    for path in sorted(str(f) for f in Path(directory).rglob(f"*{CONFIG_FILE_EXTENSION}") if f.is_file()):
        data = load_yaml_file(path) or {}
        name = path.replace(f"{directory}/", "").replace(CONFIG_FILE_EXTENSION, "")
        table_data.append([name, data.get("description"), data.get("heights"), data.get("suites")])
    print("Available presets:")
    print(tabulate(table_data, headers, tablefmt="grid"))


def load_preset(name: str, qhomology_dir: Optional[str]) -> Dict[str, Any]:
    path = f"{qhomology_dir}/{PRESETS_DIR}/{name}{CONFIG_FILE_EXTENSION}"
    if not qhomology_dir or not os.path.exists(path):
        raise UsageError(f"preset '{name}' not found")
    try:
        data = load_yaml_file(path)
    except Exception as e:
        raise UsageError(f"preset '{name}' could not be read: {e}")
    if not isinstance(data, dict):
        raise UsageError(f"preset '{name}' is not a mapping")
    return data


def parse_heights(values) -> Optional[List[int]]:
    """Heights from repeated flags, a comma-separated string or a list."""
    if values is None:
        return None
    if isinstance(values, (str, int)):
        values = [values]
    heights = []
    for v in values:
        for part in str(v).split(","):
            if part.strip():
                try:
                    heights.append(int(part))
                except ValueError:
                    raise UsageError(f"height {part!r} is not an integer")
    for h in heights:
        if h < 2:
            raise UsageError(f"height must be an integer >= 2, got {h}")
    return heights


def resolve_config(args: argparse.Namespace, preset: Dict[str, Any]) -> Dict[str, Any]:
    """Flags (whose defaults come from the environment) first, then the preset, then built-in defaults."""
    def pick(value, key, default):
        if value is not None:
            return value
        if preset.get(key) is not None:
            return preset[key]
        return default

    suites = pick(args.suite or (SUITE.split(",") if SUITE else None), "suites", ["all"])
    if isinstance(suites, str):
        suites = [suites]
    output_format = pick(args.format, "format", DEFAULT_FORMAT)
    if output_format not in FORMATS:
        raise UsageError(f"unknown output format {output_format!r}")
    config = {
        "heights": parse_heights(pick(args.height or HEIGHT, "heights", DEFAULT_HEIGHTS)),
        "suites": select_suites(suites),
        "seed": int(pick(args.seed, "seed", DEFAULT_SEED)),
        "trials": int(pick(args.trials, "trials", DEFAULT_TRIALS)),
        "format": output_format,
        "force": bool(args.force or preset.get("force", False)),
        "tuple_cap": TUPLE_CAP,
    }
    if config["trials"] < 1:
        raise UsageError("trials must be >= 1")
    return config


def cmd_verify(config: Dict[str, Any], cache_dir: Optional[str] = CACHE_DIR, use_cache: bool = True) -> Report:
    """Run every selected suite for every height."""
    for h in config["heights"]:
        if "hochschild" in config["suites"] and h > HOCHSCHILD_MAX_HEIGHT and not config["force"]:
            raise HochschildRefused(h)
    echo = {k: config[k] for k in ("heights", "suites", "seed", "trials", "tuple_cap")}
    report = Report(echo)
    for h in config["heights"]:
        report.suites.extend(run_suites(h, config["suites"], config["seed"], config["trials"],
                                        cache_dir, use_cache, config["force"], config["tuple_cap"]))
    return report


def write_output(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, 'w') as f:
            f.write(text + "\n")
    else:
        print(text)


def main(argv: Optional[List[str]] = None) -> None:
    """Main entry point for the qhomology suite runner."""
    parser = argparse.ArgumentParser(description="Exact verification of the zero-mode h-complex and its homology")
    parser.add_argument("command", nargs='?', choices=["verify", "presets"], default="verify",
                        help="Command to execute")
    parser.add_argument("--height", action="append", type=int, help="Height h >= 2 (repeatable)")
    parser.add_argument("--suite", action="append", choices=SUITES + ["all"], help="Suite to run (repeatable)")
    parser.add_argument("--seed", type=int, help="Seed for random trials", default=SEED)
    parser.add_argument("--trials", type=int, help="Number of random trials", default=TRIALS)
    parser.add_argument("--out", help="Write the report to a file instead of stdout")
    parser.add_argument("--format", choices=FORMATS, help="Output format", default=OUTPUT_FORMAT)
    parser.add_argument("--template", help="Text report template", default=TEMPLATE)
    parser.add_argument("--preset", help="Load a preset from <qhomology-dir>/presets")
    parser.add_argument("--cache-dir", help="Model cache directory", default=CACHE_DIR)
    parser.add_argument("--no-cache", action="store_true", help="Rebuild models instead of reading the cache")
    parser.add_argument("--force", action="store_true", help="Run the hochschild suite above the height limit")
    parser.add_argument("--qhomology-dir", help="Path to the qhomology directory", default=QHOMOLOGY_DIR)
    args = parser.parse_args(argv)

    try:
        if args.command == "presets":
            list_available_presets(args.qhomology_dir)
            sys.exit(EXIT_OK)
        preset = load_preset(args.preset, args.qhomology_dir) if args.preset else {}
        config = resolve_config(args, preset)
    except QHomologyError as e:
        logger.error(e)
        sys.exit(EXIT_USAGE)

    try:
        report = cmd_verify(config, args.cache_dir, not args.no_cache)
    except HochschildRefused as e:
        logger.error(e)
        sys.exit(EXIT_USAGE)
    except QHomologyError as e:
        logger.error(f"Verification aborted: {e}")
        sys.exit(EXIT_FAILED)

    write_output(render_report(report, config["format"], args.template, args.qhomology_dir), args.out)
    sys.exit(EXIT_OK if report.passed else EXIT_FAILED)


if __name__ == '__main__':
    main()
