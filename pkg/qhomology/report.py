"""Check records, suite reports and their JSON / text rendering."""
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import jsonschema
import yaml
from jinja2 import Environment, FileSystemLoader
from tabulate import tabulate

from .constants import SCHEMA_TAG, VERSION
from .errors import SchemaError

PACKAGE_DIR = Path(__file__).resolve().parent
SCHEMAS_DIR = "schemas"
TEMPLATES_DIR = "templates"
CONFIG_FILE_EXTENSION = ".yml"

logger = logging.getLogger(__name__)


@dataclass
class Check:
    id: str
    status: str
    witness: Any = None
    detail: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    @classmethod
    def of(cls, check_id: str, ok: bool, witness: Any = None, detail: Optional[str] = None) -> "Check":
        if ok:
            return cls(check_id, "pass", None, detail)
        return cls(check_id, "fail", witness, detail)

    def to_json(self) -> dict:
        data = {"id": self.id, "status": self.status}
        if self.witness is not None:
            data["witness"] = self.witness
        if self.detail is not None:
            data["detail"] = self.detail
        return data


def identity_check(check_id: str, defect, label: Optional[Callable[[int], str]] = None) -> Check:
    """Pass when the matrix ``defect`` vanishes, otherwise name the first basis vector it moves."""
    entry = defect.first_nonzero()
    if entry is None:
        return Check(check_id, "pass")
    row, col = entry
    witness = {"row": row, "column": col}
    if label is not None:
        witness["basis"] = label(col)
    return Check(check_id, "fail", witness, "identity does not hold")


@dataclass
class SuiteReport:
    suite: str
    h: int
    checks: List[Check] = field(default_factory=list)
    seed: Optional[int] = None
    data: Dict[str, Any] = field(default_factory=dict)
    elapsed: Optional[float] = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> List[Check]:
        return [c for c in self.checks if not c.passed]

    def add(self, check: Check) -> Check:
        if not check.passed:
            logger.warning("h=%d %s: check %s failed (%s)", self.h, self.suite, check.id, check.witness)
        self.checks.append(check)
        return check

    def extend(self, checks: Sequence[Check]):
        for c in checks:
            self.add(c)

    def to_json(self) -> dict:
        data = {"suite": self.suite, "h": self.h, "checks": [c.to_json() for c in self.checks],
                "status": "pass" if self.passed else "fail"}
        if self.seed is not None:
            data["seed"] = self.seed
        if self.data:
            data["data"] = self.data
        return data


@dataclass
class Report:
    config: Dict[str, Any]
    suites: List[SuiteReport] = field(default_factory=list)
    version: str = VERSION

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.suites)

    def to_json(self) -> dict:
        return {"schema": SCHEMA_TAG, "version": self.version, "config": self.config,
                "suites": [s.to_json() for s in self.suites],
                "status": "pass" if self.passed else "fail"}


def load_yaml_file(file_path) -> Dict[str, Any]:
    with open(file_path, 'r') as file:
        return yaml.safe_load(file)


def load_schema(name: str) -> dict:
    config = load_yaml_file(PACKAGE_DIR / SCHEMAS_DIR / f"{name}{CONFIG_FILE_EXTENSION}")
    return json.loads(config.get('schema'))


def validate_with_schema(instance: Any, name: str) -> None:
    """Validate a JSON-like document against one of the bundled schemas."""
    try:
        jsonschema.validate(instance=instance, schema=load_schema(name))
    except jsonschema.ValidationError as e:
        raise SchemaError(f"{name} schema validation error: {e.message}")


def dump_json(data: Any, schema: Optional[str] = None) -> str:
    if schema:
        validate_with_schema(data, schema)
    return json.dumps(data, indent=2, sort_keys=True)


def check_table(suite: SuiteReport) -> str:
    rows = [[c.id, c.status, json.dumps(c.witness, sort_keys=True) if c.witness is not None else ""]
            for c in suite.checks]
    return tabulate(rows, ["check", "status", "witness"], tablefmt="grid")


def dims_table(data: Dict[str, Any]) -> str:
    """Grid table of every ``dims``-like list stored in a suite's data."""
    rows = [[key, ", ".join(str(x) for x in value)] for key, value in sorted(data.items())
            if isinstance(value, list) and all(isinstance(x, int) for x in value)]
    return tabulate(rows, ["quantity", "values"], tablefmt="grid") if rows else ""


def render_template(template_name: str, context: Dict[str, Any], qhomology_dir: Optional[str] = None) -> str:
    """Render a text template, preferring ``<qhomology_dir>/templates`` over the bundled ones."""
    search = [str(PACKAGE_DIR / TEMPLATES_DIR)]
    if qhomology_dir:
        search.insert(0, f"{qhomology_dir}/{TEMPLATES_DIR}")
    template_env = Environment(loader=FileSystemLoader(search), trim_blocks=True, lstrip_blocks=True)
    template_env.globals.update(check_table=check_table, dims_table=dims_table)
    template = template_env.get_template(f"{template_name}.tpl")
    return template.render(**context)


def render_report(report: Report, output_format: str = "text", template: str = "report",
                  qhomology_dir: Optional[str] = None) -> str:
    if output_format == "json":
        return dump_json(report.to_json(), "report")
    return render_template(template, {"report": report, "version": report.version,
                                      "config": report.config, "suites": report.suites}, qhomology_dir)
