"""Scenario files and deterministic report rendering (JSON, markdown, CSV)."""
from __future__ import annotations

import csv
import dataclasses
import enum
import io
import json
import math
from functools import lru_cache
from importlib import resources
from pathlib import Path

import jsonschema

from .errors import SchemaError, ValidationError
from .measure import Environment, Predictor, Representation, SingularExtension, get_log_base
from .scenarios import SCHEMA_VERSION, PredictorClass, ScenarioSpec

SIG_DIGITS = 12


@lru_cache(maxsize=1)
def scenario_schema() -> dict:
    return json.loads(resources.files("dashift").joinpath("scenario.schema.json").read_text())


# -- scenarios ----------------------------------------------------------------

def scenario_to_dict(spec: ScenarioSpec) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "name": spec.name,
        "labels": spec.K,
        "environments": [
            {"name": e.name, "atoms": [[x, y, m] for x, y, m in e.atoms]} for e in spec.environments.values()
        ],
        "representations": [
            {"name": r.name, "map": dict(sorted(r.mapping.items()))} for r in spec.representations.values()
        ],
        "predictor_classes": {
            name: {
                "representations": list(pc.representations),
                "predictors": [
                    {"name": p.name, "outputs": {g: list(v) for g, v in p.outputs.items()}} for p in pc.predictors
                ],
            }
            for name, pc in spec.predictor_classes.items()
        },
        "roles": {"sources": list(spec.sources), "target": spec.target},
        "manifest": spec.manifest,
    }


def scenario_from_dict(data: dict) -> ScenarioSpec:
    try:
        jsonschema.validate(data, scenario_schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SchemaError(f"scenario does not match schema at {where}: {exc.message}") from None
    K = data["labels"]
    envs = {}
    for e in data["environments"]:
        if e["name"] in envs:
            raise ValidationError(f"duplicate environment name {e['name']!r}")
        envs[e["name"]] = Environment.from_atoms(e["name"], e["atoms"], K)
    reps = {r["name"]: Representation(r["name"], r["map"]) for r in data["representations"]}
    classes = {
        name: PredictorClass(
            list(pc["representations"]),
            [Predictor(p["name"], K, p["outputs"]) for p in pc["predictors"]],
        )
        for name, pc in data.get("predictor_classes", {}).items()
    }
    return ScenarioSpec(
        data["name"], K, envs, reps, classes, list(data["roles"]["sources"]), data["roles"]["target"],
        dict(data.get("manifest", {})),
    )


def dumps_scenario(spec: ScenarioSpec) -> str:
    # full float precision here: scenario files must reload bit-for-bit
    return json.dumps(scenario_to_dict(spec), sort_keys=True, indent=2) + "\n"


def save_scenario(spec: ScenarioSpec, path) -> None:
    Path(path).write_text(dumps_scenario(spec))


def load_scenario(path) -> ScenarioSpec:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read scenario file {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc.msg} at line {exc.lineno})") from None
    return scenario_from_dict(data)


def load_extension(spec_text: str) -> SingularExtension:
    """Parse ``uniform``, ``source-marginal`` or ``file:PATH`` (JSON map atom -> vector)."""
    if spec_text in ("uniform", "source-marginal"):
        return SingularExtension(spec_text)
    if spec_text.startswith("file:"):
        path = spec_text[5:]
        try:
            table = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read extension table {path}: {exc}") from None
        if not isinstance(table, dict):
            raise SchemaError(f"extension table {path} must map atom ids to probability vectors")
        return SingularExtension("custom", table)
    raise ValidationError(f"unknown extension {spec_text!r}; use uniform, source-marginal or file:PATH")


# -- reports ------------------------------------------------------------------

def fmt_float(x: float):
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(f"{x:.{SIG_DIGITS}g}")


def to_jsonable(obj):
    """Plain JSON structure with floats cut to 12 significant digits."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, int)) and not isinstance(obj, enum.Enum):
        return obj
    if isinstance(obj, float):
        return fmt_float(obj)
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (Predictor, Representation, Environment)):
        return obj.name
    if isinstance(obj, SingularExtension):
        return obj.describe()
    if dataclasses.is_dataclass(obj):
        out = {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
        for prop in ("holds", "certified", "feasible", "singular_mass"):
            if isinstance(getattr(type(obj), prop, None), property):
                out[prop] = to_jsonable(getattr(obj, prop))
        return out
    if hasattr(obj, "_asdict"):
        return {k: to_jsonable(v) for k, v in obj._asdict().items()}
    if isinstance(obj, dict):
        return {("|".join(map(str, k)) if isinstance(k, tuple) else str(k)): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [to_jsonable(v) for v in items]
    if hasattr(obj, "item"):  # numpy scalar
        return to_jsonable(obj.item())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def envelope(kind: str, payload, scenario: str | None = None, extension: str | None = None, **extra) -> dict:
    from . import __version__

    base = get_log_base()
    return {
        "kind": kind,
        "meta": {
            "tool": "dashift",
            "tool_version": __version__,
            "schema_version": SCHEMA_VERSION,
            "scenario": scenario,
            "extension": extension,
            "log_base": "e" if base == math.e else "2",
            **extra,
        },
        "result": to_jsonable(payload),
    }


def render_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.{SIG_DIGITS}g}"
    if isinstance(v, (list, dict)):
        return json.dumps(v, sort_keys=True)
    return str(v)


def _md_table(rows: list, columns: list | None = None) -> list:
    columns = columns or sorted({k for r in rows for k in r})
    lines = ["| " + " | ".join(columns) + " |", "|" + "---|" * len(columns)]
    for r in rows:
        lines.append("| " + " | ".join(_cell(r.get(c, "")) for c in columns) + " |")
    return lines


def render_md(doc: dict) -> str:
    lines = [f"# {doc['kind']}", ""]
    lines += _md_table([{"field": k, "value": v} for k, v in sorted(doc["meta"].items())], ["field", "value"])
    lines.append("")

    def emit(name, value, depth):
        if isinstance(value, list) and value and all(isinstance(v, dict) for v in value):
            lines.extend([f"{'#' * depth} {name}", ""] + _md_table(value) + [""])
        elif isinstance(value, dict) and value and all(isinstance(v, dict) for v in value.values()) \
                and all(not isinstance(x, (dict, list)) for v in value.values() for x in v.values()):
            rows = [{"key": k, **v} for k, v in value.items()]
            cols = ["key"] + sorted({c for v in value.values() for c in v})
            lines.extend([f"{'#' * depth} {name}", ""] + _md_table(rows, cols) + [""])
        elif isinstance(value, dict):
            scalars = {k: v for k, v in value.items() if not isinstance(v, (dict, list)) or not v
                       or (isinstance(v, list) and not isinstance(v[0], (dict, list)))}
            lines.extend([f"{'#' * depth} {name}", ""])
            if scalars:
                lines.extend(_md_table([{"field": k, "value": v} for k, v in sorted(scalars.items())],
                                       ["field", "value"]) + [""])
            for k, v in sorted(value.items()):
                if k not in scalars:
                    emit(k, v, min(depth + 1, 6))
        else:
            lines.extend([f"{'#' * depth} {name}", "", _cell(value), ""])

    emit("result", doc["result"], 2)
    return "\n".join(lines).rstrip() + "\n"


def render_csv(rows: list, columns: list | None = None) -> str:
    columns = columns or sorted({k for r in rows for k in r})
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(to_jsonable(r.get(c, ""))) for c in columns])
    return buf.getvalue()
