"""JSON/CSV encoding of results and parsing of operator files."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import sys
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

import numpy as np

from banded import BandedOperator, WeightRule
from errors import ConfigError
from qcore import Quaternion, parse
from qlinalg import QMatrix, QVector

SCHEMA_VERSION = 1

SPECTRUM_HEADER = ["re", "i", "j", "k", "sigma_min", "kernel_dim_h"]
SHIFT_HEADER = ["n", "root_product"]
CURVATURE_HEADER = ["re_omega", "im_omega", "curvature_t", "curvature_t_tilde", "estimator_gap"]
TCI_HEADER = ["region", "re", "im", "n", "kernel_dim_h", "sigma_min", "surjectivity"]
CANONICAL_HEADER = ["row", "col", "a0", "a1", "a2", "a3"]


def to_jsonable(value: Any) -> Any:
    """Quaternions become 4-arrays, complex numbers [re, im], matrices nested 4-arrays."""
    if isinstance(value, Quaternion):
        return value.to_list()
    if isinstance(value, QMatrix):
        return [[q.to_list() for q in row] for row in value.to_quaternions()]
    if isinstance(value, QVector):
        return [q.to_list() for q in value.to_quaternions()]
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {f.name: to_jsonable(getattr(value, f.name)) for f in dataclasses.fields(value)}
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, float) and value != value:
        return None
    return value


def dump_json(payload: Dict[str, Any]) -> str:
    document = {"schema": SCHEMA_VERSION}
    document.update(to_jsonable(payload))
    return json.dumps(document, sort_keys=True, indent=2) + "\n"


def dump_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buffer.getvalue()


def _cell(value: Any) -> Any:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return value


def emit(text: str, out: Optional[str] = None) -> None:
    if out:
        with open(out, "w", newline="\n") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


# row builders


def spectrum_rows(results) -> List[List[Any]]:
    return [[*r.s.to_list(), r.sigma_min, r.kernel_dim_H] for r in results]


def shift_rows(sequence: Sequence[float]) -> List[List[Any]]:
    return [[n, value] for n, value in enumerate(sequence, start=1)]


def curvature_rows(grid) -> List[List[Any]]:
    rows = []
    for row in grid:
        values = row.values()
        rows.append([row.omega.real, row.omega.imag, values.get("t"), values.get("t_tilde"), row.max_gap])
    return rows


def tci_rows(region_reports: Dict[str, Any]) -> List[List[Any]]:
    rows = []
    for region, report in region_reports.items():
        for probe in report.rows:
            rows.append([region, probe.sample.real, probe.sample.imag_norm, probe.n, probe.kernel_dim_H,
                         probe.sigma_min, probe.surjectivity])
    return rows


def canonical_rows(rep) -> List[List[Any]]:
    return [[i, j, *rep.entry(i, j).to_list()] for i in range(rep.size) for j in range(rep.size)]


# operator files


def _quaternion(value: Any, where: str) -> Quaternion:
    try:
        if isinstance(value, (int, float)):
            return Quaternion(float(value))
        if isinstance(value, str):
            return parse(value)
        return Quaternion.from_list(value)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"bad quaternion at {where}: {value!r} ({e})") from e


def operator_from_dict(data: Dict[str, Any], name: str = "operator") -> Union[QMatrix, BandedOperator]:
    """Dense {"matrix": [[q, ...], ...]} or rule-defined {"diag", "weights", "patch"}."""
    if not isinstance(data, dict):
        raise ConfigError(f"{name}: operator description must be a JSON object")
    schema = data.get("schema", SCHEMA_VERSION)
    if schema != SCHEMA_VERSION:
        raise ConfigError(f"{name}: unsupported schema {schema!r}")

    if "matrix" in data:
        rows = data["matrix"]
        if not isinstance(rows, list) or not rows or any(not isinstance(r, list) or len(r) != len(rows) for r in rows):
            raise ConfigError(f"{name}: 'matrix' must be a square list of rows")
        grid = [[_quaternion(v, f"matrix[{r}][{c}]") for c, v in enumerate(row)] for r, row in enumerate(rows)]
        return QMatrix.from_quaternions(grid)

    unexpected = set(data) - {"schema", "diag", "weights", "patch", "name"}
    if unexpected:
        raise ConfigError(f"{name}: unknown keys {sorted(unexpected)}")
    diag = _quaternion(data.get("diag", 0.0), "diag")
    weights = data.get("weights", "const:1")
    if isinstance(weights, list):
        rule = WeightRule.from_values([_quaternion(v, f"weights[{i}]") for i, v in enumerate(weights)])
    elif isinstance(weights, str):
        rule = WeightRule.parse(weights)
    else:
        raise ConfigError(f"{name}: 'weights' must be a rule string or a list")

    patch = {}
    for index, item in enumerate(data.get("patch", [])):
        if not isinstance(item, list) or len(item) != 3:
            raise ConfigError(f"{name}: patch[{index}] must be [row, col, value]")
        row, col, value = item
        if not isinstance(row, int) or not isinstance(col, int) or row < 0 or col < 0:
            raise ConfigError(f"{name}: patch[{index}] has a bad position ({row!r}, {col!r})")
        patch[(row, col)] = _quaternion(value, f"patch[{index}]")
    return BandedOperator(diag=diag, weights=rule, patch=patch, name=data.get("name", name))


def load_operator(path: str) -> Union[QMatrix, BandedOperator]:
    try:
        with open(path, "r") as handle:
            data = json.load(handle)
    except OSError as e:
        raise ConfigError(f"cannot read operator file {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"operator file {path} is not valid JSON: line {e.lineno}, column {e.colno}: {e.msg}") from e
    return operator_from_dict(data, name=path)


def operator_to_dict(op: Union[QMatrix, BandedOperator]) -> Dict[str, Any]:
    if isinstance(op, QMatrix):
        return {"schema": SCHEMA_VERSION, "matrix": to_jsonable(op)}
    return {
        "schema": SCHEMA_VERSION,
        "name": op.name,
        "diag": op.diag.to_list(),
        "weights": op.weights.describe(),
        "patch": [[r, c, Quaternion.coerce(v).to_list()] for (r, c), v in sorted(op.patch.items())],
    }


def as_matrix(op: Union[QMatrix, BandedOperator], n: int) -> QMatrix:
    """Dense truncation; a QMatrix is used as given."""
    return op if isinstance(op, QMatrix) else op.truncate(n)
