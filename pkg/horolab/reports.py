"""
reports.py
Probe reports and artifact writers

Every probe returns a ProbeReport: parameters, witnesses, verdict counts and
an optional CSV table. JSON output uses sorted keys and floats rounded to a
fixed number of significant digits so reruns are byte-identical.
"""

import csv
import hashlib
import json
import logging
import math
import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np

from horolab.config import get_settings

logger = logging.getLogger(__name__)


def clean(value: Any, digits: Optional[int] = None) -> Any:
    """
    Convert report payloads to plain JSON types

    numpy scalars and arrays become Python numbers and lists, complex numbers
    become [re, im], enums their value, objects with to_dict() their dict.
    Floats are rounded to `digits` significant digits; non-finite floats
    become the strings "inf", "-inf" and "nan".
    """
    digits = digits if digits is not None else get_settings().float_digits
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if not math.isfinite(v):
            return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
        return float(f"{v:.{digits}g}")
    if isinstance(value, (complex, np.complexfloating)):
        return [clean(value.real, digits), clean(value.imag, digits)]
    if isinstance(value, np.ndarray):
        return [clean(v, digits) for v in value.tolist()]
    if isinstance(value, dict):
        return {str(k): clean(v, digits) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [clean(v, digits) for v in value]
    if hasattr(value, "to_dict"):
        return clean(value.to_dict(), digits)
    return value


def dumps(payload: Any) -> str:
    return json.dumps(clean(payload), sort_keys=True, indent=2)


@dataclass
class ProbeReport:
    """Result of a probe: parameters, witnesses, verdict counts and a table"""
    kind: str
    parameters: Dict[str, Any] = field(default_factory=dict)
    witnesses: List[Dict[str, Any]] = field(default_factory=list)
    verdict_counts: Dict[str, int] = field(default_factory=dict)
    columns: List[str] = field(default_factory=list)
    rows: List[List[Any]] = field(default_factory=list)
    data: Dict[str, Any] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)
    passed: Optional[bool] = None
    claim_id: Optional[str] = None

    @property
    def report_id(self) -> str:
        """Content hash of the kind and parameters"""
        digest = hashlib.sha256(json.dumps(clean({"kind": self.kind, "parameters": self.parameters}), sort_keys=True).encode())
        return digest.hexdigest()[:16]

    def note(self, message: str) -> None:
        self.notes.append(message)
        logger.info(f"[{self.kind}] {message}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "report_id": self.report_id,
            "claim_id": self.claim_id,
            "kind": self.kind,
            "parameters": self.parameters,
            "witnesses": self.witnesses,
            "verdict_counts": self.verdict_counts,
            "data": self.data,
            "notes": self.notes,
            "passed": self.passed,
            "rows": len(self.rows),
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())

    def write_json(self, path: str) -> str:
        _ensure_parent(path)
        with open(path, "w") as f:
            f.write(self.to_json())
            f.write("\n")
        logger.debug(f"Wrote report {self.report_id} to {path}")
        return path

    def write_csv(self, path: str) -> str:
        """Write the table; columns are fixed per report kind"""
        _ensure_parent(path)
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(self.columns)
            for row in self.rows:
                writer.writerow([_cell(v) for v in row])
        logger.debug(f"Wrote {len(self.rows)} rows to {path}")
        return path


def _cell(value: Any) -> Any:
    v = clean(value)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, dict)):
        return json.dumps(v, sort_keys=True)
    return "" if v is None else v


def _ensure_parent(path: str) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)


def save_report(report: ProbeReport, out_dir: str, stem: Optional[str] = None) -> List[str]:
    """
    Write report.json (and report.csv when the report has a table) under out_dir

    Returns:
        paths written
    """
    stem = stem or report.claim_id or report.kind
    paths = [report.write_json(os.path.join(out_dir, f"{stem}.json"))]
    if report.columns:
        paths.append(report.write_csv(os.path.join(out_dir, f"{stem}.csv")))
    return paths


def verdict_counts(codes: np.ndarray) -> Dict[str, int]:
    """Counts of membership codes (+1 In, -1 Out, 0 Undetermined)"""
    codes = np.asarray(codes)
    return {
        "In": int(np.sum(codes == 1)),
        "Out": int(np.sum(codes == -1)),
        "Undetermined": int(np.sum(codes == 0)),
    }
