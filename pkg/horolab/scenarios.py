"""
scenarios.py
JSON scenario files

A scenario either names a registered claim:

    {"claim": "slit-small-empty", "seed": 0, "output": {"dir": "out"}}

or describes one experiment:

    {
      "name": "disc_horoball",
      "domain": {"kind": "UnitDisc"},
      "backend": {"mode": "ExactDisc"},
      "operation": "render_horosphere_raster",
      "parameters": {"o": 0, "x": 1, "R": 1, "flavor": "big", "resolution": 200},
      "seed": 0,
      "output": {"dir": "out", "svg": true}
    }

Complex numbers are written as numbers, [re, im] pairs or strings like
"0.5+0.2j"; points of higher-dimensional domains are lists of those.
A boundary point is a point, or {"at": point, "side": "above"|"below"}.
"""

import json
import logging
import os
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Union

import numpy as np

from horolab.claims import CLAIMS, reproduce
from horolab.conformal import (
    MapDescriptor,
    disc_automorphism,
    half_disc_riemann_map,
    half_disc_uniformizer,
    slit_disc_riemann_map,
    slit_disc_uniformizer,
)
from horolab.domains import (
    BoundaryPoint,
    DomainDescriptor,
    as_point,
    boundary_sides,
    domain_from_dict,
    make_boundary_point,
    sample_interior,
)
from horolab.errors import DomainError, ScenarioError
from horolab.extension import extension_verdict
from horolab.geodesics import geodesic_ray, geodesic_segment
from horolab.gromov import four_point_delta, visibility_probe
from horolab.horospheres import (
    Flavor,
    boundary_trace_probe,
    emptiness_threshold,
    horofunction_interval,
    horosphere_membership,
    small_emptiness_scan,
)
from horolab.metrics import MetricBackend, backend_from_dict
from horolab.reports import ProbeReport, save_report
from horolab.rendering import render_horosphere_raster, render_path

logger = logging.getLogger(__name__)

TOP_LEVEL_KEYS = {"name", "claim", "domain", "backend", "operation", "parameters", "seed", "output", "description"}

MAPS: Dict[str, Callable[..., MapDescriptor]] = {
    "disc_automorphism": disc_automorphism,
    "half_disc_uniformizer": lambda: half_disc_uniformizer(),
    "half_disc_riemann_map": lambda: half_disc_riemann_map(),
    "slit_disc_uniformizer": lambda: slit_disc_uniformizer(),
    "slit_disc_riemann_map": lambda: slit_disc_riemann_map(),
}


@dataclass
class Scenario:
    """A validated scenario file"""
    name: str
    seed: int
    output: Dict[str, Any]
    claim: Optional[str] = None
    operation: Optional[str] = None
    domain: Optional[DomainDescriptor] = None
    backend: Optional[MetricBackend] = None
    parameters: Dict[str, Any] = field(default_factory=dict)

    @property
    def out_dir(self) -> str:
        return self.output.get("dir", "out")


@dataclass
class ScenarioResult:
    report: ProbeReport
    paths: List[str] = field(default_factory=list)

    @property
    def passed(self) -> Optional[bool]:
        return self.report.passed


# ---------------------------------------------------------------------------
# Value parsing
# ---------------------------------------------------------------------------

def parse_complex(value: Any) -> complex:
    if isinstance(value, bool):
        raise ScenarioError(f"Expected a complex number, got {value!r}")
    if isinstance(value, (int, float, complex)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(isinstance(v, (int, float)) for v in value):
        return complex(value[0], value[1])
    if isinstance(value, str):
        try:
            return complex(value.replace(" ", "").replace("i", "j"))
        except ValueError:
            pass
    raise ScenarioError(f"Expected a complex number, got {value!r}")


def parse_point(domain: DomainDescriptor, value: Any) -> np.ndarray:
    if domain.planar:
        return as_point(domain, parse_complex(value))
    if not isinstance(value, (list, tuple)) or len(value) != domain.dimension:
        raise ScenarioError(f"A point of {domain.label} needs {domain.dimension} coordinates, got {value!r}")
    return as_point(domain, [parse_complex(v) for v in value])


def parse_boundary_point(domain: DomainDescriptor, value: Any) -> BoundaryPoint:
    if isinstance(value, dict):
        return make_boundary_point(domain, parse_point(domain, value.get("at")), value.get("side"))
    return make_boundary_point(domain, parse_point(domain, value))


def _require(params: Dict[str, Any], *keys: str) -> None:
    missing = [k for k in keys if k not in params]
    if missing:
        raise ScenarioError(f"Missing parameters: {', '.join(missing)}", issues=[f"parameters.{k} is required" for k in missing])


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def _origin(s: Scenario) -> np.ndarray:
    return parse_point(s.domain, s.parameters.get("o", 0 if s.domain.planar else [0] * s.domain.dimension))


def _op_render(s: Scenario) -> ScenarioResult:
    p = s.parameters
    _require(p, "x", "R")
    x = parse_boundary_point(s.domain, p["x"])
    o = _origin(s)
    flavor = Flavor(p.get("flavor", "big"))
    stem = s.output.get("stem", s.name)
    svg_path = os.path.join(s.out_dir, f"{stem}.svg")
    render_horosphere_raster(s.backend, o, x, float(p["R"]), flavor, int(p.get("resolution", 200)), out=svg_path)
    report = ProbeReport(
        kind="horosphere_raster",
        parameters={"domain": s.domain.label, "backend": s.backend.label, "o": o, "x": x, "R": p["R"], "flavor": flavor.value},
    )
    report.data["svg"] = os.path.basename(svg_path)
    return ScenarioResult(report, [svg_path])


def _op_trace(s: Scenario) -> ScenarioResult:
    p = s.parameters
    _require(p, "x", "R")
    report = boundary_trace_probe(
        s.backend,
        _origin(s),
        parse_boundary_point(s.domain, p["x"]),
        float(p["R"]),
        Flavor(p.get("flavor", "big")),
        depth=p.get("depth"),
        count=int(p.get("count", 64)),
        seed=s.seed,
        schemes=p.get("schemes"),
    )
    return ScenarioResult(report)


def _op_horofunction(s: Scenario) -> ScenarioResult:
    p = s.parameters
    _require(p, "x", "z")
    est = horofunction_interval(s.backend, _origin(s), parse_point(s.domain, p["z"]), parse_boundary_point(s.domain, p["x"]), p.get("schemes"), p.get("n_max"))
    report = ProbeReport(kind="horofunction_interval", parameters={"backend": s.backend.label, **p})
    report.data.update(est.to_dict())
    return ScenarioResult(report)


def _op_membership(s: Scenario) -> ScenarioResult:
    p = s.parameters
    _require(p, "x", "z", "R")
    verdict = horosphere_membership(
        s.backend, _origin(s), parse_boundary_point(s.domain, p["x"]), float(p["R"]),
        parse_point(s.domain, p["z"]), Flavor(p.get("flavor", "big")), p.get("schemes"),
    )
    report = ProbeReport(kind="horosphere_membership", parameters={"backend": s.backend.label, **p})
    report.data.update(verdict.to_dict())
    return ScenarioResult(report)


def _op_emptiness_scan(s: Scenario) -> ScenarioResult:
    p = s.parameters
    _require(p, "x")
    targets = boundary_sides(s.domain, parse_point(s.domain, p["x"]))
    report = small_emptiness_scan(s.backend, _origin(s), targets, p.get("R_schedule"), count=int(p.get("count", 10_000)))
    return ScenarioResult(report)


def _op_emptiness_threshold(s: Scenario) -> ScenarioResult:
    p = s.parameters
    _require(p, "x")
    result = emptiness_threshold(s.backend, _origin(s), parse_boundary_point(s.domain, p["x"]), count=int(p.get("count", 10_000)), seed=s.seed)
    report = ProbeReport(kind="emptiness_threshold", parameters={"backend": s.backend.label, **p})
    report.data.update(result.to_dict())
    return ScenarioResult(report)


def _op_visibility(s: Scenario) -> ScenarioResult:
    p = s.parameters
    _require(p, "x", "y")
    result = visibility_probe(s.backend, _origin(s), parse_boundary_point(s.domain, p["x"]), parse_boundary_point(s.domain, p["y"]), p.get("schedules"))
    report = ProbeReport(kind="visibility_probe", parameters={"backend": s.backend.label, **p})
    report.data.update(result.to_dict())
    return ScenarioResult(report)


def _op_delta(s: Scenario) -> ScenarioResult:
    count = int(s.parameters.get("count", 50))
    est = four_point_delta(s.backend, sample_interior(s.domain, count, s.seed))
    report = ProbeReport(kind="four_point_delta", parameters={"backend": s.backend.label, "count": count})
    report.data.update(est.to_dict())
    return ScenarioResult(report)


def _path_result(s: Scenario, path, kind: str) -> ScenarioResult:
    stem = s.output.get("stem", s.name)
    csv_path = path.export_csv(os.path.join(s.out_dir, f"{stem}_path.csv"))
    paths = [csv_path]
    if s.output.get("svg") and s.domain.planar:
        svg_path = os.path.join(s.out_dir, f"{stem}.svg")
        render_path(path, out=svg_path)
        paths.append(svg_path)
    report = ProbeReport(kind=kind, parameters={"backend": s.backend.label, **s.parameters})
    report.data.update(path.to_dict())
    return ScenarioResult(report, paths)


def _op_ray(s: Scenario) -> ScenarioResult:
    p = s.parameters
    _require(p, "x")
    path = geodesic_ray(s.backend, _origin(s), parse_boundary_point(s.domain, p["x"]), float(p.get("t_max", 12.0)))
    return _path_result(s, path, "geodesic_ray")


def _op_segment(s: Scenario) -> ScenarioResult:
    p = s.parameters
    _require(p, "z", "w")
    path = geodesic_segment(s.backend, parse_point(s.domain, p["z"]), parse_point(s.domain, p["w"]))
    return _path_result(s, path, "geodesic_segment")


def _op_extension(s: Scenario) -> ScenarioResult:
    p = s.parameters
    _require(p, "map")
    if p["map"] not in MAPS:
        raise ScenarioError(f"Unknown map '{p['map']}'", issues=[f"parameters.map must be one of {sorted(MAPS)}"])
    kwargs = {}
    if p["map"] == "disc_automorphism":
        kwargs = {"a": parse_complex(p.get("a", 0)), "theta": float(p.get("theta", 0.0))}
    result = extension_verdict(MAPS[p["map"]](**kwargs), count=int(p.get("count", 24)), seed=s.seed)
    return ScenarioResult(result.to_report())


OPERATIONS: Dict[str, Callable[[Scenario], ScenarioResult]] = {
    "render_horosphere_raster": _op_render,
    "boundary_trace_probe": _op_trace,
    "horofunction_interval": _op_horofunction,
    "horosphere_membership": _op_membership,
    "small_emptiness_scan": _op_emptiness_scan,
    "emptiness_threshold": _op_emptiness_threshold,
    "visibility_probe": _op_visibility,
    "four_point_delta": _op_delta,
    "geodesic_ray": _op_ray,
    "geodesic_segment": _op_segment,
    "extension_verdict": _op_extension,
}


# ---------------------------------------------------------------------------
# Loading and running
# ---------------------------------------------------------------------------

def validate_scenario(data: Any) -> List[str]:
    """
    Schema issues of a scenario document; empty when it is valid

    Checks key names and types only. Domain and point values are checked
    when the scenario is built.
    """
    if not isinstance(data, dict):
        return ["scenario must be a JSON object"]
    issues = [f"unknown key '{k}'" for k in sorted(set(data) - TOP_LEVEL_KEYS)]
    if "seed" in data and (not isinstance(data["seed"], int) or isinstance(data["seed"], bool)):
        issues.append("seed must be an integer")
    if "output" in data and not isinstance(data["output"], dict):
        issues.append("output must be an object")
    if "claim" in data:
        if not isinstance(data["claim"], str):
            issues.append("claim must be a string")
        elif data["claim"] not in CLAIMS:
            issues.append(f"unknown claim '{data['claim']}'; known ids: {', '.join(sorted(CLAIMS))}")
        if "operation" in data:
            issues.append("claim and operation are mutually exclusive")
        return issues
    if "operation" not in data:
        issues.append("either claim or operation is required")
    elif data["operation"] not in OPERATIONS:
        issues.append(f"unknown operation '{data['operation']}'; known: {', '.join(sorted(OPERATIONS))}")
    if not isinstance(data.get("domain"), dict):
        issues.append("domain must be an object with a kind")
    if "backend" in data and not isinstance(data["backend"], dict):
        issues.append("backend must be an object")
    if "parameters" in data and not isinstance(data["parameters"], dict):
        issues.append("parameters must be an object")
    return issues


def build_scenario(data: Any, default_name: str = "scenario") -> Scenario:
    """
    Validate a scenario document and resolve its domain and backend

    Raises:
        ScenarioError: schema violations, with every issue listed
    """
    issues = validate_scenario(data)
    if issues:
        raise ScenarioError(f"Invalid scenario: {'; '.join(issues)}", issues=issues)
    name = str(data.get("name", default_name))
    scenario = Scenario(name=name, seed=int(data.get("seed", 0)), output=dict(data.get("output", {})))
    if "claim" in data:
        scenario.claim = data["claim"]
        return scenario
    try:
        scenario.domain = domain_from_dict(data["domain"])
        scenario.backend = backend_from_dict(data.get("backend", {}), scenario.domain)
    except DomainError as e:
        raise ScenarioError(f"Invalid scenario: {e}", issues=[str(e)])
    scenario.operation = data["operation"]
    scenario.parameters = dict(data.get("parameters", {}))
    return scenario


def load_scenario(path: str) -> Scenario:
    """
    Read and validate a scenario file

    Raises:
        ScenarioError: unreadable file, invalid JSON or schema violations
    """
    try:
        with open(path) as f:
            data = json.load(f)
    except OSError as e:
        raise ScenarioError(f"Cannot read scenario {path}: {e}")
    except json.JSONDecodeError as e:
        raise ScenarioError(f"Scenario {path} is not valid JSON: {e}", issues=[str(e)])
    stem = os.path.splitext(os.path.basename(path))[0]
    return build_scenario(data, default_name=stem)


def run_scenario(source: Union[str, Scenario]) -> ScenarioResult:
    """
    Run a scenario (a file path or a loaded Scenario) and write its artifacts

    Writes <stem>.json (and <stem>.csv for tabular reports) under output.dir,
    plus any SVG/path files the operation produces.

    Raises:
        ScenarioError: invalid scenario (including bad points or boundary points)
        NumericalError: a numerical procedure failed
    """
    scenario = source if isinstance(source, Scenario) else load_scenario(source)
    logger.info(f"Running scenario {scenario.name} ({scenario.claim or scenario.operation})")
    if scenario.claim:
        report = reproduce(scenario.claim, seed=scenario.seed)
        result = ScenarioResult(report)
    else:
        try:
            result = OPERATIONS[scenario.operation](scenario)
        except ScenarioError:
            raise
        except ValueError as e:
            raise ScenarioError(f"Scenario {scenario.name}: {e}", issues=[str(e)])
    result.report.parameters.setdefault("scenario", scenario.name)
    result.paths = save_report(result.report, scenario.out_dir, scenario.output.get("stem", scenario.name)) + result.paths
    return result
