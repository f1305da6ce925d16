"""
extension.py
Boundary behavior of biholomorphisms

Cluster sets of maps at boundary points, continuous / homeomorphic extension
verdicts, pushforward of horospheres into the disc, metric regularity of the
disc and the Jordan dichotomy for planar simply-connected domains.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from horolab.config import get_settings
from horolab.conformal import MapDescriptor
from horolab.domains import (
    NORMAL,
    ApproachScheme,
    BoundaryPoint,
    DomainKind,
    approach_sequence,
    as_point,
    as_points,
    boundary_sides,
    make_boundary_point,
    sample_boundary,
    sample_interior,
    unit_disc,
)
from horolab.errors import DomainError
from horolab.geodesics import Cluster, cluster_points
from horolab.horospheres import (
    IN,
    Flavor,
    disc_horoball_geometry,
    horofunction_grid,
    membership_codes,
    small_emptiness_scan,
)
from horolab.metrics import ExactDisc, backend_for
from horolab.reports import ProbeReport

logger = logging.getLogger(__name__)

TAIL = 10
WITNESS_TOLERANCE = 1e-6
BOUNDARY_EPS = 1e-9


class ExtensionVerdict(Enum):
    HOMEOMORPHIC = "ExtendsHomeomorphically"
    CONTINUOUS_ONLY = "ExtendsContinuouslyOnly"
    NO_CONTINUOUS = "NoContinuousExtension"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class ClusterReport:
    """Cluster set of a map at one boundary location"""
    point: BoundaryPoint
    clusters: List[Cluster]
    inconclusive: bool
    sides: List[Optional[str]] = field(default_factory=list)

    @property
    def singleton(self) -> bool:
        return len(self.clusters) == 1 and not self.inconclusive

    def to_dict(self) -> Dict[str, Any]:
        return {
            "point": self.point.to_dict(),
            "clusters": [c.to_dict() for c in self.clusters],
            "inconclusive": self.inconclusive,
            "sides": self.sides,
        }


@dataclass
class ExtensionReport:
    map_name: str
    verdict: ExtensionVerdict
    forward: List[ClusterReport]
    inverse: List[ClusterReport]
    witnesses: List[Dict[str, Any]] = field(default_factory=list)
    near_collisions: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "map": self.map_name,
            "verdict": self.verdict.value,
            "forward": [r.to_dict() for r in self.forward],
            "inverse": [r.to_dict() for r in self.inverse],
            "witnesses": self.witnesses,
            "near_collisions": self.near_collisions,
        }

    def to_report(self) -> ProbeReport:
        report = ProbeReport(
            kind="extension_verdict",
            parameters={"map": self.map_name, "forward_samples": len(self.forward), "inverse_samples": len(self.inverse)},
            witnesses=self.witnesses,
            verdict_counts={
                "forward_singletons": sum(r.singleton for r in self.forward),
                "forward_multi": sum(len(r.clusters) > 1 for r in self.forward),
                "inverse_singletons": sum(r.singleton for r in self.inverse),
                "inverse_multi": sum(len(r.clusters) > 1 for r in self.inverse),
            },
        )
        report.data["verdict"] = self.verdict.value
        return report


# ---------------------------------------------------------------------------
# Cluster sets
# ---------------------------------------------------------------------------

def boundary_cluster_set(
    map: MapDescriptor,
    x: BoundaryPoint,
    schemes: Optional[Sequence[Any]] = None,
    n: int = 40,
    tolerance: Optional[float] = None,
    all_sides: bool = True,
) -> ClusterReport:
    """
    Accumulation points of map images of approach sequences toward x

    With all_sides, every side-tagged point at x's location is approached,
    so a slit location contributes both of its sides. Results are cached on
    the map descriptor.

    Raises:
        DomainError: no scheme admissible at x
    """
    tolerance = tolerance if tolerance is not None else get_settings().cluster_tolerance
    scheme_list = [ApproachScheme.parse(s) for s in (schemes or [NORMAL])]
    key = (tuple(np.round(x.coordinates, 12)), None if all_sides else x.side_tag, tuple(s.label for s in scheme_list), n, tolerance)
    if key in map.cache:
        return map.cache[key]
    sides = boundary_sides(map.source, x.coordinates) if all_sides else [x]
    images = []
    for side in sides:
        for scheme in scheme_list:
            try:
                W = approach_sequence(map.source, side, scheme, n=n)
            except DomainError as e:
                logger.debug(f"Scheme {scheme.label} skipped at {side}: {e}")
                continue
            images.append(np.atleast_1d(map.forward(W[-TAIL:, 0])))
    if not images:
        raise DomainError(f"No approach scheme is admissible at {x}")
    P = np.concatenate(images)[:, None]
    clusters, misses = cluster_points(P, map.target, tolerance)
    report = ClusterReport(x, clusters, inconclusive=misses > 0 or not clusters, sides=[s.side_tag for s in sides])
    if report.inconclusive:
        logger.warning(f"{map.name} at {x}: {misses} tail images did not settle near the boundary")
    map.cache[key] = report
    return report


def _location_distance(a: BoundaryPoint, b: BoundaryPoint) -> float:
    return float(np.max(np.abs(a.coordinates - b.coordinates)))


def _distinct_locations(points: Sequence[BoundaryPoint], separation: float) -> List[BoundaryPoint]:
    out: List[BoundaryPoint] = []
    for p in points:
        if all(_location_distance(p, q) > separation for q in out):
            out.append(p)
    return out


def extension_verdict(
    map: MapDescriptor,
    source_samples: Optional[Sequence[BoundaryPoint]] = None,
    target_samples: Optional[Sequence[BoundaryPoint]] = None,
    count: int = 24,
    seed: int = 0,
    schemes: Optional[Sequence[Any]] = None,
) -> ExtensionReport:
    """
    Decide how a biholomorphism extends to the boundary, on samples

    - a multi-point forward cluster: NoContinuousExtension
    - singleton forward clusters and a confirmed shared image: ExtendsContinuouslyOnly
    - singleton clusters both ways, no shared image: ExtendsHomeomorphically

    Shared images come from source pairs whose images coincide, or from a
    target sample whose inverse cluster set has two points that map back to it.
    """
    settings = get_settings()
    tol = settings.cluster_tolerance
    sep = settings.injectivity_separation
    source_samples = _distinct_locations(source_samples or sample_boundary(map.source, count, seed), BOUNDARY_EPS)
    target_samples = _distinct_locations(target_samples or sample_boundary(map.target, count, seed + 1), BOUNDARY_EPS)
    inverse_map = map.inverted()

    forward = [boundary_cluster_set(map, x, schemes) for x in source_samples]
    inverse = [boundary_cluster_set(inverse_map, y, schemes) for y in target_samples]

    multi = [r for r in forward if len(r.clusters) > 1]
    if multi:
        witnesses = [{"point": r.point, "clusters": [c.point for c in r.clusters]} for r in multi]
        logger.info(f"{map.name}: {len(multi)} boundary points with several clusters")
        return ExtensionReport(map.name, ExtensionVerdict.NO_CONTINUOUS, forward, inverse, witnesses)
    if any(r.inconclusive for r in forward):
        return ExtensionReport(map.name, ExtensionVerdict.INCONCLUSIVE, forward, inverse)

    witnesses: List[Dict[str, Any]] = []
    near = 0
    for i in range(len(forward)):
        for j in range(i + 1, len(forward)):
            a, b = forward[i], forward[j]
            if _location_distance(a.point, b.point) <= sep:
                continue
            gap = _location_distance(a.clusters[0].point, b.clusters[0].point)
            if gap <= WITNESS_TOLERANCE:
                witnesses.append({"image": a.clusters[0].point, "preimages": [a.point, b.point], "source": "forward samples"})
            elif gap <= 2 * tol:
                near += 1

    for r in inverse:
        if len(r.clusters) < 2:
            continue
        pre = _distinct_locations([c.point for c in r.clusters], sep)
        if len(pre) < 2:
            continue
        images = [boundary_cluster_set(map, p, schemes) for p in pre[:2]]
        if not all(im.singleton for im in images):
            continue
        q1, q2 = images[0].clusters[0].point, images[1].clusters[0].point
        if _location_distance(q1, q2) <= WITNESS_TOLERANCE and _location_distance(q1, r.point) <= 2 * tol:
            witnesses.append({"image": r.point, "preimages": pre[:2], "source": "inverse cluster set"})

    if witnesses:
        verdict = ExtensionVerdict.CONTINUOUS_ONLY
    elif all(r.singleton for r in inverse):
        verdict = ExtensionVerdict.HOMEOMORPHIC
    else:
        verdict = ExtensionVerdict.INCONCLUSIVE
    logger.info(f"{map.name}: {verdict.value} ({len(witnesses)} witnesses, {near} near collisions)")
    return ExtensionReport(map.name, verdict, forward, inverse, witnesses, near)


def boundary_correspondence(map: MapDescriptor, count: int = 64, seed: int = 0) -> ProbeReport:
    """
    Table of source boundary angles and the clusters they map to

    Only for maps whose source is the unit disc.
    """
    if map.source.kind != DomainKind.UNIT_DISC:
        raise DomainError(f"Boundary correspondence tables need a disc source, got {map.source.label}")
    report = ProbeReport(
        kind="boundary_correspondence",
        parameters={"map": map.name, "count": count, "seed": seed},
        columns=["source_angle", "target_re", "target_im", "side_tag", "cluster_id"],
    )
    samples = sorted(sample_boundary(map.source, count, seed), key=lambda b: math.atan2(b.z.imag, b.z.real) % (2 * math.pi))
    for x in samples:
        angle = math.atan2(x.z.imag, x.z.real) % (2 * math.pi)
        for k, c in enumerate(boundary_cluster_set(map, x).clusters):
            report.rows.append([angle, c.point.z.real, c.point.z.imag, c.point.side_tag or "", k])
    return report


# ---------------------------------------------------------------------------
# Horospheres under maps into the disc
# ---------------------------------------------------------------------------

def horosphere_pushforward_check(
    map: MapDescriptor,
    p: Any,
    x: BoundaryPoint,
    R_schedule: Sequence[float] = (0.5, 1.0, 2.0),
    Z: Any = None,
    count: int = 1000,
    seed: int = 0,
) -> ProbeReport:
    """
    Check Phi(H_p(x, R)) inside the disc horoball H(Phi(x), R) with pole Phi(p)

    Every grid point certified In (small or big) in the source domain must map
    into the Euclidean horodisc. With no In verdicts the check is vacuous.

    Raises:
        DomainError: the map does not land in the disc, or its cluster at x is not a singleton
    """
    if map.target.kind != DomainKind.UNIT_DISC:
        raise DomainError(f"Pushforward check needs a map into the disc, got {map.target.label}")
    source = map.source
    cluster = boundary_cluster_set(map, x, all_sides=False)
    if not cluster.singleton:
        raise DomainError(f"Cluster set of {map.name} at {x} is not a singleton")
    xi = cluster.clusters[0].point.z
    p = as_point(source, p)
    o = complex(map.forward(np.asarray(p[0])))
    backend = backend_for(source)
    Z = sample_interior(source, count, seed) if Z is None else as_points(source, Z)
    grid = horofunction_grid(backend, p, Z, x)
    images = np.atleast_1d(map.forward(Z[:, 0]))

    report = ProbeReport(
        kind="pushforward_inclusion",
        parameters={"map": map.name, "p": p, "x": x, "xi": xi, "o": o, "R_schedule": list(R_schedule), "samples": len(Z)},
        columns=["R", "flavor", "in_source", "violations", "min_margin"],
    )
    total_in = 0
    total_violations = 0
    for R in R_schedule:
        center, radius = disc_horoball_geometry(xi, R, o)
        gap = radius - np.abs(images - center)
        for flavor in (Flavor.SMALL, Flavor.BIG):
            inside = membership_codes(grid, R, flavor) == IN
            bad = inside & (gap <= -1e-9)
            total_in += int(inside.sum())
            total_violations += int(bad.sum())
            min_margin = float(gap[inside].min()) if inside.any() else None
            report.rows.append([R, flavor.value, int(inside.sum()), int(bad.sum()), min_margin])
            for k in np.flatnonzero(bad)[:5]:
                report.witnesses.append({"R": R, "flavor": flavor.value, "z": Z[k], "image": images[k], "margin": gap[k]})
    report.verdict_counts = {"in_source": total_in, "violations": total_violations}
    report.data["vacuous"] = total_in == 0
    report.passed = total_violations == 0
    if report.data["vacuous"]:
        report.note("no sampled point is In; the inclusion holds vacuously")
    return report


# ---------------------------------------------------------------------------
# Disc regularity and the Jordan dichotomy
# ---------------------------------------------------------------------------

def metrically_regular_probe(
    pairs: Sequence[Tuple[complex, complex]] = ((1, -1),),
    R_schedule: Optional[Sequence[float]] = None,
    resolution: int = 400,
    count: int = 200,
    seed: int = 0,
) -> ProbeReport:
    """
    Metric regularity of the disc at sampled scale

    (1) horofunction limits exist: raw tail brackets have zero width
    (2) horoballs at distinct centers separate: below R_sep = |xi_1 - xi_2|/2 the
        rasterized intersection of the two open horodiscs is empty, and the
        horodiscs differ for every R
    """
    R_schedule = list(R_schedule or get_settings().r_schedule)
    backend = ExactDisc()
    disc = unit_disc()
    Z = sample_interior(disc, count, seed, min_depth=0.05)
    report = ProbeReport(
        kind="metrically_regular",
        parameters={"pairs": [list(p) for p in pairs], "R_schedule": R_schedule, "resolution": resolution},
        columns=["xi1", "xi2", "R", "below_separation", "overlap_pixels"],
    )
    axis = np.linspace(-1.0, 1.0, resolution + 1 if resolution % 2 == 0 else resolution)
    Xg, Yg = np.meshgrid(axis, axis)
    pixels = (Xg + 1j * Yg).ravel()
    widest = 0.0
    separated = True
    distinct = True
    for xi1, xi2 in pairs:
        xi1, xi2 = complex(xi1), complex(xi2)
        if abs(xi1 - xi2) < 1e-12:
            raise DomainError("Separation needs two distinct boundary points")
        for xi in (xi1, xi2):
            grid = horofunction_grid(backend, 0j, Z, make_boundary_point(disc, xi))
            widest = max(widest, float(np.max(grid.raw_hi - grid.raw_lo)))
        R_sep = abs(xi1 - xi2) / 2
        for R in sorted(set(R_schedule) | {R_sep}):
            c1, r1 = disc_horoball_geometry(xi1, R)
            c2, r2 = disc_horoball_geometry(xi2, R)
            distinct &= abs(c1 - c2) > 0
            overlap = int(np.sum((np.abs(pixels - c1) < r1) & (np.abs(pixels - c2) < r2)))
            below = R <= R_sep
            if below and overlap:
                separated = False
            report.rows.append([xi1, xi2, R, below, overlap])
        report.witnesses.append({"xi1": xi1, "xi2": xi2, "R_separation": R_sep})
    limits_exist = widest < 1e-6
    report.data.update({"limits_exist": limits_exist, "widest_bracket": widest, "separated": separated, "distinct_horoballs": distinct})
    report.passed = limits_exist and separated and distinct
    return report


def jordan_dichotomy_report(
    uniformizer: MapDescriptor,
    two_sided: Optional[complex] = None,
    count: int = 24,
    seed: int = 0,
    R_schedule: Optional[Sequence[float]] = None,
    scan_count: int = 4000,
) -> ProbeReport:
    """
    Which horn of the dichotomy the evidence supports for a planar domain

    Horn 1: the Riemann map extends homeomorphically (Jordan domain).
    Horn 2: some small horosphere at a two-sided boundary point is empty.

    Args:
        uniformizer: map from the domain onto the disc
        two_sided: location of a two-sided boundary point to scan; found from samples when omitted
    """
    if uniformizer.target.kind != DomainKind.UNIT_DISC:
        raise DomainError(f"{uniformizer.name} does not map onto the disc")
    domain = uniformizer.source
    riemann = uniformizer.inverted()
    ext = extension_verdict(riemann, count=count, seed=seed)
    report = ProbeReport(kind="jordan_dichotomy", parameters={"domain": domain.label, "map": riemann.name, "seed": seed})
    report.data["extension_verdict"] = ext.verdict.value

    if two_sided is None:
        tagged = [b for b in sample_boundary(domain, count, seed) if b.side_tag is not None and b.smooth]
        two_sided = tagged[0].z if tagged else None
    witness = None
    if two_sided is not None:
        sides = boundary_sides(domain, two_sided)
        if len(sides) == 2:
            o = complex(uniformizer.inverse(np.asarray(0j)))
            scan = small_emptiness_scan(backend_for(domain), o, sides, R_schedule, count=scan_count)
            empty = [row[0] for row in scan.rows if row[1] == 0]
            report.data["scan"] = {"R0_empirical": scan.data["R0_empirical"], "R_separation": scan.data.get("R_separation")}
            if empty:
                witness = {"x": two_sided, "R": max(empty)}

    if ext.verdict == ExtensionVerdict.HOMEOMORPHIC:
        report.data["horn"] = "homeomorphic extension"
    elif witness is not None:
        report.data["horn"] = "empty small horosphere"
        report.witnesses.append(witness)
    else:
        report.data["horn"] = "undecided"
    logger.info(f"Dichotomy for {domain.label}: {report.data['horn']}")
    return report
