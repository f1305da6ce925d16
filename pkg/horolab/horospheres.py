"""
horospheres.py
Horofunctions and horosphere membership

For a pole o and a boundary target x the horofunction at z is the limit of
k(z, w) - k(o, w) as w -> x. Along each approach scheme the tail of that
sequence is bracketed; the small horosphere uses the limsup bracket (hi), the
big horosphere the liminf bracket (lo):

    H^s(x, R) = {z : hi(z) < log(R)/2}      H^b(x, R) = {z : lo(z) < log(R)/2}

A finite scheme menu can certify In for the big flavor through one scheme and
Out for the small flavor only for the tested schemes; reports name the schemes.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from horolab.config import get_settings
from horolab.conformal import SLIT_POLE, boundary_value
from horolab.domains import (
    NORMAL,
    ApproachScheme,
    BoundaryPoint,
    DomainDescriptor,
    approach_sequence,
    as_point,
    as_points,
    boundary_distances,
    boundary_sides,
    contains_many,
    make_boundary_point,
    sample_boundary,
    sample_interior,
    slit_disc,
)
from horolab.errors import DomainError, NumericalError
from horolab.metrics import ConformalPullback, ExactBall, ExactDisc, GridSurrogate, MetricBackend
from horolab.reports import ProbeReport, verdict_counts

logger = logging.getLogger(__name__)

IN, OUT, UNDETERMINED = 1, -1, 0
ROW_CHUNK = 4096

Targets = Union[BoundaryPoint, Sequence[BoundaryPoint]]


class Flavor(Enum):
    SMALL = "small"
    BIG = "big"


class Verdict(Enum):
    IN = "In"
    OUT = "Out"
    UNDETERMINED = "Undetermined"


_CODE_TO_VERDICT = {IN: Verdict.IN, OUT: Verdict.OUT, UNDETERMINED: Verdict.UNDETERMINED}


@dataclass
class SchemeTail:
    """Tail statistics of one (scheme, side) approach"""
    scheme: str
    side_tag: Optional[str]
    terms: int
    sup: float
    inf: float
    oscillation: float
    stabilized: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "scheme": self.scheme,
            "side_tag": self.side_tag,
            "terms": self.terms,
            "sup": self.sup,
            "inf": self.inf,
            "oscillation": self.oscillation,
            "stabilized": self.stabilized,
        }


@dataclass
class HorofunctionGrid:
    """Horofunction brackets over a batch of observation points"""
    lo: np.ndarray
    hi: np.ndarray
    error: np.ndarray
    oscillation: np.ndarray
    stabilized: np.ndarray
    raw_lo: np.ndarray
    raw_hi: np.ndarray
    scheme_sups: np.ndarray = field(repr=False)
    scheme_infs: np.ndarray = field(repr=False)
    labels: List[str] = field(default_factory=list)
    collapsed: bool = False
    skipped: List[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.lo)


@dataclass
class HorofunctionEstimate:
    """liminf/limsup bracket of k(z, w) - k(o, w) as w -> x"""
    lo: float
    hi: float
    error: float
    stabilized: bool
    pole: np.ndarray
    observation: np.ndarray
    targets: List[BoundaryPoint]
    tails: List[SchemeTail]
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    @property
    def schemes(self) -> List[str]:
        return [t.scheme for t in self.tails]

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lo": self.lo,
            "hi": self.hi,
            "error": self.error,
            "stabilized": self.stabilized,
            "pole": self.pole,
            "observation": self.observation,
            "targets": [t.to_dict() for t in self.targets],
            "tails": [t.to_dict() for t in self.tails],
            "diagnostics": self.diagnostics,
        }


@dataclass
class MembershipVerdict:
    """In / Out / Undetermined with the interval that decided it"""
    verdict: Verdict
    flavor: Flavor
    R: float
    threshold: float
    margin: float
    interval: Tuple[float, float]
    error: float
    certifying_scheme: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "verdict": self.verdict.value,
            "flavor": self.flavor.value,
            "R": self.R,
            "threshold": self.threshold,
            "margin": self.margin,
            "interval": list(self.interval),
            "error": self.error,
            "certifying_scheme": self.certifying_scheme,
        }


# ---------------------------------------------------------------------------
# Horofunction estimation
# ---------------------------------------------------------------------------

def _as_targets(domain: DomainDescriptor, x: Targets) -> List[BoundaryPoint]:
    targets = [x] if isinstance(x, BoundaryPoint) else list(x)
    if not targets:
        raise DomainError("No boundary target given")
    for t in targets:
        if t.domain != domain:
            raise DomainError(f"Boundary point {t} belongs to {t.domain.label}, not {domain.label}")
    return targets


def _schemes(schemes: Optional[Sequence[Any]]) -> List[ApproachScheme]:
    if not schemes:
        return [NORMAL]
    return [ApproachScheme.parse(s) for s in schemes]


def _approach(backend: MetricBackend, x: BoundaryPoint, scheme: ApproachScheme, n_max: int) -> np.ndarray:
    W = approach_sequence(backend.domain, x, scheme, n=n_max)
    if isinstance(backend, GridSurrogate):
        W = W[boundary_distances(backend.domain, W) >= 2 * backend.h]
        if len(W) < 2:
            raise NumericalError(f"Grid resolution h={backend.h} leaves fewer than two approach points toward {x}")
    return W


def _distances_to_approach(backend: MetricBackend, Z: np.ndarray, W: np.ndarray) -> np.ndarray:
    if isinstance(backend, GridSurrogate):
        return backend.pairwise(W, Z).T
    out = np.empty((len(Z), len(W)))
    for start in range(0, len(Z), ROW_CHUNK):
        out[start:start + ROW_CHUNK] = backend.pairwise(Z[start:start + ROW_CHUNK], W)
    return out


def horofunction_grid(
    backend: MetricBackend,
    o: Any,
    Z: Any,
    x: Targets,
    schemes: Optional[Sequence[Any]] = None,
    n_max: Optional[int] = None,
) -> HorofunctionGrid:
    """
    Horofunction brackets at many observation points

    Args:
        backend: distance backend
        o: pole
        Z: observation points, shape (N, dim)
        x: boundary target, or several side-tagged targets evaluated jointly
        schemes: approach schemes (default: normal)
        n_max: approach length

    Returns:
        HorofunctionGrid; hi is the max over (scheme, side) of the tail sup,
        lo the min of the tail inf

    Raises:
        DomainError: no scheme admissible at any target
    """
    settings = get_settings()
    domain = backend.domain
    n_max = n_max or settings.n_max
    window = settings.stabilization_window
    o = as_point(domain, o)
    Z = as_points(domain, Z)
    targets = _as_targets(domain, x)
    sups, infs, oscs, errs, stable, labels, skipped = [], [], [], [], [], [], []
    for target in targets:
        for scheme in _schemes(schemes):
            label = scheme.label + (f"@{target.side_tag}" if target.side_tag else "")
            try:
                W = _approach(backend, target, scheme, n_max)
            except DomainError as e:
                logger.warning(f"Skipping scheme {label}: {e}")
                skipped.append(label)
                continue
            D_zw = _distances_to_approach(backend, Z, W)
            D_ow = backend.paired(o[None, :], W)
            tail = (D_zw - D_ow[None, :])[:, -window:]
            sup = tail.max(axis=1)
            inf = tail.min(axis=1)
            sups.append(sup)
            infs.append(inf)
            oscs.append(sup - inf)
            stable.append((sup - inf < settings.oscillation_tolerance) & (tail.shape[1] >= window))
            errs.append(_tail_error(backend, Z, o, W[-window:], D_zw[:, -window:], D_ow[-window:]))
            labels.append(label)
    if not sups:
        raise DomainError(f"No approach scheme is admissible at {targets}")

    S = np.stack(sups)
    I = np.stack(infs)
    hi = S.max(axis=0)
    lo = I.min(axis=0)
    stabilized = np.all(np.stack(stable), axis=0)
    if not np.all(stabilized):
        logger.warning(f"{int(np.sum(~stabilized))} of {len(Z)} horofunction tails did not stabilize on {backend.label}")
    collapsed = isinstance(backend, (ExactDisc, ExactBall))
    raw_lo, raw_hi = lo.copy(), hi.copy()
    if collapsed:
        lo = hi = (raw_lo + raw_hi) / 2
    return HorofunctionGrid(
        lo=lo,
        hi=hi,
        error=np.max(np.stack(errs), axis=0),
        oscillation=np.max(np.stack(oscs), axis=0),
        stabilized=stabilized,
        raw_lo=raw_lo,
        raw_hi=raw_hi,
        scheme_sups=S,
        scheme_infs=I,
        labels=labels,
        collapsed=collapsed,
        skipped=skipped,
    )


def _tail_error(backend, Z, o, W_tail, D_zw, D_ow) -> np.ndarray:
    if isinstance(backend, GridSurrogate):
        bz = boundary_distances(backend.domain, Z)
        bw = boundary_distances(backend.domain, W_tail)
        bo = boundary_distances(backend.domain, o[None, :])
        e = backend.grid.error_bound(D_zw, bz[:, None], bw[None, :]) + backend.grid.error_bound(D_ow, bo, bw)[None, :]
        return e.max(axis=1)
    return np.full(len(Z), 2 * backend.error_bound)


def horofunction_interval(
    backend: MetricBackend,
    o: Any,
    z: Any,
    x: Targets,
    schemes: Optional[Sequence[Any]] = None,
    n_max: Optional[int] = None,
) -> HorofunctionEstimate:
    """
    liminf/limsup bracket of k(z, w_k) - k(o, w_k) along the scheme menu

    Returns:
        HorofunctionEstimate; on ExactDisc/ExactBall the bracket is collapsed
        to its midpoint and the raw bracket kept in diagnostics

    Raises:
        DomainError: no scheme admissible
    """
    domain = backend.domain
    z = as_point(domain, z)
    grid = horofunction_grid(backend, o, z[None, :], x, schemes, n_max)
    targets = _as_targets(domain, x)
    tails = []
    window = get_settings().stabilization_window
    for k, label in enumerate(grid.labels):
        scheme, _, tag = label.partition("@")
        sup, inf = float(grid.scheme_sups[k, 0]), float(grid.scheme_infs[k, 0])
        tails.append(SchemeTail(scheme, tag or None, window, sup, inf, sup - inf, sup - inf < get_settings().oscillation_tolerance))
    diagnostics = {"raw_lo": float(grid.raw_lo[0]), "raw_hi": float(grid.raw_hi[0]), "collapsed": grid.collapsed}
    if grid.skipped:
        diagnostics["skipped_schemes"] = grid.skipped
    return HorofunctionEstimate(
        lo=float(grid.lo[0]),
        hi=float(grid.hi[0]),
        error=float(grid.error[0]),
        stabilized=bool(grid.stabilized[0]),
        pole=as_point(domain, o),
        observation=z,
        targets=targets,
        tails=tails,
        diagnostics=diagnostics,
    )


# ---------------------------------------------------------------------------
# Membership
# ---------------------------------------------------------------------------

def membership_codes(grid: HorofunctionGrid, R: float, flavor: Union[Flavor, str], margin: Optional[float] = None) -> np.ndarray:
    """
    Vectorized verdicts: +1 In, -1 Out, 0 Undetermined

    small tests hi, big tests lo; In needs value + error below the threshold
    for both flavors. Unstabilized tails widen the error by their oscillation.
    """
    if R <= 0:
        raise DomainError(f"Horosphere radius must be positive, got {R}")
    flavor = Flavor(flavor)
    margin = margin if margin is not None else get_settings().membership_margin
    threshold = 0.5 * math.log(R)
    value = grid.hi if flavor == Flavor.SMALL else grid.lo
    slack = grid.error + np.where(grid.stabilized, 0.0, grid.oscillation)
    codes = np.zeros(len(value), dtype=int)
    codes[value + slack <= threshold - margin] = IN
    codes[value - slack >= threshold + margin] = OUT
    return codes


def horosphere_membership(
    backend: MetricBackend,
    o: Any,
    x: Targets,
    R: float,
    z: Any,
    flavor: Union[Flavor, str],
    schemes: Optional[Sequence[Any]] = None,
    estimate: Optional[HorofunctionEstimate] = None,
) -> MembershipVerdict:
    """
    Decide whether z lies in the small or big horosphere of radius R at x

    small: In iff hi + error clears log(R)/2 by the margin
    big:   In iff lo + error clears it; the scheme with the lowest tail inf certifies

    Raises:
        DomainError: R <= 0
    """
    if R <= 0:
        raise DomainError(f"Horosphere radius must be positive, got {R}")
    flavor = Flavor(flavor)
    est = estimate or horofunction_interval(backend, o, z, x, schemes)
    grid = HorofunctionGrid(
        lo=np.array([est.lo]),
        hi=np.array([est.hi]),
        error=np.array([est.error]),
        oscillation=np.array([max((t.oscillation for t in est.tails), default=0.0)]),
        stabilized=np.array([est.stabilized]),
        raw_lo=np.array([est.lo]),
        raw_hi=np.array([est.hi]),
        scheme_sups=np.zeros((0, 1)),
        scheme_infs=np.zeros((0, 1)),
    )
    margin = get_settings().membership_margin
    code = int(membership_codes(grid, R, flavor, margin)[0])
    certifying = None
    if code == IN and flavor == Flavor.BIG and est.tails:
        best = min(est.tails, key=lambda t: t.inf)
        certifying = best.scheme + (f"@{best.side_tag}" if best.side_tag else "")
    return MembershipVerdict(
        verdict=_CODE_TO_VERDICT[code],
        flavor=flavor,
        R=R,
        threshold=0.5 * math.log(R),
        margin=margin,
        interval=(est.lo, est.hi),
        error=est.error,
        certifying_scheme=certifying,
    )


# ---------------------------------------------------------------------------
# Disc closed forms
# ---------------------------------------------------------------------------

def disc_horofunction_exact(z: Any, x: Any) -> Any:
    """
    Horofunction of the disc with pole 0: log(|x - z|^2 / (1 - |z|^2)) / 2

    Raises:
        DomainError: |z| >= 1 or |x| != 1
    """
    z = np.asarray(z, dtype=complex)
    x = np.asarray(x, dtype=complex)
    if np.any(np.abs(z) >= 1):
        raise DomainError("Observation point must lie in the unit disc")
    if np.any(np.abs(np.abs(x) - 1) > 1e-9):
        raise DomainError("Horofunction target must be unimodular")
    value = 0.5 * (2 * np.log(np.abs(x - z)) - np.log1p(-np.abs(z) ** 2))
    return float(value) if np.ndim(value) == 0 else value


def disc_horoball_geometry(x: complex, R: float, o: complex = 0j) -> Tuple[complex, float]:
    """
    Euclidean center and radius of the disc horoball {h_o < log(R)/2} at x

    With pole 0 this is the disc of center x/(1+R) and radius R/(1+R); another
    pole rescales R by |x - o|^2 / (1 - |o|^2).
    """
    x = complex(x)
    o = complex(o)
    if R <= 0:
        raise DomainError(f"Horoball radius must be positive, got {R}")
    if abs(abs(x) - 1) > 1e-9:
        raise DomainError("Horoball center must be unimodular")
    if abs(o) >= 1:
        raise DomainError("Pole must lie in the unit disc")
    r_eff = R * abs(x - o) ** 2 / (1 - abs(o) ** 2)
    return x / (1 + r_eff), r_eff / (1 + r_eff)


@dataclass
class RasterCheck:
    """Double-inclusion check of a sublevel raster against the Euclidean horodisc"""
    R: float
    resolution: int
    band: int
    inside_pixels: int
    mismatches: int
    band_mismatches: int

    @property
    def ok(self) -> bool:
        return self.mismatches == 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "R": self.R,
            "resolution": self.resolution,
            "band": self.band,
            "inside_pixels": self.inside_pixels,
            "mismatches": self.mismatches,
            "band_mismatches": self.band_mismatches,
            "ok": self.ok,
        }


def horoball_raster_check(
    x: complex, R: float, resolution: int = 600, band: int = 2, backend: Optional[MetricBackend] = None
) -> RasterCheck:
    """
    Rasterize {horofunction < log(R)/2} and compare it with the Euclidean disc

    Pixels within `band` pixel widths of the disc's circle are not counted as
    mismatches. With a backend, the estimator is rasterized; otherwise the
    closed form.
    """
    if resolution <= 1:
        raise DomainError("Raster resolution must exceed one pixel")
    center, radius = disc_horoball_geometry(x, R)
    axis = np.linspace(-1.0, 1.0, resolution)
    px = axis[1] - axis[0]
    Xg, Yg = np.meshgrid(axis, axis)
    Z = (Xg + 1j * Yg).ravel()
    interior = np.abs(Z) < 1
    thr = 0.5 * math.log(R)
    sub = np.zeros(len(Z), dtype=bool)
    if backend is None:
        sub[interior] = disc_horofunction_exact(Z[interior], x) < thr
    else:
        target = make_boundary_point(backend.domain, x)
        grid = horofunction_grid(backend, 0j, Z[interior][:, None], target)
        sub[interior] = grid.hi < thr
    disc = np.abs(Z - center) < radius
    differ = sub != disc
    in_band = np.abs(np.abs(Z - center) - radius) <= band * px
    return RasterCheck(
        R=R,
        resolution=resolution,
        band=band,
        inside_pixels=int(np.sum(disc)),
        mismatches=int(np.sum(differ & ~in_band)),
        band_mismatches=int(np.sum(differ & in_band)),
    )


# ---------------------------------------------------------------------------
# Boundary traces
# ---------------------------------------------------------------------------

def boundary_trace_probe(
    backend: MetricBackend,
    o: Any,
    x: BoundaryPoint,
    R: float,
    flavor: Union[Flavor, str],
    samples: Optional[Sequence[BoundaryPoint]] = None,
    depth: Optional[int] = None,
    count: int = 64,
    seed: int = 0,
    schemes: Optional[Sequence[Any]] = None,
) -> ProbeReport:
    """
    Which boundary points lie in the closure of a horosphere

    For each boundary sample y, interior points at depths 2^-1 .. 2^-d (scaled
    by y's admissible depth t0) along y's inward direction are tested; y is in
    the trace when every depth is In. Samples within the exclusion radius of x
    are dropped unless they sit on the other side of x, x itself is always
    tested first.
    """
    settings = get_settings()
    flavor = Flavor(flavor)
    depth = depth or settings.persistence_depth
    domain = backend.domain
    o = as_point(domain, o)
    if samples is None:
        samples = sample_boundary(domain, count, seed)
    kept = [x]
    excluded = 0
    for y in samples:
        if y.side_tag and x.side_tag and y.side_tag != x.side_tag:
            kept.append(y)
            continue
        if float(np.sqrt(np.sum(np.abs(y.coordinates - x.coordinates) ** 2))) < settings.trace_exclusion_radius:
            excluded += 1
            continue
        kept.append(y)

    scales = 2.0 ** -np.arange(1, depth + 1)
    blocks = []
    for y in kept:
        blocks.append(y.coordinates[None, :] + (y.t0 * scales)[:, None] * y.inward_normal[None, :])
    P = np.concatenate(blocks)
    usable = contains_many(domain, P)
    if isinstance(backend, GridSurrogate):
        usable[usable] = boundary_distances(domain, P[usable]) >= 2 * backend.h
    codes = np.zeros(len(P), dtype=int)
    grid = horofunction_grid(backend, o, P[usable], x, schemes)
    codes[usable] = membership_codes(grid, R, flavor)
    codes = codes.reshape(len(kept), depth)
    resolved = usable.reshape(len(kept), depth)
    in_trace = np.all((codes == IN) | ~resolved, axis=1) & np.any(resolved, axis=1)

    report = ProbeReport(
        kind="boundary_trace",
        parameters={
            "backend": backend.label,
            "o": o,
            "x": x,
            "R": R,
            "flavor": flavor.value,
            "depth": depth,
            "exclusion_radius": settings.trace_exclusion_radius,
            "samples": len(samples),
            "seed": seed,
        },
        columns=["index", "point", "side_tag", "in_trace", "deepest_verdict"],
    )
    trace_points = []
    for i, y in enumerate(kept):
        deepest = _CODE_TO_VERDICT[int(codes[i, -1])].value
        report.rows.append([i, y.coordinates, y.side_tag or "", bool(in_trace[i]), deepest])
        if in_trace[i]:
            trace_points.append(y)
            if i > 0:
                report.witnesses.append({"point": y, "verdicts": codes[i].tolist()})
    report.verdict_counts = verdict_counts(codes[1:, -1])
    report.verdict_counts["trace_size"] = len(trace_points)
    report.data.update({
        "trace": trace_points,
        "x_in_all_depths": bool(in_trace[0]),
        "excluded": excluded,
        "deepest_codes": codes[:, -1],
    })
    logger.info(f"Trace probe at {x}, R={R:.4g}, {flavor.value}: {len(trace_points)} trace points of {len(kept)} tested")
    return report


# ---------------------------------------------------------------------------
# Thresholds and scans
# ---------------------------------------------------------------------------

@dataclass
class EmptinessThreshold:
    """Radius below which the big horosphere at x is empty"""
    applicable: bool
    M: Optional[float]
    threshold: Optional[float]
    checked_R: Optional[float] = None
    scanned: int = 0
    violations: int = 0
    undetermined: int = 0
    note: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "applicable": self.applicable,
            "M": self.M,
            "threshold": self.threshold,
            "checked_R": self.checked_R,
            "scanned": self.scanned,
            "violations": self.violations,
            "undetermined": self.undetermined,
            "note": self.note,
        }


def emptiness_threshold(
    backend: MetricBackend,
    o: Any,
    x: BoundaryPoint,
    schemes: Optional[Sequence[Any]] = None,
    Z: Any = None,
    count: int = 10_000,
    seed: int = 0,
    tolerance: float = 1e-3,
) -> EmptinessThreshold:
    """
    M = limsup k(o, w) as w -> x, and the emptiness radius e^{-2M}

    When k(o, w_k) does not stabilize (complete domains) the threshold is
    reported as not applicable. Otherwise the big horosphere of radius
    e^{-2M}(1 - tolerance) is checked to have no In verdict on the scan points.
    """
    settings = get_settings()
    domain = backend.domain
    o = as_point(domain, o)
    window = settings.stabilization_window
    sups = []
    for scheme in _schemes(schemes):
        try:
            W = _approach(backend, x, scheme, settings.n_max)
        except DomainError as e:
            logger.warning(f"Skipping scheme {scheme.label}: {e}")
            continue
        tail = backend.paired(o[None, :], W)[-window:]
        if tail.max() - tail.min() >= settings.oscillation_tolerance:
            return EmptinessThreshold(False, None, None, note=f"k(o, w) diverges along {scheme.label}; complete case")
        sups.append(float(tail.max()))
    if not sups:
        raise DomainError(f"No approach scheme is admissible at {x}")
    M = max(sups)
    threshold = math.exp(-2 * M)
    Z = sample_interior(domain, count, seed) if Z is None else as_points(domain, Z)
    R_check = threshold * (1 - tolerance)
    codes = membership_codes(horofunction_grid(backend, o, Z, x, schemes), R_check, Flavor.BIG)
    result = EmptinessThreshold(
        applicable=True,
        M=M,
        threshold=threshold,
        checked_R=R_check,
        scanned=len(Z),
        violations=int(np.sum(codes == IN)),
        undetermined=int(np.sum(codes == UNDETERMINED)),
    )
    if result.violations:
        logger.warning(f"{result.violations} In(big) verdicts below the emptiness threshold {threshold:.6g}")
    return result


@dataclass
class PoleChange:
    """L with H^b_p(x, R) inside H^b_o(x, LR)"""
    L: float
    half_log_L: float
    checked: int
    violations: int
    R_values: List[float]

    def to_dict(self) -> Dict[str, Any]:
        return {"L": self.L, "half_log_L": self.half_log_L, "checked": self.checked, "violations": self.violations, "R_values": self.R_values}


def pole_change_constant(
    backend: MetricBackend,
    o: Any,
    p: Any,
    x: BoundaryPoint,
    R_values: Sequence[float] = (0.5, 1.0, 2.0),
    Z: Any = None,
    count: int = 1000,
    seed: int = 0,
) -> PoleChange:
    """
    log(L)/2 = limsup k(p, w) - k(o, w); checks the inclusion on a sample

    A violation is a point certified In(big) for pole p at R and certified
    Out(big) for pole o at LR.
    """
    domain = backend.domain
    est = horofunction_interval(backend, o, p, x)
    L = math.exp(2 * est.hi)
    Z = sample_interior(domain, count, seed) if Z is None else as_points(domain, Z)
    grid_p = horofunction_grid(backend, p, Z, x)
    grid_o = horofunction_grid(backend, o, Z, x)
    violations = 0
    for R in R_values:
        inside_p = membership_codes(grid_p, R, Flavor.BIG) == IN
        outside_o = membership_codes(grid_o, L * R, Flavor.BIG) == OUT
        violations += int(np.sum(inside_p & outside_o))
    return PoleChange(L=L, half_log_L=est.hi, checked=len(Z) * len(R_values), violations=violations, R_values=list(R_values))


def scan_lattice(domain: DomainDescriptor, count: int) -> np.ndarray:
    """Cell centers of a square lattice over the domain window with at least `count` interior points"""
    if not domain.planar:
        raise DomainError("Lattice scans are planar")
    x0, x1, y0, y1 = domain.window if domain.window is not None else (-1.0, 1.0, -1.0, 1.0)
    n = max(2, int(math.ceil(math.sqrt(count))))
    while True:
        xs = x0 + (np.arange(n) + 0.5) * (x1 - x0) / n
        ys = y0 + (np.arange(n) + 0.5) * (y1 - y0) / n
        Xg, Yg = np.meshgrid(xs, ys)
        Z = (Xg + 1j * Yg).ravel()
        Z = Z[contains_many(domain, Z)]
        if len(Z) >= count:
            return Z[:, None]
        n = int(math.ceil(n * 1.1))


def separation_threshold(backend: ConformalPullback, o: Any, targets: Sequence[BoundaryPoint]) -> float:
    """
    Largest R for which the disc horoballs at the two boundary images are disjoint

    After moving the pole's image to 0 the horodiscs at xi_1, xi_2 are
    disjoint exactly when R <= |xi_1 - xi_2| / 2.
    """
    if len(targets) != 2:
        raise DomainError("Separation threshold needs exactly two targets")
    chart = backend.chart
    a = complex(chart.forward(np.asarray(as_point(backend.domain, o)[0])))
    xi = [boundary_value(chart, t) for t in targets]
    moved = [(v - a) / (1 - np.conj(a) * v) for v in xi]
    return abs(moved[0] - moved[1]) / 2


def small_emptiness_scan(
    backend: MetricBackend,
    o: Any,
    targets: Sequence[BoundaryPoint],
    R_schedule: Optional[Sequence[float]] = None,
    Z: Any = None,
    count: int = 10_000,
) -> ProbeReport:
    """
    Scan small and big horosphere membership jointly over several boundary targets

    hi is the max over all targets and schemes, so a point is In(small) only
    if it is In for every side. R0 is the smallest scheduled R with an
    In(small) verdict; the schedule is scanned in ascending order.
    """
    settings = get_settings()
    R_schedule = sorted(R_schedule or settings.r_schedule)
    domain = backend.domain
    o = as_point(domain, o)
    Z = scan_lattice(domain, count) if Z is None else as_points(domain, Z)
    grid = horofunction_grid(backend, o, Z, targets)
    report = ProbeReport(
        kind="small_emptiness_scan",
        parameters={"backend": backend.label, "o": o, "targets": list(targets), "R_schedule": R_schedule, "points": len(Z)},
        columns=["R", "in_small", "in_big", "undetermined_small", "undetermined_big"],
    )
    R0 = None
    counts = []
    for R in R_schedule:
        small = membership_codes(grid, R, Flavor.SMALL)
        big = membership_codes(grid, R, Flavor.BIG)
        row = [R, int(np.sum(small == IN)), int(np.sum(big == IN)), int(np.sum(small == UNDETERMINED)), int(np.sum(big == UNDETERMINED))]
        report.rows.append(row)
        counts.append(row)
        if R0 is None and row[1] > 0:
            R0 = R
        logger.info(f"R={R:.4g}: {row[1]} In(small), {row[2]} In(big) of {len(Z)}")
    below = [c for c in counts if R0 is None or c[0] < R0]
    report.data.update({
        "R0_empirical": R0,
        "empty_below_R0": all(c[1] == 0 for c in below),
        "big_nonempty_below_R0": all(c[2] > 0 for c in below),
        "pole_in_small_at_max_R": bool(membership_codes(horofunction_grid(backend, o, o[None, :], targets), max(R_schedule), Flavor.SMALL)[0] == IN),
    })
    if isinstance(backend, ConformalPullback) and len(targets) == 2:
        report.data["R_separation"] = separation_threshold(backend, o, targets)
    report.witnesses = [{"R": c[0], "in_small": c[1], "in_big": c[2]} for c in below]
    return report


def slit_emptiness_scan(
    o: Any = SLIT_POLE,
    x: float = 0.5,
    R_schedule: Optional[Sequence[float]] = None,
    count: int = 10_000,
    backend: Optional[MetricBackend] = None,
) -> ProbeReport:
    """Small-horosphere emptiness at a slit point, both sides jointly"""
    if not 0 < x <= 1:
        raise DomainError(f"Slit point must lie in (0, 1], got {x}")
    backend = backend or ConformalPullback(slit_disc())
    targets = boundary_sides(backend.domain, x)
    report = small_emptiness_scan(backend, o, targets, R_schedule, count=count)
    report.kind = "slit_emptiness_scan"
    report.parameters["x"] = x
    return report


def nonempty_big_check(
    backend: MetricBackend, o: Any, x: BoundaryPoint, R_schedule: Optional[Sequence[float]] = None
) -> ProbeReport:
    """
    Big horospheres of a complete domain are nonempty for every R

    The approach points themselves serve as observation points; for each R
    some of them must be In(big).
    """
    if not backend.complete:
        raise DomainError(f"Nonemptiness of big horospheres needs a complete backend, got {backend.label}")
    R_schedule = list(R_schedule or get_settings().r_schedule)
    W = _approach(backend, x, NORMAL, get_settings().n_max)
    grid = horofunction_grid(backend, o, W[: len(W) // 2], x)
    report = ProbeReport(
        kind="nonempty_big",
        parameters={"backend": backend.label, "o": as_point(backend.domain, o), "x": x, "R_schedule": R_schedule},
        columns=["R", "in_big"],
    )
    for R in R_schedule:
        report.rows.append([R, int(np.sum(membership_codes(grid, R, Flavor.BIG) == IN))])
    report.passed = all(r[1] > 0 for r in report.rows)
    return report
