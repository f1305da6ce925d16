"""
metrics.py
Kobayashi distance backends for horolab

Distance oracles on the model domains:
- ExactDisc / ExactBall / ExactPolydiscMax: closed forms
- ConformalPullback: disc distance after a closed-form uniformizing chart
- GridSurrogate: quasihyperbolic shortest paths (comparability factor 4)

Also the distance bounds used by the horosphere experiments: Kobayashi ball
membership, localization gaps, Mercer lower constants and Nikolov-Andreev
upper constants near smooth boundary points.

The closed forms are evaluated as
    k = log1p(rho) + log|1 - <z, w>| - (log(1 - |z|^2) + log(1 - |w|^2)) / 2
which is arctanh(rho) without cancellation when a point nears the boundary.
"""

import csv
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np

from horolab.config import get_settings
from horolab.conformal import MapDescriptor, chart_for
from horolab.domains import (
    BoundaryPoint,
    DomainDescriptor,
    DomainKind,
    as_point,
    as_points,
    boundary_distances,
    contains_many,
    unit_disc,
)
from horolab.errors import DomainError, NumericalError
from horolab.grid_surrogate import grid_for

logger = logging.getLogger(__name__)


class BackendMode(Enum):
    """How a backend evaluates the distance"""
    EXACT_DISC = "ExactDisc"
    EXACT_BALL = "ExactBall"
    EXACT_POLYDISC_MAX = "ExactPolydiscMax"
    CONFORMAL_PULLBACK = "ConformalPullback"
    GRID_SURROGATE = "GridSurrogate"


@dataclass(frozen=True)
class DistanceValue:
    """A distance with its additive error bound"""
    value: float
    error: float = 0.0
    comparability: Optional[float] = None

    @property
    def surrogate(self) -> bool:
        return self.comparability is not None

    def to_dict(self) -> Dict[str, Any]:
        return {"value": self.value, "error": self.error, "comparability": self.comparability}


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------

def _log_one_minus_sq(r2: np.ndarray) -> np.ndarray:
    return np.log1p(-r2)


def disc_distance(z: Any, w: Any) -> Any:
    """Kobayashi (Poincare) distance on the unit disc, broadcasting over arrays"""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    num = np.abs(z - w)
    den = np.abs(1 - np.conj(w) * z)
    rho = np.minimum(num / den, 1.0)
    la = _log_one_minus_sq(np.abs(z) ** 2)
    lb = _log_one_minus_sq(np.abs(w) ** 2)
    k = (np.log1p(rho) + np.log(den)) - 0.5 * (la + lb)
    k = np.where(z == w, 0.0, np.maximum(k, 0.0))
    return float(k) if np.ndim(k) == 0 else k


def ball_distance(Z: np.ndarray, W: np.ndarray) -> np.ndarray:
    """Kobayashi distance on the unit ball; last axis is the coordinate axis"""
    Z = np.asarray(Z, dtype=complex)
    W = np.asarray(W, dtype=complex)
    inner = np.sum(Z * np.conj(W), axis=-1)
    nz = np.sum(np.abs(Z) ** 2, axis=-1)
    nw = np.sum(np.abs(W) ** 2, axis=-1)
    diff = np.sum(np.abs(Z - W) ** 2, axis=-1)
    den = np.abs(1 - inner)
    num2 = np.maximum(diff - nz * nw + np.abs(inner) ** 2, 0.0)
    rho = np.minimum(np.sqrt(num2) / den, 1.0)
    k = (np.log1p(rho) + np.log(den)) - 0.5 * (_log_one_minus_sq(nz) + _log_one_minus_sq(nw))
    same = np.all(Z == W, axis=-1)
    return np.where(same, 0.0, np.maximum(k, 0.0))


def polydisc_distance(Z: np.ndarray, W: np.ndarray) -> np.ndarray:
    """Max over coordinates of the disc distance"""
    return np.max(disc_distance(np.asarray(Z, dtype=complex), np.asarray(W, dtype=complex)), axis=-1)


def half_plane_distance(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Kobayashi distance on the upper half-plane (isometric to the disc via Cayley)"""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    cross = np.abs(u - np.conj(v))
    rho = np.minimum(np.abs(u - v) / cross, 1.0)
    k = (np.log1p(rho) + np.log(cross)) - np.log(2.0) - 0.5 * (np.log(u.imag) + np.log(v.imag))
    return np.where(u == v, 0.0, np.maximum(k, 0.0))


# ---------------------------------------------------------------------------
# Backends
# ---------------------------------------------------------------------------

class MetricBackend:
    """
    Distance oracle on a domain

    Subclasses implement _kernel(Z, W) over broadcast arrays whose last axis
    holds the coordinates.
    """

    mode: BackendMode = BackendMode.EXACT_DISC
    exact: bool = True

    def __init__(self, domain: DomainDescriptor, error_bound: float = 0.0, comparability: Optional[float] = None):
        self.domain = domain
        self.error_bound = float(error_bound)
        self.comparability = comparability
        self.complete = domain.kind != DomainKind.PUNCTURED_BALL

    @property
    def label(self) -> str:
        return f"{self.mode.value}[{self.domain.label}]"

    @property
    def surrogate(self) -> bool:
        return self.comparability is not None

    def _kernel(self, Z: np.ndarray, W: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _validate(self, P: np.ndarray) -> None:
        inside = contains_many(self.domain, P)
        if not np.all(inside):
            bad = P[int(np.flatnonzero(~inside)[0])]
            raise DomainError(f"Point {bad} is not interior to {self.domain.label}")

    def errors_for(self, Z: np.ndarray, W: np.ndarray, values: np.ndarray) -> np.ndarray:
        return np.full(np.shape(values), self.error_bound)

    def paired(self, Z: Any, W: Any) -> np.ndarray:
        """Elementwise distances d(Z[k], W[k])"""
        Z = as_points(self.domain, Z)
        W = as_points(self.domain, W)
        if Z.shape != W.shape:
            if len(Z) == 1:
                Z = np.repeat(Z, len(W), axis=0)
            elif len(W) == 1:
                W = np.repeat(W, len(Z), axis=0)
            else:
                raise DomainError(f"Paired batches differ in length: {len(Z)} vs {len(W)}")
        self._validate(Z)
        self._validate(W)
        return self._kernel(Z, W)

    def segment_lengths(self, P: Any, Q: Any) -> np.ndarray:
        """Invariant lengths of the short segments P[k] -> Q[k]"""
        return self.paired(P, Q)

    def pairwise(self, Z: Any, W: Any) -> np.ndarray:
        """Distance matrix between two batches"""
        Z = as_points(self.domain, Z)
        W = as_points(self.domain, W)
        self._validate(Z)
        self._validate(W)
        return self._kernel(Z[:, None, :], W[None, :, :])

    def distance(self, z: Any, w: Any) -> DistanceValue:
        """
        Distance between two interior points

        Raises:
            DomainError: a point lies outside the domain
            NumericalError: grid resolution coarser than an endpoint's boundary distance
        """
        Z = as_point(self.domain, z)[None, :]
        W = as_point(self.domain, w)[None, :]
        value = self.paired(Z, W)
        error = self.errors_for(Z, W, value)
        return DistanceValue(float(value[0]), float(error[0]), self.comparability)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mode": self.mode.value,
            "domain": self.domain.to_dict(),
            "error_bound": self.error_bound,
            "comparability": self.comparability,
        }


class ExactDisc(MetricBackend):
    mode = BackendMode.EXACT_DISC

    def __init__(self, domain: Optional[DomainDescriptor] = None):
        super().__init__(domain or unit_disc())
        if self.domain.kind != DomainKind.UNIT_DISC:
            raise DomainError(f"ExactDisc needs the unit disc, got {self.domain.label}")

    def _kernel(self, Z, W):
        return disc_distance(Z[..., 0], W[..., 0])


class ExactBall(MetricBackend):
    """Ball formula; on a punctured ball it is the ambient ball distance (removable puncture)"""
    mode = BackendMode.EXACT_BALL

    def __init__(self, domain: DomainDescriptor):
        if domain.kind not in (DomainKind.EUCLIDEAN_BALL, DomainKind.PUNCTURED_BALL, DomainKind.UNIT_DISC):
            raise DomainError(f"ExactBall needs a ball, got {domain.label}")
        super().__init__(domain)

    def _kernel(self, Z, W):
        return ball_distance(Z, W)


class PolydiscMax(MetricBackend):
    mode = BackendMode.EXACT_POLYDISC_MAX

    def __init__(self, domain: DomainDescriptor):
        if domain.kind != DomainKind.POLYDISC:
            raise DomainError(f"ExactPolydiscMax needs a polydisc, got {domain.label}")
        super().__init__(domain)

    def _kernel(self, Z, W):
        return polydisc_distance(Z, W)


class ConformalPullback(MetricBackend):
    """Disc distance of chart images; charts with a half-plane form use it for boundary accuracy"""
    mode = BackendMode.CONFORMAL_PULLBACK
    exact = False

    def __init__(self, domain: DomainDescriptor, chart: Optional[MapDescriptor] = None):
        super().__init__(domain, error_bound=get_settings().pullback_tolerance)
        self.chart = chart or chart_for(domain)
        if self.chart.source.kind != domain.kind or self.chart.target.kind != DomainKind.UNIT_DISC:
            raise DomainError(f"Chart {self.chart.name} does not map {domain.label} onto the disc")

    @property
    def label(self) -> str:
        return f"{self.mode.value}({self.chart.name})[{self.domain.label}]"

    def _kernel(self, Z, W):
        z, w = np.broadcast_arrays(Z[..., 0], W[..., 0])
        if self.chart.half_plane is not None:
            return half_plane_distance(self.chart.half_plane(z), self.chart.half_plane(w))
        return disc_distance(self.chart.forward(z), self.chart.forward(w))

    def to_dict(self) -> Dict[str, Any]:
        out = super().to_dict()
        out["chart"] = self.chart.name
        return out


class GridSurrogate(MetricBackend):
    """
    Quasihyperbolic grid surrogate

    Values are evidence, not Kobayashi distances: they are comparable to k
    within the factor 4 on simply-connected planar domains.
    """
    mode = BackendMode.GRID_SURROGATE
    exact = False

    def __init__(self, domain: DomainDescriptor, h: Optional[float] = None):
        settings = get_settings()
        super().__init__(domain, comparability=settings.grid_comparability)
        if not domain.planar:
            raise DomainError(f"GridSurrogate needs a planar domain, got {domain.label}")
        self.h = float(h if h is not None else default_resolution(domain))
        self.grid = grid_for(domain, self.h)

    @property
    def label(self) -> str:
        return f"{self.mode.value}(h={self.h:g})[{self.domain.label}]"

    def errors_for(self, Z, W, values):
        bz = boundary_distances(self.domain, Z)
        bw = boundary_distances(self.domain, W)
        return self.grid.error_bound(values, bz, bw)

    def paired(self, Z, W):
        Z = as_points(self.domain, Z)
        W = as_points(self.domain, W)
        if len(Z) == 1 and len(W) > 1:
            return self.grid.pairwise(Z[:, 0], W[:, 0])[0]
        if len(W) == 1 and len(Z) > 1:
            return self.grid.pairwise(W[:, 0], Z[:, 0])[0]
        return self.grid.paired(Z[:, 0], W[:, 0])

    def pairwise(self, Z, W):
        Z = as_points(self.domain, Z)
        W = as_points(self.domain, W)
        return self.grid.pairwise(Z[:, 0], W[:, 0])

    def segment_lengths(self, P, Q):
        P = as_points(self.domain, P)[:, 0]
        Q = as_points(self.domain, Q)[:, 0]
        cost, ok = self.grid.segment_costs(P, Q, boundary_distances(self.domain, P), boundary_distances(self.domain, Q))
        if not np.all(ok):
            far = np.flatnonzero(~ok)
            cost[far] = self.grid.paired(P[far], Q[far])
        return cost

    def to_dict(self) -> Dict[str, Any]:
        out = super().to_dict()
        out["h"] = self.h
        out["label"] = "surrogate evidence"
        return out


def default_resolution(domain: DomainDescriptor) -> float:
    if domain.kind == DomainKind.LATTICE_DISC_COMPLEMENT:
        return 0.125
    return get_settings().grid_resolution


def backend_for(domain: DomainDescriptor, h: Optional[float] = None) -> MetricBackend:
    """
    Natural backend for a domain kind

    Args:
        domain: domain descriptor
        h: grid resolution for kinds that fall back to the surrogate

    Returns:
        MetricBackend instance
    """
    kind = domain.kind
    if kind == DomainKind.UNIT_DISC:
        return ExactDisc(domain)
    if kind in (DomainKind.EUCLIDEAN_BALL, DomainKind.PUNCTURED_BALL):
        return ExactBall(domain)
    if kind == DomainKind.POLYDISC:
        return PolydiscMax(domain)
    if kind in (DomainKind.SLIT_DISC, DomainKind.HALF_DISC):
        return ConformalPullback(domain)
    return GridSurrogate(domain, h)


def backend_from_dict(data: Dict[str, Any], domain: DomainDescriptor) -> MetricBackend:
    """Backend from its scenario form {mode, h?}"""
    mode = data.get("mode")
    if mode is None:
        return backend_for(domain, data.get("h"))
    if mode == BackendMode.EXACT_DISC.value:
        return ExactDisc(domain)
    if mode == BackendMode.EXACT_BALL.value:
        return ExactBall(domain)
    if mode == BackendMode.EXACT_POLYDISC_MAX.value:
        return PolydiscMax(domain)
    if mode == BackendMode.CONFORMAL_PULLBACK.value:
        return ConformalPullback(domain)
    if mode == BackendMode.GRID_SURROGATE.value:
        return GridSurrogate(domain, data.get("h"))
    raise DomainError(f"Unknown backend mode '{mode}'")


# ---------------------------------------------------------------------------
# Bounds
# ---------------------------------------------------------------------------

def kobayashi_ball_contains(backend: MetricBackend, o: Any, r: float, z: Any) -> bool:
    """True iff distance(o, z) + error < r"""
    d = backend.distance(o, z)
    return d.value + d.error < r


@dataclass
class LocalizationFit:
    """Fitted constant C with k_local <= k_global + C on the sampled pairs"""
    constant: float
    pairs: int
    monotone: bool
    violations: int
    worst_violation: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "constant": self.constant,
            "pairs": self.pairs,
            "monotone": self.monotone,
            "violations": self.violations,
            "worst_violation": self.worst_violation,
        }


def localization_gap(global_backend: MetricBackend, local_backend: MetricBackend, Z: Any, W: Any) -> LocalizationFit:
    """
    Fit the localization constant between a domain and a subdomain patch

    Args:
        global_backend: backend on the larger domain
        local_backend: backend on the subdomain
        Z, W: paired samples inside the subdomain

    Returns:
        LocalizationFit with C = max (k_local - k_global) and the inclusion-monotonicity check
    """
    Zl = as_points(local_backend.domain, Z)
    Wl = as_points(local_backend.domain, W)
    k_local = local_backend.paired(Zl, Wl)
    k_global = global_backend.paired(Zl, Wl)
    slack = local_backend.errors_for(Zl, Wl, k_local) + global_backend.errors_for(Zl, Wl, k_global) + 1e-12
    excess = k_global - k_local - slack
    violations = int(np.sum(excess > 0))
    if violations:
        logger.warning(f"Inclusion monotonicity fails on {violations} of {len(Zl)} pairs")
    return LocalizationFit(
        constant=float(np.max(k_local - k_global)) if len(Zl) else 0.0,
        pairs=len(Zl),
        monotone=violations == 0,
        violations=violations,
        worst_violation=float(max(np.max(excess), 0.0)) if len(Zl) else 0.0,
    )


@dataclass
class MercerFit:
    """Sampled constant C with k(o, w) >= C + log(1/delta(w))/2"""
    constant: float
    excesses: np.ndarray = field(repr=False)
    refinement_fits: List[float] = field(default_factory=list)
    bounded_below: bool = True

    def to_dict(self) -> Dict[str, Any]:
        return {"constant": self.constant, "refinement_fits": self.refinement_fits, "bounded_below": self.bounded_below}


def mercer_constant_fit(backend: MetricBackend, o: Any, samples: Any) -> MercerFit:
    """
    Best sampled Mercer constant for a bounded convex domain

    Args:
        backend: distance backend
        o: base point
        samples: interior points w

    Returns:
        MercerFit; refinement_fits are the fits over nested prefixes of the sample

    Raises:
        DomainError: non-convex or unbounded domain
    """
    domain = backend.domain
    if not (domain.convex and domain.bounded):
        raise DomainError(f"Mercer fit needs a bounded convex domain, got {domain.label}")
    W = as_points(domain, samples)
    k = backend.paired(as_point(domain, o)[None, :], W)
    excess = k + 0.5 * np.log(boundary_distances(domain, W))
    fits = []
    for frac in (0.25, 0.5, 1.0):
        m = max(1, int(len(W) * frac))
        fits.append(float(np.min(excess[:m])))
    bounded = bool(np.all(np.isfinite(fits)))
    return MercerFit(constant=fits[-1], excesses=excess, refinement_fits=fits, bounded_below=bounded)


@dataclass
class NikolovAndreevFit:
    """Minimal c with k(z, w) <= log(1 + c|z - w| / sqrt(delta(z) delta(w))) on the sample"""
    constant: float
    half_fit: float
    ratio: float
    pairs: int

    @property
    def stable(self) -> bool:
        return self.ratio < 1.1

    def to_dict(self) -> Dict[str, Any]:
        return {"constant": self.constant, "half_fit": self.half_fit, "ratio": self.ratio, "pairs": self.pairs, "stable": self.stable}


def patch_samples(domain: DomainDescriptor, x: BoundaryPoint, eps: float, count: int, seed: int = 0) -> np.ndarray:
    """Interior points within eps of x, with log-uniform distance to x"""
    rng = np.random.default_rng(seed)
    n = x.inward_normal
    out: List[np.ndarray] = []
    have = 0
    while have < count:
        batch = 2 * (count - have) + 8
        r = np.exp(rng.uniform(np.log(1e-4 * eps), np.log(eps), batch))
        ang = rng.uniform(-np.pi / 2 + 0.05, np.pi / 2 - 0.05, batch)
        P = x.coordinates[None, :] + (r * np.exp(1j * ang))[:, None] * n[None, :]
        good = P[contains_many(domain, P)]
        out.append(good)
        have += len(good)
    return np.concatenate(out)[:count]


def nikolov_andreev_fit(backend: MetricBackend, x: BoundaryPoint, eps: float, Z: Any, W: Any) -> NikolovAndreevFit:
    """
    Fit the Nikolov-Andreev constant on a boundary patch

    Args:
        backend: distance backend on a convex domain
        x: smooth boundary point
        eps: patch radius
        Z, W: paired samples within eps of x

    Returns:
        NikolovAndreevFit with the fit on all pairs and on the first half

    Raises:
        DomainError: non-convex domain or a pair outside the patch
    """
    domain = backend.domain
    if not domain.convex:
        raise DomainError(f"Nikolov-Andreev fit needs a convex domain, got {domain.label}")
    Z = as_points(domain, Z)
    W = as_points(domain, W)
    for P in (Z, W):
        far = np.sqrt(np.sum(np.abs(P - x.coordinates[None, :]) ** 2, axis=1)) > eps
        if np.any(far):
            raise DomainError(f"Sample {P[int(np.flatnonzero(far)[0])]} lies outside the patch of radius {eps}")
    k = backend.paired(Z, W)
    sep = np.sqrt(np.sum(np.abs(Z - W) ** 2, axis=1))
    depth = np.sqrt(boundary_distances(domain, Z) * boundary_distances(domain, W))
    distinct = sep > 0
    c = np.zeros(len(Z))
    c[distinct] = np.expm1(k[distinct]) * depth[distinct] / sep[distinct]
    full = float(np.max(c)) if len(c) else 0.0
    half = float(np.max(c[: max(1, len(c) // 2)])) if len(c) else 0.0
    ratio = full / half if half > 0 else (1.0 if full == 0 else float("inf"))
    return NikolovAndreevFit(constant=full, half_fit=half, ratio=ratio, pairs=len(Z))


# ---------------------------------------------------------------------------
# Batch CSV
# ---------------------------------------------------------------------------

def distance_batch_csv(backend: MetricBackend, in_path: str, out_path: str) -> int:
    """
    Evaluate a CSV of planar pairs (z_re, z_im, w_re, w_im) into (value, error)

    Returns:
        number of rows written
    """
    if not backend.domain.planar:
        raise DomainError("Distance batch CSV is defined for planar domains")
    with open(in_path, newline="") as f:
        rows = [r for r in csv.reader(f) if r and not r[0].startswith("z_re")]
    if not rows:
        Z = W = np.zeros(0, dtype=complex)
    else:
        data = np.array(rows, dtype=float)
        Z = data[:, 0] + 1j * data[:, 1]
        W = data[:, 2] + 1j * data[:, 3]
    with open(out_path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["value", "error"])
        for z, w in zip(Z, W):
            d = backend.distance(z, w)
            writer.writerow([repr(round(d.value, 12)), repr(round(d.error, 12))])
    logger.info(f"Wrote {len(Z)} distances to {out_path}")
    return len(Z)
