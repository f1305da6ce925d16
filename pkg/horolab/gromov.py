"""
gromov.py
Gromov products, four-point hyperbolicity and visibility probes

    <z|w>_o = (k(o, z) + k(o, w) - k(z, w)) / 2

Visibility between two boundary points shows up as bounded Gromov products
along approach sequences; the polydisc at non-Shilov points shows the
opposite, linear growth.
"""

import csv
import logging
import math
import os
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from horolab.config import get_settings
from horolab.domains import (
    NORMAL,
    ApproachScheme,
    BoundaryPoint,
    DomainDescriptor,
    approach_sequence,
    as_point,
    as_points,
    lattice_disc_complement,
)
from horolab.errors import DomainError, NumericalError
from horolab.geodesics import Path, PathKind
from horolab.horospheres import Flavor, MembershipVerdict, horosphere_membership
from horolab.metrics import MetricBackend, backend_for

logger = logging.getLogger(__name__)


class Evidence(Enum):
    BOUNDED = "BoundedEvidence"
    DIVERGENCE = "DivergenceEvidence"


@dataclass(frozen=True)
class GromovProduct:
    value: float
    error: float

    def to_dict(self) -> Dict[str, Any]:
        return {"value": self.value, "error": self.error}


@dataclass
class GromovReport:
    """Gromov products along paired approach schedules toward x and y"""
    pole: np.ndarray
    x: BoundaryPoint
    y: BoundaryPoint
    products: Dict[str, np.ndarray] = field(repr=False)
    verdict: Evidence
    bound: Optional[float] = None
    growth_rate: Optional[float] = None
    error: float = 0.0
    delta: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "pole": self.pole,
            "x": self.x.to_dict(),
            "y": self.y.to_dict(),
            "verdict": self.verdict.value,
            "bound": self.bound,
            "growth_rate": self.growth_rate,
            "error": self.error,
            "delta": self.delta,
            "products": {k: v for k, v in self.products.items()},
        }


def gromov_product(backend: MetricBackend, o: Any, z: Any, w: Any) -> GromovProduct:
    """
    <z|w>_o with the propagated error of its three distances

    Raises:
        DomainError: a point outside the domain
    """
    domain = backend.domain
    P = np.stack([as_point(domain, o), as_point(domain, z), as_point(domain, w)])
    D = backend.pairwise(P, P)
    value = (D[0, 1] + D[0, 2] - D[1, 2]) / 2
    errors = backend.errors_for(P[[0, 0, 1]], P[[1, 2, 2]], D[[0, 0, 1], [1, 2, 2]])
    return GromovProduct(float(value), float(np.sum(errors) / 2))


def gromov_products(backend: MetricBackend, o: Any, Z: Any, W: Any) -> np.ndarray:
    """Elementwise <Z[k]|W[k]>_o"""
    domain = backend.domain
    o = as_point(domain, o)[None, :]
    Z = as_points(domain, Z)
    W = as_points(domain, W)
    return (backend.paired(o, Z) + backend.paired(o, W) - backend.paired(Z, W)) / 2


def gromov_matrix(backend: MetricBackend, o: Any, P: Any) -> np.ndarray:
    """Matrix of <P[i]|P[j]>_o"""
    P = as_points(backend.domain, P)
    D = backend.pairwise(P, P)
    d_o = backend.paired(as_point(backend.domain, o)[None, :], P)
    return (d_o[:, None] + d_o[None, :] - D) / 2


def _paired_schedules(
    backend: MetricBackend, x: BoundaryPoint, y: BoundaryPoint, schedules: Optional[Sequence[Any]], n_max: int
) -> List[Tuple[str, np.ndarray, np.ndarray]]:
    if x.same_point(y):
        raise DomainError(f"Visibility probes need distinct boundary points, got {x} twice")
    out = []
    for spec in schedules or [NORMAL]:
        scheme = ApproachScheme.parse(spec)
        Z = approach_sequence(backend.domain, x, scheme, n=n_max)
        W = approach_sequence(backend.domain, y, scheme, n=n_max)
        m = min(len(Z), len(W))
        out.append((scheme.label, Z[:m], W[:m]))
    return out


def visibility_probe(
    backend: MetricBackend,
    o: Any,
    x: BoundaryPoint,
    y: BoundaryPoint,
    schedules: Optional[Sequence[Any]] = None,
    n_max: Optional[int] = None,
) -> GromovReport:
    """
    Bounded or divergent Gromov products toward two boundary points

    Divergence: the last-window slope of the products exceeds the configured
    threshold on some schedule. Otherwise the running sup bounds them.

    Raises:
        DomainError: x == y, or an inadmissible schedule
    """
    settings = get_settings()
    n_max = n_max or settings.n_max
    o = as_point(backend.domain, o)
    window = settings.divergence_window
    products: Dict[str, np.ndarray] = {}
    worst_slope = -math.inf
    bound = -math.inf
    for label, Z, W in _paired_schedules(backend, x, y, schedules, n_max):
        p = gromov_products(backend, o, Z, W)
        products[label] = p
        tail = p[-window:]
        slope = (tail[-1] - tail[0]) / max(len(tail) - 1, 1)
        worst_slope = max(worst_slope, slope)
        bound = max(bound, float(np.max(p)))
        logger.debug(f"{label}: products end at {p[-1]:.6g}, slope {slope:.4g}")
    error = 1.5 * backend.error_bound
    if worst_slope > settings.divergence_slope:
        return GromovReport(o, x, y, products, Evidence.DIVERGENCE, growth_rate=float(worst_slope), error=error)
    return GromovReport(o, x, y, products, Evidence.BOUNDED, bound=bound + error, growth_rate=float(worst_slope), error=error)


@dataclass
class EmbeddingReport:
    """Tail infimum of k(z_k, w_k) for approaches to two boundary points"""
    liminf: float
    positive: bool
    margin: float
    distances: Dict[str, np.ndarray] = field(repr=False)

    def to_dict(self) -> Dict[str, Any]:
        return {"liminf": self.liminf, "positive": self.positive, "margin": self.margin}


def hyperbolic_embedding_probe(
    backend: MetricBackend,
    x: BoundaryPoint,
    y: BoundaryPoint,
    schedules: Optional[Sequence[Any]] = None,
    n_max: Optional[int] = None,
    margin: Optional[float] = None,
) -> EmbeddingReport:
    """liminf of k(z_k, w_k); positive when the tail infimum clears the margin"""
    settings = get_settings()
    n_max = n_max or settings.n_max
    margin = margin if margin is not None else settings.membership_margin
    distances = {}
    liminf = math.inf
    for label, Z, W in _paired_schedules(backend, x, y, schedules, n_max):
        d = backend.paired(Z, W)
        distances[label] = d
        liminf = min(liminf, float(np.min(d[-settings.stabilization_window:])))
    return EmbeddingReport(liminf=liminf, positive=liminf - backend.error_bound > margin, margin=margin, distances=distances)


# ---------------------------------------------------------------------------
# Four-point condition
# ---------------------------------------------------------------------------

@dataclass
class DeltaEstimate:
    """Largest four-point defect over a finite sample"""
    delta: float
    sample_size: int
    quadruple: Tuple[int, int, int, int]
    surrogate: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "delta": self.delta,
            "sample_size": self.sample_size,
            "quadruple": list(self.quadruple),
            "label": "surrogate evidence" if self.surrogate else "exact",
        }


def four_point_delta(backend: MetricBackend, S: Any) -> DeltaEstimate:
    """
    Exhaustive four-point defect of a point sample

    For each quadruple the three pair sums d(a,b)+d(c,d), d(a,c)+d(b,d),
    d(a,d)+d(b,c) are formed; the defect is half the gap between the largest
    and the second largest. The estimate is the max over all quadruples,
    which is permutation invariant and monotone under adding points.

    Raises:
        DomainError: fewer than 4 or more than the quadruple cap of points
    """
    cap = get_settings().quadruple_cap
    S = as_points(backend.domain, S)
    n = len(S)
    if n < 4:
        raise DomainError(f"Four-point scan needs at least 4 points, got {n}")
    if n > cap:
        raise DomainError(f"Four-point scan is capped at {cap} points, got {n}")
    D = backend.pairwise(S, S)
    D = (D + D.T) / 2
    triples = np.array(list(combinations(range(n), 3)), dtype=np.int64)
    best = 0.0
    best_q = (0, 1, 2, 3)
    for i in range(n - 3):
        start = int(np.searchsorted(triples[:, 0], i + 1, side="left"))
        J, K, L = triples[start:, 0], triples[start:, 1], triples[start:, 2]
        A = D[i, J] + D[K, L]
        B = D[i, K] + D[J, L]
        C = D[i, L] + D[J, K]
        top = np.maximum(np.maximum(A, B), C)
        low = np.minimum(np.minimum(A, B), C)
        defect = (top - (A + B + C - top - low)) / 2
        k = int(np.argmax(defect))
        if defect[k] > best:
            best = float(defect[k])
            best_q = (i, int(J[k]), int(K[k]), int(L[k]))
    logger.debug(f"Four-point delta {best:.6g} over {n} points on {backend.label}")
    return DeltaEstimate(delta=best, sample_size=n, quadruple=best_q, surrogate=backend.surrogate)


def lattice_sample(domain: DomainDescriptor, per_axis: int = 7) -> np.ndarray:
    """Centers of lattice cells spread over the window of a lattice complement"""
    x0, x1, _, _ = domain.window
    r = int(round(x1 - 0.5))
    ticks = np.unique(np.round(np.linspace(-r, r - 1, per_axis)))
    Xg, Yg = np.meshgrid(ticks + 0.5, ticks + 0.5)
    return (Xg + 1j * Yg).ravel()[:, None]


def delta_growth(radii: Sequence[int] = (4, 8, 16), per_axis: int = 7, h: Optional[float] = None) -> List[Tuple[int, DeltaEstimate]]:
    """Four-point delta of the lattice complement over growing windows"""
    rows = []
    for r in radii:
        domain = lattice_disc_complement(r)
        backend = backend_for(domain, h)
        est = four_point_delta(backend, lattice_sample(domain, per_axis))
        logger.info(f"Lattice window radius {r}: delta = {est.delta:.4g} ({backend.label})")
        rows.append((r, est))
    return rows


def write_delta_growth_csv(rows: Sequence[Tuple[int, DeltaEstimate]], path: str) -> str:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["window_radius", "delta", "sample_size", "label"])
        for r, est in rows:
            writer.writerow([r, repr(round(est.delta, 12)), est.sample_size, est.to_dict()["label"]])
    return path


# ---------------------------------------------------------------------------
# Small horosphere witness
# ---------------------------------------------------------------------------

@dataclass
class HorosphereWitness:
    T: float
    point: np.ndarray
    verdict: MembershipVerdict

    def to_dict(self) -> Dict[str, Any]:
        return {"T": self.T, "point": self.point, "verdict": self.verdict.to_dict()}


def small_horosphere_witness(backend: MetricBackend, ray: Path, delta: float, R: float) -> HorosphereWitness:
    """
    The point z_T = ray(T) with T = 10 delta - log(R)/2 + 0.1 and its small-horosphere verdict

    Raises:
        DomainError: delta < 0 or R <= 0
        NumericalError: the ray is not a certified geodesic ray, or T lies beyond its samples
    """
    if delta < 0:
        raise DomainError("delta must be nonnegative")
    if R <= 0:
        raise DomainError(f"Horosphere radius must be positive, got {R}")
    if ray.kind != PathKind.GEODESIC or not ray.diagnostics.get("landing_certified") or ray.target is None:
        raise NumericalError("Small horosphere witness needs a certified geodesic ray")
    T = 10 * delta - 0.5 * math.log(R) + 0.1
    if ray.evaluator is None and T > ray.params[-1]:
        raise NumericalError(f"T = {T:.4g} lies beyond the sampled ray")
    z_T = ray.point_at(max(T, 0.0))
    o = ray.points[0]
    verdict = horosphere_membership(backend, o, ray.target, R, z_T, Flavor.SMALL)
    return HorosphereWitness(T=T, point=z_T, verdict=verdict)
