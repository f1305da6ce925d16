"""
geodesics.py
Geodesics, geodesic rays and quasi-geodesics

Closed-form geodesics on the disc and ball (via automorphisms), on the
polydisc (componentwise, max-metric unit speed) and on conformal pullbacks.
On grid surrogates a shortest grid path is relaxed by midpoint descent and
reported as a quasi-geodesic with fitted constants.
"""

import csv
import logging
import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from horolab.config import get_settings
from horolab.domains import (
    BoundaryPoint,
    DomainDescriptor,
    DomainKind,
    as_point,
    as_points,
    boundary_distances,
    contains_many,
    distance_field,
    snap_to_boundary,
)
from horolab.conformal import boundary_value
from horolab.errors import DomainError, NumericalError
from horolab.metrics import (
    ConformalPullback,
    ExactBall,
    ExactDisc,
    GridSurrogate,
    MetricBackend,
    PolydiscMax,
)

logger = logging.getLogger(__name__)

Evaluator = Callable[[np.ndarray], np.ndarray]

DEFAULT_SAMPLES = 65
DEFAULT_RAY_LENGTH = 12.0


class PathKind(Enum):
    """What a path claims to be"""
    GEODESIC = "geodesic"
    QUASI_GEODESIC = "quasi_geodesic"
    PLAIN = "plain"


@dataclass
class Path:
    """
    Sampled curve in a domain

    params are strictly increasing; points[k] is the curve at params[k].
    An evaluator, when present, gives the curve at any parameter.
    """
    params: np.ndarray
    points: np.ndarray
    backend: MetricBackend
    kind: PathKind = PathKind.PLAIN
    alpha: Optional[float] = None
    beta: Optional[float] = None
    target: Optional[BoundaryPoint] = None
    evaluator: Optional[Evaluator] = field(default=None, repr=False)
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.params = np.asarray(self.params, dtype=float)
        self.points = as_points(self.backend.domain, self.points)
        if len(self.params) != len(self.points):
            raise DomainError(f"Path has {len(self.params)} parameters for {len(self.points)} points")
        if len(self.params) < 2:
            raise DomainError("A path needs at least two samples")
        if np.any(np.diff(self.params) <= 0):
            raise DomainError("Path parameters must increase strictly")
        inside = contains_many(self.backend.domain, self.points)
        if not np.all(inside):
            bad = self.points[int(np.flatnonzero(~inside)[0])]
            raise DomainError(f"Path leaves {self.backend.domain.label} at {bad}")
        self._segments: Optional[np.ndarray] = None

    @property
    def domain(self) -> DomainDescriptor:
        return self.backend.domain

    @property
    def segment_lengths(self) -> np.ndarray:
        if self._segments is None:
            self._segments = self.backend.segment_lengths(self.points[:-1], self.points[1:])
        return self._segments

    @property
    def length(self) -> float:
        """Invariant length of the sampled polygon"""
        return float(np.sum(self.segment_lengths))

    def point_at(self, t: Any) -> np.ndarray:
        """
        Curve at parameter(s) t

        Uses the evaluator when present, otherwise linear interpolation
        between samples (only inside the sampled range).
        """
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        if self.evaluator is not None:
            out = as_points(self.domain, self.evaluator(t_arr))
        else:
            if np.any(t_arr < self.params[0]) or np.any(t_arr > self.params[-1]):
                raise NumericalError(f"Parameter outside the sampled range [{self.params[0]}, {self.params[-1]}]")
            out = np.stack(
                [np.interp(t_arr, self.params, self.points[:, j].real) + 1j * np.interp(t_arr, self.params, self.points[:, j].imag)
                 for j in range(self.points.shape[1])],
                axis=1,
            )
        return out[0] if np.ndim(t) == 0 else out

    def to_rows(self) -> List[List[float]]:
        rows = []
        for t, p in zip(self.params, self.points):
            row = [float(t)]
            for c in p:
                row.extend([float(c.real), float(c.imag)])
            rows.append(row)
        return rows

    def export_csv(self, path: str) -> str:
        dim = self.points.shape[1]
        header = ["t"] + [f"{part}{j}" for j in range(dim) for part in ("re", "im")]
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(header)
            for row in self.to_rows():
                writer.writerow([repr(round(v, 12)) for v in row])
        return path

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "alpha": self.alpha,
            "beta": self.beta,
            "samples": len(self.params),
            "parameter_range": [float(self.params[0]), float(self.params[-1])],
            "length": self.length,
            "backend": self.backend.label,
            "target": self.target.to_dict() if self.target is not None else None,
            "diagnostics": self.diagnostics,
        }


@dataclass
class Cluster:
    """A boundary accumulation point of a path tail and how often the tail visits it"""
    point: BoundaryPoint
    frequency: int

    def to_dict(self) -> Dict[str, Any]:
        return {"point": self.point.to_dict(), "frequency": self.frequency}


# ---------------------------------------------------------------------------
# Ball automorphisms
# ---------------------------------------------------------------------------

def ball_automorphism(a: Any, Z: Any) -> np.ndarray:
    """
    Involutive ball automorphism swapping a and 0

    phi_a(z) = (a - P_a z - s_a Q_a z) / (1 - <z, a>), s_a = sqrt(1 - |a|^2)
    Works on the closed ball, so boundary points map to boundary points.

    Args:
        a: interior point, shape (dim,)
        Z: points, shape (m, dim)
    """
    a = np.asarray(a, dtype=complex).ravel()
    Z = np.atleast_2d(np.asarray(Z, dtype=complex))
    na2 = float(np.sum(np.abs(a) ** 2))
    if na2 == 0:
        return -Z
    if na2 >= 1:
        raise DomainError(f"Automorphism parameter must be interior, got {a}")
    inner = Z @ np.conj(a)
    P = inner[:, None] * a[None, :] / na2
    Q = Z - P
    s = np.sqrt(1 - na2)
    return (a[None, :] - P - s * Q) / (1 - inner)[:, None]


def _radial(a: np.ndarray, b: np.ndarray) -> Tuple[float, Evaluator]:
    """Unit-speed ball geodesic from a to b, as (length, evaluator)"""
    u = ball_automorphism(a, b[None, :])[0]
    r = float(np.sqrt(np.sum(np.abs(u) ** 2)))
    direction = u / r
    length = float(np.arctanh(r)) if r < 1 else float("inf")

    def evaluate(t):
        t = np.asarray(t, dtype=float)
        return ball_automorphism(a, np.tanh(t)[:, None] * direction[None, :])

    return length, evaluate


def _disc_coordinate_path(a: complex, b: complex) -> Tuple[float, Evaluator]:
    """Unit-speed disc geodesic a -> b on complex scalars, evaluator returns (m,)"""
    if a == b:
        return 0.0, lambda t: np.full(np.shape(t), a, dtype=complex)
    length, evaluate = _radial(np.array([a]), np.array([b]))
    return length, lambda t: evaluate(t)[:, 0]


# ---------------------------------------------------------------------------
# Geodesic segments
# ---------------------------------------------------------------------------

def geodesic_segment(backend: MetricBackend, z: Any, w: Any, samples: int = DEFAULT_SAMPLES) -> Path:
    """
    Geodesic (or best available quasi-geodesic) from z to w

    Args:
        backend: distance backend on the domain
        z, w: distinct interior points
        samples: number of sampled parameters

    Returns:
        Path parameterized by invariant length on [0, L]

    Raises:
        DomainError: z == w or a point outside the domain
        NumericalError: grid resolution too coarse at an endpoint
    """
    domain = backend.domain
    z = as_point(domain, z)
    w = as_point(domain, w)
    if np.array_equal(z, w):
        raise DomainError("Geodesic segment needs distinct endpoints")
    inside = contains_many(domain, np.stack([z, w]))
    if not np.all(inside):
        raise DomainError(f"Segment endpoints must be interior to {domain.label}")

    if isinstance(backend, GridSurrogate):
        return _grid_segment(backend, z, w)

    if isinstance(backend, (ExactDisc, ExactBall)):
        length, evaluate = _radial(z, w)
    elif isinstance(backend, PolydiscMax):
        length, evaluate = _polydisc_segment(z, w)
    elif isinstance(backend, ConformalPullback):
        length, evaluate = _pullback_segment(backend, z, w)
    else:
        raise DomainError(f"No geodesic construction for {backend.label}")

    t = np.linspace(0.0, length, samples)
    points = evaluate(t)
    points[0] = z
    points[-1] = w
    path = Path(t, points, backend, PathKind.GEODESIC, alpha=1.0, beta=0.0, evaluator=evaluate)
    path.diagnostics["distance"] = length
    return path


def _polydisc_segment(z: np.ndarray, w: np.ndarray) -> Tuple[float, Evaluator]:
    parts = [_disc_coordinate_path(complex(a), complex(b)) for a, b in zip(z, w)]
    lengths = [p[0] for p in parts]
    total = max(lengths)

    def evaluate(t):
        t = np.asarray(t, dtype=float)
        return np.stack([ev(t * (lj / total)) for lj, (_, ev) in zip(lengths, parts)], axis=1)

    return total, evaluate


def _pullback_segment(backend: ConformalPullback, z: np.ndarray, w: np.ndarray) -> Tuple[float, Evaluator]:
    chart = backend.chart
    a = np.atleast_1d(chart.forward(np.asarray(z[0])))
    b = np.atleast_1d(chart.forward(np.asarray(w[0])))
    _, disc_eval = _radial(a, b)
    length = float(backend.paired(z[None, :], w[None, :])[0])

    def evaluate(t):
        return chart.inverse(disc_eval(t)[:, 0])[:, None]

    return length, evaluate


def _grid_cost(backend: GridSurrogate, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    cost, _ = backend.grid.segment_costs(a, b, boundary_distances(backend.domain, a), boundary_distances(backend.domain, b))
    return cost


def _midpoint_descent(backend: GridSurrogate, pts: np.ndarray) -> Tuple[np.ndarray, int, bool]:
    """
    Relax interior vertices of a planar polygon to lower its quasihyperbolic length

    Even and odd vertices alternate so each batch moves with fixed neighbors.

    Returns:
        (points, vertex updates used, converged)
    """
    settings = get_settings()
    domain = backend.domain
    pts = pts.copy()
    step = backend.h / 4
    min_step = backend.h / 64
    total = float(np.sum(_grid_cost(backend, pts[:-1], pts[1:])))
    updates = 0
    while updates < settings.refinement_cap:
        for parity in (1, 2):
            idx = np.arange(parity, len(pts) - 1, 2)
            if not len(idx):
                continue
            prev, cur, nxt = pts[idx - 1], pts[idx], pts[idx + 1]
            best = _grid_cost(backend, prev, cur) + _grid_cost(backend, cur, nxt)
            for cand in ((prev + nxt) / 2, cur + step, cur - step, cur + 1j * step, cur - 1j * step):
                mask, bd = distance_field(domain, cand)
                usable = mask & (bd >= backend.h)
                cand = np.where(usable, cand, cur)
                c = _grid_cost(backend, prev, cand) + _grid_cost(backend, cand, nxt)
                better = usable & (c < best)
                cur = np.where(better, cand, cur)
                best = np.where(better, c, best)
            pts[idx] = cur
            updates += len(idx)
        new_total = float(np.sum(_grid_cost(backend, pts[:-1], pts[1:])))
        improvement = total - new_total
        total = new_total
        if improvement <= settings.refinement_tolerance * total:
            if step <= min_step:
                return pts, updates, True
            step /= 2
    return pts, updates, False


def _grid_segment(backend: GridSurrogate, z: np.ndarray, w: np.ndarray) -> Path:
    nodes, grid_length = backend.grid.shortest_path(complex(z[0]), complex(w[0]))
    keep = np.concatenate([[True], np.abs(np.diff(nodes)) > 0])
    nodes = nodes[keep]
    refined, updates, converged = _midpoint_descent(backend, nodes)
    costs = backend.segment_lengths(refined[:-1, None], refined[1:, None])
    params = np.concatenate([[0.0], np.cumsum(costs)])
    path = Path(params, refined[:, None], backend, PathKind.PLAIN)
    path.diagnostics.update({"grid_length": grid_length, "refinement_updates": updates, "h": backend.h})
    if not converged:
        path.diagnostics["note"] = "refinement cap reached; path is not certified as a quasi-geodesic"
        logger.warning(f"Midpoint descent hit the cap of {get_settings().refinement_cap} updates on {backend.label}")
        return path
    _claim_quasi_geodesic(path)
    return path


def _claim_quasi_geodesic(path: Path) -> None:
    try:
        alpha, beta = fit_quasi_geodesic_constants(path)
    except (NumericalError, DomainError) as e:
        path.kind = PathKind.PLAIN
        path.diagnostics["note"] = f"quasi-geodesic fit failed: {e}"
        return
    path.kind = PathKind.QUASI_GEODESIC
    path.alpha = alpha
    path.beta = beta


# ---------------------------------------------------------------------------
# Geodesic rays
# ---------------------------------------------------------------------------

def geodesic_ray(
    backend: MetricBackend,
    o: Any,
    x: BoundaryPoint,
    t_max: float = DEFAULT_RAY_LENGTH,
    samples: int = 129,
) -> Path:
    """
    Geodesic ray from o landing at the boundary point x

    Landing is checked at t_max/4, t_max/2 and t_max: the Euclidean distance to
    x has to decrease and halve over the window. When it does not, the ray is
    still returned, with its tail clusters in diagnostics.

    Returns:
        Path on [0, t_max] with an evaluator valid for every t >= 0
    """
    domain = backend.domain
    o = as_point(domain, o)
    if x.domain != domain:
        raise DomainError(f"Boundary point belongs to {x.domain.label}, not {domain.label}")
    if t_max <= 0:
        raise DomainError("Ray length must be positive")

    if isinstance(backend, GridSurrogate):
        return _grid_ray(backend, o, x, t_max, samples)

    if isinstance(backend, (ExactDisc, ExactBall)):
        if domain.kind == DomainKind.PUNCTURED_BALL and x.component_id != 0:
            raise DomainError("The puncture is not the endpoint of a geodesic ray")
        xi = ball_automorphism(o, x.coordinates[None, :])[0]
        xi = xi / np.sqrt(np.sum(np.abs(xi) ** 2))

        def evaluate(t):
            return ball_automorphism(o, np.tanh(np.asarray(t, dtype=float))[:, None] * xi[None, :])
    elif isinstance(backend, PolydiscMax):
        evaluate = _polydisc_ray(o, x.coordinates)
    elif isinstance(backend, ConformalPullback):
        chart = backend.chart
        a = np.atleast_1d(chart.forward(np.asarray(o[0])))
        xi = np.array([boundary_value(chart, x)])

        def evaluate(t):
            disc = ball_automorphism(a, np.tanh(np.asarray(t, dtype=float))[:, None] * ball_automorphism(a, xi[None, :]))
            return chart.inverse(disc[:, 0])[:, None]
    else:
        raise DomainError(f"No geodesic ray construction for {backend.label}")

    t = np.linspace(0.0, t_max, samples)
    path = Path(t, evaluate(t), backend, PathKind.GEODESIC, alpha=1.0, beta=0.0, target=x, evaluator=evaluate)
    _certify_landing(path, x, t_max)
    return path


def _polydisc_ray(o: np.ndarray, x: np.ndarray) -> Evaluator:
    """Unimodular coordinates run at unit speed; the others slide to x_j at speed below one"""
    parts = []
    for oj, xj in zip(o, x):
        oj, xj = complex(oj), complex(xj)
        if abs(abs(xj) - 1) <= 1e-9:
            xi = complex(ball_automorphism(np.array([oj]), np.array([[xj]]))[0, 0])
            xi /= abs(xi)
            parts.append(("ray", oj, xi, 0.0, None))
        else:
            length, ev = _disc_coordinate_path(oj, xj)
            parts.append(("slide", oj, xj, length, ev))

    def evaluate(t):
        t = np.asarray(t, dtype=float)
        cols = []
        for kind, oj, target, length, ev in parts:
            if kind == "ray":
                cols.append(ball_automorphism(np.array([oj]), (np.tanh(t) * target)[:, None])[:, 0])
            elif length == 0:
                cols.append(np.full(t.shape, oj, dtype=complex))
            else:
                scale = max(1.0, length)
                cols.append(ev(length * (1 - np.exp(-t / scale))))
        return np.stack(cols, axis=1)

    return evaluate


def _grid_ray(backend: GridSurrogate, o: np.ndarray, x: BoundaryPoint, t_max: float, samples: int) -> Path:
    """Straight segment toward x, sampled until the grid depth floor, parameterized by surrogate length"""
    start = complex(o[0])
    end = complex(x.coordinates[0])
    s = 1 - 2.0 ** -np.linspace(0, 40, 4 * samples)
    pts = start + s * (end - start)
    mask, bd = distance_field(backend.domain, pts)
    ok = mask & (bd >= 2 * backend.h)
    stop = int(np.argmin(ok)) if not np.all(ok) else len(ok)
    pts = pts[:stop]
    if len(pts) < 2:
        raise NumericalError(f"Grid resolution h={backend.h} leaves no room for a ray from {start} to {end}")
    costs = backend.segment_lengths(pts[:-1, None], pts[1:, None])
    params = np.concatenate([[0.0], np.cumsum(costs)])
    keep = np.concatenate([[True], np.diff(params) > 0]) & (params <= t_max)
    path = Path(params[keep], pts[keep, None], backend, PathKind.PLAIN, target=x)
    path.diagnostics["h"] = backend.h
    _claim_quasi_geodesic(path)
    return path


def _certify_landing(path: Path, x: BoundaryPoint, t_max: float) -> None:
    checks = np.array([t_max / 4, t_max / 2, t_max])
    pts = path.point_at(checks)
    errors = np.sqrt(np.sum(np.abs(pts - x.coordinates[None, :]) ** 2, axis=1))
    landed = bool(np.all(np.diff(errors) < 0) and errors[-1] <= 0.5 * errors[0])
    path.diagnostics["landing_errors"] = [float(e) for e in errors]
    path.diagnostics["landing_certified"] = landed
    if not landed:
        logger.warning(f"Ray toward {x} is not certified to land; reporting its tail clusters")
        path.diagnostics["clusters"] = [c.to_dict() for c in cluster_set(path)]


# ---------------------------------------------------------------------------
# Quasi-geodesics on convex domains
# ---------------------------------------------------------------------------

def convex_quasi_geodesic_point(domain: DomainDescriptor, o: Any, x: BoundaryPoint, t: Any) -> np.ndarray:
    """sigma_x(t) = x + e^{-2t}(o - x); rows for array t"""
    if not domain.convex:
        raise DomainError(f"The convex quasi-geodesic needs a convex domain, got {domain.label}")
    o = as_point(domain, o)
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr < 0):
        raise DomainError("sigma_x is defined for t >= 0")
    pts = x.coordinates[None, :] + np.exp(-2 * t_arr)[:, None] * (o - x.coordinates)[None, :]
    return pts[0] if np.ndim(t) == 0 else pts


def convex_quasi_geodesic(
    backend: MetricBackend, o: Any, x: BoundaryPoint, t_max: float = 4.0, samples: int = 41
) -> Path:
    """sigma_x sampled on [0, t_max], with fitted quasi-geodesic constants"""
    domain = backend.domain
    o = as_point(domain, o)
    t = np.linspace(0.0, t_max, samples)
    pts = convex_quasi_geodesic_point(domain, o, x, t)
    if isinstance(backend, GridSurrogate):
        _, bd = distance_field(domain, pts[:, 0])
        if np.any(bd < backend.h):
            raise NumericalError(f"sigma_x reaches depth {bd.min():.3g} below the grid resolution h={backend.h}")
    path = Path(t, pts, backend, PathKind.PLAIN, target=x,
                evaluator=lambda s: convex_quasi_geodesic_point(domain, o, x, np.asarray(s, dtype=float)))
    _claim_quasi_geodesic(path)
    return path


def fit_quasi_geodesic_constants(path: Path, max_samples: int = 40) -> Tuple[float, float]:
    """
    Smallest (alpha, beta) with L/alpha - beta <= k(p_s, p_t) <= alpha L + beta on the samples

    alpha is the least multiplicative constant compatible with beta <= the
    configured cap; beta is then minimal for that alpha. Deterministic in the
    sampled parameters.

    Raises:
        DomainError: fewer than 10 samples
        NumericalError: alpha beyond the configured maximum
    """
    settings = get_settings()
    if len(path.params) < 10:
        raise DomainError(f"Quasi-geodesic fit needs at least 10 samples, got {len(path.params)}")
    idx = np.unique(np.round(np.linspace(0, len(path.params) - 1, min(max_samples, len(path.params)))).astype(int))
    t = path.params[idx]
    P = path.points[idx]
    D = path.backend.pairwise(P, P)
    iu, ju = np.triu_indices(len(idx), k=1)
    d = D[iu, ju]
    L = np.abs(t[ju] - t[iu])
    cap = settings.quasi_geodesic_beta_cap
    alpha = max(1.0, float(np.max((d - cap) / L)), float(np.max(L / (d + cap))))
    if alpha > settings.quasi_geodesic_alpha_max:
        raise NumericalError(f"Path rejected as quasi-geodesic: alpha={alpha:.3g}")
    beta = max(0.0, float(np.max(d - alpha * L)), float(np.max(L / alpha - d)))
    return alpha, beta


# ---------------------------------------------------------------------------
# Cluster sets
# ---------------------------------------------------------------------------

def cluster_points(points: np.ndarray, domain: DomainDescriptor, tolerance: float) -> Tuple[List[Cluster], int]:
    """
    Greedy clustering of near-boundary points

    Returns:
        (clusters, number of points farther than tolerance from the boundary)
    """
    clusters: List[Cluster] = []
    misses = 0
    for p in points:
        bp = snap_to_boundary(domain, p, tolerance)
        if bp is None:
            misses += 1
            continue
        for c in clusters:
            if c.point.side_tag == bp.side_tag and np.max(np.abs(c.point.coordinates - bp.coordinates)) <= tolerance:
                c.frequency += 1
                break
        else:
            clusters.append(Cluster(bp, 1))
    return clusters, misses


def cluster_set(path: Path, tail: int = 20, tolerance: Optional[float] = None) -> List[Cluster]:
    """
    Boundary accumulation points of a path's tail

    Args:
        path: sampled path
        tail: number of final samples examined
        tolerance: snapping and clustering radius

    Raises:
        DomainError: the tail leaves the window of an unbounded domain
    """
    tolerance = tolerance if tolerance is not None else get_settings().cluster_tolerance
    domain = path.domain
    P = path.points[-tail:]
    if not domain.bounded and domain.window is not None:
        x0, x1, y0, y1 = domain.window
        z = P[:, 0]
        if np.any((z.real < x0) | (z.real > x1) | (z.imag < y0) | (z.imag > y1)):
            raise DomainError(f"Path tail leaves the window of {domain.label}")
    clusters, misses = cluster_points(P, domain, tolerance)
    if misses:
        logger.debug(f"{misses} of {len(P)} tail samples are farther than {tolerance} from the boundary")
    return clusters


def ray_distance_profile(path: Path, o: Any) -> np.ndarray:
    """k(o, path(t)) at every sample; equals t on a geodesic ray from o"""
    o = as_point(path.domain, o)
    return path.backend.paired(o[None, :], path.points)

