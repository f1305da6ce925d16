"""
domains.py
Domain catalog for horolab

Model domains used by the horosphere experiments, together with the
geometric primitives every other module consumes:
- membership and Euclidean boundary distance (vectorized over point arrays)
- validated boundary points with inward directions and side tags
- deterministic boundary samplers and approach sequences
- the Takagi function used to build the fractal-boundary domain

Points are numpy complex arrays of shape (dim,); batches have shape (N, dim).
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.spatial import cKDTree

from horolab.config import get_settings
from horolab.errors import DomainError

logger = logging.getLogger(__name__)

BOUNDARY_TOLERANCE = 1e-9
ABOVE = "above"
BELOW = "below"
SIDE_TAGS = (ABOVE, BELOW)


class DomainKind(Enum):
    """Kinds of model domains in the catalog"""
    UNIT_DISC = "UnitDisc"
    EUCLIDEAN_BALL = "EuclideanBall"
    POLYDISC = "Polydisc"
    SLIT_DISC = "SlitDisc"
    HALF_DISC = "HalfDisc"
    CONVEX_POLYGON = "ConvexPolygon"
    LATTICE_DISC_COMPLEMENT = "LatticeDiscComplement"
    TAKAGI_DOMAIN = "TakagiDomain"
    PUNCTURED_BALL = "PuncturedBall"


CONVEX_KINDS = {
    DomainKind.UNIT_DISC,
    DomainKind.EUCLIDEAN_BALL,
    DomainKind.POLYDISC,
    DomainKind.HALF_DISC,
    DomainKind.CONVEX_POLYGON,
}


@dataclass(frozen=True)
class DomainDescriptor:
    """Immutable description of a model domain"""
    kind: DomainKind
    dimension: int = 1
    bounded: bool = True
    vertices: Tuple[complex, ...] = ()
    puncture: Tuple[complex, ...] = ()
    hole_radius: float = 0.25
    window: Optional[Tuple[float, float, float, float]] = None
    depth: int = 52

    @property
    def planar(self) -> bool:
        return self.dimension == 1

    @property
    def convex(self) -> bool:
        return self.kind in CONVEX_KINDS

    @property
    def label(self) -> str:
        if self.kind in (DomainKind.EUCLIDEAN_BALL, DomainKind.POLYDISC, DomainKind.PUNCTURED_BALL):
            return f"{self.kind.value}({self.dimension})"
        return self.kind.value

    @property
    def params(self) -> Dict[str, Any]:
        params: Dict[str, Any] = {}
        if self.vertices:
            params["vertices"] = [[v.real, v.imag] for v in self.vertices]
        if self.puncture:
            params["puncture"] = [[c.real, c.imag] for c in self.puncture]
        if self.kind == DomainKind.LATTICE_DISC_COMPLEMENT:
            params["hole_radius"] = self.hole_radius
        if self.kind == DomainKind.TAKAGI_DOMAIN:
            params["depth"] = self.depth
        return params

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "dim": self.dimension,
            "params": self.params,
            "window": list(self.window) if self.window else None,
        }


@dataclass(frozen=True, eq=False)
class BoundaryPoint:
    """A boundary point with an admissible inward direction"""
    coordinates: np.ndarray
    domain: DomainDescriptor
    inward_normal: np.ndarray
    t0: float
    smooth: bool = True
    side_tag: Optional[str] = None
    component_id: int = 0

    @property
    def z(self) -> complex:
        """First (planar) coordinate"""
        return complex(self.coordinates[0])

    def same_location(self, other: "BoundaryPoint", tolerance: float = BOUNDARY_TOLERANCE) -> bool:
        return bool(np.max(np.abs(self.coordinates - other.coordinates)) < tolerance)

    def same_point(self, other: "BoundaryPoint", tolerance: float = BOUNDARY_TOLERANCE) -> bool:
        return self.same_location(other, tolerance) and self.side_tag == other.side_tag

    def to_dict(self) -> Dict[str, Any]:
        return {
            "coordinates": [[c.real, c.imag] for c in self.coordinates],
            "side_tag": self.side_tag,
            "component_id": self.component_id,
            "smooth": self.smooth,
        }

    def __repr__(self) -> str:
        coords = ", ".join(f"{c.real:.6g}{c.imag:+.6g}j" for c in self.coordinates)
        tag = f", {self.side_tag}" if self.side_tag else ""
        return f"BoundaryPoint(({coords}){tag})"


# ---------------------------------------------------------------------------
# Catalog constructors
# ---------------------------------------------------------------------------

def unit_disc() -> DomainDescriptor:
    return DomainDescriptor(DomainKind.UNIT_DISC)


def euclidean_ball(dim: int = 2) -> DomainDescriptor:
    return DomainDescriptor(DomainKind.EUCLIDEAN_BALL, dimension=dim)


def polydisc(dim: int = 2) -> DomainDescriptor:
    return DomainDescriptor(DomainKind.POLYDISC, dimension=dim)


def slit_disc() -> DomainDescriptor:
    """The unit disc with the segment [0, 1) removed"""
    return DomainDescriptor(DomainKind.SLIT_DISC)


def half_disc() -> DomainDescriptor:
    """The upper half of the unit disc"""
    return DomainDescriptor(DomainKind.HALF_DISC)


def convex_polygon(vertices: Sequence[complex]) -> DomainDescriptor:
    """
    Planar convex polygon

    Args:
        vertices: polygon vertices, reordered counter-clockwise if needed

    Returns:
        DomainDescriptor of kind ConvexPolygon
    """
    verts = [complex(v) for v in vertices]
    if len(verts) < 3:
        raise DomainError("A polygon needs at least three vertices")
    area = sum((verts[i].conjugate() * verts[(i + 1) % len(verts)]).imag for i in range(len(verts)))
    if area < 0:
        verts = verts[::-1]
    elif area == 0:
        raise DomainError("Degenerate polygon")
    xs = [v.real for v in verts]
    ys = [v.imag for v in verts]
    domain = DomainDescriptor(
        DomainKind.CONVEX_POLYGON,
        vertices=tuple(verts),
        window=(min(xs), max(xs), min(ys), max(ys)),
    )
    e = _polygon_edges(domain)
    for i in range(len(verts)):
        turn = (np.conj(e[i]) * e[(i + 1) % len(verts)]).imag
        if turn <= 0:
            raise DomainError("Polygon vertices are not in convex position")
    return domain


def square(half_width: float = 1.0) -> DomainDescriptor:
    h = half_width
    return convex_polygon([complex(-h, -h), complex(h, -h), complex(h, h), complex(-h, h)])


def lattice_disc_complement(window_radius: int = 4) -> DomainDescriptor:
    """
    Complement of the discs of radius 1/4 around the Gaussian integers, windowed

    The window box has half-width window_radius + 1/2, so its frame runs midway
    between hole columns and every hole inside it is complete.
    """
    if window_radius < 1:
        raise DomainError("Window radius must be at least 1")
    w = window_radius + 0.5
    return DomainDescriptor(
        DomainKind.LATTICE_DISC_COMPLEMENT,
        bounded=False,
        hole_radius=0.25,
        window=(-w, w, -w, w),
    )


def takagi_domain(depth: Optional[int] = None) -> DomainDescriptor:
    """Region {t + iy: 0 < t < 1, takagi(t) < y < 2}"""
    depth = depth if depth is not None else get_settings().takagi_depth
    return DomainDescriptor(DomainKind.TAKAGI_DOMAIN, depth=depth, window=(0.0, 1.0, 0.0, 2.0))


def punctured_ball(dim: int = 2, puncture: Optional[Sequence[complex]] = None) -> DomainDescriptor:
    """
    Unit ball with one point removed

    The Kobayashi distance equals the ambient ball distance (a point is a
    removable pluripolar set); horolab adopts this as a modeling assumption.
    """
    q = tuple(complex(c) for c in (puncture if puncture is not None else [0j] * dim))
    if len(q) != dim:
        raise DomainError(f"Puncture has dimension {len(q)}, expected {dim}")
    if math.sqrt(sum(abs(c) ** 2 for c in q)) >= 1:
        raise DomainError("Puncture must lie inside the ball")
    return DomainDescriptor(DomainKind.PUNCTURED_BALL, dimension=dim, puncture=q)


_CONSTRUCTORS: Dict[str, Callable[..., DomainDescriptor]] = {
    DomainKind.UNIT_DISC.value: lambda d: unit_disc(),
    DomainKind.EUCLIDEAN_BALL.value: lambda d: euclidean_ball(int(d.get("dim", 2))),
    DomainKind.POLYDISC.value: lambda d: polydisc(int(d.get("dim", 2))),
    DomainKind.SLIT_DISC.value: lambda d: slit_disc(),
    DomainKind.HALF_DISC.value: lambda d: half_disc(),
    DomainKind.CONVEX_POLYGON.value: lambda d: convex_polygon(
        [complex(*v) for v in d.get("params", {}).get("vertices", [])]
    ),
    DomainKind.LATTICE_DISC_COMPLEMENT.value: lambda d: lattice_disc_complement(
        int(d.get("params", {}).get("window_radius", _window_radius(d)))
    ),
    DomainKind.TAKAGI_DOMAIN.value: lambda d: takagi_domain(d.get("params", {}).get("depth")),
    DomainKind.PUNCTURED_BALL.value: lambda d: punctured_ball(
        int(d.get("dim", 2)),
        [complex(*c) for c in d.get("params", {}).get("puncture", [])] or None,
    ),
}


def _window_radius(d: Dict[str, Any]) -> int:
    window = d.get("window")
    if not window:
        raise DomainError("LatticeDiscComplement needs a window or params.window_radius")
    return int(round(window[1] - 0.5))


def domain_from_dict(data: Dict[str, Any]) -> DomainDescriptor:
    """
    Build a domain from its JSON catalog form {kind, dim, params, window}

    Raises:
        DomainError: unknown kind
    """
    kind = data.get("kind")
    if kind not in _CONSTRUCTORS:
        raise DomainError(f"Unknown domain kind '{kind}'. Known kinds: {sorted(_CONSTRUCTORS)}")
    return _CONSTRUCTORS[kind](data)


# ---------------------------------------------------------------------------
# Point handling
# ---------------------------------------------------------------------------

def as_point(domain: DomainDescriptor, p: Union[complex, Sequence[complex], np.ndarray]) -> np.ndarray:
    """Normalize p to a complex vector of the domain's dimension"""
    arr = np.atleast_1d(np.asarray(p, dtype=complex)).ravel()
    if arr.shape[0] != domain.dimension:
        raise DomainError(f"Point has dimension {arr.shape[0]}, {domain.label} has dimension {domain.dimension}")
    return arr


def as_points(domain: DomainDescriptor, points: Any) -> np.ndarray:
    """Normalize a batch of points to shape (N, dim)"""
    arr = np.asarray(points, dtype=complex)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(-1, 1) if domain.dimension == 1 else arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[1] != domain.dimension:
        raise DomainError(f"Point batch has shape {arr.shape}, {domain.label} has dimension {domain.dimension}")
    return arr


def _polygon_edges(domain: DomainDescriptor) -> np.ndarray:
    v = np.asarray(domain.vertices, dtype=complex)
    return np.roll(v, -1) - v


def _segment_distance(z: np.ndarray, a: complex, b: complex) -> np.ndarray:
    e = b - a
    t = np.clip(((z - a) * np.conj(e)).real / abs(e) ** 2, 0.0, 1.0)
    return np.abs(z - (a + t * e))


def _nearest_gaussian_integer(z: np.ndarray) -> np.ndarray:
    return np.floor(z.real + 0.5) + 1j * np.floor(z.imag + 0.5)


def _signed_interior_distance(domain: DomainDescriptor, P: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Membership mask and distance to the complement (meaningful where the mask is true)"""
    kind = domain.kind
    if kind == DomainKind.UNIT_DISC:
        r = np.abs(P[:, 0])
        return r < 1, 1 - r
    if kind == DomainKind.EUCLIDEAN_BALL:
        r = np.sqrt(np.sum(np.abs(P) ** 2, axis=1))
        return r < 1, 1 - r
    if kind == DomainKind.POLYDISC:
        m = np.abs(P)
        return np.max(m, axis=1) < 1, np.min(1 - m, axis=1)
    if kind == DomainKind.PUNCTURED_BALL:
        r = np.sqrt(np.sum(np.abs(P) ** 2, axis=1))
        q = np.asarray(domain.puncture, dtype=complex)
        dq = np.sqrt(np.sum(np.abs(P - q) ** 2, axis=1))
        return (r < 1) & (dq > 0), np.minimum(1 - r, dq)

    z = P[:, 0]
    if kind == DomainKind.SLIT_DISC:
        r = np.abs(z)
        on_slit = (z.imag == 0) & (z.real >= 0)
        return (r < 1) & ~on_slit, np.minimum(1 - r, _segment_distance(z, 0j, 1 + 0j))
    if kind == DomainKind.HALF_DISC:
        r = np.abs(z)
        return (r < 1) & (z.imag > 0), np.minimum(1 - r, z.imag)
    if kind == DomainKind.CONVEX_POLYGON:
        v = np.asarray(domain.vertices, dtype=complex)
        e = _polygon_edges(domain)
        cross = (np.conj(e)[None, :] * (z[:, None] - v[None, :])).imag
        inside = np.all(cross > 0, axis=1)
        dist = np.min(np.stack([_segment_distance(z, v[i], v[i] + e[i]) for i in range(len(v))], axis=1), axis=1)
        return inside, dist
    if kind == DomainKind.LATTICE_DISC_COMPLEMENT:
        if domain.window is None:
            raise DomainError("LatticeDiscComplement needs a window")
        x0, x1, y0, y1 = domain.window
        in_window = (z.real > x0) & (z.real < x1) & (z.imag > y0) & (z.imag < y1)
        hole = np.abs(z - _nearest_gaussian_integer(z)) - domain.hole_radius
        frame = np.minimum.reduce([z.real - x0, x1 - z.real, z.imag - y0, y1 - z.imag])
        return in_window & (hole > 0), np.minimum(hole, frame)
    if kind == DomainKind.TAKAGI_DOMAIN:
        t, y = z.real, z.imag
        inside = (t > 0) & (t < 1) & (y < 2)
        inside &= y > takagi(np.clip(t, 0.0, 1.0), domain.depth)
        tree, _ = _takagi_graph(domain.depth)
        graph_dist, _ = tree.query(np.column_stack([t, y]))
        dist = np.minimum.reduce([t, 1 - t, 2 - y, np.asarray(graph_dist)])
        return inside, dist
    raise DomainError(f"Unsupported domain kind {kind}")


def distance_field(domain: DomainDescriptor, points: Any) -> Tuple[np.ndarray, np.ndarray]:
    """Membership mask and boundary distance over a batch; exterior entries are not meaningful"""
    return _signed_interior_distance(domain, as_points(domain, points))


def contains_many(domain: DomainDescriptor, points: Any) -> np.ndarray:
    """Vectorized membership test over a batch of points"""
    mask, _ = _signed_interior_distance(domain, as_points(domain, points))
    return mask


def contains(domain: DomainDescriptor, p: Any) -> bool:
    """
    Interior membership test

    Args:
        domain: domain descriptor
        p: point of matching dimension

    Returns:
        True iff p is an interior point

    Raises:
        DomainError: dimension mismatch
    """
    return bool(contains_many(domain, as_point(domain, p)[None, :])[0])


def boundary_distances(domain: DomainDescriptor, points: Any) -> np.ndarray:
    """Vectorized Euclidean distance to the complement; every point must be interior"""
    P = as_points(domain, points)
    mask, dist = _signed_interior_distance(domain, P)
    if not np.all(mask):
        bad = int(np.flatnonzero(~mask)[0])
        raise DomainError(f"Point {P[bad]} is not interior to {domain.label}")
    return dist


def boundary_distance(domain: DomainDescriptor, p: Any) -> float:
    """
    Euclidean distance from an interior point to the complement of the domain

    Raises:
        DomainError: point not interior, or dimension mismatch
    """
    return float(boundary_distances(domain, as_point(domain, p)[None, :])[0])


# ---------------------------------------------------------------------------
# Takagi function
# ---------------------------------------------------------------------------

def takagi(t: Any, depth: Optional[int] = None) -> Any:
    """
    Truncated Takagi (blancmange) function sum_{j<depth} 2^-j dist(2^j t, Z)

    The truncation error is below 2^(1-depth); depth 52 puts it under double precision.
    """
    depth = depth if depth is not None else get_settings().takagi_depth
    t_arr = np.asarray(t, dtype=float)
    total = np.zeros_like(t_arr)
    for j in range(depth):
        x = t_arr * (2.0 ** j)
        total += np.abs(x - np.round(x)) / (2.0 ** j)
    return float(total) if np.ndim(total) == 0 else total


def takagi_tail_bound(depth: int) -> float:
    return 2.0 ** (1 - depth)


@lru_cache(maxsize=8)
def _takagi_graph(depth: int, samples: int = 8193) -> Tuple[cKDTree, np.ndarray]:
    t = np.linspace(0.0, 1.0, samples)
    pts = np.column_stack([t, takagi(t, depth)])
    return cKDTree(pts), pts


# ---------------------------------------------------------------------------
# Boundary points
# ---------------------------------------------------------------------------

def _admissible_depth(domain: DomainDescriptor, x: np.ndarray, direction: np.ndarray, start: float = 0.5) -> float:
    t = start
    probes = 2.0 ** -np.arange(0, 8)
    for _ in range(60):
        pts = x[None, :] + (t * probes)[:, None] * direction[None, :]
        if np.all(contains_many(domain, pts)):
            return t
        t /= 2
    raise DomainError(f"No admissible inward depth at {x} for {domain.label}")


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.sqrt(np.sum(np.abs(v) ** 2))


def make_boundary_point(
    domain: DomainDescriptor,
    coordinates: Any,
    side_tag: Optional[str] = None,
    tolerance: float = BOUNDARY_TOLERANCE,
) -> BoundaryPoint:
    """
    Validate a boundary location and attach its inward direction

    Args:
        domain: domain descriptor
        coordinates: boundary coordinates (within tolerance)
        side_tag: 'above' or 'below' for two-sided points of the slit
        tolerance: how far off the boundary the coordinates may be

    Returns:
        BoundaryPoint with inward_normal (or cone direction at corners) and depth t0

    Raises:
        DomainError: the coordinates are not on the boundary, or a side tag is missing/misused
    """
    x = as_point(domain, coordinates).copy()
    kind = domain.kind
    if side_tag is not None and side_tag not in SIDE_TAGS:
        raise DomainError(f"Unknown side tag '{side_tag}'")

    def point(normal, t0, smooth=True, tag=None, component=0):
        if side_tag is not None and tag is None:
            raise DomainError(f"{domain.label} point {x} is one-sided; side tag '{side_tag}' not allowed")
        return BoundaryPoint(x, domain, np.asarray(normal, dtype=complex), float(t0), smooth, tag, component)

    if kind in (DomainKind.UNIT_DISC, DomainKind.EUCLIDEAN_BALL):
        r = np.sqrt(np.sum(np.abs(x) ** 2))
        if abs(r - 1) > tolerance:
            raise DomainError(f"{x} is not on the unit sphere")
        x = x / r
        return point(-x, 1.0)

    if kind == DomainKind.POLYDISC:
        m = np.abs(x)
        unimodular = np.abs(m - 1) <= tolerance
        if not unimodular.any() or np.any(m > 1 + tolerance):
            raise DomainError(f"{x} is not on the boundary of the polydisc")
        x[unimodular] = x[unimodular] / m[unimodular]
        normal = np.where(unimodular, -x, 0) / math.sqrt(unimodular.sum())
        return point(normal, 1.0, smooth=bool(unimodular.sum() == 1))

    if kind == DomainKind.PUNCTURED_BALL:
        q = np.asarray(domain.puncture, dtype=complex)
        if np.sqrt(np.sum(np.abs(x - q) ** 2)) <= tolerance:
            x = q.copy()
            nq = np.sqrt(np.sum(np.abs(q) ** 2))
            direction = -q / nq if nq > tolerance else np.eye(domain.dimension, dtype=complex)[0]
            return point(direction, 0.5 * (1 - nq), smooth=False, component=1)
        r = np.sqrt(np.sum(np.abs(x) ** 2))
        if abs(r - 1) > tolerance:
            raise DomainError(f"{x} is neither on the sphere nor the puncture")
        x = x / r
        return point(-x, _admissible_depth(domain, x, -x))

    z = x[0]
    if kind == DomainKind.SLIT_DISC:
        if abs(z - 1) <= tolerance:
            if side_tag is None:
                raise DomainError("The slit end point 1 needs a side tag")
            x[0] = 1.0
            direction = complex(-1, 1 if side_tag == ABOVE else -1) / math.sqrt(2)
            return point([direction], 0.5, smooth=False, tag=side_tag)
        if abs(abs(z) - 1) <= tolerance:
            x[0] = z / abs(z)
            return point([-x[0]], 0.5)
        if abs(z.imag) <= tolerance and -tolerance <= z.real < 1:
            if abs(z.real) <= tolerance:
                x[0] = 0j
                return point([-1 + 0j], 0.5, smooth=False)
            if side_tag is None:
                raise DomainError(f"Slit point {z.real} needs a side tag ('above' or 'below')")
            x[0] = complex(z.real, 0.0)
            normal = 1j if side_tag == ABOVE else -1j
            return point([normal], 0.5 * math.sqrt(1 - z.real ** 2), tag=side_tag)
        raise DomainError(f"{z} is not on the boundary of the slit disc")

    if kind == DomainKind.HALF_DISC:
        for corner in (1.0, -1.0):
            if abs(z - corner) <= tolerance:
                x[0] = corner
                return point([complex(-corner, 1) / math.sqrt(2)], 0.5, smooth=False, component=0)
        if abs(abs(z) - 1) <= tolerance and z.imag > 0:
            x[0] = z / abs(z)
            return point([-x[0]], 0.5, component=0)
        if abs(z.imag) <= tolerance and -1 < z.real < 1:
            x[0] = complex(z.real, 0.0)
            return point([1j], 0.5 * math.sqrt(1 - z.real ** 2), component=1)
        raise DomainError(f"{z} is not on the boundary of the half disc")

    if kind == DomainKind.CONVEX_POLYGON:
        v = np.asarray(domain.vertices, dtype=complex)
        e = _polygon_edges(domain)
        for i, vi in enumerate(v):
            if abs(z - vi) <= tolerance:
                x[0] = vi
                direction = _unit(np.array([np.mean(v) - vi]))
                return point(direction, _admissible_depth(domain, x, direction), smooth=False, component=0)
        for i in range(len(v)):
            if _segment_distance(np.array([z]), v[i], v[i] + e[i])[0] <= tolerance:
                t = ((z - v[i]) * np.conj(e[i])).real / abs(e[i]) ** 2
                x[0] = v[i] + t * e[i]
                normal = np.array([1j * e[i] / abs(e[i])])
                return point(normal, _admissible_depth(domain, x, normal), component=0)
        raise DomainError(f"{z} is not on the polygon boundary")

    if kind == DomainKind.LATTICE_DISC_COMPLEMENT:
        x0, x1, y0, y1 = domain.window
        sides = [(x0, 1 + 0j, z.real), (x1, -1 + 0j, z.real), (y0, 1j, z.imag), (y1, -1j, z.imag)]
        hits = [(normal) for edge, normal, coord in sides if abs(coord - edge) <= tolerance]
        if hits and x0 - tolerance <= z.real <= x1 + tolerance and y0 - tolerance <= z.imag <= y1 + tolerance:
            direction = _unit(np.array([sum(hits)]))
            return point(direction, 0.2, smooth=len(hits) == 1, component=0)
        c = _nearest_gaussian_integer(np.array([z]))[0]
        if abs(abs(z - c) - domain.hole_radius) <= tolerance:
            normal = (z - c) / abs(z - c)
            x[0] = c + domain.hole_radius * normal
            return point([normal], 0.2, component=_hole_id(domain, c))
        raise DomainError(f"{z} is not on the boundary of the lattice window")

    if kind == DomainKind.TAKAGI_DOMAIN:
        t, y = z.real, z.imag
        if 0 < t < 1 and abs(y - takagi(t, domain.depth)) <= max(tolerance, 1e-12):
            x[0] = complex(t, takagi(t, domain.depth))
            return point([1j], (2 - x[0].imag) / 2, smooth=False)
        if 0 < t < 1 and abs(y - 2) <= tolerance:
            x[0] = complex(t, 2.0)
            return point([-1j], (2 - takagi(t, domain.depth)) / 2)
        for edge, normal in ((0.0, 1 + 0j), (1.0, -1 + 0j)):
            if abs(t - edge) <= tolerance and 0 <= y <= 2:
                x[0] = complex(edge, y)
                direction = np.array([normal])
                return point(direction, _admissible_depth(domain, x, direction), smooth=False)
        raise DomainError(f"{z} is not on the boundary of the Takagi domain")

    raise DomainError(f"Unsupported domain kind {kind}")


def _hole_id(domain: DomainDescriptor, c: complex) -> int:
    x0, x1, _, _ = domain.window
    n = int(round(x1 - 0.5))
    m_idx = int(round(c.real)) + n
    n_idx = int(round(c.imag)) + n
    return 1 + m_idx * (2 * n + 1) + n_idx


def side_tags_at(domain: DomainDescriptor, coordinates: Any) -> Tuple[Optional[str], ...]:
    """Side tags under which a boundary location can be approached"""
    if domain.kind != DomainKind.SLIT_DISC:
        return (None,)
    z = as_point(domain, coordinates)[0]
    if abs(z.imag) <= 1e-9 and 1e-9 < z.real <= 1 + 1e-9:
        return SIDE_TAGS
    return (None,)


def boundary_sides(domain: DomainDescriptor, coordinates: Any, tolerance: float = BOUNDARY_TOLERANCE) -> List[BoundaryPoint]:
    """All side-tagged boundary points sharing the given location"""
    return [make_boundary_point(domain, coordinates, tag, tolerance) for tag in side_tags_at(domain, coordinates)]


def snap_to_boundary(domain: DomainDescriptor, p: Any, tolerance: float = 1e-3) -> Optional[BoundaryPoint]:
    """
    Project a point lying within tolerance of the boundary onto it

    Returns:
        BoundaryPoint, or None when p is farther than tolerance from the boundary
    """
    x = as_point(domain, p).copy()
    kind = domain.kind
    if kind in (DomainKind.UNIT_DISC, DomainKind.EUCLIDEAN_BALL):
        r = np.sqrt(np.sum(np.abs(x) ** 2))
        return make_boundary_point(domain, x / r) if abs(1 - r) <= tolerance else None
    if kind == DomainKind.POLYDISC:
        m = np.abs(x)
        near = np.abs(1 - m) <= tolerance
        if not near.any():
            return None
        x[near] = x[near] / m[near]
        return make_boundary_point(domain, x)
    if kind == DomainKind.PUNCTURED_BALL:
        q = np.asarray(domain.puncture, dtype=complex)
        if np.sqrt(np.sum(np.abs(x - q) ** 2)) <= tolerance:
            return make_boundary_point(domain, q)
        r = np.sqrt(np.sum(np.abs(x) ** 2))
        return make_boundary_point(domain, x / r) if abs(1 - r) <= tolerance else None

    z = x[0]
    candidates: List[Tuple[float, complex, Optional[str]]] = []
    if kind in (DomainKind.SLIT_DISC, DomainKind.HALF_DISC):
        if abs(z) > 0:
            circle = z / abs(z)
            if kind == DomainKind.SLIT_DISC or circle.imag > 0:
                candidates.append((abs(abs(z) - 1), circle, None))
        if kind == DomainKind.SLIT_DISC:
            s = complex(min(max(z.real, 0.0), 1.0), 0.0)
            tag = None if s == 0 else (ABOVE if z.imag >= 0 else BELOW)
            candidates.append((abs(z - s), s, tag))
        else:
            candidates.append((abs(z.imag), complex(min(max(z.real, -1.0), 1.0), 0.0), None))
    elif kind == DomainKind.CONVEX_POLYGON:
        v = np.asarray(domain.vertices, dtype=complex)
        e = _polygon_edges(domain)
        for i in range(len(v)):
            t = min(max(((z - v[i]) * np.conj(e[i])).real / abs(e[i]) ** 2, 0.0), 1.0)
            q = v[i] + t * e[i]
            candidates.append((abs(z - q), q, None))
    elif kind == DomainKind.LATTICE_DISC_COMPLEMENT:
        x0, x1, y0, y1 = domain.window
        c = _nearest_gaussian_integer(np.array([z]))[0]
        if z != c:
            candidates.append((abs(abs(z - c) - domain.hole_radius), c + domain.hole_radius * (z - c) / abs(z - c), None))
        for q in (complex(x0, z.imag), complex(x1, z.imag), complex(z.real, y0), complex(z.real, y1)):
            candidates.append((abs(z - q), q, None))
    elif kind == DomainKind.TAKAGI_DOMAIN:
        tree, pts = _takagi_graph(domain.depth)
        d, idx = tree.query([z.real, z.imag])
        t = float(pts[idx, 0])
        candidates.append((float(d), complex(t, takagi(t, domain.depth)), None))
        for q in (complex(0.0, z.imag), complex(1.0, z.imag), complex(z.real, 2.0)):
            candidates.append((abs(z - q), q, None))
    else:
        raise DomainError(f"Unsupported domain kind {kind}")

    dist, q, tag = min(candidates, key=lambda c: c[0])
    if dist > tolerance:
        return None
    if kind == DomainKind.SLIT_DISC and abs(q - 1) < 1e-12:
        tag = ABOVE if z.imag >= 0 else BELOW
    return make_boundary_point(domain, q, tag, tolerance=max(BOUNDARY_TOLERANCE, 1e-6))


# ---------------------------------------------------------------------------
# Samplers
# ---------------------------------------------------------------------------

def sample_boundary(domain: DomainDescriptor, count: int, seed: int = 0) -> List[BoundaryPoint]:
    """
    Deterministic boundary sample covering every boundary component

    Slit points are emitted twice (side tags 'above' and 'below'), so the slit
    disc sample has more than count entries. Windowed kinds emit at least one
    point per component.

    Args:
        domain: domain descriptor
        count: requested number of samples (>= 1)
        seed: seed for numpy.random.default_rng

    Returns:
        list of BoundaryPoint

    Raises:
        DomainError: count < 1, or an unbounded kind without a window
    """
    if count < 1:
        raise DomainError("count must be at least 1")
    if not domain.bounded and domain.window is None:
        raise DomainError(f"{domain.label} is unbounded and has no window configured")
    rng = np.random.default_rng(seed)
    kind = domain.kind
    points: List[BoundaryPoint] = []

    if kind == DomainKind.UNIT_DISC:
        for theta in np.sort(rng.uniform(0, 2 * np.pi, count)):
            points.append(make_boundary_point(domain, np.exp(1j * theta)))
    elif kind == DomainKind.EUCLIDEAN_BALL:
        for _ in range(count):
            v = rng.normal(size=domain.dimension) + 1j * rng.normal(size=domain.dimension)
            points.append(make_boundary_point(domain, _unit(v)))
    elif kind == DomainKind.POLYDISC:
        n_shilov = max(1, count // 2)
        for _ in range(n_shilov):
            points.append(make_boundary_point(domain, np.exp(1j * rng.uniform(0, 2 * np.pi, domain.dimension))))
        for _ in range(count - n_shilov):
            j = int(rng.integers(domain.dimension))
            coords = rng.uniform(0, 0.9, domain.dimension) * np.exp(1j * rng.uniform(0, 2 * np.pi, domain.dimension))
            coords[j] = np.exp(1j * rng.uniform(0, 2 * np.pi))
            points.append(make_boundary_point(domain, coords))
    elif kind == DomainKind.PUNCTURED_BALL:
        points.append(make_boundary_point(domain, np.asarray(domain.puncture, dtype=complex)))
        for _ in range(max(count - 1, 0)):
            v = rng.normal(size=domain.dimension) + 1j * rng.normal(size=domain.dimension)
            points.append(make_boundary_point(domain, _unit(v)))
    elif kind == DomainKind.SLIT_DISC:
        n_slit = count // 2
        for theta in np.sort(rng.uniform(1e-3, 2 * np.pi - 1e-3, count - n_slit)):
            points.append(make_boundary_point(domain, np.exp(1j * theta)))
        for s in np.sort(rng.uniform(0.01, 0.99, n_slit)):
            for tag in SIDE_TAGS:
                points.append(make_boundary_point(domain, s, tag))
    elif kind == DomainKind.HALF_DISC:
        n_diam = count // 2
        for theta in np.sort(rng.uniform(1e-3, np.pi - 1e-3, count - n_diam)):
            points.append(make_boundary_point(domain, np.exp(1j * theta)))
        for s in np.sort(rng.uniform(-0.99, 0.99, n_diam)):
            points.append(make_boundary_point(domain, s))
    elif kind == DomainKind.CONVEX_POLYGON:
        v = np.asarray(domain.vertices, dtype=complex)
        e = _polygon_edges(domain)
        lengths = np.abs(e)
        edges = rng.choice(len(v), size=count, p=lengths / lengths.sum())
        for i, t in sorted(zip(edges, rng.uniform(0.01, 0.99, count))):
            points.append(make_boundary_point(domain, v[i] + t * e[i]))
    elif kind == DomainKind.LATTICE_DISC_COMPLEMENT:
        x0, x1, y0, y1 = domain.window
        n = int(round(x1 - 0.5))
        centers = [complex(m, k) for m in range(-n, n + 1) for k in range(-n, n + 1)]
        per_component = max(1, count // (len(centers) + 1))
        frame = [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)]
        for _ in range(per_component):
            side = int(rng.integers(4))
            t = rng.uniform(0.01, 0.99)
            points.append(make_boundary_point(domain, frame[side] + t * (frame[(side + 1) % 4] - frame[side])))
        for c in centers:
            for theta in rng.uniform(0, 2 * np.pi, per_component):
                points.append(make_boundary_point(domain, c + domain.hole_radius * np.exp(1j * theta)))
    elif kind == DomainKind.TAKAGI_DOMAIN:
        for t in np.sort(rng.uniform(0.01, 0.99, count)):
            points.append(make_boundary_point(domain, complex(t, takagi(t, domain.depth))))
    else:
        raise DomainError(f"Unsupported domain kind {kind}")

    logger.debug(f"Sampled {len(points)} boundary points of {domain.label} (seed={seed})")
    return points


def sample_interior(domain: DomainDescriptor, count: int, seed: int = 0, min_depth: float = 0.0) -> np.ndarray:
    """
    Deterministic rejection sample of interior points

    Args:
        domain: domain descriptor
        count: number of points
        seed: rng seed
        min_depth: minimum Euclidean boundary distance of accepted points

    Returns:
        array of shape (count, dim)
    """
    rng = np.random.default_rng(seed)
    if domain.window is not None and domain.planar:
        x0, x1, y0, y1 = domain.window
    else:
        x0, x1, y0, y1 = -1.0, 1.0, -1.0, 1.0
    accepted: List[np.ndarray] = []
    have = 0
    while have < count:
        batch = 4 * (count - have) + 16
        P = rng.uniform(x0, x1, (batch, domain.dimension)) + 1j * rng.uniform(y0, y1, (batch, domain.dimension))
        mask, dist = _signed_interior_distance(domain, P)
        good = P[mask & (dist > min_depth)]
        accepted.append(good)
        have += len(good)
    return np.concatenate(accepted)[:count]


# ---------------------------------------------------------------------------
# Approach sequences
# ---------------------------------------------------------------------------

class SchemeKind(Enum):
    """Ways of letting w tend to a boundary point"""
    NORMAL = "normal"
    CONE = "cone"
    TANGENTIAL_ARC = "tangential_arc"
    CUSTOM = "custom"


@dataclass(frozen=True)
class ApproachScheme:
    """An approach scheme; custom schemes carry an offset curve s -> displacement from x"""
    kind: SchemeKind = SchemeKind.NORMAL
    angle: float = 0.0
    offset: Optional[Callable[[float], Any]] = field(default=None, compare=False)
    name: str = ""

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        if self.kind == SchemeKind.CONE:
            return f"cone({self.angle:g})"
        return self.kind.value

    @staticmethod
    def parse(spec: Union[str, "ApproachScheme"]) -> "ApproachScheme":
        """Parse 'normal', 'cone(0.5)' or 'tangential_arc'"""
        if isinstance(spec, ApproachScheme):
            return spec
        text = spec.strip()
        if text.startswith("cone"):
            inner = text[4:].strip("() ")
            return ApproachScheme(SchemeKind.CONE, angle=float(inner) if inner else math.pi / 4)
        try:
            return ApproachScheme(SchemeKind(text))
        except ValueError:
            raise DomainError(f"Unknown approach scheme '{spec}'")


NORMAL = ApproachScheme()


def approach_sequence(
    domain: DomainDescriptor,
    x: BoundaryPoint,
    scheme: Union[str, ApproachScheme] = NORMAL,
    n: int = 40,
    ratio: Optional[float] = None,
    floor: Optional[float] = None,
) -> np.ndarray:
    """
    Interior points converging geometrically to a boundary point

    The k-th point sits at scale s = ratio^k (k = 1..n). Generation stops early
    once the Euclidean step drops below the floor (default 1e-12).

    Args:
        domain: domain descriptor
        x: target boundary point (its side tag selects the side)
        scheme: normal, cone(angle), tangential_arc or custom
        n: number of points requested (>= 2)
        ratio: geometric ratio, default 1/2
        floor: smallest admissible Euclidean step

    Returns:
        array of shape (m, dim), m <= n

    Raises:
        DomainError: n < 2, or the scheme leaves the domain / is inadmissible at x
    """
    settings = get_settings()
    ratio = ratio if ratio is not None else settings.approach_ratio
    floor = floor if floor is not None else settings.approach_floor
    scheme = ApproachScheme.parse(scheme)
    if n < 2:
        raise DomainError("An approach sequence needs n >= 2")
    if x.domain != domain:
        raise DomainError(f"Boundary point belongs to {x.domain.label}, not {domain.label}")

    ks = np.arange(1, n + 1)
    scales = ratio ** ks
    scales = scales[x.t0 * scales >= floor]
    if len(scales) < 2:
        raise DomainError(f"Approach floor {floor} leaves fewer than two points")
    normal = x.inward_normal

    if scheme.kind == SchemeKind.NORMAL:
        offsets = (x.t0 * scales)[:, None] * normal[None, :]
    elif scheme.kind == SchemeKind.CONE:
        if not abs(scheme.angle) < math.pi / 2:
            raise DomainError("Cone angle must be below pi/2")
        direction = normal * np.exp(1j * scheme.angle)
        offsets = (x.t0 * math.cos(scheme.angle) * scales)[:, None] * direction[None, :]
    elif scheme.kind == SchemeKind.TANGENTIAL_ARC:
        if not x.smooth:
            raise DomainError(f"Tangential approach is inadmissible at the non-smooth point {x}")
        tangent = 1j * normal
        offsets = x.t0 * (scales[:, None] ** 2 * normal[None, :] + 0.5 * scales[:, None] * tangent[None, :])
    else:
        if scheme.offset is None:
            raise DomainError("Custom scheme without an offset curve")
        offsets = np.array([as_point(domain, scheme.offset(float(s))) for s in scales])

    points = x.coordinates[None, :] + offsets
    inside = contains_many(domain, points)
    if not np.all(inside):
        bad = int(np.flatnonzero(~inside)[0])
        raise DomainError(f"Scheme {scheme.label} is inadmissible at {x}: point {bad} leaves {domain.label}")
    return points
