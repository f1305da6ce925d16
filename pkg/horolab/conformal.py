"""
conformal.py
Closed-form conformal maps

Explicit biholomorphisms between the planar model domains and the unit disc:
disc automorphisms, the upper half-disc uniformizer, and the slit-disc
Riemann map built from it. All evaluators are vectorized over complex arrays.

Branch conventions:
- square root on the slit disc: principal root, negated when its imaginary
  part is negative, so arg lies in [0, pi); points of the slit [0, 1) are rejected
- inverse Joukowski: the root of z^2 + 2uz + 1 = 0 inside the closed
  upper half-disc
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional

import numpy as np

from horolab.domains import BoundaryPoint, DomainDescriptor, DomainKind, half_disc, slit_disc, unit_disc
from horolab.errors import DomainError

logger = logging.getLogger(__name__)

Evaluator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class MapDescriptor:
    """A biholomorphism with closed-form forward and inverse evaluators"""
    name: str
    source: DomainDescriptor
    target: DomainDescriptor
    forward: Evaluator
    inverse: Evaluator
    branch_note: str = ""
    half_plane: Optional[Evaluator] = None
    cache: Dict[Any, Any] = field(default_factory=dict, repr=False)

    def __call__(self, z: Any) -> Any:
        arr = np.asarray(z, dtype=complex)
        out = self.forward(arr)
        return complex(out) if np.ndim(out) == 0 else out

    def inverted(self) -> "MapDescriptor":
        return MapDescriptor(
            name=f"{self.name}^-1",
            source=self.target,
            target=self.source,
            forward=self.inverse,
            inverse=self.forward,
            branch_note=self.branch_note,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "source": self.source.to_dict(),
            "target": self.target.to_dict(),
            "branch_note": self.branch_note,
        }


# ---------------------------------------------------------------------------
# Elementary pieces
# ---------------------------------------------------------------------------

def cayley(u: np.ndarray) -> np.ndarray:
    """Upper half-plane to unit disc, u -> (u - i)/(u + i)"""
    return (u - 1j) / (u + 1j)


def inverse_cayley(v: np.ndarray) -> np.ndarray:
    """Unit disc to upper half-plane, v -> i(1 + v)/(1 - v)"""
    return 1j * (1 + v) / (1 - v)


def joukowski_half(zeta: np.ndarray) -> np.ndarray:
    """Upper half-disc to upper half-plane, zeta -> -(zeta + 1/zeta)/2"""
    return -(zeta + 1 / zeta) / 2


def inverse_joukowski_half(u: np.ndarray) -> np.ndarray:
    """
    Upper half-plane (and its real axis) back to the closed upper half-disc

    Picks the root of zeta^2 + 2u zeta + 1 = 0 of modulus below one; when both
    roots are unimodular (u real in [-1, 1]) the one with nonnegative imaginary
    part is returned.
    """
    u = np.asarray(u, dtype=complex)
    s = np.sqrt(u * u - 1)
    r1 = -u + s
    r2 = -u - s
    inside = np.abs(r1) < np.abs(r2)
    tie = np.abs(np.abs(r1) - np.abs(r2)) < 1e-12
    upper = np.where(r1.imag >= r2.imag, r1, r2)
    return np.where(tie, upper, np.where(inside, r1, r2))


def slit_sqrt(z: np.ndarray) -> np.ndarray:
    """Square root with arg in [0, pi), raising on the slit [0, 1)"""
    z = np.asarray(z, dtype=complex)
    on_slit = (z.imag == 0) & (z.real >= 0)
    if np.any(on_slit):
        bad = z[on_slit].ravel()[0]
        raise DomainError(f"Square-root branch is undefined on the slit, got {bad}")
    root = np.sqrt(z)
    return np.where(root.imag < 0, -root, root)


# ---------------------------------------------------------------------------
# Map factories
# ---------------------------------------------------------------------------

def disc_automorphism(a: complex = 0j, theta: float = 0.0) -> MapDescriptor:
    """
    Disc automorphism z -> e^{i theta} (z - a)/(1 - conj(a) z)

    Args:
        a: point sent to 0, |a| < 1
        theta: rotation angle

    Returns:
        MapDescriptor from the unit disc onto itself
    """
    a = complex(a)
    if abs(a) >= 1:
        raise DomainError(f"Automorphism parameter must lie in the disc, got {a}")
    rot = np.exp(1j * theta)

    def forward(z):
        return rot * (z - a) / (1 - np.conj(a) * z)

    def inverse(v):
        w = v / rot
        return (w + a) / (1 + np.conj(a) * w)

    disc = unit_disc()
    return MapDescriptor(f"automorphism(a={a:.4g}, theta={theta:.4g})", disc, disc, forward, inverse)


def half_disc_uniformizer() -> MapDescriptor:
    """Upper half-disc onto the unit disc, zeta -> cayley(-(zeta + 1/zeta)/2)"""
    return MapDescriptor(
        name="half_disc_uniformizer",
        source=half_disc(),
        target=unit_disc(),
        forward=lambda zeta: cayley(joukowski_half(zeta)),
        inverse=lambda v: inverse_joukowski_half(inverse_cayley(v)),
        branch_note="inverse Joukowski root taken in the closed upper half-disc",
        half_plane=joukowski_half,
    )


def half_disc_riemann_map() -> MapDescriptor:
    """Unit disc onto the upper half-disc (inverse of the uniformizer)"""
    return half_disc_uniformizer().inverted()


def _slit_forward(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    tip = np.abs(1 - v) < 1e-300
    safe = np.where(tip, 0j, v)
    zeta = inverse_joukowski_half(inverse_cayley(safe))
    return np.where(tip, 0j, zeta * zeta)


def slit_to_half_plane(z: np.ndarray) -> np.ndarray:
    return joukowski_half(slit_sqrt(z))


def slit_disc_uniformizer() -> MapDescriptor:
    """
    Slit disc onto the unit disc, z -> cayley(-(sqrt z + 1/sqrt z)/2)

    Sends the point -(3 - 2 sqrt 2) to 0. The two sides of a slit point s in
    (0, 1) go to the two distinct unimodular points cayley(-+(sqrt s + 1/sqrt s)/2).
    """
    return MapDescriptor(
        name="slit_disc_uniformizer",
        source=slit_disc(),
        target=unit_disc(),
        forward=lambda z: cayley(slit_to_half_plane(z)),
        inverse=_slit_forward,
        branch_note="sqrt with arg in [0, pi); slit [0, 1) excluded; inverse Joukowski root in the upper half-disc",
        half_plane=slit_to_half_plane,
    )


def slit_disc_riemann_map() -> MapDescriptor:
    """
    Riemann map psi from the unit disc onto the slit disc

    psi(v) is the square of the inverse half-disc uniformizer; psi(0) = -(3 - 2 sqrt 2)
    and psi(1) = 0 (the slit tip). Its continuous boundary extension hits each
    slit point twice.
    """
    return slit_disc_uniformizer().inverted()


SLIT_POLE = complex(-(3 - 2 * np.sqrt(2)), 0.0)


def boundary_value(chart: MapDescriptor, x: BoundaryPoint, depth: float = 1e-12) -> complex:
    """
    Unimodular image of a (side-tagged) boundary point under a chart onto the disc

    Evaluates the chart a tiny step inside along the inward normal, so the
    side tag of a slit point selects the side.
    """
    probe = x.coordinates[0] + depth * x.t0 * x.inward_normal[0]
    v = complex(chart.forward(np.asarray(probe)))
    return v / abs(v)


def compose(outer: MapDescriptor, inner: MapDescriptor) -> MapDescriptor:
    """outer after inner"""
    if outer.source.kind != inner.target.kind:
        raise DomainError(f"Cannot compose {outer.name} after {inner.name}")
    return MapDescriptor(
        name=f"{outer.name}.{inner.name}",
        source=inner.source,
        target=outer.target,
        forward=lambda z: outer.forward(inner.forward(z)),
        inverse=lambda v: inner.inverse(outer.inverse(v)),
        branch_note="; ".join(n for n in (inner.branch_note, outer.branch_note) if n),
    )


def chart_for(domain: DomainDescriptor) -> MapDescriptor:
    """Uniformizing chart of a planar domain kind that has one in closed form"""
    if domain.kind == DomainKind.SLIT_DISC:
        return slit_disc_uniformizer()
    if domain.kind == DomainKind.HALF_DISC:
        return half_disc_uniformizer()
    if domain.kind == DomainKind.UNIT_DISC:
        return disc_automorphism()
    raise DomainError(f"No closed-form chart for {domain.label}")
