"""
rendering.py
Static SVG rasters of horospheres and paths

Membership verdicts are drawn as three fills (In / Out / Undetermined) over
the domain window, with the domain boundary overlaid and the boundary
center marked. Output is SVG 1.1 with no timestamp and a fixed hash salt, so
reruns are byte-identical.
"""

import io
import logging
import os
from typing import Any, Optional, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
from matplotlib.colors import ListedColormap

import numpy as np

from horolab.domains import BoundaryPoint, DomainDescriptor, DomainKind, as_point, boundary_distances, contains_many
from horolab.errors import DomainError
from horolab.geodesics import Path
from horolab.horospheres import IN, OUT, Flavor, disc_horoball_geometry, horofunction_grid, membership_codes
from horolab.metrics import GridSurrogate, MetricBackend

logger = logging.getLogger(__name__)

VERDICT_COLORS = ListedColormap(["#d9d9d9", "#f2c14e", "#2f6690"])  # Out, Undetermined, In
RC = {
    "svg.hashsalt": "horolab",
    "svg.fonttype": "none",
    "font.size": 9,
}


def _window(domain: DomainDescriptor):
    if domain.window is not None:
        return domain.window
    return (-1.0, 1.0, -1.0, 1.0)


def _pixel_grid(domain: DomainDescriptor, resolution: int):
    x0, x1, y0, y1 = _window(domain)
    xs = np.linspace(x0, x1, resolution)
    ys = np.linspace(y0, y1, resolution)
    Xg, Yg = np.meshgrid(xs, ys)
    return xs, ys, (Xg + 1j * Yg).ravel()


def _overlay_boundary(ax, domain: DomainDescriptor, xs: np.ndarray, ys: np.ndarray, mask: np.ndarray) -> None:
    ax.contour(xs, ys, mask.reshape(len(ys), len(xs)).astype(float), levels=[0.5], colors="black", linewidths=0.8)
    if domain.kind == DomainKind.SLIT_DISC:
        ax.plot([0.0, 1.0], [0.0, 0.0], color="black", linewidth=1.2)


def _to_svg(fig, out: Optional[str]) -> str:
    buffer = io.StringIO()
    with plt.rc_context(RC):
        fig.savefig(buffer, format="svg", metadata={"Date": None})
    plt.close(fig)
    svg = buffer.getvalue()
    if out:
        parent = os.path.dirname(os.path.abspath(out))
        os.makedirs(parent, exist_ok=True)
        with open(out, "w") as f:
            f.write(svg)
        logger.info(f"Wrote {out}")
    return svg


def render_horosphere_raster(
    backend: MetricBackend,
    o: Any,
    x: BoundaryPoint,
    R: float,
    flavor: Union[Flavor, str],
    resolution: int = 200,
    out: Optional[str] = None,
) -> str:
    """
    Rasterize horosphere membership over a planar domain

    Args:
        backend: distance backend on a planar domain
        o: pole
        x: boundary target
        R: horosphere parameter
        flavor: small or big
        resolution: pixels per axis
        out: optional SVG path

    Returns:
        SVG text

    Raises:
        DomainError: non-planar domain or resolution < 1
    """
    domain = backend.domain
    if not domain.planar:
        raise DomainError(f"Rasters need a planar domain, got {domain.label}")
    if resolution < 1:
        raise DomainError(f"Raster resolution must be positive, got {resolution}")
    flavor = Flavor(flavor)
    xs, ys, Z = _pixel_grid(domain, resolution)
    mask = contains_many(domain, Z)
    usable = mask.copy()
    if isinstance(backend, GridSurrogate):
        usable[mask] = boundary_distances(domain, Z[mask]) >= 2 * backend.h
    codes = np.zeros(len(Z), dtype=int)
    if usable.any():
        grid = horofunction_grid(backend, o, Z[usable][:, None], x)
        codes[usable] = membership_codes(grid, R, flavor)
    image = np.where(mask, codes, np.nan).astype(float).reshape(resolution, resolution)
    logger.info(f"Raster {domain.label} x={x} R={R:.4g} {flavor.value}: {int(np.sum(codes == IN))} In, {int(np.sum(codes == OUT))} Out")

    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(5, 5))
        ax.imshow(image, origin="lower", extent=_window(domain), cmap=VERDICT_COLORS, vmin=-1, vmax=1, interpolation="nearest")
        _overlay_boundary(ax, domain, xs, ys, mask)
        ax.plot([x.z.real], [x.z.imag], marker="x", color="crimson", markersize=8)
        if domain.kind == DomainKind.UNIT_DISC:
            center, _ = disc_horoball_geometry(x.z, R, complex(as_point(domain, o)[0]))
            ax.plot([center.real], [center.imag], marker="+", color="crimson", markersize=8)
        ax.set_title(f"{domain.label}  H^{flavor.value[0]}  R={R:.4g}")
        ax.set_aspect("equal")
        ax.set_axis_off()
    return _to_svg(fig, out)


def render_path(path: Path, out: Optional[str] = None, resolution: int = 200) -> str:
    """SVG polyline of a planar path over the domain raster"""
    domain = path.domain
    if not domain.planar:
        raise DomainError(f"Path rendering needs a planar domain, got {domain.label}")
    xs, ys, Z = _pixel_grid(domain, resolution)
    mask = contains_many(domain, Z)
    pts = path.points[:, 0]
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(5, 5))
        ax.imshow(mask.reshape(resolution, resolution), origin="lower", extent=_window(domain), cmap="Greys", vmin=0, vmax=4)
        _overlay_boundary(ax, domain, xs, ys, mask)
        ax.plot(pts.real, pts.imag, color="crimson", linewidth=1.2)
        ax.plot([pts[0].real], [pts[0].imag], marker="o", color="black", markersize=4)
        ax.set_title(f"{path.kind.value} on {domain.label} ({path.backend.label})")
        ax.set_aspect("equal")
        ax.set_axis_off()
    return _to_svg(fig, out)
