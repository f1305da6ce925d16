"""
grid_surrogate.py
Quasihyperbolic grid graph

Discrete stand-in for the Kobayashi distance on planar domains without a
closed form. Nodes sit at integer multiples of the resolution h, joined by an
8-neighbor stencil; each edge costs its Euclidean length divided by the
boundary distance at its midpoint (two quarter-point samples for edges near
the boundary). Shortest paths come from scipy's Dijkstra.

On simply-connected planar domains the quasihyperbolic distance k_q and the
Kobayashi distance k satisfy k <= k_q <= 4k.
"""

import logging
import math
from functools import lru_cache
from typing import List, Tuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra
from scipy.spatial import cKDTree

from horolab.domains import DomainDescriptor, distance_field
from horolab.errors import DomainError, NumericalError

logger = logging.getLogger(__name__)

STENCIL = ((1, 0), (0, 1), (1, 1), (1, -1))
ATTACH_RADIUS = 1.5
OCTILE_EXCESS = 1 / math.cos(math.pi / 8) - 1
SOURCE_CHUNK = 64


class QuasihyperbolicGrid:
    """
    Grid graph for one (domain, h) pair, built once and shared read-only

    Use grid_for(domain, h) to get the cached instance.
    """

    def __init__(self, domain: DomainDescriptor, h: float):
        if not domain.planar:
            raise DomainError(f"Grid surrogate needs a planar domain, got {domain.label}")
        if h <= 0:
            raise DomainError("Grid resolution must be positive")
        self.domain = domain
        self.h = float(h)
        x0, x1, y0, y1 = domain.window if domain.window is not None else (-1.0, 1.0, -1.0, 1.0)
        i_range = np.arange(math.ceil(x0 / h), math.floor(x1 / h) + 1)
        j_range = np.arange(math.ceil(y0 / h), math.floor(y1 / h) + 1)
        I, J = np.meshgrid(i_range, j_range, indexing="ij")
        points = (I * h + 1j * J * h).ravel()
        mask, bd = distance_field(domain, points)
        keep = mask & (bd > 0)

        index = np.full(I.shape, -1, dtype=np.int64)
        index.ravel()[np.flatnonzero(keep)] = np.arange(int(keep.sum()))
        self.nodes = points[keep]
        self.boundary_distance = bd[keep]

        rows: List[np.ndarray] = []
        cols: List[np.ndarray] = []
        weights: List[np.ndarray] = []
        ni, nj = I.shape
        for di, dj in STENCIL:
            ra, rb = _shifted(di, ni)
            ca, cb = _shifted(dj, nj)
            a = index[ra, ca]
            b = index[rb, cb]
            both = (a >= 0) & (b >= 0)
            ia, ib = a[both], b[both]
            w, ok = self.segment_costs(self.nodes[ia], self.nodes[ib], self.boundary_distance[ia], self.boundary_distance[ib])
            rows.append(ia[ok])
            cols.append(ib[ok])
            weights.append(w[ok])
        self._rows = np.concatenate(rows) if rows else np.zeros(0, dtype=np.int64)
        self._cols = np.concatenate(cols) if cols else np.zeros(0, dtype=np.int64)
        self._weights = np.concatenate(weights) if weights else np.zeros(0)
        self._tree = cKDTree(np.column_stack([self.nodes.real, self.nodes.imag]))
        logger.info(f"Built quasihyperbolic grid for {domain.label}: h={h}, {len(self.nodes)} nodes, {len(self._weights)} edges")

    @property
    def size(self) -> int:
        return len(self.nodes)

    def segment_costs(
        self, za: np.ndarray, zb: np.ndarray, bda: np.ndarray, bdb: np.ndarray
    ) -> Tuple[np.ndarray, np.ndarray]:
        """
        Quasihyperbolic cost of straight segments and their admission mask

        A segment is admitted when its length is below the boundary distance of
        one endpoint, so it lies in the domain.
        """
        length = np.abs(zb - za)
        admitted = length < np.maximum(bda, bdb)
        near = np.minimum(bda, bdb) < 2 * self.h
        _, bd_mid = distance_field(self.domain, (za + zb) / 2)
        _, bd_q1 = distance_field(self.domain, za + 0.25 * (zb - za))
        _, bd_q3 = distance_field(self.domain, za + 0.75 * (zb - za))
        with np.errstate(divide="ignore", invalid="ignore"):
            cost = np.where(near, 0.5 * length / bd_q1 + 0.5 * length / bd_q3, length / bd_mid)
        admitted &= np.isfinite(cost) & (cost >= 0)
        return np.where(admitted, cost, np.inf), admitted

    def _augmented(self, points: np.ndarray):
        """Graph with the query points appended as extra nodes"""
        mask, bd = distance_field(self.domain, points)
        if not np.all(mask):
            bad = points[~mask][0]
            raise DomainError(f"Point {bad} is not interior to {self.domain.label}")
        if np.any(bd < self.h):
            bad = points[bd < self.h][0]
            raise NumericalError(
                f"Grid resolution h={self.h} is coarser than the boundary distance {bd[bd < self.h][0]:.3g} at {bad}"
            )
        n = self.size
        q = len(points)
        rows = [self._rows]
        cols = [self._cols]
        weights = [self._weights]
        neighbors = self._tree.query_ball_point(np.column_stack([points.real, points.imag]), ATTACH_RADIUS * self.h)
        for k, nbrs in enumerate(neighbors):
            if not nbrs:
                raise NumericalError(f"No grid node near {points[k]} at h={self.h}")
            nbrs = np.asarray(nbrs, dtype=np.int64)
            w, ok = self.segment_costs(
                np.full(len(nbrs), points[k]), self.nodes[nbrs], np.full(len(nbrs), bd[k]), self.boundary_distance[nbrs]
            )
            rows.append(np.full(int(ok.sum()), n + k))
            cols.append(nbrs[ok])
            weights.append(w[ok])
        if q > 1:
            qtree = cKDTree(np.column_stack([points.real, points.imag]))
            pairs = qtree.query_pairs(ATTACH_RADIUS * self.h, output_type="ndarray")
            if len(pairs):
                a, b = pairs[:, 0], pairs[:, 1]
                w, ok = self.segment_costs(points[a], points[b], bd[a], bd[b])
                ok &= w > 0
                rows.append(n + a[ok])
                cols.append(n + b[ok])
                weights.append(w[ok])
        r = np.concatenate(rows)
        c = np.concatenate(cols)
        w = np.maximum(np.concatenate(weights), np.finfo(float).tiny)
        graph = coo_matrix((np.concatenate([w, w]), (np.concatenate([r, c]), np.concatenate([c, r]))), shape=(n + q, n + q))
        return graph.tocsr(), bd

    def pairwise(self, Z: np.ndarray, W: np.ndarray) -> np.ndarray:
        """Grid distances between every z in Z and every w in W"""
        Z = np.asarray(Z, dtype=complex).ravel()
        W = np.asarray(W, dtype=complex).ravel()
        graph, _ = self._augmented(np.concatenate([Z, W]))
        n = self.size
        z_ids = n + np.arange(len(Z))
        w_ids = n + len(Z) + np.arange(len(W))
        out = np.empty((len(Z), len(W)))
        for start in range(0, len(Z), SOURCE_CHUNK):
            block = dijkstra(graph, directed=False, indices=z_ids[start:start + SOURCE_CHUNK])
            out[start:start + SOURCE_CHUNK] = block[:, w_ids]
        out[Z[:, None] == W[None, :]] = 0.0
        if not np.all(np.isfinite(out)):
            raise NumericalError(f"Grid graph at h={self.h} does not connect all query points")
        return out

    def paired(self, Z: np.ndarray, W: np.ndarray) -> np.ndarray:
        Z = np.asarray(Z, dtype=complex).ravel()
        W = np.asarray(W, dtype=complex).ravel()
        if len(Z) == 1:
            return self.pairwise(Z, W)[0]
        return np.array([self.pairwise(Z[k:k + 1], W[k:k + 1])[0, 0] for k in range(len(Z))])

    def shortest_path(self, z: complex, w: complex) -> Tuple[np.ndarray, float]:
        """
        Node sequence of a shortest grid path from z to w

        Returns:
            (points from z to w, grid length)
        """
        pts = np.array([z, w], dtype=complex)
        graph, _ = self._augmented(pts)
        n = self.size
        dist, pred = dijkstra(graph, directed=False, indices=n, return_predecessors=True)
        if not np.isfinite(dist[n + 1]):
            raise NumericalError(f"No grid path between {z} and {w}")
        chain = [n + 1]
        while chain[-1] != n:
            chain.append(int(pred[chain[-1]]))
        chain.reverse()
        all_nodes = np.concatenate([self.nodes, pts])
        return all_nodes[chain], float(dist[n + 1])

    def error_bound(self, values: np.ndarray, bd_z: np.ndarray, bd_w: np.ndarray) -> np.ndarray:
        """Additive deviation bound from the quasihyperbolic value: stencil anisotropy plus attachment"""
        return OCTILE_EXCESS * np.asarray(values) + ATTACH_RADIUS * self.h * (1 / np.asarray(bd_z) + 1 / np.asarray(bd_w))


def _shifted(d: int, n: int) -> Tuple[slice, slice]:
    """Index slices pairing position k with k + d"""
    if d >= 0:
        return slice(0, n - d), slice(d, n)
    return slice(-d, n), slice(0, n + d)


@lru_cache(maxsize=8)
def grid_for(domain: DomainDescriptor, h: float) -> QuasihyperbolicGrid:
    """Cached grid per (domain, h)"""
    return QuasihyperbolicGrid(domain, h)
