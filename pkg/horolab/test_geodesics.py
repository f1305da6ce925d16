"""
test_geodesics.py
Test suite for geodesic segments, rays, quasi-geodesics and cluster sets
"""

import sys
import os
import csv
import math

_parent_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if _parent_dir not in sys.path:
    sys.path.insert(0, _parent_dir)

import numpy as np
import pytest

from horolab.domains import ABOVE, make_boundary_point, polydisc, slit_disc, square, unit_disc
from horolab.errors import DomainError
from horolab.geodesics import (
    Path,
    PathKind,
    ball_automorphism,
    cluster_set,
    convex_quasi_geodesic,
    convex_quasi_geodesic_point,
    fit_quasi_geodesic_constants,
    geodesic_ray,
    geodesic_segment,
    ray_distance_profile,
)
from horolab.metrics import ConformalPullback, ExactDisc, GridSurrogate, PolydiscMax, polydisc_distance


class TestSegments:
    """Tests for geodesic_segment"""

    def test_disc_segment_length(self):
        backend = ExactDisc()
        path = geodesic_segment(backend, 0.1j, 0.5)
        d = backend.distance(0.1j, 0.5).value
        assert path.kind == PathKind.GEODESIC
        assert path.params[-1] == pytest.approx(d)
        assert path.length == pytest.approx(d, rel=1e-9)
        assert path.points[0, 0] == 0.1j
        assert path.points[-1, 0] == 0.5

        print("✅ test_disc_segment_length passed")

    def test_polydisc_segment(self):
        backend = PolydiscMax(polydisc(2))
        z, w = np.array([0, 0.2j]), np.array([0.6, -0.3])
        path = geodesic_segment(backend, z, w)
        d = float(polydisc_distance(z[None, :], w[None, :])[0])
        assert path.diagnostics["distance"] == pytest.approx(d)
        assert path.length == pytest.approx(d, rel=1e-6)

        print("✅ test_polydisc_segment passed")

    def test_slit_segment_goes_around(self):
        backend = ConformalPullback(slit_disc())
        path = geodesic_segment(backend, 0.5 + 0.1j, 0.5 - 0.1j)
        assert path.points[0, 0] == pytest.approx(0.5 + 0.1j)
        assert path.points[-1, 0] == pytest.approx(0.5 - 0.1j)
        assert np.min(path.points[:, 0].real) < 0

        print("✅ test_slit_segment_goes_around passed")

    def test_equal_endpoints(self):
        with pytest.raises(DomainError):
            geodesic_segment(ExactDisc(), 0.2, 0.2)
        with pytest.raises(DomainError):
            geodesic_segment(ExactDisc(), 0.2, 1.2)

        print("✅ test_equal_endpoints passed")

    def test_grid_segment_is_quasi_geodesic(self):
        backend = GridSurrogate(square(), h=0.1)
        path = geodesic_segment(backend, -0.5 + 0j, 0.5 + 0j)
        assert path.kind in (PathKind.QUASI_GEODESIC, PathKind.PLAIN)
        assert path.points[0, 0] == -0.5 + 0j
        assert path.points[-1, 0] == 0.5 + 0j
        assert path.diagnostics["h"] == 0.1

        print("✅ test_grid_segment_is_quasi_geodesic passed")


class TestRays:
    """Tests for geodesic rays"""

    def test_disc_ray_is_unit_speed(self):
        backend = ExactDisc()
        x = make_boundary_point(unit_disc(), 1j)
        ray = geodesic_ray(backend, 0.2, x)
        assert ray.diagnostics["landing_certified"]
        profile = ray_distance_profile(ray, 0.2)
        early = ray.params <= 6
        assert np.allclose(profile[early], ray.params[early], atol=1e-6)

        print("✅ test_disc_ray_is_unit_speed passed")

    def test_ray_clusters_at_target(self):
        x = make_boundary_point(unit_disc(), -1.0)
        ray = geodesic_ray(ExactDisc(), 0, x)
        clusters = cluster_set(ray)
        assert len(clusters) == 1
        assert clusters[0].point.same_location(x, 1e-6)

        print("✅ test_ray_clusters_at_target passed")

    def test_slit_ray_lands_on_its_side(self):
        slit = slit_disc()
        x = make_boundary_point(slit, 0.5, ABOVE)
        ray = geodesic_ray(ConformalPullback(slit), -0.5, x)
        end = ray.point_at(8.0)
        assert abs(end[0] - 0.5) < 1e-3
        assert end[0].imag > 0

        print("✅ test_slit_ray_lands_on_its_side passed")

    def test_polydisc_face_ray(self):
        backend = PolydiscMax(polydisc(2))
        x = make_boundary_point(polydisc(2), [1, 0.5])
        ray = geodesic_ray(backend, [0, 0], x)
        end = ray.point_at(20.0)
        assert np.allclose(end, [1, 0.5], atol=1e-6)

        print("✅ test_polydisc_face_ray passed")

    def test_bad_ray(self):
        x = make_boundary_point(unit_disc(), 1.0)
        with pytest.raises(DomainError):
            geodesic_ray(ExactDisc(), 0, x, t_max=0)
        with pytest.raises(DomainError):
            geodesic_ray(ConformalPullback(slit_disc()), -0.5, x)

        print("✅ test_bad_ray passed")


class TestQuasiGeodesics:
    """Tests for the convex quasi-geodesic and the constant fit"""

    def test_disc_constants(self):
        x = make_boundary_point(unit_disc(), 1.0)
        path = convex_quasi_geodesic(ExactDisc(), 0, x)
        assert path.kind == PathKind.QUASI_GEODESIC
        assert path.alpha == 1.0
        assert path.beta <= 0.5 * math.log(2) + 1e-6

        print("✅ test_disc_constants passed")

    def test_sigma_formula(self):
        x = make_boundary_point(square(), 1.0)
        p = convex_quasi_geodesic_point(square(), 0, x, 0.5)
        assert p[0] == pytest.approx(1 - math.exp(-1))
        with pytest.raises(DomainError):
            convex_quasi_geodesic_point(square(), 0, x, -1.0)
        with pytest.raises(DomainError):
            convex_quasi_geodesic_point(slit_disc(), -0.5, make_boundary_point(slit_disc(), -1.0), 1.0)

        print("✅ test_sigma_formula passed")

    def test_fit_needs_samples(self):
        t = np.linspace(0, 1, 5)
        path = Path(t, 0.1 * t, ExactDisc())
        with pytest.raises(DomainError):
            fit_quasi_geodesic_constants(path)

        print("✅ test_fit_needs_samples passed")


class TestPath:
    """Tests for the Path container"""

    def test_validation(self):
        backend = ExactDisc()
        with pytest.raises(DomainError):
            Path(np.array([0.0, 0.0]), np.array([0.1, 0.2]), backend)
        with pytest.raises(DomainError):
            Path(np.array([0.0, 1.0]), np.array([0.1, 1.2]), backend)
        with pytest.raises(DomainError):
            Path(np.array([0.0]), np.array([0.1]), backend)

        print("✅ test_validation passed")

    def test_export_csv(self, tmp_path):
        path = geodesic_segment(ExactDisc(), 0, 0.5, samples=11)
        out = path.export_csv(str(tmp_path / "paths" / "segment.csv"))
        with open(out) as f:
            rows = list(csv.reader(f))
        assert rows[0] == ["t", "re0", "im0"]
        assert len(rows) == 12
        assert path.to_dict()["kind"] == "geodesic"

        print("✅ test_export_csv passed")

    def test_automorphism_is_involution(self):
        a = np.array([0.3, -0.2j])
        Z = np.array([[0.1, 0.4], [-0.5j, 0.2]])
        assert np.allclose(ball_automorphism(a, ball_automorphism(a, Z)), Z)
        assert np.allclose(ball_automorphism(a, a[None, :]), 0)

        print("✅ test_automorphism_is_involution passed")
