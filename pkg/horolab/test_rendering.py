"""
test_rendering.py
Test suite for SVG rasters of horospheres and paths
"""

import sys
import os

_parent_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if _parent_dir not in sys.path:
    sys.path.insert(0, _parent_dir)

import pytest

from horolab.conformal import SLIT_POLE
from horolab.domains import ABOVE, make_boundary_point, polydisc, slit_disc, unit_disc
from horolab.errors import DomainError
from horolab.geodesics import geodesic_segment
from horolab.metrics import ConformalPullback, ExactDisc, PolydiscMax
from horolab.rendering import render_horosphere_raster, render_path


class TestRaster:
    """Tests for render_horosphere_raster"""

    def test_disc_raster_is_deterministic(self, tmp_path):
        backend = ExactDisc()
        x = make_boundary_point(unit_disc(), 1.0)
        out = tmp_path / "disc.svg"
        first = render_horosphere_raster(backend, 0, x, 1.0, "big", resolution=40, out=str(out))
        second = render_horosphere_raster(backend, 0, x, 1.0, "big", resolution=40)
        assert "<svg" in first
        assert first == second
        assert out.read_text() == first

        print("✅ test_disc_raster_is_deterministic passed")

    def test_slit_raster(self):
        slit = slit_disc()
        x = make_boundary_point(slit, 0.5, ABOVE)
        svg = render_horosphere_raster(ConformalPullback(slit), SLIT_POLE, x, 2.0, "small", resolution=30)
        assert "<svg" in svg

        print("✅ test_slit_raster passed")

    def test_rejects_bad_inputs(self):
        x = make_boundary_point(polydisc(2), [1, 0])
        with pytest.raises(DomainError):
            render_horosphere_raster(PolydiscMax(polydisc(2)), [0, 0], x, 1.0, "big")
        with pytest.raises(DomainError):
            render_horosphere_raster(ExactDisc(), 0, make_boundary_point(unit_disc(), 1.0), 1.0, "big", resolution=0)

        print("✅ test_rejects_bad_inputs passed")


class TestPathRendering:
    """Tests for render_path"""

    def test_segment(self, tmp_path):
        path = geodesic_segment(ExactDisc(), -0.5, 0.3j)
        out = tmp_path / "segment.svg"
        svg = render_path(path, str(out), resolution=40)
        assert "<svg" in svg
        assert out.exists()

        print("✅ test_segment passed")
