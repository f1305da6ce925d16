"""
test_horospheres.py
Test suite for horofunction estimation and horosphere membership

Tests:
- Disc horofunction against the closed form
- Small / big membership verdicts
- Boundary traces
- Emptiness thresholds and scans
"""

import sys
import os
import math

_parent_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if _parent_dir not in sys.path:
    sys.path.insert(0, _parent_dir)

import numpy as np
import pytest

from horolab.conformal import SLIT_POLE
from horolab.domains import (
    ABOVE,
    boundary_sides,
    make_boundary_point,
    polydisc,
    punctured_ball,
    sample_interior,
    slit_disc,
    unit_disc,
)
from horolab.errors import DomainError
from horolab.horospheres import (
    IN,
    OUT,
    Flavor,
    Verdict,
    boundary_trace_probe,
    disc_horoball_geometry,
    disc_horofunction_exact,
    emptiness_threshold,
    horoball_raster_check,
    horofunction_grid,
    horofunction_interval,
    horosphere_membership,
    membership_codes,
    nonempty_big_check,
    pole_change_constant,
    scan_lattice,
    slit_emptiness_scan,
)
from horolab.metrics import ConformalPullback, ExactBall, ExactDisc, PolydiscMax


class TestDiscHorofunction:
    """Tests for the disc horofunction"""

    def test_matches_closed_form(self):
        disc = unit_disc()
        backend = ExactDisc(disc)
        x = make_boundary_point(disc, np.exp(0.4j))
        for z in (0.3 + 0.1j, -0.6j, 0.8):
            est = horofunction_interval(backend, 0, z, x)
            assert est.lo == est.hi
            assert est.stabilized
            assert est.hi == pytest.approx(disc_horofunction_exact(z, x.z), abs=1e-6)

        print("✅ test_matches_closed_form passed")

    def test_vanishes_at_pole(self):
        x = make_boundary_point(unit_disc(), 1.0)
        est = horofunction_interval(ExactDisc(), 0.2, 0.2, x)
        assert abs(est.hi) < 1e-9

        print("✅ test_vanishes_at_pole passed")

    def test_closed_form_rejects_bad_input(self):
        with pytest.raises(DomainError):
            disc_horofunction_exact(1.0, 1.0)
        with pytest.raises(DomainError):
            disc_horofunction_exact(0.1, 0.5)

        print("✅ test_closed_form_rejects_bad_input passed")

    def test_horoball_geometry(self):
        center, radius = disc_horoball_geometry(1.0, 1.0)
        assert center == pytest.approx(0.5)
        assert radius == pytest.approx(0.5)
        center, radius = disc_horoball_geometry(1j, 3.0)
        assert center == pytest.approx(0.25j)
        assert radius == pytest.approx(0.75)
        with pytest.raises(DomainError):
            disc_horoball_geometry(1.0, 0.0)

        print("✅ test_horoball_geometry passed")

    def test_raster_check(self):
        check = horoball_raster_check(np.exp(1.1j), 1.0, resolution=200)
        assert check.ok
        assert check.inside_pixels > 0

        print("✅ test_raster_check passed")


class TestMembership:
    """Tests for membership verdicts"""

    def test_disc_verdicts(self):
        backend = ExactDisc()
        x = make_boundary_point(unit_disc(), 1.0)
        inside = horosphere_membership(backend, 0, x, 1.0, 0.6, "big")
        outside = horosphere_membership(backend, 0, x, 1.0, -0.6, "small")
        assert inside.verdict == Verdict.IN
        assert inside.certifying_scheme == "normal"
        assert outside.verdict == Verdict.OUT
        assert inside.threshold == 0.0

        print("✅ test_disc_verdicts passed")

    def test_boundary_of_horoball_is_undetermined(self):
        backend = ExactDisc()
        x = make_boundary_point(unit_disc(), 1.0)
        grid = horofunction_grid(backend, 0, np.array([[0.0 + 0j]]), x)
        # h(0) = 0 = log(1)/2 exactly
        codes = membership_codes(grid, 1.0, Flavor.BIG)
        assert codes[0] == 0

        print("✅ test_boundary_of_horoball_is_undetermined passed")

    def test_radius_must_be_positive(self):
        x = make_boundary_point(unit_disc(), 1.0)
        with pytest.raises(DomainError):
            horosphere_membership(ExactDisc(), 0, x, 0.0, 0.5, "big")

        print("✅ test_radius_must_be_positive passed")

    def test_disc_values_near_boundary(self):
        backend = ExactDisc()
        x = make_boundary_point(unit_disc(), 1.0)
        # h_0(0.9) = log(1/19)/2, between log(0.05)/2 and log(0.1)/2
        for flavor in ("small", "big"):
            assert horosphere_membership(backend, 0, x, 0.1, 0.9, flavor).verdict == Verdict.IN
            assert horosphere_membership(backend, 0, x, 0.05, 0.9, flavor).verdict == Verdict.OUT

        print("✅ test_disc_values_near_boundary passed")

    def test_pole_in_small_horosphere(self):
        slit = slit_disc()
        x = make_boundary_point(slit, 0.5, ABOVE)
        verdict = horosphere_membership(ConformalPullback(slit), SLIT_POLE, x, math.e ** 2, SLIT_POLE, "small")
        assert verdict.verdict == Verdict.IN
        bidisc = polydisc(2)
        face = make_boundary_point(bidisc, [1, 0])
        verdict = horosphere_membership(PolydiscMax(bidisc), [0, 0], face, math.e ** 2, [0, 0], "small")
        assert verdict.verdict == Verdict.IN

        print("✅ test_pole_in_small_horosphere passed")

    def test_small_inside_big_on_slit(self):
        backend = ConformalPullback(slit_disc())
        targets = boundary_sides(slit_disc(), 0.5)
        Z = sample_interior(slit_disc(), 300, seed=6, min_depth=0.01)
        grid = horofunction_grid(backend, SLIT_POLE, Z, targets)
        for R in (0.5, 2.0, 8.0):
            small = membership_codes(grid, R, Flavor.SMALL)
            big = membership_codes(grid, R, Flavor.BIG)
            assert not np.any((small == IN) & (big == OUT))
            assert np.sum(small == IN) <= np.sum(big == IN)

        print("✅ test_small_inside_big_on_slit passed")

    def test_grid_monotone_in_R(self):
        backend = ExactDisc()
        x = make_boundary_point(unit_disc(), 1j)
        Z = sample_interior(unit_disc(), 400, seed=7)
        grid = horofunction_grid(backend, 0, Z, x)
        previous = np.zeros(len(Z), dtype=bool)
        for R in (0.25, 1.0, 4.0):
            current = membership_codes(grid, R, "big") == IN
            assert np.all(current[previous])
            previous = current

        print("✅ test_grid_monotone_in_R passed")


class TestTraces:
    """Tests for boundary trace probes"""

    def test_disc_trace_is_singleton(self):
        backend = ExactDisc()
        x = make_boundary_point(unit_disc(), 1.0)
        report = boundary_trace_probe(backend, 0, x, 1.0, "big", count=40, seed=0)
        assert report.data["x_in_all_depths"]
        assert report.verdict_counts["trace_size"] == 1
        assert report.columns == ["index", "point", "side_tag", "in_trace", "deepest_verdict"]

        print("✅ test_disc_trace_is_singleton passed")

    def test_polydisc_face_trace_is_large(self):
        bidisc = polydisc(2)
        backend = PolydiscMax(bidisc)
        x = make_boundary_point(bidisc, [1, 0])
        samples = [make_boundary_point(bidisc, [0.5, 1j]), make_boundary_point(bidisc, [-0.5, 1])]
        report = boundary_trace_probe(backend, [0, 0], x, 1.0, "big", samples=samples)
        assert report.data["x_in_all_depths"]
        assert report.verdict_counts["trace_size"] == 2
        assert [row[3] for row in report.rows] == [True, True, False]

        print("✅ test_polydisc_face_trace_is_large passed")

    def test_opposite_slit_side_is_tested(self):
        slit = slit_disc()
        backend = ConformalPullback(slit)
        above, below = boundary_sides(slit, 0.5)
        if above.side_tag != "above":
            above, below = below, above
        report = boundary_trace_probe(backend, SLIT_POLE, above, 2.0, "big", samples=[below])
        assert report.data["excluded"] == 0
        assert len(report.rows) == 2
        assert report.rows[0][2] == "above"
        assert report.rows[1][2] == "below"
        assert report.rows[1][3] is False

        print("✅ test_opposite_slit_side_is_tested passed")


class TestThresholds:
    """Tests for emptiness thresholds, scans and pole changes"""

    def test_disc_threshold_not_applicable(self):
        x = make_boundary_point(unit_disc(), 1.0)
        result = emptiness_threshold(ExactDisc(), 0, x, count=50)
        assert not result.applicable
        assert result.threshold is None

        print("✅ test_disc_threshold_not_applicable passed")

    def test_puncture_threshold(self):
        ball = punctured_ball(2)
        backend = ExactBall(ball)
        q = make_boundary_point(ball, [0, 0])
        result = emptiness_threshold(backend, [0.5, 0], q, count=500, seed=1)
        assert result.applicable
        assert result.M == pytest.approx(0.5 * math.log(3), abs=1e-6)
        assert result.threshold == pytest.approx(1 / 3, rel=1e-5)
        assert result.violations == 0

        print("✅ test_puncture_threshold passed")

    def test_pole_change_on_disc(self):
        x = make_boundary_point(unit_disc(), 1.0)
        result = pole_change_constant(ExactDisc(), 0, 0.5, x, count=300)
        # h_0(1/2) at 1 is log(1/4 / 3/4)/2
        assert result.half_log_L == pytest.approx(0.5 * math.log(1 / 3), abs=1e-6)
        assert result.violations == 0

        print("✅ test_pole_change_on_disc passed")

    def test_scan_lattice(self):
        Z = scan_lattice(slit_disc(), 500)
        assert len(Z) >= 500
        assert Z.shape[1] == 1

        print("✅ test_scan_lattice passed")

    def test_slit_small_emptiness(self):
        report = slit_emptiness_scan(count=2000, R_schedule=[0.05, 0.2, 1.0, 100.0])
        rows = {row[0]: row for row in report.rows}
        assert rows[0.05][1] == 0
        assert rows[0.05][2] > 0
        assert report.data["R_separation"] > 0
        assert report.data["empty_below_R0"]

        print("✅ test_slit_small_emptiness passed")

    def test_scan_order_does_not_matter(self):
        forward = slit_emptiness_scan(count=2000, R_schedule=[0.05, 2.0, 10.0, 100.0])
        backward = slit_emptiness_scan(count=2000, R_schedule=[100.0, 10.0, 2.0, 0.05])
        assert [row[0] for row in backward.rows] == [0.05, 2.0, 10.0, 100.0]
        assert backward.data["R0_empirical"] == forward.data["R0_empirical"]
        assert backward.data["empty_below_R0"]
        assert backward.data["R0_empirical"] >= backward.data["R_separation"]

        print("✅ test_scan_order_does_not_matter passed")

    def test_nonempty_big_on_disc(self):
        x = make_boundary_point(unit_disc(), 1.0)
        report = nonempty_big_check(ExactDisc(), 0, x, R_schedule=[1e-3, 1.0, 10.0])
        assert report.passed

        print("✅ test_nonempty_big_on_disc passed")
