"""
test_metrics.py
Test suite for Kobayashi distance backends and distance bounds

Tests:
- Closed forms (disc, ball, polydisc, half-plane)
- Conformal pullback
- Backend selection
- Mercer, Nikolov-Andreev and localization fits
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

from horolab.conformal import half_disc_uniformizer
from horolab.domains import (
    euclidean_ball,
    half_disc,
    make_boundary_point,
    polydisc,
    sample_interior,
    slit_disc,
    square,
    unit_disc,
)
from horolab.errors import DomainError
from horolab.metrics import (
    BackendMode,
    ConformalPullback,
    ExactBall,
    ExactDisc,
    GridSurrogate,
    PolydiscMax,
    backend_for,
    backend_from_dict,
    disc_distance,
    distance_batch_csv,
    half_plane_distance,
    kobayashi_ball_contains,
    localization_gap,
    mercer_constant_fit,
    nikolov_andreev_fit,
    patch_samples,
)


class TestClosedForms:
    """Tests for the closed-form distances"""

    def test_disc_from_origin(self):
        backend = ExactDisc()
        d = backend.distance(0, 0.5)
        assert d.value == pytest.approx(math.atanh(0.5))
        assert d.error == 0.0
        assert not d.surrogate

        print("✅ test_disc_from_origin passed")

    def test_disc_symmetry_and_invariance(self):
        backend = ExactDisc()
        Z = sample_interior(unit_disc(), 30, seed=5)
        D = backend.pairwise(Z, Z)
        assert np.allclose(D, D.T)
        assert np.allclose(np.diag(D), 0.0)
        a = 0.4 - 0.3j
        moved = (Z[:, 0] - a) / (1 - np.conj(a) * Z[:, 0])
        assert np.allclose(disc_distance(moved[:, None], moved[None, :]), D, atol=1e-7)

        print("✅ test_disc_symmetry_and_invariance passed")

    def test_disc_near_boundary(self):
        r = 1 - 1e-9
        assert disc_distance(0, r) == pytest.approx(math.atanh(r), rel=1e-6)

        print("✅ test_disc_near_boundary passed")

    def test_ball_restricts_to_disc(self):
        ball = ExactBall(euclidean_ball(2))
        d = ball.distance([0.3, 0], [-0.5j, 0]).value
        assert d == pytest.approx(disc_distance(0.3, -0.5j))

        print("✅ test_ball_restricts_to_disc passed")

    def test_polydisc_is_max(self):
        backend = PolydiscMax(polydisc(2))
        d = backend.distance([0, 0], [0.5, 0.9]).value
        assert d == pytest.approx(math.atanh(0.9))

        print("✅ test_polydisc_is_max passed")

    def test_half_plane(self):
        assert float(half_plane_distance(1j, 2j)) == pytest.approx(0.5 * math.log(2))

        print("✅ test_half_plane passed")

    def test_outside_point(self):
        with pytest.raises(DomainError):
            ExactDisc().distance(0, 1.2)
        with pytest.raises(DomainError):
            ExactDisc(polydisc(2))

        print("✅ test_outside_point passed")


class TestPullback:
    """Tests for the conformal pullback backend"""

    def test_half_disc_matches_chart(self):
        backend = ConformalPullback(half_disc())
        chart = half_disc_uniformizer()
        z, w = 0.2 + 0.3j, -0.5 + 0.6j
        expected = disc_distance(chart(z), chart(w))
        assert backend.distance(z, w).value == pytest.approx(expected, rel=1e-9)
        assert backend.distance(z, w).error == backend.error_bound

        print("✅ test_half_disc_matches_chart passed")

    def test_slit_label(self):
        backend = ConformalPullback(slit_disc())
        assert "slit_disc_uniformizer" in backend.label
        assert not backend.exact

        print("✅ test_slit_label passed")


class TestSelection:
    """Tests for backend_for and backend_from_dict"""

    def test_natural_backends(self):
        assert isinstance(backend_for(unit_disc()), ExactDisc)
        assert isinstance(backend_for(polydisc(2)), PolydiscMax)
        assert isinstance(backend_for(slit_disc()), ConformalPullback)
        grid = backend_for(square(), h=0.1)
        assert isinstance(grid, GridSurrogate)
        assert grid.surrogate
        assert grid.to_dict()["label"] == "surrogate evidence"

        print("✅ test_natural_backends passed")

    def test_from_dict(self):
        assert backend_from_dict({"mode": "ExactBall"}, unit_disc()).mode == BackendMode.EXACT_BALL
        assert isinstance(backend_from_dict({}, half_disc()), ConformalPullback)
        with pytest.raises(DomainError):
            backend_from_dict({"mode": "Bergman"}, unit_disc())
        with pytest.raises(DomainError):
            backend_from_dict({"mode": "GridSurrogate"}, polydisc(2))

        print("✅ test_from_dict passed")


class TestBounds:
    """Tests for Kobayashi balls and boundary-behavior fits"""

    def test_ball_membership(self):
        backend = ExactDisc()
        assert kobayashi_ball_contains(backend, 0, 1.0, 0.5)
        assert not kobayashi_ball_contains(backend, 0, 1.0, 0.9)

        print("✅ test_ball_membership passed")

    def test_mercer_on_disc(self):
        backend = ExactDisc()
        W = sample_interior(unit_disc(), 500, seed=0)
        fit = mercer_constant_fit(backend, 0, W)
        assert fit.bounded_below
        assert 0.0 <= fit.constant <= 0.5 * math.log(2)
        assert fit.refinement_fits[0] >= fit.refinement_fits[-1]
        with pytest.raises(DomainError):
            mercer_constant_fit(ConformalPullback(slit_disc()), -0.5, W)

        print("✅ test_mercer_on_disc passed")

    def test_nikolov_andreev_on_disc(self):
        backend = ExactDisc()
        x = make_boundary_point(unit_disc(), 1.0)
        Z = patch_samples(unit_disc(), x, 0.1, 60, seed=1)
        W = patch_samples(unit_disc(), x, 0.1, 60, seed=2)
        fit = nikolov_andreev_fit(backend, x, 0.1, Z, W)
        assert fit.pairs == 60
        assert 0 < fit.constant < np.inf
        assert fit.half_fit <= fit.constant
        with pytest.raises(DomainError):
            nikolov_andreev_fit(backend, x, 0.01, Z, W)

        print("✅ test_nikolov_andreev_on_disc passed")

    def test_localization_is_monotone(self):
        Z = sample_interior(half_disc(), 40, seed=3, min_depth=0.05)
        W = sample_interior(half_disc(), 40, seed=4, min_depth=0.05)
        fit = localization_gap(ExactDisc(), ConformalPullback(half_disc()), Z, W)
        assert fit.monotone
        assert fit.constant >= 0
        assert fit.pairs == 40

        print("✅ test_localization_is_monotone passed")


class TestBatchCsv:
    """Tests for the distance batch CSV"""

    def test_batch(self, tmp_path):
        src = tmp_path / "pairs.csv"
        dst = tmp_path / "distances.csv"
        src.write_text("z_re,z_im,w_re,w_im\n0,0,0.5,0\n0.1,0.1,-0.2,0.3\n")
        n = distance_batch_csv(ExactDisc(), str(src), str(dst))
        assert n == 2
        with open(dst) as f:
            rows = list(csv.reader(f))
        assert rows[0] == ["value", "error"]
        assert float(rows[1][0]) == pytest.approx(math.atanh(0.5))

        print("✅ test_batch passed")
