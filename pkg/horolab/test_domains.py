"""
test_domains.py
Test suite for the domain catalog

Tests:
- Membership and boundary distance
- Boundary points, side tags and snapping
- Samplers
- Approach sequences
"""

import sys
import os
import math

_parent_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if _parent_dir not in sys.path:
    sys.path.insert(0, _parent_dir)

import numpy as np
import pytest

from horolab.domains import (
    ABOVE,
    BELOW,
    ApproachScheme,
    DomainKind,
    approach_sequence,
    boundary_distance,
    boundary_sides,
    contains,
    convex_polygon,
    domain_from_dict,
    half_disc,
    lattice_disc_complement,
    make_boundary_point,
    polydisc,
    punctured_ball,
    sample_boundary,
    sample_interior,
    side_tags_at,
    slit_disc,
    snap_to_boundary,
    square,
    takagi,
    takagi_domain,
    unit_disc,
)
from horolab.errors import DomainError


class TestMembership:
    """Tests for contains and boundary_distance"""

    def test_disc(self):
        disc = unit_disc()
        assert contains(disc, 0.5)
        assert not contains(disc, 1.0)
        assert not contains(disc, 1.5j)
        assert boundary_distance(disc, 0.5) == pytest.approx(0.5)

        print("✅ test_disc passed")

    def test_slit_excludes_segment(self):
        slit = slit_disc()
        assert not contains(slit, 0.5)
        assert not contains(slit, 0.0)
        assert contains(slit, 0.5 + 0.01j)
        assert contains(slit, -0.5)
        assert boundary_distance(slit, 0.5 + 0.01j) == pytest.approx(0.01)

        print("✅ test_slit_excludes_segment passed")

    def test_half_disc_and_polydisc(self):
        assert contains(half_disc(), 0.2j)
        assert not contains(half_disc(), -0.2j)
        bidisc = polydisc(2)
        assert contains(bidisc, [0.9, 0.9j])
        assert not contains(bidisc, [0.9, 1.0])
        assert boundary_distance(bidisc, [0.5, 0.8]) == pytest.approx(0.2)

        print("✅ test_half_disc_and_polydisc passed")

    def test_lattice_complement(self):
        lattice = lattice_disc_complement(2)
        assert lattice.window == (-2.5, 2.5, -2.5, 2.5)
        assert contains(lattice, 0.5 + 0.5j)
        assert not contains(lattice, 0.1)
        assert boundary_distance(lattice, 0.5 + 0.5j) == pytest.approx(math.sqrt(0.5) - 0.25)

        print("✅ test_lattice_complement passed")

    def test_punctured_ball(self):
        ball = punctured_ball(2)
        assert not contains(ball, [0, 0])
        assert contains(ball, [0.1, 0])

        print("✅ test_punctured_ball passed")

    def test_dimension_mismatch(self):
        with pytest.raises(DomainError):
            contains(polydisc(2), 0.5)
        with pytest.raises(DomainError):
            boundary_distance(unit_disc(), 2.0)

        print("✅ test_dimension_mismatch passed")

    def test_takagi(self):
        assert takagi(0.5) == pytest.approx(0.5)
        assert takagi(0.25) == pytest.approx(0.5)
        assert takagi(0.0) == 0.0
        domain = takagi_domain()
        assert contains(domain, 0.5 + 1.0j)
        assert not contains(domain, 0.5 + 0.4j)

        print("✅ test_takagi passed")


class TestCatalog:
    """Tests for domain construction"""

    def test_polygon_round_trip(self):
        sq = square(1.0)
        rebuilt = domain_from_dict(sq.to_dict())
        assert rebuilt == sq
        assert sq.convex and sq.planar

        print("✅ test_polygon_round_trip passed")

    def test_nonconvex_polygon_rejected(self):
        with pytest.raises(DomainError):
            convex_polygon([0, 2, 2 + 2j, 1 + 0.5j, 2j])
        with pytest.raises(DomainError):
            convex_polygon([0, 1])

        print("✅ test_nonconvex_polygon_rejected passed")

    def test_unknown_kind(self):
        with pytest.raises(DomainError):
            domain_from_dict({"kind": "Annulus"})

        print("✅ test_unknown_kind passed")

    def test_from_dict_kinds(self):
        assert domain_from_dict({"kind": "Polydisc", "dim": 3}).dimension == 3
        lattice = domain_from_dict({"kind": "LatticeDiscComplement", "params": {"window_radius": 3}})
        assert lattice.kind == DomainKind.LATTICE_DISC_COMPLEMENT
        assert lattice.window[1] == 3.5

        print("✅ test_from_dict_kinds passed")


class TestBoundaryPoints:
    """Tests for make_boundary_point, side tags and snapping"""

    def test_disc_point(self):
        x = make_boundary_point(unit_disc(), 1.0)
        assert x.t0 == 1.0
        assert x.smooth
        assert x.inward_normal[0] == pytest.approx(-1.0)
        with pytest.raises(DomainError):
            make_boundary_point(unit_disc(), 0.5)

        print("✅ test_disc_point passed")

    def test_slit_sides(self):
        slit = slit_disc()
        with pytest.raises(DomainError):
            make_boundary_point(slit, 0.5)
        with pytest.raises(DomainError):
            make_boundary_point(slit, 1.0)
        above = make_boundary_point(slit, 0.5, ABOVE)
        below = make_boundary_point(slit, 0.5, BELOW)
        assert above.inward_normal[0] == 1j
        assert below.inward_normal[0] == -1j
        assert above.t0 == pytest.approx(0.5 * math.sqrt(0.75))
        assert above.same_location(below)
        assert not above.same_point(below)

        print("✅ test_slit_sides passed")

    def test_one_sided_points_reject_tags(self):
        with pytest.raises(DomainError):
            make_boundary_point(unit_disc(), 1.0, ABOVE)
        with pytest.raises(DomainError):
            make_boundary_point(slit_disc(), -1.0, ABOVE)

        print("✅ test_one_sided_points_reject_tags passed")

    def test_side_tags_at(self):
        slit = slit_disc()
        assert side_tags_at(slit, 0.5) == (ABOVE, BELOW)
        assert side_tags_at(slit, 1j) == (None,)
        assert side_tags_at(unit_disc(), 1.0) == (None,)
        assert [b.side_tag for b in boundary_sides(slit, 0.25)] == [ABOVE, BELOW]

        print("✅ test_side_tags_at passed")

    def test_half_disc_components(self):
        hd = half_disc()
        flat = make_boundary_point(hd, 0.5)
        arc = make_boundary_point(hd, 1j)
        corner = make_boundary_point(hd, 1.0)
        assert flat.component_id == 1
        assert flat.inward_normal[0] == 1j
        assert arc.component_id == 0
        assert not corner.smooth

        print("✅ test_half_disc_components passed")

    def test_polydisc_faces(self):
        bidisc = polydisc(2)
        face = make_boundary_point(bidisc, [1, 0])
        corner = make_boundary_point(bidisc, [1, 1j])
        assert face.smooth
        assert not corner.smooth
        assert np.allclose(corner.inward_normal, -np.array([1, 1j]) / math.sqrt(2))
        with pytest.raises(DomainError):
            make_boundary_point(bidisc, [0.5, 0.5])

        print("✅ test_polydisc_faces passed")

    def test_snap(self):
        x = snap_to_boundary(unit_disc(), 0.9995)
        assert x is not None and x.z == pytest.approx(1.0)
        assert snap_to_boundary(unit_disc(), 0.5) is None
        s = snap_to_boundary(slit_disc(), 0.5 + 1e-4j)
        assert s.side_tag == ABOVE
        assert s.z == pytest.approx(0.5)
        s = snap_to_boundary(slit_disc(), 0.5 - 1e-4j)
        assert s.side_tag == BELOW

        print("✅ test_snap passed")


class TestSamplers:
    """Tests for boundary and interior samplers"""

    def test_slit_sample_is_two_sided(self):
        points = sample_boundary(slit_disc(), 10, seed=0)
        assert len(points) == 15
        tags = [p.side_tag for p in points]
        assert tags.count(ABOVE) == tags.count(BELOW) == 5

        print("✅ test_slit_sample_is_two_sided passed")

    def test_sample_deterministic(self):
        a = sample_boundary(unit_disc(), 8, seed=3)
        b = sample_boundary(unit_disc(), 8, seed=3)
        assert all(p.same_point(q) for p, q in zip(a, b))
        with pytest.raises(DomainError):
            sample_boundary(unit_disc(), 0)

        print("✅ test_sample_deterministic passed")

    def test_lattice_sample_covers_components(self):
        lattice = lattice_disc_complement(1)
        points = sample_boundary(lattice, 20, seed=0)
        components = {p.component_id for p in points}
        assert components == set(range(10))

        print("✅ test_lattice_sample_covers_components passed")

    def test_interior_sample(self):
        Z = sample_interior(unit_disc(), 50, seed=1, min_depth=0.1)
        assert Z.shape == (50, 1)
        assert np.all(np.abs(Z[:, 0]) < 0.9)
        assert np.array_equal(Z, sample_interior(unit_disc(), 50, seed=1, min_depth=0.1))

        print("✅ test_interior_sample passed")


class TestApproach:
    """Tests for approach sequences"""

    def test_normal_approach(self):
        disc = unit_disc()
        x = make_boundary_point(disc, 1.0)
        W = approach_sequence(disc, x, "normal", n=10)
        assert W.shape == (10, 1)
        assert np.allclose(W[:, 0], 1 - 0.5 ** np.arange(1, 11))

        print("✅ test_normal_approach passed")

    def test_cone_and_tangential(self):
        disc = unit_disc()
        x = make_boundary_point(disc, 1j)
        cone = approach_sequence(disc, x, "cone(0.5)", n=20)
        tangential = approach_sequence(disc, x, "tangential_arc", n=20)
        for W in (cone, tangential):
            assert np.all(np.abs(W[:, 0]) < 1)
            assert abs(W[-1, 0] - 1j) < 1e-4
        assert ApproachScheme.parse("cone(0.5)").label == "cone(0.5)"

        print("✅ test_cone_and_tangential passed")

    def test_slit_sides_approach_from_their_side(self):
        slit = slit_disc()
        above = approach_sequence(slit, make_boundary_point(slit, 0.5, ABOVE), n=12)
        below = approach_sequence(slit, make_boundary_point(slit, 0.5, BELOW), n=12)
        assert np.all(above[:, 0].imag > 0)
        assert np.all(below[:, 0].imag < 0)

        print("✅ test_slit_sides_approach_from_their_side passed")

    def test_inadmissible(self):
        slit = slit_disc()
        tip = make_boundary_point(slit, 1.0, ABOVE)
        with pytest.raises(DomainError):
            approach_sequence(slit, tip, "tangential_arc")
        x = make_boundary_point(unit_disc(), 1.0)
        with pytest.raises(DomainError):
            approach_sequence(unit_disc(), x, n=1)
        with pytest.raises(DomainError):
            approach_sequence(slit, x)
        with pytest.raises(DomainError):
            ApproachScheme.parse("spiral")

        print("✅ test_inadmissible passed")

    def test_floor_truncates(self):
        disc = unit_disc()
        x = make_boundary_point(disc, 1.0)
        W = approach_sequence(disc, x, n=60, floor=1e-6)
        assert len(W) == 19

        print("✅ test_floor_truncates passed")
