"""
test_gromov.py
Test suite for Gromov products, visibility probes and the four-point condition

Tests:
- Gromov product identities
- Bounded / divergent visibility evidence
- Four-point delta
- Small horosphere witness
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

from horolab.domains import contains_many, lattice_disc_complement, make_boundary_point, polydisc, sample_interior, unit_disc
from horolab.errors import DomainError, NumericalError
from horolab.geodesics import geodesic_ray, geodesic_segment
from horolab.gromov import (
    DeltaEstimate,
    Evidence,
    four_point_delta,
    gromov_matrix,
    gromov_product,
    hyperbolic_embedding_probe,
    lattice_sample,
    small_horosphere_witness,
    visibility_probe,
    write_delta_growth_csv,
)
from horolab.horospheres import Verdict
from horolab.metrics import ExactDisc, PolydiscMax


class TestGromovProduct:
    """Tests for Gromov products"""

    def test_symmetric_and_bounded(self):
        backend = ExactDisc()
        a = gromov_product(backend, 0.1, 0.5j, -0.3 + 0.2j)
        b = gromov_product(backend, 0.1, -0.3 + 0.2j, 0.5j)
        assert a.value == pytest.approx(b.value)
        k_oz = backend.distance(0.1, 0.5j).value
        k_ow = backend.distance(0.1, -0.3 + 0.2j).value
        assert -1e-12 <= a.value <= min(k_oz, k_ow) + 1e-12
        assert a.error == 0.0

        print("✅ test_symmetric_and_bounded passed")

    def test_self_product_is_distance(self):
        backend = ExactDisc()
        p = gromov_product(backend, 0, 0.6, 0.6)
        assert p.value == pytest.approx(math.atanh(0.6))

        print("✅ test_self_product_is_distance passed")

    def test_matrix_diagonal(self):
        backend = ExactDisc()
        P = sample_interior(unit_disc(), 12, seed=3)
        G = gromov_matrix(backend, 0, P)
        d_o = backend.paired(np.zeros((1, 1), dtype=complex), P)
        assert np.allclose(np.diag(G), d_o)
        assert np.allclose(G, G.T)

        print("✅ test_matrix_diagonal passed")


class TestVisibility:
    """Tests for visibility and embedding probes"""

    def test_disc_is_bounded(self):
        disc = unit_disc()
        x = make_boundary_point(disc, 1.0)
        y = make_boundary_point(disc, -1.0)
        report = visibility_probe(ExactDisc(), 0, x, y)
        assert report.verdict == Evidence.BOUNDED
        assert report.bound is not None and report.bound < 1.0
        assert "normal" in report.products

        print("✅ test_disc_is_bounded passed")

    def test_polydisc_face_diverges(self):
        bidisc = polydisc(2)
        x = make_boundary_point(bidisc, [1, 0])
        y = make_boundary_point(bidisc, [1, 0.5])
        report = visibility_probe(PolydiscMax(bidisc), [0, 0], x, y)
        assert report.verdict == Evidence.DIVERGENCE
        assert report.growth_rate > 0.05
        assert report.bound is None

        print("✅ test_polydisc_face_diverges passed")

    def test_same_point_rejected(self):
        x = make_boundary_point(unit_disc(), 1.0)
        with pytest.raises(DomainError):
            visibility_probe(ExactDisc(), 0, x, x)

        print("✅ test_same_point_rejected passed")

    def test_embedding_probe(self):
        disc = unit_disc()
        x = make_boundary_point(disc, 1j)
        y = make_boundary_point(disc, -1j)
        report = hyperbolic_embedding_probe(ExactDisc(), x, y)
        assert report.positive
        assert report.liminf > 1.0

        print("✅ test_embedding_probe passed")


class TestFourPoint:
    """Tests for the four-point delta"""

    def test_disc_sample(self):
        backend = ExactDisc()
        S = sample_interior(unit_disc(), 20, seed=11)
        est = four_point_delta(backend, S)
        assert 0.0 <= est.delta < math.log(3)
        assert est.sample_size == 20
        assert len(set(est.quadruple)) == 4
        assert not est.surrogate

        print("✅ test_disc_sample passed")

    def test_permutation_and_monotone(self):
        backend = ExactDisc()
        S = sample_interior(unit_disc(), 16, seed=12)
        full = four_point_delta(backend, S).delta
        assert four_point_delta(backend, S[::-1]).delta == pytest.approx(full)
        assert four_point_delta(backend, S[:10]).delta <= full + 1e-12

        print("✅ test_permutation_and_monotone passed")

    def test_sample_size_limits(self):
        backend = ExactDisc()
        with pytest.raises(DomainError):
            four_point_delta(backend, sample_interior(unit_disc(), 3))
        with pytest.raises(DomainError):
            four_point_delta(backend, sample_interior(unit_disc(), 201))

        print("✅ test_sample_size_limits passed")

    def test_lattice_sample(self):
        domain = lattice_disc_complement(4)
        S = lattice_sample(domain)
        assert S.shape == (49, 1)
        assert np.all(contains_many(domain, S))

        print("✅ test_lattice_sample passed")

    def test_growth_csv(self, tmp_path):
        rows = [(4, DeltaEstimate(0.4, 49, (0, 1, 2, 3), True)), (8, DeltaEstimate(0.45, 49, (0, 1, 2, 4), True))]
        out = write_delta_growth_csv(rows, str(tmp_path / "delta.csv"))
        with open(out) as f:
            lines = list(csv.reader(f))
        assert lines[0] == ["window_radius", "delta", "sample_size", "label"]
        assert lines[2][0] == "8"
        assert lines[1][3] == "surrogate evidence"

        print("✅ test_growth_csv passed")


class TestWitness:
    """Tests for the small horosphere witness"""

    def test_witness_on_disc(self):
        backend = ExactDisc()
        x = make_boundary_point(unit_disc(), 1.0)
        ray = geodesic_ray(backend, 0, x)
        witness = small_horosphere_witness(backend, ray, 0.1, 0.5)
        assert witness.T == pytest.approx(1.0 - 0.5 * math.log(0.5) + 0.1)
        assert witness.verdict.verdict == Verdict.IN

        print("✅ test_witness_on_disc passed")

    def test_witness_rejects_uncertified_paths(self):
        backend = ExactDisc()
        segment = geodesic_segment(backend, 0, 0.5)
        with pytest.raises(NumericalError):
            small_horosphere_witness(backend, segment, 0.1, 0.5)
        ray = geodesic_ray(backend, 0, make_boundary_point(unit_disc(), 1.0))
        with pytest.raises(DomainError):
            small_horosphere_witness(backend, ray, -0.1, 0.5)

        print("✅ test_witness_rejects_uncertified_paths passed")
