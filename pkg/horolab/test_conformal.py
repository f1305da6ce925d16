"""
test_conformal.py
Test suite for the closed-form conformal maps
"""

import sys
import os

_parent_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if _parent_dir not in sys.path:
    sys.path.insert(0, _parent_dir)

import numpy as np
import pytest

from horolab.conformal import (
    SLIT_POLE,
    boundary_value,
    chart_for,
    compose,
    disc_automorphism,
    half_disc_uniformizer,
    inverse_joukowski_half,
    joukowski_half,
    slit_disc_riemann_map,
    slit_disc_uniformizer,
)
from horolab.domains import ABOVE, BELOW, half_disc, make_boundary_point, sample_interior, slit_disc, square
from horolab.errors import DomainError


class TestAutomorphism:
    """Tests for disc automorphisms"""

    def test_sends_a_to_zero(self):
        phi = disc_automorphism(0.3 + 0.2j, theta=0.7)
        assert abs(phi(0.3 + 0.2j)) < 1e-15
        z = np.array([0.1, -0.5j, 0.8 + 0.1j])
        assert np.allclose(phi.inverse(phi.forward(z)), z)
        assert np.allclose(np.abs(phi.forward(np.exp(1j * np.linspace(0, 6, 7)))), 1.0)

        print("✅ test_sends_a_to_zero passed")

    def test_parameter_outside_disc(self):
        with pytest.raises(DomainError):
            disc_automorphism(1.0)

        print("✅ test_parameter_outside_disc passed")

    def test_inverted_swaps_roles(self):
        phi = disc_automorphism(0.5)
        inv = phi.inverted()
        assert inv.forward(0.0) == pytest.approx(0.5)
        assert inv.name.endswith("^-1")

        print("✅ test_inverted_swaps_roles passed")


class TestSlitMaps:
    """Tests for the slit-disc uniformizer and Riemann map"""

    def test_pole_goes_to_zero(self):
        phi = slit_disc_uniformizer()
        assert abs(phi(SLIT_POLE)) < 1e-12
        psi = slit_disc_riemann_map()
        assert psi(0j) == pytest.approx(SLIT_POLE)
        assert abs(psi(1.0)) < 1e-12

        print("✅ test_pole_goes_to_zero passed")

    def test_round_trip(self):
        phi = slit_disc_uniformizer()
        Z = sample_interior(slit_disc(), 200, seed=2, min_depth=0.02)[:, 0]
        V = phi.forward(Z)
        assert np.all(np.abs(V) < 1)
        assert np.allclose(phi.inverse(V), Z, atol=1e-9)

        print("✅ test_round_trip passed")

    def test_branch_undefined_on_slit(self):
        phi = slit_disc_uniformizer()
        with pytest.raises(DomainError):
            phi(0.5)

        print("✅ test_branch_undefined_on_slit passed")

    def test_sides_have_distinct_images(self):
        phi = slit_disc_uniformizer()
        slit = slit_disc()
        a = boundary_value(phi, make_boundary_point(slit, 0.5, ABOVE))
        b = boundary_value(phi, make_boundary_point(slit, 0.5, BELOW))
        assert abs(abs(a) - 1) < 1e-12 and abs(abs(b) - 1) < 1e-12
        assert abs(a - b) > 0.1
        assert a == pytest.approx(np.conj(b), abs=1e-6)

        print("✅ test_sides_have_distinct_images passed")


class TestHalfDisc:
    """Tests for the half-disc uniformizer"""

    def test_round_trip(self):
        phi = half_disc_uniformizer()
        Z = sample_interior(half_disc(), 200, seed=4, min_depth=0.02)[:, 0]
        V = phi.forward(Z)
        assert np.all(np.abs(V) < 1)
        assert np.allclose(phi.inverse(V), Z, atol=1e-9)

        print("✅ test_round_trip passed")

    def test_joukowski_inverse(self):
        zeta = np.array([0.5j, 0.3 + 0.4j, -0.6 + 0.1j])
        assert np.allclose(inverse_joukowski_half(joukowski_half(zeta)), zeta)
        assert np.all(joukowski_half(zeta).imag > 0)

        print("✅ test_joukowski_inverse passed")


class TestComposition:
    """Tests for compose and chart_for"""

    def test_compose(self):
        phi = compose(disc_automorphism(0.2), half_disc_uniformizer())
        z = 0.1 + 0.5j
        expected = disc_automorphism(0.2)(half_disc_uniformizer()(z))
        assert phi(z) == pytest.approx(expected)
        assert phi.inverse(phi.forward(np.array([z])))[0] == pytest.approx(z)

        print("✅ test_compose passed")

    def test_compose_mismatch(self):
        with pytest.raises(DomainError):
            compose(slit_disc_uniformizer(), slit_disc_uniformizer())

        print("✅ test_compose_mismatch passed")

    def test_chart_for(self):
        assert chart_for(slit_disc()).name == "slit_disc_uniformizer"
        with pytest.raises(DomainError):
            chart_for(square())

        print("✅ test_chart_for passed")
