"""
test_grid_surrogate.py
Test suite for the quasihyperbolic grid surrogate
"""

import sys
import os
import math

_parent_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if _parent_dir not in sys.path:
    sys.path.insert(0, _parent_dir)

import numpy as np
import pytest

from horolab.domains import polydisc, square, unit_disc
from horolab.errors import DomainError, NumericalError
from horolab.grid_surrogate import QuasihyperbolicGrid, grid_for
from horolab.metrics import GridSurrogate


class TestGrid:
    """Tests for QuasihyperbolicGrid"""

    def test_build(self):
        grid = grid_for(unit_disc(), 0.05)
        assert grid.size > 1000
        assert np.all(np.abs(grid.nodes) < 1)
        assert grid_for(unit_disc(), 0.05) is grid

        print("✅ test_build passed")

    def test_rejects_bad_inputs(self):
        with pytest.raises(DomainError):
            QuasihyperbolicGrid(polydisc(2), 0.1)
        with pytest.raises(DomainError):
            QuasihyperbolicGrid(unit_disc(), 0.0)

        print("✅ test_rejects_bad_inputs passed")

    def test_comparable_to_disc_distance(self):
        grid = grid_for(unit_disc(), 0.05)
        value = grid.pairwise(np.array([0j]), np.array([0.5 + 0j]))[0, 0]
        k = math.atanh(0.5)
        assert 0.9 * k <= value <= 4.4 * k
        # radial quasihyperbolic length from 0 to 1/2 is log 2
        assert value == pytest.approx(math.log(2), rel=0.1)

        print("✅ test_comparable_to_disc_distance passed")

    def test_symmetric_and_zero_diagonal(self):
        grid = grid_for(unit_disc(), 0.05)
        P = np.array([0j, 0.3 + 0.2j, -0.4j])
        D = grid.pairwise(P, P)
        assert np.allclose(np.diag(D), 0.0)
        assert np.allclose(D, D.T, rtol=1e-9)

        print("✅ test_symmetric_and_zero_diagonal passed")

    def test_too_close_to_boundary(self):
        grid = grid_for(unit_disc(), 0.05)
        with pytest.raises(NumericalError):
            grid.pairwise(np.array([0j]), np.array([0.99 + 0j]))
        with pytest.raises(DomainError):
            grid.pairwise(np.array([0j]), np.array([1.5 + 0j]))

        print("✅ test_too_close_to_boundary passed")

    def test_shortest_path(self):
        grid = grid_for(square(), 0.1)
        nodes, length = grid.shortest_path(-0.5 + 0j, 0.5 + 0j)
        assert nodes[0] == -0.5 + 0j
        assert nodes[-1] == 0.5 + 0j
        assert length > 0
        assert length == pytest.approx(grid.pairwise(np.array([-0.5 + 0j]), np.array([0.5 + 0j]))[0, 0])

        print("✅ test_shortest_path passed")


class TestSurrogateBackend:
    """Tests for the GridSurrogate backend"""

    def test_error_bound_and_labels(self):
        backend = GridSurrogate(unit_disc(), h=0.05)
        d = backend.distance(0, 0.5)
        assert d.surrogate
        assert d.comparability == 4.0
        assert d.error > 0
        assert "h=0.05" in backend.label

        print("✅ test_error_bound_and_labels passed")

    def test_one_to_many(self):
        backend = GridSurrogate(unit_disc(), h=0.05)
        W = np.array([[0.3], [0.5j], [-0.2 - 0.2j]])
        row = backend.paired(np.array([[0j]]), W)
        assert row.shape == (3,)
        assert np.all(row > 0)

        print("✅ test_one_to_many passed")
