import math

import numpy as np
import pytest

from nlfkpp.grids import Field, FieldGrid, auto_grid


def test_grid_validation():
    with pytest.raises(ValueError):
        FieldGrid(1.0, -1.0, 64)
    with pytest.raises(ValueError):
        FieldGrid(-1.0, 1.0, 8)
    with pytest.raises(ValueError):
        FieldGrid(-1.0, 1.0, 64, boundary="reflecting")


def test_dirichlet_spacing_and_weights():
    g = FieldGrid(-2.0, 2.0, 101)
    assert g.dx == pytest.approx(0.04)
    assert g.x[0] == -2.0 and g.x[-1] == 2.0
    w = g.quad_weights
    assert w[0] == pytest.approx(0.02) and w[1] == pytest.approx(0.04)
    assert np.sum(w) == pytest.approx(4.0)


def test_periodic_grid_excludes_duplicate_endpoint():
    g = FieldGrid(0.0, 1.0, 50, boundary="periodic")
    assert g.dx == pytest.approx(0.02)
    assert g.x[-1] == pytest.approx(1.0 - 0.02)
    assert np.sum(g.quad_weights) == pytest.approx(1.0)


def test_field_moments_and_norm():
    g = FieldGrid(-10, 10, 4001)
    var = 0.3
    f = Field.from_function(g, lambda x: np.exp(-(x - 0.5) ** 2 / (2 * var)))
    assert f.mass() == pytest.approx(math.sqrt(2 * math.pi * var), rel=1e-10)
    assert f.center() == pytest.approx(0.5, abs=1e-12)
    assert f.variance() == pytest.approx(var, rel=1e-10)
    assert f.norm_l2() == pytest.approx((math.pi * var) ** 0.25, rel=1e-10)


def test_field_validation_and_boundary_monitor():
    g = FieldGrid(-1, 1, 32)
    with pytest.raises(ValueError):
        Field(g, np.ones(31))
    with pytest.raises(ValueError):
        Field(g, np.full(32, np.nan))
    ok = Field.from_function(FieldGrid(-8, 8, 201), lambda x: np.exp(-x * x))
    assert ok.boundary_ok()
    bad = Field.from_function(FieldGrid(-2, 2, 201), lambda x: np.exp(-x * x))
    assert not bad.boundary_ok()


def test_auto_grid_margin():
    g = auto_grid(1.0, 0.5, n=64)
    assert g.x_min == pytest.approx(1.0 - 8 * 0.5)
    assert g.x_max == pytest.approx(1.0 + 8 * 0.5)
    f = Field.from_function(g, lambda x: np.exp(-(x - 1.0) ** 2 / (2 * 0.25)))
    assert f.boundary_ok()
