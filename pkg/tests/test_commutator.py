import math

import numpy as np
import pytest

from helidiag.commutator import (cet_commutator, cet_decomposition_check, commutator_field,
                                 commutator_scaling_scan, composite_norm, cross_commutator,
                                 embedded_exponent)
from helidiag.core import (Grid, ScalarField, TimeSeriesField, VectorField, curl, lp_norm)
from helidiag.scaling import geometric_scales
from helidiag.synth import abc_flow, random_band_limited, taylor_green


def sin1(g):
    return ScalarField.from_function(g, lambda x, *r: np.sin(x) + 0 * sum(r))


@pytest.fixture
def pair():
    g = Grid(2, 64)
    return random_band_limited(g, 8, 1, key=(0,)), random_band_limited(g, 8, 1, key=(1,))


def test_constant_factor_commutes(pair):
    f, _ = pair
    c = ScalarField(f.grid, np.full(f.grid.shape, 2.5))
    assert cet_commutator(f, c, 0.3).norm(math.inf) <= 1e-12
    assert cet_decomposition_check(f, c, 0.3) <= 1e-13


def test_sine_commutator_scales_like_eps_squared():
    g = Grid(2, 256)
    s = sin1(g)
    scan = commutator_scaling_scan(s, s, geometric_scales(0.75, 10 ** 0.1, 11), q=math.inf)
    assert np.all(scan.values > 0)
    assert scan.fit.slope >= 1.9


def test_commutator_decreases_monotonically():
    g2 = Grid(2, 256)
    f, g = (random_band_limited(g2, 4, 1, key=(i,)) for i in range(2))
    eps = geometric_scales(0.5, 10 ** 0.1, 11)  # one decade, asymptotic for |k| <= 4
    vals = [cet_commutator(f, g, e).norm(2) for e in eps]
    assert np.all(np.diff(vals) < 0)


def test_grid_mismatch(pair):
    f, _ = pair
    with pytest.raises(ValueError):
        cet_commutator(f, random_band_limited(Grid(2, 32), 4, 0), 0.3)


def test_bilinear_and_symmetric(pair):
    f1, f2 = pair
    g = random_band_limited(f1.grid, 8, 2)
    lhs = commutator_field(f1 * 2.0 + f2 * -3.0, g, 0.25).values
    rhs = 2.0 * commutator_field(f1, g, 0.25).values - 3.0 * commutator_field(f2, g, 0.25).values
    assert np.abs(lhs - rhs).max() <= 1e-11
    assert np.array_equal(commutator_field(f1, g, 0.25).values,
                          commutator_field(g, f1, 0.25).values)


def test_decomposition_identity(pair):
    f, g = pair
    assert cet_decomposition_check(f, g, 0.2) <= 1e-8


def test_cross_commutator_structure():
    g = Grid(3, 32)
    f = VectorField([random_band_limited(g, 4, 3, key=(i,)) for i in range(3)])
    assert np.abs(cross_commutator(f, f, 0.4).field.values).max() <= 1e-12
    a, b = random_band_limited(g, 4, 5), random_band_limited(g, 4, 6)
    z = ScalarField.zeros(g)
    res = cross_commutator(VectorField([a, z, z]), VectorField([z, b, z]), 0.4).field
    assert np.abs(res[0].values).max() == 0 and np.abs(res[1].values).max() == 0
    assert np.abs(res[2].values - commutator_field(a, b, 0.4).values).max() <= 1e-15
    with pytest.raises(ValueError):
        cross_commutator(f, VectorField.zeros(Grid(3, 16)), 0.4)


def test_abc_cross_commutator_smooth_rate():
    g = Grid(3, 64)
    v = abc_flow(g)
    scales = geometric_scales(0.75, (0.75 / (2 * g.spacing * 1.0001)) ** (1 / 7), 8)
    scan = commutator_scaling_scan(curl(v), v, scales, q=2)
    # omega = v for ABC, so omega x v vanishes identically
    assert scan.values.max() <= 1e-12
    # the eps^2 term of the cross commutator cancels for pairs of Beltrami
    # fields, so the smooth rate is checked on a perturbed ABC flow
    u = abc_flow(g) + taylor_green(g) * 0.5
    scan = commutator_scaling_scan(curl(u), u, scales, q=2)
    assert scan.fit.slope == pytest.approx(2.0, abs=0.1)


def test_scan_refuses_short_lists(pair):
    f, g = pair
    with pytest.raises(ValueError):
        commutator_scaling_scan(f, g, [0.5, 0.4, 0.3])


def test_time_series_composite_norm(pair):
    f, g = pair
    tf = TimeSeriesField([0.0, 0.5, 1.0], [f, f * 2.0, f * 3.0])
    tg = TimeSeriesField([0.0, 0.5, 1.0], [g, g, g])
    scales = geometric_scales(0.7, 1.3, 5)
    scan = commutator_scaling_scan(tf, tg, scales, p=2, q=1.5)
    one = [lp_norm(commutator_field(f, g, e), 1.5) for e in scales]
    want = [composite_norm([v, 2 * v, 3 * v], [0, 0.5, 1], 2) for v in one]
    assert np.allclose(scan.values, want, rtol=1e-12)
    assert composite_norm([1.0, 3.0], [0, 1], math.inf) == 3.0


def test_embedded_exponents():
    assert embedded_exponent(3, 3, 3, 1) == pytest.approx(1.5)
    assert embedded_exponent(3, 3, 3, 3) == pytest.approx(3.0)
    with pytest.raises(ValueError):
        embedded_exponent(3, 3, 3, 2)
