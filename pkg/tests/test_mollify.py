import numpy as np
import pytest

from helidiag.core import Grid, ScalarField, derivative, lp_norm
from helidiag.mollify import (EPS_MAX, MollifierKernel, kernel_derivative_l1, min_epsilon,
                              mollifier_rate_scan, mollify, multiplier, normalizing_constant)
from helidiag.scaling import fit_power_law, geometric_scales
from helidiag.synth import random_band_limited


def test_unit_mass_and_constant_field():
    g = Grid(2, 64)
    for eps in (0.2, 0.5, 0.7):
        assert multiplier(g, eps).flat[0] == pytest.approx(1.0, abs=1e-15)
        y, w = MollifierKernel(g, eps).weights()
        assert w.sum() == pytest.approx(1.0, abs=1e-14) and np.all(w >= 0)
    c = ScalarField(g, np.full(g.shape, 1.7))
    assert np.abs(mollify(c, 0.3).values - 1.7).max() <= 1e-13


def test_kernel_support_and_normalization():
    g = Grid(2, 128)
    k = MollifierKernel(g, 0.5)
    vals = k.kernel.values
    assert np.all(vals >= 0)
    d = [np.minimum(c, g.period - c) for c in g.coords()]
    r = np.sqrt(d[0] ** 2 + d[1] ** 2)
    assert np.all(vals[np.broadcast_to(r, g.shape) >= 0.5] == 0)
    # raw sample quadrature; unit mass itself is enforced by the weights and multiplier
    assert k.normalization == pytest.approx(1.0, rel=1e-3)
    assert normalizing_constant(3) > 0


def test_epsilon_checks():
    g = Grid(2, 32)
    with pytest.raises(ValueError, match="minimum"):
        mollify(random_band_limited(g, 4, seed=0), 0.5 * min_epsilon(g))
    with pytest.raises(ValueError):
        multiplier(g, EPS_MAX * 1.01)


def test_commutes_with_derivative():
    g = Grid(3, 32)
    f = random_band_limited(g, 5, seed=2)
    a = mollify(derivative(f, 1), 0.5).values
    b = derivative(mollify(f, 0.5), 1).values
    assert np.abs(a - b).max() <= 1e-12


def test_sine_approximation_rate():
    g = Grid(2, 256)
    f = ScalarField.from_function(g, lambda x, y: np.sin(x) + 0 * y)
    scales = geometric_scales(0.75, 10 ** 0.1, 11)  # one decade
    scan = mollifier_rate_scan(f, np.inf, scales)
    assert scan.fit.slope == pytest.approx(2.0, abs=0.05)


def test_rate_scan_trivial_cases():
    # the rough-field rates need 2048^2 and run in the acceptance suite
    g = Grid(2, 64)
    zero = mollifier_rate_scan(ScalarField.zeros(g), 3, [0.7, 0.5, 0.3, 0.2])
    assert np.all(zero.values == 0) and zero.fit.status != "ok"
    with pytest.raises(ValueError):
        mollifier_rate_scan(ScalarField.zeros(g), 3, [])
    with pytest.raises(ValueError):
        mollifier_rate_scan(ScalarField.zeros(g), 3, [0.5], mode="other")


@pytest.mark.parametrize("p", [1, 2, 3, np.inf])
def test_young_inequality(p):
    g = Grid(2, 64)
    for seed in range(5):
        f = random_band_limited(g, 20, seed=seed)
        assert lp_norm(mollify(f, 0.3), p) <= lp_norm(f, p) * (1 + 1e-10)


def test_kernel_gradient_scaling():
    eps = geometric_scales(0.7, 2, 6)
    vals = [kernel_derivative_l1(3, e, 1) for e in eps]
    assert fit_power_law(eps, vals).slope == pytest.approx(-1, abs=0.05)


def test_positivity_preserved():
    g = Grid(2, 64)
    f = ScalarField(g, np.abs(random_band_limited(g, 20, seed=9).values))
    assert mollify(f, 0.2).values.min() >= -1e-12
