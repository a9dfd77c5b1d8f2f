import numpy as np
import pytest

from helidiag.conservation import helicity
from helidiag.core import Grid, curl, divergence
from helidiag.littlewood_paley import cN_profile
from helidiag.synth import (BesovFieldSpec, abc_flow, lacunary_field, lacunary_vector_field,
                            manufactured_compressible, random_band_limited, random_besov_field,
                            random_besov_vector_field, taylor_green)


def in_range(profile, lo_j=0):
    keep = profile.j >= lo_j
    return profile.j[keep], profile.compensated[keep]


def test_infinity_type_calibration():
    g = Grid(2, 256)
    f = random_besov_field(g, BesovFieldSpec(1 / 3, 3, "infinity_type", seed=3))
    _, comp = in_range(cN_profile(f, 1 / 3, 3))
    assert comp.min() >= 0.8 and comp.max() <= 1.2


def test_cN_type_calibration():
    g = Grid(2, 256)
    f = random_besov_field(g, BesovFieldSpec(1 / 3, 3, "cN_type", seed=3))
    j, comp = in_range(cN_profile(f, 1 / 3, 3))
    assert np.all(np.abs(comp / (1 / (1 + j)) - 1) <= 0.2)


def test_determinism_and_reality():
    g = Grid(2, 64)
    spec = BesovFieldSpec(0.4, 2, "cN", seed=11)
    a, b = random_besov_field(g, spec), random_besov_field(g, spec)
    assert np.array_equal(a.values, b.values)
    c = random_besov_field(g, BesovFieldSpec(0.4, 2, "cN", seed=12))
    assert not np.array_equal(a.values, c.values)
    full = np.fft.ifftn(np.fft.fftn(a.values))
    assert np.abs(full.imag).max() <= 1e-13
    assert np.array_equal(lacunary_field(g, 0.5, seed=1).values,
                          lacunary_field(g, 0.5, seed=1).values)


def test_spec_validation():
    with pytest.raises(ValueError):
        BesovFieldSpec(1.2)
    with pytest.raises(ValueError):
        BesovFieldSpec(0.3, variant="other")
    g = Grid(2, 32)
    with pytest.raises(IndexError):
        random_besov_field(g, BesovFieldSpec(0.3, shells=(0, 9)))


def test_vector_field_variants():
    g = Grid(3, 32)
    spec = BesovFieldSpec(2 / 3, 3, seed=5)
    v = random_besov_vector_field(g, spec, solenoidal=True)
    assert np.abs(divergence(v).values).max() <= 1e-12
    raw = random_besov_vector_field(g, spec, solenoidal=False)
    for i, c in enumerate(raw):
        assert np.array_equal(c.values, random_besov_field(g, spec, component=i).values)


def test_curl_drops_one_derivative():
    g = Grid(3, 64)
    v = random_besov_vector_field(g, BesovFieldSpec(2 / 3, 3, seed=2))
    for c in curl(v):
        _, comp = in_range(cN_profile(c, 2 / 3 - 1, 3), lo_j=1)
        assert comp.max() / comp.min() <= 1.3 / 0.7


def test_exact_flows():
    g = Grid(3, 16)
    A, B, C = 1.0, 0.7, 0.2
    assert helicity(abc_flow(g, A, B, C)) == pytest.approx((2 * np.pi) ** 3 * (A * A + B * B + C * C),
                                                           rel=1e-12)
    assert np.abs(divergence(taylor_green(g)).values).max() <= 1e-12
    assert np.all(abc_flow(g, 0, 0, 0).values == 0)
    with pytest.raises(ValueError):
        taylor_green(Grid(2, 16))


def test_manufactured_compressible():
    g = Grid(3, 16)
    st = manufactured_compressible(g, 0.0)
    assert np.all(st.rho.values == 1.0)
    st = manufactured_compressible(g, 0.3, seed=4)
    assert st.rho.values.min() >= 0.7 - 1e-12
    with pytest.raises(ValueError):
        manufactured_compressible(g, 1.0)
    for seed in range(50):
        st = manufactured_compressible(g, 0.45, seed=seed)
        c1, c2 = st.bounds
        assert c1 <= st.rho.values.min() and st.rho.values.max() <= c2


def test_lacunary_field_is_solenoidal_and_band_limited():
    g = Grid(3, 32)
    v = lacunary_vector_field(g, 2 / 3, seed=0)
    assert np.abs(divergence(v).values).max() <= 1e-12
    assert np.all(np.abs(v.hat[..., g.nyquist_mask]) == 0)
    with pytest.raises(IndexError):
        lacunary_vector_field(g, 2 / 3, octaves=10)


def test_band_limited_unit_peak():
    g = Grid(2, 32)
    f = random_band_limited(g, 5, seed=1)
    assert np.abs(f.values).max() == pytest.approx(1.0)
    assert np.all(f.hat[g.kmag > 5] == 0) and f.hat.flat[0] == 0
