import numpy as np
import pytest

from helidiag.conservation import (PressureLaw, check_density, compressible_defect_scan,
                                   compressible_defects, compressible_energy, energy, helicity,
                                   helicity_flux_defect, helicity_flux_scan,
                                   pressure_commutator_check, pressure_commutator_scan,
                                   sqg_defect_terms, sqg_helicity, sqg_velocity,
                                   vorticity_transport_residual, vorticity_transport_scan)
from helidiag.core import (Grid, ScalarField, VectorField, curl, gradient, inner,
                           resample_spectrum)
from helidiag.scaling import geometric_scales
from helidiag.synth import abc_flow, manufactured_compressible, random_band_limited, taylor_green


def const(g, c):
    return ScalarField(g, np.full(g.shape, float(c)))


def decade(g, count=11):
    return geometric_scales(0.5, 10 ** (1 / (count - 1)), count)


def test_helicity_examples():
    g = Grid(3, 16)
    assert abs(helicity(gradient(random_band_limited(g, 5, seed=1)))) <= 1e-12
    v = VectorField([random_band_limited(g, 5, seed=2, key=(i,)) for i in range(3)])
    w = curl(v)
    a = sum(inner(wi, vi) for wi, vi in zip(w, v))
    b = sum(inner(vi, wi) for wi, vi in zip(w, v))
    assert a == pytest.approx(b, rel=1e-12)
    with pytest.raises(ValueError):
        helicity(VectorField.zeros(Grid(2, 16)))


def test_helicity_refinement_invariance():
    g, fine = Grid(3, 16), Grid(3, 32)
    v = VectorField([random_band_limited(g, 5, seed=3, key=(i,)) for i in range(3)])
    vf = VectorField.from_hat(fine, [resample_spectrum(c.hat, 3, 16, 32) for c in v])
    assert helicity(vf) == pytest.approx(helicity(v), rel=1e-12)


def test_energy_examples():
    g = Grid(3, 16)
    law = PressureLaw.isentropic(5 / 3)
    e = compressible_energy(const(g, 1), VectorField.zeros(g), law)
    assert e == pytest.approx(law.kappa / (law.gamma - 1) * (2 * np.pi) ** 3, rel=1e-13)
    A, B, C = 1.0, 0.5, 0.25
    assert energy(abc_flow(g, A, B, C)) == pytest.approx(
        0.5 * (2 * np.pi) ** 3 * (A * A + B * B + C * C), rel=1e-13)
    v = taylor_green(g)
    assert energy(v * 3.0) == pytest.approx(9 * energy(v), rel=1e-13)


def test_beltrami_and_zero_fields_have_no_defect():
    g = Grid(3, 32)
    v = abc_flow(g)
    for eps in (0.7, 0.5, 0.4):
        assert abs(helicity_flux_defect(v, eps)) <= 1e-12
        assert vorticity_transport_residual(v, eps) <= 1e-12
    z = VectorField.zeros(g)
    assert helicity_flux_defect(z, 0.5) == 0
    assert vorticity_transport_residual(z, 0.5) == 0


def test_constant_inputs_give_zero_defects():
    g = Grid(3, 32)
    v = VectorField([const(g, 0.3), const(g, -1.0), const(g, 2.0)])
    law = PressureLaw.isentropic(1.4)
    assert abs(helicity_flux_defect(v, 0.5)) <= 1e-12
    terms = compressible_defects(const(g, 2.0), v, law, 0.5)
    assert max(terms.values()) <= 1e-12
    assert pressure_commutator_check(const(g, 2.0), law, 0.5) == pytest.approx((0, 0), abs=1e-12)
    assert max(abs(x) for x in sqg_defect_terms(const(Grid(2, 32), 1.0), 0.5, 0).values()) == 0


@pytest.mark.slow
def test_taylor_green_vorticity_transport_rate():
    g = Grid(3, 64)
    scales = geometric_scales(0.75, (0.75 / (2 * g.spacing * 1.0001)) ** (1 / 9), 10)
    rep = vorticity_transport_scan(taylor_green(g), scales)
    assert rep.scan.fit.slope >= 1.9


@pytest.mark.slow
def test_abc_flux_vanishes_and_spec_sine_state():
    g = Grid(3, 64)
    scales = geometric_scales(0.75, (0.75 / (2 * g.spacing * 1.0001)) ** (1 / 9), 10)
    rep = helicity_flux_scan(abc_flow(g), scales)
    assert rep.scan.fit.slope >= 1.9 and rep.verdict == "vanishing"
    law = PressureLaw.isentropic(5 / 3)
    st = manufactured_compressible(g, 0.3, law, profile="sine")
    reps = compressible_defect_scan(st.rho, st.v, law, scales, bounds=st.bounds)
    # the product-of-sines density is symmetric against ABC, so the terms vanish
    assert all(r.scan.fit.slope >= 1.8 for r in reps.values())


def test_zero_velocity_compressible_terms():
    g = Grid(2, 256)
    law = PressureLaw.isentropic(5 / 3)
    st = manufactured_compressible(g, 0.3, law, seed=2, velocity="zero")
    terms = compressible_defects(st.rho, st.v, law, 0.3)
    assert terms["I1"] == 0 and terms["I2"] == 0 and terms["I3"] == 0
    reps = compressible_defect_scan(st.rho, st.v, law, decade(g), bounds=st.bounds)
    assert reps["I4"].scan.fit.slope >= 1.8


def test_pressure_commutator_examples():
    g = Grid(2, 256)
    assert pressure_commutator_check(const(g, 1.3), PressureLaw(1.0, 2.0), 0.4) == pytest.approx(
        (0.0, 0.0), abs=1e-12)
    x, _ = g.coords()
    rho = ScalarField(g, np.broadcast_to(1 + 0.3 * np.sin(x), g.shape).copy())
    law = PressureLaw(0.5, 2.0)
    rep = pressure_commutator_scan(rho, law, decade(g), bounds=(0.7, 1.3))
    assert np.all(rep.scan.values <= np.array(rep.scan.meta["rhs"]))
    assert rep.scan.fit.slope == pytest.approx(2.0, abs=0.1)


def test_density_checks():
    g = Grid(2, 16)
    with pytest.raises(ValueError):
        check_density(const(g, 0.0))
    with pytest.warns(UserWarning):
        notes = check_density(const(g, 2.0), bounds=(0.5, 1.5))
    assert notes
    assert check_density(const(g, 1.5), bounds=(0.5, 1.5)) == []


def test_sqg_helicity_vanishes():
    g = Grid(2, 64)
    assert sqg_helicity(ScalarField.zeros(g), 0) == 0
    for seed in range(50):
        th = random_band_limited(g, 20, seed=seed)
        assert abs(sqg_helicity(th, 0)) <= 1e-11 and abs(sqg_helicity(th, 1)) <= 1e-11


def test_sqg_velocity_of_cosine():
    g = Grid(2, 32)
    x, _ = g.coords()
    th = ScalarField(g, np.broadcast_to(np.cos(x), g.shape).copy())
    v = sqg_velocity(th)
    assert np.abs(v[0].values).max() <= 1e-14
    assert np.abs(v[1].values - np.sin(x)).max() <= 1e-14
    assert all(t == 0 for t in sqg_defect_terms(ScalarField.zeros(g), 0.5, 1).values())


def test_pressure_law():
    law = PressureLaw.isentropic(5 / 3)
    assert law.kappa == pytest.approx((2 / 3) ** 2 / (20 / 3))
    assert law.Pi(1.0) == 0
    with pytest.raises(ValueError):
        PressureLaw(1.0, 1.0)
