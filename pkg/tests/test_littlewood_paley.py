import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helidiag.core import Grid, ScalarField, lp_norm
from helidiag.littlewood_paley import (BesovParams, DyadicPartition, bernstein_check,
                                       besov_seminorm, cN_profile, dyadic_block,
                                       finite_difference_modulus, phi, product_besov_check, rho)
from helidiag.synth import BesovFieldSpec, random_band_limited, random_besov_field


def mode(grid, k):
    return ScalarField.from_function(grid, lambda x, *rest: np.sin(k * x) + 0 * sum(rest))


def test_profile_supports():
    r = np.linspace(0, 4, 4001)
    assert np.all(rho(r[r <= 0.75]) == 1)
    assert np.all(rho(r[r >= 4 / 3]) == 0)
    assert np.all(np.diff(rho(r)) <= 0)
    p = phi(r)
    assert np.all(p[(r <= 0.75) | (r >= 8 / 3)] == 0)
    assert np.all((p >= 0) & (p <= 1))


@pytest.mark.parametrize("n", [8, 16, 64])
def test_partition_of_unity_every_grid(n):
    for dim in (2, 3):
        g = Grid(dim, n)
        part = DyadicPartition(g)
        lo, hi = part.covered
        inside = (g.kmag >= lo) & (g.kmag <= hi)
        assert np.abs(part.partition_sum()[inside] - 1).max() <= 1e-10


def test_block_isolates_interior_mode():
    g = Grid(2, 64)
    part = DyadicPartition(g)
    for j in range(1, part.j_max + 1):
        # |k| = 3 * 2^(j-1) is where block j equals one and its neighbours vanish
        f = mode(g, 3 * 2 ** (j - 1))
        assert np.abs(dyadic_block(f, j).values - f.values).max() <= 1e-10
        for jj in (j - 2, j + 2):
            if part.j_min <= jj <= part.j_max:
                assert np.abs(dyadic_block(f, jj).values).max() <= 1e-12


def test_constant_has_no_blocks_and_blocks_sum_back():
    g = Grid(2, 32)
    c = ScalarField(g, np.full(g.shape, 3.0))
    part = DyadicPartition(g)
    for j in part.blocks:
        assert np.abs(dyadic_block(c, j).values).max() <= 1e-13
    g = Grid(2, 64)  # covered annulus reaches |k| = 12
    f = random_band_limited(g, 10, seed=1)
    total = sum(dyadic_block(f, j).values for j in DyadicPartition(g).blocks)
    assert np.abs(total - f.values).max() <= 1e-10


def test_block_orthogonality():
    g = Grid(2, 64)
    f = random_band_limited(g, 20, seed=2)
    part = DyadicPartition(g)
    for j in part.blocks:
        for k in part.blocks:
            if abs(j - k) >= 2:
                assert np.abs(dyadic_block(dyadic_block(f, j), k).values).max() <= 1e-12


def test_block_out_of_range():
    g = Grid(2, 16)
    with pytest.raises(IndexError):
        dyadic_block(random_band_limited(g, 3, seed=0), 10)


def test_besov_seminorm_examples():
    g = Grid(2, 64)
    assert besov_seminorm(ScalarField.zeros(g), BesovParams(0.5, 2)) == 0
    J, s, p = 3, 0.4, 3.0
    f = mode(g, 3 * 2 ** (J - 1))
    want = 2 ** (J * s) * lp_norm(f, p)
    assert besov_seminorm(f, BesovParams(s, p, math.inf)) == pytest.approx(want, rel=1e-10)
    r = random_band_limited(g, 20, seed=3)
    prm = BesovParams(1 / 3, 3, 2)
    assert besov_seminorm(r * -4.5, prm) == pytest.approx(4.5 * besov_seminorm(r, prm), rel=1e-12)


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 10 ** 6), q1=st.floats(1, 6), dq=st.floats(0, 6))
def test_lq_monotone(seed, q1, dq):
    g = Grid(2, 32)
    f = random_band_limited(g, 12, seed=seed)
    a = besov_seminorm(f, BesovParams(0.3, 2, q1))
    b = besov_seminorm(f, BesovParams(0.3, 2, q1 + dq))
    c = besov_seminorm(f, BesovParams(0.3, 2, math.inf))
    assert a >= b * (1 - 1e-12) and b >= c * (1 - 1e-12)


def test_cN_profile_verdicts():
    g = Grid(2, 512)
    flat = random_besov_field(g, BesovFieldSpec(1 / 3, 3, "infinity_type", seed=1))
    cn = random_besov_field(g, BesovFieldSpec(1 / 3, 3, "cN_type", seed=1))
    assert cN_profile(flat, 1 / 3, 3).verdict == "flat"
    assert cN_profile(cn, 1 / 3, 3).verdict == "decaying"
    single = mode(g, 12)
    assert cN_profile(single, 1 / 3, 3).verdict == "insufficient shells"


def test_difference_modulus_examples():
    g = Grid(2, 128)
    scales = np.geomspace(1.0, 0.01, 8)
    c = ScalarField(g, np.full(g.shape, 2.0))
    assert np.all(finite_difference_modulus(c, 0.5, 2, scales).values <= 1e-12)
    s = mode(g, 1)
    cos_norm = lp_norm(ScalarField.from_function(g, lambda x, y: np.cos(x) + 0 * y), 3)
    m = finite_difference_modulus(s, 1.0, 3, [1e-4]).values[0]
    assert m == pytest.approx(cos_norm, rel=1e-3)
    with pytest.raises(ValueError):
        finite_difference_modulus(s, 1.0, 3, [])


def test_bernstein_examples():
    g = Grid(2, 64)
    f = mode(g, 6)
    lhs, rhs = bernstein_check(f, 2, 2, 2)
    assert lhs == pytest.approx(rhs, rel=1e-12)
    assert bernstein_check(ScalarField.zeros(g), 2, 2, math.inf) == (0.0, 0.0)
    for seed in range(100):
        r = random_band_limited(g, 24, seed=seed)
        lhs, rhs = bernstein_check(r, 3, 2, math.inf)
        assert lhs <= rhs


def test_product_besov_examples():
    g = Grid(2, 64)
    scales = np.geomspace(1.5, 2 * g.spacing, 8)
    f = random_band_limited(g, 10, seed=4)
    assert product_besov_check(f, ScalarField.zeros(g), 1 / 3, 3, scales) == (0.0, 0.0)
    c = ScalarField(g, np.full(g.shape, -2.0))
    lhs, rhs = product_besov_check(c, f, 1 / 3, 3, scales)
    assert lhs <= rhs * (1 + 1e-12)
    worst = 0.0
    for seed in range(20):
        a = random_besov_field(g, BesovFieldSpec(1 / 3, 3, seed=seed))
        b = random_besov_field(g, BesovFieldSpec(1 / 3, 3, seed=seed + 50))
        lhs, rhs = product_besov_check(a, b, 1 / 3, 3, scales)
        worst = max(worst, lhs / rhs)
    assert worst <= 4
