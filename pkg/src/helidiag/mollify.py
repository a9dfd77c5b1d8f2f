"""Standard mollifier, periodic convolution and mollifier rate scans.

The bump is ``eta(x) = C0 exp(-1/(1-|x|^2))`` on the unit ball and
``eta_eps(x) = eps^-d eta(x/eps)``.  Convolution is applied as the Fourier
multiplier ``eta_hat(eps |xi|)``: the continuous transform of the bump,
evaluated from a radial table and normalised so that ``eta_hat(0) = 1``.
For ``eps < pi/4`` the support fits inside one period, so this is the exact
periodic convolution of the trigonometric interpolant.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import special
from scipy.interpolate import make_interp_spline

from .core import Grid, ScalarField, VectorField, derivative, lp_norm, lp_norm_array
from .scaling import ScaleScan

EPS_MAX = np.pi / 4
_S_STEP = 0.02
_S_MAX = 1000.0  # |eta_hat| < 1e-15 beyond this
_NODES = 400


def bump(r):
    """Unnormalised radial profile ``exp(-1/(1-r^2))`` (zero for r >= 1)."""
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    inside = r < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - r[inside] ** 2))
    return out


def _radial_transform(s: np.ndarray, dim: int) -> np.ndarray:
    """Unnormalised Fourier transform of the radial bump at radii ``s``."""
    x, w = leggauss(_NODES)
    r = 0.5 * (x + 1.0)
    wr = 0.5 * w * bump(r)
    out = np.empty(s.size)
    for i in range(0, s.size, 4096):
        sr = s[i:i + 4096, None] * r
        if dim == 2:
            k = 2 * np.pi * special.j0(sr) * r
        else:
            k = 4 * np.pi * np.sinc(sr / np.pi) * r ** 2
        out[i:i + 4096] = k @ wr
    return out


@lru_cache(maxsize=None)
def _transform_table(dim: int):
    s = np.arange(0.0, _S_MAX + _S_STEP / 2, _S_STEP)
    vals = _radial_transform(s, dim)
    return make_interp_spline(s, vals / vals[0], k=5)


@lru_cache(maxsize=None)
def normalizing_constant(dim: int) -> float:
    """``C0`` such that the bump integrates to one over R^dim."""
    return float(1.0 / _radial_transform(np.zeros(1), dim)[0])


def bump_transform(s, dim: int) -> np.ndarray:
    """Normalised transform ``eta_hat(s)`` of the unit mollifier, ``eta_hat(0) = 1``."""
    s = np.abs(np.asarray(s, dtype=float))
    out = np.zeros_like(s)
    ok = s < _S_MAX
    out[ok] = _transform_table(dim)(s[ok])
    return out


def min_epsilon(grid: Grid) -> float:
    return 2.0 * grid.spacing


def check_epsilon(grid: Grid, eps: float):
    lo = min_epsilon(grid)
    if not lo * (1 - 1e-12) <= eps < EPS_MAX:
        raise ValueError(
            f"eps={eps:g} outside the resolvable range [{lo:g}, {EPS_MAX:g}) "
            f"for n={grid.n}; minimum eps for this grid is {lo:g}")


@lru_cache(maxsize=64)
def _multiplier(dim: int, n: int, eps: float) -> np.ndarray:
    g = Grid(dim, n)
    kmag = g.kmag
    uniq, inv = np.unique(kmag, return_inverse=True)
    m = bump_transform(eps * uniq, dim)[inv].reshape(kmag.shape)
    m = np.where(g.nyquist_mask, 0.0, m)
    m.flat[0] = 1.0
    m.setflags(write=False)
    return m


def multiplier(grid: Grid, eps: float) -> np.ndarray:
    """Spectral multiplier of ``f -> f * eta_eps`` on ``grid``."""
    check_epsilon(grid, eps)
    return _multiplier(grid.dim, grid.n, float(eps))


@dataclass(frozen=True)
class MollifierKernel:
    """Sampled ``eta_eps`` on the torus together with its convolution multiplier."""

    grid: Grid
    epsilon: float

    def __post_init__(self):
        check_epsilon(self.grid, self.epsilon)

    @property
    def multiplier(self) -> np.ndarray:
        return multiplier(self.grid, self.epsilon)

    def offsets(self, refine: int = 1) -> np.ndarray:
        """Lattice offsets ``y`` (spacing ``h/refine``) with ``|y| < eps``."""
        h = self.grid.spacing / refine
        m = int(np.ceil(self.epsilon / h))
        ax = np.arange(-m, m + 1) * h
        pts = np.stack(np.meshgrid(*([ax] * self.grid.dim), indexing="ij"), -1)
        pts = pts.reshape(-1, self.grid.dim)
        return pts[np.sum(pts ** 2, axis=1) < self.epsilon ** 2]

    def weights(self, refine: int = 1) -> tuple[np.ndarray, np.ndarray]:
        """Quadrature offsets and weights on the refined lattice, summing to one."""
        y = self.offsets(refine)
        w = bump(np.sqrt(np.sum(y ** 2, axis=1)) / self.epsilon)
        return y, w / w.sum()

    @property
    def kernel(self) -> ScalarField:
        """Physical samples of ``eta_eps`` wrapped onto the grid."""
        g = self.grid
        d = [np.minimum(c, g.period - c) for c in g.coords()]
        r = np.sqrt(sum(c ** 2 for c in d)) / self.epsilon
        vals = normalizing_constant(g.dim) * bump(r) / self.epsilon ** g.dim
        return ScalarField(g, np.broadcast_to(vals, g.shape).copy())

    @property
    def normalization(self) -> float:
        """Quadrature of the sampled kernel (tends to 1 as the grid resolves eps)."""
        return float(self.kernel.values.sum() * self.grid.cell_volume)


def mollify(f, eps: float):
    """``f * eta_eps`` for a scalar or vector field."""
    if isinstance(f, VectorField):
        return VectorField([mollify(c, eps) for c in f])
    return ScalarField(f.grid, hat=f.hat * multiplier(f.grid, eps))


def mollify_hat(hat: np.ndarray, grid: Grid, eps: float) -> np.ndarray:
    return hat * multiplier(grid, eps)


def mollifier_rate_scan(f: ScalarField, p: float, scales, mode: str = "approximation",
                        k: int = 1, exponent: float | None = None) -> ScaleScan:
    """Measure ``||f^eps - f||_p`` or ``||grad^k f^eps||_p`` over ``scales``.

    ``mode`` is ``"approximation"`` or ``"derivative"``.  The compensated
    column divides by ``eps**exponent`` (default 0).
    """
    scales = np.asarray(scales, dtype=float)
    if scales.size == 0:
        raise ValueError("empty scale list")
    if mode not in ("approximation", "derivative"):
        raise ValueError(f"unknown mode {mode!r}")
    g = f.grid
    vals = []
    for eps in scales:
        fe = mollify(f, eps)
        if mode == "approximation":
            vals.append(lp_norm(fe - f, p))
        else:
            vals.append(lp_norm_array(_grad_k_magnitude(fe, k), p, g.cell_volume))
    label = "approximation" if mode == "approximation" else f"derivative({k})"
    return ScaleScan(scales, np.array(vals), exponent or 0.0, label=label,
                     atol=1e-300, meta={"p": p})


def _grad_k_magnitude(f: ScalarField, k: int) -> np.ndarray:
    """Pointwise Frobenius norm of the k-th derivative tensor."""
    g = f.grid
    total = np.zeros(g.shape)
    for idx in np.ndindex(*([g.dim] * k)):
        counts = np.bincount(np.asarray(idx), minlength=g.dim)
        h = f.hat
        for axis, c in enumerate(counts):
            if c:
                h = h * (1j * g.wavenumbers[axis]) ** c
        h = np.where(g.nyquist_mask, 0.0, h)
        total += ScalarField(g, hat=h).values ** 2
    return np.sqrt(total)


def kernel_derivative_l1(dim: int, eps: float, k: int = 1, points: int = 4000) -> float:
    """``||grad^k eta_eps||_{L^1}`` by radial quadrature of the analytic profile.

    Only the radial derivative of order ``k`` is integrated, which is the
    full gradient norm for k = 1.
    """
    r = (np.arange(points) + 0.5) / points
    t = 1.0 - r ** 2
    e = np.exp(-1.0 / t)
    if k == 1:
        dr = e * (-2 * r / t ** 2)
    else:
        dr = np.gradient(e, r, edge_order=2)
        for _ in range(k - 1):
            dr = np.gradient(dr, r, edge_order=2)
    area = 2 * np.pi if dim == 2 else 4 * np.pi
    l1 = area * np.sum(np.abs(dr) * r ** (dim - 1)) / points
    return normalizing_constant(dim) * l1 / eps ** k
