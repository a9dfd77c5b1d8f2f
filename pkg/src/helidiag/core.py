"""Periodic grids, sampled fields and spectral operators on the torus.

Every field lives on ``[0, 2*pi)^d`` sampled at ``n`` points per axis.  The
spectral representation uses the real-to-complex layout of
:func:`scipy.fft.rfftn` with the forward transform divided by ``n**d``, so
stored coefficients are Fourier-series coefficients: ``cos(x1)`` has
coefficient ``1/2`` at ``xi = (+1, 0)`` and ``(-1, 0)``.

Axis ``i`` of a sample array corresponds to the coordinate ``x_{i+1}``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.fft as sfft

PERIOD = 2.0 * np.pi


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid with ``n`` points on each of ``dim`` axes."""

    dim: int
    n: int

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError(f"dim must be 2 or 3, got {self.dim}")
        if self.n < 8 or self.n & (self.n - 1):
            raise ValueError(
                f"points per axis must be a power of two >= 8, got {self.n}")

    @property
    def period(self) -> float:
        return PERIOD

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.dim

    @property
    def spectral_shape(self) -> tuple[int, ...]:
        return (self.n,) * (self.dim - 1) + (self.n // 2 + 1,)

    @property
    def size(self) -> int:
        return self.n ** self.dim

    @property
    def spacing(self) -> float:
        return PERIOD / self.n

    @property
    def cell_volume(self) -> float:
        return self.spacing ** self.dim

    @property
    def volume(self) -> float:
        return PERIOD ** self.dim

    def coords(self) -> tuple[np.ndarray, ...]:
        """Open meshgrid of sample coordinates (broadcastable)."""
        x = np.arange(self.n) * self.spacing
        return tuple(np.meshgrid(*([x] * self.dim), indexing="ij", sparse=True))

    # Derived arrays are cached in the instance __dict__ (not a dataclass field,
    # so equality and hashing still only see dim and n).
    def _cache(self, key, build):
        cache = self.__dict__.setdefault("_arrays", {})
        if key not in cache:
            arr = build()
            if isinstance(arr, np.ndarray):
                arr.setflags(write=False)
            cache[key] = arr
        return cache[key]

    @property
    def wavenumbers(self) -> tuple[np.ndarray, ...]:
        """Integer wavenumbers per axis, broadcastable to ``spectral_shape``."""
        def build():
            full = np.fft.fftfreq(self.n, 1.0 / self.n)
            half = np.arange(self.n // 2 + 1, dtype=float)
            ks = []
            for axis in range(self.dim):
                shape = [1] * self.dim
                k = half if axis == self.dim - 1 else full
                shape[axis] = k.size
                ks.append(k.reshape(shape))
            return tuple(ks)
        return self._cache("k", build)

    @property
    def k2(self) -> np.ndarray:
        return self._cache("k2", lambda: sum(k * k for k in self.wavenumbers))

    @property
    def kmag(self) -> np.ndarray:
        return self._cache("kmag", lambda: np.sqrt(self.k2))

    @property
    def nyquist_mask(self) -> np.ndarray:
        """True where any wavenumber component equals +-n/2."""
        def build():
            m = np.zeros(self.spectral_shape, dtype=bool)
            for k in self.wavenumbers:
                m = m | (np.abs(k) == self.n // 2)
            return m
        return self._cache("nyq", build)

    @property
    def hermitian_weights(self) -> np.ndarray:
        """Multiplicity of each stored rfft coefficient in the full spectrum."""
        def build():
            w = np.full(self.spectral_shape, 2.0)
            w[..., 0] = 1.0
            w[..., -1] = 1.0
            return w
        return self._cache("hw", build)

    def dealias_mask(self) -> np.ndarray:
        """2/3-rule mask: keep modes with every |k_i| < n/3."""
        def build():
            m = np.ones(self.spectral_shape, dtype=bool)
            for k in self.wavenumbers:
                m = m & (np.abs(k) < self.n / 3.0)
            return m
        return self._cache("dealias", build)

    def refined(self, factor: int = 2) -> "Grid":
        return Grid(self.dim, self.n * factor)


def fft(values: np.ndarray, grid: Grid) -> np.ndarray:
    return sfft.rfftn(values, axes=range(-grid.dim, 0)) / grid.size


def ifft(hat: np.ndarray, grid: Grid) -> np.ndarray:
    return sfft.irfftn(hat * grid.size, s=grid.shape, axes=range(-grid.dim, 0))


class ScalarField:
    """Real scalar field sampled on a :class:`Grid`.

    Built from either physical samples or rfft coefficients; the other
    representation is computed lazily and cached.  Arrays are read-only.
    """

    def __init__(self, grid: Grid, values=None, *, hat=None):
        if (values is None) == (hat is None):
            raise ValueError("give exactly one of values or hat")
        self.grid = grid
        if values is not None:
            values = np.asarray(values, dtype=float)
            if values.shape != grid.shape:
                raise ValueError(f"values shape {values.shape} != grid shape {grid.shape}")
            if not np.all(np.isfinite(values)):
                raise ValueError("field samples must be finite")
            self._values = values
            self._hat = None
            self.representation = "physical"
        else:
            hat = np.asarray(hat, dtype=complex)
            if hat.shape != grid.spectral_shape:
                raise ValueError(f"hat shape {hat.shape} != {grid.spectral_shape}")
            self._hat = hat
            self._values = None
            self.representation = "spectral"

    @classmethod
    def from_function(cls, grid: Grid, func) -> "ScalarField":
        return cls(grid, np.broadcast_to(func(*grid.coords()), grid.shape).copy())

    @classmethod
    def zeros(cls, grid: Grid) -> "ScalarField":
        return cls(grid, np.zeros(grid.shape))

    @property
    def values(self) -> np.ndarray:
        if self._values is None:
            self._values = ifft(self._hat, self.grid)
            self._values.setflags(write=False)
        return self._values

    @property
    def hat(self) -> np.ndarray:
        if self._hat is None:
            self._hat = fft(self._values, self.grid)
            self._hat.setflags(write=False)
        return self._hat

    def mean(self) -> float:
        return float(self.hat.flat[0].real)

    def __add__(self, other):
        if isinstance(other, ScalarField):
            _check_grid(self, other)
            return ScalarField(self.grid, self.values + other.values)
        return ScalarField(self.grid, self.values + other)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, ScalarField):
            _check_grid(self, other)
            return ScalarField(self.grid, self.values - other.values)
        return ScalarField(self.grid, self.values - other)

    def __rsub__(self, other):
        return ScalarField(self.grid, other - self.values)

    def __neg__(self):
        return ScalarField(self.grid, -self.values)

    def __mul__(self, other):
        # Pointwise on the samples (no dealiasing); see `product` for that.
        if isinstance(other, ScalarField):
            _check_grid(self, other)
            return ScalarField(self.grid, self.values * other.values)
        return ScalarField(self.grid, self.values * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, ScalarField):
            _check_grid(self, other)
            return ScalarField(self.grid, self.values / other.values)
        return ScalarField(self.grid, self.values / other)

    def __repr__(self):
        return f"ScalarField(dim={self.grid.dim}, n={self.grid.n}, {self.representation})"


class VectorField:
    """A ``dim``-tuple of :class:`ScalarField` components on one grid."""

    def __init__(self, components: Sequence[ScalarField]):
        components = tuple(components)
        if not components:
            raise ValueError("empty vector field")
        grid = components[0].grid
        for c in components:
            if c.grid != grid:
                raise ValueError("components must share one grid")
        if len(components) != grid.dim:
            raise ValueError(f"expected {grid.dim} components, got {len(components)}")
        self.components = components
        self.grid = grid

    @classmethod
    def from_array(cls, grid: Grid, values) -> "VectorField":
        values = np.asarray(values, dtype=float)
        return cls([ScalarField(grid, v) for v in values])

    @classmethod
    def from_hat(cls, grid: Grid, hats) -> "VectorField":
        return cls([ScalarField(grid, hat=h) for h in hats])

    @classmethod
    def zeros(cls, grid: Grid) -> "VectorField":
        return cls([ScalarField.zeros(grid) for _ in range(grid.dim)])

    @property
    def representation(self) -> str:
        return self.components[0].representation

    @property
    def values(self) -> np.ndarray:
        return np.stack([c.values for c in self.components])

    @property
    def hat(self) -> np.ndarray:
        return np.stack([c.hat for c in self.components])

    def __getitem__(self, i) -> ScalarField:
        return self.components[i]

    def __len__(self):
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def _zip(self, other, op):
        if isinstance(other, VectorField):
            return VectorField([op(a, b) for a, b in zip(self, other)])
        return VectorField([op(a, other) for a in self])

    def __add__(self, other):
        return self._zip(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._zip(other, lambda a, b: a - b)

    def __neg__(self):
        return VectorField([-c for c in self])

    def __mul__(self, other):
        if isinstance(other, VectorField):
            raise TypeError("use dot() or cross() for vector-vector products")
        return self._zip(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __repr__(self):
        return f"VectorField(dim={self.grid.dim}, n={self.grid.n}, {self.representation})"


@dataclass(frozen=True)
class TimeSeriesField:
    """Snapshots of a scalar or vector field at increasing times."""

    times: tuple
    snapshots: tuple

    def __post_init__(self):
        times = tuple(float(t) for t in self.times)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "snapshots", tuple(self.snapshots))
        if len(times) != len(self.snapshots):
            raise ValueError("times and snapshots differ in length")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("times must be strictly increasing")
        if self.snapshots and any(s.grid != self.snapshots[0].grid for s in self.snapshots):
            raise ValueError("snapshots must share one grid")

    @property
    def grid(self) -> Grid:
        return self.snapshots[0].grid

    def __len__(self):
        return len(self.times)


def _check_grid(*fields):
    g = fields[0].grid
    for f in fields[1:]:
        if f.grid != g:
            raise ValueError(f"grid mismatch: {g} vs {f.grid}")


def transform(f: ScalarField, target: str) -> ScalarField:
    """Return ``f`` held in the ``target`` representation."""
    if target == "physical":
        return ScalarField(f.grid, f.values)
    if target == "spectral":
        return ScalarField(f.grid, hat=f.hat)
    raise ValueError(f"unknown representation {target!r}")


def derivative(f: ScalarField, axis: int, order: int = 1) -> ScalarField:
    """Spectral partial derivative along ``axis`` (Nyquist modes zeroed)."""
    g = f.grid
    if not 0 <= axis < g.dim:
        raise ValueError(f"axis {axis} out of range for dim {g.dim}")
    mult = (1j * g.wavenumbers[axis]) ** order
    hat = np.where(g.nyquist_mask, 0.0, f.hat * mult)
    return ScalarField(g, hat=hat)


def gradient(f: ScalarField) -> VectorField:
    return VectorField([derivative(f, i) for i in range(f.grid.dim)])


def divergence(v: VectorField) -> ScalarField:
    g = v.grid
    hat = sum(1j * k * c.hat for k, c in zip(g.wavenumbers, v))
    return ScalarField(g, hat=np.where(g.nyquist_mask, 0.0, hat))


def curl(v: VectorField):
    """Curl of ``v``: a vector field in 3D, the scalar vorticity in 2D."""
    g = v.grid
    k = g.wavenumbers
    h = [np.where(g.nyquist_mask, 0.0, c.hat) for c in v]
    if g.dim == 2:
        return ScalarField(g, hat=1j * k[0] * h[1] - 1j * k[1] * h[0])
    return VectorField.from_hat(g, [
        1j * (k[1] * h[2] - k[2] * h[1]),
        1j * (k[2] * h[0] - k[0] * h[2]),
        1j * (k[0] * h[1] - k[1] * h[0]),
    ])


def laplacian(f: ScalarField) -> ScalarField:
    return ScalarField(f.grid, hat=-f.grid.k2 * f.hat)


def leray_project(v: VectorField) -> VectorField:
    """Project onto divergence-free fields; the mean mode is kept."""
    g = v.grid
    k = g.wavenumbers
    h = v.hat
    k2 = g.k2.copy()
    k2.flat[0] = 1.0
    div = sum(ki * hi for ki, hi in zip(k, h)) / k2
    return VectorField.from_hat(g, [hi - ki * div for ki, hi in zip(k, h)])


def riesz(f: ScalarField, axis: int) -> ScalarField:
    """Riesz transform with multiplier ``-i xi_axis / |xi|``; mean mode set to 0."""
    g = f.grid
    kmag = g.kmag.copy()
    kmag.flat[0] = 1.0
    mult = -1j * g.wavenumbers[axis] / kmag
    mult = np.where(g.nyquist_mask, 0.0, mult)
    mult.flat[0] = 0.0
    return ScalarField(g, hat=f.hat * mult)


def fractional_laplacian(f: ScalarField, power: float) -> ScalarField:
    """Apply ``(-Delta)^power``; for negative powers the mean mode is dropped."""
    g = f.grid
    k2 = g.k2.copy()
    if power < 0:
        k2.flat[0] = 1.0
    mult = k2 ** power
    if power < 0:
        mult.flat[0] = 0.0
    return ScalarField(g, hat=f.hat * mult)


def shift(f: ScalarField, y) -> ScalarField:
    """Exact translate ``f(. - y)`` via spectral phase shift."""
    g = f.grid
    y = np.asarray(y, dtype=float)
    if y.shape != (g.dim,):
        raise ValueError(f"shift vector must have {g.dim} entries")
    phase = sum(k * yi for k, yi in zip(g.wavenumbers, y))
    return ScalarField(g, hat=f.hat * np.exp(-1j * phase))


def lp_norm(f, p: float) -> float:
    """Uniform-grid L^p norm; for vector fields the pointwise Euclidean norm is used."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if isinstance(f, VectorField):
        vals = np.sqrt(np.sum(f.values ** 2, axis=0))
        grid = f.grid
    else:
        vals = np.abs(f.values)
        grid = f.grid
    return lp_norm_array(vals, p, grid.cell_volume)


def lp_norm_array(vals: np.ndarray, p: float, cell_volume: float) -> float:
    vals = np.abs(vals)
    if np.isinf(p):
        return float(vals.max()) if vals.size else 0.0
    if p == 1:
        return float(vals.sum() * cell_volume)
    if p == 2:
        return float(np.sqrt(np.sum(vals * vals) * cell_volume))
    return float((np.sum(vals ** p) * cell_volume) ** (1.0 / p))


def inner(f: ScalarField, g: ScalarField) -> float:
    """``int f g dx`` by Parseval (exact for band-limited fields)."""
    _check_grid(f, g)
    w = f.grid.hermitian_weights
    return float(f.grid.volume * np.sum(w * (f.hat * np.conj(g.hat)).real))


def integrate(f: ScalarField) -> float:
    return f.grid.volume * f.mean()


def dot(u: VectorField, v: VectorField) -> ScalarField:
    """Pointwise dot product on the samples."""
    return ScalarField(u.grid, np.sum(u.values * v.values, axis=0))


def cross(u: VectorField, v: VectorField):
    """Pointwise cross product on the samples (scalar in 2D)."""
    a, b = u.values, v.values
    if u.grid.dim == 2:
        return ScalarField(u.grid, a[0] * b[1] - a[1] * b[0])
    return VectorField.from_array(u.grid, np.cross(a, b, axis=0))


# --- zero padding -----------------------------------------------------------

def _axis_index(n_from: int, n_to: int, last: bool) -> np.ndarray:
    """Source indices of modes |k| < min(n_from, n_to)/2 placed in the target layout."""
    m = min(n_from, n_to) // 2
    if last:
        return np.arange(m), np.arange(m)
    pos = np.arange(m)
    neg = np.arange(-m + 1, 0)
    src = np.concatenate([pos, neg % n_from])
    dst = np.concatenate([pos, neg % n_to])
    return src, dst


def resample_spectrum(hat: np.ndarray, dim: int, n_from: int, n_to: int) -> np.ndarray:
    """Copy modes with every |k_i| < min(n_from, n_to)/2 into an ``n_to`` layout.

    Nyquist modes are dropped in both directions.  Works on stacked leading axes.
    """
    lead = hat.shape[:-dim]
    out = np.zeros(lead + (n_to,) * (dim - 1) + (n_to // 2 + 1,), dtype=complex)
    src_idx, dst_idx = [], []
    for axis in range(dim):
        s, d = _axis_index(n_from, n_to, axis == dim - 1)
        src_idx.append(s)
        dst_idx.append(d)
    src = (Ellipsis,) + tuple(np.ix_(*src_idx))
    dst = (Ellipsis,) + tuple(np.ix_(*dst_idx))
    out[dst] = hat[src]
    return out


def product(f: ScalarField, g: ScalarField) -> ScalarField:
    """Dealiased product: formed on a 3/2-padded grid and truncated back.

    Retained modes (every |k_i| < n/2) are exact for band-limited inputs.
    """
    _check_grid(f, g)
    grid = f.grid
    hats = np.stack([f.hat, g.hat])
    return ScalarField(grid, hat=products(grid, hats, [(0, 1)])[0])


def products(grid: Grid, hats: np.ndarray, pairs) -> np.ndarray:
    """Dealiased products of several field pairs sharing one padded transform.

    ``hats`` is a stack of rfft coefficient arrays; ``pairs`` lists index
    pairs into it.  Returns the stacked coefficient arrays of the products.
    """
    d = grid.dim
    m = 3 * grid.n // 2
    axes = range(-d, 0)
    padded = resample_spectrum(hats, d, grid.n, m)
    phys = sfft.irfftn(padded * m ** d, s=(m,) * d, axes=axes)
    prods = np.stack([phys[i] * phys[j] for i, j in pairs])
    phat = sfft.rfftn(prods, axes=axes) / m ** d
    return resample_spectrum(phat, d, m, grid.n)


def oversampled_values(f: ScalarField, factor: int = 2) -> np.ndarray:
    """Samples of the trigonometric interpolant of ``f`` on a refined grid."""
    g = f.grid
    fine = g.refined(factor)
    return ifft(resample_spectrum(f.hat, g.dim, g.n, fine.n), fine)
