"""Seeded generators: prescribed-Besov random fields, classical flows and
manufactured compressible states.

Random fields are built from unit-modulus Fourier coefficients (the phases of
seeded white noise) on disjoint frequency shells.  Shell ``j`` covers
``25/24 * 2^j <= |k| < 25/12 * 2^j`` (where neighbouring block weights
cross), except that the lowest shell starts at ``4/3 * 2^lo`` and the highest
stops at ``3/2 * 2^hi`` so that exactly blocks ``lo..hi`` see the field.
Inside a shell the modulus follows ``|k|^-(alpha + d/2)``; a per-shell
amplitude is then tuned until the measured compensated block norms hit
their targets.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .core import (Grid, ScalarField, VectorField, fft, ifft, leray_project, lp_norm_array,
                   oversampled_values)
from .littlewood_paley import DyadicPartition

VARIANTS = {"infinity_type": "infinity_type", "inf": "infinity_type", "infinity": "infinity_type",
            "cN_type": "cN_type", "cN": "cN_type", "cn": "cN_type"}


@dataclass(frozen=True)
class BesovFieldSpec:
    alpha: float
    p: float = 3.0
    variant: str = "infinity_type"
    seed: int = 0
    shells: tuple | None = None  # (j_lo, j_hi); None means (0, j_max)
    cN_power: float = 1.0  # cN target is (1 + j)^-cN_power

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        object.__setattr__(self, "variant", VARIANTS[self.variant])
        if not self.p >= 1:
            raise ValueError("p must be >= 1")

    def shell_range(self, grid: Grid) -> tuple[int, int]:
        part = DyadicPartition(grid)
        lo, hi = self.shells if self.shells is not None else (0, part.j_max)
        if lo > hi or lo < part.j_min or hi > part.j_max:
            raise IndexError(f"shells ({lo}, {hi}) outside representable range "
                             f"[{part.j_min}, {part.j_max}] for n={grid.n}")
        if self.variant == "cN_type" and lo < 0:
            raise IndexError("cN_type shells must start at j >= 0")
        return lo, hi

    def target(self, j):
        j = np.asarray(j, dtype=float)
        if self.variant == "infinity_type":
            return np.ones_like(j)
        return (1.0 + j) ** (-self.cN_power)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["shells"] = list(self.shells) if self.shells is not None else None
        return d


def rng_for(seed: int, *key: int) -> np.random.Generator:
    """Generator for ``seed`` split by an integer key path."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(key)))


def random_phases(grid: Grid, rng: np.random.Generator) -> np.ndarray:
    """Unit-modulus Hermitian coefficients (zero mean and Nyquist modes)."""
    hat = fft(rng.standard_normal(grid.shape), grid)
    mag = np.abs(hat)
    out = np.divide(hat, mag, out=np.zeros_like(hat), where=mag > 0)
    # Self-conjugate modes on the last axis planes must stay real.
    out[grid.nyquist_mask] = 0.0
    out.flat[0] = 0.0
    return out


def shell_index(grid: Grid, lo: int, hi: int) -> np.ndarray:
    """Shell label per spectral index (``lo..hi``) or -999 outside all shells."""
    k = grid.kmag
    edges = 25.0 / 24.0 * 2.0 ** np.arange(lo, hi + 2, dtype=float)
    edges[0] = 4.0 / 3.0 * 2.0 ** lo
    edges[-1] = 1.5 * 2.0 ** hi
    lab = np.full(k.shape, -999, dtype=int)
    for i, j in enumerate(range(lo, hi + 1)):
        lab[(k >= edges[i]) & (k < edges[i + 1])] = j
    lab[grid.nyquist_mask] = -999
    return lab


def _block_norm_stack(grid: Grid, hats: np.ndarray, j: int, p: float) -> np.ndarray:
    m = DyadicPartition(grid).multiplier(j)
    vals = ifft(hats * m, grid)
    return np.array([lp_norm_array(v, p, grid.cell_volume) for v in vals])


def _calibrate(grid: Grid, raw: np.ndarray, spec: BesovFieldSpec, shared: bool,
               rtol: float = 1e-9, max_iter: int = 60) -> np.ndarray:
    """Per-shell amplitudes so that compensated block norms meet the targets.

    ``raw`` is a stack of coefficient arrays.  With ``shared`` one amplitude
    per shell is used for the whole stack (calibrating the mean component
    norm), which keeps linear constraints such as zero divergence intact.
    """
    lo, hi = spec.shell_range(grid)
    lab = shell_index(grid, lo, hi)
    js = np.arange(lo, hi + 1)
    want = spec.target(js) * 2.0 ** (-spec.alpha * js)
    ncomp = raw.shape[0]
    amp = np.ones((ncomp, js.size))
    amp_grid = np.zeros((ncomp,) + lab.shape)

    def assemble():
        amp_grid[:] = 0.0
        for i, j in enumerate(js):
            amp_grid[:, lab == j] = amp[:, i:i + 1]
        return raw * amp_grid

    for _ in range(max_iter):
        hats = assemble()
        got = np.stack([_block_norm_stack(grid, hats, int(j), spec.p) for j in js], axis=1)
        if shared:
            got = np.repeat(got.mean(axis=0, keepdims=True), ncomp, axis=0)
        ratio = want / np.where(got > 0, got, np.inf)
        ratio = np.where(got > 0, ratio, 1.0)
        amp *= ratio
        if np.max(np.abs(ratio - 1.0)) < rtol:
            break
    return assemble()


def _envelope(grid: Grid, spec: BesovFieldSpec) -> np.ndarray:
    k = grid.kmag
    env = np.zeros_like(k)
    nz = k > 0
    env[nz] = k[nz] ** -(spec.alpha + grid.dim / 2.0)
    return env


def random_besov_field(grid: Grid, spec: BesovFieldSpec, component: int | None = None) -> ScalarField:
    """Random-phase field whose compensated block norms follow ``spec``.

    ``infinity_type`` fields have ``2^{j alpha} ||Delta_j f||_p = 1`` on every
    shell, ``cN_type`` fields ``(1+j)^-cN_power``.
    """
    key = () if component is None else (component,)
    raw = (random_phases(grid, rng_for(spec.seed, *key)) * _envelope(grid, spec))[None]
    hat = _calibrate(grid, raw, spec, shared=False)[0]
    return ScalarField(grid, hat=hat)


def random_besov_vector_field(grid: Grid, spec: BesovFieldSpec, solenoidal: bool = True) -> VectorField:
    """Vector analogue of :func:`random_besov_field`.

    Without projection each component is ``random_besov_field(grid, spec,
    component=i)``.  With projection the Leray projector acts on the raw
    phases and one amplitude per shell (shared by all components) calibrates
    the mean component block norm.
    """
    d = grid.dim
    if not solenoidal:
        return VectorField([random_besov_field(grid, spec, component=i) for i in range(d)])
    env = _envelope(grid, spec)
    raw = VectorField.from_hat(grid, [random_phases(grid, rng_for(spec.seed, i)) * env
                                      for i in range(d)])
    raw = leray_project(raw).hat
    return VectorField.from_hat(grid, _calibrate(grid, raw, spec, shared=True))


def random_band_limited(grid: Grid, kmax: float, seed: int, key=()) -> ScalarField:
    """Mean-zero Gaussian field with modes ``0 < |k| <= kmax``, unit L^inf on samples."""
    hat = fft(rng_for(seed, *key).standard_normal(grid.shape), grid)
    keep = (grid.kmag <= kmax) & ~grid.nyquist_mask
    keep.flat[0] = False
    f = ScalarField(grid, hat=np.where(keep, hat, 0.0))
    peak = np.abs(f.values).max()
    return ScalarField(grid, hat=f.hat / peak) if peak > 0 else f


def taylor_green(grid: Grid) -> VectorField:
    """``(sin x cos y cos z, -cos x sin y cos z, 0)``."""
    if grid.dim != 3:
        raise ValueError("taylor_green needs a 3D grid")
    x, y, z = grid.coords()
    shape = grid.shape
    return VectorField.from_array(grid, [
        np.broadcast_to(np.sin(x) * np.cos(y) * np.cos(z), shape),
        np.broadcast_to(-np.cos(x) * np.sin(y) * np.cos(z), shape),
        np.zeros(shape)])


def abc_flow(grid: Grid, A: float = 1.0, B: float = 1.0, C: float = 1.0) -> VectorField:
    """Arnold-Beltrami-Childress flow; satisfies ``curl v = v``."""
    if grid.dim != 3:
        raise ValueError("abc_flow needs a 3D grid")
    x, y, z = grid.coords()
    shape = grid.shape
    return VectorField.from_array(grid, [
        np.broadcast_to(A * np.sin(z) + C * np.cos(y), shape),
        np.broadcast_to(B * np.sin(x) + A * np.cos(z), shape),
        np.broadcast_to(C * np.sin(y) + B * np.cos(x), shape)])


@dataclass(frozen=True)
class CompressibleState:
    rho: ScalarField
    v: VectorField
    bounds: tuple[float, float]  # declared (c1, c2)

    def __iter__(self):
        return iter((self.rho, self.v))


def manufactured_compressible(grid: Grid, amplitude: float, law=None, seed: int = 0,
                              profile: str = "random", velocity: str = "abc",
                              kmax: float = 2.0) -> CompressibleState:
    """Density ``1 + amplitude * h`` with ``|h| <= 1`` and a smooth velocity.

    ``profile`` is ``"random"`` (band-limited, seeded) or ``"sine"``
    (product of sines); ``velocity`` is ``"abc"`` (3D only), ``"random"``
    (solenoidal band-limited) or ``"zero"``.  ``law`` is accepted for
    signature symmetry with the diagnostics and is not needed here.
    """
    if not 0 <= amplitude < 1:
        raise ValueError(f"amplitude must lie in [0, 1), got {amplitude}")
    if profile == "sine":
        prof = np.ones(grid.shape)
        for c in grid.coords():
            prof = prof * np.sin(c)
        h = ScalarField(grid, prof)
    elif profile == "random":
        h = random_band_limited(grid, kmax, seed, key=(0,))
        # Scale by the interpolant's peak so the bound holds between samples too.
        peak = max(np.abs(oversampled_values(h, 4)).max(), np.abs(h.values).max())
        h = ScalarField(grid, hat=h.hat / peak)
    else:
        raise ValueError(f"unknown density profile {profile!r}")
    rho = ScalarField(grid, 1.0 + amplitude * h.values)
    if velocity == "abc":
        v = abc_flow(grid)
    elif velocity == "random":
        v = leray_project(VectorField([random_band_limited(grid, kmax, seed, key=(1, i))
                                       for i in range(grid.dim)]))
    elif velocity == "zero":
        v = VectorField.zeros(grid)
    else:
        raise ValueError(f"unknown velocity {velocity!r}")
    return CompressibleState(rho, v, (1.0 - amplitude, 1.0 + amplitude))


def _base_modes(dim: int) -> np.ndarray:
    """Integer wavevectors with ``1 <= |k| < 2``, one from each +-k pair."""
    ks = []
    for k in np.ndindex(*([5] * dim)):
        k = np.array(k) - 2
        r = np.linalg.norm(k)
        if 1 <= r < 2 and tuple(k) > tuple(-k):
            ks.append(k)
    return np.array(ks)


def _add_mode(hat: np.ndarray, grid: Grid, k, c: complex):
    """Add the real mode ``Re(c exp(i k.x))`` to an rfft coefficient array."""
    n = grid.n
    k = np.asarray(k)
    if k[-1] < 0:
        k, c = -k, np.conj(c)
    hat[tuple(k % n)] += c / 2
    if k[-1] == 0:
        # Both partners live in the stored half spectrum.
        hat[tuple(-k % n)] += np.conj(c) / 2


def lacunary_octaves(grid: Grid) -> int:
    """Largest J with all modes of ``U(2^J x)`` below n/2."""
    kmax = math.sqrt(grid.dim) if grid.dim > 1 else 1.0
    return int(math.floor(math.log2(grid.n / 2 / kmax - 1e-9)))


def lacunary_vector_field(grid: Grid, alpha: float, seed: int = 0, octaves: int | None = None,
                          solenoidal: bool = True) -> VectorField:
    """Self-similar field ``sum_{j=0}^{J} 2^{-j alpha} U(2^j x)``.

    ``U`` is a seeded trigonometric polynomial on the modes ``1 <= |k| < 2``
    (divergence-free when ``solenoidal``).  Each octave is a rescaled copy
    of the previous one, so cross-scale interactions repeat from octave to
    octave; scale-by-scale fluxes are coherent rather than random in sign.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    J = lacunary_octaves(grid) if octaves is None else octaves
    if J < 0 or J > lacunary_octaves(grid):
        raise IndexError(f"octaves must lie in [0, {lacunary_octaves(grid)}] for n={grid.n}")
    d = grid.dim
    rng = rng_for(seed, 7)
    hats = np.zeros((d,) + grid.spectral_shape, dtype=complex)
    for k in _base_modes(d):
        c = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        if solenoidal:
            c = c - k * np.dot(k, c) / np.dot(k, k)
        for j in range(J + 1):
            for i in range(d):
                _add_mode(hats[i], grid, (2 ** j) * k, 2.0 ** (-j * alpha) * c[i])
    return VectorField.from_hat(grid, hats)


def lacunary_field(grid: Grid, alpha: float, seed: int = 0, octaves: int | None = None) -> ScalarField:
    """Scalar analogue of :func:`lacunary_vector_field`."""
    J = lacunary_octaves(grid) if octaves is None else octaves
    rng = rng_for(seed, 8)
    hat = np.zeros(grid.spectral_shape, dtype=complex)
    for k in _base_modes(grid.dim):
        c = complex(rng.standard_normal(), rng.standard_normal())
        for j in range(J + 1):
            _add_mode(hat, grid, (2 ** j) * k, 2.0 ** (-j * alpha) * c)
    return ScalarField(grid, hat=hat)
