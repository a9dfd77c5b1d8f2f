"""Dyadic (Littlewood-Paley) blocks, Besov semi-norms and related checks.

Radial cutoffs: ``rho(r) = 1`` for ``r <= 3/4`` and ``0`` for ``r >= 4/3``,
with a C-infinity monotone transition; ``phi(r) = rho(r/2) - rho(r)`` lives on
the annulus ``3/4 <= r <= 8/3``.  Block ``j`` applies ``phi(2^-j |xi|)``.
The sum of blocks ``a..b`` telescopes to ``rho(2^-(b+1) r) - rho(2^-a r)``,
which equals one exactly for ``4/3 * 2^a <= r <= 3/2 * 2^b``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import make_interp_spline

from .core import Grid, ScalarField, lp_norm, lp_norm_array, oversampled_values, product, shift
from .scaling import ScaleScan, classify_slope, DEAD_BAND

R_IN = 3.0 / 4.0
R_OUT = 4.0 / 3.0
J_MIN = -1


@lru_cache(maxsize=1)
def _smoothstep_table():
    """Normalised cumulative integral of the bump ``exp(-1/(1-(2t-1)^2))`` on [0,1]."""
    t = np.linspace(0.0, 1.0, 2049)
    x, w = leggauss(12)
    a, b = t[:-1, None], t[1:, None]
    s = 0.5 * (b - a) * x + 0.5 * (a + b)
    u = 2 * s - 1
    inner = np.where(np.abs(u) < 1, np.exp(-1.0 / np.maximum(1 - u ** 2, 1e-300)), 0.0)
    pieces = (0.5 * (b - a)[:, 0]) * (inner @ w)
    cum = np.concatenate([[0.0], np.cumsum(pieces)])
    return make_interp_spline(t, cum / cum[-1], k=5)


def smoothstep(t):
    """C-infinity step: 0 for t <= 0, 1 for t >= 1, monotone in between."""
    t = np.asarray(t, dtype=float)
    out = np.where(t >= 1.0, 1.0, 0.0)
    mid = (t > 0) & (t < 1)
    if np.any(mid):
        out[mid] = np.clip(_smoothstep_table()(t[mid]), 0.0, 1.0)
    return out


def rho(r):
    """Low-pass profile: 1 on ``r <= 3/4``, 0 on ``r >= 4/3``."""
    r = np.asarray(r, dtype=float)
    return 1.0 - smoothstep((r - R_IN) / (R_OUT - R_IN))


def phi(r):
    """Annulus profile ``rho(r/2) - rho(r)``."""
    r = np.asarray(r, dtype=float)
    return rho(r / 2.0) - rho(r)


@dataclass(frozen=True)
class DyadicPartition:
    """Block range representable on a grid.

    ``j_max`` is the largest j with ``8/3 * 2^j <= n/2``; ``j_min = -1`` so
    that the block annuli cover every nonzero integer frequency.
    """

    grid: Grid

    @property
    def j_min(self) -> int:
        return J_MIN

    @property
    def j_max(self) -> int:
        return int(math.floor(math.log2(self.grid.n / 2 * 3 / 8) + 1e-12))

    @property
    def blocks(self) -> range:
        return range(self.j_min, self.j_max + 1)

    @property
    def covered(self) -> tuple[float, float]:
        """Radii on which the blocks sum to one."""
        return R_OUT * 2.0 ** self.j_min, 1.5 * 2.0 ** self.j_max

    def check(self, j: int):
        if not self.j_min <= j <= self.j_max:
            raise IndexError(f"block j={j} outside representable range "
                             f"[{self.j_min}, {self.j_max}] for n={self.grid.n}")

    def multiplier(self, j: int) -> np.ndarray:
        self.check(j)
        return _block_multiplier(self.grid.dim, self.grid.n, j)

    def partition_sum(self) -> np.ndarray:
        return sum(self.multiplier(j) for j in self.blocks)


@lru_cache(maxsize=128)
def _block_multiplier(dim: int, n: int, j: int) -> np.ndarray:
    g = Grid(dim, n)
    kmag = g.kmag
    uniq, inv = np.unique(kmag, return_inverse=True)
    m = phi(uniq * 2.0 ** (-j))[inv].reshape(kmag.shape)
    m[g.nyquist_mask] = 0.0
    m.flat[0] = 0.0
    m.setflags(write=False)
    return m


@lru_cache(maxsize=16)
def _low_multiplier(dim: int, n: int) -> np.ndarray:
    g = Grid(dim, n)
    m = rho(g.kmag)
    m.setflags(write=False)
    return m


@dataclass(frozen=True)
class BesovParams:
    s: float
    p: float
    q: float | str = math.inf  # number >= 1, inf, or "cN"

    def __post_init__(self):
        if not math.isfinite(self.s):
            raise ValueError("Besov exponent must be finite")
        if not (self.p >= 1):
            raise ValueError(f"p must be in [1, inf], got {self.p}")
        if self.q != "cN" and not (self.q >= 1):
            raise ValueError(f"q must be in [1, inf] or 'cN', got {self.q}")


@dataclass
class BesovProfile:
    """Compensated block norms ``2^{j alpha} ||Delta_j f||_p`` by block index."""

    alpha: float
    p: float
    j: np.ndarray
    block_norm: np.ndarray
    verdict: str = ""
    slope: float = math.nan
    meta: dict = field(default_factory=dict)

    @property
    def compensated(self) -> np.ndarray:
        return 2.0 ** (self.alpha * self.j) * self.block_norm

    def to_csv(self) -> str:
        lines = ["j,raw,compensated"]
        for j, b, c in zip(self.j, self.block_norm, self.compensated):
            lines.append(f"{int(j)},{b!r},{c!r}")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "p": _num(self.p),
            "entries": [{"j": int(j), "raw": float(b), "compensated": float(c)}
                        for j, b, c in zip(self.j, self.block_norm, self.compensated)],
            "verdict": self.verdict,
            "slope": _num(self.slope),
        }


def _num(x):
    x = float(x)
    return x if math.isfinite(x) else str(x)


def dyadic_block(f: ScalarField, j: int, partition: DyadicPartition | None = None) -> ScalarField:
    """``Delta_j f``: the multiplier ``phi(2^-j xi)`` applied to ``f``."""
    partition = partition or DyadicPartition(f.grid)
    return ScalarField(f.grid, hat=f.hat * partition.multiplier(j))


def low_block(f: ScalarField) -> ScalarField:
    """Nonhomogeneous low-frequency block ``rho(D) f`` (keeps the mean)."""
    return ScalarField(f.grid, hat=f.hat * _low_multiplier(f.grid.dim, f.grid.n))


def _block_lp(f: ScalarField, j: int, p: float, oversample: int = 1) -> float:
    b = dyadic_block(f, j)
    if oversample > 1:
        vals = oversampled_values(b, oversample)
        fine = f.grid.refined(oversample)
        return lp_norm_array(vals, p, fine.cell_volume)
    return lp_norm(b, p)


def block_norms(f: ScalarField, p: float, oversample: int = 1) -> tuple[np.ndarray, np.ndarray]:
    part = DyadicPartition(f.grid)
    js = np.arange(part.j_min, part.j_max + 1)
    return js, np.array([_block_lp(f, int(j), p, oversample) for j in js])


def _lq(seq: np.ndarray, q) -> float:
    if seq.size == 0:
        return 0.0
    if q == "cN" or math.isinf(q):
        return float(seq.max())
    return float(np.sum(seq ** q) ** (1.0 / q))


def besov_seminorm(f: ScalarField, params: BesovParams, oversample: int = 1) -> float:
    """``l^q`` norm over representable blocks of ``2^{js} ||Delta_j f||_p``.

    For ``q = 'cN'`` the sup is returned; the decay itself is judged by
    :func:`cN_profile`.
    """
    js, norms = block_norms(f, params.p, oversample)
    return _lq(2.0 ** (params.s * js) * norms, params.q)


def besov_norm(f: ScalarField, params: BesovParams, oversample: int = 1) -> float:
    """Inhomogeneous norm ``||f||_p + seminorm``."""
    return lp_norm(f, params.p) + besov_seminorm(f, params, oversample)


def cN_profile(f: ScalarField, alpha: float, p: float, oversample: int = 1,
               dead_band: float = DEAD_BAND) -> BesovProfile:
    """Compensated block profile with a trend verdict over the top half of shells."""
    js, norms = block_norms(f, p, oversample)
    prof = BesovProfile(alpha, p, js, norms)
    comp = prof.compensated
    nz = np.flatnonzero(norms > 1e-12 * max(norms.max(), 1e-300))
    if nz.size < 3 or norms.max() == 0:
        prof.verdict = "insufficient shells"
        return prof
    top = nz[nz.size // 2:] if nz.size >= 6 else nz[-3:]
    prof.slope = float(np.polyfit(js[top], np.log2(comp[top]), 1)[0])
    prof.verdict = classify_slope(prof.slope, dead_band)
    prof.meta["fit_blocks"] = [int(js[i]) for i in top]
    return prof


def sample_directions(dim: int, seed: int = 0) -> np.ndarray:
    """Axis directions plus ``2*dim`` seeded random unit vectors."""
    rng = np.random.default_rng(seed)
    rand = rng.standard_normal((2 * dim, dim))
    rand /= np.linalg.norm(rand, axis=1, keepdims=True)
    return np.vstack([np.eye(dim), rand])


def difference_norms(f: ScalarField, p: float, scales, seed: int = 0) -> np.ndarray:
    """``sup_dir ||f(. - r e) - f||_p`` for each ``r`` in ``scales``."""
    dirs = sample_directions(f.grid.dim, seed)
    out = []
    for r in scales:
        out.append(max(lp_norm(shift(f, r * e) - f, p) for e in dirs))
    return np.array(out)


def finite_difference_modulus(f: ScalarField, alpha: float, p: float, scales,
                              seed: int = 0) -> ScaleScan:
    """Compensated modulus ``sup_dir ||f(. - y) - f||_p / |y|^alpha`` per scale.

    The fitted slope of the returned scan is about 0 for a field with
    exactly alpha derivatives in L^p and positive for the c(N) refinement.
    """
    scales = np.asarray(scales, dtype=float)
    if scales.size == 0:
        raise ValueError("empty scale list")
    if np.any(scales <= 0) or np.any(scales >= np.pi):
        raise ValueError("scales must lie in (0, pi)")
    order = np.argsort(-scales)
    scales = scales[order]
    raw = difference_norms(f, p, scales, seed)
    return ScaleScan(scales, raw / scales ** alpha, 0.0, label="difference_modulus",
                     meta={"alpha": alpha, "p": _num(p), "raw": raw.tolist()})


def bernstein_check(f: ScalarField, j: int, a: float, b: float) -> tuple[float, float]:
    """Both sides of ``||Delta_j f||_b <= 2^{j d (1/a - 1/b)} ||Delta_j f||_a``."""
    if b < a or a < 1:
        raise ValueError("need b >= a >= 1")
    blk = dyadic_block(f, j)
    d = f.grid.dim
    inv_b = 0.0 if math.isinf(b) else 1.0 / b
    lhs = lp_norm(blk, b)
    rhs = 2.0 ** (j * d * (1.0 / a - inv_b)) * lp_norm(blk, a)
    return lhs, rhs


def default_difference_scales(grid: Grid, count: int = 12) -> np.ndarray:
    """Geometric scales from ``pi/2`` down to two grid spacings."""
    return np.geomspace(np.pi / 2, 2 * grid.spacing, count)


def difference_seminorm(f: ScalarField, alpha: float, p: float, scales=None,
                        seed: int = 0) -> float:
    """``sup_y ||f(. - y) - f||_p / |y|^alpha`` over sampled ``y``."""
    if scales is None:
        scales = default_difference_scales(f.grid)
    scales = np.asarray(scales, dtype=float)
    return float(np.max(difference_norms(f, p, scales, seed) / scales ** alpha))


def product_besov_check(f: ScalarField, g: ScalarField, alpha: float, p: float,
                        scales=None, seed: int = 0) -> tuple[float, float]:
    """Difference semi-norm of ``fg`` against the product-rule majorant.

    Returns ``(lhs, rhs)`` with ``lhs = [fg]_{alpha,p}`` and
    ``rhs = ||f||_inf [g]_{alpha,p} + [f]_{alpha,inf} ||g||_p``.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    fg = product(f, g)
    lhs = difference_seminorm(fg, alpha, p, scales, seed)
    rhs = (lp_norm(f, math.inf) * difference_seminorm(g, alpha, p, scales, seed)
           + difference_seminorm(f, alpha, math.inf, scales, seed) * lp_norm(g, p))
    return lhs, rhs
