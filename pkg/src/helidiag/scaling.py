"""Scale scans, log-log power-law fits and trend classification."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

DEAD_BAND = 0.05
# Values at or below this fraction of the largest |value| in a scan count as
# numerically zero.
ZERO_RTOL = 1e-13


@dataclass(frozen=True)
class Fit:
    slope: float
    intercept: float
    r_squared: float
    window: tuple  # (eps_max, eps_min) of the fitted points
    status: str = "ok"  # ok | vanishing | undefined

    def to_dict(self) -> dict:
        return {
            "slope": _finite_or_str(self.slope),
            "intercept": _finite_or_str(self.intercept),
            "r2": _finite_or_str(self.r_squared),
            "window": [float(w) for w in self.window],
            "status": self.status,
        }


def _finite_or_str(x):
    x = float(x)
    return x if math.isfinite(x) else str(x)


def geometric_scales(eps0: float, ratio: float, count: int) -> np.ndarray:
    """Descending geometric grid ``eps0, eps0/ratio, ...`` of ``count`` values."""
    if ratio <= 1 or count < 1:
        raise ValueError("need ratio > 1 and count >= 1")
    return eps0 / ratio ** np.arange(count)


def fit_window(n: int, trim: float = 0.2) -> slice:
    """Indices kept after dropping the largest and smallest ``trim`` share."""
    k = int(math.floor(trim * n))
    if n - 2 * k < 2:
        k = max(0, (n - 2) // 2)
    return slice(k, n - k)


def fit_power_law(scales, values, window: slice | None = None, atol: float = 0.0) -> Fit:
    """Least-squares slope of ``log(value)`` against ``log(scale)``.

    A scan whose values are all numerically zero is reported as
    ``vanishing`` with slope ``+inf``: it decays faster than any power.
    """
    scales = np.asarray(scales, dtype=float)
    values = np.abs(np.asarray(values, dtype=float))
    if window is None:
        window = fit_window(scales.size)
    s, v = scales[window], values[window]
    win = (float(s[0]), float(s[-1])) if s.size else (math.nan, math.nan)
    vmax = float(values.max()) if values.size else 0.0
    if vmax <= atol:
        return Fit(math.inf, math.nan, math.nan, win, "vanishing")
    if s.size < 2 or np.any(v <= max(atol, ZERO_RTOL * vmax)):
        return Fit(math.nan, math.nan, math.nan, win, "undefined")
    res = stats.linregress(np.log(s), np.log(v))
    return Fit(float(res.slope), float(res.intercept), float(res.rvalue ** 2), win)


def classify_slope(slope: float, dead_band: float = DEAD_BAND) -> str:
    """``flat`` / ``decaying`` / ``growing`` for a slope per octave of refinement."""
    if not math.isfinite(slope):
        return "decaying" if slope == -math.inf else ("growing" if slope == math.inf else "undefined")
    if slope < -dead_band:
        return "decaying"
    if slope > dead_band:
        return "growing"
    return "flat"


def trend(scales, compensated, window: slice | None = None,
          dead_band: float = DEAD_BAND) -> tuple[str, float]:
    """Trend of a compensated quantity as the scale shrinks.

    The slope is ``d log2(compensated) / d log2(1/scale)``, so ``decaying``
    means the compensated value tends to zero as ``scale -> 0``.
    """
    scales = np.asarray(scales, dtype=float)
    comp = np.abs(np.asarray(compensated, dtype=float))
    if window is None:
        window = fit_window(scales.size)
    s, c = scales[window], comp[window]
    if comp.size and comp.max() == 0:
        return "vanishing", -math.inf
    if s.size < 2 or np.any(c <= 0):
        return "undefined", math.nan
    slope = float(np.polyfit(np.log2(1.0 / s), np.log2(c), 1)[0])
    return classify_slope(slope, dead_band), slope


@dataclass
class ScaleScan:
    """Measured values on a descending list of scales plus a fitted slope.

    ``exponent`` is the reference power used for the compensated column
    ``value / scale**exponent``.
    """

    scales: np.ndarray
    values: np.ndarray
    exponent: float = 0.0
    label: str = ""
    window: slice | None = None
    atol: float = 0.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.scales = np.asarray(self.scales, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.scales.size == 0:
            raise ValueError("empty scale list")
        if self.scales.shape != self.values.shape:
            raise ValueError("scales and values differ in length")
        if np.any(np.diff(self.scales) >= 0):
            raise ValueError("scales must be strictly decreasing")
        if self.window is None:
            self.window = fit_window(self.scales.size)

    @property
    def fit(self) -> Fit:
        return fit_power_law(self.scales, self.values, self.window, self.atol)

    @property
    def compensated(self) -> np.ndarray:
        return np.abs(self.values) / self.scales ** self.exponent

    def trend(self, dead_band: float = DEAD_BAND) -> tuple[str, float]:
        if self.fit.status == "vanishing":
            return "vanishing", -math.inf
        return trend(self.scales, self.compensated, self.window, dead_band)

    def to_rows(self):
        return [(float(s), float(v), float(c))
                for s, v, c in zip(self.scales, self.values, self.compensated)]

    def to_csv(self, column="epsilon") -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([column, "value", "compensated"])
        for row in self.to_rows():
            w.writerow([repr(x) for x in row])
        return buf.getvalue()

    def to_dict(self) -> dict:
        verdict, tslope = self.trend()
        return {
            "label": self.label,
            "exponent": self.exponent,
            "scan": [{"eps": float(s), "value": float(v)}
                     for s, v in zip(self.scales, self.values)],
            "fit": self.fit.to_dict(),
            "trend": {"verdict": verdict, "slope": _finite_or_str(tslope)},
            "meta": self.meta,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)
