"""Pseudo-spectral RK4 integrators for 3D incompressible Euler and 2D SQG.

Both solvers keep the state as 2/3-masked rfft coefficients.  With that
truncation the semi-discrete systems conserve energy and helicity (Euler)
and ``||theta||_2`` and the Hamiltonian (SQG) exactly, so measured drifts
are pure time-stepping error.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import (Grid, ScalarField, TimeSeriesField, VectorField, divergence, fft, ifft,
                   inner)
from .conservation import energy, helicity, sqg_helicity
from .fieldio import atomic_write_json, write_field

log = logging.getLogger(__name__)

SYSTEMS = ("euler3d", "sqg2d")


class NumericalAbort(RuntimeError):
    """Raised when the state stops being finite; carries the last good step."""

    def __init__(self, msg, step, time):
        super().__init__(msg)
        self.step = step
        self.time = time


@dataclass
class SolverConfig:
    grid: Grid
    dt: float
    t_end: float
    record_every: int = 1
    system: str = "euler3d"
    cfl: float | None = None  # filled in by the integrators

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.t_end < 0:
            raise ValueError("t_end must be nonnegative")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")
        if self.system not in SYSTEMS:
            raise ValueError(f"system must be one of {SYSTEMS}")
        want = {"euler3d": 3, "sqg2d": 2}[self.system]
        if self.grid.dim != want:
            raise ValueError(f"{self.system} needs a {want}D grid")

    @property
    def steps(self) -> int:
        k = int(round(self.t_end / self.dt))
        if abs(k * self.dt - self.t_end) > 1e-9 * max(1.0, self.t_end):
            raise ValueError(f"t_end={self.t_end} is not a multiple of dt={self.dt}")
        return k

    def to_dict(self) -> dict:
        return {"dim": self.grid.dim, "n": self.grid.n, "dt": self.dt, "t_end": self.t_end,
                "record_every": self.record_every, "system": self.system,
                "dealias": "2/3", "cfl": self.cfl}


@dataclass
class Trajectory:
    series: TimeSeriesField
    log: list
    config: SolverConfig
    notes: list = field(default_factory=list)

    def column(self, key) -> np.ndarray:
        return np.array([row[key] for row in self.log])


def _rk4(rhs, y, dt):
    k1 = rhs(y)
    k2 = rhs(y + 0.5 * dt * k1)
    k3 = rhs(y + 0.5 * dt * k2)
    k4 = rhs(y + dt * k3)
    return y + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def _truncate(hat, grid, notes, what):
    mask = grid.dealias_mask()
    lost = float(np.sum(np.abs(hat[..., ~mask]) ** 2))
    if lost > 0:
        notes.append(f"{what}: modes outside the 2/3 band removed (energy {lost:.3g})")
    return np.where(mask, hat, 0.0)


def _run(cfg, y0, rhs, snapshot, diagnostics, notes):
    steps = cfg.steps
    y = y0
    times, snaps, rows = [0.0], [snapshot(y)], [dict(step=0, t=0.0, **diagnostics(y))]
    for s in range(1, steps + 1):
        with np.errstate(over="ignore", invalid="ignore"):  # checked just below
            y_new = _rk4(rhs, y, cfg.dt)
        if not np.all(np.isfinite(y_new)):
            t_last = (s - 1) * cfg.dt
            raise NumericalAbort(f"non-finite state at step {s}; last finite step {s - 1} "
                                 f"(t = {t_last:g})", s - 1, t_last)
        y = y_new
        if s % cfg.record_every == 0 or s == steps:
            t = s * cfg.dt
            times.append(t)
            snaps.append(snapshot(y))
            rows.append(dict(step=s, t=t, **diagnostics(y)))
            log.debug("step %d t=%g %s", s, t, rows[-1])
    return Trajectory(TimeSeriesField(times, snaps), rows, cfg, notes)


def euler_rhs(grid: Grid):
    """``-P(v . grad v)`` on masked coefficient stacks of shape ``(3, ...)``."""
    k = grid.wavenumbers
    mask = grid.dealias_mask()
    k2 = grid.k2.copy()
    k2.flat[0] = 1.0

    def rhs(vh):
        v = ifft(vh, grid)
        grad = ifft(np.stack([1j * k[j] * vh for j in range(3)]), grid)  # grad[j, i] = d_j v_i
        adv = np.einsum("j...,ji...->i...", v, grad)
        nh = fft(adv, grid) * mask
        div = sum(ki * ni for ki, ni in zip(k, nh)) / k2
        return -(nh - np.stack([ki * div for ki in k]))
    return rhs


def euler3d_integrate(v0: VectorField, cfg: SolverConfig) -> Trajectory:
    grid = cfg.grid
    if v0.grid != grid:
        raise ValueError("v0 is not on the configured grid")
    div = float(np.max(np.abs(divergence(v0).values)))
    if div > 1e-10:
        raise ValueError(f"initial velocity is not divergence free (max |div v| = {div:.3g})")
    notes = []
    vh = _truncate(v0.hat, grid, notes, "v0")
    vmax = float(np.max(np.abs(v0.values)))
    cfg.cfl = cfg.dt * vmax / grid.spacing
    if cfg.cfl > 1:
        notes.append(f"CFL number {cfg.cfl:.3g} exceeds 1")

    def snapshot(y):
        return VectorField.from_hat(grid, y)

    def diagnostics(y):
        v = snapshot(y)
        return {"energy": energy(v), "helicity": helicity(v),
                "max_div": float(np.max(np.abs(divergence(v).values)))}

    return _run(cfg, vh, euler_rhs(grid), snapshot, diagnostics, notes)


def sqg_rhs(grid: Grid):
    """``-div(v theta)`` with ``v = (-R_2 theta, R_1 theta)``."""
    k = grid.wavenumbers
    mask = grid.dealias_mask()
    kmag = grid.kmag.copy()
    kmag.flat[0] = 1.0
    r = [-1j * ki / kmag for ki in k]  # Riesz multipliers

    def rhs(th):
        vh = np.stack([-r[1] * th, r[0] * th])
        v, t = ifft(vh, grid), ifft(th, grid)
        flux = fft(v * t, grid) * mask
        return -(1j * k[0] * flux[0] + 1j * k[1] * flux[1])
    return rhs


def sqg_hamiltonian(theta: ScalarField) -> float:
    """``1/2 int theta (-Delta)^{-1/2} theta dx``."""
    g = theta.grid
    kmag = g.kmag.copy()
    kmag.flat[0] = np.inf
    return 0.5 * float(np.sum(g.hermitian_weights * np.abs(theta.hat) ** 2 / kmag) * g.volume)


def sqg2d_integrate(theta0: ScalarField, cfg: SolverConfig) -> Trajectory:
    grid = cfg.grid
    if theta0.grid != grid:
        raise ValueError("theta0 is not on the configured grid")
    notes = []
    th = theta0.hat.copy()
    if abs(th.flat[0]) > 1e-14 * max(1.0, float(np.abs(th).max())):
        notes.append(f"mean {th.flat[0].real:g} removed from theta0")
    th.flat[0] = 0.0
    th = _truncate(th, grid, notes, "theta0")
    vmax = float(np.max(np.abs(theta0.values)))  # Riesz transforms keep L^2; a rough bound
    cfg.cfl = cfg.dt * 2 * vmax / grid.spacing
    if cfg.cfl > 1:
        notes.append(f"CFL number {cfg.cfl:.3g} exceeds 1")

    def snapshot(y):
        return ScalarField(grid, hat=y)

    def diagnostics(y):
        t = snapshot(y)
        return {"l2": math.sqrt(inner(t, t)), "hamiltonian": sqg_hamiltonian(t),
                "helicity_x1": sqg_helicity(t, 0), "helicity_x2": sqg_helicity(t, 1)}

    return _run(cfg, th, sqg_rhs(grid), snapshot, diagnostics, notes)


def integrate(field0, cfg: SolverConfig) -> Trajectory:
    if cfg.system == "euler3d":
        return euler3d_integrate(field0, cfg)
    return sqg2d_integrate(field0, cfg)


def relative_drift(traj: Trajectory, key: str) -> float:
    """``max_t |q(t) - q(0)| / |q(0)|`` of a logged quantity."""
    q = traj.column(key)
    return float(np.max(np.abs(q - q[0])) / abs(q[0]))


def export_trajectory(traj: Trajectory, outdir, stem: str = "snap") -> Path:
    """Write one FLD1 file per snapshot plus ``manifest.json``."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    files = []
    for i, snap in enumerate(traj.series.snapshots):
        name = f"{stem}_{i:04d}.fld"
        write_field(outdir / name, snap)
        files.append(name)
    manifest = {"schema": "trajectory/1", "times": list(traj.series.times), "files": files,
                "config": traj.config.to_dict(), "log": traj.log, "notes": traj.notes}
    path = outdir / "manifest.json"
    atomic_write_json(path, manifest)
    return path
