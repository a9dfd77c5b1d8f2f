"""Dyadic profiles of synthetic rough fields.

Two fields share the same smoothness index alpha = 1/3 in L^3.  One keeps
its compensated block norms 2^{j alpha} ||Delta_j f||_3 level across
scales; the other lets them drift to zero like 1/(1+j).  The profile
verdicts ("flat" vs "decaying") are what the rest of the package calls the
inf-type and cN-type classes.

Run:  python demos/01_besov_profiles.py
"""
# %%
import numpy as np

from helidiag.core import Grid
from helidiag.littlewood_paley import (DyadicPartition, cN_profile, default_difference_scales,
                                       finite_difference_modulus)
from helidiag.synth import BesovFieldSpec, random_besov_field

grid = Grid(2, 512)
part = DyadicPartition(grid)
print(f"grid {grid.n}^2, blocks j = {part.j_min}..{part.j_max}, "
      f"partition covers {part.covered[0]:.3g} <= |k| <= {part.covered[1]:.3g}")

# %% Compensated block norms
fields = {v: random_besov_field(grid, BesovFieldSpec(1 / 3, 3, v, seed=1))
          for v in ("infinity_type", "cN_type")}
profiles = {v: cN_profile(f, 1 / 3, 3) for v, f in fields.items()}

print("\n  j   inf-type   cN-type   1/(1+j)")
p_inf, p_cn = profiles["infinity_type"], profiles["cN_type"]
for j, a, b in zip(p_inf.j, p_inf.compensated, p_cn.compensated):
    ref = 1 / (1 + j) if j >= 0 else float("nan")
    print(f"{j:3d}  {a:9.4f}  {b:8.4f}  {ref:8.4f}")
for v, prof in profiles.items():
    print(f"{v:>14}: verdict {prof.verdict}, slope over blocks {prof.meta['fit_blocks']} "
          f"= {prof.slope:+.3f}")

# %% The same classes seen through finite differences
# The modulus sup_y ||f(.-y) - f||_3 / |y|^alpha should stay within a fixed
# factor of the largest compensated block norm.
scales = default_difference_scales(grid)
print("\n  |y|      inf ratio   cN ratio")
mods = {v: finite_difference_modulus(f, 1 / 3, 3, scales) for v, f in fields.items()}
for i, r in enumerate(scales):
    a = mods["infinity_type"].values[i] / p_inf.compensated.max()
    b = mods["cN_type"].values[i] / p_cn.compensated.max()
    print(f"{r:7.4f}  {a:9.3f}  {b:9.3f}")
print("difference-modulus trends:",
      {v: m.trend()[0] for v, m in mods.items()})
