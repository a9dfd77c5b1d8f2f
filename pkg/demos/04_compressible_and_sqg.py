"""Defect terms for compressible Euler and for SQG.

The compressible terms I1..I4 are computed on a manufactured state with a
density bounded away from zero.  The SQG terms I, II, III use a smooth
temperature and a rough one whose gradient is of cN type with 1/3
derivatives in L^{3/2}.

Run:  python demos/04_compressible_and_sqg.py
"""
# %%
import numpy as np

from helidiag.conservation import (PressureLaw, compressible_defect_scan, compressible_defects,
                                   pressure_commutator_scan, sqg_defect_scan, sqg_helicity,
                                   sqg_rough_theta)
from helidiag.core import Grid
from helidiag.scaling import geometric_scales
from helidiag.synth import (BesovFieldSpec, manufactured_compressible, random_band_limited,
                            random_besov_field)

law = PressureLaw.isentropic(5 / 3)
print(f"pressure law kappa = {law.kappa:.4f}, gamma = {law.gamma:.4f}")

# %% Compressible terms on a 32^3 manufactured state
# 32^3 keeps this quick; the slopes are not yet in the eps^2 regime (I2 is
# the slowest).  On 64^3 all four exceed 1.85.
grid = Grid(3, 32)
scales = geometric_scales(0.75, 1.08, 8)
scales = scales[scales >= 2 * grid.spacing]
one = manufactured_compressible(grid, 0.0, law)
print("rho = 1:", {k: f"{v:.1e}" for k, v in compressible_defects(one.rho, one.v, law, 0.5).items()})

state = manufactured_compressible(grid, 0.3, law, seed=1)
print(f"declared bounds {state.bounds}, sampled range "
      f"[{state.rho.values.min():.3f}, {state.rho.values.max():.3f}]")
for name, rep in compressible_defect_scan(state.rho, state.v, law, scales,
                                          bounds=state.bounds).items():
    print(f"  {name}: slope {rep.scan.fit.slope:.3f}")
rep = pressure_commutator_scan(state.rho, law, scales, bounds=state.bounds)
print("pressure commutator lhs/rhs:",
      np.array2string(rep.scan.values / np.array(rep.scan.meta["rhs"]), precision=3))

# %% SQG terms on 256^2
grid = Grid(2, 256)
scales = geometric_scales(0.75, 10 ** 0.125, 13)
scales = scales[scales >= 2 * grid.spacing]
smooth = random_band_limited(grid, 3, seed=4)
rough = sqg_rough_theta(random_besov_field(grid, BesovFieldSpec(1 / 3, 1.5, "cN_type", seed=0)))
for label, theta in (("smooth", smooth), ("rough cN", rough)):
    h = [sqg_helicity(theta, i) for i in (0, 1)]
    print(f"\n{label}: int theta d_i theta = {h[0]:.1e}, {h[1]:.1e}")
    for name, rep in sqg_defect_scan(theta, scales, 0).items():
        verdict, tslope = rep.scan.trend()
        print(f"  {name:7} slope {rep.scan.fit.slope:6.3f}  trend {verdict} ({tslope:+.2f})")
