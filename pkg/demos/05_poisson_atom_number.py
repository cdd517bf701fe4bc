"""Reading the interaction strength off a comb of dips.

When the atom number fluctuates shot to shot (Poisson loading), the
long-range limit turns the averaged spectrum into a comb: each count n
contributes its own dip near n*J, so adjacent dips sit J apart.  With
a finite range the comb washes into one broad dip whose position still
scales linearly with the mean atom number.
"""

import numpy as np

import pcwsim as pc

print("long-range limit: comb spacing vs interaction strength (M=1500)")
grid = -10.0 + 0.1 * np.arange(701)
for j in (2.0, 4.0):
    params = pc.PhysicalParams(int_length=1e4, j_strength=j)
    spec = pc.EnsembleSpec(mode="poisson", n_mean=10.0, samples=1500,
                           delta_grid=grid, master_seed=3)
    res = pc.run_ensemble(spec, params, workers=4)
    dips = pc.find_dips(res.delta, res.t_mean, prominence=0.01,
                        min_depth=0.02)
    window = (10 * j - 4 * j, 10 * j + 4 * j)
    spacing = pc.mean_dip_spacing(dips, window)
    locs = [f"{d.location:.1f}" for d in dips if window[0] <= d.location <= window[1]]
    print(f"  J={j:g}: dips at {', '.join(locs)}")
    print(f"        mean spacing S = {spacing:.3f}  (S/J = {spacing/j:.3f})")

print("\nfinite range L=100: broad dip tracks the mean atom number (M=1500)")
grid_wide = -10.0 + 0.1 * np.arange(1401)
points = []
for n_mean in (10.0, 20.0, 30.0):
    params = pc.PhysicalParams()
    spec = pc.EnsembleSpec(mode="poisson", n_mean=n_mean, samples=1500,
                           delta_grid=grid_wide, master_seed=8)
    res = pc.run_ensemble(spec, params, workers=4)
    dips = pc.find_dips(res.delta, res.t_mean, prominence=0.005,
                        min_depth=0.02)
    loc = pc.locate_omega_max(dips, min_depth=0.02)
    points.append((n_mean, loc))
    print(f"  n_mean={n_mean:4.1f}: omega_max = "
          + ("none" if loc is None else f"{loc:.1f}"))
fit = pc.fit_omega_vs_n([(n, w) for n, w in points if w is not None])
print(f"  -> linear fit slope {fit.slope:.2f}, r^2 = {fit.r_squared:.4f}")
