"""Single-emitter transmission: the textbook check.

A lone two-level atom side-coupled to the guide imprints a Lorentzian
dip on the probe, t(D) = (D + i/2) / (D + i(1 + G1d)/2) in units of the
free-space linewidth.  This script compares the solver against that
closed form and then switches the control field on to show the
transparency window opening at two-photon resonance.
"""

import numpy as np

import pcwsim as pc

deltas = np.linspace(-6, 6, 241)
chain = pc.AtomChain(positions=[0], ih_shifts=[0.0])

two_level = pc.PhysicalParams(omega_c=0.0, j_strength=0.0)
t_amp, r_amp = pc.spectrum_amplitudes(chain, two_level, deltas)
oracle = (deltas + 0.5j) / (deltas + 0.5j * 1.3)
print("two-level atom vs analytic lineshape")
print(f"  max |T - oracle| = {np.max(np.abs(np.abs(t_amp)**2 - np.abs(oracle)**2)):.3e}")
print(f"  T(0) = {abs(t_amp[120])**2:.6f}   R(0) = {abs(r_amp[120])**2:.6f}")

lam = pc.PhysicalParams(j_strength=0.0)   # control field on, Omega_c = 2
t_eit, _ = pc.spectrum_amplitudes(chain, lam, deltas)
print("\ncontrol field on (Lambda atom): transparency at two-photon resonance")
print(f"  T(0) = {abs(t_eit[120])**2:.12f}")
print("\n  delta      T(two-level)   T(Lambda)")
for i in range(0, deltas.size, 24):
    print(f"  {deltas[i]:+6.2f}   {abs(t_amp[i])**2:12.4f}   {abs(t_eit[i])**2:9.4f}")
