"""From crystal dispersion to model parameters.

The interaction strength and range are set by the band curvature, the
band-edge frequency, and the atom-edge detuning.  This script maps a
device operating point onto (J, L), reports the total dissipation
including the structural photon loss, and finds the detuning that
maximizes J relative to it (self-consistently, since the localized-mode
coupling itself depends on the detuning through the range).

All frequencies below are in units of the free-space linewidth; the
numbers correspond to a suspended-waveguide regime with a 60 GHz
detuning at a 5 MHz linewidth.
"""

import pcwsim as pc

unit = 5e6   # Hz per linewidth, for the printout only

exp = pc.BandgapExperiment(
    detuning_band=12000.0,        # 60 GHz
    curvature=10.8,
    band_edge_freq=7.04e7,        # 352 THz optical carrier
    single_cell_coupling=591.0,
    photon_loss=2.0,
)
mapped = pc.map_experimental_params(exp, lattice_const=1.0,
                                    gamma_1d=9.1e-3, gamma_e_prime=1.0)
print(f"input detuning        : {exp.detuning_band:g}  ({exp.detuning_band*unit/1e9:.0f} GHz)")
print(f"interaction strength J: {mapped.j_strength:.4f}")
print(f"interaction range L   : {mapped.int_length:.1f} lattice constants")
print(f"localized-mode coupling: {mapped.cavity_coupling:.1f}")
print(f"total dissipation     : {mapped.gamma_total:.4f}")
print(f"best J/Gamma_tot      : {mapped.ratio_max:.3f} "
      f"at detuning {mapped.delta_opt:.0f} ({mapped.delta_opt*unit/1e9:.1f} GHz)")

print("\nreducing the detuning strengthens and lengthens the coupling:")
for delta in (12000.0, 6000.0, 3000.0):
    e = pc.BandgapExperiment(detuning_band=delta, curvature=10.8,
                             band_edge_freq=7.04e7,
                             single_cell_coupling=591.0, photon_loss=2.0)
    m = pc.map_experimental_params(e, 1.0, gamma_1d=9.1e-3)
    print(f"  delta={delta:7.0f}:  J={m.j_strength:.3f}  L={m.int_length:6.1f}")
