"""Photon transport through a disordered atom chain on a photonic-crystal waveguide.

A numpy/scipy library for the steady-state optics of weakly driven
Lambda-type atoms randomly trapped along a one-dimensional waveguide
whose band gap mediates tunable long-range atom-atom interactions:
ensemble-averaged transmission/reflection spectra, master-equation
dephasing studies, dip analysis (atom-number and interaction-strength
metrology), and photon-photon correlations of the scattered field.
"""

from .analysis import (Dip, DipReport, LinearFit, analyze_spectrum,
                       dominant_beat_frequency, eit_metrics, find_dips,
                       fit_omega_vs_n, locate_omega_max, mean_dip_spacing)
from .basis import (LEVEL_E, LEVEL_S, ExcitationBasis, apply_lowering,
                    enumerate_basis)
from .coherent import (HamiltonianBlocks, SteadyAmplitudes, build_blocks,
                       evolve, evolve_grid, full_hamiltonian, solve_steady,
                       spectrum_amplitudes)
from .ensemble import (EnsembleSpec, G2Result, SpectrumResult, run_ensemble,
                       run_g2_ensemble, sample_rng)
from .errors import (ConfigError, DegenerateSteadyStateError,
                     EnsembleFailureError, PcwsimError, SolverError,
                     WeakReflectionError)
from .lindblad import (Liouvillian, build_liouvillian, spectrum_from_master,
                       steady_density)
from .model import (AtomChain, BandgapExperiment, MappedParams,
                    PhysicalParams, bandgap_kernel, map_experimental_params,
                    sample_chain, sample_ih_shifts, sample_poisson_count,
                    sample_positions, waveguide_kernel)
from .observables import (FieldAmplitudes, g2_reflected, g2_transmitted,
                          transmission, transmission_from_density)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # model
    "PhysicalParams", "AtomChain", "BandgapExperiment", "MappedParams",
    "sample_positions", "sample_poisson_count", "sample_ih_shifts",
    "sample_chain", "waveguide_kernel", "bandgap_kernel",
    "map_experimental_params",
    # basis
    "LEVEL_E", "LEVEL_S", "ExcitationBasis", "enumerate_basis",
    "apply_lowering",
    # coherent solver
    "HamiltonianBlocks", "SteadyAmplitudes", "build_blocks", "solve_steady",
    "full_hamiltonian", "evolve", "evolve_grid", "spectrum_amplitudes",
    # lindblad solver
    "Liouvillian", "build_liouvillian", "steady_density",
    "spectrum_from_master",
    # observables
    "FieldAmplitudes", "transmission", "transmission_from_density",
    "g2_reflected", "g2_transmitted",
    # ensemble
    "EnsembleSpec", "SpectrumResult", "G2Result", "run_ensemble",
    "run_g2_ensemble", "sample_rng",
    # analysis
    "Dip", "DipReport", "LinearFit", "find_dips", "locate_omega_max",
    "eit_metrics", "mean_dip_spacing", "fit_omega_vs_n", "analyze_spectrum",
    "dominant_beat_frequency",
    # errors
    "PcwsimError", "SolverError", "DegenerateSteadyStateError",
    "WeakReflectionError", "EnsembleFailureError", "ConfigError",
]
