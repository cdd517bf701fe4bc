"""Input-output observables: transmission, reflection, photon correlations.

The output field past the chain is the input plus the field radiated by
the atomic coherences.  With the drive scaled out, the transmitted and
reflected lowering operators at the z = 0 reference point read

    a_T = 1 - i (G1d / 2 eps) sum_j sigma_ge^j exp(-i k0 m_j)
    a_R =   - i (G1d / 2 eps) sum_j sigma_ge^j exp(+i k0 m_j)

so every intensity below is already normalized to the incident one.
Intensities are detector-position independent; amplitudes carry a global
phase that drops out of T, R and g2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import LEVEL_E, ExcitationBasis, lowering_matrix
from .coherent import HamiltonianBlocks, SteadyAmplitudes, evolve_grid
from .errors import WeakReflectionError
from .model import AtomChain, PhysicalParams

__all__ = [
    "FieldAmplitudes",
    "transmission",
    "transmission_from_density",
    "g2_reflected",
    "g2_transmitted",
]

WEAK_SIGNAL_FLOOR = 1e-30  # on the squared normalized intensity (g2 denominator)


@dataclass(frozen=True)
class FieldAmplitudes:
    """Drive-normalized output amplitudes and intensities."""

    t_amp: complex
    r_amp: complex
    T: float
    R: float


def _output_weight(chain: AtomChain, params: PhysicalParams):
    eps = params.drive_amp
    if eps == 0:
        raise ValueError("drive_amp is zero: drive-normalized output undefined")
    half = 0.5 * params.gamma_1d / eps
    phases = np.exp(1j * params.k0_d * chain.positions.astype(np.float64))
    return half, phases


def transmission(amplitudes: SteadyAmplitudes, chain: AtomChain,
                 params: PhysicalParams) -> FieldAmplitudes:
    """Transmission/reflection of the steady state at leading drive order."""
    half, phases = _output_weight(chain, params)
    basis = amplitudes.basis
    e_slots = np.flatnonzero(basis.one_exc_levels == LEVEL_E)
    ce = amplitudes.c1[e_slots]
    atom_phase = phases[basis.one_exc_atoms[e_slots]]
    t_amp = 1.0 - 1j * half * np.sum(ce * np.conj(atom_phase))
    r_amp = -1j * half * np.sum(ce * atom_phase)
    return FieldAmplitudes(t_amp=complex(t_amp), r_amp=complex(r_amp),
                           T=float(abs(t_amp) ** 2), R=float(abs(r_amp) ** 2))


def transmission_from_density(rho: np.ndarray, chain: AtomChain,
                              params: PhysicalParams,
                              basis: ExcitationBasis) -> FieldAmplitudes:
    """Transmission/reflection from a density operator on the <=1-exc basis.

    Unlike the pure-state path this keeps the incoherent part of the
    scattered intensity through the two-point coherences <sigma_eg^j
    sigma_ge^k>, so T is not |t_amp|^2 when those do not factorize.
    """
    half, phases = _output_weight(chain, params)
    dim = basis.dim
    if rho.shape != (dim, dim):
        raise ValueError(f"rho must be {dim}x{dim}, got {rho.shape}")
    sl1 = basis.manifold_slices[1]
    e_slots = np.flatnonzero(basis.one_exc_levels == LEVEL_E) + sl1.start
    atom_phase = phases[basis.one_exc_atoms[
        np.flatnonzero(basis.one_exc_levels == LEVEL_E)]]
    v = rho[e_slots, 0]                      # <e_a| rho |g>
    pee = rho[np.ix_(e_slots, e_slots)]      # <e_a| rho |e_b>
    t_amp = 1.0 - 1j * half * np.sum(v * np.conj(atom_phase))
    r_amp = -1j * half * np.sum(v * atom_phase)
    # intensities: 1 + interference with the mean field + full quadratic term;
    # the transmitted quadratic form carries the drive phases, the
    # reflected one their conjugates
    t_quad = half**2 * np.real(np.vdot(atom_phase, pee @ atom_phase))
    r_quad = half**2 * np.real(np.vdot(np.conj(atom_phase),
                                       pee @ np.conj(atom_phase)))
    t_int = 2.0 * np.real(-1j * half * np.sum(v * np.conj(atom_phase)))
    return FieldAmplitudes(t_amp=complex(t_amp), r_amp=complex(r_amp),
                           T=float(1.0 + t_int + t_quad), R=float(r_quad))


def _g2_output(blocks: HamiltonianBlocks, amplitudes: SteadyAmplitudes,
               chain: AtomChain, params: PhysicalParams,
               tau_grid: np.ndarray, reflected: bool) -> np.ndarray:
    """Second-order correlation of one output field along a tau grid.

    Two-photon detection amplitude: apply the output lowering operator,
    evolve the conditional state under the full Hamiltonian (the drive
    refills the chain), apply it again.  Everything is kept to leading
    nonvanishing drive order, at which the incident coherent state drops
    out of g2 entirely.
    """
    half, phases = _output_weight(chain, params)
    basis = amplitudes.basis
    coeffs = phases if reflected else np.conj(phases)
    b_out = -1j * half * lowering_matrix(basis, coeffs)
    if not reflected:
        b_out = b_out + np.eye(basis.dim)

    psi = np.zeros(basis.dim, dtype=np.complex128)
    psi[0] = amplitudes.c0
    sl1 = basis.manifold_slices[1] if basis.max_exc >= 1 else slice(0, 0)
    psi[sl1] = amplitudes.c1
    if amplitudes.c2 is not None and basis.max_exc >= 2:
        psi[basis.manifold_slices[2]] = amplitudes.c2

    phi = b_out @ psi
    intensity = float(np.vdot(phi, phi).real)
    den = intensity**2
    if den < WEAK_SIGNAL_FLOOR:
        raise WeakReflectionError(
            f"output intensity {intensity:.3g} at delta={blocks.delta:g} is "
            "too weak to normalize g2")
    evolved = evolve_grid(blocks, phi, tau_grid)
    num = np.sum(np.abs(b_out @ evolved) ** 2, axis=0)
    return num / den


def g2_reflected(blocks: HamiltonianBlocks, amplitudes: SteadyAmplitudes,
                 chain: AtomChain, params: PhysicalParams,
                 tau_grid: np.ndarray) -> np.ndarray:
    """g2(tau) of the reflected field at the working detuning of ``blocks``."""
    tau_grid = np.asarray(tau_grid, dtype=np.float64)
    return _g2_output(blocks, amplitudes, chain, params, tau_grid,
                      reflected=True)


def g2_transmitted(blocks: HamiltonianBlocks, amplitudes: SteadyAmplitudes,
                   chain: AtomChain, params: PhysicalParams,
                   tau_grid: np.ndarray) -> np.ndarray:
    """g2(tau) of the transmitted field (coherent background included)."""
    tau_grid = np.asarray(tau_grid, dtype=np.float64)
    return _g2_output(blocks, amplitudes, chain, params, tau_grid,
                      reflected=False)
