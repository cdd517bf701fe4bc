"""Physical parameters, disorder sampling, and interaction kernels.

Working units: the free-space decay rate of the excited level sets the
frequency scale (gamma_e_prime = 1) and the trap lattice constant d sets
the length scale.  The drive never appears separately from the waveguide
coupling; everything is expressed through the dimensionless amplitude
``drive_amp`` and all reported observables are drive-normalized.

An atom chain is one disorder realization: a strictly increasing set of
occupied lattice sites (at most one atom per trap) plus a per-atom shift
of the lower-level transition drawn from a Gaussian of width sigma_ih.

Two kernels govern the collective physics:

* waveguide kernel  exp(i * k0_d * |m_j - m_k|)  (guided-mode exchange,
  anti-Hermitian part = collective emission),
* band-gap kernel   cos(kb_d*m_j) * cos(kb_d*m_k) * exp(-|m_j - m_k| / L)
  (evanescent-mode-mediated coherent coupling of strength j_strength,
  self-terms included).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SolverError

__all__ = [
    "PhysicalParams",
    "AtomChain",
    "BandgapExperiment",
    "MappedParams",
    "sample_positions",
    "sample_poisson_count",
    "sample_ih_shifts",
    "sample_chain",
    "waveguide_kernel",
    "bandgap_kernel",
    "map_experimental_params",
]

MAX_DRIVE_AMP = 0.01  # weak-drive validity ceiling for the perturbative solvers


@dataclass(frozen=True)
class PhysicalParams:
    """All rates, couplings and geometry constants, in units of gamma_e_prime.

    Defaults are the standard operating point used throughout the tests:
    Gamma_1D = 0.3, J = 4, L = 100 d, Omega_c = 2, Delta_c = 0,
    k0*d = pi/2, kb*d = pi, N = 200 lattice sites.
    """

    gamma_1d: float = 0.3          # waveguide (guided-mode) coupling rate
    gamma_e_prime: float = 1.0     # free-space decay of |e>, the unit
    j_strength: float = 4.0        # band-gap interaction strength J
    int_length: float = 100.0      # interaction range L, in lattice constants
    omega_c: float = 2.0           # control Rabi frequency
    delta_c: float = 0.0           # control detuning
    k0_d: float = math.pi / 2      # probe wavevector x lattice constant
    kb_d: float = math.pi          # band-edge wavevector x lattice constant
    gamma_d: float = 0.0           # dephasing rate of the two lower levels
    gamma_em: float = 0.0          # band-edge-mode loss rate (collective channel)
    sigma_ih: float = 0.0          # inhomogeneous broadening std of |e>-|s>
    drive_amp: float = 1.5e-5      # dimensionless drive eps = sqrt(c*G1d/2)*E
    n_sites: int = 200             # lattice size N

    def __post_init__(self):
        for name in ("gamma_1d", "gamma_e_prime", "gamma_d", "gamma_em",
                     "sigma_ih", "drive_amp"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")
        if not 0 < self.k0_d < 2 * math.pi:
            raise ValueError(f"k0_d must lie in (0, 2*pi), got {self.k0_d}")
        if self.int_length <= 0:
            raise ValueError(f"int_length must be > 0, got {self.int_length}")
        if self.drive_amp > MAX_DRIVE_AMP:
            raise ValueError(
                f"drive_amp={self.drive_amp} exceeds the weak-drive ceiling "
                f"{MAX_DRIVE_AMP}; observables are drive-normalized, so lower "
                "it rather than raising it")
        if self.n_sites < 1:
            raise ValueError(f"n_sites must be >= 1, got {self.n_sites}")


@dataclass(frozen=True, eq=False)
class AtomChain:
    """One disorder realization: occupied sites and per-atom level shifts."""

    positions: np.ndarray   # strictly increasing lattice indices m_j
    ih_shifts: np.ndarray   # per-atom shift of the |e>-|s> transition

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=np.int64)
        shifts = np.asarray(self.ih_shifts, dtype=np.float64)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "ih_shifts", shifts)
        if pos.ndim != 1 or shifts.ndim != 1:
            raise ValueError("positions and ih_shifts must be 1-d")
        if pos.size and pos[0] < 0:
            raise ValueError("lattice indices must be >= 0")
        if pos.size > 1 and not np.all(np.diff(pos) > 0):
            raise ValueError("positions must be strictly increasing")
        if shifts.size != pos.size:
            raise ValueError(
                f"ih_shifts has length {shifts.size}, expected {pos.size}")

    @property
    def n_atoms(self) -> int:
        return int(self.positions.size)


@dataclass(frozen=True)
class BandgapExperiment:
    """Dispersion-engineering inputs that set J and L in a real device.

    ``cavity_coupling`` (the single-atom coupling to the localized
    band-edge mode) may be left as None, in which case it is derived from
    the single-cell coupling as g_d * sqrt(d / L).
    """

    detuning_band: float            # delta = omega_a - omega_b > 0, in the gap
    curvature: float                # dimensionless band curvature alpha
    band_edge_freq: float           # omega_b
    single_cell_coupling: float     # g_d, vacuum Rabi splitting of one cell
    photon_loss: float = 0.0        # kappa, structural loss of the crystal
    cavity_coupling: float | None = None  # gbar_c; derived when None

    def __post_init__(self):
        if self.detuning_band <= 0:
            raise ValueError("detuning_band must be > 0 (atom inside the gap)")
        if self.curvature <= 0:
            raise ValueError("curvature must be > 0")
        if self.photon_loss < 0:
            raise ValueError("photon_loss must be >= 0")


@dataclass(frozen=True)
class MappedParams:
    """Result of mapping a band-gap experiment onto model parameters."""

    j_strength: float        # J at the input detuning
    int_length: float        # L at the input detuning, same unit as d
    gamma_total: float       # total effective dissipation of one excited atom
    ratio_max: float         # best achievable J / Gamma_tot over detuning
    delta_opt: float         # detuning realizing ratio_max (self-consistent)
    cavity_coupling: float   # gbar_c actually used at the input detuning


# ---------------------------------------------------------------------------
# disorder samplers
# ---------------------------------------------------------------------------

def sample_positions(n: int, n_sites: int, rng: np.random.Generator) -> np.ndarray:
    """Draw a uniformly random n-subset of {0..n_sites-1}, sorted.

    Deterministic for a given generator state; at most one atom per site.
    """
    if n < 0:
        raise ValueError(f"atom count must be >= 0, got {n}")
    if n > n_sites:
        raise ValueError(f"cannot place {n} atoms on {n_sites} sites")
    pos = rng.choice(n_sites, size=n, replace=False)
    pos.sort()
    return pos.astype(np.int64)


def sample_poisson_count(mean: float, n_sites: int, rng: np.random.Generator) -> int:
    """Poisson atom number conditioned on fitting the lattice (resample on overflow)."""
    if mean <= 0:
        raise ValueError(f"poisson mean must be > 0, got {mean}")
    while True:
        n = int(rng.poisson(mean))
        if n <= n_sites:
            return n


def sample_ih_shifts(n: int, sigma_ih: float, rng: np.random.Generator) -> np.ndarray:
    """n i.i.d. normal(0, sigma_ih^2) shifts of the |e>-|s> transition."""
    if sigma_ih < 0:
        raise ValueError(f"sigma_ih must be >= 0, got {sigma_ih}")
    if sigma_ih == 0.0:
        return np.zeros(n)
    return rng.normal(0.0, sigma_ih, size=n)


def sample_chain(params: PhysicalParams, rng: np.random.Generator,
                 n: int | None = None, n_mean: float | None = None) -> AtomChain:
    """Draw one full disorder realization.

    Fixed call sequence (count, positions, shifts) so that identical
    generator states reproduce identical chains bit for bit.
    """
    if (n is None) == (n_mean is None):
        raise ValueError("exactly one of n, n_mean must be given")
    if n is None:
        n = sample_poisson_count(n_mean, params.n_sites, rng)
    positions = sample_positions(n, params.n_sites, rng)
    shifts = sample_ih_shifts(n, params.sigma_ih, rng)
    return AtomChain(positions=positions, ih_shifts=shifts)


# ---------------------------------------------------------------------------
# interaction kernels
# ---------------------------------------------------------------------------

def waveguide_kernel(chain: AtomChain, params: PhysicalParams) -> np.ndarray:
    """Guided-mode exchange kernel exp(i * k0_d * |m_j - m_k|).

    Symmetric (not Hermitian) with unit diagonal; its real part is the
    positive-semidefinite collective-emission kernel.
    """
    m = chain.positions.astype(np.float64)
    sep = np.abs(m[:, None] - m[None, :])
    return np.exp(1j * params.k0_d * sep)


def bandgap_kernel(chain: AtomChain, params: PhysicalParams) -> np.ndarray:
    """Evanescent-mode kernel cos(kb m_j) cos(kb m_k) exp(-|m_j - m_k| / L).

    Self-terms (j = k) are included: they provide the uniform diagonal
    shift cos^2(kb m_j), and with them the kernel is rank-one in the
    L -> infinity limit with single nonzero eigenvalue n.
    """
    m = chain.positions.astype(np.float64)
    sep = np.abs(m[:, None] - m[None, :])
    signs = np.cos(params.kb_d * m)
    return signs[:, None] * signs[None, :] * np.exp(-sep / params.int_length)


# ---------------------------------------------------------------------------
# experimental parameter mapping
# ---------------------------------------------------------------------------

def _interaction_length(exp: BandgapExperiment, lattice_const: float,
                        delta: float) -> float:
    # L = sqrt(alpha * omega_b / (k_b^2 * delta)) with k_b = pi / d
    return (lattice_const / math.pi) * math.sqrt(
        exp.curvature * exp.band_edge_freq / delta)


def _cavity_coupling(exp: BandgapExperiment, lattice_const: float,
                     delta: float) -> float:
    length = _interaction_length(exp, lattice_const, delta)
    return exp.single_cell_coupling * math.sqrt(lattice_const / length)


def map_experimental_params(exp: BandgapExperiment, lattice_const: float,
                            gamma_1d: float = 0.3,
                            gamma_e_prime: float = 1.0,
                            max_iter: int = 200,
                            rtol: float = 1e-12) -> MappedParams:
    """Map dispersion-engineering inputs onto (J, L, Gamma_tot, best J/Gamma_tot).

    All frequencies (detuning_band, band_edge_freq, couplings, photon_loss,
    gamma_1d, gamma_e_prime) must share one consistent angular-frequency
    unit; lattice_const sets the unit of L.

    J = gbar_c^2 / (2 delta) and L = sqrt(alpha omega_b / (k_b^2 delta)) at
    the input detuning.  Gamma_tot = Gamma_1D + Gamma_e' + kappa (gbar_c /
    2 delta)^2.  The best ratio J / Gamma_tot over detuning satisfies
    delta^2 = kappa gbar_c(delta)^2 / (4 Gamma) with Gamma = Gamma_1D +
    Gamma_e'; because gbar_c itself depends on delta through L, the
    optimum is found by fixed-point iteration.
    """
    if lattice_const <= 0:
        raise ValueError("lattice_const must be > 0")
    delta = exp.detuning_band
    length = _interaction_length(exp, lattice_const, delta)
    gbar = exp.cavity_coupling
    if gbar is None:
        gbar = _cavity_coupling(exp, lattice_const, delta)
    j_strength = gbar**2 / (2.0 * delta)
    gamma_total = gamma_1d + gamma_e_prime + exp.photon_loss * (gbar / (2 * delta))**2

    gamma = gamma_1d + gamma_e_prime
    kappa = exp.photon_loss
    if kappa == 0.0:
        # lossless crystal: the ratio grows without bound as delta -> 0
        return MappedParams(j_strength, length, gamma_total,
                            math.inf, 0.0, gbar)

    d_opt = delta
    for _ in range(max_iter):
        g_here = _cavity_coupling(exp, lattice_const, d_opt)
        d_next = math.sqrt(kappa * g_here**2 / (4.0 * gamma))
        if abs(d_next - d_opt) <= rtol * d_opt:
            d_opt = d_next
            break
        d_opt = d_next
    else:
        raise SolverError(
            f"optimal-detuning fixed point did not converge after {max_iter} "
            f"iterations (last delta = {d_opt:g})")
    g_opt = _cavity_coupling(exp, lattice_const, d_opt)
    ratio_max = math.sqrt(g_opt**2 / (kappa * gamma)) / 2.0
    return MappedParams(j_strength, length, gamma_total, ratio_max, d_opt, gbar)
