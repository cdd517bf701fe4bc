"""Non-Hermitian Hamiltonian blocks and the weak-drive steady state.

The driven chain is treated perturbatively in the drive amplitude eps:
the ground amplitude stays at 1, the single-excitation amplitudes c1 are
O(eps) and solve h1 c1 = -d01, and (when the basis is truncated at two
excitations) the double-excitation amplitudes c2 are O(eps^2) and solve
h2 c2 = -d12 c1.  All decay channels live in the anti-Hermitian parts of
the blocks, so no density matrix is needed at this order.

The probe detuning enters every excited diagonal as -Delta per excited
atom.  That makes the Delta-independent part of each block reusable
across a detuning grid: one eigendecomposition per disorder realization
yields the whole transmission spectrum through the resolvent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.integrate
import scipy.linalg

from .basis import LEVEL_E, LEVEL_S, ExcitationBasis, enumerate_basis
from .errors import SolverError
from .model import AtomChain, PhysicalParams, bandgap_kernel, waveguide_kernel

__all__ = [
    "HamiltonianBlocks",
    "SteadyAmplitudes",
    "build_blocks",
    "solve_steady",
    "full_hamiltonian",
    "evolve",
    "evolve_grid",
    "spectrum_amplitudes",
]

COND_LIMIT = 1e12        # solves beyond this are treated as singular
EIG_COND_LIMIT = 1e10    # eigenvector conditioning for spectral shortcuts
_RESIDUAL_TOL = 1e-8     # acceptance for minimum-norm solutions of
                         # consistent singular systems (decoupled levels)


@dataclass(frozen=True, eq=False)
class HamiltonianBlocks:
    """Hamiltonian of one disorder realization on the truncated basis.

    h1/h2 act within the one- and two-excitation manifolds; d01/d12 are
    the drive couplings between adjacent manifolds (proportional to the
    drive amplitude).  h2/d12 are None when the basis stops at one
    excitation.
    """

    h1: np.ndarray
    h2: np.ndarray | None
    d01: np.ndarray
    d12: np.ndarray | None
    delta: float
    basis: ExcitationBasis
    chain: AtomChain
    params: PhysicalParams


@dataclass(frozen=True, eq=False)
class SteadyAmplitudes:
    """Perturbative steady-state amplitudes (c0 = 1 by convention)."""

    c0: complex
    c1: np.ndarray
    c2: np.ndarray | None
    valid: bool
    basis: ExcitationBasis


def coupling_matrix(chain: AtomChain, params: PhysicalParams) -> np.ndarray:
    """Atom-atom coupling G_jk entering every e-e matrix element.

    Combines the band-gap exchange (with its loss channel folded in as
    j_strength - i*gamma_em/2) and the guided-mode exchange; the j = k
    entries carry the kernel self-terms but not the free-space width.
    """
    j_complex = params.j_strength - 0.5j * params.gamma_em
    return (j_complex * bandgap_kernel(chain, params)
            - 0.5j * params.gamma_1d * waveguide_kernel(chain, params))


def drive_phases(chain: AtomChain, params: PhysicalParams) -> np.ndarray:
    """Per-atom drive phase factors exp(i * k0_d * m_j)."""
    return np.exp(1j * params.k0_d * chain.positions.astype(np.float64))


def _one_exc_matrix(chain: AtomChain, params: PhysicalParams,
                    basis: ExcitationBasis) -> np.ndarray:
    """Delta-independent part A1 of the one-excitation block, h1 = A1 - Delta*I."""
    n = chain.n_atoms
    dim1 = 2 * n
    atoms = basis.one_exc_atoms
    levels = basis.one_exc_levels
    e_slots = np.flatnonzero(levels == LEVEL_E)
    s_slots = np.flatnonzero(levels == LEVEL_S)
    a1 = np.zeros((dim1, dim1), dtype=np.complex128)
    if n == 0:
        return a1
    g = coupling_matrix(chain, params)
    a1[np.ix_(e_slots, e_slots)] = g[np.ix_(atoms[e_slots], atoms[e_slots])]
    a1[e_slots, e_slots] += -0.5j * params.gamma_e_prime
    a1[s_slots, s_slots] = params.delta_c + chain.ih_shifts[atoms[s_slots]]
    # control field couples |e_j> and |s_j> of the same atom
    for ea in e_slots:
        sa = s_slots[np.searchsorted(atoms[s_slots], atoms[ea])]
        a1[ea, sa] = -params.omega_c
        a1[sa, ea] = -params.omega_c
    return a1


def _two_exc_matrix(chain: AtomChain, params: PhysicalParams,
                    basis: ExcitationBasis) -> np.ndarray:
    """Delta-independent part A2 of the two-excitation block, h2 = A2 - 2*Delta*I.

    Two-excitation states are hard-core: a single atom never hosts two
    excitations, so the exchange term moves an e excitation between
    atoms that are not otherwise occupied.
    """
    n = chain.n_atoms
    g = coupling_matrix(chain, params)
    sl2 = basis.manifold_slices[2]
    states2 = basis.states[sl2]
    offset = sl2.start
    dim2 = len(states2)
    a2 = np.zeros((dim2, dim2), dtype=np.complex128)
    index = basis.index
    for i, state in enumerate(states2):
        diag = 0.0 + 0.0j
        atoms_here = tuple(a for a, _ in state)
        for (a, level) in state:
            if level == LEVEL_E:
                diag += g[a, a] - 0.5j * params.gamma_e_prime
            else:
                diag += params.delta_c + chain.ih_shifts[a]
            # control field flips e <-> s on one atom
            flipped = tuple(sorted(
                (p if p[0] != a else (a, 1 - level)) for p in state))
            a2[index[flipped] - offset, i] += -params.omega_c
        a2[i, i] += diag
        # exchange: move an e excitation from atom b to an unoccupied atom
        for (b, level) in state:
            if level != LEVEL_E:
                continue
            rest = tuple(p for p in state if p[0] != b)
            for a in range(n):
                if a == b or a in atoms_here:
                    continue
                new = tuple(sorted(rest + ((a, LEVEL_E),)))
                a2[index[new] - offset, i] += g[a, b]
    return a2


def _drive_one(chain: AtomChain, params: PhysicalParams,
               basis: ExcitationBasis) -> np.ndarray:
    """Drive vector d01: <1exc| H_drive |ground>, proportional to eps."""
    phases = drive_phases(chain, params)
    d01 = np.zeros(2 * chain.n_atoms, dtype=np.complex128)
    e_slots = np.flatnonzero(basis.one_exc_levels == LEVEL_E)
    d01[e_slots] = params.drive_amp * phases[basis.one_exc_atoms[e_slots]]
    return d01


def _drive_two(chain: AtomChain, params: PhysicalParams,
               basis: ExcitationBasis) -> np.ndarray:
    """Drive matrix d12: <2exc| H_drive |1exc>, proportional to eps."""
    phases = drive_phases(chain, params)
    sl1 = basis.manifold_slices[1]
    sl2 = basis.manifold_slices[2]
    states1 = basis.states[sl1]
    dim1, dim2 = len(states1), sl2.stop - sl2.start
    d12 = np.zeros((dim2, dim1), dtype=np.complex128)
    index = basis.index
    for i1, state in enumerate(states1):
        (k, _level), = state
        for a in range(chain.n_atoms):
            if a == k:
                continue
            new = tuple(sorted(state + ((a, LEVEL_E),)))
            d12[index[new] - sl2.start, i1] += params.drive_amp * phases[a]
    return d12


def build_blocks(chain: AtomChain, params: PhysicalParams, delta: float,
                 basis: ExcitationBasis) -> HamiltonianBlocks:
    """Assemble the Hamiltonian blocks at probe detuning delta."""
    if basis.n_atoms != chain.n_atoms:
        raise ValueError(
            f"basis enumerates {basis.n_atoms} atoms, chain has {chain.n_atoms}")
    dim1 = 2 * chain.n_atoms
    h1 = _one_exc_matrix(chain, params, basis) - delta * np.eye(dim1)
    d01 = _drive_one(chain, params, basis)
    h2 = d12 = None
    if basis.max_exc >= 2:
        sl2 = basis.manifold_slices[2]
        dim2 = sl2.stop - sl2.start
        h2 = (_two_exc_matrix(chain, params, basis)
              - 2.0 * delta * np.eye(dim2))
        d12 = _drive_two(chain, params, basis)
    return HamiltonianBlocks(h1=h1, h2=h2, d01=d01, d12=d12, delta=delta,
                             basis=basis, chain=chain, params=params)


def _solve_checked(mat: np.ndarray, rhs: np.ndarray, delta: float) -> np.ndarray:
    """Linear solve with a conditioning gate.

    Well-conditioned systems go through the direct solver.  Singular but
    consistent systems (decoupled dark levels carry zero drive) are
    resolved by the minimum-norm least-squares solution; a nonvanishing
    residual means the steady state does not exist at this detuning and
    raises SolverError.
    """
    if mat.size == 0:
        return np.zeros(0, dtype=np.complex128)
    cond = np.linalg.cond(mat)
    if np.isfinite(cond) and cond <= COND_LIMIT:
        return np.linalg.solve(mat, rhs)
    sol, *_ = np.linalg.lstsq(mat, rhs, rcond=None)
    scale = max(np.linalg.norm(rhs), np.finfo(float).tiny)
    residual = np.linalg.norm(mat @ sol - rhs)
    if residual > _RESIDUAL_TOL * scale:
        raise SolverError(
            f"steady-state solve is singular at delta={delta:g} "
            f"(cond={cond:.3g}, residual={residual:.3g})", delta=delta)
    return sol


def solve_steady(blocks: HamiltonianBlocks) -> SteadyAmplitudes:
    """Order-by-order steady state: c0 = 1, h1 c1 = -d01, h2 c2 = -d12 c1."""
    c1 = _solve_checked(blocks.h1, -blocks.d01, blocks.delta)
    c2 = None
    if blocks.h2 is not None:
        c2 = _solve_checked(blocks.h2, -(blocks.d12 @ c1), blocks.delta)
    norm1 = np.linalg.norm(c1)
    valid = bool(np.all(np.isfinite(c1)) and norm1 < 0.1)
    if c2 is not None:
        valid = valid and bool(np.all(np.isfinite(c2)))
    return SteadyAmplitudes(c0=1.0 + 0.0j, c1=c1, c2=c2, valid=valid,
                            basis=blocks.basis)


def full_hamiltonian(blocks: HamiltonianBlocks) -> np.ndarray:
    """Dense Hamiltonian on the whole truncated basis, drive included."""
    basis = blocks.basis
    dim = basis.dim
    h = np.zeros((dim, dim), dtype=np.complex128)
    sl1 = basis.manifold_slices[1] if basis.max_exc >= 1 else slice(0, 0)
    h[sl1, sl1] = blocks.h1
    h[sl1, 0] = blocks.d01
    h[0, sl1] = np.conj(blocks.d01)
    if blocks.h2 is not None:
        sl2 = basis.manifold_slices[2]
        h[sl2, sl2] = blocks.h2
        h[sl2, sl1] = blocks.d12
        h[sl1, sl2] = np.conj(blocks.d12).T
    return h


def _evolve_by_ode(h: np.ndarray, state: np.ndarray,
                   taus: np.ndarray) -> np.ndarray:
    """Adaptive integration fallback for non-diagonalizable Hamiltonians."""
    def rhs(_t, y):
        return -1j * (h @ y)

    t_end = float(taus[-1]) if taus.size else 0.0
    sol = scipy.integrate.solve_ivp(
        rhs, (0.0, t_end), state.astype(np.complex128), t_eval=taus,
        method="DOP853", rtol=1e-10, atol=1e-13 * max(np.linalg.norm(state), 1.0))
    if not sol.success:
        raise SolverError(f"time evolution failed: {sol.message}")
    return sol.y


def evolve_grid(blocks: HamiltonianBlocks, state_vec: np.ndarray,
                taus: np.ndarray) -> np.ndarray:
    """exp(-i H tau) |state> for every tau, as columns.

    Uses the eigendecomposition of the full non-Hermitian Hamiltonian
    when its eigenvector matrix is well conditioned, otherwise falls
    back to adaptive integration (relative tolerance below 1e-8).
    """
    taus = np.asarray(taus, dtype=np.float64)
    if taus.ndim != 1:
        raise ValueError("taus must be 1-d")
    if taus.size and (np.any(taus < 0) or np.any(np.diff(taus) < 0)):
        raise ValueError("taus must be nonnegative and nondecreasing")
    state = np.asarray(state_vec, dtype=np.complex128)
    if state.shape != (blocks.basis.dim,):
        raise ValueError(
            f"state must have shape ({blocks.basis.dim},), got {state.shape}")
    h = full_hamiltonian(blocks)
    if h.shape[0] == 0:
        return np.zeros((0, taus.size), dtype=np.complex128)
    try:
        lam, vecs = np.linalg.eig(h)
        cond = np.linalg.cond(vecs)
    except np.linalg.LinAlgError:
        cond = np.inf
    if np.isfinite(cond) and cond <= EIG_COND_LIMIT:
        y = np.linalg.solve(vecs, state)
        phases = np.exp(-1j * np.outer(lam, taus))
        return vecs @ (phases * y[:, None])
    return _evolve_by_ode(h, state, taus)


def evolve(blocks: HamiltonianBlocks, state_vec: np.ndarray,
           tau: float) -> np.ndarray:
    """exp(-i H tau) |state> under the full Hamiltonian, drive included."""
    if tau < 0:
        raise ValueError(f"tau must be >= 0, got {tau}")
    if tau == 0.0:
        return np.asarray(state_vec, dtype=np.complex128).copy()
    return evolve_grid(blocks, state_vec, np.array([tau]))[:, 0]


def spectrum_amplitudes(chain: AtomChain, params: PhysicalParams,
                        deltas: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Drive-normalized (t, r) amplitudes across a whole detuning grid.

    Equivalent to building blocks and solving at every grid point, but
    factorized through one eigendecomposition of the Delta-independent
    one-excitation matrix; falls back to per-point solves when that
    matrix is badly non-normal.
    """
    deltas = np.asarray(deltas, dtype=np.float64)
    n = chain.n_atoms
    if n == 0:
        return (np.ones(deltas.size, dtype=np.complex128),
                np.zeros(deltas.size, dtype=np.complex128))
    basis = enumerate_basis(n, 1)
    a1 = _one_exc_matrix(chain, params, basis)
    phases = drive_phases(chain, params)
    dhat = np.zeros(2 * n, dtype=np.complex128)
    e_slots = np.flatnonzero(basis.one_exc_levels == LEVEL_E)
    atoms_e = basis.one_exc_atoms[e_slots]
    dhat[e_slots] = phases[atoms_e]
    w_t = np.zeros(2 * n, dtype=np.complex128)
    w_r = np.zeros(2 * n, dtype=np.complex128)
    w_t[e_slots] = np.conj(phases[atoms_e])
    w_r[e_slots] = phases[atoms_e]

    half_g1d = 0.5 * params.gamma_1d
    try:
        lam, vecs = np.linalg.eig(a1)
        cond = np.linalg.cond(vecs)
    except np.linalg.LinAlgError:
        cond = np.inf
    if np.isfinite(cond) and cond <= EIG_COND_LIMIT:
        y = np.linalg.solve(vecs, dhat)
        coeff_t = (w_t @ vecs) * y
        coeff_r = (w_r @ vecs) * y
        t = np.ones(deltas.size, dtype=np.complex128)
        r = np.zeros(deltas.size, dtype=np.complex128)
        ok = True
        for coeff, out in ((coeff_t, t), (coeff_r, r)):
            live = np.flatnonzero(coeff != 0)
            if live.size == 0:
                continue
            denom = lam[live, None] - deltas[None, :]
            with np.errstate(divide="ignore", invalid="ignore"):
                contrib = (coeff[live, None] / denom).sum(axis=0)
            if not np.all(np.isfinite(contrib)):
                ok = False
                break
            out += 1j * half_g1d * contrib
        if ok:
            return t, r
    # non-normal or resonant-singular fallback: independent solves per point
    t = np.empty(deltas.size, dtype=np.complex128)
    r = np.empty(deltas.size, dtype=np.complex128)
    eye = np.eye(2 * n)
    for i, delta in enumerate(deltas):
        # c1hat = c1 / eps so the drive normalization cancels exactly
        c1hat = _solve_checked(a1 - delta * eye, -dhat, delta)
        t[i] = 1.0 - 1j * half_g1d * (w_t @ c1hat)
        r[i] = -1j * half_g1d * (w_r @ c1hat)
    return t, r
