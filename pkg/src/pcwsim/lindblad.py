"""Master-equation treatment of the driven chain on the <=1-excitation basis.

The density operator evolves under (i) the Hermitian chain Hamiltonian
with the guided-mode sine exchange plus the drive, (ii) independent
free-space decay of |e>, (iii) equal-rate dephasing of both lower levels
through sigma_ss and sigma_gg jump channels, (iv) the collective
guided-mode dissipator with the cosine kernel, and (v) the band-edge
loss channel with the band-gap kernel (off by default).

Everything is vectorized row-major: vec(rho)[i*D + j] = rho[i, j], so a
superoperator term A rho B maps to kron(A, B^T).

Memory scales as D^4 with D = 1 + 2n; the dense superoperator is
practical up to n ~ 14.  Spectra over many detunings and disorder
samples instead use the weak-drive perturbative path
``spectrum_from_master``, which solves the same master equation order by
order in the drive: the opposing-corner coherence block at first order
and the one-excitation block at second order, both through small linear
systems whose homogeneous parts are detuning independent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .basis import LEVEL_E, LEVEL_S, ExcitationBasis, enumerate_basis
from .coherent import (EIG_COND_LIMIT, _one_exc_matrix, _solve_checked,
                       drive_phases)
from .errors import DegenerateSteadyStateError, SolverError
from .model import AtomChain, PhysicalParams, bandgap_kernel

__all__ = [
    "Liouvillian",
    "build_liouvillian",
    "steady_density",
    "spectrum_from_master",
]

_NULLSPACE_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class Liouvillian:
    """Dense superoperator of one disorder realization at one detuning."""

    matrix: np.ndarray          # (D^2, D^2) acting on row-major vec(rho)
    delta: float
    basis: ExcitationBasis
    chain: AtomChain
    params: PhysicalParams

    @property
    def dim(self) -> int:
        return self.basis.dim

    @property
    def trace_row(self) -> np.ndarray:
        """Vectorized trace functional: trace_row @ vec(rho) = tr(rho).

        Replacing the redundant ground-population row of the vectorized
        steady-state system with this row fixes the normalization.
        """
        row = np.zeros(self.dim * self.dim, dtype=np.complex128)
        row[np.arange(self.dim) * (self.dim + 1)] = 1.0
        return row


def _collective_kernel(chain: AtomChain, params: PhysicalParams) -> np.ndarray:
    """PSD rate kernel of the lowering channels: free-space + guided + band-edge."""
    m = chain.positions.astype(np.float64)
    sep = np.abs(m[:, None] - m[None, :])
    kernel = params.gamma_1d * np.cos(params.k0_d * sep)
    kernel = kernel + params.gamma_em * bandgap_kernel(chain, params)
    kernel[np.diag_indices_from(kernel)] += params.gamma_e_prime
    return kernel


def _hermitian_hamiltonian(chain: AtomChain, params: PhysicalParams,
                           delta: float, basis: ExcitationBasis) -> np.ndarray:
    """Coherent part on the truncated basis: chain terms, sine exchange, drive."""
    n = chain.n_atoms
    dim = basis.dim
    h = np.zeros((dim, dim), dtype=np.complex128)
    if n == 0:
        return h
    m = chain.positions.astype(np.float64)
    sep = np.abs(m[:, None] - m[None, :])
    exchange = (params.j_strength * bandgap_kernel(chain, params)
                + 0.5 * params.gamma_1d * np.sin(params.k0_d * sep))
    sl1 = basis.manifold_slices[1]
    atoms = basis.one_exc_atoms
    levels = basis.one_exc_levels
    e_slots = np.flatnonzero(levels == LEVEL_E) + sl1.start
    s_slots = np.flatnonzero(levels == LEVEL_S) + sl1.start
    atoms_e = atoms[levels == LEVEL_E]
    atoms_s = atoms[levels == LEVEL_S]
    h[np.ix_(e_slots, e_slots)] = exchange[np.ix_(atoms_e, atoms_e)]
    h[e_slots, e_slots] += -delta
    h[s_slots, s_slots] = -(delta - params.delta_c - chain.ih_shifts[atoms_s])
    for ea, atom in zip(e_slots, atoms_e):
        sa = s_slots[np.searchsorted(atoms_s, atom)]
        h[ea, sa] = -params.omega_c
        h[sa, ea] = -params.omega_c
    drive = params.drive_amp * drive_phases(chain, params)
    h[e_slots, 0] = drive[atoms_e]
    h[0, e_slots] = np.conj(drive[atoms_e])
    return h


def build_liouvillian(chain: AtomChain, params: PhysicalParams, delta: float,
                      basis: ExcitationBasis) -> Liouvillian:
    """Assemble the dense superoperator at probe detuning delta."""
    if basis.n_atoms != chain.n_atoms:
        raise ValueError("basis does not match chain size")
    if basis.max_exc > 1:
        raise ValueError("density-matrix path is truncated at one excitation")
    n = chain.n_atoms
    dim = basis.dim
    eye = np.eye(dim)
    h = _hermitian_hamiltonian(chain, params, delta, basis)
    liou = -1j * (np.kron(h, eye) - np.kron(eye, h.T))

    if n > 0:
        sl1 = basis.manifold_slices[1]
        levels = basis.one_exc_levels
        e_slots = np.flatnonzero(levels == LEVEL_E) + sl1.start
        kernel = _collective_kernel(chain, params)
        # anticommutator: -(1/2) {sum_ab K_ab |e_b><e_a| , rho}
        damp = np.zeros((dim, dim), dtype=np.complex128)
        damp[np.ix_(e_slots, e_slots)] = kernel
        liou += -0.5 * (np.kron(damp, eye) + np.kron(eye, damp.T))
        # jump part: recycling into |g><g| with the same kernel
        g_row = np.zeros((dim * dim, dim * dim), dtype=np.complex128)
        rows = np.zeros(n * n, dtype=np.int64)   # all go to (g, g)
        cols = (np.repeat(e_slots, n) * dim + np.tile(e_slots, n))
        np.add.at(g_row, (rows, cols), kernel.reshape(-1))
        liou += g_row
        # dephasing of the two lower levels: projector jump channels
        if params.gamma_d > 0:
            diag = np.zeros(dim * dim, dtype=np.complex128)
            idx_i = np.repeat(np.arange(dim), dim)
            idx_j = np.tile(np.arange(dim), dim)
            for atom in range(n):
                p_ss = np.zeros(dim)
                p_ss[sl1.start + np.flatnonzero(
                    (basis.one_exc_atoms == atom)
                    & (basis.one_exc_levels == LEVEL_S))] = 1.0
                p_gg = np.ones(dim)
                p_gg[sl1.start + np.flatnonzero(basis.one_exc_atoms == atom)] = 0.0
                for p in (p_ss, p_gg):
                    diag += params.gamma_d * (
                        p[idx_i] * p[idx_j] - 0.5 * p[idx_i] - 0.5 * p[idx_j])
            liou[np.diag_indices_from(liou)] += diag
    return Liouvillian(matrix=liou, delta=delta, basis=basis, chain=chain,
                       params=params)


def steady_density(liou: Liouvillian) -> np.ndarray:
    """Unique steady state: L rho = 0, tr rho = 1, Hermitian, positive.

    Solved by replacing the redundant ground-population row of the
    vectorized system with the trace constraint; falls back to the
    smallest-singular-vector extraction when that replaced system is
    ill conditioned.  Raises when the null space is degenerate.
    """
    dim = liou.dim
    mat = liou.matrix
    svals = scipy.linalg.svdvals(mat)
    tol = max(svals[0], 1.0) * _NULLSPACE_RTOL
    null_dim = int(np.sum(svals < tol))
    if null_dim > 1:
        raise DegenerateSteadyStateError(
            f"steady state is not unique: null-space dimension {null_dim}",
            null_dim=null_dim)

    system = mat.copy()
    system[0, :] = liou.trace_row      # row 0 is the (g, g) population EOM
    rhs = np.zeros(dim * dim, dtype=np.complex128)
    rhs[0] = 1.0
    try:
        vec = np.linalg.solve(system, rhs)
        residual = np.linalg.norm(mat @ vec) / max(np.linalg.norm(vec), 1e-300)
        if not np.isfinite(residual) or residual > 1e-6:
            raise np.linalg.LinAlgError
    except np.linalg.LinAlgError:
        _u, _s, vh = scipy.linalg.svd(mat)
        vec = np.conj(vh[-1])
    rho = vec.reshape(dim, dim)
    rho = 0.5 * (rho + rho.conj().T)
    trace = np.trace(rho).real
    if abs(trace) < 1e-12:
        raise SolverError("steady-state candidate has vanishing trace",
                          delta=liou.delta)
    rho = rho / trace
    eigmin = float(np.linalg.eigvalsh(rho).min())
    if eigmin < -1e-8:
        raise SolverError(
            f"steady state not positive (min eigenvalue {eigmin:.3g})",
            delta=liou.delta)
    return rho


# ---------------------------------------------------------------------------
# weak-drive perturbative spectrum (the ensemble workhorse)
# ---------------------------------------------------------------------------

def _perturbative_pieces(chain: AtomChain, params: PhysicalParams):
    """Detuning-independent operators of the order-by-order master equation.

    Returns (a_v, dhat, block_lu, e_slots, atom phases) where a_v is the
    matrix whose resolvent gives the drive-normalized opposing-corner
    coherences v(Delta) = -(a_v - Delta I)^{-1} dhat, and block_lu is the
    LU-factorized superoperator of the one-excitation block whose
    response to the drive feed yields the second-order coherences.
    """
    n = chain.n_atoms
    basis = enumerate_basis(n, 1)
    a1 = _one_exc_matrix(chain, params, basis)
    levels = basis.one_exc_levels
    atoms = basis.one_exc_atoms
    # dephasing damps e-g coherences at gamma_d/2 and s-g ones at gamma_d
    deph = np.where(levels == LEVEL_E, 0.5, 1.0) * params.gamma_d
    a_v = a1 - 1j * np.diag(deph)

    phases = drive_phases(chain, params)
    dim1 = 2 * n
    dhat = np.zeros(dim1, dtype=np.complex128)
    e_rel = np.flatnonzero(levels == LEVEL_E)
    dhat[e_rel] = phases[atoms[e_rel]]

    # one-excitation block: anticommutators fold into a1 plus the gamma_d
    # halves; the only jumps that stay inside the block are the projector
    # (dephasing) channels, which act diagonally on the coherences.
    anti = np.where(levels == LEVEL_E, n - 1, n).astype(np.float64)
    a_blk = a1 - 0.5j * params.gamma_d * np.diag(anti)
    eye1 = np.eye(dim1)
    block = -1j * (np.kron(a_blk, eye1) - np.kron(eye1, np.conj(a_blk)))
    if params.gamma_d > 0:
        same_atom = atoms[:, None] == atoms[None, :]
        both_s = ((levels[:, None] == LEVEL_S) & (levels[None, :] == LEVEL_S)
                  & same_atom)
        shared_g = n - np.where(same_atom, 1, 2)
        block += params.gamma_d * np.diag(
            (both_s + shared_g).astype(np.float64).reshape(-1))
    block_lu = scipy.linalg.lu_factor(block)
    return a_v, dhat, block_lu, e_rel, atoms, phases


def spectrum_from_master(chain: AtomChain, params: PhysicalParams,
                         deltas: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Drive-normalized (T, R) across a detuning grid from the master equation.

    Exact to leading order in the drive (relative corrections of order
    drive_amp^2); agrees with steady_density + transmission_from_density
    to that accuracy while staying tractable for 10^3-sample ensembles.
    """
    deltas = np.asarray(deltas, dtype=np.float64)
    n = chain.n_atoms
    if n == 0:
        return np.ones(deltas.size), np.zeros(deltas.size)
    a_v, dhat, block_lu, e_rel, atoms, phases = _perturbative_pieces(
        chain, params)
    dim1 = 2 * n

    # first order: v(Delta) = -(a_v - Delta I)^{-1} dhat, all grid points
    try:
        lam, vecs = np.linalg.eig(a_v)
        cond = np.linalg.cond(vecs)
    except np.linalg.LinAlgError:
        cond = np.inf
    if np.isfinite(cond) and cond <= EIG_COND_LIMIT:
        y = np.linalg.solve(vecs, dhat)
        with np.errstate(divide="ignore", invalid="ignore"):
            weights = y[:, None] / (lam[:, None] - deltas[None, :])
        weights[y == 0, :] = 0.0
        v_all = -(vecs @ weights)
        if not np.all(np.isfinite(v_all)):
            v_all = None
    else:
        v_all = None
    if v_all is None:
        eye = np.eye(dim1)
        v_all = np.empty((dim1, deltas.size), dtype=np.complex128)
        for i, delta in enumerate(deltas):
            v_all[:, i] = _solve_checked(a_v - delta * eye, -dhat, delta)

    # second order: the scattered intensities are two fixed quadratic
    # forms of the one-excitation block, q+ P(Delta) q with q the drive
    # (reflected) or conjugate-drive (transmitted) phase vector.  Instead
    # of solving the block system at every detuning, solve the adjoint
    # system once per form; each grid point then costs O(n):
    #   q+ P q = <vec(q q+), vec(P)> = -<y, F(Delta)>,  L+ y = vec(q q+)
    half = 0.5 * params.gamma_1d
    q_t = np.zeros(dim1, dtype=np.complex128)
    q_r = np.zeros(dim1, dtype=np.complex128)
    q_t[e_rel] = phases[atoms[e_rel]]
    q_r[e_rel] = np.conj(phases[atoms[e_rel]])

    def quad_form(q):
        target = np.outer(q, np.conj(q)).reshape(-1)
        y = scipy.linalg.lu_solve(block_lu, target, trans=2).reshape(dim1, dim1)
        # -<y, F> with F = -i (dhat vbar^T - v dhatbar^T), evaluated for
        # every detuning through two inner products with v(Delta)
        a1 = np.conj(y).T @ dhat          # contracts the dhat vbar^T term
        a2 = np.conj(y) @ np.conj(dhat)   # contracts the v dhatbar^T term
        vals = 1j * (a1 @ np.conj(v_all)) - 1j * (a2 @ v_all)
        return np.real(vals)

    w_t = np.conj(phases[atoms[e_rel]])
    interference = 2.0 * np.real(-1j * half * (w_t @ v_all[e_rel, :]))
    t_out = 1.0 + interference + half**2 * quad_form(q_t)
    r_out = half**2 * quad_form(q_r)
    return t_out, r_out
