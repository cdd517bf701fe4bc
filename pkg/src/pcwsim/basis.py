"""Truncated Hilbert space of atomic configurations.

States keep at most ``max_exc`` atoms out of the ground level, each
excited atom sitting in |e> (level 0) or |s> (level 1).  A configuration
is a tuple of (atom index, level) pairs with strictly increasing atom
indices; the empty tuple is the global ground state and always has
ordinal 0.  Canonical ordering: by excitation number, then
lexicographically by atom indices, then by level pattern with e < s.

Dimension: sum_q C(n, q) * 2^q for q = 0..max_exc, e.g. n=10, m=2 -> 201.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, product

import numpy as np

__all__ = ["LEVEL_E", "LEVEL_S", "ExcitationBasis", "enumerate_basis",
           "apply_lowering"]

LEVEL_E = 0
LEVEL_S = 1


@dataclass(frozen=True, eq=False)
class ExcitationBasis:
    """Enumerated configurations with index maps for operator assembly."""

    n_atoms: int
    max_exc: int
    states: tuple          # tuple of configurations
    index: dict            # configuration -> ordinal

    @property
    def dim(self) -> int:
        return len(self.states)

    def lookup(self, ordinal: int):
        return self.states[ordinal]

    @cached_property
    def manifold_slices(self) -> tuple:
        """Index ranges of the 0-, 1-, ... excitation manifolds."""
        bounds = [0]
        q = 0
        for i, state in enumerate(self.states):
            while len(state) > q:
                bounds.append(i)
                q += 1
        bounds.extend([self.dim] * (self.max_exc + 1 - q))
        return tuple(slice(bounds[k], bounds[k + 1])
                     for k in range(self.max_exc + 1))

    @cached_property
    def excitation_numbers(self) -> np.ndarray:
        return np.array([len(s) for s in self.states], dtype=np.int64)

    @cached_property
    def one_exc_atoms(self) -> np.ndarray:
        """Atom index of each single-excitation state, in basis order."""
        sl = self.manifold_slices[1] if self.max_exc >= 1 else slice(0, 0)
        return np.array([s[0][0] for s in self.states[sl]], dtype=np.int64)

    @cached_property
    def one_exc_levels(self) -> np.ndarray:
        sl = self.manifold_slices[1] if self.max_exc >= 1 else slice(0, 0)
        return np.array([s[0][1] for s in self.states[sl]], dtype=np.int64)

    @cached_property
    def lowering_maps(self) -> tuple:
        """Per-atom index maps of sigma_ge: (sources, targets) ordinal pairs.

        sigma_ge^j sends any state containing (j, e) to the same state with
        that pair removed; all other states are annihilated.
        """
        src = [[] for _ in range(self.n_atoms)]
        tgt = [[] for _ in range(self.n_atoms)]
        for i, state in enumerate(self.states):
            for pair in state:
                atom, level = pair
                if level == LEVEL_E:
                    rest = tuple(p for p in state if p != pair)
                    src[atom].append(i)
                    tgt[atom].append(self.index[rest])
        return tuple(
            (np.array(s, dtype=np.int64), np.array(t, dtype=np.int64))
            for s, t in zip(src, tgt))


def enumerate_basis(n_atoms: int, max_exc: int) -> ExcitationBasis:
    """Enumerate all configurations with <= max_exc excited atoms.

    max_exc larger than n_atoms is clamped to n_atoms.
    """
    if n_atoms < 0:
        raise ValueError(f"n_atoms must be >= 0, got {n_atoms}")
    if max_exc < 0:
        raise ValueError(f"max_exc must be >= 0, got {max_exc}")
    max_exc = min(max_exc, n_atoms)
    states = []
    for q in range(max_exc + 1):
        for atoms in combinations(range(n_atoms), q):
            for levels in product((LEVEL_E, LEVEL_S), repeat=q):
                states.append(tuple(zip(atoms, levels)))
    index = {state: i for i, state in enumerate(states)}
    return ExcitationBasis(n_atoms=n_atoms, max_exc=max_exc,
                           states=tuple(states), index=index)


def apply_lowering(basis: ExcitationBasis, coeffs: np.ndarray,
                   state_vec: np.ndarray) -> np.ndarray:
    """Apply sum_j coeffs[j] * sigma_ge^j to a state vector.

    Maps q-excitation components onto the (q-1)-excitation manifold; the
    ground-state component is annihilated.
    """
    coeffs = np.asarray(coeffs)
    if coeffs.shape != (basis.n_atoms,):
        raise ValueError(
            f"coeffs must have shape ({basis.n_atoms},), got {coeffs.shape}")
    out = np.zeros(basis.dim, dtype=np.complex128)
    for atom, (src, tgt) in enumerate(basis.lowering_maps):
        if coeffs[atom] != 0 and src.size:
            np.add.at(out, tgt, coeffs[atom] * state_vec[src])
    return out


def lowering_matrix(basis: ExcitationBasis, coeffs: np.ndarray) -> np.ndarray:
    """Dense matrix of sum_j coeffs[j] * sigma_ge^j on the truncated basis."""
    coeffs = np.asarray(coeffs)
    mat = np.zeros((basis.dim, basis.dim), dtype=np.complex128)
    for atom, (src, tgt) in enumerate(basis.lowering_maps):
        if src.size:
            np.add.at(mat, (tgt, src), coeffs[atom])
    return mat
