"""Monte Carlo averaging over disorder realizations.

Each sample owns an independent generator substream derived from
(master_seed, sample index) through a counter-based SeedSequence, so the
stream a sample sees never depends on scheduling.  Results are
accumulated in sample-index order with Welford running statistics,
which makes a run byte-identical for any worker count.

Per-sample failures (ill-conditioned detunings, vanishing reflected
signal) are recorded and skipped; a run aborts when more than 1% of its
samples fail.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import coherent, lindblad, observables
from .basis import enumerate_basis
from .errors import (EnsembleFailureError, PcwsimError, WeakReflectionError)
from .model import AtomChain, PhysicalParams, sample_chain

__all__ = [
    "EnsembleSpec",
    "SpectrumResult",
    "G2Result",
    "sample_rng",
    "run_ensemble",
    "run_g2_ensemble",
]

FAILURE_FRACTION_LIMIT = 0.01


@dataclass(frozen=True, eq=False)
class EnsembleSpec:
    """What to average: disorder model, sample count, grid, seed, solver."""

    mode: str                     # "fixed" or "poisson"
    samples: int
    delta_grid: np.ndarray
    master_seed: int
    n: int | None = None          # fixed-n mode
    n_mean: float | None = None   # poisson mode
    solver: str = "coherent"      # "coherent" or "lindblad"
    observables: tuple = ("T", "R")

    def __post_init__(self):
        grid = np.asarray(self.delta_grid, dtype=np.float64)
        object.__setattr__(self, "delta_grid", grid)
        if self.mode not in ("fixed", "poisson"):
            raise ValueError(f"mode must be 'fixed' or 'poisson', got {self.mode!r}")
        if self.solver not in ("coherent", "lindblad"):
            raise ValueError(f"unknown solver {self.solver!r}")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if grid.ndim != 1 or grid.size == 0:
            raise ValueError("delta_grid must be a nonempty 1-d array")
        if grid.size > 1 and not np.all(np.diff(grid) > 0):
            raise ValueError("delta_grid must be strictly increasing")
        if self.mode == "fixed":
            if self.n is None or self.n < 0:
                raise ValueError("fixed mode needs n >= 0")
        else:
            if self.n_mean is None or self.n_mean <= 0:
                raise ValueError("poisson mode needs n_mean > 0")


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    """Ensemble means and standard errors on the detuning grid."""

    delta: np.ndarray
    t_mean: np.ndarray
    t_stderr: np.ndarray
    r_mean: np.ndarray
    r_stderr: np.ndarray
    samples: int                 # accumulated (non-failed) samples
    failures: int
    spec: EnsembleSpec
    params: PhysicalParams


@dataclass(frozen=True, eq=False)
class G2Result:
    """Ensemble-averaged photon-photon correlation on a tau grid."""

    tau: np.ndarray
    g2_mean: np.ndarray
    g2_stderr: np.ndarray
    delta: float
    samples: int
    failures: int
    spec: EnsembleSpec
    params: PhysicalParams


def sample_rng(master_seed: int, index: int) -> np.random.Generator:
    """Counter-based substream: independent of scheduling and worker count."""
    return np.random.default_rng(
        np.random.SeedSequence(entropy=master_seed, spawn_key=(index,)))


def draw_chain(spec: EnsembleSpec, params: PhysicalParams,
               index: int) -> AtomChain:
    rng = sample_rng(spec.master_seed, index)
    if spec.mode == "fixed":
        return sample_chain(params, rng, n=spec.n)
    return sample_chain(params, rng, n_mean=spec.n_mean)


def _eval_spectrum_sample(args):
    spec, params, index = args
    try:
        chain = draw_chain(spec, params, index)
        if spec.solver == "coherent":
            t, r = coherent.spectrum_amplitudes(chain, params, spec.delta_grid)
            return index, np.abs(t) ** 2, np.abs(r) ** 2, None
        t_arr, r_arr = lindblad.spectrum_from_master(chain, params,
                                                     spec.delta_grid)
        return index, t_arr, r_arr, None
    except PcwsimError as exc:
        return index, None, None, str(exc)


def _eval_g2_sample(args):
    spec, params, index, delta, tau_grid, reflected = args
    try:
        chain = draw_chain(spec, params, index)
        basis = enumerate_basis(chain.n_atoms, 2)
        blocks = coherent.build_blocks(chain, params, delta, basis)
        amps = coherent.solve_steady(blocks)
        if reflected:
            g2 = observables.g2_reflected(blocks, amps, chain, params, tau_grid)
        else:
            g2 = observables.g2_transmitted(blocks, amps, chain, params,
                                            tau_grid)
        return index, g2, None, None
    except WeakReflectionError as exc:
        return index, None, "weak-signal", str(exc)
    except PcwsimError as exc:
        return index, None, None, str(exc)


class _Welford:
    """Running mean/variance accumulated in a fixed (index) order."""

    def __init__(self, width):
        self.count = 0
        self.mean = np.zeros(width)
        self.m2 = np.zeros(width)

    def add(self, values):
        self.count += 1
        delta = values - self.mean
        self.mean += delta / self.count
        self.m2 += delta * (values - self.mean)

    def stderr(self):
        if self.count < 2:
            return np.zeros_like(self.mean)
        std = np.sqrt(self.m2 / (self.count - 1))
        return std / np.sqrt(self.count)


def _run_samples(task_args, eval_fn, workers, progress):
    """Evaluate samples (possibly in parallel), yield results in index order."""
    total = len(task_args)
    done = 0
    if workers <= 1:
        for args in task_args:
            yield eval_fn(args)
            done += 1
            if progress is not None:
                progress(done, total)
        return
    chunk = max(1, total // (workers * 8))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # pool.map preserves submission order, so accumulation order is
        # the sample-index order regardless of completion order
        for result in pool.map(eval_fn, task_args, chunksize=chunk):
            yield result
            done += 1
            if progress is not None:
                progress(done, total)


def _check_failures(failures, total):
    if len(failures) > FAILURE_FRACTION_LIMIT * total:
        raise EnsembleFailureError(
            f"{len(failures)} of {total} samples failed "
            f"(> {FAILURE_FRACTION_LIMIT:.0%}); first: {failures[0][1]}",
            n_failed=len(failures), n_total=total)


def run_ensemble(spec: EnsembleSpec, params: PhysicalParams,
                 workers: int = 1, progress=None) -> SpectrumResult:
    """Ensemble-averaged transmission/reflection spectrum.

    Byte-identical for identical spec regardless of ``workers``.
    ``progress(done, total)`` is invoked after every accumulated sample.
    """
    grid = spec.delta_grid
    acc_t = _Welford(grid.size)
    acc_r = _Welford(grid.size)
    failures = []
    tasks = [(spec, params, i) for i in range(spec.samples)]
    for index, t_arr, r_arr, err in _run_samples(
            tasks, _eval_spectrum_sample, workers, progress):
        if err is not None:
            failures.append((index, err))
            continue
        acc_t.add(t_arr)
        acc_r.add(r_arr)
    _check_failures(failures, spec.samples)
    return SpectrumResult(
        delta=grid.copy(), t_mean=acc_t.mean, t_stderr=acc_t.stderr(),
        r_mean=acc_r.mean, r_stderr=acc_r.stderr(),
        samples=acc_t.count, failures=len(failures), spec=spec, params=params)


def run_g2_ensemble(spec: EnsembleSpec, params: PhysicalParams, delta: float,
                    tau_grid: np.ndarray, reflected: bool = True,
                    workers: int = 1, progress=None) -> G2Result:
    """Ensemble mean of per-sample g2(tau) curves at a fixed detuning.

    Each sample is normalized by its own output intensity, which keeps
    the long-delay limit of every curve at 1; samples whose output
    signal sits below the normalization floor are skipped under the
    standard failure policy.
    """
    tau_grid = np.asarray(tau_grid, dtype=np.float64)
    acc = _Welford(tau_grid.size)
    failures = []
    n_weak = 0
    tasks = [(spec, params, i, float(delta), tau_grid, reflected)
             for i in range(spec.samples)]
    for index, g2, kind, err in _run_samples(
            tasks, _eval_g2_sample, workers, progress):
        if err is not None:
            failures.append((index, err))
            n_weak += kind == "weak-signal"
            continue
        acc.add(g2)
    if failures and n_weak == len(failures) and (
            acc.count == 0 or len(failures) > FAILURE_FRACTION_LIMIT
            * spec.samples):
        raise WeakReflectionError(
            f"output signal below the normalization floor for {n_weak} of "
            f"{spec.samples} samples at delta={delta:g}")
    _check_failures(failures, spec.samples)
    if acc.count == 0:
        raise EnsembleFailureError("no sample produced a g2 curve",
                                   n_failed=len(failures), n_total=spec.samples)
    return G2Result(tau=tau_grid.copy(), g2_mean=acc.mean,
                    g2_stderr=acc.stderr(), delta=float(delta),
                    samples=acc.count, failures=len(failures),
                    spec=spec, params=params)
