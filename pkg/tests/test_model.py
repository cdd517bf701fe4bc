import numpy as np
import pytest

from pcwsim import (AtomChain, BandgapExperiment, PhysicalParams,
                    bandgap_kernel, map_experimental_params, sample_chain,
                    sample_ih_shifts, sample_poisson_count, sample_positions,
                    waveguide_kernel)


def rng_for(seed):
    return np.random.default_rng(seed)


class TestPhysicalParams:
    def test_defaults_are_standard_operating_point(self):
        p = PhysicalParams()
        assert p.gamma_1d == 0.3
        assert p.j_strength == 4.0
        assert p.int_length == 100.0
        assert p.omega_c == 2.0
        assert p.delta_c == 0.0
        assert p.k0_d == pytest.approx(np.pi / 2)
        assert p.kb_d == pytest.approx(np.pi)
        assert p.n_sites == 200
        assert p.drive_amp == pytest.approx(1.5e-5)

    @pytest.mark.parametrize("kwargs", [
        dict(gamma_1d=-0.1),
        dict(int_length=0.0),
        dict(k0_d=0.0),
        dict(k0_d=7.0),
        dict(n_sites=0),
        dict(drive_amp=0.5),   # weak-drive ceiling
        dict(sigma_ih=-1.0),
    ])
    def test_invalid_params_rejected(self, kwargs):
        with pytest.raises(ValueError):
            PhysicalParams(**kwargs)


class TestAtomChain:
    def test_requires_strictly_increasing_positions(self):
        with pytest.raises(ValueError):
            AtomChain(positions=[3, 3], ih_shifts=[0.0, 0.0])
        with pytest.raises(ValueError):
            AtomChain(positions=[5, 2], ih_shifts=[0.0, 0.0])

    def test_requires_matching_shift_length(self):
        with pytest.raises(ValueError):
            AtomChain(positions=[1, 2], ih_shifts=[0.0])

    def test_empty_chain_is_fine(self):
        chain = AtomChain(positions=[], ih_shifts=[])
        assert chain.n_atoms == 0


class TestSamplePositions:
    def test_no_atoms_gives_empty(self):
        assert sample_positions(0, 200, rng_for(0)).size == 0

    def test_full_lattice_forced(self):
        pos = sample_positions(200, 200, rng_for(0))
        assert np.array_equal(pos, np.arange(200))

    def test_deterministic_given_seed(self):
        a = sample_positions(10, 200, rng_for(123))
        b = sample_positions(10, 200, rng_for(123))
        assert np.array_equal(a, b)

    def test_sorted_distinct_in_range(self):
        pos = sample_positions(50, 200, rng_for(7))
        assert np.all(np.diff(pos) > 0)
        assert pos[0] >= 0 and pos[-1] < 200

    def test_overfull_lattice_rejected(self):
        with pytest.raises(ValueError):
            sample_positions(201, 200, rng_for(0))

    def test_occupancy_is_uniform(self):
        # each site occupied with probability n/N; 1e5 draws, 5-sigma band
        n, n_sites, draws = 10, 200, 100_000
        rng = rng_for(2024)
        counts = np.zeros(n_sites)
        for _ in range(draws):
            counts[sample_positions(n, n_sites, rng)] += 1
        p = n / n_sites
        sigma = np.sqrt(draws * p * (1 - p))
        assert np.all(np.abs(counts - draws * p) < 5 * sigma)


class TestSamplePoissonCount:
    def test_invalid_mean_rejected(self):
        with pytest.raises(ValueError):
            sample_poisson_count(0.0, 200, rng_for(0))
        with pytest.raises(ValueError):
            sample_poisson_count(-3.0, 200, rng_for(0))

    def test_law_of_large_numbers(self):
        rng = rng_for(55)
        draws = np.array([sample_poisson_count(10.0, 200, rng)
                          for _ in range(30_000)])
        assert 9.8 <= draws.mean() <= 10.2

    def test_truncation_contract(self):
        rng = rng_for(56)
        draws = [sample_poisson_count(10.0, 12, rng) for _ in range(5_000)]
        assert max(draws) <= 12

    def test_tiny_mean_is_mostly_zero(self):
        rng = rng_for(57)
        draws = np.array([sample_poisson_count(0.001, 200, rng)
                          for _ in range(2_000)])
        assert np.mean(draws == 0) > 0.99


class TestSampleIhShifts:
    def test_zero_width_gives_zeros(self):
        shifts = sample_ih_shifts(100, 0.0, rng_for(0))
        assert np.all(shifts == 0.0)

    def test_sample_std_matches(self):
        shifts = sample_ih_shifts(30_000, 2.0, rng_for(99))
        assert 1.97 <= shifts.std(ddof=1) <= 2.03

    def test_broad_regime_width(self):
        shifts = sample_ih_shifts(30_000, 5.4, rng_for(100))
        assert abs(shifts.std(ddof=1) - 5.4) < 0.1

    def test_negative_width_rejected(self):
        with pytest.raises(ValueError):
            sample_ih_shifts(10, -0.5, rng_for(0))


class TestSampleChain:
    def test_fixed_call_sequence_reproducible(self):
        params = PhysicalParams(sigma_ih=1.0)
        a = sample_chain(params, rng_for(5), n=12)
        b = sample_chain(params, rng_for(5), n=12)
        assert np.array_equal(a.positions, b.positions)
        assert np.array_equal(a.ih_shifts, b.ih_shifts)

    def test_exactly_one_mode_required(self):
        params = PhysicalParams()
        with pytest.raises(ValueError):
            sample_chain(params, rng_for(0))
        with pytest.raises(ValueError):
            sample_chain(params, rng_for(0), n=3, n_mean=5.0)


class TestKernels:
    def test_waveguide_diagonal_is_one(self):
        chain = AtomChain(positions=[3, 17, 90], ih_shifts=[0.0] * 3)
        k = waveguide_kernel(chain, PhysicalParams())
        assert np.allclose(np.diag(k), 1.0)

    def test_waveguide_phase_arithmetic(self):
        chain = AtomChain(positions=[0, 1, 2], ih_shifts=[0.0] * 3)
        k = waveguide_kernel(chain, PhysicalParams())  # k0_d = pi/2
        assert k[0, 1] == pytest.approx(1j)
        assert k[0, 2] == pytest.approx(-1.0)

    @pytest.mark.parametrize("seed", range(5))
    def test_kernels_exactly_symmetric(self, seed):
        params = PhysicalParams()
        chain = sample_chain(params, rng_for(seed), n=8)
        k_wg = waveguide_kernel(chain, params)
        k_bg = bandgap_kernel(chain, params)
        assert np.array_equal(k_wg, k_wg.T)
        assert np.array_equal(k_bg, k_bg.T)

    def test_bandgap_values(self):
        params = PhysicalParams(int_length=100.0)
        even = AtomChain(positions=[0, 2], ih_shifts=[0.0, 0.0])
        k = bandgap_kernel(even, params)
        assert k[0, 1] == pytest.approx(np.exp(-0.02))       # 0.980199...
        odd = AtomChain(positions=[0, 1], ih_shifts=[0.0, 0.0])
        k = bandgap_kernel(odd, params)
        assert k[0, 1] == pytest.approx(-np.exp(-0.01))      # -0.990050...

    def test_bandgap_diagonal_is_cos_squared(self):
        params = PhysicalParams()
        chain = AtomChain(positions=[0, 5, 11], ih_shifts=[0.0] * 3)
        k = bandgap_kernel(chain, params)
        expected = np.cos(np.pi * chain.positions) ** 2
        assert np.allclose(np.diag(k), expected)

    @pytest.mark.parametrize("seed,n", [(0, 4), (1, 7), (2, 10)])
    def test_infinite_range_limit_is_rank_one(self, seed, n):
        # eigenvalues of J*K_bg approach {n*J, 0 x (n-1)} as L -> inf; the
        # relative correction is ~ mean pair distance / L, so keep the
        # chain spread well under L * 1e-3
        params = PhysicalParams(int_length=1e4, n_sites=20)
        chain = sample_chain(params, rng_for(seed), n=n)
        evals = np.sort(np.linalg.eigvalsh(
            params.j_strength * bandgap_kernel(chain, params)))[::-1]
        assert abs(evals[0] - n * params.j_strength) < 1e-3 * n * params.j_strength
        assert np.all(np.abs(evals[1:]) < 1e-2 * params.j_strength)

    def test_bandgap_kernel_psd(self):
        params = PhysicalParams()
        chain = sample_chain(params, rng_for(3), n=9)
        evals = np.linalg.eigvalsh(bandgap_kernel(chain, params))
        assert evals.min() > -1e-12


class TestExperimentalMapping:
    def test_length_scales_with_inverse_sqrt_detuning(self):
        base = dict(curvature=5.0, band_edge_freq=7e7,
                    single_cell_coupling=600.0, photon_loss=1.0)
        m1 = map_experimental_params(
            BandgapExperiment(detuning_band=1e4, **base), 1.0)
        m2 = map_experimental_params(
            BandgapExperiment(detuning_band=2e4, **base), 1.0)
        assert m2.int_length == pytest.approx(m1.int_length / np.sqrt(2))

    def test_lossless_crystal_limit(self):
        exp = BandgapExperiment(detuning_band=1e4, curvature=5.0,
                                band_edge_freq=7e7,
                                single_cell_coupling=600.0, photon_loss=0.0)
        mapped = map_experimental_params(exp, 1.0)
        assert mapped.gamma_total == pytest.approx(0.3 + 1.0)
        assert mapped.ratio_max == np.inf

    def test_alligator_regime_round_trip(self):
        # back-solve the couplings that make J = 0.182 and L = 80 d at
        # delta = 60 GHz (units of Gamma_e' = 2pi x 5.0 MHz), then check
        # the forward mapping reproduces them
        delta = 60e9 / 5e6          # 12000 Gamma_e'
        omega_b = 352e12 / 5e6      # optical carrier in the same unit
        j_target, l_target = 0.182, 80.0
        gbar = np.sqrt(2 * delta * j_target)
        g_d = gbar * np.sqrt(l_target)           # gbar = g_d sqrt(d/L)
        alpha = (np.pi * l_target) ** 2 * delta / omega_b
        exp = BandgapExperiment(detuning_band=delta, curvature=alpha,
                                band_edge_freq=omega_b,
                                single_cell_coupling=g_d, photon_loss=1.0)
        mapped = map_experimental_params(exp, 1.0, gamma_1d=9.1e-3,
                                         gamma_e_prime=1.0)
        assert mapped.j_strength == pytest.approx(0.182, rel=1e-10)
        assert mapped.int_length == pytest.approx(80.0, rel=1e-10)
        assert mapped.gamma_total == pytest.approx(
            9.1e-3 + 1.0 + 1.0 * (gbar / (2 * delta)) ** 2)

    def test_optimal_detuning_fixed_point(self):
        exp = BandgapExperiment(detuning_band=1.2e4, curvature=10.0,
                                band_edge_freq=7e7,
                                single_cell_coupling=600.0, photon_loss=2.0)
        mapped = map_experimental_params(exp, 1.0, gamma_1d=0.3)
        # self-consistency: delta_opt^2 = kappa gbar(delta_opt)^2 / (4 Gamma)
        length = mapped.int_length * np.sqrt(exp.detuning_band / mapped.delta_opt)
        gbar_opt = exp.single_cell_coupling * np.sqrt(1.0 / length)
        gamma = 0.3 + 1.0
        assert mapped.delta_opt ** 2 == pytest.approx(
            exp.photon_loss * gbar_opt ** 2 / (4 * gamma), rel=1e-9)
        assert mapped.ratio_max == pytest.approx(
            np.sqrt(gbar_opt ** 2 / (exp.photon_loss * gamma)) / 2, rel=1e-9)

    def test_invalid_experiment_rejected(self):
        with pytest.raises(ValueError):
            BandgapExperiment(detuning_band=-1.0, curvature=5.0,
                              band_edge_freq=7e7, single_cell_coupling=600.0)
        with pytest.raises(ValueError):
            BandgapExperiment(detuning_band=1e4, curvature=0.0,
                              band_edge_freq=7e7, single_cell_coupling=600.0)
