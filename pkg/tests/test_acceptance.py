"""Acceptance suite: one test per criterion, one printed line per criterion.

Run with

    pytest tests/test_acceptance.py -v

Each test prints ``ACCEPTANCE <k> <name>: PASS|FAIL [detail]`` through the
capture-disabled channel, then asserts.  Ensemble sizes follow the stated
desk scales; seeds are fixed so every number here is reproducible.
"""

import time

import numpy as np
import pytest

import pcwsim as pc
from pcwsim.coherent import _one_exc_matrix
from pcwsim.ensemble import draw_chain

GRID = -10.0 + 0.1 * np.arange(601)          # standard [-10, 50] window
STEP = 0.1


def report(capsys, num, name, ok, detail=""):
    line = f"ACCEPTANCE {num:>2} {name}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f"  [{detail}]"
    with capsys.disabled():
        print(line, flush=True)
    assert ok, line


def ensemble_spectrum(params, n=None, n_mean=None, samples=200, seed=0,
                      grid=GRID, solver="coherent", workers=1):
    mode = "fixed" if n is not None else "poisson"
    spec = pc.EnsembleSpec(mode=mode, n=n, n_mean=n_mean, samples=samples,
                           delta_grid=grid, master_seed=seed, solver=solver)
    return pc.run_ensemble(spec, params, workers=workers)


def test_criterion_1_single_atom_oracle(capsys):
    t0 = time.time()
    params = pc.PhysicalParams(omega_c=0.0, j_strength=0.0, gamma_1d=0.3)
    chain = pc.AtomChain(positions=[0], ih_shifts=[0.0])
    deltas = np.linspace(-10, 10, 201)
    t_amp, _ = pc.spectrum_amplitudes(chain, params, deltas)
    oracle = (deltas + 0.5j) / (deltas + 0.5j * 1.3)
    worst = float(np.max(np.abs(np.abs(t_amp) ** 2 - np.abs(oracle) ** 2)))
    t_res = float(np.abs(t_amp[100]) ** 2)
    elapsed = time.time() - t0
    ok = worst < 1e-10 and abs(t_res - 0.5917159763313609) < 1e-10 \
        and elapsed < 1.0
    report(capsys, 1, "single-atom oracle", ok,
           f"max|dT|={worst:.2e}, T(0)={t_res:.6f}, {elapsed:.2f}s")


def test_criterion_2_eit_exactness(capsys):
    t0 = time.time()
    params = pc.PhysicalParams(j_strength=0.0)
    chain = pc.AtomChain(positions=[0], ih_shifts=[0.0])
    amps = pc.solve_steady(
        pc.build_blocks(chain, params, 0.0, pc.enumerate_basis(1, 1)))
    single = pc.transmission(amps, chain, params).T
    res = ensemble_spectrum(params, n=10, samples=1000, seed=2,
                            grid=np.array([0.0]))
    ens = float(res.t_mean[0])
    elapsed = time.time() - t0
    ok = abs(single - 1.0) < 1e-6 and abs(ens - 1.0) < 1e-4 and elapsed < 60
    report(capsys, 2, "EIT exactness", ok,
           f"single 1-T={1-single:.2e}, ensemble 1-T={1-ens:.2e}, "
           f"{elapsed:.1f}s")


def test_criterion_3_eigenvalue_law(capsys):
    params = pc.PhysicalParams(int_length=1e4)
    offsets = {}
    points = []
    for n in (2, 4, 6, 8, 10):
        res = ensemble_spectrum(params, n=n, samples=200, seed=42)
        rep = pc.analyze_spectrum(res.delta, res.t_mean)
        offsets[n] = (None if rep.omega_max is None
                      else rep.omega_max - 4.0 * n)
        if rep.omega_max is not None:
            points.append((n, rep.omega_max))
    per_point_ok = all(off is not None and abs(off) <= STEP
                       for off in offsets.values())
    fit = pc.fit_omega_vs_n(points)
    slope_ok = abs(fit.slope - 4.0) / 4.0 <= 0.05
    detail = ("offsets " + ", ".join(
        f"n={n}:{off:+.3f}" for n, off in offsets.items())
        + f"; slope={fit.slope:.3f}")
    report(capsys, 3, "eigenvalue law omega_max ~ n*J", per_point_ok and slope_ok,
           detail)


def test_criterion_4_interaction_range_ordering(capsys):
    located = []
    for length in (20.0, 50.0, 100.0, 1e4):
        params = pc.PhysicalParams(int_length=length)
        res = ensemble_spectrum(params, n=10, samples=200, seed=11)
        rep = pc.analyze_spectrum(res.delta, res.t_mean)
        located.append(rep.omega_max)
    ok = all(loc is not None for loc in located) and all(
        a < b for a, b in zip(located, located[1:]))
    report(capsys, 4, "omega_max increases with range L", ok,
           "omega_max = " + ", ".join(
               "none" if loc is None else f"{loc:.2f}" for loc in located))


def test_criterion_5_broadening_immunity(capsys):
    rows = []
    for sigma in (0.5, 2.0, 5.4):
        params = pc.PhysicalParams(sigma_ih=sigma)
        res = ensemble_spectrum(params, n=10, samples=3000, seed=21,
                                workers=4)
        t_peak, t_dip = pc.eit_metrics(res.delta, res.t_mean)
        rep = pc.analyze_spectrum(res.delta, res.t_mean)
        rows.append((sigma, t_peak, t_dip, rep.omega_max))
    peaks = [r[1] for r in rows]
    dips = [r[2] for r in rows]
    omegas = [r[3] for r in rows]
    peak_ok = peaks[0] > peaks[1] > peaks[2]
    dip_ok = all(d is not None for d in dips) and \
        max(dips) - min(dips) < 0.05
    omega_ok = all(o is not None for o in omegas) and \
        max(omegas) - min(omegas) < 2 * STEP
    report(capsys, 5, "inhomogeneous-broadening immunity",
           peak_ok and dip_ok and omega_ok,
           f"t_peak={peaks[0]:.3f}>{peaks[1]:.3f}>{peaks[2]:.3f}:{peak_ok}, "
           f"t_dip span={max(dips)-min(dips):.4f}, "
           f"omega span={max(omegas)-min(omegas):.3f}")


def test_criterion_6_dephasing_immunity(capsys):
    rows = []
    for gamma_d in (0.5, 1.0, 5.5):
        params = pc.PhysicalParams(gamma_d=gamma_d)
        res = ensemble_spectrum(params, n=10, samples=300, seed=0,
                                solver="lindblad", workers=4)
        t_peak, t_dip = pc.eit_metrics(res.delta, res.t_mean)
        rep = pc.analyze_spectrum(res.delta, res.t_mean)
        rows.append((gamma_d, t_peak, t_dip, rep.omega_max))
    peaks = [r[1] for r in rows]
    dips = [r[2] for r in rows]
    omegas = [r[3] for r in rows]
    peak_ok = peaks[0] > peaks[1] > peaks[2]
    dip_ok = all(d is not None for d in dips) and \
        max(dips) - min(dips) < 0.05
    omega_ok = all(o is not None for o in omegas) and \
        max(omegas) - min(omegas) < 2 * STEP

    # dual-route cross-check at gamma_d = 0: full Liouvillian null space
    # against the coherent hierarchy on the 101-point grid
    params0 = pc.PhysicalParams()
    spec = pc.EnsembleSpec(mode="fixed", n=10, samples=1, delta_grid=GRID,
                           master_seed=6)
    chain = draw_chain(spec, params0, 0)
    basis = pc.enumerate_basis(10, 1)
    cross_grid = np.linspace(-10, 50, 101)
    t_amp, _ = pc.spectrum_amplitudes(chain, params0, cross_grid)
    worst = 0.0
    for i, delta in enumerate(cross_grid):
        rho = pc.steady_density(
            pc.build_liouvillian(chain, params0, delta, basis))
        fa = pc.transmission_from_density(rho, chain, params0, basis)
        worst = max(worst, abs(fa.T - abs(t_amp[i]) ** 2))
    cross_ok = worst < 1e-6
    report(capsys, 6, "dephasing immunity + Lindblad cross-check",
           peak_ok and dip_ok and omega_ok and cross_ok,
           f"t_peak={peaks[0]:.3f}>{peaks[1]:.3f}>{peaks[2]:.3f}:{peak_ok}, "
           f"t_dip span={max(dips)-min(dips):.4f}, "
           f"omega span={max(omegas)-min(omegas):.3f}, "
           f"crosscheck max|dT|={worst:.2e}")


def test_criterion_7_band_edge_loss_sensitivity(capsys):
    depths = []
    located = []
    window = (GRID > 10.0)
    for gamma_em in (1e-4, 1e-3, 1e-2, 1e-1):
        params = pc.PhysicalParams(gamma_em=gamma_em)
        res = ensemble_spectrum(params, n=10, samples=1000, seed=5,
                                workers=4)
        depths.append(float(1.0 - res.t_mean[window].min()))
        rep = pc.analyze_spectrum(res.delta, res.t_mean)
        located.append(rep.omega_max)
    monotone_ok = all(a > b for a, b in zip(depths, depths[1:]))
    # the stated model requires the dip to vanish from 1e-2 up
    no_dip_ok = all(loc is None for loc in located[2:])
    report(capsys, 7, "TE->TM loss sensitivity", monotone_ok and no_dip_ok,
           "depths " + ", ".join(f"{d:.4f}" for d in depths)
           + "; located " + ", ".join(
               "none" if loc is None else f"{loc:.1f}" for loc in located))


def test_criterion_8_poisson_dip_spacing(capsys):
    grid = -10.0 + 0.1 * np.arange(701)          # reach past 14 * J
    ratios = {}
    for j in (2.0, 4.0):
        params = pc.PhysicalParams(int_length=1e4, j_strength=j)
        res = ensemble_spectrum(params, n_mean=10.0, samples=3000, seed=3,
                                grid=grid, workers=4)
        # cluster-scale thresholds: each Poisson count contributes a dip
        # weighted by its probability (~0.02-0.1 deep); the 3000-sample
        # noise floor sits well below the 0.01 prominence gate
        dips = pc.find_dips(res.delta, res.t_mean, prominence=0.01,
                            min_depth=0.02)
        spacing = pc.mean_dip_spacing(dips, (10 * j - 4 * j, 10 * j + 4 * j))
        ratios[j] = None if spacing is None else spacing / j
    ok = all(r is not None and 0.9 <= r <= 1.1 for r in ratios.values())
    report(capsys, 8, "Poisson dip spacing S ~ J", ok,
           ", ".join(f"J={j}: S/J="
                     + ("none" if r is None else f"{r:.3f}")
                     for j, r in ratios.items()))


def test_criterion_9_poisson_linearity(capsys):
    grid = -10.0 + 0.1 * np.arange(1401)         # reach past the n=30 cluster
    points = []
    for n_mean in (10.0, 20.0, 30.0):
        params = pc.PhysicalParams()
        res = ensemble_spectrum(params, n_mean=n_mean, samples=3000, seed=8,
                                grid=grid, workers=4)
        # broad-dip regime: the averaged cluster is shallow, so detect it
        # with thresholds matched to its scale (noise floor ~ 3e-3)
        dips = pc.find_dips(res.delta, res.t_mean, prominence=0.005,
                            min_depth=0.02)
        loc = pc.locate_omega_max(dips, min_depth=0.02)
        points.append((n_mean, loc))
    have_all = all(loc is not None for _n, loc in points)
    monotone = have_all and points[0][1] < points[1][1] < points[2][1]
    fit = pc.fit_omega_vs_n(points) if have_all else None
    fit_ok = fit is not None and fit.r_squared > 0.95
    report(capsys, 9, "Poisson-number linearity", monotone and fit_ok,
           "omega_max = " + ", ".join(
               "none" if loc is None else f"{loc:.1f}" for _n, loc in points)
           + (f"; r2={fit.r_squared:.4f}" if fit else ""))


def test_criterion_10_photon_correlations(capsys):
    tau = np.linspace(0.0, 20.0, 512)
    results = {}
    for n in (6, 10):
        for j in (4.0, 1.0):
            params = pc.PhysicalParams(j_strength=j)
            spec = pc.EnsembleSpec(mode="fixed", n=n, samples=1000,
                                   delta_grid=GRID, master_seed=0)
            res = pc.run_ensemble(spec, params, workers=4)
            omega = pc.locate_omega_max(pc.find_dips(res.delta, res.t_mean))
            g2res = pc.run_g2_ensemble(spec, params, omega, tau, workers=4)
            g2 = g2res.g2_mean
            beat = pc.dominant_beat_frequency(tau, g2, min_frequency=2.0)
            # oscillation visibility: high-pass RMS relative to the local mean
            kernel = np.ones(41) / 41
            base = np.convolve(g2, kernel, mode="same")
            osc = (g2 - base)[40:-40] / base[40:-40]
            visibility = float(np.sqrt(np.mean(osc**2)))
            splits = []
            basis1 = pc.enumerate_basis(n, 1)
            for i in range(200):
                chain = draw_chain(spec, params, i)
                evals = np.sort(np.linalg.eigvals(
                    _one_exc_matrix(chain, params, basis1)).real)[::-1]
                splits.append(evals[0] - evals[1])
            results[(n, j)] = dict(omega=omega, g2_zero=float(g2[0]),
                                   beat=beat, split=float(np.mean(splits)),
                                   visibility=visibility)

    # single-atom antibunching oracle: no two-photon reflection at tau = 0
    params1 = pc.PhysicalParams(omega_c=0.0, j_strength=0.0)
    chain1 = pc.AtomChain(positions=[0], ih_shifts=[0.0])
    blocks = pc.build_blocks(chain1, params1, 0.0, pc.enumerate_basis(1, 2))
    amps = pc.solve_steady(blocks)
    g2_single = pc.g2_reflected(blocks, amps, chain1, params1,
                                np.array([0.0]))[0]
    anti_ok = g2_single < 1e-10

    bunching_ok = all(results[(n, 4.0)]["g2_zero"] > 10 for n in (6, 10))
    beat_ok = all(
        abs(results[(n, 4.0)]["beat"] - results[(n, 4.0)]["split"])
        <= 0.10 * results[(n, 4.0)]["split"] for n in (6, 10))
    ordering_ok = all(
        results[(n, 4.0)]["g2_zero"] > results[(n, 1.0)]["g2_zero"]
        and results[(n, 4.0)]["visibility"] > results[(n, 1.0)]["visibility"]
        for n in (6, 10))
    detail = "; ".join(
        f"n={n},J={j:g}: g2(0)={r['g2_zero']:.1f}, beat={r['beat']:.2f}, "
        f"split={r['split']:.2f}, vis={r['visibility']:.3f}"
        for (n, j), r in results.items()) + f"; antibunch={g2_single:.1e}"
    report(capsys, 10, "photon correlations",
           bunching_ok and beat_ok and ordering_ok and anti_ok, detail)


def test_criterion_11_determinism_across_workers(capsys, tmp_path):
    import json

    from pcwsim.cli import main

    body = {
        "schema_version": 1,
        "ensemble": {"mode": "fixed", "n": 6, "samples": 64,
                     "master_seed": 12345},
        "spectrum": {"delta_min": -5.0, "delta_max": 30.0, "delta_step": 0.25},
        "g2": {"delta": 14.0, "tau_max": 10.0, "tau_points": 128},
        "sweep": {"axis": "n", "values": [2, 4, 6]},
    }
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(body), encoding="utf-8")
    outputs = {}
    for workers in (1, 4, 8):
        out = tmp_path / f"w{workers}"
        for command in ("spectrum", "sweep", "g2"):
            code = main([command, "--config", str(cfg), "--out", str(out),
                         "--workers", str(workers)])
            assert code == 0
        blob = b""
        for name in ("spectrum.csv", "spectrum_summary.json", "sweep.csv",
                     "sweep_summary.json", "g2.csv", "g2_summary.json"):
            blob += (out / name).read_bytes()
        outputs[workers] = blob
    ok = outputs[1] == outputs[4] == outputs[8]
    report(capsys, 11, "byte-identical across 1/4/8 workers", ok,
           f"{len(outputs[1])} bytes compared")
