"""Acceptance gate: one test per criterion, at its pinned tolerance.

Each test prints a `[criterion NN] PASS/FAIL` line (visible with -s or on
failure) before asserting, so a full run yields a one-line verdict per
criterion.  Tolerances and runtime budgets are fixed here.
"""

import dataclasses
import math
import time

import numpy as np
import pytest

from oamsm import (
    SystemConfig,
    abep,
    antenna_detection_prob_avg,
    build_channel_tensor,
    dcmc_capacity,
    demodulate_ml,
    demodulate_stepwise,
    integrate,
    marcum_q1,
    mod_bep,
    ncx2_cdf,
    ncx2_pdf,
    psk_constellation,
    q_function,
    ring_radius,
    simulate_ber,
    transmit,
    waist_for_state,
)
from oamsm.beam import BeamParams
from oamsm.cli import SweepSpec, main, run_sweep
from oamsm.modem import SymbolMap


def report(number: int, ok: bool, detail: str) -> None:
    print(f"[criterion {number:02d}] {'PASS' if ok else 'FAIL'} - {detail}")


def test_criterion_01_cdf_vs_quadrature():
    start = time.monotonic()
    worst = 0.0
    for lam in (0.0, 0.5, 2.0, 10.0, 50.0):
        for g in np.linspace(0.0, 200.0, 41)[1:]:
            quad = integrate(lambda t: ncx2_pdf(t, lam), 0.0, float(g), tol=1e-10)
            worst = max(worst, abs(ncx2_cdf(float(g), lam) - quad))
    elapsed = time.monotonic() - start
    ok = worst <= 1e-8 and elapsed < 10.0
    report(1, ok, f"max |cdf - quadrature| = {worst:.2e} (limit 1e-8), {elapsed:.1f}s (< 10s)")
    assert worst <= 1e-8
    assert elapsed < 10.0


def test_criterion_02_marcum_identity():
    start = time.monotonic()
    worst = 0.0
    for a in np.linspace(0.0, 9.5, 20):
        for b in np.linspace(0.0, 9.5, 20):
            total = marcum_q1(float(a), float(b)) + ncx2_cdf(float(b) ** 2, float(a) ** 2)
            worst = max(worst, abs(total - 1.0))
    elapsed = time.monotonic() - start
    ok = worst <= 1e-10 and elapsed < 5.0
    report(2, ok, f"max |Q1 + cdf - 1| = {worst:.2e} (limit 1e-10), {elapsed:.1f}s (< 5s)")
    assert worst <= 1e-10
    assert elapsed < 5.0


def test_criterion_03_zero_noise_round_trip():
    start = time.monotonic()
    cfg = SystemConfig()
    tensor = build_channel_tensor(cfg)
    smap = SymbolMap(cfg.tx_antennas, cfg.oam_states, cfg.constellation())
    rng = np.random.default_rng(0)
    rho = cfg.rho_for_snr_db(20.0)
    failures = 0
    for sym in smap.all_symbols():
        frame = transmit(sym, tensor, rho, 0.0, rng)
        for detector in (demodulate_stepwise, demodulate_ml):
            got = detector(frame, tensor, rho)
            if (got.antenna, got.state, got.point_index) != (
                sym.antenna,
                sym.state,
                sym.point_index,
            ):
                failures += 1
    elapsed = time.monotonic() - start
    ok = failures == 0 and elapsed < 1.0
    report(3, ok, f"{failures} mismatches across 128 symbols x 2 detectors, {elapsed:.2f}s (< 1s)")
    assert failures == 0
    assert elapsed < 1.0


def test_criterion_04_analytic_vs_monte_carlo_antenna_detection():
    start = time.monotonic()
    cfg = SystemConfig()
    tensor = build_channel_tensor(cfg)
    nv = cfg.noise_power_w
    details = []
    ok = True
    for snr in (0.0, 10.0, 20.0):
        analytic = antenna_detection_prob_avg(tensor, cfg.rho_for_snr_db(snr), nv)
        rep = simulate_ber(cfg, snr, 100000, 41, "stepwise", tensor=tensor)
        measured = 1.0 - rep.antenna_error_rate
        pulls = abs(analytic - measured) / rep.antenna_error_stderr
        details.append(f"{snr:g}dB: {pulls:.2f}se")
        ok = ok and pulls <= 3.0
    elapsed = time.monotonic() - start
    ok = ok and elapsed < 120.0
    report(4, ok, f"analytic vs MC pulls: {', '.join(details)} (limit 3se), {elapsed:.0f}s (< 120s)")
    assert ok


def test_criterion_05_mod_bep_vs_bpsk_monte_carlo():
    start = time.monotonic()
    cfg = SystemConfig()
    nv = cfg.noise_power_w
    const = psk_constellation(2)
    rng = np.random.default_rng(43)
    details = []
    ok = True
    for snr in (0.0, 2.0, 4.0, 6.0, 8.0):
        rho = cfg.rho_for_snr_db(snr)
        analytic = mod_bep(1.0, rho, nv, const, "euclidean")
        n = 100000
        bits = rng.integers(0, 2, n)
        x = 1.0 - 2.0 * bits
        y = math.sqrt(rho) * x + math.sqrt(nv / 2) * (
            rng.standard_normal(n) + 1j * rng.standard_normal(n)
        )
        measured = float(np.mean((y.real < 0).astype(int) != bits))
        se = math.sqrt(max(measured * (1 - measured), 1e-12) / n)
        pulls = abs(analytic - measured) / se
        details.append(f"{snr:g}dB: {pulls:.2f}se")
        ok = ok and pulls <= 3.0
    elapsed = time.monotonic() - start
    ok = ok and elapsed < 60.0
    report(5, ok, f"analytic vs MC pulls: {', '.join(details)} (limit 3se), {elapsed:.0f}s (< 60s)")
    assert ok


def _gauss_hermite_capacity(tensor, rho, noise_var, nodes=96):
    from oamsm.metrics import _signal_table

    s = _signal_table(tensor, rho)
    x, w = np.polynomial.hermite.hermgauss(nodes)
    W = math.sqrt(noise_var) * (x[:, None] + 1j * x[None, :]).ravel()
    WT = np.outer(w, w).ravel()
    n_br, n_in = s.shape
    total = 0.0
    for b in range(n_br):
        col = s[b]
        for i in range(n_in):
            d = col[i] - col
            ln_f = -(np.abs(d)[:, None] ** 2 + 2 * (d[:, None] * W[None, :].conj()).real) / noise_var
            m = np.max(ln_f, axis=0)
            total += float(np.sum(WT * (m + np.log(np.sum(np.exp(ln_f - m[None, :]), axis=0))))) / math.pi
    return math.log2(n_in) - total / (n_br * n_in * math.log(2.0))


def test_criterion_06_capacity_vs_quadrature_oracle():
    start = time.monotonic()
    cfg = dataclasses.replace(
        SystemConfig(), tx_antennas=2, oam_states=(-1, 1), constellation_order=2
    )
    tensor = build_channel_tensor(cfg)
    nv = cfg.noise_power_w
    details = []
    ok = True
    for snr in (-10.0, 0.0, 10.0, 20.0):
        rho = cfg.rho_for_snr_db(snr)
        mc = dcmc_capacity(tensor, rho, nv, 400000, 47)
        oracle = _gauss_hermite_capacity(tensor, rho, nv)
        rel = abs(mc.value - oracle) / oracle
        details.append(f"{snr:g}dB: {rel:.3%}")
        ok = ok and rel <= 0.01
    elapsed = time.monotonic() - start
    ok = ok and elapsed < 120.0
    report(6, ok, f"MC vs quadrature rel err: {', '.join(details)} (limit 1%), {elapsed:.0f}s (< 120s)")
    assert ok


def test_criterion_07_capacity_limits():
    # The zero-power limit is exact.  The saturation clause asserts >= 6.9
    # bits at 40 dB as stated; the faithful model tops out at 6.25 bits
    # because the quarter-turn-per-state ring phase aliases with the PSK
    # grid and mirror-symmetric antennas collide at interior pairs, so this
    # clause documents a known shortfall rather than a regression.
    start = time.monotonic()
    cfg = SystemConfig()
    tensor = build_channel_tensor(cfg)
    nv = cfg.noise_power_w
    zero = dcmc_capacity(tensor, 0.0, nv, 100, 53)
    sat = dcmc_capacity(tensor, cfg.rho_for_snr_db(40.0), nv, 20000, 53)
    elapsed = time.monotonic() - start
    ok = zero.value == 0.0 and sat.value >= 6.9 and elapsed < 180.0
    report(
        7,
        ok,
        f"zero-power = {zero.value!r} (exact 0), 40 dB = {sat.value:.4f} bits "
        f"(stated floor 6.9; model ceiling 6.25), {elapsed:.0f}s (< 180s)",
    )
    assert zero.value == 0.0
    assert elapsed < 180.0
    assert sat.value >= 6.9, (
        "unattainable as specified: the per-pair observation aliases state and "
        "constellation phases in-ring and mirror antennas collide at interior "
        "pairs, capping the model at 6.25 bits (see decisions ledger)"
    )


def test_criterion_08_waist_matching():
    start = time.monotonic()
    wavelength = SystemConfig().wavelength_m
    ok = True
    for mode in ("printed", "rederived"):
        ref = BeamParams(0.04, 1, wavelength)
        for z in (0.0, 10.0, 50.0):
            ok = ok and waist_for_state(ref, 1, z, mode) == 0.04
            ok = ok and waist_for_state(ref, -1, z, mode) == 0.04
    worst = 0.0
    states = (-4, -3, -2, -1, 1, 2, 3, 4)
    for z in (0.0, 10.0, 50.0):
        for l in states:
            ref = BeamParams(0.04, l, wavelength)
            target = ring_radius(ref, z)
            for lp in states:
                w = waist_for_state(ref, lp, z, "rederived")
                matched = ring_radius(BeamParams(w, lp, wavelength), z)
                worst = max(worst, abs(matched - target) / max(target, 1e-300))
    elapsed = time.monotonic() - start
    ok = ok and worst < 1e-10 and elapsed < 1.0
    report(8, ok, f"identity exact, worst ring residual {worst:.2e} (limit 1e-10), {elapsed:.2f}s (< 1s)")
    assert ok


def test_criterion_09a_distance_crossover(tmp_path):
    start = time.monotonic()
    spec = SweepSpec(
        "distance", 10, 150, 10, ("capacity",), {"samples": 1200, "snr_db": 104.0}
    )
    rows = run_sweep(SystemConfig(), spec, str(tmp_path / "distance.csv"))
    oam_higher = [r["capacity_oam_bits"] > r["capacity_mimo_bits"] for r in rows]
    crossings = sum(1 for a, b in zip(oam_higher, oam_higher[1:]) if a != b)
    elapsed = time.monotonic() - start
    ok = crossings == 1 and not oam_higher[0] and oam_higher[-1] and elapsed < 600.0
    report(
        9,
        ok,
        f"(a) distance sweep: {crossings} crossing(s), baseline higher first, "
        f"spatially modulated system higher beyond, {elapsed:.0f}s (< 600s)",
    )
    assert crossings == 1
    assert not oam_higher[0] and oam_higher[-1]
    assert elapsed < 600.0


def test_criterion_09b_abep_shapes():
    start = time.monotonic()
    cfg = SystemConfig().resolved()
    tensor = build_channel_tensor(cfg)
    snr_curve = [abep(cfg, cfg.rho_for_snr_db(s), tensor=tensor) for s in range(-10, 32, 4)]
    monotone_snr = all(b <= a + 1e-12 for a, b in zip(snr_curve, snr_curve[1:]))
    dist_curve = []
    for z in (25.0, 50.0, 100.0):
        c = dataclasses.replace(cfg, distance_m=z)
        dist_curve.append(abep(c, c.rho_for_snr_db(15.0)))
    increasing_distance = dist_curve[0] < dist_curve[1] < dist_curve[2]
    elapsed = time.monotonic() - start
    ok = monotone_snr and increasing_distance and elapsed < 600.0
    report(
        9,
        ok,
        f"(b) ABEP nonincreasing in SNR: {monotone_snr}, increasing in distance: "
        f"{increasing_distance}, {elapsed:.0f}s (< 600s)",
    )
    assert monotone_snr
    assert increasing_distance
    assert elapsed < 600.0


def test_criterion_09c_energy_efficiency_shape(tmp_path):
    start = time.monotonic()
    spec = SweepSpec("snr", 0, 40, 4, ("capacity", "ee"), {"samples": 1500})
    rows = run_sweep(SystemConfig(), spec, str(tmp_path / "ee.csv"))
    eta = np.array([r["ee_oam_bits_per_joule"] for r in rows])
    eta_base = np.array([r["ee_mimo_bits_per_joule"] for r in rows])
    above = bool(np.all(eta > eta_base))
    # Weak unimodality within Monte Carlo jitter: nondecreasing up to the
    # peak and nonincreasing after it, with slack of 3 combined rel-errors.
    stderr = np.array([r["capacity_oam_stderr"] for r in rows])
    caps = np.array([r["capacity_oam_bits"] for r in rows])
    slack = 3.0 * eta * np.where(caps > 0, stderr / np.maximum(caps, 1e-12), 0.0)
    peak = int(np.argmax(eta))
    rising = all(eta[i + 1] >= eta[i] - slack[i] for i in range(peak))
    falling = all(eta[i + 1] <= eta[i] + slack[i] for i in range(peak, len(eta) - 1))
    unimodal = rising and falling
    elapsed = time.monotonic() - start
    ok = above and unimodal and elapsed < 600.0
    report(
        9,
        ok,
        f"(c) energy efficiency unimodal: {unimodal}, above baseline everywhere: {above}, "
        f"{elapsed:.0f}s (< 600s)",
    )
    assert above
    assert unimodal
    assert elapsed < 600.0


def test_criterion_10_preset_determinism(tmp_path):
    start = time.monotonic()
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["preset", "fig2", "--out", str(a), "--samples", "400", "--seed", "2024"]) == 0
    assert main(["preset", "fig2", "--out", str(b), "--samples", "400", "--seed", "2024"]) == 0
    identical = a.read_bytes() == b.read_bytes()
    meta_a = [l for l in (tmp_path / "a.csv.meta").read_text().splitlines() if not l.startswith(("timestamp", "command"))]
    meta_b = [l for l in (tmp_path / "b.csv.meta").read_text().splitlines() if not l.startswith(("timestamp", "command"))]
    elapsed = time.monotonic() - start
    ok = identical and meta_a == meta_b and elapsed < 600.0
    report(10, ok, f"fig2 CSV bodies byte-identical: {identical}, {elapsed:.0f}s (< 600s)")
    assert identical
    assert meta_a == meta_b
    assert elapsed < 600.0
