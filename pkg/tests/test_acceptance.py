"""End-to-end acceptance checks, one test per criterion, pinned tolerances.

Each test prints one `[ACCEPTANCE] ...` line (visible with pytest -s). The
diameter-scaling slope check (criterion 8) documents a known red result:
2D stadiums do not show the diffusive D^-2 gap scaling at these sizes (the
single-step axial variance is log-divergent in the plane, and the dominant
modulus eigenvalue is a flat-to-flat alternation mode). See the sweep
conductance data, whose Cheeger square does scale near D^-2.
"""

import json
import math
import time

import numpy as np
import pytest
from scipy.optimize import brentq
from scipy.stats import chisquare, kstest

import stochastic_billiards as sb
from stochastic_billiards.cli import main

pytestmark = pytest.mark.acceptance


def _report(criterion, ok, detail):
    print(f"[ACCEPTANCE] {criterion}: {'PASS' if ok else 'FAIL'} ({detail})", flush=True)


def test_criterion_01_circle_spectrum(circle):
    t0 = time.monotonic()
    tm = sb.build_transition_matrix(circle, 512)
    rolled = np.roll(np.roll(tm.P, 1, axis=0), 1, axis=1)
    circulant_dev = float(np.abs(tm.P - rolled).max())
    summ = sb.spectral_summary(tm)
    lam = np.sort(summ.eigenvalues)
    eig_err = max(
        abs(lam[2 * (k - 1) + j] - 1.0 / (1.0 - 4.0 * k * k))
        for k in range(1, 6)
        for j in (0, 1)
    )
    gap_err = abs(summ.spectral_gap - 2.0 / 3.0)
    elapsed = time.monotonic() - t0
    ok = circulant_dev < 1e-9 and eig_err < 1e-3 and gap_err < 1e-3 and elapsed < 60.0
    _report(
        "1 circle spectrum",
        ok,
        f"eig err {eig_err:.2e}, gap err {gap_err:.2e}, {elapsed:.1f}s",
    )
    assert circulant_dev < 1e-9
    assert eig_err < 1e-3
    assert gap_err < 1e-3
    assert elapsed < 60.0


def test_criterion_02_stationarity(circle, ellipse):
    tm = sb.build_transition_matrix(ellipse, 256)
    pi = sb.stationary_distribution(tm)
    linf = float(np.abs(pi - 1.0 / 256.0).max())
    traj, _ = sb.run(sb.ChainConfig(body=circle, steps=1_000_000, seed=202))
    part = sb.ArcPartition(circle, 64)
    tv = sb.empirical_tv(sb.histogram(part, traj.positions).masses, part.reference_masses())
    ok = linf < 1e-6 and tv < 0.01
    _report("2 stationarity", ok, f"ellipse Linf {linf:.2e}, circle TV {tv:.4f}")
    assert linf < 1e-6
    assert tv < 0.01


def test_criterion_03_one_step_law(circle):
    traj, _ = sb.run(sb.ChainConfig(body=circle, steps=100_000, seed=203))
    ang = np.mod(np.arctan2(traj.positions[:, 1], traj.positions[:, 0]), 2 * math.pi)
    psi = np.mod(np.diff(np.concatenate([[0.0], ang])), 2 * math.pi)
    edges = np.linspace(0.0, 2 * math.pi, 65)
    counts, _ = np.histogram(psi, bins=edges)
    probs = (np.cos(edges[:-1] / 2) - np.cos(edges[1:] / 2)) / 2
    _, p = chisquare(counts, f_exp=probs * counts.sum())
    _report("3 one-step angular law", p > 0.01, f"chi2 p {p:.3f}")
    assert p > 0.01


def test_criterion_04_direction_law():
    worst = 0.0
    for n in (2, 3, 10, 100):
        body = sb.Ball([0.0] * n, 1.0)
        x = sb.default_start(body)
        w = sb.sample_direction(x, "cosine", sb.RngStream(204, n), size=100_000)
        ks = kstest(
            w @ x.normal,
            lambda t: 1.0 - (1.0 - np.asarray(t) ** 2) ** ((n - 1) / 2.0),
        ).statistic
        worst = max(worst, ks)
    body = sb.Ball([0.0] * 400, 1.0)
    x = sb.default_start(body)
    w = sb.sample_direction(x, "cosine", sb.RngStream(204, 400), size=100_000)
    med = math.sqrt(400.0) * float(np.median(w @ x.normal))
    ok = worst < 0.01 and abs(med - 1.1774) < 0.02
    _report("4 direction law", ok, f"worst KS {worst:.4f}, scaled median {med:.4f}")
    assert worst < 0.01
    assert abs(med - 1.1774) < 0.02


def test_criterion_05_step_quantile(circle):
    x = sb.default_start(circle)
    est = sb.estimate_F(circle, x, 1_000_000, rng=sb.RngStream(205, 0))
    circle_err = abs(est.value - 2.0 * math.sqrt(255.0) / 128.0)
    scaled = []
    rel_errs = []
    for n in (2, 10, 50):
        body = sb.Ball([0.0] * n, 1.0)
        e = sb.estimate_F(body, sb.default_start(body), 200_000, rng=sb.RngStream(205, n))
        oracle = 2.0 * math.sqrt(1.0 - (127.0 / 128.0) ** (2.0 / (n - 1)))
        rel_errs.append(abs(e.value - oracle) / oracle)
        scaled.append(e.value * math.sqrt(n))
    band = max(scaled) / min(scaled)
    ok = circle_err < 0.01 and max(rel_errs) < 0.05 and band < 2.0
    _report(
        "5 step-size quantile",
        ok,
        f"circle err {circle_err:.4f}, sphere rel {max(rel_errs):.3f}, band {band:.2f}",
    )
    assert circle_err < 0.01
    assert max(rel_errs) < 0.05
    assert band < 2.0


def _disk_fraction(t):
    """Area fraction of the unit disk inside a radius-t disk centered on its boundary."""
    if t >= 2.0:
        return 1.0 / t**2
    d = 1.0  # lens of circles with radii (1, t) at center distance 1
    a = (
        math.acos((d * d + 1.0 - t * t) / (2.0 * d))
        + t * t * math.acos((d * d + t * t - 1.0) / (2.0 * d * t))
        - 0.5 * math.sqrt((-d + t + 1.0) * (d + t - 1.0) * (d - t + 1.0) * (d + t + 1.0))
    )
    return a / (math.pi * t * t)


def test_criterion_06_ball_fraction_radius(circle):
    x = sb.default_start(circle)
    est = sb.s_gamma(circle, x, 0.25, mc_points=200_000, rng=sb.RngStream(206, 0))
    oracle = brentq(lambda t: _disk_fraction(t) - 0.25, 1e-6, 4.0)
    rel = abs(est.value - oracle) / oracle
    scaled = []
    for n in (2, 10, 50):
        body = sb.Ball([0.0] * n, 1.0)
        e = sb.s_gamma(body, sb.default_start(body), 0.25,
                       mc_points=100_000, rng=sb.RngStream(206, n))
        scaled.append(e.value * math.sqrt(n))
    vals = [
        sb.s_gamma(circle, x, g, mc_points=100_000, rng=sb.RngStream(206, 99)).value
        for g in (0.1, 0.25, 0.4)
    ]
    monotone = vals[0] >= vals[1] >= vals[2]
    ok = rel < 0.05 and min(scaled) > 1.0 and monotone
    _report(
        "6 ball-fraction radius",
        ok,
        f"disk rel {rel:.3f}, min scaled {min(scaled):.2f}, monotone {monotone}",
    )
    assert rel < 0.05
    assert min(scaled) > 1.0
    assert monotone


def test_criterion_07_capsule_variance():
    t0 = time.monotonic()
    ns = (8, 16, 32, 64)
    var_hat = {}
    dev_se = {}
    for n in ns:
        rep = sb.capsule_experiment(n, 4.0, steps=0, replicas=100_000, seed=207,
                                    tau_replicas=0)
        var_hat[n] = rep.var_z1_hat
        dev_se[n] = abs(rep.var_z1_hat - sb.var_z1_quadrature(n)) / rep.var_z1_se
    slope = np.polyfit(np.log(ns), np.log([var_hat[n] for n in ns]), 1)[0]
    elapsed = time.monotonic() - t0
    ok = abs(slope + 2.0) < 0.3 and dev_se[8] < 3.0 and dev_se[16] < 3.0 and elapsed < 600.0
    _report(
        "7 capsule variance",
        ok,
        f"slope {slope:.3f}, dev/se n=8 {dev_se[8]:.2f}, n=16 {dev_se[16]:.2f}, {elapsed:.0f}s",
    )
    assert abs(slope + 2.0) < 0.3
    assert dev_se[8] < 3.0
    assert dev_se[16] < 3.0
    assert elapsed < 600.0


def test_criterion_08_diameter_scaling():
    gaps = []
    diameters = []
    for L in (2.0, 4.0, 8.0):
        tm = sb.build_transition_matrix(sb.Capsule(2, L, 1.0), 256)
        gaps.append(sb.spectral_summary(tm).spectral_gap)
        diameters.append(2.0 * L + 2.0)
    slope = float(np.polyfit(np.log(diameters), np.log(gaps), 1)[0])
    monotone = gaps[0] > gaps[1] > gaps[2]
    ok = monotone and abs(slope + 2.0) < 0.5
    _report(
        "8 diameter scaling",
        ok,
        f"gaps {[round(g, 5) for g in gaps]}, slope {slope:.3f}, decreasing {monotone}",
    )
    assert monotone
    # Known red: measured slope is ~ -1.2 for both the modulus gap and the
    # positive-spectrum gap (m-refinement changes it < 1e-3; the matrix
    # reproduces direct chain autocorrelations to 3 decimals). The D^-2 law
    # presumes a finite single-step axial variance, which diverges for n=2.
    assert abs(slope + 2.0) < 0.5, (
        f"gap-vs-diameter slope {slope:.3f} outside -2 +/- 0.5: 2D stadiums mix "
        "faster than diffusively (log-divergent step variance; dominant modulus "
        "mode is flat-to-flat alternation)"
    )


def test_criterion_09_one_step_overlap(circle):
    part = sb.ArcPartition(circle, 64)
    curve = sb.boundary_curve(circle)
    u = circle.boundary_point(curve.points(np.array([0.0]))[0])
    sep = (2.0 * math.sqrt(255.0) / 128.0) / (100.0 * math.sqrt(2.0))
    v = circle.boundary_point(curve.points(np.array([sep]))[0])
    v_far = circle.boundary_point(curve.points(np.array([math.pi]))[0])
    tv_near = sb.overlap_tv(circle, u, v, 100_000, part, sb.RngStream(209, 0))
    tv_far = sb.overlap_tv(circle, u, v_far, 100_000, part, sb.RngStream(209, 10))
    ok = tv_near <= 0.9 and tv_near < tv_far
    _report("9 one-step overlap", ok, f"near {tv_near:.4f}, antipodal {tv_far:.4f}")
    assert tv_near <= 0.9
    assert tv_near < tv_far


def test_criterion_10_cap_fraction(sphere):
    traj, _ = sb.run(sb.ChainConfig(body=sphere, steps=1_000_000, burn_in=1000, seed=210))
    frac, se = sb.boundary_fraction(traj, lambda P: P[:, 2] > 0.5)
    ok = abs(frac - 0.25) < 0.01
    _report("10 cap fraction", ok, f"fraction {frac:.4f} +- {se:.4f}")
    assert abs(frac - 0.25) < 0.01


def test_criterion_11_determinism(tmp_path):
    circle_spec = json.dumps({"type": "ball", "dim": 2, "center": [0.0, 0.0], "radius": 1.0})
    jobs = [
        (["run", "--body", circle_spec, "--steps", "10000", "--seed", "11"], "trajectory.csv"),
        (["spectral", "--body", circle_spec, "--bins", "128"], "eigs.csv"),
        (["f-quantile", "--body", circle_spec, "--samples", "100000", "--seed", "11"],
         "fquant.csv"),
        (["mixing", "--body", circle_spec, "--replicas", "2000", "--checkpoints", "0,1,4",
          "--bins", "16", "--seed", "11"], "mixing.csv"),
        (["capsule", "--dim", "8", "--replicas", "20000", "--tau-replicas", "200",
          "--seed", "11"], "capsule.csv"),
    ]
    identical = True
    for i, (argv, fname) in enumerate(jobs):
        a = tmp_path / f"a{i}"
        b = tmp_path / f"b{i}"
        assert main(argv + ["--out", str(a)]) == 0
        assert main(argv + ["--out", str(b)]) == 0
        if (a / fname).read_bytes() != (b / fname).read_bytes():
            identical = False
    _report("11 determinism", identical, f"{len(jobs)} commands re-run byte-identical")
    assert identical
