"""Acceptance suite: one test per criterion, summarised as PASS/FAIL lines.

Run ``pytest tests/test_acceptance.py`` and read the "acceptance criteria"
section at the end of the output.
"""
import json
import time
from pathlib import Path

import numpy as np
import pytest
from scipy import integrate, stats

from geometry import oracle_rpm, oracle_tsr
from windaoa.castaing import CastaingParams, castaing_pdf, fit_castaing, sample_castaing
from windaoa.cli import DEFAULT_TAU_GRID, main
from windaoa.stats import (
    gdi,
    moments,
    powerlaw_fit,
    speed_increments,
    taylor_length,
)
from windaoa.synth import SynthSpec, generate
from windaoa.turbine import (
    TurbineConfig,
    aoa_increment_series,
    conditional_series,
    delta_aoa_fixed_rpm,
    delta_aoa_fixed_tsr,
    delta_aoa_yaw_only_rpm,
    delta_aoa_yaw_only_tsr,
    u_rpm,
)
from windaoa.wind_data import WindSeries

TSR = TurbineConfig.fixed_tsr(7.0)
RPM = {n: TurbineConfig.fixed_rpm(n) for n in (10, 15, 20)}


@pytest.mark.criterion(1, "geometry oracle equivalence < 1e-9 rad on 1e5 inputs per mode, < 5 s")
def test_geometry_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    n = 100_000
    u_bar = rng.uniform(2, 25, n)
    u_new = rng.uniform(2, 25, n)
    dphi = rng.uniform(-30, 30, n)

    got = np.deg2rad(delta_aoa_fixed_tsr(u_bar, u_new, dphi, TSR))
    assert np.max(np.abs(got - oracle_tsr(u_bar, u_new, dphi))) < 1e-9
    got = np.deg2rad(delta_aoa_yaw_only_tsr(dphi, TSR))
    assert np.max(np.abs(got - oracle_tsr(u_bar, u_bar, dphi))) < 1e-9

    n_r = rng.choice([10, 15, 20], n)
    err = err_yaw = 0.0
    for k, cfg in RPM.items():
        sel = n_r == k
        got = np.deg2rad(delta_aoa_fixed_rpm(u_bar[sel], u_new[sel], dphi[sel], cfg))
        err = max(err, np.max(np.abs(got - oracle_rpm(u_bar[sel], u_new[sel], dphi[sel], k))))
        got = np.deg2rad(delta_aoa_yaw_only_rpm(u_bar[sel], dphi[sel], cfg))
        err_yaw = max(err_yaw, np.max(np.abs(got - oracle_rpm(u_bar[sel], u_bar[sel], dphi[sel], k))))
    assert err < 1e-9 and err_yaw < 1e-9
    assert time.perf_counter() - t0 < 5.0


@pytest.mark.criterion(2, "identity u_new = u_bar, dphi = 0 gives exactly zero, both modes, all cases")
def test_identity():
    u = np.linspace(0.5, 30.0, 1000)
    assert np.all(delta_aoa_fixed_tsr(u, u, 0.0, TSR) == 0.0)
    assert np.all(delta_aoa_yaw_only_tsr(np.zeros_like(u), TSR) == 0.0)
    for cfg in RPM.values():
        assert np.all(delta_aoa_fixed_rpm(u, u, 0.0, cfg) == 0.0)
        assert np.all(delta_aoa_yaw_only_rpm(u, 0.0, cfg) == 0.0)
    for u0, phi0 in ((3.3, 0.0), (7.0, 271.3), (17.9, 359.9)):
        s = WindSeries(np.full(300, u0), np.full(300, phi0), np.ones(300, bool), 10.0)
        for cfg, case in ((TSR, "a"), (TSR, "c"), (RPM[10], "b"), (RPM[15], "c"), (RPM[20], "b")):
            for yaw in (False, True):
                assert np.all(aoa_increment_series(s, cfg, 1.0, case, yaw).values == 0.0)


@pytest.mark.criterion(3, "Gaussian null: |gamma| < 0.05, |nu| < 0.02 on every tau; GDI within [0, 2]")
def test_gaussian_null(gaussian_1e6):
    for tau in DEFAULT_TAU_GRID:
        m = moments(speed_increments(gaussian_1e6, tau))
        assert abs(m.gamma) < 0.05, (tau, m.gamma)
        assert abs(m.nu) < 0.02, (tau, m.nu)
        g = gdi(gaussian_1e6, tau).gdi
        assert g.min() >= 0.0 and g.max() <= 2.0


@pytest.mark.criterion(4, "fBm(H=1/3, n=2^20): sigma(tau) slope 0.333 +- 0.03 over [0.6, 3] s, < 30 s")
def test_kolmogorov_scaling():
    t0 = time.perf_counter()
    s = generate(SynthSpec(kind="fbm", n=2 ** 20, hurst=1 / 3, seed=31))
    taus = [t for t in DEFAULT_TAU_GRID if 0.6 <= t <= 3.0]
    sig = [moments(speed_increments(s, t)).sigma for t in taus]
    fit = powerlaw_fit(taus, sig, (0.6, 3.0))
    assert fit.exponent == pytest.approx(1 / 3, abs=0.03)
    assert time.perf_counter() - t0 < 30.0


@pytest.mark.criterion(5, "intermittency ordering: case-b kurtosis (n_r 10, 20) > case-a, all > 0")
def test_intermittency_ordering(intermittent_1e6):
    tau = TSR.tau_a
    g_a = moments(aoa_increment_series(intermittent_1e6, TSR, tau, "a")).gamma
    g_b = [moments(aoa_increment_series(intermittent_1e6, RPM[n], tau, "b")).gamma for n in (10, 20)]
    assert g_a > 0 and min(g_b) > 0
    assert min(g_b) > g_a


@pytest.mark.criterion(6, "yaw-only shape: skewness < 0 for all four configs, sigma decreasing in n_r")
def test_yaw_only_shape(intermittent_1e6):
    tau = TSR.tau_a
    tsr = moments(aoa_increment_series(intermittent_1e6, TSR, tau, "a", yaw_only=True))
    rpm = [moments(aoa_increment_series(intermittent_1e6, RPM[n], tau, "b", yaw_only=True)) for n in (10, 15, 20)]
    assert tsr.nu < 0 and all(m.nu < 0 for m in rpm)
    assert rpm[0].sigma > rpm[1].sigma > rpm[2].sigma


@pytest.mark.criterion(7, "conditioning on a 2 m/s band lowers Delta-alpha kurtosis at every tau <= 2 s")
def test_conditioning(intermittent_1e6):
    cond = conditional_series(intermittent_1e6, 6.0, 8.0)
    for cfg in (TSR, RPM[10], RPM[20]):
        for tau in (t for t in DEFAULT_TAU_GRID if t <= 2.0):
            full = moments(aoa_increment_series(intermittent_1e6, cfg, tau, "c")).gamma
            band = moments(aoa_increment_series(cond, cfg, tau, "c")).gamma
            assert band < full, (cfg.label, tau, band, full)


@pytest.mark.criterion(8, "Castaing recovery within 5% on 1e5 samples; lambda=0.01 vs normal < 1e-3; < 60 s")
def test_castaing_recovery():
    t0 = time.perf_counter()
    x = sample_castaing(CastaingParams(0.3, 1.0), 100_000, np.random.default_rng(808))
    res = fit_castaing(x, tau=1.0)
    assert res.params.lam == pytest.approx(0.3, rel=0.05)
    assert res.params.sigma0 == pytest.approx(1.0, rel=0.05)
    grid = np.linspace(-8, 8, 4001)
    dev = np.abs(castaing_pdf(grid, CastaingParams(0.01, 1.0)) - stats.norm.pdf(grid))
    assert dev.max() < 1e-3
    assert time.perf_counter() - t0 < 60.0


def _histogram_files(root: Path):
    for path in sorted(root.rglob("hist/*.json")):
        doc = json.loads(path.read_text())
        yield path, doc["meta"]["bin_width"], [r["density"] for r in doc["rows"]]


@pytest.mark.criterion(9, "emitted histograms and castaing_pdf (lambda 0.1, 0.5, 1.0) integrate to 1 +- 1e-6")
def test_normalization(tmp_path):
    synth = ["--synth", "kind=intermittent", "--synth", "n=100000", "--synth", "seed=9"]
    assert main(["characterize", "-o", str(tmp_path)] + synth) == 0
    assert main(["aoa", "-o", str(tmp_path), "--cases", "a,b,c", "--yaw-only", "--condition", "6,8"] + synth) == 0
    files = list(_histogram_files(tmp_path))
    assert len(files) > 100
    for path, width, density in files:
        assert np.sum(density) * width == pytest.approx(1.0, abs=1e-6), path

    for lam in (0.1, 0.5, 1.0):
        prm = CastaingParams(lam, 1.0)
        half = 10 * prm.sigma0 * np.exp(3 * lam)
        u = np.linspace(-1.0, 1.0, 20001)
        x = half * np.sinh(12 * u) / np.sinh(12)
        assert integrate.trapezoid(castaing_pdf(x, prm), x) == pytest.approx(1.0, abs=1e-6)


@pytest.mark.criterion(10, "moment and unit examples exact to 1e-4")
def test_unit_examples():
    assert moments([0.0, 0.0, 3.0]).nu == pytest.approx(0.7071, abs=1e-4)
    assert moments([1.0, -1.0, 1.0, -1.0]).gamma == pytest.approx(-2.0, abs=1e-4)
    assert u_rpm(20, 20) == pytest.approx(41.8879, abs=1e-4)
    assert taylor_length(0.1, 10.0) == pytest.approx(1.0, abs=1e-4)


def _tree(root: Path) -> dict:
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


@pytest.mark.criterion(11, "byte-identical outputs across runs and thread counts")
def test_determinism(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "synth_kind = intermittent\nsynth_n = 40000\nsynth_seed = 77\n"
        "cases = a,b,c\nyaw_only = true\ncondition = 6,8\ntau_grid = 0.5,2\n"
        "fit = true\nfit_max_samples = 1500\nexport_increments = true\n",
        encoding="utf-8",
    )
    trees = []
    for run, jobs in (("r1", 1), ("r2", 1), ("r4", 4)):
        out = tmp_path / run
        assert main(["characterize", "--config", str(cfg), "-o", str(out / "char"), "--jobs", str(jobs)]) == 0
        assert main(["aoa", "--config", str(cfg), "-o", str(out / "aoa"), "--jobs", str(jobs)]) == 0
        trees.append(_tree(out))
    assert len(trees[0]) > 50
    assert trees[0] == trees[1]
    assert trees[0] == trees[2]
