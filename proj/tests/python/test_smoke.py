"""Smoke tests for the python bindings."""

import math

import pytest

import mtomshape as ms


def test_constellation_and_moments():
    c = ms.brgc_qam(8)
    assert len(c) == 256
    mo = ms.moments(c)
    assert abs(mo.mu2 - 1.0) < 1e-12
    assert abs(mo.mu4 - 1.39) < 0.01
    assert abs(mo.papr - 2.65) < 0.01
    with pytest.raises(Exception):
        ms.brgc_qam(3)


def test_rate_plan_exact():
    p = ms.plan_for_target(54000, 64800, 8, 5.0)
    assert p.N_D == 21600
    assert p.n_d() == 2.0
    assert p.eta() == 5.0
    assert p.n_symbols() == 10800


def test_gmi_evaluation():
    c = ms.brgc_qam(4)
    ev = ms.evaluate_bits_mc(c, ms.LinkModel.awgn(10.0), 50000, 4, 1)
    assert 3.0 < ev.gmi() < 3.3
    assert ev.air_at(0.0) == pytest.approx(ev.gmi(), abs=1e-12)
    assert ev.air_at(2.0) < ev.gmi()


def test_effective_snr_composition():
    link = ms.LinkModel.awgn(17.5)
    snr = ms.effective_snr(link, 1.39, 2.29)
    assert snr.snr_db == pytest.approx(17.5, abs=1e-12)
    assert snr.sigma2_awgn == pytest.approx(10 ** -1.75, rel=1e-12)


def test_small_optimization_runs():
    init = ms.reduce_quadrant(ms.brgc_qam(4), ms.default_sign_positions(4))
    cfg = ms.OptimizerConfig()
    cfg.n_d_target = 1.0
    cfg.n_symbols_total = 10000
    cfg.seed = 3
    cfg.max_epochs = 3
    res = ms.optimize(init, ms.LinkModel.awgn(9.0), cfg)
    assert not res.trace.diverged
    e = sum(abs(z) ** 2 for z in res.shaped.reduced_points) / len(res.shaped.reduced_points)
    assert e == pytest.approx(1.0, abs=1e-9)


def test_mb_pmf_entropy_target():
    c = ms.brgc_qam(8)
    pmf = ms.mb_for_entropy(c, 6.4)
    assert pmf.entropy == pytest.approx(6.4, abs=1e-6)
    assert ms.pas_net_rate(6.4, 8, 5.0 / 6.0) == pytest.approx(6.4 - 8.0 / 6.0)


def test_constellation_file_roundtrip(tmp_path):
    c = ms.brgc_qam(5)
    path = str(tmp_path / "c.const")
    ms.write_constellation_file(path, c)
    back = ms.read_constellation_file(path)
    assert back.constellation.m == 5
    assert list(back.constellation.points) == list(c.points)


def test_fit_objective_self_consistency():
    skeleton = ms.FiberParams()
    skeleton.dispersion_ps_nm_km = 22.0
    truth = ms.FitParams()
    truth.nf_db, truth.snr_trx_db = 6.17, 20.78
    truth.alpha_db_per_km, truth.gamma_per_w_km = 0.183, 0.986
    grid = ms.SnrMeasurementGrid()
    grid.set_constellation(ms.brgc_qam(8))
    recs = []
    for loop in range(1, 6):
        r = ms.SnrMeasurement()
        r.distance_km = 200.0 * loop
        r.power_dbm = 0.5
        r.snr_db = ms.model_snr_db(truth, skeleton, grid, r.distance_km, r.power_dbm)
        recs.append(r)
    grid.records = recs
    assert ms.fit_objective(truth, grid, skeleton) == pytest.approx(0.0, abs=1e-12)
