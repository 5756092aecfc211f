import json
import os

import numpy as np
import pytest

import pylarx


def arx(rows, seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(rows)
    y = np.zeros(rows)
    for t in range(1, rows):
        y[t] = 0.3 + 0.5 * y[t - 1] + 0.7 * x[t] - 0.2 * x[t - 1] + 0.5 * rng.standard_normal()
    return y, x


SINGLETON = {
    "transform": "none",
    "variant": "baseline",
    "dependent": {"observed": "y", "variance_target": 1.0},
    "ar_lags": [1],
    "groups": [{"name": "x", "observed": "x", "lags": [0, 1]}],
}


def test_singleton_fit_matches_least_squares():
    y, x = arx(150, 1)
    r = pylarx.fit(np.column_stack([y, x]), ["y", "x"], SINGLETON)
    assert r["converged"]
    b = np.column_stack([np.ones(149), y[:-1], x[1:], x[:-1]])
    ols, *_ = np.linalg.lstsq(b, y[1:], rcond=None)
    w = r["w"][0]
    omega = r["omega"][0][0]
    got = [r["c"] / w, r["phi"][0], r["beta"][0][0] * omega / w, r["beta"][0][1] * omega / w]
    np.testing.assert_allclose(got, ols, rtol=1e-8, atol=1e-10)
    np.testing.assert_allclose(r["latent"], r["fitted"] + r["residuals"], atol=1e-12)


def test_lvmr_reaches_the_top_canonical_correlation():
    rng = np.random.default_rng(2)
    y = rng.standard_normal((300, 3))
    x = rng.standard_normal((300, 4)) + 0.5 * y[:, [0, 1, 2, 0]]
    r = pylarx.fit_lvmr(y, x)
    assert r["converged"]

    def whiten(m):
        m = m - m.mean(axis=0)
        q, _ = np.linalg.qr(m)
        return q

    top = np.linalg.svd(whiten(y).T @ whiten(x), compute_uv=False)[0]
    assert r["canonical_correlation"] == pytest.approx(top, abs=1e-8)


def test_oos_r2_and_errors():
    a = np.array([1.0, 2.0, 3.0])
    assert pylarx.oos_r2(a, a, np.zeros(3)) == pytest.approx(1.0)
    assert pylarx.oos_r2(a, np.zeros(3), np.zeros(3)) == pytest.approx(0.0)
    with pytest.raises(pylarx.Error, match="undefined_metric"):
        pylarx.oos_r2(a, a, a)


def test_property_suite_passes():
    results = pylarx.run_property_suite(5)
    assert [r["id"] for r in results] == list(range(1, 9))
    assert all(r["passed"] for r in results), results


def test_cli_synth_round_trip(tmp_path):
    config = os.path.join(os.environ.get("LARX_SOURCE_DIR", "."), "configs", "synthetic.json")
    status, out, err = pylarx.cli("synth", "--config", config, "--seed", "7", "--out", tmp_path / "s")
    assert status == 0, err
    table = pylarx.load_csv(str(tmp_path / "s" / "synth.csv"))
    assert table["values"].shape == (300, 7)
    status, out, err = pylarx.cli("fit", "--config", config, "--data", tmp_path / "s" / "synth.csv")
    assert status == 0, err
    report = json.loads(out)
    assert report["convergence"]["converged"]
    status, _, err = pylarx.cli("fit", "--config", tmp_path / "missing.json")
    assert status == 1
    assert json.loads(err)["error"]["code"] == "io"
