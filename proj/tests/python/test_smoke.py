import math

import pytest

import domino


def test_radius_and_path_loss():
    assert domino.path_loss(2.0) == pytest.approx(0.125)
    assert domino.affected_radius(1.0, 1.0, 10.0, 0.01) == pytest.approx(46.4159, abs=1e-4)


def test_array_and_threshold():
    r = domino.array_cascade(1.0, 0.01)
    assert r["a"][2] == pytest.approx(1.125)
    assert r["outcome"] == "diverged"
    assert domino.array_cascade(0.005, 0.01)["affected_count"] == 0
    s = domino.find_divergence_threshold(0.1, n_max=5000, tol=1e-6)
    assert 0.5 < s <= domino.critical_coupling(3.0) + 1e-6


def test_percolation_bounds():
    b = domino.percolation_bounds()
    assert b["lambda_exist"] == pytest.approx(math.log(2) / 12.5)
    assert b["lambda_absent"] < b["lambda_exist"]


def test_power_and_cascade():
    net = {
        "alpha": 3.0, "noise": 1e-8, "d_ii": 10.0, "window": [1000.0, 1000.0],
        "links": [
            {"id": 0, "tx": [500.0, 500.0], "rx": [490.0, 500.0], "beta": 1.0, "delta": 0.01},
            {"id": 1, "tx": [540.0, 500.0], "rx": [530.0, 500.0], "beta": 1.0, "delta": 0.01},
        ],
    }
    p = domino.min_power(net, "direct")
    assert p["feasible"]
    assert all(s == pytest.approx(1.0, rel=1e-9) for s in p["sinr"])
    c = domino.run_cascade(net, 0.01)
    assert c["rounds"][0] == [1]
    assert c["p_after"][1] - c["p_before"][1] == pytest.approx((10 / 30) ** 3)


def test_random_network_shape():
    net = domino.random_network(4e-4, 500.0, 500.0, seed=3)
    assert len(net["links"]) > 50
    assert domino.min_power(net)["spectral_radius"] > 0


def test_fits():
    assert domino.powerlaw_fit([i ** -2.0 for i in range(1, 10)])["slope"] == pytest.approx(-2.0)
    assert domino.poisson_fit([0] * 50)["lambda"] == 0.0


def test_config_errors():
    assert domino.parse_config({"experiment": "cascade", "delta_db": -20})["delta"] == [pytest.approx(0.01)]
    with pytest.raises(ValueError, match="/lambda"):
        domino.parse_config({"experiment": "cascade", "lambda": -1})


def test_run_experiment(tmp_path):
    m = domino.run_experiment({"experiment": "array", "output_dir": str(tmp_path)})
    assert m["status"] == "ok"
    assert {f["path"] for f in m["files"]} == {"array.json", "array_sequence.csv"}
    assert (tmp_path / "manifest.json").exists()
