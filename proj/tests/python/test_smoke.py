import math

import pytest

import qwitness as qw


def test_oracle_moments_single_photon():
    assert qw.oracle_moments("fock_mixture", 1.0, 4) == [1, 3, 10, 42, 216]


def test_exact_onsets():
    assert qw.onset_order(qw.oracle_moments("fock_mixture", 1.0, 20), 20) == 4
    assert qw.onset_order(qw.oracle_moments("fock_mixture", 0.62, 20), 20) == 12
    assert qw.onset_order(qw.oracle_moments("fock_mixture", 0.5, 20), 20) is None
    assert qw.sweep([0.5, 0.62, 1.0]) == [None, 12, 4]


def test_single_photon_witness():
    sol = qw.optimize_witness(qw.oracle_moments("fock_mixture", 1.0, 4), 4)
    assert sol["min_F"] == pytest.approx(-7.0 / 99.0, rel=1e-10)
    assert len(sol["coeffs"]) == 2


def test_wigner_origin():
    assert qw.wigner_radial("fock_mixture", 1.0, 0.0) == pytest.approx(-1.0 / math.pi)


def test_sample_is_deterministic():
    a = qw.sample("thermal", 1.0, 1000, seed=3)
    b = qw.sample("thermal", 1.0, 1000, seed=3)
    assert a["x"] == b["x"]
    tagged = qw.sample("fock_mixture", 0.3, 500, seed=3, tagged=True)
    assert all(0.0 <= p < math.pi for p in tagged["phase"])


def test_analyze_report():
    x = qw.sample("fock_mixture", 1.0, 50000, seed=11)["x"]
    report = qw.analyze(x, {"max_order": 6, "split": "same"})
    assert report["schema"] == "qwitness.report"
    assert report["onset_order"] == 4
    sig = qw.significance(report["orders"][1]["coefficients"], x)
    assert sig["z_score"] < -5


def test_errors_are_typed():
    with pytest.raises(qw.QwitnessError, match="invalid-argument"):
        qw.oracle_moments("fock_mixture", 1.5, 2)
    with pytest.raises(qw.QwitnessError, match="insufficient-data"):
        qw.estimate_moments([0.5], 2)
