import math

import numpy as np
import pytest

import adsholo


def test_massless_modes():
    m = adsholo.Model(nu=0.5, K=8)
    assert np.allclose(m.omegas, np.arange(1, 9), atol=1e-12)
    x = 0.3
    want = [math.sqrt(2 / math.pi) * math.sin((k + 1) * (x + math.pi / 2)) for k in range(8)]
    assert np.allclose(m.modes_at(x), want, atol=1e-12)
    assert np.allclose(m.betas("-"), np.arange(1, 9) * math.sqrt(2 / math.pi))


def test_spectrum_matches_fd():
    m = adsholo.Model(nu=0.7, K=10)
    assert np.max(np.abs(m.omegas - adsholo.fd_spectrum(0.7, 10))) < 1e-6


def test_positivity_and_kahler():
    J = np.array([[0.0, 1.0], [-1.0, 0.0]])
    r = adsholo.check_positivity(np.eye(2), 2 * J, 2.0)
    assert r["holds"] and abs(r["domination_norm"] - 2) < 1e-12
    k = adsholo.kahler_from_covariance(np.eye(2), 2 * J)
    assert k["pure"] and k["doubled_dim"] == 0
    assert np.allclose(k["j"], J)


def test_vacuum_expectation():
    W = adsholo.weyl_operator(1, 40, np.array([1.0 + 0j]))
    assert abs(W[0, 0] - math.exp(-0.25)) < 1e-8
    assert adsholo.fock_dimension(2, 40) == 861


def test_config_roundtrip_and_errors():
    text = adsholo.default_config_text()
    assert adsholo.normalize_config(adsholo.normalize_config(text)) == adsholo.normalize_config(text)
    with pytest.raises(adsholo.AdsholoError, match="model.nu"):
        adsholo.normalize_config("[model]\nnu = 0\n")


def test_run_modes(tmp_path):
    code, report = adsholo.run("modes", "[model]\nK = 6\nN = 64\n", str(tmp_path))
    assert code == 0
    assert "PASS" in report
    rows = [l for l in (tmp_path / "modes.csv").read_text().splitlines() if l and not l.startswith("#")]
    assert rows[0] == "k,omega,beta_minus,beta_plus"
    assert len(rows) == 7
    assert adsholo.run("bogus")[0] == 2


def test_uc_scan_empty_and_nested():
    m = adsholo.Model()
    assert m.uc_scan([], 10)[0] == 0.0
    s = [m.uc_scan([("-", -h, h)], 10)[0] for h in (0.5, 1.0, 2.0, 3.3)]
    assert all(b >= a for a, b in zip(s, s[1:]))
