import json

import numpy as np
import pytest

from randswitch import cli, scenarios
from randswitch import matrixcore as mc


def test_registry_contents():
    reg = scenarios.registry()
    assert set(reg) == {"ainscosta", "astacoins", "fmg3d", "ly3d", "nobra"}
    a = reg["ainscosta"]
    np.testing.assert_array_equal(a.fields[0].C, [[2.0, 1.0], [1.0, 1.0]])
    np.testing.assert_array_equal(a.fields[0].D, [6.0, 1.0])
    np.testing.assert_array_equal(a.fields[1].C, [[1.0, 1.0], [1.0, 3.0]])
    np.testing.assert_array_equal(a.fields[1].D, [1.0, 7.0])
    fm = reg["fmg3d"]
    np.testing.assert_array_equal(fm.As[0], [[-1, 0, 0], [10, -1, 0],
                                             [0, 0, -10]])
    ly3 = reg["ly3d"]
    np.testing.assert_array_equal(ly3.fields[0].D, [11.0, 11.0, 20.0])
    np.testing.assert_array_equal(ly3.fields[1].D, [20.0, 20.0, 11.0])
    # the epidemic embedding recovers the linear family at the origin
    np.testing.assert_allclose(ly3.matrices(), fm.As, atol=1e-12)


def test_registry_linearizations():
    reg = scenarios.registry()
    As = reg["astacoins"].matrices()
    np.testing.assert_allclose(As[0], [[-1.0, 4.0], [1 / 16, -1.0]], atol=1e-14)
    np.testing.assert_allclose(As[1], [[-1.0, 1 / 16], [4.0, -1.0]], atol=1e-14)
    for A in As:
        assert mc.spectral_abscissa(A) == pytest.approx(-0.5, abs=1e-9)


def test_unknown_scenario():
    with pytest.raises(KeyError):
        scenarios.get("nonesuch")


def test_scenario_json_roundtrip(tmp_path):
    s = scenarios.get("astacoins")
    doc = scenarios.scenario_to_json(s)
    path = tmp_path / "scen.json"
    path.write_text(json.dumps(doc))
    back = scenarios.load_scenario(path)
    assert back.name == s.name
    np.testing.assert_array_equal(back.fields[0].C, s.fields[0].C)
    np.testing.assert_array_equal(back.base_rates, s.base_rates)
    assert back.seed == s.seed


def test_scenario_rejects_zero_replicates():
    s = scenarios.get("nobra")
    doc = scenarios.scenario_to_json(s)
    doc["replicates"] = 0
    with pytest.raises(ValueError):
        scenarios.scenario_from_json(doc)


@pytest.fixture(scope="module")
def quick_nobra():
    s = scenarios.get("nobra")
    s.horizon = 60.0
    s.replicates = 20
    s.lyap_T = 60.0
    return s


def test_run_writes_report_and_bands_pass(quick_nobra, tmp_path):
    report = scenarios.run(quick_nobra, tmp_path)
    assert report.all_passed()
    assert (tmp_path / "report_nobra.json").exists()
    assert (tmp_path / "fig_trajectories_nobra.csv").exists()
    doc = json.loads((tmp_path / "report_nobra.json").read_text())
    assert all("provenance" in b for b in doc["bands"])


def test_run_reproducible_byte_identical(quick_nobra, tmp_path):
    d1 = tmp_path / "a"
    d2 = tmp_path / "b"
    scenarios.run(quick_nobra, d1)
    scenarios.run(quick_nobra, d2)
    csv1 = (d1 / "fig_trajectories_nobra.csv").read_bytes()
    csv2 = (d2 / "fig_trajectories_nobra.csv").read_bytes()
    assert csv1 == csv2


def test_cli_lyapunov_smoke(capsys):
    rc = cli.main(["lyapunov", "--scenario", "nobra", "--T", "20",
                   "--N", "5"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "angular-average" in out and "log-norm" in out


def test_cli_sweep_smoke(tmp_path, capsys):
    rc = cli.main(["sweep", "--scenario", "astacoins", "--betas", "5,20",
                   "--T", "20", "--N", "5", "--out", str(tmp_path)])
    assert rc == 0
    path = tmp_path / "fig_lambda_beta_astacoins.csv"
    header = path.read_text().splitlines()[0]
    assert header == "beta,lambda_hat,stderr,T,N,seed"


def test_cli_simulate_smoke(quick_nobra, tmp_path, monkeypatch, capsys):
    monkeypatch.setattr(scenarios, "get", lambda name: quick_nobra)
    rc = cli.main(["simulate", "--scenario", "nobra", "--out",
                   str(tmp_path)])
    assert rc == 0
    assert "pass" in capsys.readouterr().out


def test_cli_requires_scenario_or_config():
    with pytest.raises(SystemExit):
        cli.main(["lyapunov"])
