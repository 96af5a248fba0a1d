import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from spinweak import campaign
from spinweak.campaign import CampaignConfig, fringe_campaign, fringe_quartet, sweep_campaign
from spinweak.cli import main
from spinweak.detector import DetectorModel
from spinweak.errors import InvalidArgumentError
from spinweak.experiment import NOMINAL_ALPHA, EvolutionModel, intensity_quartet
from spinweak.hilbert import SPIN_X_PLUS, PostSelection


def write_json(tmp_path, doc):
    path = tmp_path / "campaign.json"
    path.write_text(json.dumps(doc))
    return str(path)


def read_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def run_cli(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


# -- config -------------------------------------------------------------------


def test_config_defaults_and_validation():
    cfg = CampaignConfig()
    assert cfg.alpha == pytest.approx(0.261799, abs=1e-6)
    assert cfg.model is EvolutionModel.EXACT
    assert cfg.detector is None
    assert len(cfg.thetas) == 61 and cfg.thetas[0] == -math.pi and cfg.thetas[-1] == math.pi
    for bad in (dict(theta_count=1), dict(theta_start=1.0, theta_stop=0.0), dict(phi=math.inf),
                dict(contrast_policy="maybe")):
        with pytest.raises(InvalidArgumentError):
            CampaignConfig(**bad)


def test_config_from_json_document():
    cfg = CampaignConfig.from_dict({
        "phi": 1.5707963267948966, "alpha": 0.1, "model": "re-exp",
        "theta_grid": {"start": -1, "stop": 1, "count": 5},
        "detector": {"contrast": 0.7, "flux": 10, "exposure": 2, "background": 0.5, "seed": 4},
        "contrast_policy": "uniform",
    })
    assert cfg.model is EvolutionModel.REEXP and cfg.contrast_policy == "uniform"
    assert list(cfg.thetas) == pytest.approx([-1, -0.5, 0, 0.5, 1])
    assert cfg.detector == DetectorModel(contrast=0.7, flux=10, exposure=2, background_rate=0.5, seed=4)
    assert CampaignConfig.from_dict({"detector": "ideal"}).detector is None
    with pytest.raises(InvalidArgumentError):
        CampaignConfig.from_dict({"colour": "blue"})


# -- fringe --------------------------------------------------------------------


def test_fringe_defaults():
    res = fringe_campaign(CampaignConfig())
    ref = [r for r in res.rows if r["scan"] == "reference"]
    lowest = min(ref, key=lambda r: r["i_o_ideal"])
    assert lowest["chi_rad"] == pytest.approx(math.pi)
    assert res.reference_fit.peak_chi == pytest.approx(0.0, abs=1e-12)
    assert res.shift == pytest.approx(-0.1512, abs=1e-3)
    reexp = fringe_campaign(CampaignConfig(model=EvolutionModel.REEXP))
    assert reexp.shift == pytest.approx(-0.151150, abs=5e-7)


def test_fringe_quartet_matches_direct_readout():
    cfg = CampaignConfig()
    res = fringe_campaign(cfg)
    direct = intensity_quartet(SPIN_X_PLUS, PostSelection(cfg.theta, cfg.phi), cfg.coupling, cfg.model)
    assert fringe_quartet(res).as_array() == pytest.approx(direct.as_array(), abs=1e-12)


def test_fringe_zero_alpha_scans_coincide():
    res = fringe_campaign(CampaignConfig(alpha=0.0))
    ref = [r for r in res.rows if r["scan"] == "reference"]
    weak = [r for r in res.rows if r["scan"] == "weak"]
    assert len(ref) == len(weak) == 32
    for a, b in zip(ref, weak):
        assert {k: v for k, v in a.items() if k != "scan"} == {k: v for k, v in b.items() if k != "scan"}


def test_fringe_cli_writes_sidecar(tmp_path, capsys):
    out = tmp_path / "fringe.csv"
    code, stdout, err = run_cli(["fringe", "--out", str(out)], capsys)
    assert code == 0 and stdout == ""
    rows = read_csv(out.read_text())
    assert list(rows[0]) == list(campaign.FRINGE_COLUMNS)
    fit = {r["quantity"]: float(r["value"]) for r in read_csv((tmp_path / "fringe_fit.csv").read_text())}
    assert fit["fringe_shift"] == pytest.approx(-0.1512, abs=1e-3)
    assert {"chi_x_plus", "chi_x_minus", "chi_y_plus", "chi_y_minus"} <= set(fit)
    assert "fringe_shift" in err


def test_fringe_noisy_is_deterministic(capsys):
    argv = ["fringe", "--contrast", "0.8", "--flux", "1000", "--exposure", "10", "--seed", "7"]
    first = run_cli(argv, capsys)[1]
    second = run_cli(argv, capsys)[1]
    assert first == second
    assert first != run_cli(argv[:-1] + ["8"], capsys)[1]
    assert all(r["sampled_counts"].isdigit() for r in read_csv(first))


# -- sweep -----------------------------------------------------------------------


def test_sweep_rows(capsys):
    code, stdout, _ = run_cli(["sweep"], capsys)
    assert code == 0
    assert stdout.splitlines()[0] == ",".join(campaign.SWEEP_COLUMNS)
    rows = read_csv(stdout)
    assert len(rows) == 61
    skipped = [r for r in rows if r["clamped_flags"] == "skipped"]
    assert [float(r["theta"]) for r in skipped] == pytest.approx([-math.pi / 2])
    assert skipped[0]["re_est"] == "nan"
    mid = next(r for r in rows if abs(float(r["theta"]) - math.pi / 2) < 1e-9)
    assert abs(float(mid["re_est"])) < 1e-6


def test_sweep_reexp_matches_closed_form_exactly():
    for phi in (0.0, math.pi / 4, math.pi / 2):
        rows = sweep_campaign(CampaignConfig(phi=phi, model=EvolutionModel.REEXP))
        kept = [r for r in rows if not r["clamped_flags"]]
        aliased = [r for r in kept if abs(NOMINAL_ALPHA * r["re_true"]) >= math.pi]
        # only the two neighbours of theta = -pi/2 at phi = 0 rotate past pi
        assert len(aliased) == (2 if phi == 0.0 else 0)
        for r in kept:
            assert r["im_est"] == pytest.approx(r["im_true"], abs=1e-10)
            if r in aliased:
                assert r["re_est"] - r["re_true"] == pytest.approx(
                    math.copysign(2 * math.pi / NOMINAL_ALPHA, r["re_est"] - r["re_true"]), abs=1e-10)
                continue
            for k in ("re", "mod"):
                assert r[f"{k}_est"] == pytest.approx(r[f"{k}_true"], abs=1e-10)


def test_sweep_noisy_row_has_errors():
    cfg = CampaignConfig(detector=DetectorModel(seed=3), contrast_policy="uniform", theta_count=7)
    for r in sweep_campaign(cfg):
        if r["clamped_flags"] == "skipped":
            continue
        assert r["se_re"] > 0 and r["se_im"] > 0 and r["mod_est"] >= 0


def test_format_is_locale_free_full_precision():
    assert campaign.format_value(0.1) == "0.10000000000000001"
    assert campaign.format_value(math.nan) == "nan"
    assert campaign.format_value(3) == "3"
    text = campaign.rows_to_csv([{"a": 1.5, "b": "x"}], ("a", "b"))
    assert text == "a,b\n1.5,x\n"


# -- montecarlo ------------------------------------------------------------------


def test_montecarlo_single_point(tmp_path, capsys):
    argv = ["montecarlo", "--replicates", "200", "--contrast", "0.8", "--quartet-counts", "50000",
            "--contrast-policy", "uniform", "--model", "re-exp", "--seed", "0"]
    cfg = {"theta_grid": {"start": 0.0, "stop": 0.1, "count": 2}}
    code, stdout, _ = run_cli(argv + ["--config", write_json(tmp_path, cfg)], capsys)
    assert code == 0
    row = read_csv(stdout)[0]
    assert float(row["theta"]) == 0.0 and int(row["n_ok"]) == 200
    for comp in ("re", "im", "mod"):
        assert abs(float(row[f"{comp}_pull_std"]) - 1) < 0.2


def test_montecarlo_rejects_single_replicate(capsys):
    code, stdout, _ = run_cli(["montecarlo", "--replicates", "1"], capsys)
    assert code == 2 and stdout == ""


def test_montecarlo_policy_none_inflates_modulus():
    cfg = CampaignConfig(
        theta=math.pi / 2, theta_start=math.pi / 2, theta_stop=2.0, theta_count=2,
        detector=DetectorModel(contrast=0.8, background_rate=0.0, flux=1e7, exposure=1.0),
        contrast_policy="none", replicates=20, model=EvolutionModel.REEXP,
    )
    row = campaign.montecarlo_campaign(cfg)[0]
    assert row["mod_mean"] == pytest.approx(math.acos(0.8) / NOMINAL_ALPHA, abs=0.02)


# -- determinism and exit codes ----------------------------------------------------------


@pytest.mark.parametrize("command", ["sweep", "montecarlo"])
def test_worker_count_does_not_change_output(command, tmp_path, capsys):
    base = [command, "--contrast", "0.8", "--seed", "11", "--replicates", "5", "--quartet-counts", "20000"]
    outputs = []
    for workers in ("1", "2", "3"):
        out = tmp_path / f"{command}_{workers}.csv"
        assert main(base + ["--workers", workers, "--out", str(out)]) == 0
        outputs.append(out.read_bytes())
    capsys.readouterr()
    assert outputs[0] == outputs[1] == outputs[2]
    assert b"\r\n" not in outputs[0]


def test_exit_codes(tmp_path, capsys):
    assert run_cli(["sweep", "--contrast", "1.5"], capsys)[0] == 2
    assert run_cli(["sweep", "--config", str(tmp_path / "missing.json")], capsys)[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run_cli(["sweep", "--config", str(bad)], capsys)[0] == 2
    assert run_cli(["sweep", "--out", str(tmp_path / "no" / "such" / "dir.csv")], capsys)[0] == 3
    assert run_cli(["sweep", "--alpha", "0"], capsys)[0] == 2
    # zero flux leaves a flat scan whose phase cannot be fitted
    assert run_cli(["fringe", "--flux", "0", "--background", "0"], capsys)[0] == 4


def test_flags_override_config(tmp_path, capsys):
    path = write_json(tmp_path, {"phi": 0.0, "theta_grid": {"start": 1.0, "stop": 1.2, "count": 2}})
    rows = read_csv(run_cli(["sweep", "--config", path, "--phi", "0.5"], capsys)[1])
    assert {float(r["phi"]) for r in rows} == {0.5}
    assert [float(r["theta"]) for r in rows] == [1.0, 1.2]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "spinweak", "sweep", "--model", "re-exp", "--phi", "1.5707963267948966"],
                          capture_output=True, text=True, check=True)
    rows = [r for r in read_csv(proc.stdout) if not r["clamped_flags"]]
    assert rows and np.allclose([float(r["mod_est"]) for r in rows], 1.0, atol=1e-10)
