import json

import pytest

from zetaladder import cli
from zetaladder.hl_integral import CHECKPOINT_ENV
from zetaladder.interactions import trig_identity, zt_power_signal
from zetaladder.reports import (CSV_COLUMNS, SweepSpec, build_manifest, emit_report,
                                expand_grid, format_csv, format_table, parse_jsonl,
                                placement_medians, plot_data, run_sweep)


@pytest.fixture(scope="module")
def reps(fz):
    return [trig_identity(fz, 700, 0.5, 0.3), zt_power_signal(1000, 1e6, 0.5)]


def test_spec_parsing():
    spec = SweepSpec.from_text("identities = trig, power_signal\nL = 700, 1400\n"
                               "k1 = all\nk2 = 1:3\nplacements = 5\nquad.h_max = 0.04\n")
    assert spec.identities == ["trig", "power_signal"] and spec.L == [700.0, 1400.0]
    assert spec.k1 == [1, 2, 3, 4, 5] and spec.k2 == [1, 2, 3]
    assert spec.overrides == {"quad.h_max": "0.04"}
    with pytest.raises(ValueError):
        SweepSpec.from_text("identities = trig\nbogus = 1\n")
    with pytest.raises(ValueError):
        SweepSpec.from_text("identities = eq71\n")


def test_empty_grid_has_valid_manifest(fz, tmp_path):
    s = run_sweep(SweepSpec(), fz, tmp_path / "out")
    assert s.reports == [] and s.rejected == [] and s.failures == []
    man = json.loads((tmp_path / "out" / "manifest.json").read_text())
    for key in ("c0", "omega_id", "d_policy", "f5_variant", "tolerances", "config"):
        assert key in man
    assert (tmp_path / "out" / "reports.csv").read_text().strip() == ",".join(CSV_COLUMNS)


def test_rejection_with_reason(fz, cfg):
    spec = SweepSpec(identities=["trig"], L=[700], mu=[0.3, 0.7])
    acc, rej = expand_grid(spec, cfg)
    assert len(acc) == 1 and len(rej) == 1
    assert "2mu+U=1.9 exceeds pi/2-eps" in rej[0]["reason"]
    s = run_sweep(spec, fz)
    assert len(s.reports) == 1 and len(s.rejected) == 1


def test_other_rejections(cfg):
    spec = SweepSpec(identities=["power_signal", "trig", "second_level_pair"], L=[30, 350],
                     U=[0.5], mu=[0.3], delta=[1e6], k1=[6])
    _, rej = expand_grid(spec, cfg)
    reasons = " ".join(r["reason"] for r in rej)
    assert "L0(delta" in reasons and "below T0" in reasons and "depth 6" in reasons


def test_k0_squared_count(cfg):
    spec = SweepSpec.from_text("identities = trig\nL = 700\nk1 = all\nk2 = all\n", cfg.ladder.k0)
    acc, rej = expand_grid(spec, cfg)
    assert len(acc) == cfg.ladder.k0 ** 2 == 25 and not rej


def test_placements_are_consecutive(cfg):
    acc, _ = expand_grid(SweepSpec(identities=["trig"], L=[700, 1400], placements=5), cfg)
    assert [p.L for p in acc] == [700, 701, 702, 703, 704, 1400, 1401, 1402, 1403, 1404]


def test_csv_one_row(reps):
    lines = format_csv(reps[:1]).splitlines()
    assert lines[0] == "identity,L,U,mu,k1,k2,k3,delta,lhs,rhs,raw_residual,corrected_residual"
    assert len(lines) == 2 and lines[1].startswith("trig,700,0.5,0.3,1,1,,,")


def test_jsonl_round_trip(reps, tmp_path):
    text = emit_report(reps, "jsonl", tmp_path / "r.jsonl")
    assert parse_jsonl((tmp_path / "r.jsonl").read_text()) == reps
    assert parse_jsonl(text) == reps


def test_table_width(reps):
    lines = format_table(reps).splitlines()
    assert max(len(x) for x in lines) <= 120
    assert len({len(x) for x in lines}) == 1


def test_emit_errors(reps, tmp_path):
    with pytest.raises(ValueError):
        emit_report(reps, "xml")
    with pytest.raises(OSError, match="missing"):
        emit_report(reps, "csv", tmp_path / "missing" / "x.csv")


def test_plot_data_and_medians(reps):
    data = plot_data(reps)
    assert set(data) == {"trig", "power_signal"}
    assert data["trig"].splitlines()[1].startswith("700 ")
    assert placement_medians(reps[:1], [700], 3)[700] == reps[0].raw_residual


def test_manifest_fields(cfg):
    man = build_manifest(SweepSpec(), cfg)
    assert man["c0"] == 0.0 and man["f5_variant"] == "sin" and man["d_policy"] == "smallest"
    assert man["omega_id"] == "ln_phi1_plus_1_plus_c_minus_ln2pi"
    json.dumps(man)


def test_sweep_order_independent_of_workers(fz):
    spec = SweepSpec(identities=["trig", "pair_cos"], L=[700], mu=[0.3, 0.4], workers=1)
    one = run_sweep(spec, fz).reports
    spec.workers = 4
    assert run_sweep(spec, fz).reports == one


def test_cli_ladder_and_factorize(checkpoint_dir, table, capsys):
    ck = ["--checkpoint", str(checkpoint_dir), "--no-save"]
    assert cli.main(ck + ["ladder", "2200", "--k", "2"]) == 0
    out = capsys.readouterr().out
    assert "phi1(T)" in out and "r=2" in out
    assert cli.main(ck + ["factorize", "f1", "--L", "700", "--mu", "0.3", "--format", "json"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["f_id"] == "f1_sin2" and rec["residual_exact"] <= 1e-4


def test_cli_identity_formats(checkpoint_dir, table, capsys):
    ck = ["--checkpoint", str(checkpoint_dir), "--no-save"]
    assert cli.main(ck + ["identity", "power_signal", "--L", "1e6", "--delta", "1000"]) == 0
    assert "identity = power_signal" in capsys.readouterr().out
    assert cli.main(ck + ["identity", "trig", "--L", "700", "--format", "csv"]) == 0
    assert capsys.readouterr().out.startswith("identity,L,")


def test_cli_errors(checkpoint_dir, capsys):
    ck = ["--checkpoint", str(checkpoint_dir), "--no-save"]
    assert cli.main(ck + ["identity", "triple", "--L", "700", "--mu", "0.6"]) == 2
    assert "error:" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        cli.main(ck + ["--set", "eval.nope=1", "ladder", "2200"])


def test_cli_checkpoint_uses_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(CHECKPOINT_ENV, str(tmp_path))
    assert cli.main(["checkpoint", "--to", "200"]) == 0
    out = capsys.readouterr().out
    assert str(tmp_path) in out and "last t=200" in out
    assert len(list(tmp_path.glob("hl-*.tsv"))) == 1


def test_cli_sweep_with_rejection(tmp_path, checkpoint_dir, table, capsys):
    spec = tmp_path / "s.txt"
    spec.write_text("identities = trig\nL = 700\nmu = 0.3, 0.7\n")
    assert cli.main(["--checkpoint", str(checkpoint_dir), "sweep", str(spec),
                     "--out", str(tmp_path / "o")]) == 0
    assert "rejected" in capsys.readouterr().err
    issues = json.loads((tmp_path / "o" / "issues.json").read_text())
    assert len(issues["rejected"]) == 1 and issues["failures"] == []
