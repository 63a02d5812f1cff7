import csv
import json
import subprocess
import sys

import pytest

from nonlocal_korn.cli import RunConfig, main, parse_header
from nonlocal_korn.core import FracParams

FAST = ["--samples", "20000"]


def read(path):
    return path.read_text(encoding="utf-8")


def test_constants_csv(tmp_path, capsys):
    out = tmp_path / "constants.csv"
    assert main(["constants", "--d", "2", "--p", "2", "--s", "0.75", "--out", str(out), "--format", "csv"]) == 0
    lines = read(out).splitlines()
    assert lines[0].startswith("# config: ")
    names = [row[0] for row in csv.reader(lines[2:])]
    for want in ("Sigma", "Eta1", "Eta2", "Gamma1", "Gamma2", "l1", "l2", "kappa"):
        assert want in names
    assert "Sigma" in capsys.readouterr().out


def test_ps_one_is_a_usage_error(capsys):
    assert main(["hardy", "--d", "2", "--p", "2", "--s", "0.5"]) == 1
    assert "ps = 1 excluded" in capsys.readouterr().err
    assert main(["korn", "--d", "2", "--p", "3", "--s", "0.25"]) == 1
    assert main(["hardy", "--sweep", "default", "--d", "2"]) == 1
    assert main(["nonsense"]) == 1
    assert main(["hardy", "--samples", "0"]) == 1


def test_hardy_jsonl_and_header_round_trip(tmp_path):
    out = tmp_path / "hardy.jsonl"
    argv = ["hardy", "--d", "2", "--p", "2", "--s", "0.75", "--seed", "1234", "--out", str(out)] + FAST
    assert main(argv) == 0
    text = read(out)
    lines = text.splitlines()
    cfg = parse_header(text)
    assert cfg.seed == 1234 and cfg.params == (FracParams(2, 2.0, 0.75),)
    assert RunConfig.from_dict(json.loads(lines[0])["config"]) == cfg
    reports = [json.loads(x) for x in lines[1:]]
    assert len(reports) == 6 and all(r["check_name"] == "hardy" and r["passed"] for r in reports)


def test_config_file_wins_and_rejects_unknown(tmp_path, capsys):
    conf = tmp_path / "conf.json"
    conf.write_text(json.dumps({"subcommand": "groundstate", "params": [{"d": 2, "p": 2.0, "s": 0.25}],
                                "seed": 9}))
    out = tmp_path / "gs.jsonl"
    assert main(["groundstate", "--config", str(conf), "--seed", "5", "--out", str(out)]) == 0
    assert "overrides" in capsys.readouterr().err
    assert parse_header(read(out)).seed == 9
    conf.write_text(json.dumps({"subcommand": "groundstate", "colour": 1}))
    assert main(["groundstate", "--config", str(conf)]) == 1
    conf.write_text(json.dumps({"quad": {"n_sample": 10}}))
    assert main(["groundstate", "--config", str(conf)]) == 1


def test_env_seed(tmp_path, monkeypatch):
    monkeypatch.setenv("NONLOCAL_KORN_SEED", "77")
    out = tmp_path / "g.jsonl"
    assert main(["groundstate", "--d", "1", "--p", "2", "--s", "0.75", "--out", str(out)]) == 0
    assert parse_header(read(out)).seed == 77


def test_byte_identical_across_jobs(tmp_path):
    outs = []
    for jobs in ("1", "3"):
        out = tmp_path / f"k{jobs}.jsonl"
        assert main(["korn", "--d", "2", "--s", "0.25", "--s", "0.75", "--jobs", jobs, "--out", str(out)]
                    + FAST) in (0, 2)
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    summary = [json.loads(x) for x in outs[0].decode().splitlines() if "korn_summary" in x]
    assert len(summary) == 2
    for s in summary:
        body = s["korn_summary"]
        assert {"d", "s", "l1", "l2", "kappa", "band_lower", "band_upper", "per_field_ratios"} <= set(body)


def test_failure_exit_code(tmp_path):
    # the scaling lemma is only claimed for lambda >= 1; at lambda = 0.2 it fails
    argv = ["scaling", "--d", "2", "--p", "2", "--s", "0.75", "--lambda", "0.2"] + FAST
    assert main(argv) == 2


def test_plot_data(tmp_path):
    korn = tmp_path / "korn.jsonl"
    ss = [x for s in ("0.1", "0.2", "0.3", "0.4", "0.6", "0.7", "0.8", "0.9") for x in ("--s", s)]
    main(["korn", "--d", "2", "--out", str(korn)] + ss + FAST)
    plot = tmp_path / "plot.csv"
    assert main(["plot-data", str(korn), "--out", str(plot)]) == 0
    mixed = tmp_path / "mixed.csv"
    assert main(["plot-data", str(korn), "--out", str(mixed)]) == 0
    files = sorted(p.name for p in tmp_path.glob("mixed_*.csv"))
    assert files == ["mixed_korn_halfspace.csv", "mixed_korn_wholespace.csv"]
    rows = list(csv.DictReader(open(tmp_path / "mixed_korn_wholespace.csv", encoding="utf-8")))
    for fid in {r["field_id"] for r in rows}:
        assert sum(r["field_id"] == fid for r in rows) == 8
    # one report in, one row out
    single = tmp_path / "one.jsonl"
    lines = read(korn).splitlines()
    single.write_text(lines[0] + "\n" + lines[1] + "\n")
    one = tmp_path / "one.csv"
    assert main(["plot-data", str(single), "--out", str(one)]) == 0
    assert len(read(one).splitlines()) == 2
    empty = tmp_path / "empty.jsonl"
    empty.write_text(lines[0] + "\n")
    assert main(["plot-data", str(empty), "--out", str(tmp_path / "e.csv")]) == 1


def test_console_script_entry():
    res = subprocess.run([sys.executable, "-m", "nonlocal_korn.cli", "pointwise", "--p", "2"],
                         capture_output=True, text=True, timeout=300)
    assert res.returncode == 0, res.stderr
    assert "1 checks, 0 failed" in res.stdout


@pytest.mark.parametrize("fmt", ["json", "csv"])
def test_fields_file(tmp_path, fmt):
    fields = tmp_path / "fields.json"
    fields.write_text(json.dumps(["bump_mid", {"family": "Bump", "parameters": {
        "d": 2, "center": [0.0, 1.0], "radii": [0.4, 0.4], "amplitude": [0.0, 1.0]},
        "domain_tag": "HalfSpace", "smoothness": "C1_compact", "name": "mine"}]))
    out = tmp_path / f"h.{fmt}"
    assert main(["hardy", "--d", "2", "--p", "2", "--s", "0.25", "--fields", str(fields), "--format", fmt,
                 "--out", str(out)] + FAST) == 0
    text = read(out)
    assert "mine" in text and "bump_mid" in text and "bump_far" not in text
    assert parse_header(text).fields == str(fields)
