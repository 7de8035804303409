from __future__ import annotations

import json

import pytest

from adelic_brs.cli import ConfigError, main, parse_config

WORKED = {
    "primes": [2],
    "dimension": 1,
    "alpha": [{"real": {"2": "1"}, "p_parts": {"2": "1/2"}}],
    "spec": {"gamma": ["1/2"], "eta": 1},
    "params": {"n_max": 200, "stride": 20},
}


def _write(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


def test_verify_worked_example(tmp_path, capsys):
    code = main(["verify", _write(tmp_path, WORKED), "--output-dir", str(tmp_path / "out")])
    out = capsys.readouterr().out
    assert code == 0
    assert "V = 3/4 + (1/2)√2" in out
    report = json.loads((tmp_path / "out" / "verify_report.json").read_text())
    assert report["ok"] and report["volume"] == "1:3/4;2:1/2"
    manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert manifest["set"]["delta"] == [2] and "verify_report.json" in manifest["outputs"]


def test_ergodic_certificate(tmp_path, capsys):
    cfg = {"primes": [2], "dimension": 2, "alpha": [{"real": {"2": "1"}}, {"real": {"2": "2", "1": "1"}}]}
    code = main(["ergodic", _write(tmp_path, cfg), "--output-dir", str(tmp_path)])
    assert code == 3
    assert "(2, -1, constant 1)" in capsys.readouterr().out
    cfg["alpha"][1] = {"real": {"3": "1"}}
    assert main(["ergodic", _write(tmp_path, cfg), "--output-dir", str(tmp_path)]) == 0


def test_volumes_csv(tmp_path):
    cfg = {"primes": [2], "dimension": 1, "alpha": [{"real": {"2": "1"}}], "params": {"height": 1, "eta_range": [-1, 1]}}
    assert main(["volumes", _write(tmp_path, cfg), "--output-dir", str(tmp_path)]) == 0
    rows = (tmp_path / "volumes.csv").read_text().splitlines()
    assert len(rows) == 6
    assert [r.split(",")[-1] for r in rows[1:]] == ["1:0/1", "1:-1/1;2:1/1", "1:1/1", "2:1/1", "1:1/1;2:1/1"]


def test_inadmissible_volume(tmp_path):
    cfg = dict(WORKED, spec={"gamma": ["1"], "eta": -5})
    assert main(["construct", _write(tmp_path, cfg), "--output-dir", str(tmp_path)]) == 3


def test_non_ergodic_construct(tmp_path):
    cfg = dict(WORKED, alpha=[{"real": {"1": "3/7"}}])
    assert main(["construct", _write(tmp_path, cfg), "--output-dir", str(tmp_path)]) == 3


@pytest.mark.parametrize("mutate,field", [
    (lambda c: c.update(primes=[4]), "primes[0]"),
    (lambda c: c.update(spec={"gamma": [0.5], "eta": 1}), "spec.gamma[0]"),
    (lambda c: c.update(spec={"gamma": ["1/3"], "eta": 1}), "spec.gamma[0]"),
    (lambda c: c.update(alpha=[{"real": {"2": "x"}}]), "alpha[0].real.2"),
    (lambda c: c.update(params={"n_max": -1}), "params.n_max"),
    (lambda c: c.update(params={"bogus": 1}), "params.bogus"),
    (lambda c: c.pop("dimension"), "dimension"),
])
def test_config_errors_name_field(tmp_path, capsys, mutate, field):
    cfg = json.loads(json.dumps(WORKED))
    mutate(cfg)
    with pytest.raises(ConfigError) as info:
        parse_config(cfg)
    assert info.value.field == field
    assert main(["construct", _write(tmp_path, cfg)]) == 2
    assert field in capsys.readouterr().err


def test_config_round_trip():
    cfg = parse_config(dict(WORKED, params={"n_max": 10, "eta_range": [-1, 2], "v_cap": {"1": "2", "2": "1/3"},
                                            "weyl_gamma": ["3/4"], "weyl_grid": [5, 10], "svg": True}))
    again = parse_config(json.loads(json.dumps(cfg.to_dict())))
    assert again == cfg and again.digest() == cfg.digest()


def test_orbit_replay_and_threads(tmp_path, capsys):
    path = _write(tmp_path, WORKED)
    assert main(["orbit", path, "--output-dir", str(tmp_path / "a"), "--svg"]) == 0
    assert (tmp_path / "a" / "orbit.svg").read_text().startswith("<svg")
    assert main(["orbit", path, "--output-dir", str(tmp_path / "b"), "--threads", "2", "--svg"]) == 0
    assert (tmp_path / "a" / "orbit.csv").read_bytes() == (tmp_path / "b" / "orbit.csv").read_bytes()
    assert main(["replay", str(tmp_path / "a" / "manifest.json"), "--output-dir", str(tmp_path / "c")]) == 0
    assert "replay identical" in capsys.readouterr().out
    assert (tmp_path / "c" / "orbit.csv").read_bytes() == (tmp_path / "a" / "orbit.csv").read_bytes()


def test_replay_detects_tampering(tmp_path):
    assert main(["orbit", _write(tmp_path, WORKED), "--output-dir", str(tmp_path / "a")]) == 0
    m = json.loads((tmp_path / "a" / "manifest.json").read_text())
    m["outputs"]["orbit.csv"] = "0" * 64
    (tmp_path / "m.json").write_text(json.dumps(m))
    assert main(["replay", str(tmp_path / "m.json"), "--output-dir", str(tmp_path / "c")]) == 4


def test_weyl_table(tmp_path):
    cfg = dict(WORKED, params={"weyl_grid": [10, 100], "precision_bits": 96})
    assert main(["weyl", _write(tmp_path, cfg), "--output-dir", str(tmp_path)]) == 0
    rows = (tmp_path / "weyl.csv").read_text().splitlines()
    assert len(rows) == 5 and all(r.endswith(",1") for r in rows[1:])


def test_construct_serialization(tmp_path):
    assert main(["construct", _write(tmp_path, WORKED), "--output-dir", str(tmp_path)]) == 0
    data = json.loads((tmp_path / "brs.json").read_text())
    assert data["volume"] == "1:3/4;2:1/2" and data["P_A"]["spans"] == [["1:3/2;2:1/1"]]


def test_verify_exits_4_on_violation(tmp_path, monkeypatch):
    import adelic_brs.cli as cli
    from adelic_brs.harness import LemmaChainReport

    def broken(spec, rot, n, brs=None):
        return LemmaChainReport(False, 1, brs.volume, {"n": 0, "chi_A": 1, "chi_B": 0, "chi_PB": 1})

    monkeypatch.setattr(cli, "lemma_chain_check", broken)
    assert main(["verify", _write(tmp_path, WORKED), "--output-dir", str(tmp_path)]) == 4
