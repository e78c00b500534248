import json

import numpy as np
import pytest

from adft.cli import OUTPUT_DIR_ENV, main
from adft.transforms import GaussianMatrix, adft32_matrix


def _data_lines(path):
    return [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]


def test_matrix_adft_json(tmp_path):
    out = tmp_path / "adft.json"
    assert main(["matrix", "--kind", "adft", "-o", str(out)]) == 0
    m = GaussianMatrix.from_json(out.read_text())
    assert m == adft32_matrix()
    manifest = json.loads((tmp_path / "adft.json.manifest.json").read_text())
    assert manifest["subcommand"] == "matrix"
    assert manifest["parameters"]["kind"] == "adft"
    assert {"tool_version", "timestamp", "outputs", "seed"} <= set(manifest)


def test_matrix_dft_reload_unitary(tmp_path):
    out = tmp_path / "dft.json"
    assert main(["matrix", "--kind", "dft", "-o", str(out)]) == 0
    f = GaussianMatrix.from_json(out.read_text()).to_complex()
    np.testing.assert_allclose(f @ f.conj().T, 32 * np.eye(32), atol=1e-9)


def test_invalid_kind_exits_nonzero(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["matrix", "--kind", "fft"])
    assert exc.value.code != 0
    assert "usage" in capsys.readouterr().err


def test_verify_clean(capsys):
    assert main(["verify"]) == 0
    out = capsys.readouterr().out
    assert "additions: 348" in out
    assert "FAIL" not in out


def test_verify_mutation_fails(capsys):
    assert main(["verify", "--mutate-stage", "3", "--mutate-index", "0"]) == 1
    out = capsys.readouterr().out
    assert "first differing entry" in out


def test_verify_json(capsys):
    assert main(["verify", "--json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["passed"] is True
    assert all(isinstance(v, bool) for v in report["checks"].values())
    assert report["additions"] == 348


def test_verify_bad_stage(capsys):
    assert main(["verify", "--mutate-stage", "9"]) == 1
    assert "error" in capsys.readouterr().err


def test_response_csv(tmp_path, capsys):
    out = tmp_path / "resp.csv"
    assert main(["response", "--transform", "adft", "--grid", "4096", "-o", str(out)]) == 0
    assert "-11.03 dB" in capsys.readouterr().err
    text = out.read_text()
    assert text.startswith("#")
    lines = _data_lines(out)
    assert len(lines[0].split(",")) == 33
    assert len(lines) == 4097


def test_response_json(tmp_path):
    out = tmp_path / "resp.json"
    assert main(["response", "--transform", "dft", "--grid", "1024", "--json", "-o", str(out)]) == 0
    data = json.loads(out.read_text())
    assert abs(data["summary"]["largest_side_lobe_db"] + 13.26) < 0.05


def test_beams1d(tmp_path):
    out = tmp_path / "b.csv"
    assert main(["beams1d", "--grid", "181", "-o", str(out)]) == 0
    assert len(_data_lines(out)) == 182


def test_beams2d_self_check(tmp_path, capsys):
    out = tmp_path / "beam.csv"
    assert main(["beams2d", "--k", "5", "--l", "9", "--grid", "37x19", "-o", str(out)]) == 0
    assert "separability check passed" in capsys.readouterr().err
    assert len(_data_lines(out)) == 1 + 37 * 19


def test_beams2d_bad_grid(tmp_path, capsys):
    assert main(["beams2d", "--k", "1", "--l", "1", "--grid", "abc", "-o", str(tmp_path / "x.csv")]) == 1
    assert not (tmp_path / "x.csv").exists()


def test_nearfield(tmp_path, capsys):
    out = tmp_path / "nf.csv"
    assert main(["nearfield", "--range", "7", "--azimuth=-20:20:1", "-o", str(out)]) == 0
    assert "deviation" in capsys.readouterr().err
    assert len(_data_lines(out)) == 42


def test_pareto_and_emit_matrix(tmp_path):
    out, mat = tmp_path / "p.csv", tmp_path / "m.json"
    rc = main(["pareto", "--beta-min", "0.5", "--beta-max", "1.5", "--step", "0.1",
               "-o", str(out), "--emit-matrix", "1.0", "--matrix-output", str(mat)])
    assert rc == 0
    assert len(_data_lines(out)) == 12
    assert GaussianMatrix.from_json(mat.read_text()) == adft32_matrix()


def test_simulate_deterministic_and_rerun(tmp_path):
    cfg = tmp_path / "chain.toml"
    cfg.write_text("[chain]\nsnapshots = 128\nsnr_db = 20.0\nseed = 3\n")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["simulate", "--config", str(cfg), "--engine", "fast_adft", "--azimuth=-10:10:5"]
    assert main(args + ["-o", str(a)]) == 0
    assert main(args + ["-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    manifest = json.loads((tmp_path / "a.csv.manifest.json").read_text())
    assert manifest["seed"] == 3
    c = tmp_path / "c.csv"
    assert main(["rerun", str(tmp_path / "a.csv.manifest.json"), "-o", str(c)]) == 0
    assert c.read_bytes() == a.read_bytes()


def test_simulate_seed_override_changes_output(tmp_path):
    cfg = tmp_path / "chain.json"
    cfg.write_text(json.dumps({"snapshots": 64, "snr_db": 10.0, "seed": 1}))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    base = ["simulate", "--config", str(cfg), "--azimuth=0:0:1"]
    main(base + ["-o", str(a)])
    main(base + ["--seed", "2", "-o", str(b)])
    assert a.read_bytes() != b.read_bytes()


def test_simulate_bad_config(tmp_path, capsys):
    cfg = tmp_path / "chain.json"
    cfg.write_text(json.dumps({"nonsense": 1}))
    assert main(["simulate", "--config", str(cfg), "-o", str(tmp_path / "o.csv")]) == 1
    assert "error" in capsys.readouterr().err
    assert not (tmp_path / "o.csv").exists()


def test_opcount(capsys):
    assert main(["opcount"]) == 0
    assert "additions: 348" in capsys.readouterr().out
    assert main(["opcount", "--transform", "dense-adft", "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["real_multiplications"] == 0


def test_output_dir_env(tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path / "outdir"))
    assert main(["matrix", "--kind", "adft", "-o", "m.json"]) == 0
    assert (tmp_path / "outdir" / "m.json").exists()
    assert (tmp_path / "outdir" / "m.json.manifest.json").exists()


def test_no_temp_files_left(tmp_path):
    main(["matrix", "--kind", "adft", "-o", str(tmp_path / "m.json")])
    assert sorted(p.name for p in tmp_path.iterdir()) == ["m.json", "m.json.manifest.json"]
