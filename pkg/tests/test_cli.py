import csv
import io
import json
import math

import pytest

from monopole_lab import __version__
from monopole_lab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def table(text):
    lines = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def metadata(text):
    first = text.splitlines()[0]
    assert first.startswith("# metadata: ")
    return json.loads(first[len("# metadata: "):])


def test_phase_cap(capsys):
    code, out, _ = run(capsys, "phase", "--n", "1", "--loop", "cap", "--theta", "1.0471975512")
    assert code == 0
    row = table(out)[0]
    assert float(row["phi2"]) == pytest.approx(math.pi / 2, abs=1e-4)
    assert float(row["delta_mod_2pi"]) == pytest.approx(math.pi, abs=1e-6)
    meta = metadata(out)
    assert meta["version"] == __version__
    assert meta["config"]["loop"]["theta"] == 1.0471975512


def test_duality_random(capsys):
    code, out, _ = run(capsys, "duality", "--n", "2", "--loops", "random", "--count", "100")
    assert code == 0
    rows = table(out)
    assert len(rows) == 100
    assert all(abs(float(r["delta_mod_2pi"])) <= 1e-6 for r in rows)


def test_foucault(capsys):
    code, out, _ = run(capsys, "foucault", "--latitude", "30")
    assert code == 0
    row = table(out)[0]
    assert float(row["per_revolution"]) == pytest.approx(-math.pi, rel=1e-3)


def test_gauge_json(capsys):
    code, out, _ = run(capsys, "gauge", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["rows"][0][1] == pytest.approx(2 * math.pi, abs=1e-8)
    assert doc["metadata"]["config"]["string_b"] == "north"


def test_exchange(capsys):
    code, out, _ = run(capsys, "exchange", "--n", "1", "--spin", "0.5", "--exchange-path", "random", "--count", "3")
    assert code == 0
    rows = table(out)
    assert len(rows) == 3
    assert all(r["sign"] == r["sign_type1"] == r["sign_type2"] == "1" for r in rows)


def test_simulate_writes_trajectory(tmp_path, capsys):
    code, _, err = run(capsys, "simulate", "--max-steps", "50", "--output", str(tmp_path))
    assert code == 0
    text = (tmp_path / "simulate.csv").read_text()
    rows = table(text)
    assert len(rows) == 51
    assert list(rows[0]) == ["t", "x", "y", "z", "vx", "vy", "vz", "Jx", "Jy", "Jz", "cone_proj", "speed", "energy"]
    assert all(float(r["cone_proj"]) == pytest.approx(-0.5, abs=1e-12) for r in rows)


def test_outputs_are_byte_identical(tmp_path, capsys):
    for sub in ("a", "b"):
        assert main(["duality", "--count", "5", "--seed", "9", "--output", str(tmp_path / sub)]) == 0
    assert (tmp_path / "a" / "duality.csv").read_bytes() == (tmp_path / "b" / "duality.csv").read_bytes()
    assert main(["duality", "--count", "5", "--seed", "10", "--output", str(tmp_path / "c")]) == 0
    assert (tmp_path / "c" / "duality.csv").read_bytes() != (tmp_path / "a" / "duality.csv").read_bytes()


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.yaml"
    cfg.write_text("setup:\n  n: 2\nloop:\n  kind: circle\n  theta: 1.0471975512\ntolerance: 1.0e-6\n")
    code, out, _ = run(capsys, "phase", "--config", str(cfg))
    assert code == 0
    assert float(table(out)[0]["phi2"]) == pytest.approx(math.pi, abs=1e-8)
    code, out, _ = run(capsys, "phase", "--config", str(cfg), "--n", "1")
    assert float(table(out)[0]["phi2"]) == pytest.approx(math.pi / 2, abs=1e-8)
    assert metadata(out)["config"]["setup"]["n"] == 1


def test_json_config(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"coriolis": {"latitude_deg": 90.0, "ratio": 100.0, "steps_per_period": 1000}}))
    code, out, _ = run(capsys, "foucault", "--config", str(cfg))
    assert code == 0
    assert float(table(out)[0]["per_revolution"]) == pytest.approx(-2 * math.pi, rel=1e-3)


def test_csv_loop(tmp_path, capsys):
    path = tmp_path / "loop.csv"
    path.write_text("# square around the z axis\nx,y,z\n1,1,0.5\n-1,1,0.5\n-1,-1,0.5\n1,-1,0.5\n")
    code, out, _ = run(capsys, "phase", "--loop", "csv", "--path-file", str(path))
    assert code == 0
    assert int(table(out)[0]["winding"]) == -1


@pytest.mark.parametrize("argv", [
    ["phase", "--bogus"],
    ["nonsense"],
    ["phase", "--n", "1.5"],
    ["phase", "--loop", "csv"],
    ["simulate", "--position", "1,2"],
    ["foucault", "--latitude", "120"],
])
def test_invalid_input_exits_1(argv, capsys):
    assert main(argv) == 1


def test_unknown_config_key_exits_1(tmp_path, capsys):
    cfg = tmp_path / "bad.yaml"
    cfg.write_text("setup:\n  n: 1\n  colour: red\n")
    code, _, err = run(capsys, "phase", "--config", str(cfg))
    assert code == 1
    assert "colour" in err


def test_singular_geometry_exits_3(capsys):
    code, _, err = run(capsys, "phase", "--loop", "circle", "--theta", "3.14159265")
    assert code == 3
    code, _, _ = run(capsys, "simulate", "--velocity=-1,0,0", "--t-end", "5")
    assert code == 3


def test_tolerance_failure_exits_2(capsys):
    code, _, err = run(capsys, "foucault", "--ratio", "60", "--steps-per-period", "20", "--tolerance", "1e-6")
    assert code == 2
    assert "tolerance" in err


def test_version(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0
    assert __version__ in capsys.readouterr().out


def test_verify(tmp_path, capsys):
    code, _, err = run(capsys, "verify", "--format", "json", "--output", str(tmp_path))
    assert code == 0
    doc = json.loads((tmp_path / "verify.json").read_text())
    assert doc["summary"] == {"passed": 11, "total": 11}
    assert err.count("[PASS]") == 11
