import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from orlicz_approx import Grid, OrliczContext, PeriodicFunction, Weight, YoungFunction
from orlicz_approx.cli import main
from orlicz_approx.norms import luxemburg_norm
from orlicz_approx.operators import modulus_curve
from orlicz_approx.periodic import write_csv


def run(argv, capsys):
    rc = main(argv)
    cap = capsys.readouterr()
    return rc, cap.out, cap.err


def test_norm_cos_is_root_pi(capsys):
    rc, out, _ = run(["norm", "--fn", "cos:1", "--grid", "1024"], capsys)
    assert rc == 0
    lines = dict(line.split() for line in out.splitlines())
    assert float(lines["luxemburg"]) == pytest.approx(math.sqrt(math.pi), rel=1e-12)
    assert float(lines["amemiya"]) == pytest.approx(2 * math.sqrt(math.pi), rel=1e-9)


def test_norm_zero_function(capsys):
    rc, out, _ = run(["norm", "--fn", "const:0", "--grid", "256", "--format", "json"], capsys)
    assert rc == 0
    assert [r["value"] for r in json.loads(out)] == [0.0, 0.0]


def test_norm_csv_function_matches_library(tmp_path, capsys):
    grid = Grid(512)
    f = PeriodicFunction(grid, np.exp(np.sin(grid.nodes)))
    path = tmp_path / "f.csv"
    write_csv(f, path)
    rc, out, _ = run(["norm", "--fn", f"csv:{path}", "--grid", "512", "--phi", "power:3",
                      "--weight", "power:0.4", "--format", "csv"], capsys)
    assert rc == 0
    ctx = OrliczContext(YoungFunction.power(3), Weight.power(grid, 0.4))
    row = out.splitlines()[1].split(",")
    assert row[0] == "luxemburg"
    assert float(row[1]) == pytest.approx(luxemburg_norm(ctx, f), rel=1e-12)


def test_modulus_constant_is_zero(capsys):
    rc, out, _ = run(["modulus", "--fn", "const:3", "--grid", "256", "--delta", "0.5,0.1"], capsys)
    assert rc == 0
    assert all(abs(float(line.split()[1])) < 1e-12 for line in out.splitlines())


def test_modulus_k0_is_norm(capsys):
    rc, out, _ = run(["modulus", "--fn", "sawtooth", "--grid", "1024", "--k", "0", "--delta", "0.3"], capsys)
    assert rc == 0
    rc2, out2, _ = run(["norm", "--fn", "sawtooth", "--grid", "1024"], capsys)
    assert float(out.split()[1]) == pytest.approx(float(out2.split()[1]), rel=1e-12)


def test_modulus_matches_library(capsys):
    rc, out, _ = run(["modulus", "--fn", "cos:1", "--grid", "1024", "--k", "1", "--delta", "0.5",
                      "--format", "json"], capsys)
    grid = Grid(1024)
    ctx = OrliczContext(YoungFunction.power(2), Weight.constant(grid))
    f = PeriodicFunction(grid, np.cos(grid.nodes))
    assert json.loads(out)[0]["omega"] == float(modulus_curve(ctx, f, 1.0, [0.5])[0][0])


@pytest.mark.parametrize("argv", [
    ["norm", "--fn", "cos:1", "--phi", "cubic"],
    ["norm", "--fn", "nope:1"],
    ["norm", "--fn", "cos:1", "--grid", "1000"],
    ["modulus", "--fn", "cos:1", "--delta", "-1"],
    ["modulus", "--fn", "cos:1", "--delta", "a,b"],
])
def test_usage_errors_exit_2(argv, capsys):
    rc, _, err = run(argv, capsys)
    assert rc == 2
    assert err.startswith("error:")


def test_bad_format_exits_2():
    with pytest.raises(SystemExit) as e:
        main(["verify", "--config", "selftest", "--format", "xml"])
    assert e.value.code == 2


def test_verify_selftest_fails(tmp_path, capsys):
    rc, out, _ = run(["verify", "--config", "selftest", "--out", str(tmp_path), "--format", "json,text"],
                      capsys)
    assert rc == 1
    reps = json.loads((tmp_path / "reports.json").read_text())
    assert reps and not any(r["pass"] for r in reps)
    assert min(r["summary"]["slope"] for r in reps) > 0.5
    assert "failed" in out


def test_verify_empty_suite_passes(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"grid": 256, "contexts": [{"phi": "power:2"}], "corpus": ["cos:1"],
                               "checks": []}))
    rc, out, _ = run(["verify", "--config", str(cfg), "--format", "json"], capsys)
    assert rc == 0
    assert json.loads(out) == []


def test_verify_bad_config_exits_2(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"grid": 256,\n "checks": [{"type": "frobnicate"}]}')
    rc, _, err = run(["verify", "--config", str(cfg)], capsys)
    assert rc == 2
    assert "cfg.json" in err


def test_verify_output_is_reproducible(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"grid": 1024, "n_max": 16, "contexts": [{"phi": "power:3", "weight": "power:0.4"}],
                               "corpus": ["cos:3", "abs-sin-pow:1.5"],
                               "checks": [{"type": "jackson", "k": 1}, {"type": "realization", "k": 1}]}))
    outs = []
    for i in range(2):
        r = subprocess.run([sys.executable, "-m", "orlicz_approx", "verify", "--config", str(cfg),
                            "--out", str(tmp_path / f"r{i}"), "--format", "json,csv,text"],
                           capture_output=True, text=True)
        assert r.returncode in (0, 1), r.stderr
        outs.append([(tmp_path / f"r{i}" / n).read_bytes() for n in ("reports.json", "reports.csv", "summary.txt")])
    assert outs[0] == outs[1]


def test_help_lists_subcommands():
    buf = io.StringIO()
    from orlicz_approx.cli import build_parser
    build_parser().print_help(buf)
    for name in ("norm", "modulus", "verify"):
        assert name in buf.getvalue()
