import io
import math
import subprocess
import sys

import pytest

from lambda_metrology.cli import main


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def values(text):
    return dict(line.split(" = ", 1) for line in text.splitlines())


def test_state():
    code, out, _ = run("state", "--alpha", "pi", "--time", "3")
    assert code == 0
    v = values(out)
    assert v["cpt"] == "1"
    assert abs(float(v["P_a"])) < 1e-20


def test_qfi_methods_agree():
    got = []
    for method in ("sld", "pure", "closed"):
        code, out, _ = run("qfi", "--param", "wb", "--method", method, "--time", "2.5", "--omega_R2", "1.7")
        assert code == 0
        got.append(float(values(out)["F_wb"]))
    assert max(got) - min(got) < 1e-9


def test_qfi_example_value():
    code, out, _ = run("qfi", "--alpha", "pi/2", "--time", "pi/sqrt(2)")
    assert abs(float(values(out)["F_wa"]) - math.pi ** 2 / 2) < 1e-10


def test_hss_qfim_bounds_ratio_witness():
    assert run("hss", "--param", "c")[0] == 0
    code, out, _ = run("qfim", "--subset", "wa+wb", "--time", "2")
    assert set(values(out)) == {"F_wa_wa", "F_wa_wb", "F_wb_wb", "detF_wa_wb"}
    code, out, _ = run("bounds", "--omega_R2", "2", "--M", "4")
    assert code == 0 and "delta_s_wa_wb" in out
    code, out, _ = run("ratio", "--alpha", "pi", "--time", "3")
    assert float(values(out)["R_wa_wb"]) == 2
    code, out, _ = run("witness", "--subset", "wa+wb+wc")
    assert float(values(out)["W_wa_wb_wc"]) < 1e-8


def test_numerical_error_exit_code():
    code, _, err = run("ratio", "--subset", "wb+wc", "--alpha", "pi", "--time", "3")
    assert code == 1 and "error" in err


def test_parse_errors(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("axis = time\nstart = 0\nstop = oops\nquantities = qfi:wa\n")
    code, _, err = run("sweep", "--config", str(cfg))
    assert code == 1 and "line 3" in err
    assert run("sweep", "--preset", "fig99")[0] == 1
    assert run("qfi", "--param", "wd")[0] == 1
    with pytest.raises(SystemExit) as info:
        run("bogus")
    assert info.value.code == 1


def test_sweep_output_and_override(tmp_path):
    dest = tmp_path / "out.csv"
    code, _, err = run("sweep", "--preset", "fig2a", "--points", "5", "--output", str(dest))
    assert code == 0 and "points: 5" in err
    lines = dest.read_bytes().split(b"\n")
    assert len(lines) == 7 and lines[-1] == b""
    code, out, _ = run("sweep", "--list-presets")
    assert "fig5" in out.split()


def test_validate():
    code, out, _ = run("validate", "--grid", "30")
    assert code == 0 and out.strip().endswith("PASS")
    # long times push absolute differences past the 1e-12 floor
    code, out, _ = run("validate", "--grid", "30", "--t-max", "5000", "--tolerance", "1e-20")
    assert code == 2 and "FAIL" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "lambda_metrology", "qfi", "--time", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("F_wa = ")
