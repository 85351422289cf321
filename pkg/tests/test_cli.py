"""Configuration parsing, CSV output, exit codes, and mode dispatch.

All runs go through main(argv) in-process; files live under tmp_path.
"""

import math

import pytest

from qfriction import (
    ConfigError,
    Model,
    SWEEP_QUADRATURE,
    format_config,
    main,
    parse_config,
    tla_force_total,
)

BODY_START = 1  # everything after the "# ... generated <timestamp>" line


def run_cli(tmp_path, config_text, *args):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(config_text)
    return main(["--config", str(cfg), *args])


def test_defaults():
    c = parse_config("")
    s = c.scenario
    assert s.atom.d2 == 3.0 and s.atom.omega_a == 1.0 and s.atom.gamma == 1e-4
    assert s.atom.p_lower == 1.0 and s.atom.p_upper == 0.0
    assert s.material.omega_p == 1.0 and s.material.gamma_big == 0.1
    assert s.z == 1.0 and s.v == 0.01 and s.model is Model.TLA
    assert c.quadrature.rel_tol == 1e-7 and c.quadrature.k_cut == 30.0
    assert c.sweep_variable == "velocity"
    assert (c.sweep_min, c.sweep_max, c.sweep_points) == (1e-3, 1e-2, 8)
    assert c.sweep_components == frozenset({"f0", "fs", "total"})
    assert c.mode == "point" and c.output_path == "qfriction_out.csv"


def test_comments_spacing_and_values():
    c = parse_config("""
# leading comment and blank lines are ignored

model = oscillator   # trailing comment
  v=-0.02
sweep_components = total , f0
mode=compare
""")
    assert c.scenario.model is Model.OSCILLATOR
    assert c.scenario.v == -0.02
    assert c.sweep_components == frozenset({"total", "f0"})
    assert c.mode == "compare"


@pytest.mark.parametrize("text,fragment", [
    ("bogus = 1", "unknown key 'bogus'"),
    ("z = 1\nz = 2", "line 2: duplicate key 'z'"),
    ("z =", "empty value"),
    ("just words", "expected 'key = value'"),
    ("z = wide", "not a number"),
    ("sweep_points = 2.5", "not an integer"),
    ("model = maser", "expected one of tla/oscillator"),
    ("mode = dance", "expected one of point/sweep/compare/selftest"),
    ("sweep_components = f0,banana", "drawn from f0,fs,total"),
    ("sweep_variable = charge", "expected one of velocity/distance"),
])
def test_malformed_lines(text, fragment):
    with pytest.raises(ConfigError, match="line 1|line 2") as info:
        parse_config(text)
    assert fragment in str(info.value)


def test_domain_errors_name_key_and_line():
    with pytest.raises(ConfigError, match=r"gamma.*\(line 2\)"):
        parse_config("v = 0.01\ngamma = -1")
    with pytest.raises(ConfigError, match="rel_tol"):
        parse_config("rel_tol = 0.5")
    with pytest.raises(ConfigError, match="z must"):
        parse_config("z = 0")


def test_format_config_round_trips():
    for text in ("", "model = oscillator\nv = 0.321\nsweep_components = total\n"
                     "k_cut = 45\nmode = sweep\noutput_path = a b.csv"):
        c = parse_config(text)
        echoed = format_config(c)
        assert parse_config(echoed) == c
        assert echoed.splitlines()[0].startswith("#")
        assert echoed.splitlines()[1] == f"d2 = {c.scenario.atom.d2!r}"


def test_point_mode_matches_direct_evaluation(tmp_path, capsys):
    out = tmp_path / "point.csv"
    code = run_cli(tmp_path, f"rel_tol = 1e-5\noutput_path = {out}")
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[BODY_START] == "variable_value,f0,fs,total,err_estimate"
    fields = [float(x) for x in lines[BODY_START + 1].split(",")]
    direct = tla_force_total(parse_config("").scenario, SWEEP_QUADRATURE)
    assert fields[0] == 0.01
    assert (fields[1], fields[2], fields[3]) == (direct.f0, direct.fs, direct.total)
    # effective-config sidecar reproduces the run exactly
    effective = parse_config((tmp_path / "point.csv.effective").read_text())
    assert effective.output_path == str(out)
    assert effective.quadrature == SWEEP_QUADRATURE
    assert "total =" in capsys.readouterr().out


def test_csv_body_is_deterministic(tmp_path):
    cfg = ("mode = sweep\nrel_tol = 1e-4\nsweep_min = 2e-4\nsweep_max = 2e-3\n"
           "sweep_points = 5\n")
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run_cli(tmp_path, cfg + f"output_path = {out1}") == 0
    assert run_cli(tmp_path, cfg + f"output_path = {out2}") == 0
    body1 = out1.read_text().splitlines()[BODY_START:]
    body2 = out2.read_text().splitlines()[BODY_START:]
    assert body1 == body2  # only the timestamp comment may differ


def test_sweep_mode_output(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    code = run_cli(tmp_path,
                   "mode = sweep\nrel_tol = 1e-4\nsweep_min = 2e-4\n"
                   f"sweep_max = 2e-3\nsweep_points = 5\noutput_path = {out}",
                   "--verbose")
    assert code == 0
    lines = out.read_text().splitlines()
    data = [l for l in lines if not l.startswith("#")]
    assert data[0] == "variable_value,f0,fs,total,err_estimate"
    assert len(data) == 6
    fit_lines = [l for l in lines if l.startswith("# fit:")]
    assert len(fit_lines) == 1  # 5 points: no half-window refits
    exponent = float(fit_lines[0].split("exponent = ")[1].split()[0])
    assert exponent == pytest.approx(1.0, abs=0.1)
    stdout = capsys.readouterr().out
    assert stdout.count("velocity = ") == 5  # --verbose per-point lines
    assert "fitted exponent" in stdout


def test_sweep_components_mask_unrequested_columns(tmp_path):
    out = tmp_path / "sweep.csv"
    code = run_cli(tmp_path,
                   "mode = sweep\nrel_tol = 1e-4\nsweep_min = 2e-4\n"
                   "sweep_max = 2e-3\nsweep_points = 5\nsweep_components = total\n"
                   f"output_path = {out}")
    assert code == 0
    rows = [l for l in out.read_text().splitlines() if not l.startswith("#")][1:]
    for row in rows:
        _, f0, fs, total, err = row.split(",")
        assert f0 == "nan" and fs == "nan"
        assert math.isfinite(float(total)) and math.isfinite(float(err))


def test_sweep_failures_exit_2(tmp_path, capsys):
    out = tmp_path / "starved.csv"
    code = run_cli(tmp_path,
                   "mode = sweep\nmax_subdivisions = 1\nsweep_min = 2e-4\n"
                   f"sweep_max = 2e-3\nsweep_points = 5\noutput_path = {out}")
    assert code == 2
    text = out.read_text()
    assert text.count("# failed:") == 5
    assert "failed to converge" in capsys.readouterr().out


def test_compare_mode_output(tmp_path, capsys):
    out = tmp_path / "cmp.csv"
    code = run_cli(tmp_path,
                   "mode = compare\nrel_tol = 1e-4\nsweep_min = 2e-4\n"
                   f"sweep_max = 2e-3\nsweep_points = 5\noutput_path = {out}")
    assert code == 0
    lines = out.read_text().splitlines()
    data = [l for l in lines if not l.startswith("#")]
    assert data[0] == "variable_value,f_tla,f_osc,ratio"
    ratios = [float(r.split(",")[3]) for r in data[1:]]
    assert len(ratios) == 5
    assert all(r > 0 for r in ratios)
    assert ratios == sorted(ratios)  # f_osc/f_tla grows with v
    assert sum(1 for l in lines if l.startswith("# fit:")) == 2
    assert "exponents: tla =" in capsys.readouterr().out


def test_selftest_mode_passes(tmp_path, capsys):
    out = tmp_path / "self.txt"
    code = run_cli(tmp_path, f"mode = selftest\nrel_tol = 1e-6\noutput_path = {out}")
    assert code == 0
    stdout = capsys.readouterr().out
    assert "selftest: all checks passed" in stdout
    text = out.read_text()
    assert "FAIL" not in text
    for name in ("tla_total_at_rest", "osc_combined_at_rest", "osc_sum_identity",
                 "oracle_tla_ground", "oracle_osc_combined"):
        assert f"PASS {name}" in text


def test_cli_flag_overrides(tmp_path):
    # config says selftest, flags demand a cheap point run somewhere else
    out = tmp_path / "override.csv"
    code = run_cli(tmp_path, "mode = selftest\nrel_tol = 1e-5",
                   "--mode", "point", "--output", str(out))
    assert code == 0
    assert out.exists()
    assert "point output" in out.read_text().splitlines()[0]


def test_missing_config_file_exits_1(capsys):
    assert main(["--config", "/no/such/file.cfg"]) == 1
    assert "cannot read config" in capsys.readouterr().err


def test_bad_config_exits_1(tmp_path, capsys):
    assert run_cli(tmp_path, "gamma = -1") == 1
    assert "bad configuration" in capsys.readouterr().err


def test_unwritable_output_exits_1(tmp_path, capsys):
    assert run_cli(tmp_path, "output_path = /no/such/dir/out.csv") == 1
    assert "error" in capsys.readouterr().err


def test_usage_error_exits_1(capsys):
    with pytest.raises(SystemExit) as info:
        main([])  # --config is required
    assert info.value.code == 1
    assert "error" in capsys.readouterr().err
