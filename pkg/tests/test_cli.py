import io
from pathlib import Path

import numpy as np
import pytest

from horizon_entangle import cli
from horizon_entangle.constants import DEFAULT_CONSTANTS as K
from horizon_entangle.errors import UsageError
from horizon_entangle.sweeps import figure_presets, rows_from_csv, run_sweep

GOLDEN = Path(__file__).parent / "golden"
COMMANDS = ["", "point", "sweep", "verify", "units"]


def run(argv):
    out = io.StringIO()
    code = cli.main(argv, out=out)
    return code, out.getvalue()


def table(text):
    """Parse the bipartition rows of a point table."""
    rows = {}
    for line in text.splitlines():
        parts = line.split()
        if parts and parts[0] in ("AR", "ARbar", "RRbar"):
            rows[parts[0]] = [float(x) for x in parts[1:]]
    return rows


def help_text(command, monkeypatch):
    monkeypatch.setenv("COLUMNS", "80")
    parser = cli.build_parser()
    if not command:
        return parser.format_help()
    sub = next(a for a in parser._actions if a.__class__.__name__ == "_SubParsersAction")
    return sub.choices[command].format_help()


@pytest.mark.parametrize("command", COMMANDS)
def test_help_matches_golden(command, monkeypatch):
    expected = (GOLDEN / f"help_{command or 'main'}.txt").read_text()
    assert help_text(command, monkeypatch) == expected


@pytest.mark.parametrize("command", COMMANDS[1:])
def test_help_lists_every_flag(command, monkeypatch):
    text = help_text(command, monkeypatch)
    parser = cli.build_parser()
    sub = next(a for a in parser._actions if a.__class__.__name__ == "_SubParsersAction")
    for action in sub.choices[command]._actions:
        for flag in action.option_strings:
            assert flag in text


@pytest.mark.parametrize(
    "text, expected",
    [("2e30", 2e30), ("2e30kg", 2e30), ("1e-5sun", 1e-5 * K.M_sun), ("1e-5 Msun", 1e-5 * K.M_sun)],
)
def test_parse_mass(text, expected):
    assert np.isclose(cli.parse_mass(text, K), expected, rtol=1e-15)


def test_parse_length_and_frequency():
    assert cli.parse_length("1cm") == 0.01
    assert cli.parse_length("2km") == 2000.0
    assert cli.parse_length("0.5rs", rs=0.03) == 0.015
    assert cli.parse_frequency("1.5MHz") == 1.5e6
    assert cli.parse_frequency("3kHz") == 3e3
    assert cli.parse_frequency("7") == 7.0
    for bad in ("1parsec", "abc"):
        with pytest.raises(UsageError):
            cli.parse_length(bad)
    with pytest.raises(UsageError):
        cli.parse_length("1rs")


def test_point_dirac_conservation():
    code, out = run(["point", "--field", "dirac", "--omega", "10", "--r0", "1.0001"])
    assert code == 0
    assert "neg_ar + neg_arbar = 0.5000000000" in out
    assert "tanh_q" in out and "validity_ratio" in out and "warnings" in out


def test_point_scalar_far_from_horizon():
    code, out = run(["point", "--field", "scalar", "--omega", "10", "--r0", "1e9"])
    rows = table(out)
    assert code == 0
    assert abs(rows["AR"][0] - 0.5) < 1e-3
    assert rows["ARbar"][0] == 0.0


def test_point_physical_matches_fig7_row():
    code, out = run(["point", "--field", "scalar", "--mass", "1e-5sun", "--delta0", "1cm", "--freq", "1.5MHz",
                     "--bipartitions", "AR,ARbar"])
    assert code == 0
    preset = figure_presets()["fig7"]
    rows = [r for r in run_sweep(preset) if r.delta0_m == 0.01]
    row = min(rows, key=lambda r: abs(r.mass_kg / (1e-5 * K.M_sun) - 1))
    assert np.isclose(row.mass_kg, 1e-5 * K.M_sun, rtol=1e-12)
    got = table(out)
    assert np.isclose(got["AR"][0], row.neg_ar, atol=1e-9)
    assert np.isclose(got["AR"][1], row.mi_ar, atol=1e-8)


def test_point_errors():
    assert run(["point", "--field", "scalar", "--omega", "10", "--r0", "1"])[0] == 2
    assert run(["point", "--field", "scalar", "--omega", "10"])[0] == 2
    assert run(["point", "--field", "scalar", "--omega", "10", "--r0", "2", "--mass", "1kg"])[0] == 2
    # infeasible truncation
    assert run(["point", "--field", "scalar", "--omega", "0.001", "--r0", "1.000001"])[0] == 3
    with pytest.raises(SystemExit) as exc:
        run(["point", "--field", "photon", "--omega", "1", "--r0", "2"])
    assert exc.value.code == 2


def test_sweep_to_file_and_stdout(tmp_path, capsys):
    dest = tmp_path / "fig4.csv"
    code, _ = run(["sweep", "--preset", "fig4", "--out", str(dest)])
    assert code == 0
    first = dest.read_bytes()
    rows = rows_from_csv(first.decode())
    assert len(rows) == 1000 and len({r.omega for r in rows}) == 5
    assert "rows=1000 unconverged=0 conservation=PASS" in capsys.readouterr().err
    # determinism: byte-identical rerun
    run(["sweep", "--preset", "fig4", "--out", str(dest)])
    assert dest.read_bytes() == first
    code, out = run(["sweep", "--preset", "fig4", "--out", "-"])
    assert code == 0 and out.encode() == first


def test_sweep_explicit_grid_and_errors():
    code, out = run(["sweep", "--field", "dirac", "--omega", "2,6", "--r0-min", "1.001", "--r0-max", "2",
                     "--count", "4", "--out", "-"])
    assert code == 0 and len(out.splitlines()) == 9
    assert run(["sweep", "--field", "scalar", "--r0-min", "0.5", "--out", "-"])[0] == 2
    assert run(["sweep", "--out", "-"])[0] == 2


def test_sweep_unconverged_exit_code():
    code, out = run(["sweep", "--field", "scalar", "--omega", "0.01", "--r0-min", "1.000001", "--r0-max", "1.1",
                     "--count", "3", "--out", "-"])
    assert code == 4
    assert len(out.splitlines()) == 4  # CSV still written


def test_verify_pass_and_fail():
    code, out = run(["verify", "--field", "dirac"])
    assert code == 0 and out.strip().endswith("PASS")
    code, out = run(["verify", "--field", "scalar", "--tol", "1"])
    assert code == 5 and out.strip().endswith("FAIL")


def test_verify_scalar_default_grid():
    code, out = run(["verify", "--field", "scalar"])
    assert code == 0
    line = next(x for x in out.splitlines() if "N_ARbar" in x)
    assert line.startswith("PASS")


def test_units_table_and_verdicts():
    code, out = run(["units", "--mass", "1e-5sun", "--delta0", "0.01rs", "--freq", "1.5MHz"])
    fields = dict(line.split(None, 1) for line in out.splitlines())
    assert code == 0
    assert np.isclose(float(fields["R_S_cm"]), 2.954, atol=1e-3)
    for key in ("kappa_per_s", "f0", "sqrt_f0", "Omega", "R0", "tanh_q", "validity_ratio"):
        assert key in fields
    assert fields["verdict"].startswith("within near-horizon regime")
    assert fields["warning"] == "none"

    code, out = run(["units", "--mass", "1e-5sun", "--delta0", "1rs", "--freq", "1.5MHz"])
    fields = dict(line.split(None, 1) for line in out.splitlines())
    assert code == 0
    assert fields["verdict"] == "outside Rindler-approximation regime"
    assert fields["warning"] != "none"
    assert run(["units", "--mass=-1kg", "--delta0", "1cm", "--freq", "1MHz"])[0] == 2


def test_config_file_used(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("M_sun = 2e30\n")
    _, out = run(["--config", str(cfg), "units", "--mass", "1sun", "--delta0", "1m", "--freq", "1Hz"])
    assert "mass_kg                   2e+30" in out
    bad = tmp_path / "bad.cfg"
    bad.write_text("nonsense = 1\n")
    assert run(["--config", str(bad), "units", "--mass", "1kg", "--delta0", "1m", "--freq", "1Hz"])[0] == 2
    assert run(["--config", str(tmp_path / "missing.cfg"), "units", "--mass", "1kg", "--delta0", "1m",
                "--freq", "1Hz"])[0] == 2
