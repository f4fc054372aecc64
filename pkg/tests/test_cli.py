import csv
import os
import warnings

import numpy as np
import pytest

from twolayer_dg.cli import main, parse_degrees
from twolayer_dg.config import ConfigError, build_run_config, load_config, parse_config
from twolayer_dg.output import (CONVERGENCE_COLUMNS, convergence_report, read_solution,
                                solution_filename, write_convergence_csv)

CONFIGS = os.path.join(os.path.dirname(__file__), os.pardir, "configs")

SHORT = """\
[run]
scenario = perturbation
degree = 3
flux = {flux}

[time]
t_end = 0.004
cfl = 0.7
diagnostics_interval = 2

[output]
directory = {out}
dump_interval = 1
"""


def config_error(text, tmp_path=None):
    with pytest.raises(ConfigError) as exc:
        build_run_config(parse_config(text, "c.cfg"), "c.cfg", str(tmp_path or "."))
    return str(exc.value)


@pytest.mark.parametrize("text, fragment", [
    ("[run]\nscenario = well_balanced\n[bogus]\n", "c.cfg:3: unknown section [bogus]"),
    ("[run]\nscenario = well_balanced\nflavour = ec\n", "c.cfg:3: unknown key 'flavour'"),
    ("scenario = dam_break\n", "c.cfg:1: key outside of any section"),
    ("[run\n", "c.cfg:1: malformed section header"),
    ("[run]\n\n# comment\nscenario well_balanced\n", "c.cfg:4: expected 'key = value'"),
    ("[run]\nscenario = tsunami\n", "c.cfg:2: [run] scenario = 'tsunami' is not one of"),
    ("[run]\nscenario = dam_break\ndegree = zero\n", "c.cfg:3: [run] degree = 'zero' is not a valid int"),
    ("[run]\nscenario = dam_break\ndegree = 0\n", "c.cfg:3: [run] degree = '0' must be >= 1"),
    ("[run]\nscenario = dam_break\nflux = roe\n", "must be ec or es"),
    ("[run]\nscenario = dam_break\ndegree = 2\ndegree = 3\n", "c.cfg:4: duplicate key 'degree'"),
    ("[run]\nscenario = dam_break\n[time]\ncfl = 0.5\ndt = 0.1\n", "c.cfg:4: give either dt or cfl"),
    ("[run]\nscenario = convergence\n[time]\ncfl = 0.5\n", "c.cfg:4: the convergence scenario uses a fixed dt"),
    ("[run]\nscenario = dam_break\n[time]\n\ndt = 0.1\n", "c.cfg:5: scenario 'dam_break' uses CFL"),
    ("[run]\nscenario = dam_break\n[time]\ncfl = 3\n", "c.cfg:4: [time] cfl = '3' must lie in (0, 2]"),
    ("[run]\nscenario = dam_break\n[physics]\nratio = 1.2\n", "c.cfg:4: [physics] ratio = '1.2' must lie in (0, 1)"),
    ("[run]\nscenario = dam_break\n[physics]\nrho1 = 1.1\nrho2 = 1.0\n", "c.cfg:4: rho1 must be smaller"),
    ("[run]\nscenario = dam_break\n[mesh]\nfile = nowhere.mesh\n", "c.cfg:4: mesh file 'nowhere.mesh' does not exist"),
    ("[run]\nscenario = dam_break\n[mesh]\ndomain = 0 1 1 0\n", "c.cfg:4: [mesh] domain"),
    ("[physics]\ng = 9.81\n", "missing required key 'scenario'"),
])
def test_config_errors_carry_line_numbers(text, fragment, tmp_path):
    assert fragment in config_error(text, tmp_path)


def test_shipped_configs_load():
    names = sorted(f for f in os.listdir(CONFIGS) if f.endswith(".cfg"))
    assert names == ["convergence.cfg", "dam_break.cfg", "perturbation.cfg", "well_balanced.cfg"]
    for name in names:
        cfg = load_config(os.path.join(CONFIGS, name))
        assert cfg.scenario == name[:-4]


def test_config_maps_to_scenario_kwargs(tmp_path):
    text = ("[run]\nscenario = perturbation\ndegree = 5\nflux = ES\n[physics]\nrho1 = 0.9\nrho2 = 1.0\n"
            "[time]\nt_end = 0.2\ncfl = 0.5\n")
    cfg = build_run_config(parse_config(text), base_dir=str(tmp_path))
    kw = cfg.scenario_kwargs()
    assert kw == dict(N=5, flux="es", ratio=0.9, rho2=1.0, t_end=0.2, cfl=0.5)


@pytest.mark.parametrize("text, degrees", [("3:2:9", [3, 5, 7, 9]), ("4:6", [4, 5, 6]), ("5:1:5", [5])])
def test_parse_degrees(text, degrees):
    assert parse_degrees(text) == degrees


@pytest.mark.parametrize("spec", ["3", "a:b", "0:1:4", "5:1:3", "1:2:3:4"])
def test_parse_degrees_rejects(spec):
    import argparse
    with pytest.raises(argparse.ArgumentTypeError):
        parse_degrees(spec)


def test_convergence_report_synthetic_slope(tmp_path):
    path = tmp_path / "c.csv"
    rows = [(N, [10.0 ** (-N / 2)] * 6) for N in range(3, 12)]
    write_convergence_csv(path, rows)
    rep = convergence_report(path)
    assert all(s == pytest.approx(-0.5, abs=1e-12) for s in rep.slopes.values())
    assert rep.stagnant == ()
    assert "slope" in rep.table()


def test_convergence_report_stagnation_warns(tmp_path):
    path = tmp_path / "c.csv"
    write_convergence_csv(path, [(N, [1e-3] * 6) for N in (3, 4, 5)])
    with pytest.warns(RuntimeWarning, match="stagnates"):
        rep = convergence_report(path)
    assert rep.slopes["l2_hu1"] == pytest.approx(0.0, abs=1e-12)


def test_convergence_report_needs_three_rows(tmp_path):
    path = tmp_path / "c.csv"
    write_convergence_csv(path, [(3, [1e-2] * 6), (5, [1e-4] * 6)])
    with pytest.raises(ValueError, match="at least 3"):
        convergence_report(path)


def test_cli_run_writes_valid_outputs(tmp_path, capsys):
    out = tmp_path / "res"
    cfg = tmp_path / "p.cfg"
    cfg.write_text(SHORT.format(flux="ec", out=out))
    assert main(["run", str(cfg)]) == 0
    printed = capsys.readouterr().out
    assert "entropy rate dS/dt" in printed
    with open(out / "diagnostics.csv", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        body = [[float(v) for v in row] for row in reader]
    assert header == ["t", "S", "dSdt", "mass1", "mass2", "err_H1", "err_H2"]
    t = [r[0] for r in body]
    assert t[0] == 0.0 and t[-1] == pytest.approx(0.004) and np.all(np.diff(t) > 0)
    assert abs(np.mean([r[2] for r in body])) <= 1e-13
    dumps = sorted(f for f in os.listdir(out) if f.startswith("solution_"))
    assert solution_filename(t[-1]) in dumps and solution_filename(0.0) in dumps
    idx, vals = read_solution(out / dumps[-1])
    assert vals.shape == (16 * 16, 9) and idx.shape == (256, 3)
    assert idx[:, 1:].max() == 3 and np.all(vals[:, 2] > 0) and np.all(vals[:, 5] > 0)


def test_cli_run_is_reproducible(tmp_path):
    files = []
    for k in range(2):
        out = tmp_path / f"r{k}"
        cfg = tmp_path / f"p{k}.cfg"
        cfg.write_text(SHORT.format(flux="es", out=out))
        assert main(["run", str(cfg)]) == 0
        files.append((out / "diagnostics.csv").read_bytes())
    assert files[0] == files[1]


def test_cli_convergence(tmp_path, capsys):
    out = tmp_path / "conv"
    cfg = tmp_path / "c.cfg"
    cfg.write_text(f"[run]\nscenario = convergence\nflux = es\n[time]\nt_end = 0.0005\ndt = 0.00025\n"
                   f"[output]\ndirectory = {out}\n")
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert main(["convergence", str(cfg), "--degrees", "2:2:6"]) == 0
    with open(out / "convergence.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == CONVERGENCE_COLUMNS
    err = [float(r[2]) for r in rows[1:]]
    assert [int(r[0]) for r in rows[1:]] == [2, 4, 6]
    assert err[0] > err[1] > err[2]
    assert "slope" in capsys.readouterr().out


def test_cli_convergence_rejects_scenario_without_exact_solution(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text(f"[run]\nscenario = perturbation\n[output]\ndirectory = {tmp_path}\n")
    assert main(["convergence", str(cfg), "--degrees", "2:3"]) == 2
    assert "no exact solution" in capsys.readouterr().err


def test_cli_config_error_exit_code(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("[run]\nscenario = perturbation\ndegree = zero\n")
    assert main(["run", str(cfg)]) == 2
    assert f"{cfg}:3:" in capsys.readouterr().err


def test_cli_threads_env(tmp_path, monkeypatch, capsys):
    cfg = tmp_path / "p.cfg"
    cfg.write_text(SHORT.format(flux="ec", out=tmp_path / "o"))
    monkeypatch.setenv("SOLVER_THREADS", "many")
    assert main(["run", str(cfg)]) == 2
    assert "SOLVER_THREADS" in capsys.readouterr().err
    monkeypatch.setenv("SOLVER_THREADS", "2")
    assert main(["run", str(cfg)]) == 0


@pytest.mark.parametrize("exc", ["positivity", "nan"])
def test_cli_solver_error_exit_code(exc, tmp_path, monkeypatch, capsys):
    import twolayer_dg.cli as cli
    from twolayer_dg.physics import PositivityError

    def failing_run(*a, **kw):
        if exc == "positivity":
            raise PositivityError("nonpositive layer height at element 3, node (1, 2), t=0.5")
        raise FloatingPointError("non-finite solution at element 3, node (1, 2), t=0.5")

    monkeypatch.setattr(cli, "run", failing_run)
    cfg = tmp_path / "p.cfg"
    cfg.write_text(SHORT.format(flux="ec", out=tmp_path / "o"))
    assert main(["run", str(cfg)]) == 1
    assert "solver error" in capsys.readouterr().err


def test_cli_check(capsys):
    assert main(["check"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 6 and all(line.startswith("PASS") for line in lines)


def test_cli_flux_and_degree_overrides(tmp_path, capsys):
    out = tmp_path / "o"
    cfg = tmp_path / "p.cfg"
    cfg.write_text(SHORT.format(flux="ec", out=out))
    assert main(["run", str(cfg), "--flux", "es", "--degree", "2"]) == 0
    printed = capsys.readouterr().out
    assert "N=2, flux=es" in printed
    with open(out / "diagnostics.csv", newline="") as fh:
        d = [float(r["dSdt"]) for r in csv.DictReader(fh)]
    assert all(v < 0 for v in d[1:])
    assert main(["run", str(cfg), "--degree", "0"]) == 2
