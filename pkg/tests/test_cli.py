"""Config parsing, case enumeration, report emission, exit-code contract."""

import csv
import os
import subprocess
import sys

import pytest

from hjlab.cli import main, run
from hjlab.config import RunConfig, enumerate_cases, parse_config
from hjlab.errors import ConfigurationError
from hjlab.report import fmt


def write_config(tmp_path, text, name="run.toml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestParseConfig:
    def test_minimal_with_defaults(self, tmp_path):
        path = write_config(tmp_path, 'command = "ledger"\n')
        cfg = parse_config(path)
        assert cfg.command == "ledger"
        assert cfg.grid_n == (3,) and cfg.grid_p == (2.0,)
        assert cfg.tol_ode == 1e-10 and cfg.grid_points == 10_000
        assert cfg.seed == 0 and not cfg.emit_svg

    def test_boundary_violation_names_constraint(self, tmp_path):
        path = write_config(
            tmp_path,
            'command = "ledger"\ngrid.p = [2.0]\ngrid.q = [1.0]\n',
        )
        with pytest.raises(ConfigurationError, match="q > p-1"):
            parse_config(path)

    def test_malformed_file(self, tmp_path):
        path = write_config(tmp_path, "grid.n = [oops\n")
        with pytest.raises(ConfigurationError, match="malformed"):
            parse_config(path)

    def test_command_mismatch(self, tmp_path):
        path = write_config(tmp_path, 'command = "ledger"\n')
        with pytest.raises(ConfigurationError, match="does not match"):
            parse_config(path, "harnack")

    def test_unknown_key_rejected(self, tmp_path):
        path = write_config(tmp_path, 'command = "ledger"\nwhatever = 3\n')
        with pytest.raises(ConfigurationError, match="whatever"):
            parse_config(path)

    def test_empty_grid_rejected(self, tmp_path):
        path = write_config(tmp_path, 'command = "ledger"\ngrid.B = []\n')
        with pytest.raises(ConfigurationError, match="grid.B"):
            parse_config(path)

    def test_nonpositive_tolerance_rejected(self, tmp_path):
        path = write_config(tmp_path, 'command = "ledger"\ntol.ode = 0.0\n')
        with pytest.raises(ConfigurationError, match="tol.ode"):
            parse_config(path)


class TestEnumeration:
    def test_lexicographic_cross_product(self):
        cfg = RunConfig(
            command="certify-bochner",
            grid_n=(2, 3, 4), grid_p=(1.5, 2.0), grid_q=(2.0, 3.0),
        )
        cases = enumerate_cases(cfg)
        assert len(cases) == 12
        assert cases[0] == {"n": 2, "p": 1.5, "q": 2.0}
        assert cases[1] == {"n": 2, "p": 1.5, "q": 3.0}
        assert cases[2] == {"n": 2, "p": 2.0, "q": 2.0}
        assert cases[-1] == {"n": 4, "p": 2.0, "q": 3.0}


class TestExitCodes:
    def test_pass_run(self, tmp_path):
        path = write_config(
            tmp_path,
            'command = "certify-barrier"\ngrid.n = [3]\ngrid.p = [2.0]\n'
            'grid.q = [2.0]\ngrid.B = [1.0]\ngrid.R = [1.0]\n'
            f'grid_points = 500\nout_dir = "{tmp_path}/out"\n',
        )
        assert main(["certify-barrier", "--config", path]) == 0

    def test_fail_run(self, tmp_path):
        path = write_config(
            tmp_path,
            'command = "certify-barrier"\ngrid.n = [3]\ngrid.p = [2.0]\n'
            'grid.q = [2.0]\ngrid.B = [1.0]\ngrid.R = [1.0]\n'
            f'lambda_scale = 1e-4\ngrid_points = 500\nout_dir = "{tmp_path}/out"\n',
        )
        assert main(["certify-barrier", "--config", path]) == 1

    def test_usage_error(self, tmp_path):
        path = write_config(tmp_path, 'command = "ledger"\ngrid.q = [0.5]\n')
        assert main(["ledger", "--config", path]) == 2

    def test_missing_file(self, tmp_path):
        assert main(["ledger", "--config", str(tmp_path / "nope.toml")]) == 2

    def test_inconclusive_liouville(self, tmp_path):
        path = write_config(
            tmp_path,
            'command = "liouville"\ngrid.n = [3]\ngrid.p = [2.0]\ngrid.q = [2.0]\n'
            f'grid.s0 = [0.1]\nr_max = 0.01\nout_dir = "{tmp_path}/out"\n',
        )
        assert main(["liouville", "--config", path]) == 1


class TestReports:
    def test_report_columns(self, tmp_path):
        cfg = RunConfig(command="ledger", out_dir=str(tmp_path / "out"))
        rep = run(cfg)
        assert rep.exit_code == 0
        with open(tmp_path / "out" / "report.csv") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == [
            "case_id", "command", "n", "p", "q", "B", "R",
            "extra", "bound", "observed", "min_margin", "pass",
        ]
        assert rows[1][1] == "ledger" and rows[1][-1] == "1"

    def test_ledger_csv(self, tmp_path):
        cfg = RunConfig(command="ledger", out_dir=str(tmp_path / "out"))
        run(cfg)
        with open(tmp_path / "out" / "ledger.csv") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == [
            "n", "p", "q", "B", "S", "R", "a", "C", "D", "k", "c",
            "lambda", "mu", "A", "theta", "Theta", "c_grad", "c_harnack",
        ]
        assert len(rows) == 2

    def test_field_csv_metadata(self, tmp_path):
        cfg = RunConfig(
            command="solve-hj", grid_B=(0.0,), grid_s0=(0.5,),
            r0=0.5, r_max=5.0, out_dir=str(tmp_path / "out"),
        )
        rep = run(cfg)
        assert rep.exit_code == 0
        text = (tmp_path / "out" / "field_0.csv").read_text().splitlines()
        assert text[0].startswith("# manifold=euclidean")
        assert text[1].startswith("# exponents p=2")
        assert text[2] == "# provenance=ode_integration"
        assert text[3].startswith("# status=complete")
        assert text[4] == "r,u,s"

    def test_svg_emission(self, tmp_path):
        cfg = RunConfig(
            command="certify-barrier", grid_points=200,
            out_dir=str(tmp_path / "out"), emit_svg=True,
        )
        run(cfg)
        svg = (tmp_path / "out" / "plot_0.svg").read_text()
        assert svg.startswith("<svg") and "<polyline" in svg

    def test_determinism_bytes(self, tmp_path):
        base = dict(
            command="certify-bochner",
            grid_n=(2, 3), grid_p=(1.5, 2.0), grid_q=(2.0,),
            seed=42,
        )
        cfg1 = RunConfig(**base, out_dir=str(tmp_path / "a"))
        cfg2 = RunConfig(**base, out_dir=str(tmp_path / "b"))
        run(cfg1)
        run(cfg2)
        a = (tmp_path / "a" / "report.csv").read_bytes()
        b = (tmp_path / "b" / "report.csv").read_bytes()
        assert a == b

    def test_jobs_deterministic(self, tmp_path):
        base = dict(command="ledger", grid_n=(2, 3), grid_q=(2.0, 3.0), seed=1)
        cfg1 = RunConfig(**base, out_dir=str(tmp_path / "s"))
        cfg2 = RunConfig(**base, out_dir=str(tmp_path / "p"))
        run(cfg1, jobs=1)
        run(cfg2, jobs=3)
        assert (tmp_path / "s" / "ledger.csv").read_bytes() == (
            tmp_path / "p" / "ledger.csv"
        ).read_bytes()


def test_fmt_17_digits():
    assert fmt(1.0 / 3.0) == "0.33333333333333331"
    assert fmt(1) == "1"
    assert fmt(True) == "1"
    assert fmt(None) == ""
    assert fmt("x=1") == "x=1"


def test_console_entry_point(tmp_path):
    # the installed script must exist and honor the exit contract end to end
    path = tmp_path / "cfg.toml"
    path.write_text('command = "ledger"\nout_dir = "%s"\n' % (tmp_path / "out"))
    proc = subprocess.run(
        [sys.executable, "-m", "hjlab", "ledger", "--config", str(path)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert "summary:" in proc.stdout
