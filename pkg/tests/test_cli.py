import json
import subprocess
import sys
from pathlib import Path

import pytest

from ivtdds import cli

GOLDEN = Path(__file__).parent / "golden"


def run(*args):
    return subprocess.run([sys.executable, "-m", "ivtdds", *args], capture_output=True, text=True)


def call(capsys, *args):
    code = cli.main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestGoldenTables:
    @pytest.mark.parametrize("variant", ["I", "II"])
    def test_csv_bit_exact(self, variant):
        res = run("tables", "--p", "3", "--variant", variant, "--format", "csv")
        assert res.returncode == 0
        assert res.stdout == (GOLDEN / f"tables_type_{variant}.csv").read_text()

    def test_header(self):
        first = (GOLDEN / "tables_type_I.csv").read_text().splitlines()[0]
        assert first == "A,B,j,attractor,unique_steady,locally_stable,globally_stable"

    def test_discrepancy_warning(self, capsys):
        code, out, _ = call(capsys, "tables", "--variant", "I", "--rows", "2,0")
        assert code == 0
        assert "warning: type-I row A=2,B=0 column unique_steady" in out
        assert "3(0)" in out

    def test_type_two_clean(self, capsys):
        _, out, _ = call(capsys, "tables", "--variant", "II")
        assert "warning" not in out
        assert "diff vs published table: none" in out


class TestExitCodes:
    def test_ok(self):
        res = run("apply", "--j", "7", "--x", "55")
        assert (res.returncode, res.stdout) == (0, "14\n")

    @pytest.mark.parametrize("args", [
        ["bogus"], ["classify"], ["apply", "--j", "7"], ["tables", "--rows", "x"],
        ["analysis", "series", "--j", "11", "--n-max", "50"], ["orbit", "--j", "8", "--start", "1", "--p", "1"],
    ])
    def test_usage(self, args):
        assert run(*args).returncode == cli.EXIT_USAGE

    @pytest.mark.parametrize("args", [
        ["odpe", "hops", "--j", "3"], ["apply", "--j", "27", "--x", "1"],
        ["stability", "--j", "0", "--A", "1", "--B", "1", "--point", "0"],
        ["steady", "--j", "0", "--A", "3"],
    ])
    def test_domain(self, args):
        res = run(*args)
        assert res.returncode == cli.EXIT_DOMAIN
        assert res.stderr.startswith("ivtdds: error:")

    def test_help_mentions_codes(self):
        res = run("--help")
        assert res.returncode == 0 and "2 usage error, 3 domain error" in res.stdout


class TestOutput:
    def test_deterministic_json(self):
        a = run("odpe", "build", "--j", "8", "--format", "json")
        b = run("odpe", "build", "--j", "8", "--format", "json")
        assert a.stdout == b.stdout
        doc = json.loads(a.stdout)
        assert doc["schema_version"] == "1.0"
        assert doc["payload"]["routes"]["16"] == [16, 20, 6, 2]
        assert doc["payload"]["layers"]["stations"] == [2, 8, 26]

    def test_rule(self, capsys):
        _, out, _ = call(capsys, "rule", "--j", "7")
        assert out == "0 -> 1\n1 -> 2\n2 -> 0\n"

    def test_orbit(self, capsys):
        _, out, _ = call(capsys, "orbit", "--j", "8", "--start", "16")
        assert out == "16 20 6 | cycle: 2 0\n"

    def test_codec(self, capsys):
        assert call(capsys, "digits", "--x", "55")[1] == "2001\n"
        assert call(capsys, "value", "2001")[1] == "55\n"

    def test_enumerate_flags_claim(self, capsys):
        _, out, _ = call(capsys, "enumerate")
        assert "0 1 2 6 7 8 9 10 11" in out
        assert "warning: measured count 9 contradicts the (p^(p-1) - 1) = 8 claim" in out

    def test_hops_header(self, capsys):
        _, out, _ = call(capsys, "odpe", "hops", "--j", "8")
        lines = out.splitlines()
        assert lines[0] == "# convention: hops to sca, nodes 1..horizon, divided by node count"
        assert lines[1] == "# calibration: published 4.73, residual -2.00"
        assert "2.73" in lines[2]

    def test_fractal_csv(self, capsys):
        _, out, _ = call(capsys, "analysis", "fractal", "--j", "0", "--A", "1", "--B", "1",
                         "--format", "csv")
        assert out.splitlines()[0] == "scale,count"

    def test_contraction(self, capsys):
        _, out, _ = call(capsys, "analysis", "contraction", "--p", "2", "--j", "3")
        assert "contraction: false" in out and "witness (1, 2) with quotient 2" in out


class TestConfig:
    def test_file_and_precedence(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# base and rule\np = 3\nj = 7\nscan-limit = 80\n")
        _, out, _ = call(capsys, "classify", "--j", "8", "--config", str(cfg), "--format", "json")
        doc = json.loads(out)
        assert doc["config"]["scan_limit"] == 80
        assert doc["config"]["j"] == 8
        assert doc["payload"]["system"] == "IVT_8^(3,1)"

    @pytest.mark.parametrize("text", ["nonsense\n", "colour = 3\n", "p = three\n"])
    def test_bad_file(self, tmp_path, capsys, text):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text(text)
        code, _, err = call(capsys, "rule", "--j", "1", "--config", str(cfg))
        assert code == cli.EXIT_USAGE and "usage error" in err

    def test_missing_file(self, capsys):
        assert call(capsys, "rule", "--j", "1", "--config", "/nonexistent.cfg")[0] == cli.EXIT_USAGE
