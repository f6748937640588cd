"""
Tests for the cscoh command line
"""

import json
import pytest
import yaml
from pathlib import Path
from unittest.mock import patch

import sys
sys.path.insert(0, str(Path(__file__).parent.parent / "python"))

from typer.testing import CliRunner

from cscoh import catalog
from cscoh.cli import app, parse_params
from cscoh.config import reset_config_manager
from cscoh.errors import ConsistencyError, SpecError
from cscoh.scalars import parse_scalar

runner = CliRunner()


@pytest.fixture(autouse=True)
def isolated(tmp_path, monkeypatch):
    """Fresh config manager, empty home and working directory per test"""
    home = tmp_path / "home"
    work = tmp_path / "work"
    home.mkdir()
    work.mkdir()
    monkeypatch.setenv("HOME", str(home))
    for name in ("CSCOH_FORMAT", "CSCOH_LOG_LEVEL", "CSCOH_TEXT_WIDTH", "CSCOH_STAR_CHECKS",
                 "CSCOH_MINKOWSKI_CHECKS"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.chdir(work)
    reset_config_manager()
    yield work
    reset_config_manager()


class TestParseParams:
    """Test --param parsing"""

    def test_single_and_scan_values(self):
        """Test named values and bare values extending the previous name"""
        values = parse_params("t=0,1/2, 1 ,s=i")
        assert values == {
            "t": [parse_scalar("0"), parse_scalar("1/2"), parse_scalar("1")],
            "s": [parse_scalar("i")],
        }

    def test_empty(self):
        """Test no parameters"""
        assert parse_params(None) == {}

    @pytest.mark.parametrize("text", ["1/2", "t=1,t=2"])
    def test_malformed(self, text):
        """Test a bare leading value and a repeated name"""
        with pytest.raises(SpecError):
            parse_params(text)


class TestAnalysisCommands:
    """Test the analysis commands end to end"""

    def test_validate(self):
        """Test validate prints checks and the verdict"""
        result = runner.invoke(app, ["validate", "-c", "kodaira-thurston"])
        assert result.exit_code == 0
        assert result.stdout.startswith("cscoh 1.0.0\ninstance: kodaira-thurston (n=2)\n")
        assert result.stdout.endswith("validation: ok\n")

    def test_cohomology_json(self):
        """Test JSON output carries the BC dimensions"""
        result = runner.invoke(app, ["cohomology", "-c", "kodaira-thurston", "-f", "json"])
        assert result.exit_code == 0
        doc = json.loads(result.stdout)
        assert doc["command"] == "cohomology"
        assert doc["cohomology"]["flavors"]["bc"]["dims"] == [1, 1, 2, 1, 3, 1, 1, 2, 1]
        assert set(doc["cohomology"]["flavors"]) == {"dolbeault", "dbar-lambda", "bc", "aeppli"}

    def test_cohomology_golden_grid(self):
        """Test the text report contains the golden BC grid"""
        golden = (Path(__file__).parent / "golden" / "kodaira_thurston_bc.txt").read_text()
        result = runner.invoke(app, ["cohomology", "-c", "kodaira-thurston", "--flavor", "bc"])
        assert result.exit_code == 0
        assert golden in result.stdout

    def test_unknown_flavor(self):
        """Test an unknown flavor exits 1"""
        result = runner.invoke(app, ["cohomology", "-c", "kodaira-thurston", "--flavor", "de-rham"])
        assert result.exit_code == 1
        assert "unknown flavor" in result.output

    def test_harmonic(self):
        """Test harmonic listings"""
        result = runner.invoke(app, ["harmonic", "-c", "kodaira-thurston", "--flavor", "dolbeault"])
        assert result.exit_code == 0
        assert "Dolbeault harmonic forms" in result.stdout

    def test_hlc(self):
        """Test the Iwasawa HLC fails at k = 2"""
        result = runner.invoke(app, ["hlc", "-c", "iwasawa", "-f", "json"])
        assert result.exit_code == 0
        doc = json.loads(result.stdout)
        assert 2 in doc["hlc"]["dolbeault"]["failing"]

    def test_lemma(self):
        """Test the lemma fails on Kodaira-Thurston"""
        result = runner.invoke(app, ["lemma", "-c", "kodaira-thurston"])
        assert result.exit_code == 0
        assert "lemma: FAILS" in result.stdout

    def test_massey(self):
        """Test the Nakamura Massey product away from t = 0"""
        result = runner.invoke(app, [
            "massey", "-c", "nakamura", "-p", "t=1/2", "--a", "2*t*u1", "--b", "v2", "--c", "v2",
        ])
        assert result.exit_code == 0
        assert "does NOT vanish" in result.stdout

    def test_massey_zero_class(self):
        """Test a class that is zero at t = 0 gives a vanishing product"""
        result = runner.invoke(app, ["massey", "-c", "nakamura", "--a", "2*t*u1", "--b", "v2", "--c", "v2"])
        assert result.exit_code == 0
        assert "massey <a, b, c>: vanishes" in result.stdout

    def test_massey_zero_class_json(self):
        """Test the JSON payload of a trivially vanishing product"""
        result = runner.invoke(app, [
            "massey", "-c", "kodaira-thurston", "--a", "phi1", "--b", "0*phi1", "--c", "phi1", "-f", "json",
        ])
        assert result.exit_code == 0
        payload = json.loads(result.stdout)["massey"]
        assert payload["vanishes"] is True
        assert payload["bidegree"] is None
        assert payload["representative"] == "0"

    def test_massey_precondition(self):
        """Test a class that is not dbar-closed exits 1"""
        result = runner.invoke(app, [
            "massey", "-c", "nakamura", "-p", "t=1/2", "--a", "u3", "--b", "v2", "--c", "v2",
        ])
        assert result.exit_code == 1
        assert "not dbar-closed" in result.output

    def test_probe(self):
        """Test the BC wedge probe reports failures"""
        result = runner.invoke(app, ["probe", "-c", "kodaira-thurston"])
        assert result.exit_code == 0
        assert "failures" in result.stdout

    def test_scan(self):
        """Test a lemma scan over t"""
        result = runner.invoke(app, ["scan", "-c", "nakamura", "-p", "t=0,1/2"])
        assert result.exit_code == 0
        lines = result.stdout.splitlines()
        assert "scan of nakamura over t: lemma" in lines
        assert lines[-1] == "mixed"

    def test_scan_bad_target(self):
        """Test unknown scan targets exit 1"""
        result = runner.invoke(app, ["scan", "-c", "nakamura", "-p", "t=0", "--what", "formality"])
        assert result.exit_code == 1
        assert "unknown scan target" in result.output

    def test_scan_two_parameters(self):
        """Test a scan over two parameters is refused"""
        result = runner.invoke(app, ["scan", "-c", "nakamura", "-p", "t=0,s=1"])
        assert result.exit_code == 1

    def test_consistency_error_exits_2(self):
        """Test internal inconsistencies exit 2 with a dump"""
        error = ConsistencyError("routes disagree", dump={"routes": "hlc"})
        with patch("cscoh.engine.CohomologyEngine.lemma", side_effect=error):
            result = runner.invoke(app, ["lemma", "-c", "kodaira-thurston"])
        assert result.exit_code == 2
        assert "routes disagree" in result.output
        assert '"routes": "hlc"' in result.output


class TestSpecSelection:
    """Test how a spec is chosen"""

    def test_neither_given(self):
        """Test --catalog or --spec is required"""
        result = runner.invoke(app, ["validate"])
        assert result.exit_code == 1
        assert "give exactly one of --catalog and --spec" in result.output

    def test_both_given(self):
        """Test --catalog and --spec together are refused"""
        result = runner.invoke(app, ["validate", "-c", "iwasawa", "-s", "x.cscoh"])
        assert result.exit_code == 1

    def test_unknown_catalog_entry(self):
        """Test unknown catalog names exit 1"""
        result = runner.invoke(app, ["validate", "-c", "hopf"])
        assert result.exit_code == 1
        assert "unknown catalog entry" in result.output

    def test_spec_file(self, isolated):
        """Test a spec file path"""
        (isolated / "kt.cscoh").write_text(catalog.KODAIRA_THURSTON)
        result = runner.invoke(app, ["validate", "-s", "kt.cscoh"])
        assert result.exit_code == 0
        assert result.stdout.endswith("validation: ok\n")

    def test_missing_spec_file(self):
        """Test a missing spec file exits 1"""
        result = runner.invoke(app, ["validate", "-s", "missing.cscoh"])
        assert result.exit_code == 1
        assert "not found" in result.output

    def test_spec_paths(self, isolated):
        """Test names are looked up in configured spec_paths"""
        specs = isolated / "specs"
        specs.mkdir()
        (specs / "kt.cscoh").write_text(catalog.KODAIRA_THURSTON)
        config_dir = isolated / ".cscoh"
        config_dir.mkdir()
        (config_dir / "config.yaml").write_text(yaml.safe_dump({"spec_paths": [str(specs)]}))

        result = runner.invoke(app, ["validate", "-s", "kt"])
        assert result.exit_code == 0

    def test_environment_format(self, monkeypatch):
        """Test CSCOH_FORMAT switches the default output"""
        monkeypatch.setenv("CSCOH_FORMAT", "json")
        result = runner.invoke(app, ["validate", "-c", "kodaira-thurston"])
        assert result.exit_code == 0
        assert json.loads(result.stdout)["validate"] == {"ok": True}


class TestCatalogCommands:
    """Test the catalog sub-commands"""

    def test_list(self):
        """Test every entry is listed"""
        result = runner.invoke(app, ["catalog", "list"])
        assert result.exit_code == 0
        for entry in catalog.list_entries():
            assert entry.name in result.stdout

    def test_list_json(self):
        """Test the JSON catalog"""
        result = runner.invoke(app, ["catalog", "list", "-f", "json"])
        assert result.exit_code == 0
        names = [e["name"] for e in json.loads(result.stdout)["catalog"]]
        assert names == [e.name for e in catalog.list_entries()]

    def test_show(self):
        """Test show prints the entry text verbatim"""
        result = runner.invoke(app, ["catalog", "show", "iwasawa"])
        assert result.exit_code == 0
        assert result.stdout == catalog.entry("iwasawa").text

    def test_show_unknown(self):
        """Test show with an unknown name"""
        result = runner.invoke(app, ["catalog", "show", "hopf"])
        assert result.exit_code == 1


class TestConfigCommands:
    """Test the config sub-commands"""

    def test_show_defaults(self):
        """Test the effective defaults are printed"""
        result = runner.invoke(app, ["config", "show"])
        assert result.exit_code == 0
        assert "text_width: 100" in result.stdout
        assert "output_format: text" in result.stdout

    def test_show_invalid(self, isolated):
        """Test configuration issues exit 1"""
        config_dir = isolated / ".cscoh"
        config_dir.mkdir()
        (config_dir / "config.yaml").write_text("text_width: 10\n")

        result = runner.invoke(app, ["config", "show"])
        assert result.exit_code == 1
        assert "below 40" in result.output

    def test_init(self, isolated):
        """Test init writes a loadable file"""
        path = isolated / "conf" / "config.yaml"
        result = runner.invoke(app, ["config", "init", "--path", str(path)])
        assert result.exit_code == 0
        assert "wrote" in result.stdout
        assert yaml.safe_load(path.read_text())["output_format"] == "text"

    def test_sample(self):
        """Test the sample configuration"""
        result = runner.invoke(app, ["config", "sample"])
        assert result.exit_code == 0
        assert "output_format" in result.stdout
