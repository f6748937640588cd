"""
Tests for text and JSON reports
"""

import json
import pytest
from pathlib import Path

import sys
sys.path.insert(0, str(Path(__file__).parent.parent / "python"))

from cscoh import __version__, catalog, reports
from cscoh.analysis import ScanReport, ScanRow
from cscoh.cohomology import ALL_FLAVORS, Flavor
from cscoh.engine import CohomologyEngine
from cscoh.scalars import parse_scalar

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="module")
def kt():
    return CohomologyEngine(catalog.get("kodaira-thurston"))


class TestGrid:
    """Test the dimension grid"""

    def test_golden_bott_chern(self, kt):
        """Test the Kodaira-Thurston BC grid matches the golden file"""
        expected = (GOLDEN / "kodaira_thurston_bc.txt").read_text()
        assert reports.render_grid(kt.table, Flavor.BC) == expected

    def test_deterministic(self, kt):
        """Test repeated rendering is byte-identical"""
        first = reports.text_report(kt, reports.cohomology_text(kt, ALL_FLAVORS))
        second = reports.text_report(CohomologyEngine(catalog.get("kodaira-thurston")),
                                     reports.cohomology_text(kt, ALL_FLAVORS))
        assert first == second


class TestTextReports:
    """Test text renderings"""

    def test_header(self, kt):
        """Test version, instance and digest lead the report"""
        lines = reports.text_report(kt, ["body"]).splitlines()
        assert lines[0] == f"cscoh {__version__}"
        assert lines[1] == "instance: kodaira-thurston (n=2)"
        assert lines[2] == f"digest: {kt.digest()}"
        assert lines[3] == "checks:"
        assert lines[-1] == "body"

    def test_lemma(self, kt):
        """Test the lemma report shows routes, slack and anti-diagonal sums"""
        text = "\n".join(reports.lemma_text(kt.lemma(), 2))
        assert text.startswith("lemma: FAILS")
        assert "dimension route: fail" in text
        assert "slack (h_BC + h_A) - (h_dbar + h_dbar_lambda)" in text
        assert "anti-diagonal sums" in text

    def test_hlc(self, kt):
        """Test one line per Lefschetz step"""
        lines = reports.hlc_text(kt.hlc(Flavor.BC))
        assert lines[0].startswith("hlc (bc): ")
        assert sum(1 for line in lines if line.startswith("  k=")) == 3

    def test_probe(self, kt):
        """Test probe failures are listed"""
        lines = reports.probe_text(kt.wedge_probe(Flavor.BC), kt.inst.names)
        assert "failures" in lines[0]
        assert any("is not harmonic in" in line for line in lines[1:])

    def test_harmonic(self, kt):
        """Test harmonic listings per bidegree"""
        lines = reports.harmonic_text(kt, [Flavor.DOLBEAULT], 100)
        assert lines[0] == "Dolbeault harmonic forms"
        assert "  (1,0) dim 1" in lines

    def test_scan(self):
        """Test scan rows and the summary line"""
        report = ScanReport("t", "lemma", (
            ScanRow(parse_scalar("0"), "ok", True, "held"),
            ScanRow(parse_scalar("1/2"), "ok", False, "failed"),
        ))
        lines = reports.scan_text(report, "nakamura").splitlines()
        assert lines[1] == "scan of nakamura over t: lemma"
        assert lines[2] == "  t=0: ok, yes  held"
        assert lines[3] == "  t=1/2: ok, no  failed"
        assert lines[-1] == "mixed"

    def test_catalog(self):
        """Test the catalog listing names every entry"""
        text = reports.catalog_text(catalog.list_entries(), 80)
        for e in catalog.list_entries():
            assert f"{e.name}\n" in text
        assert "parameter t:" in text


class TestJsonReports:
    """Test JSON documents"""

    def test_envelope(self, kt):
        """Test schema, tool, instance and validation fields"""
        doc = json.loads(reports.json_report(kt, "cohomology", reports.cohomology_payload(kt, ALL_FLAVORS)))
        assert doc["schema"] == reports.SCHEMA_VERSION
        assert doc["tool"] == "cscoh"
        assert doc["command"] == "cohomology"
        assert doc["instance"]["name"] == "kodaira-thurston"
        assert doc["instance"]["digest"] == kt.digest()
        assert all(check["status"] != "failed" for check in doc["validation"])
        assert doc["cohomology"]["flavors"]["bc"]["dims"] == [1, 1, 2, 1, 3, 1, 1, 2, 1]
        assert doc["cohomology"]["flavors"]["dolbeault"]["cells"]["1,0"]["representatives"] == ["phi1"]

    def test_lemma_payload(self, kt):
        """Test the lemma payload carries every route"""
        payload = reports.lemma_payload(kt.lemma())
        assert payload["holds"] is False
        assert payload["agree"] is True
        assert set(payload["slack"]) == {"0,0", "1,0", "0,1", "2,0", "1,1", "0,2", "2,1", "1,2", "2,2"}

    def test_scan_json(self):
        """Test scan JSON rows"""
        report = ScanReport("t", "lemma", (ScanRow(parse_scalar("-1/3"), "ok", False, ""),))
        doc = json.loads(reports.scan_json(report, "nakamura"))
        assert doc["scan"]["rows"] == [{"value": "-1/3", "status": "ok", "verdict": False, "detail": ""}]
        assert doc["scan"]["summary"] == "fails at all sampled values"
