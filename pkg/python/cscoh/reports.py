"""
cscoh reports
Text and JSON renderings of validations, cohomology tables, harmonic bases,
Lefschetz checks, lemma verdicts, Massey products and scans. Output is
byte-deterministic for fixed inputs.
"""

import json
import textwrap
from typing import Any, Dict, Iterable, List, Optional, Sequence

from . import __version__
from .analysis import HlcReport, LemmaVerdict, MasseyResult, ScanReport, WedgeProbeReport
from .catalog import CatalogEntry
from .cohomology import CohomologyTable, Flavor
from .engine import CohomologyEngine
from .exterior import Bidegree, GeneratorNames, all_bidegrees, format_form
from .model import ValidationReport
from .scalars import format_scalar

SCHEMA_VERSION = 1
GRID_WIDTH = 4


def render_grid(table: CohomologyTable, flavor: Flavor) -> str:
    """(n+1)x(n+1) grid of dimensions, q descending down the rows"""
    n = table.n
    lines = [f"{flavor.value} h^{{p,q}}"]
    for q in range(n, -1, -1):
        row = "".join(f"{table.dim(flavor, Bidegree(p, q)):>{GRID_WIDTH}}" for p in range(n + 1))
        lines.append(f"q={q} |{row}")
    lines.append(" " * 5 + "".join(f"{'p=' + str(p):>{GRID_WIDTH}}" for p in range(n + 1)))
    return "\n".join(lines) + "\n"


def _wrap(text: str, width: int, indent: str = "    ") -> List[str]:
    return textwrap.wrap(text, width=width, initial_indent=indent, subsequent_indent=indent + "  ") or [indent]


def _parameters(engine: CohomologyEngine) -> Dict[str, str]:
    return {k: format_scalar(v) for k, v in sorted(engine.inst.assignments.items())}


def text_header(engine: CohomologyEngine) -> List[str]:
    inst = engine.inst
    params = " ".join(f"{k}={v}" for k, v in _parameters(engine).items())
    title = f"instance: {inst.spec.name} (n={inst.n})"
    return [f"cscoh {__version__}", f"{title} {params}".rstrip(), f"digest: {engine.digest()}"]


def render_validation(report: ValidationReport) -> List[str]:
    return ["checks:"] + [f"  {line}" for line in report.lines()]


def text_report(engine: CohomologyEngine, body: Iterable[str]) -> str:
    lines = text_header(engine) + render_validation(engine.validation_report()) + [""] + list(body)
    return "\n".join(line.rstrip() for line in lines) + "\n"


def json_report(engine: CohomologyEngine, command: str, payload: Dict[str, Any]) -> str:
    inst = engine.inst
    document = {
        "schema": SCHEMA_VERSION,
        "tool": "cscoh",
        "version": __version__,
        "command": command,
        "instance": {
            "name": inst.spec.name,
            "n": inst.n,
            "parameters": _parameters(engine),
            "digest": engine.digest(),
        },
        "validation": [
            {"name": c.name, "status": c.status.value, "detail": c.detail} for c in engine.validation_report().checks
        ],
        command: payload,
    }
    return json.dumps(document, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def cohomology_text(engine: CohomologyEngine, flavors: Sequence[Flavor]) -> List[str]:
    table = engine.table
    lines = []
    for flavor in flavors:
        lines += render_grid(table, flavor).splitlines() + [""]
    d_dims = ", ".join(f"k={k}: {dim}" for k, dim in sorted(table.d_dims.items()))
    lines.append(f"D-cohomology dims: {d_dims}")
    return lines


def cohomology_payload(engine: CohomologyEngine, flavors: Sequence[Flavor]) -> Dict[str, Any]:
    table = engine.table
    inst = engine.inst
    flavors_out = {}
    for flavor in flavors:
        cells = {}
        for bd in all_bidegrees(inst.n):
            cell = table.cell(flavor, bd)
            cells[f"{bd.p},{bd.q}"] = {
                "dim": cell.dim,
                "representatives": [inst.format(u) for u in cell.representatives],
            }
        flavors_out[flavor.value] = {"dims": table.dims(flavor), "cells": cells}
    return {
        "bidegrees": [f"{bd.p},{bd.q}" for bd in all_bidegrees(inst.n)],
        "flavors": flavors_out,
        "d_cohomology": {str(k): dim for k, dim in sorted(table.d_dims.items())},
    }


def harmonic_text(engine: CohomologyEngine, flavors: Sequence[Flavor], width: int) -> List[str]:
    table = engine.table
    lines = []
    for flavor in flavors:
        lines.append(f"{flavor.label} harmonic forms")
        for bd in all_bidegrees(engine.inst.n):
            cell = table.cell(flavor, bd)
            lines.append(f"  {bd} dim {cell.harmonic_dim}")
            for u in cell.harmonic_basis:
                lines += _wrap(engine.inst.format(u), width)
        lines.append("")
    return lines


def harmonic_payload(engine: CohomologyEngine, flavors: Sequence[Flavor]) -> Dict[str, Any]:
    table = engine.table
    return {
        flavor.value: {
            f"{bd.p},{bd.q}": [engine.inst.format(u) for u in table.cell(flavor, bd).harmonic_basis]
            for bd in all_bidegrees(engine.inst.n)
        }
        for flavor in flavors
    }


def hlc_text(report: HlcReport) -> List[str]:
    verdict = "HOLDS" if report.overall else f"FAILS at k={', '.join(str(k) for k in report.failing)}"
    lines = [f"hlc ({report.flavor.value}): {verdict}"]
    for step in report.steps:
        status = "iso" if step.iso else ("not well-defined" if not step.well_defined else "not iso")
        lines.append(
            f"  k={step.k}: rank {step.rank}, dim {step.source_dim} -> dim {step.target_dim}, {status}"
        )
        if step.witness and not step.iso:
            lines.append(f"    witness: {step.witness}")
    return lines


def hlc_payload(report: HlcReport) -> Dict[str, Any]:
    return {
        "flavor": report.flavor.value,
        "overall": report.overall,
        "failing": report.failing,
        "steps": [
            {
                "k": s.k,
                "well_defined": s.well_defined,
                "rank": s.rank,
                "source_dim": s.source_dim,
                "target_dim": s.target_dim,
                "iso": s.iso,
                "witness": s.witness,
            }
            for s in report.steps
        ],
    }


def lemma_text(verdict: LemmaVerdict, n: int) -> List[str]:
    lines = [verdict.summary()]
    lines.append(f"  hlc route: {'pass' if verdict.hlc_route else 'fail'}")
    lines.append(f"  dimension route: {'pass' if verdict.dimension_route else 'fail'}")
    lines.append(f"  direct route: {'pass' if verdict.direct_route else 'fail'}")
    if verdict.direct_witness:
        lines.append(f"    witness: {verdict.direct_witness}")
    lines.append("slack (h_BC + h_A) - (h_dbar + h_dbar_lambda)")
    for q in range(n, -1, -1):
        row = "".join(f"{verdict.slack[Bidegree(p, q)]:>{GRID_WIDTH}}" for p in range(n + 1))
        lines.append(f"q={q} |{row}")
    lines.append(" " * 5 + "".join(f"{'p=' + str(p):>{GRID_WIDTH}}" for p in range(n + 1)))
    lines.append("anti-diagonal sums, sum over q-p=k of h_BC + h_A vs 2 dim H_D^k")
    for k, (total, doubled) in sorted(verdict.anti_diagonal.items()):
        lines.append(f"  k={k}: {total} vs {doubled}")
    return lines


def lemma_payload(verdict: LemmaVerdict) -> Dict[str, Any]:
    return {
        "holds": verdict.holds,
        "agree": verdict.agree,
        "hlc_route": verdict.hlc_route,
        "dimension_route": verdict.dimension_route,
        "direct_route": verdict.direct_route,
        "hlc_failures": list(verdict.hlc_failures),
        "direct_witness": verdict.direct_witness,
        "slack": {f"{bd.p},{bd.q}": value for bd, value in verdict.slack.items()},
        "anti_diagonal": {str(k): {"bc_plus_a": t, "twice_d": d} for k, (t, d) in sorted(verdict.anti_diagonal.items())},
    }


def _in_bidegree(bd: Optional[Bidegree]) -> str:
    return "" if bd is None else f" in {bd}"


def massey_text(result: MasseyResult, names: GeneratorNames) -> List[str]:
    verdict = "vanishes" if result.vanishes else "does NOT vanish"
    return [
        f"massey <a, b, c>{_in_bidegree(result.bidegree)}: {verdict}",
        f"  a = {format_form(result.a, names)}",
        f"  b = {format_form(result.b, names)}",
        f"  c = {format_form(result.c, names)}",
        f"  f = {format_form(result.f, names)}  (dbar f = a^b)",
        f"  g = {format_form(result.g, names)}  (dbar g = b^c)",
        f"  representative = {format_form(result.representative, names)}",
        f"  indeterminacy dim = {result.indeterminacy_dim}",
    ]


def massey_payload(result: MasseyResult, names: GeneratorNames) -> Dict[str, Any]:
    return {
        "a": format_form(result.a, names),
        "b": format_form(result.b, names),
        "c": format_form(result.c, names),
        "f": format_form(result.f, names),
        "g": format_form(result.g, names),
        "representative": format_form(result.representative, names),
        "bidegree": None if result.bidegree is None else f"{result.bidegree.p},{result.bidegree.q}",
        "indeterminacy_dim": result.indeterminacy_dim,
        "vanishes": result.vanishes,
    }


def probe_text(report: WedgeProbeReport, names: GeneratorNames) -> List[str]:
    verdict = "closed" if report.closed else f"{len(report.failures)} failures"
    lines = [f"wedge probe ({report.flavor.value}): {report.pairs_checked} pairs, {verdict}"]
    for failure in report.failures:
        lines.append(
            f"  ({format_form(failure.left, names)}) ^ ({format_form(failure.right, names)}) "
            f"= {format_form(failure.product, names)} is not harmonic in {failure.bidegree}"
        )
    return lines


def probe_payload(report: WedgeProbeReport, names: GeneratorNames) -> Dict[str, Any]:
    return {
        "flavor": report.flavor.value,
        "pairs_checked": report.pairs_checked,
        "closed": report.closed,
        "failures": [
            {
                "left": format_form(f.left, names),
                "right": format_form(f.right, names),
                "product": format_form(f.product, names),
                "bidegree": f"{f.bidegree.p},{f.bidegree.q}",
            }
            for f in report.failures
        ],
    }


def _verdict_word(verdict: Optional[bool]) -> str:
    if verdict is None:
        return "-"
    return "yes" if verdict else "no"


def scan_text(report: ScanReport, spec_name: str) -> str:
    lines = [f"cscoh {__version__}", f"scan of {spec_name} over {report.parameter}: {report.what}"]
    for row in report.rows:
        lines.append(
            f"  {report.parameter}={format_scalar(row.value)}: {row.status}, "
            f"{_verdict_word(row.verdict)}  {row.detail}".rstrip()
        )
    lines.append(report.summary())
    return "\n".join(lines) + "\n"


def scan_json(report: ScanReport, spec_name: str) -> str:
    document = {
        "schema": SCHEMA_VERSION,
        "tool": "cscoh",
        "version": __version__,
        "command": "scan",
        "scan": {
            "spec": spec_name,
            "parameter": report.parameter,
            "what": report.what,
            "rows": [
                {"value": format_scalar(r.value), "status": r.status, "verdict": r.verdict, "detail": r.detail}
                for r in report.rows
            ],
            "summary": report.summary(),
        },
    }
    return json.dumps(document, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def catalog_text(entries: Sequence[CatalogEntry], width: int) -> str:
    lines = []
    for entry in entries:
        lines.append(entry.name)
        lines += _wrap(entry.provenance, width)
        for name, description in sorted(entry.parameters.items()):
            lines.append(f"    parameter {name}: {description}")
    return "\n".join(lines) + "\n"


def catalog_json(entries: Sequence[CatalogEntry]) -> str:
    document = {
        "schema": SCHEMA_VERSION,
        "tool": "cscoh",
        "version": __version__,
        "command": "catalog",
        "catalog": [
            {"name": e.name, "provenance": e.provenance, "parameters": dict(e.parameters), "text": e.text}
            for e in entries
        ],
    }
    return json.dumps(document, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
