"""
cscoh engine
One validated instance and everything computed from it, built lazily and cached:
the sl2 data, the symplectic star, the metric with its Laplacians, the
cohomology table and the analyses on top.
"""

import hashlib
import logging
from functools import cached_property
from typing import Dict, Mapping, Optional

from .analysis import (
    HlcReport,
    LemmaVerdict,
    MasseyResult,
    WedgeProbeReport,
    hlc_check,
    lemma_verdict,
    massey_triple,
    wedge_closure_probe,
)
from .cohomology import CohomologyTable, Complexes, Flavor, compute_table
from .config import EngineConfig
from .errors import ConsistencyError, StarUnavailable
from .exterior import Bidegree, Form
from .model import CheckStatus, ComplexInstance, ManifoldSpec, ValidationReport, format_spec, instantiate
from .operators import (
    Admissibility,
    HodgeData,
    MetricData,
    Sl2Data,
    SymplecticStar,
    build_laplacians,
    build_metric,
    build_sl2,
    build_symplectic_star,
    canonical_weights,
    minkowski_identity_check,
    validate_sl2,
    validate_star,
)
from .scalars import GaussianRational, format_scalar

logger = logging.getLogger(__name__)

STAR_CHECKS = "*_s cross-checks"
MINKOWSKI_CHECKS = "Minkowski identities"


class CohomologyEngine:
    """Lazy pipeline over one ComplexInstance"""

    def __init__(self, inst: ComplexInstance, config: Optional[EngineConfig] = None):
        self.inst = inst
        self.config = config or EngineConfig()
        self._star_skip_reason = ""
        self._hlc: Dict[Flavor, HlcReport] = {}

    @classmethod
    def from_spec(
        cls,
        spec: ManifoldSpec,
        assignments: Optional[Mapping[str, GaussianRational]] = None,
        config: Optional[EngineConfig] = None,
    ) -> "CohomologyEngine":
        return cls(instantiate(spec, assignments), config)

    @cached_property
    def sl2(self) -> Sl2Data:
        """L, Lambda, B and dbar_lambda, validated before anything uses them"""
        s = build_sl2(self.inst)
        self._sl2_report = validate_sl2(s, self.inst)
        return s

    @property
    def sl2_report(self) -> ValidationReport:
        self.sl2
        return self._sl2_report

    @cached_property
    def star(self) -> Optional[SymplecticStar]:
        if not self.config.star_checks:
            self._star_skip_reason = "disabled by configuration"
            return None
        try:
            return build_symplectic_star(self.inst)
        except StarUnavailable as e:
            logger.warning("%s", e)
            self._star_skip_reason = str(e)
            return None

    @cached_property
    def star_report(self) -> Optional[ValidationReport]:
        if self.star is None:
            return None
        return validate_star(self.star, self.inst, self.sl2)

    @cached_property
    def metric(self) -> MetricData:
        return build_metric(self.inst)

    @cached_property
    def hodge(self) -> HodgeData:
        return build_laplacians(self.inst, self.sl2, self.metric)

    @cached_property
    def minkowski_report(self) -> Optional[ValidationReport]:
        """Identities that must hold for an admissible metric; a failure is an engine bug"""
        if not (self.metric.admissible and self.config.minkowski_checks):
            return None
        report = minkowski_identity_check(self.inst, self.sl2, self.hodge, self.star)
        if not report.ok:
            failure = report.failures()[0]
            raise ConsistencyError(
                f"{failure.name} fails under an admissible metric: {failure.detail}",
                dump={"identity": failure.name, "weights": [str(w) for w in self.metric.weights]},
            )
        return report

    @cached_property
    def table(self) -> CohomologyTable:
        return compute_table(self.inst, self.sl2, self.hodge)

    @cached_property
    def complexes(self) -> Complexes:
        return Complexes.of(self.inst, self.sl2)

    def _metric_line(self, report: ValidationReport):
        m = self.metric
        weights = ", ".join(str(w) for w in m.weights)
        if m.status is Admissibility.ADMISSIBLE:
            report.add("metric admissible", CheckStatus.PASSED, f"weights {weights}: {m.detail}")
            return
        detail = f"{m.status.value} with weights {weights}: {m.detail}"
        suggested = canonical_weights(self.inst)
        if suggested is not None:
            detail += f"; admissible weights {', '.join(str(w) for w in suggested)}"
        report.add("metric admissible", CheckStatus.NOT_CHECKED, detail)

    def validation_report(self) -> ValidationReport:
        """Every check run on this instance, in pipeline order"""
        report = ValidationReport()
        report.extend(self.inst.report)
        report.extend(self.sl2_report)
        if self.star_report is not None:
            report.extend(self.star_report)
        else:
            report.add(STAR_CHECKS, CheckStatus.SKIPPED, self._star_skip_reason)
        self._metric_line(report)
        if self.minkowski_report is not None:
            report.extend(self.minkowski_report)
        else:
            reason = "disabled by configuration" if not self.config.minkowski_checks else "metric not admissible"
            report.add(MINKOWSKI_CHECKS, CheckStatus.SKIPPED, reason)
        report.extend(self.table.checks)
        return report

    def hlc(self, flavor: Flavor = Flavor.DOLBEAULT) -> HlcReport:
        if flavor not in self._hlc:
            self._hlc[flavor] = hlc_check(flavor, self.table, self.inst, self.sl2, self.complexes)
        return self._hlc[flavor]

    def lemma(self) -> LemmaVerdict:
        return lemma_verdict(self.inst, self.sl2, self.table, self.hlc(Flavor.DOLBEAULT))

    def massey(self, a: Form, b: Form, c: Form, bidegree: Optional[Bidegree] = None) -> MasseyResult:
        return massey_triple(a, b, c, self.inst, bidegree=bidegree)

    def wedge_probe(self, flavor: Flavor = Flavor.BC) -> WedgeProbeReport:
        return wedge_closure_probe(flavor, self.table, self.inst)

    def digest(self) -> str:
        """First 16 hex digits of SHA-256 over spec text, assignments and check lines"""
        h = hashlib.sha256()
        h.update(format_spec(self.inst.spec).encode())
        for name, value in sorted(self.inst.assignments.items()):
            h.update(f"{name}={format_scalar(value)}\n".encode())
        for line in self.validation_report().lines():
            h.update(f"{line}\n".encode())
        return h.hexdigest()[:16]
