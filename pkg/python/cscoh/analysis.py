"""
Cohomological analyses
Hard Lefschetz checks, the three-route dbar dbar_lambda-Lemma verdict,
Dolbeault-Massey triple products, wedge-closure probes of harmonic spaces and
deformation scans over sampled parameter values.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .cohomology import CohomologyTable, Complexes, Flavor, image_in, kernel_at, quotient_spaces
from .errors import ConsistencyError, CscohError, PreconditionError
from .exterior import Bidegree, Form, all_bidegrees, basis_dim, from_vector, to_vector, wedge
from .linalg import ExactMatrix, Subspace, kernel, solve, span, subspace_intersect, subspace_sum
from .model import ComplexInstance, ManifoldSpec, OperatorFamily, instantiate
from .operators import Sl2Data
from .scalars import ZERO, GaussianRational, format_scalar

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LefschetzStep:
    """[omega^k]: H^{n-k} -> H^{n+k}"""

    k: int
    well_defined: bool
    rank: int
    source_dim: int
    target_dim: int
    witness: Optional[str] = None

    @property
    def iso(self) -> bool:
        return self.well_defined and self.rank == self.source_dim == self.target_dim


@dataclass(frozen=True)
class HlcReport:
    flavor: Flavor
    steps: Tuple[LefschetzStep, ...]

    @property
    def overall(self) -> bool:
        return all(step.iso for step in self.steps)

    @property
    def failing(self) -> List[int]:
        return [step.k for step in self.steps if not step.iso]


def lefschetz_power(s: Sl2Data, k: int) -> OperatorFamily:
    power = OperatorFamily.identity(s.L.n)
    for _ in range(k):
        power = s.L @ power
    return power


def _dies(
    matrix: ExactMatrix,
    representatives: Sequence[Sequence[GaussianRational]],
    target_denominator: Subspace,
) -> Optional[List[GaussianRational]]:
    """A combination of representatives whose image falls in the target denominator"""
    images = [matrix.apply(r) for r in representatives]
    columns = images + target_denominator.vectors()
    if not columns:
        return None
    relations = kernel(ExactMatrix.from_columns(columns, matrix.rows))
    for relation in relations.vectors():
        weights = relation[:len(representatives)]
        if any(weights):
            size = len(representatives[0])
            combination = [sum((w * r[i] for w, r in zip(weights, representatives)), ZERO) for i in range(size)]
            return combination
    return None


def hlc_check(
    flavor: Flavor,
    table: CohomologyTable,
    inst: ComplexInstance,
    s: Sl2Data,
    complexes: Optional[Complexes] = None,
) -> HlcReport:
    """Hard Lefschetz on the total-degree spaces of one flavor

    L descends to the dbar, BC and Aeppli quotients; a failure there is an
    engine bug. For dbar-Lambda it need not, and is reported per step.
    """
    n = inst.n
    complexes = complexes or Complexes.of(inst, s)
    steps = []
    for k in range(n + 1):
        power = lefschetz_power(s, k)
        well_defined = True
        rank = 0
        witness = None
        for bd in all_bidegrees(n):
            if bd.total != n - k:
                continue
            target = bd.shifted((k, k))
            matrix = power.blocks[bd]
            source_num, source_den = quotient_spaces(flavor, complexes, bd)
            target_num, target_den = quotient_spaces(flavor, complexes, target)
            preserved = all(target_num.contains(matrix.apply(v)) for v in source_num.vectors()) and all(
                target_den.contains(matrix.apply(v)) for v in source_den.vectors()
            )
            if not preserved:
                if flavor is not Flavor.DBAR_LAMBDA:
                    raise ConsistencyError(
                        f"L^{k} does not descend to {flavor.value} cohomology at {bd}",
                        dump={"flavor": flavor.value, "k": k, "bidegree": str(bd)},
                    )
                well_defined = False
                witness = witness or f"L^{k} does not preserve the {flavor.value} quotient at {bd}"
                continue
            representatives = [to_vector(u, bd) for u in table.cell(flavor, bd).representatives]
            if representatives:
                images = span((matrix.apply(r) for r in representatives), target_den.ambient_dim)
                rank += subspace_sum(images, target_den).dim - target_den.dim
                dead = _dies(matrix, representatives, target_den)
                if dead is not None and witness is None:
                    form = inst.format(from_vector(dead, n, bd))
                    witness = f"omega^{k} ^ ({form}) is exact in {flavor.value} at {target}"
        source_dim = table.total_dim(flavor, n - k)
        target_dim = table.total_dim(flavor, n + k)
        if witness is None and source_dim != target_dim:
            witness = f"dim H^{n - k} = {source_dim} but dim H^{n + k} = {target_dim}"
        steps.append(LefschetzStep(k, well_defined, rank, source_dim, target_dim, witness))
    return HlcReport(flavor, tuple(steps))


@dataclass(frozen=True)
class LemmaVerdict:
    hlc_route: bool
    dimension_route: bool
    direct_route: bool
    slack: Dict[Bidegree, int]
    hlc_failures: Tuple[int, ...]
    direct_witness: Optional[str]
    anti_diagonal: Dict[int, Tuple[int, int]] = field(default_factory=dict)

    @property
    def agree(self) -> bool:
        return self.hlc_route == self.dimension_route == self.direct_route

    @property
    def holds(self) -> bool:
        return self.hlc_route

    def summary(self) -> str:
        if self.holds:
            return "lemma: HOLDS (hlc route: pass; dimension route: zero slack; direct route: pass)"
        strict = ", ".join(str(bd) for bd, value in self.slack.items() if value > 0)
        failing = ", ".join(str(k) for k in self.hlc_failures)
        return f"lemma: FAILS (hlc route: fail at k={failing}; dimension route: strict slack at {strict})"


def _direct_route(inst: ComplexInstance, complexes: Complexes) -> Optional[str]:
    """First form that is dbar- and dbar_lambda-closed, dbar- or dbar_lambda-exact, but not dbar dbar_lambda-exact"""
    for bd in all_bidegrees(inst.n):
        closed = subspace_intersect(kernel_at(complexes.dbar, bd), kernel_at(complexes.dbar_lambda, bd))
        target = image_in(complexes.dd_lambda, bd)
        for family in (complexes.dbar, complexes.dbar_lambda):
            for v in subspace_intersect(closed, image_in(family, bd)).vectors():
                if not target.contains(v):
                    return f"{inst.format(from_vector(v, inst.n, bd))} in A^{bd}"
    return None


def lemma_verdict(
    inst: ComplexInstance,
    s: Sl2Data,
    table: CohomologyTable,
    hlc: Optional[HlcReport] = None,
) -> LemmaVerdict:
    """Three independent criteria for the lemma; disagreement is an engine bug"""
    complexes = Complexes.of(inst, s)
    hlc = hlc or hlc_check(Flavor.DOLBEAULT, table, inst, s, complexes)
    slack = {bd: table.slack(bd) for bd in all_bidegrees(inst.n)}
    witness = _direct_route(inst, complexes)
    n = inst.n
    anti_diagonal = {}
    for k in range(-n, n + 1):
        total = sum(
            table.dim(Flavor.BC, bd) + table.dim(Flavor.AEPPLI, bd) for bd in all_bidegrees(n) if bd.q - bd.p == k
        )
        anti_diagonal[k] = (total, 2 * table.d_dims[k])
    verdict = LemmaVerdict(
        hlc_route=hlc.overall,
        dimension_route=all(value == 0 for value in slack.values()),
        direct_route=witness is None,
        slack=slack,
        hlc_failures=tuple(hlc.failing),
        direct_witness=witness,
        anti_diagonal=anti_diagonal,
    )
    if not verdict.agree:
        raise ConsistencyError(
            "lemma routes disagree",
            dump={
                "hlc_route": verdict.hlc_route,
                "dimension_route": verdict.dimension_route,
                "direct_route": verdict.direct_route,
                "slack": {str(bd): value for bd, value in slack.items()},
            },
        )
    return verdict


@dataclass(frozen=True)
class MasseyResult:
    a: Form
    b: Form
    c: Form
    f: Form
    g: Form
    representative: Form
    bidegree: Optional[Bidegree]
    indeterminacy_dim: int
    vanishes: bool


def _homogeneous(u: Form, label: str) -> Bidegree:
    bd = u.bidegree
    if bd is None:
        raise PreconditionError(f"class {label} is not homogeneous")
    return bd


def dbar_primitive(inst: ComplexInstance, u: Form, bd: Bidegree) -> Optional[Form]:
    """f with dbar f = u, u of bidegree bd; free variables set to zero"""
    source = Bidegree(bd.p, bd.q - 1)
    if not u:
        return Form.zero(inst.n)
    if not bd.is_valid(inst.n) or not source.is_valid(inst.n):
        return None
    solution = solve(inst.dbar.blocks[source], to_vector(u, bd))
    return None if solution is None else from_vector(solution, inst.n, source)


def _closed_forms(inst: ComplexInstance, bd: Bidegree) -> List[Form]:
    if not bd.is_valid(inst.n):
        return []
    block = inst.dbar.blocks.get(bd)
    space = Subspace.full(basis_dim(inst.n, bd)) if block is None else kernel(block)
    return [from_vector(v, inst.n, bd) for v in space.vectors()]


def massey_triple(
    a: Form,
    b: Form,
    c: Form,
    inst: ComplexInstance,
    f: Optional[Form] = None,
    g: Optional[Form] = None,
    bidegree: Optional[Bidegree] = None,
) -> MasseyResult:
    """Dolbeault-Massey triple product <[a], [b], [c]> and whether it vanishes

    f and g default to the solver's primitives; passing others of the right
    bidegree leaves the vanishing verdict unchanged. A zero class makes the
    product vanish trivially, reported in `bidegree` (None when not given).
    """
    n = inst.n
    for label, form in (("a", a), ("b", b), ("c", c)):
        if inst.dbar.apply(form):
            raise PreconditionError(f"class {label} = {inst.format(form)} is not dbar-closed")
    if not (a and b and c):
        zero = Form.zero(n)
        return MasseyResult(a, b, c, zero, zero, zero, bidegree, 0, True)
    (p, q), (r, s_), (u, v) = [(x.p, x.q) for x in (_homogeneous(a, "a"), _homogeneous(b, "b"), _homogeneous(c, "c"))]

    ab, bc = wedge(a, b), wedge(b, c)
    f = f if f is not None else dbar_primitive(inst, ab, Bidegree(p + r, q + s_))
    if f is None:
        raise PreconditionError(f"[a][b] is nonzero: {inst.format(ab)} is not dbar-exact")
    g = g if g is not None else dbar_primitive(inst, bc, Bidegree(r + u, s_ + v))
    if g is None:
        raise PreconditionError(f"[b][c] is nonzero: {inst.format(bc)} is not dbar-exact")
    if inst.dbar.apply(f) != ab or inst.dbar.apply(g) != bc:
        raise PreconditionError("supplied primitives do not satisfy dbar f = a^b and dbar g = b^c")

    sign = -1 if (p + q + 1) % 2 else 1
    second = wedge(a, g)
    representative = wedge(f, c) + (second if sign > 0 else -second)
    target = Bidegree(p + r + u, q + s_ + v - 1)
    if not target.is_valid(n):
        return MasseyResult(a, b, c, f, g, representative, target, 0, True)

    generators = []
    exact_source = Bidegree(target.p, target.q - 1)
    if exact_source.is_valid(n):
        block = inst.dbar.blocks[exact_source]
        generators.extend(block.column(j) for j in range(block.cols))
    for z in _closed_forms(inst, Bidegree(p + r, q + s_ - 1)):
        generators.append(to_vector(wedge(z, c).component(target), target))
    for z in _closed_forms(inst, Bidegree(r + u, s_ + v - 1)):
        generators.append(to_vector(wedge(a, z).component(target), target))
    indeterminacy = span(generators, basis_dim(n, target))
    vanishes = indeterminacy.contains(to_vector(representative.component(target), target))
    return MasseyResult(a, b, c, f, g, representative, target, indeterminacy.dim, vanishes)


@dataclass(frozen=True)
class WedgeFailure:
    left: Form
    right: Form
    product: Form
    bidegree: Bidegree


@dataclass(frozen=True)
class WedgeProbeReport:
    flavor: Flavor
    pairs_checked: int
    failures: Tuple[WedgeFailure, ...]

    @property
    def closed(self) -> bool:
        return not self.failures


def wedge_closure_probe(flavor: Flavor, table: CohomologyTable, inst: ComplexInstance) -> WedgeProbeReport:
    """Does the wedge of two harmonic basis forms stay harmonic?"""
    n = inst.n
    order = all_bidegrees(n)
    checked = 0
    failures = []
    for i, first in enumerate(order):
        for second in order[i:]:
            product_bd = Bidegree(first.p + second.p, first.q + second.q)
            if not product_bd.is_valid(n):
                continue
            harmonic = table.cell(flavor, product_bd).harmonic
            left_basis = table.cell(flavor, first).harmonic_basis
            right_basis = table.cell(flavor, second).harmonic_basis
            for x, left in enumerate(left_basis):
                for y, right in enumerate(right_basis):
                    if first == second and y < x:
                        continue
                    checked += 1
                    product = wedge(left, right)
                    if product and not harmonic.contains(to_vector(product, product_bd)):
                        failures.append(WedgeFailure(left, right, product, product_bd))
    return WedgeProbeReport(flavor, checked, tuple(failures))


SCAN_TARGETS = ("lemma", "hlc", "massey")


@dataclass(frozen=True)
class ScanRow:
    value: GaussianRational
    status: str
    verdict: Optional[bool]
    detail: str = ""


@dataclass(frozen=True)
class ScanReport:
    parameter: str
    what: str
    rows: Tuple[ScanRow, ...]

    def summary(self) -> str:
        verdicts = [row.verdict for row in self.rows if row.status == "ok"]
        if not verdicts:
            return "no sampled values"
        if all(verdicts):
            return "holds at all sampled values"
        if not any(verdicts):
            return "fails at all sampled values"
        return "mixed"


def deformation_scan(
    spec: ManifoldSpec,
    parameter: str,
    values: Sequence[GaussianRational],
    what: str = "lemma",
    massey_forms: Optional[Tuple[str, str, str]] = None,
    analyse: Optional[Callable[[ComplexInstance], Tuple[bool, str]]] = None,
) -> ScanReport:
    """Run one analysis at each sampled value; failures are recorded and the scan moves on"""
    if what not in SCAN_TARGETS:
        raise ValueError(f"unknown scan target {what!r}; choose one of {', '.join(SCAN_TARGETS)}")
    if parameter not in spec.parameters:
        raise PreconditionError(f"{spec.name} has no parameter {parameter}")
    if what == "massey" and massey_forms is None and analyse is None:
        raise PreconditionError("a massey scan needs the three class forms")
    analyse = analyse or _default_analysis(what, massey_forms)

    rows = []
    for value in values:
        try:
            inst = instantiate(spec, {parameter: value})
            verdict, detail = analyse(inst)
            rows.append(ScanRow(value, "ok", verdict, detail))
        except CscohError as e:
            logger.info("scan of %s at %s=%s failed: %s", spec.name, parameter, format_scalar(value), e)
            rows.append(ScanRow(value, "error", None, str(e)))
    return ScanReport(parameter, what, tuple(rows))


def _default_analysis(what: str, massey_forms: Optional[Tuple[str, str, str]]) -> Callable[[ComplexInstance], Tuple[bool, str]]:
    from .engine import CohomologyEngine
    from .expressions import parse_form

    def analyse(inst: ComplexInstance) -> Tuple[bool, str]:
        engine = CohomologyEngine(inst)
        if what == "lemma":
            verdict = engine.lemma()
            return verdict.holds, verdict.summary()
        if what == "hlc":
            report = engine.hlc(Flavor.DOLBEAULT)
            failing = ", ".join(str(k) for k in report.failing)
            return report.overall, "all k" if report.overall else f"fails at k={failing}"
        a, b, c = (parse_form(text, inst.names, inst.assignments) for text in massey_forms)
        result = engine.massey(a, b, c)
        return result.vanishes, f"representative {inst.format(result.representative)}"

    return analyse
