"""
Complex-symplectic cohomologies
Dolbeault, dbar-Lambda, Bott-Chern and Aeppli groups as exact quotients, their
harmonic spaces as Laplacian kernels, the total D-cohomology, and the table that
ties them together with its invariant checks.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Optional, Tuple

from .errors import ConsistencyError
from .exterior import Bidegree, Form, all_bidegrees, basis_dim, from_vector
from .linalg import ExactMatrix, Subspace, image, kernel, quotient_basis, subspace_intersect, subspace_sum
from .model import CheckStatus, ComplexInstance, OperatorFamily, ValidationReport
from .operators import HodgeData, Sl2Data
from .scalars import ZERO

logger = logging.getLogger(__name__)


class Flavor(Enum):
    DOLBEAULT = "dolbeault"
    DBAR_LAMBDA = "dbar-lambda"
    BC = "bc"
    AEPPLI = "aeppli"

    @property
    def label(self) -> str:
        return {
            Flavor.DOLBEAULT: "Dolbeault",
            Flavor.DBAR_LAMBDA: "dbar-Lambda",
            Flavor.BC: "Bott-Chern",
            Flavor.AEPPLI: "Aeppli",
        }[self]

    @classmethod
    def parse(cls, text: str) -> List["Flavor"]:
        """A flavor name, or `all`; an empty filter means all"""
        if text in ("all", ""):
            return list(cls)
        for flavor in cls:
            if flavor.value == text:
                return [flavor]
        choices = ", ".join(f.value for f in cls)
        raise ValueError(f"unknown flavor {text!r}; choose one of {choices} or all")


ALL_FLAVORS = tuple(Flavor)


def kernel_at(family: OperatorFamily, bd: Bidegree) -> Subspace:
    """Kernel of the family on A^{bd}; everything when the target is outside the grid"""
    block = family.blocks.get(bd)
    if block is None:
        return Subspace.full(basis_dim(family.n, bd))
    return kernel(block)


def image_in(family: OperatorFamily, bd: Bidegree) -> Subspace:
    """Image of the family inside A^{bd}"""
    source = bd.shifted((-family.shift[0], -family.shift[1]))
    block = family.blocks.get(source) if source.is_valid(family.n) else None
    if block is None:
        return Subspace.zero(basis_dim(family.n, bd))
    return image(block)


@dataclass(frozen=True)
class Complexes:
    """The differentials the four flavors are built from"""

    dbar: OperatorFamily
    dbar_lambda: OperatorFamily
    dd_lambda: OperatorFamily

    @classmethod
    def of(cls, inst: ComplexInstance, s: Sl2Data) -> "Complexes":
        return cls(inst.dbar, s.dbar_lambda, inst.dbar @ s.dbar_lambda)


def quotient_spaces(flavor: Flavor, c: Complexes, bd: Bidegree) -> Tuple[Subspace, Subspace]:
    """Numerator and denominator of the flavor at bd"""
    if flavor is Flavor.DOLBEAULT:
        return kernel_at(c.dbar, bd), image_in(c.dbar, bd)
    if flavor is Flavor.DBAR_LAMBDA:
        return kernel_at(c.dbar_lambda, bd), image_in(c.dbar_lambda, bd)
    if flavor is Flavor.BC:
        return subspace_intersect(kernel_at(c.dbar, bd), kernel_at(c.dbar_lambda, bd)), image_in(c.dd_lambda, bd)
    return kernel_at(c.dd_lambda, bd), subspace_sum(image_in(c.dbar, bd), image_in(c.dbar_lambda, bd))


def harmonic_characterization(flavor: Flavor, c: Complexes, hodge: HodgeData, bd: Bidegree) -> Subspace:
    """Intersection of kernels equivalent to harmonicity"""
    if flavor is Flavor.DOLBEAULT:
        spaces = [kernel_at(c.dbar, bd), kernel_at(hodge.dbar_star, bd)]
    elif flavor is Flavor.DBAR_LAMBDA:
        spaces = [kernel_at(c.dbar_lambda, bd), kernel_at(hodge.dbar_lambda_star, bd)]
    elif flavor is Flavor.BC:
        spaces = [kernel_at(c.dbar, bd), kernel_at(c.dbar_lambda, bd), kernel_at(hodge.dd_lambda_star, bd)]
    else:
        spaces = [kernel_at(c.dd_lambda, bd), kernel_at(hodge.dbar_star, bd), kernel_at(hodge.dbar_lambda_star, bd)]
    result = spaces[0]
    for space in spaces[1:]:
        result = subspace_intersect(result, space)
    return result


def laplacian(flavor: Flavor, hodge: HodgeData) -> OperatorFamily:
    return {
        Flavor.DOLBEAULT: hodge.box_dbar,
        Flavor.DBAR_LAMBDA: hodge.box_dbar_lambda,
        Flavor.BC: hodge.delta_bc,
        Flavor.AEPPLI: hodge.delta_a,
    }[flavor]


def harmonic_space(
    flavor: Flavor,
    inst: ComplexInstance,
    s: Sl2Data,
    hodge: HodgeData,
    bd: Bidegree,
    complexes: Optional[Complexes] = None,
) -> Subspace:
    """Laplacian kernel at bd, checked against the kernel characterization"""
    from_laplacian = kernel(laplacian(flavor, hodge).blocks[bd])
    characterized = harmonic_characterization(flavor, complexes or Complexes.of(inst, s), hodge, bd)
    if from_laplacian.basis != characterized.basis:
        raise ConsistencyError(
            f"{flavor.value} harmonic space at {bd}: Laplacian kernel has dim {from_laplacian.dim}, "
            f"kernel characterization has dim {characterized.dim}",
            dump={"flavor": flavor.value, "bidegree": str(bd)},
        )
    return from_laplacian



@dataclass(frozen=True)
class Cell:
    """One flavor at one bidegree: quotient dimension, representatives and harmonic space"""

    flavor: Flavor
    bidegree: Bidegree
    dim: int
    representatives: Tuple[Form, ...]
    harmonic: Subspace
    n: int

    @property
    def harmonic_basis(self) -> List[Form]:
        return [from_vector(v, self.n, self.bidegree) for v in self.harmonic.vectors()]

    @property
    def harmonic_dim(self) -> int:
        return self.harmonic.dim


def _representatives(flavor: Flavor, inst: ComplexInstance, complexes: Complexes, bd: Bidegree) -> Tuple[Form, ...]:
    numerator, denominator = quotient_spaces(flavor, complexes, bd)
    try:
        vectors = quotient_basis(numerator, denominator)
    except ValueError:
        raise ConsistencyError(
            f"{flavor.value} at {bd}: denominator is not contained in numerator",
            dump={"flavor": flavor.value, "bidegree": str(bd)},
        )
    return tuple(from_vector(v, inst.n, bd) for v in vectors)


def compute_cell(
    flavor: Flavor,
    inst: ComplexInstance,
    s: Sl2Data,
    hodge: HodgeData,
    bd: Bidegree,
    complexes: Optional[Complexes] = None,
) -> Cell:
    complexes = complexes or Complexes.of(inst, s)
    representatives = _representatives(flavor, inst, complexes, bd)
    harmonic = harmonic_space(flavor, inst, s, hodge, bd, complexes)
    return Cell(flavor, bd, len(representatives), representatives, harmonic, inst.n)


QuotientTable = Dict[Bidegree, Tuple[int, Tuple[Form, ...]]]


def quotient_cohomology(flavor: Flavor, inst: ComplexInstance, s: Sl2Data) -> QuotientTable:
    """(dim, representatives) per bidegree, without harmonic data"""
    complexes = Complexes.of(inst, s)
    result = {}
    for bd in all_bidegrees(inst.n):
        reps = _representatives(flavor, inst, complexes, bd)
        result[bd] = (len(reps), reps)
    return result


def dolbeault(inst: ComplexInstance) -> QuotientTable:
    """Dolbeault groups; needs no sl(2) data"""
    result = {}
    for bd in all_bidegrees(inst.n):
        vectors = quotient_basis(kernel_at(inst.dbar, bd), image_in(inst.dbar, bd))
        result[bd] = (len(vectors), tuple(from_vector(v, inst.n, bd) for v in vectors))
    return result


def dbar_lambda_cohomology(inst: ComplexInstance, s: Sl2Data) -> QuotientTable:
    return quotient_cohomology(Flavor.DBAR_LAMBDA, inst, s)


def bott_chern(inst: ComplexInstance, s: Sl2Data) -> QuotientTable:
    return quotient_cohomology(Flavor.BC, inst, s)


def aeppli(inst: ComplexInstance, s: Sl2Data) -> QuotientTable:
    return quotient_cohomology(Flavor.AEPPLI, inst, s)


def d_cohomology(inst: ComplexInstance, s: Sl2Data) -> Dict[int, int]:
    """dim H_D^k for k = -n..n

    D = dbar + dbar_lambda maps T^k, the sum of A^{p,q} over q - p = k taken
    with p ascending, into T^{k+1}.
    """
    n = inst.n

    def summands(k: int) -> List[Bidegree]:
        return [Bidegree(p, p + k) for p in range(n + 1) if 0 <= p + k <= n]

    def offsets(k: int) -> Dict[Bidegree, int]:
        result, position = {}, 0
        for bd in summands(k):
            result[bd] = position
            position += basis_dim(n, bd)
        return result

    def total_dim(k: int) -> int:
        return sum(basis_dim(n, bd) for bd in summands(k))

    def d_matrix(k: int) -> ExactMatrix:
        target = offsets(k + 1)
        rows = total_dim(k + 1)
        columns = []
        for bd in summands(k):
            for j in range(basis_dim(n, bd)):
                column = [ZERO] * rows
                for family in (inst.dbar, s.dbar_lambda):
                    block = family.blocks.get(bd)
                    if block is None:
                        continue
                    start = target[family.target(bd)]
                    for i, value in enumerate(block.column(j)):
                        column[start + i] = column[start + i] + value
                columns.append(column)
        return ExactMatrix.from_columns(columns, rows)

    dims = {}
    for k in range(-n, n + 1):
        closed = kernel(d_matrix(k)).dim if k < n else total_dim(k)
        exact = image(d_matrix(k - 1)).dim if k > -n else 0
        dims[k] = closed - exact
    return dims


@dataclass
class CohomologyTable:
    """Every flavor at every bidegree, plus the D-cohomology and the checks that tie them"""

    n: int
    cells: Dict[Tuple[Flavor, Bidegree], Cell]
    d_dims: Dict[int, int]
    checks: ValidationReport

    def cell(self, flavor: Flavor, bd: Bidegree) -> Cell:
        return self.cells[(flavor, bd)]

    def dim(self, flavor: Flavor, bd: Bidegree) -> int:
        return self.cells[(flavor, bd)].dim

    def dims(self, flavor: Flavor) -> List[int]:
        """Dimensions in bidegree order (0,0), (1,0), (0,1), (2,0), ..."""
        return [self.dim(flavor, bd) for bd in all_bidegrees(self.n)]

    def total_dim(self, flavor: Flavor, k: int) -> int:
        return sum(self.dim(flavor, bd) for bd in all_bidegrees(self.n) if bd.total == k)

    def total_representatives(self, flavor: Flavor, k: int) -> List[Form]:
        return [u for bd in all_bidegrees(self.n) if bd.total == k for u in self.cell(flavor, bd).representatives]

    def slack(self, bd: Bidegree) -> int:
        """(h_BC + h_A) - (h_dbar + h_dbar_lambda)"""
        return (
            self.dim(Flavor.BC, bd)
            + self.dim(Flavor.AEPPLI, bd)
            - self.dim(Flavor.DOLBEAULT, bd)
            - self.dim(Flavor.DBAR_LAMBDA, bd)
        )


def _fail(checks: ValidationReport, name: str, detail: str):
    checks.add(name, CheckStatus.FAILED, detail)
    raise ConsistencyError(f"{name} fails: {detail}", dump={"check": name, "detail": detail})


def compute_table(
    inst: ComplexInstance,
    s: Sl2Data,
    hodge: HodgeData,
    flavors: Iterable[Flavor] = ALL_FLAVORS,
) -> CohomologyTable:
    """All cells plus the structural post-conditions

    The invariant checks need all four flavors and run only when all are asked for.
    """
    n = inst.n
    flavors = list(flavors)
    complexes = Complexes.of(inst, s)
    cells = {}
    for flavor in flavors:
        for bd in all_bidegrees(n):
            logger.debug("computing %s at %s", flavor.value, bd)
            cells[(flavor, bd)] = compute_cell(flavor, inst, s, hodge, bd, complexes)
    d_dims = d_cohomology(inst, s)
    checks = ValidationReport()
    table = CohomologyTable(n, cells, d_dims, checks)

    for (flavor, bd), cell in cells.items():
        if cell.dim != cell.harmonic_dim:
            _fail(checks, "quotient dim = harmonic dim", f"{flavor.value} at {bd}: {cell.dim} vs {cell.harmonic_dim}")
        closing = {
            Flavor.DOLBEAULT: [complexes.dbar],
            Flavor.DBAR_LAMBDA: [complexes.dbar_lambda],
            Flavor.BC: [complexes.dbar, complexes.dbar_lambda],
            Flavor.AEPPLI: [complexes.dd_lambda],
        }[flavor]
        for u in cell.representatives:
            if any(family.apply(u) for family in closing):
                _fail(checks, "representatives closed", f"{flavor.value} representative {inst.format(u)} at {bd}")
    checks.add("quotient dim = harmonic dim", CheckStatus.PASSED)
    checks.add("representatives closed", CheckStatus.PASSED)

    if set(flavors) != set(ALL_FLAVORS):
        return table

    for bd in all_bidegrees(n):
        if table.slack(bd) < 0:
            _fail(checks, "h_BC + h_A >= h_dbar + h_dbar_lambda", f"slack {table.slack(bd)} at {bd}")
    checks.add("h_BC + h_A >= h_dbar + h_dbar_lambda", CheckStatus.PASSED)

    for k in range(-n, n + 1):
        dolbeault = sum(table.dim(Flavor.DOLBEAULT, bd) for bd in all_bidegrees(n) if bd.q - bd.p == k)
        if dolbeault != d_dims[k]:
            _fail(checks, "dim H_D^k = sum of h_dbar over q-p=k", f"k={k}: {d_dims[k]} vs {dolbeault}")
    checks.add("dim H_D^k = sum of h_dbar over q-p=k", CheckStatus.PASSED)

    if inst.conjugation is not None:
        for bd in all_bidegrees(n):
            mirrored = Bidegree(n - bd.q, n - bd.p)
            if table.dim(Flavor.DBAR_LAMBDA, mirrored) != table.dim(Flavor.DOLBEAULT, bd):
                _fail(checks, "h_dbar_lambda^{n-q,n-p} = h_dbar^{p,q}", f"at {bd}")
        checks.add("h_dbar_lambda^{n-q,n-p} = h_dbar^{p,q}", CheckStatus.PASSED)
    else:
        checks.add("h_dbar_lambda^{n-q,n-p} = h_dbar^{p,q}", CheckStatus.NOT_CHECKED, "no conjugation data")
    return table
