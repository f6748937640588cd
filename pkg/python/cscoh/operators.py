"""
Symplectic operator calculus
L, Lambda and B, the symplectic adjoint of dbar, the symplectic star, metric
adjoints, the four Laplacians and the admissible-metric identities, all as
exact operator families with validated identities.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import factorial, isqrt
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import sympy

from .errors import ConsistencyError, PreconditionError, StarUnavailable
from .exterior import (
    Bidegree,
    Form,
    MonomialIndex,
    Side,
    all_bidegrees,
    contract,
    enumerate_basis,
    from_vector,
    monomial_wedge,
    to_vector,
    wedge,
    wedge_all,
)
from .linalg import ExactMatrix, characteristic_polynomial, determinant, inverse
from .model import CheckStatus, ComplexInstance, OperatorFamily, ValidationReport
from .scalars import ONE, ZERO, GaussianRational, I

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Sl2Data:
    L: OperatorFamily
    Lambda: OperatorFamily
    B: OperatorFamily
    dbar_lambda: OperatorFamily


def build_L(inst: ComplexInstance) -> OperatorFamily:
    omega = inst.omega
    return OperatorFamily.from_map(inst.n, (1, 1), lambda u: wedge(omega, u))


def build_Lambda(inst: ComplexInstance) -> OperatorFamily:
    """Lambda = i * sum_jk (Omega^-1)_kj contract(holo, j) contract(anti, k)

    With this normalization Lambda(omega) = n and B acts as k - n on total degree k.
    """
    if inst.omega_inverse is None:
        raise PreconditionError("Lambda needs a nondegenerate omega")
    n = inst.n
    terms = []
    for j in range(n):
        for k in range(n):
            entry = inst.omega_inverse[k, j]
            if entry:
                terms.append((j, k, I * entry))

    def apply(u: Form) -> Form:
        result = Form.zero(n)
        for j, k, factor in terms:
            result = result + contract(Side.HOLO, j, contract(Side.ANTI, k, u)).scale(factor)
        return result

    return OperatorFamily.from_map(n, (-1, -1), apply)


def build_sl2(inst: ComplexInstance) -> Sl2Data:
    L = build_L(inst)
    Lambda = build_Lambda(inst)
    B = (L @ Lambda) - (Lambda @ L)
    dbar_lambda = (inst.dbar @ Lambda) - (Lambda @ inst.dbar)
    return Sl2Data(L=L, Lambda=Lambda, B=B, dbar_lambda=dbar_lambda)


def _expect_equal(
    report: ValidationReport,
    name: str,
    actual: OperatorFamily,
    expected: OperatorFamily,
    inst: ComplexInstance,
    strict: bool,
) -> bool:
    difference = actual.first_difference(expected)
    if difference is None:
        report.add(name, CheckStatus.PASSED)
        return True
    witness = inst.witness(*difference)
    report.add(name, CheckStatus.FAILED, f"witness {witness}")
    if strict:
        raise ConsistencyError(f"{name} fails on {witness}", dump={"identity": name, "witness": witness})
    return False


def b_eigenvalues(s: Sl2Data, n: int) -> Dict[int, Optional[GaussianRational]]:
    """The scalar by which B acts on each total degree; None where B is not scalar"""
    per_degree: Dict[int, Optional[GaussianRational]] = {}
    for bd in all_bidegrees(n):
        block = s.B.blocks[bd]
        value = block[0, 0]
        scalar = value if block == ExactMatrix.identity(block.rows).scale(value) else None
        if bd.total not in per_degree:
            per_degree[bd.total] = scalar
        elif per_degree[bd.total] != scalar:
            per_degree[bd.total] = None
    return per_degree


def validate_sl2(s: Sl2Data, inst: ComplexInstance, strict: bool = True) -> ValidationReport:
    """Exact checks of the sl2 and symplectic-adjoint identities, blockwise"""
    report = ValidationReport()
    n = inst.n

    scalars = b_eigenvalues(s, n)
    broken = [k for k in range(2 * n + 1) if scalars[k] is None]
    steps = [k for k in range(2 * n) if not broken and scalars[k + 1] - scalars[k] != ONE]
    if broken or steps:
        detail = f"not scalar on degree {broken[0]}" if broken else f"step from degree {steps[0]} is not 1"
        report.add("B scalar per degree with unit steps", CheckStatus.FAILED, detail)
        if strict:
            raise ConsistencyError(f"B = [L, Lambda] is {detail}")
    else:
        values = ", ".join(str(scalars[k]) for k in range(2 * n + 1))
        report.add("B scalar per degree with unit steps", CheckStatus.PASSED, values)

    commutator = (s.B @ inst.dbar) - (inst.dbar @ s.B)
    _expect_equal(report, "[[L,Lambda],dbar] = dbar", commutator, inst.dbar, inst, strict)
    zero = OperatorFamily.zero(n, (-2, 0))
    _expect_equal(report, "dbar_lambda^2 = 0", s.dbar_lambda @ s.dbar_lambda, zero, inst, strict)
    anti = (inst.dbar @ s.dbar_lambda) + (s.dbar_lambda @ inst.dbar)
    _expect_equal(report, "dbar dbar_lambda + dbar_lambda dbar = 0", anti, OperatorFamily.zero(n, (-1, 1)), inst, strict)
    return report


def star_target(n: int, bd: Bidegree) -> Bidegree:
    return Bidegree(n - bd.q, n - bd.p)


@dataclass(frozen=True)
class SymplecticStar:
    """*_s as one matrix per source bidegree, mapping A^{p,q} to A^{n-q,n-p}"""

    n: int
    blocks: Mapping[Bidegree, ExactMatrix]

    def apply(self, u: Form) -> Form:
        result = Form.zero(self.n)
        for bd in u.bidegrees:
            image = self.blocks[bd].apply(to_vector(u.component(bd), bd))
            result = result + from_vector(image, self.n, star_target(self.n, bd))
        return result

    def square_defect(self) -> Optional[Tuple[Bidegree, int]]:
        for bd in all_bidegrees(self.n):
            product = self.blocks[star_target(self.n, bd)] @ self.blocks[bd]
            identity = ExactMatrix.identity(product.rows)
            for j in range(product.cols):
                if product.column(j) != identity.column(j):
                    return bd, j
        return None

    def sandwich(self, family: OperatorFamily) -> OperatorFamily:
        """*_s F *_s; a family of shift (a, b) becomes one of shift (-b, -a)"""
        n = self.n
        a, b = family.shift
        blocks = {}
        for bd in all_bidegrees(n):
            final = bd.shifted((-b, -a))
            if not final.is_valid(n):
                continue
            first = star_target(n, bd)
            middle = first.shifted(family.shift)
            if middle.is_valid(n):
                blocks[bd] = self.blocks[middle] @ family.blocks[first] @ self.blocks[bd]
            else:
                blocks[bd] = ExactMatrix.zeros(len(enumerate_basis(n, final)), len(enumerate_basis(n, bd)))
        return OperatorFamily(n, (-b, -a), blocks)


def _pairing_matrix(inst: ComplexInstance) -> ExactMatrix:
    """Inverse of the antisymmetric matrix of omega on the 2n generators, canonical order"""
    n = inst.n
    rows = [[ZERO] * (2 * n) for _ in range(2 * n)]
    for j in range(n):
        for k in range(n):
            entry = I * inst.omega_matrix[j, k]
            rows[j][n + k] = entry
            rows[n + k][j] = -entry
    return inverse(ExactMatrix.from_rows(rows, cols=2 * n))


def _positions(n: int, m: MonomialIndex) -> List[int]:
    return [j if side is Side.HOLO else n + j for side, j in m.generators(n)]


def build_symplectic_star(inst: ComplexInstance) -> SymplecticStar:
    """Solve alpha ^ *beta = det[pi(a_i, b_j)] omega^n/n! against every alpha of the dual bidegree"""
    if inst.conjugation is None:
        raise StarUnavailable(inst.spec.name)
    n = inst.n
    pi = _pairing_matrix(inst)
    volume = wedge_all([inst.omega] * n, n).scale(GaussianRational(Fraction(1, factorial(n))))
    top = MonomialIndex((1 << n) - 1, (1 << n) - 1)
    v = volume.coefficient(top)

    blocks = {}
    for bd in all_bidegrees(n):
        target = star_target(n, bd)
        duals = enumerate_basis(n, Bidegree(bd.q, bd.p))
        candidates = enumerate_basis(n, target)
        pairing_rows = []
        for alpha in duals:
            row = []
            for m in candidates:
                sign, product = monomial_wedge(n, alpha, m)
                row.append(GaussianRational(sign) if product == top else ZERO)
            pairing_rows.append(row)
        solver = inverse(ExactMatrix.from_rows(pairing_rows, cols=len(candidates)))
        columns = []
        for beta in enumerate_basis(n, bd):
            b_pos = _positions(n, beta)
            rhs = []
            for alpha in duals:
                a_pos = _positions(n, alpha)
                gram = ExactMatrix.from_rows([[pi[a, b] for b in b_pos] for a in a_pos], cols=len(b_pos))
                rhs.append(v * determinant(gram))
            columns.append(solver.apply(rhs))
        blocks[bd] = ExactMatrix.from_columns(columns, len(candidates))
    return SymplecticStar(n, blocks)


def validate_star(star: SymplecticStar, inst: ComplexInstance, s: Sl2Data, strict: bool = True) -> ValidationReport:
    report = ValidationReport()
    n = inst.n

    defect = star.square_defect()
    if defect is None:
        report.add("*_s^2 = id", CheckStatus.PASSED)
    else:
        witness = inst.witness(*defect)
        report.add("*_s^2 = id", CheckStatus.FAILED, f"witness {witness}")
        if strict:
            raise ConsistencyError(f"*_s^2 = id fails on {witness}")

    volume = wedge_all([inst.omega] * n, n).scale(GaussianRational(Fraction(1, factorial(n))))
    unit = star.apply(Form.constant(n))
    if unit == volume:
        report.add("*_s(1) = omega^n/n!", CheckStatus.PASSED)
    else:
        report.add("*_s(1) = omega^n/n!", CheckStatus.FAILED, f"got {inst.format(unit)}")
        if strict:
            raise ConsistencyError(f"*_s(1) = {inst.format(unit)}, expected {inst.format(volume)}")

    _expect_equal(report, "Lambda = *_s L *_s", star.sandwich(s.L), s.Lambda, inst, strict)
    star_route = star.sandwich(inst.dbar).signed_by_degree(lambda k: 1 if k % 2 else -1)
    _expect_equal(report, "[dbar,Lambda] = (-1)^(k+1) *_s dbar *_s", star_route, s.dbar_lambda, inst, strict)

    conjugation = inst.conjugation
    for bd in all_bidegrees(n):
        for j, m in enumerate(enumerate_basis(n, bd)):
            u = Form.monomial(n, m)
            if conjugation.conjugate(star.apply(u)) != star.apply(conjugation.conjugate(u)):
                witness = inst.witness(bd, j)
                report.add("*_s real", CheckStatus.FAILED, f"witness {witness}")
                if strict:
                    raise ConsistencyError(f"*_s real fails on {witness}")
                return report
    report.add("*_s real", CheckStatus.PASSED)
    return report


class Admissibility(Enum):
    ADMISSIBLE = "admissible"
    NOT_ADMISSIBLE = "not admissible"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class MetricData:
    weights: Tuple[Fraction, ...]
    gram: Mapping[Bidegree, ExactMatrix]
    status: Admissibility
    eigenvalues: Optional[Tuple[GaussianRational, ...]] = None
    detail: str = ""

    @property
    def admissible(self) -> bool:
        return self.status is Admissibility.ADMISSIBLE


def monomial_norm(weights: Sequence[Fraction], n: int, m: MonomialIndex) -> Fraction:
    norm = Fraction(1)
    for _, j in m.generators(n):
        norm *= weights[j]
    return norm


def _to_sympy(value: GaussianRational):
    return sympy.Rational(value.re.numerator, value.re.denominator) + sympy.I * sympy.Rational(
        value.im.numerator, value.im.denominator
    )


def _from_sympy(value) -> Optional[GaussianRational]:
    real, imaginary = sympy.re(value), sympy.im(value)
    if not (real.is_rational and imaginary.is_rational):
        return None
    return GaussianRational(Fraction(int(real.p), int(real.q)), Fraction(int(imaginary.p), int(imaginary.q)))


def eigenvalues(m: ExactMatrix) -> Optional[Tuple[GaussianRational, ...]]:
    """Eigenvalues with multiplicity when all lie in Q(i), sorted by (re, im)"""
    x = sympy.Symbol("x")
    poly = sympy.Poly([_to_sympy(c) for c in characteristic_polynomial(m)], x)
    found = []
    for root, multiplicity in sympy.roots(poly).items():
        exact = _from_sympy(sympy.expand(root))
        if exact is None:
            return None
        found.extend([exact] * multiplicity)
    if len(found) != m.rows:
        return None
    return tuple(sorted(found, key=lambda z: (z.re, z.im)))


def _weighted_omega(inst: ComplexInstance, weights: Sequence[Fraction]) -> ExactMatrix:
    n = inst.n
    diagonal = ExactMatrix.from_rows(
        [[GaussianRational(weights[j]) if j == k else ZERO for k in range(n)] for j in range(n)], cols=n
    )
    return diagonal @ inst.omega_matrix


def _standard_conjugation(inst: ComplexInstance) -> bool:
    return inst.conjugation is not None and inst.conjugation.is_identity


def build_metric(inst: ComplexInstance, weights: Optional[Sequence[Fraction]] = None) -> MetricData:
    """Diagonal Hermitian metric and its admissibility certificate

    Admissibility is decided only when conjugation pairs eta_j with xi_j; there
    it holds iff (W Omega)^2 = I, W the diagonal of weights.
    """
    n = inst.n
    weights = tuple(Fraction(w) for w in (weights or inst.spec.metric_weights))
    if len(weights) != n or any(w <= 0 for w in weights):
        raise PreconditionError(f"metric needs {n} positive weights")
    gram = {}
    for bd in all_bidegrees(n):
        entries = [GaussianRational(monomial_norm(weights, n, m)) for m in enumerate_basis(n, bd)]
        size = len(entries)
        gram[bd] = ExactMatrix.from_rows([[entries[i] if i == j else ZERO for j in range(size)] for i in range(size)], cols=size)

    if not _standard_conjugation(inst):
        logger.warning("admissibility of %s is undecided: conjugation does not pair eta_j with xi_j", inst.spec.name)
        return MetricData(weights, gram, Admissibility.UNDECIDED, detail="no standard conjugation")

    weighted = _weighted_omega(inst, weights)
    values = eigenvalues(weighted)
    if weighted @ weighted == ExactMatrix.identity(n):
        return MetricData(weights, gram, Admissibility.ADMISSIBLE, values, "(W Omega)^2 = I")
    if values is None:
        logger.warning("admissibility of %s is undecided in exact arithmetic", inst.spec.name)
        return MetricData(weights, gram, Admissibility.UNDECIDED, None, "eigenvalues outside Q(i)")
    listed = ", ".join(str(v) for v in values)
    return MetricData(weights, gram, Admissibility.NOT_ADMISSIBLE, values, f"eigenvalues {listed}")


def _rational_sqrt(value: Fraction) -> Optional[Fraction]:
    if value < 0:
        return None
    num, den = isqrt(value.numerator), isqrt(value.denominator)
    if num * num != value.numerator or den * den != value.denominator:
        return None
    return Fraction(num, den)


def canonical_weights(inst: ComplexInstance) -> Optional[Tuple[Fraction, ...]]:
    """Weights making the metric admissible, when Omega pairs generators one to one

    Needs standard conjugation and a Hermitian Omega with one nonzero entry per
    row whose modulus is rational; w_j = 1/|Omega_jk| for the partner k of j.
    """
    if not _standard_conjugation(inst):
        return None
    n = inst.n
    omega = inst.omega_matrix
    weights: List[Optional[Fraction]] = [None] * n
    for j in range(n):
        nonzero = [(k, omega[j, k]) for k in range(n) if omega[j, k]]
        if len(nonzero) != 1:
            return None
        k, entry = nonzero[0]
        if omega[k, j] != entry.conjugate():
            return None
        modulus = _rational_sqrt(entry.norm())
        if modulus is None:
            return None
        weights[j] = 1 / modulus
    return tuple(weights)


def adjoint(op: OperatorFamily, m: MetricData) -> OperatorFamily:
    """A* = G_src^-1 A^H G_tgt blockwise"""
    shift = (-op.shift[0], -op.shift[1])
    blocks = {}
    for bd, block in op.blocks.items():
        target = op.target(bd)
        source_inverse = ExactMatrix.from_rows(
            [[(ONE / m.gram[bd][i, i]) if i == j else ZERO for j in range(block.cols)] for i in range(block.cols)],
            cols=block.cols,
        )
        blocks[target] = source_inverse @ block.conjugate_transpose() @ m.gram[target]
    return OperatorFamily(op.n, shift, blocks)


@dataclass(frozen=True)
class HodgeData:
    """Metric adjoints and the four Laplacians"""

    metric: MetricData
    dbar_star: OperatorFamily
    dbar_lambda_star: OperatorFamily
    dd_lambda_star: OperatorFamily
    box_dbar: OperatorFamily
    box_dbar_lambda: OperatorFamily
    delta_bc: OperatorFamily
    delta_a: OperatorFamily


def build_laplacians(inst: ComplexInstance, s: Sl2Data, m: MetricData) -> HodgeData:
    d = inst.dbar
    dl = s.dbar_lambda
    ds = adjoint(d, m)
    dls = adjoint(dl, m)
    box_dbar = d @ ds + ds @ d
    box_dbar_lambda = dl @ dls + dls @ dl
    delta_bc = (
        d @ dl @ dls @ ds
        + dls @ ds @ d @ dl
        + dls @ d @ ds @ dl
        + ds @ dl @ dls @ d
        + dls @ dl
        + ds @ d
    )
    delta_a = (
        d @ ds
        + dl @ dls
        + ds @ dls @ dl @ d
        + dl @ ds @ d @ dls
        + dl @ d @ ds @ dls
        + d @ dls @ dl @ ds
    )
    return HodgeData(m, ds, dls, adjoint(d @ dl, m), box_dbar, box_dbar_lambda, delta_bc, delta_a)


def minkowski_identity_check(
    inst: ComplexInstance,
    s: Sl2Data,
    hodge: HodgeData,
    star: Optional[SymplecticStar] = None,
    force: bool = False,
) -> ValidationReport:
    """Kaehler identities of Minkowski type; failures are reported, not raised

    Without force the metric must be certified admissible.
    """
    if not hodge.metric.admissible and not force:
        raise PreconditionError(f"metric on {inst.spec.name} is {hodge.metric.status.value}; Minkowski identities need an admissible one")
    report = ValidationReport()
    ds, dls = hodge.dbar_star, hodge.dbar_lambda_star
    _expect_equal(report, "Lambda* = L", adjoint(s.Lambda, hodge.metric), s.L, inst, strict=False)
    _expect_equal(report, "dbar_lambda* = [L, dbar*]", dls, s.L @ ds - ds @ s.L, inst, strict=False)
    _expect_equal(report, "[dbar_lambda*, L] = 0", dls @ s.L - s.L @ dls, OperatorFamily.zero(inst.n, (2, 1)), inst, strict=False)
    if star is not None:
        _expect_equal(report, "box_dbar_lambda = *_s box_dbar *_s", star.sandwich(hodge.box_dbar), hodge.box_dbar_lambda, inst, strict=False)
    else:
        report.add("box_dbar_lambda = *_s box_dbar *_s", CheckStatus.SKIPPED, "star unavailable")
    return report
