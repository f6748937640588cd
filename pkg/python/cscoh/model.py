"""
cscoh complex model
Manifold spec documents, their parsing and formatting, operator families over
bidegrees, and validated complex instances.
"""

import logging
import re
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from math import factorial
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from .errors import ConsistencyError, SpecError, ValidationError
from .expressions import Polynomial, lift_form, parse_expression, resolve_form
from .exterior import (
    MAX_GENERATORS,
    Bidegree,
    Form,
    GeneratorNames,
    MonomialIndex,
    Side,
    all_bidegrees,
    enumerate_basis,
    format_form,
    from_vector,
    to_vector,
    wedge,
    wedge_all,
)
from .linalg import ExactMatrix, determinant, inverse
from .scalars import ONE, ZERO, GaussianRational, I, format_scalar, parse_scalar

logger = logging.getLogger(__name__)

SECTIONS = ("manifold", "parameters", "dbar", "del", "omega", "metric", "conjugation")
_NAME = re.compile(r"^[A-Za-z_][A-Za-z_0-9]*$")
_SECTION = re.compile(r"^\[([^\]]*)\]$")

DBAR_SHIFT = (0, 1)
DEL_SHIFT = (1, 0)


class CheckStatus(Enum):
    PASSED = "passed"
    FAILED = "failed"
    NOT_CHECKED = "not checked"
    SKIPPED = "skipped"


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: CheckStatus
    detail: str = ""

    def line(self) -> str:
        text = f"{self.name}: {self.status.value}"
        return f"{text} ({self.detail})" if self.detail else text


@dataclass
class ValidationReport:
    """Ordered list of identity checks"""

    checks: List[CheckResult] = field(default_factory=list)

    def add(self, name: str, status: CheckStatus, detail: str = "") -> CheckResult:
        result = CheckResult(name, status, detail)
        self.checks.append(result)
        return result

    def extend(self, other: "ValidationReport"):
        self.checks.extend(other.checks)

    @property
    def ok(self) -> bool:
        return all(c.status is not CheckStatus.FAILED for c in self.checks)

    def failures(self) -> List[CheckResult]:
        return [c for c in self.checks if c.status is CheckStatus.FAILED]

    def lines(self) -> List[str]:
        return [c.line() for c in self.checks]

    def to_dict(self) -> Dict[str, Dict[str, str]]:
        return {c.name: {"status": c.status.value, "detail": c.detail} for c in self.checks}


@dataclass(frozen=True)
class OperatorFamily:
    """One linear operator on the exterior algebra, as a matrix per source bidegree

    A block exists for every valid source bidegree whose shifted target is
    valid; everything else maps to zero.
    """

    n: int
    shift: Tuple[int, int]
    blocks: Mapping[Bidegree, ExactMatrix]

    @classmethod
    def from_map(cls, n: int, shift: Tuple[int, int], fn: Callable[[Form], Form]) -> "OperatorFamily":
        blocks = {}
        for bd in all_bidegrees(n):
            target = bd.shifted(shift)
            if not target.is_valid(n):
                continue
            columns = [to_vector(fn(Form.monomial(n, m)), target) for m in enumerate_basis(n, bd)]
            blocks[bd] = ExactMatrix.from_columns(columns, len(enumerate_basis(n, target)))
        return cls(n, shift, blocks)

    @classmethod
    def zero(cls, n: int, shift: Tuple[int, int]) -> "OperatorFamily":
        return cls.from_blocks(n, shift, lambda source, target: ExactMatrix.zeros(target, source))

    @classmethod
    def identity(cls, n: int) -> "OperatorFamily":
        return cls.from_blocks(n, (0, 0), lambda source, target: ExactMatrix.identity(source))

    @classmethod
    def from_blocks(cls, n: int, shift: Tuple[int, int], make: Callable[[int, int], ExactMatrix]) -> "OperatorFamily":
        blocks = {}
        for bd in all_bidegrees(n):
            target = bd.shifted(shift)
            if target.is_valid(n):
                blocks[bd] = make(len(enumerate_basis(n, bd)), len(enumerate_basis(n, target)))
        return cls(n, shift, blocks)

    def block(self, bd: Bidegree) -> Optional[ExactMatrix]:
        return self.blocks.get(bd)

    def target(self, bd: Bidegree) -> Bidegree:
        return bd.shifted(self.shift)

    def apply(self, u: Form) -> Form:
        result = Form.zero(self.n)
        for bd in u.bidegrees:
            matrix = self.blocks.get(bd)
            if matrix is None:
                continue
            image = matrix.apply(to_vector(u.component(bd), bd))
            result = result + from_vector(image, self.n, self.target(bd))
        return result

    def compose(self, other: "OperatorFamily") -> "OperatorFamily":
        """self after other"""
        _check_family(self, other)
        shift = (self.shift[0] + other.shift[0], self.shift[1] + other.shift[1])
        blocks = {}
        for bd in all_bidegrees(self.n):
            final = bd.shifted(shift)
            if not final.is_valid(self.n):
                continue
            middle = bd.shifted(other.shift)
            if middle.is_valid(self.n):
                blocks[bd] = self.blocks[middle] @ other.blocks[bd]
            else:
                blocks[bd] = ExactMatrix.zeros(len(enumerate_basis(self.n, final)), len(enumerate_basis(self.n, bd)))
        return OperatorFamily(self.n, shift, blocks)

    __matmul__ = compose

    def _combine(self, other: "OperatorFamily", op) -> "OperatorFamily":
        _check_family(self, other)
        if self.shift != other.shift:
            raise ValueError(f"cannot add operators of shifts {self.shift} and {other.shift}")
        return OperatorFamily(self.n, self.shift, {bd: op(m, other.blocks[bd]) for bd, m in self.blocks.items()})

    def __add__(self, other: "OperatorFamily") -> "OperatorFamily":
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other: "OperatorFamily") -> "OperatorFamily":
        return self._combine(other, lambda a, b: a - b)

    def __neg__(self) -> "OperatorFamily":
        return OperatorFamily(self.n, self.shift, {bd: -m for bd, m in self.blocks.items()})

    def scale(self, factor) -> "OperatorFamily":
        return OperatorFamily(self.n, self.shift, {bd: m.scale(factor) for bd, m in self.blocks.items()})

    def signed_by_degree(self, sign: Callable[[int], int]) -> "OperatorFamily":
        """Multiply the block on total degree k by sign(k)"""
        return OperatorFamily(
            self.n, self.shift, {bd: (m if sign(bd.total) > 0 else -m) for bd, m in self.blocks.items()}
        )

    def is_zero(self) -> bool:
        return all(m.is_zero() for m in self.blocks.values())

    def first_difference(self, other: "OperatorFamily") -> Optional[Tuple[Bidegree, int]]:
        """First source basis vector on which the two families differ"""
        _check_family(self, other)
        if self.shift != other.shift:
            raise ValueError(f"cannot compare operators of shifts {self.shift} and {other.shift}")
        for bd in sorted(self.blocks, key=lambda b: (b.total, b.q)):
            a, b = self.blocks[bd], other.blocks[bd]
            for j in range(a.cols):
                if a.column(j) != b.column(j):
                    return bd, j
        return None


def _check_family(a: OperatorFamily, b: OperatorFamily):
    if a.n != b.n:
        raise ValueError(f"operator families over different n: {a.n} vs {b.n}")


def describe_basis_vector(names: GeneratorNames, bd: Bidegree, index: int) -> str:
    monomial = enumerate_basis(len(names.holo), bd)[index]
    return names.monomial(monomial) or "1"


@dataclass(frozen=True)
class Conjugation:
    """eta_k = scalars[k] * conj(xi_{partners[k]}), 0-based"""

    partners: Tuple[int, ...]
    scalars: Tuple[GaussianRational, ...]

    @property
    def is_identity(self) -> bool:
        return self.partners == tuple(range(len(self.partners))) and all(s == ONE for s in self.scalars)

    def matrix(self) -> ExactMatrix:
        n = len(self.partners)
        rows = [[ZERO] * n for _ in range(n)]
        for k, (j, s) in enumerate(zip(self.partners, self.scalars)):
            rows[k][j] = s
        return ExactMatrix.from_rows(rows, cols=n)

    @classmethod
    def from_matrix(cls, matrix: ExactMatrix) -> Optional["Conjugation"]:
        """None unless the matrix has one unit-modulus entry per row and column"""
        partners, scalars = [], []
        for k in range(matrix.rows):
            nonzero = [(j, v) for j, v in enumerate(matrix.row(k)) if v]
            if len(nonzero) != 1 or nonzero[0][1].norm() != 1:
                return None
            partners.append(nonzero[0][0])
            scalars.append(nonzero[0][1])
        if sorted(partners) != list(range(matrix.rows)):
            return None
        return cls(tuple(partners), tuple(scalars))

    def conjugate(self, u: Form) -> Form:
        """Antilinear involution on forms with scalar coefficients"""
        n = u.n
        images: Dict[Tuple[Side, int], Form] = {}
        for k, (j, s) in enumerate(zip(self.partners, self.scalars)):
            images[(Side.HOLO, j)] = Form.generator(n, Side.ANTI, k, s.conjugate())
            images[(Side.ANTI, k)] = Form.generator(n, Side.HOLO, j, s.conjugate())
        result = Form.zero(n)
        for m, c in u:
            factors = [images[g] for g in m.generators(n)]
            result = result + wedge_all(factors, n).scale(c.conjugate())
        return result


@dataclass(frozen=True)
class ManifoldSpec:
    """A parsed manifold spec; rule and omega coefficients are parameter polynomials"""

    name: str
    n: int
    holo_names: Tuple[str, ...]
    anti_names: Tuple[str, ...]
    dbar_rules: Mapping[str, Form]
    omega: Form
    del_rules: Optional[Mapping[str, Form]] = None
    metric_weights: Tuple[Fraction, ...] = ()
    conjugation: Optional[Conjugation] = None
    parameters: Mapping[str, GaussianRational] = field(default_factory=dict)

    def __post_init__(self):
        if not self.metric_weights:
            object.__setattr__(self, "metric_weights", tuple(Fraction(1) for _ in range(self.n)))

    @property
    def names(self) -> GeneratorNames:
        return GeneratorNames(tuple(self.holo_names), tuple(self.anti_names))

    def generator(self, name: str) -> Tuple[Side, int]:
        if name in self.holo_names:
            return Side.HOLO, self.holo_names.index(name)
        if name in self.anti_names:
            return Side.ANTI, self.anti_names.index(name)
        raise SpecError("unknown generator name", token=name)

    def generator_name(self, side: Side, j: int) -> str:
        return self.names.name(side, j)

    def with_parameter(self, name: str, default: GaussianRational) -> "ManifoldSpec":
        parameters = dict(self.parameters)
        parameters[name] = default
        return replace(self, parameters=parameters)


def _required_bidegree(which: str, side: Side) -> Bidegree:
    if which == "dbar":
        return Bidegree(1, 1) if side is Side.HOLO else Bidegree(0, 2)
    return Bidegree(2, 0) if side is Side.HOLO else Bidegree(1, 1)


def _split_assignment(text: str, line: int) -> Tuple[str, str]:
    if "=" not in text:
        raise SpecError("expected `name = value`", line, text)
    key, value = text.split("=", 1)
    key, value = key.strip(), value.strip()
    if not key:
        raise SpecError("missing name before `=`", line, text)
    if not value:
        raise SpecError("missing value after `=`", line, key)
    return key, value


def _read_sections(text: str) -> Dict[str, List[Tuple[int, str]]]:
    sections: Dict[str, List[Tuple[int, str]]] = {}
    current = None
    for number, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0].strip()
        if not content:
            continue
        header = _SECTION.match(content)
        if header:
            current = header.group(1).strip()
            if current not in SECTIONS:
                raise SpecError("unknown section", number, content)
            if current in sections:
                raise SpecError("duplicate section", number, content)
            sections[current] = []
            continue
        if current is None:
            raise SpecError("content before the first section", number, content)
        sections[current].append((number, content))
    return sections


def _assignments(entries: List[Tuple[int, str]], continued: bool = False) -> List[Tuple[int, str, str]]:
    """name = value lines; with continued, lines opening with +/- extend the previous value"""
    result: List[Tuple[int, str, str]] = []
    for number, content in entries:
        if continued and result and content[0] in "+-":
            line, key, value = result[-1]
            result[-1] = (line, key, f"{value} {content}")
            continue
        key, value = _split_assignment(content, number)
        result.append((number, key, value))
    return result


def _parse_manifold(entries: List[Tuple[int, str]]) -> Tuple[str, int, Tuple[str, ...], Tuple[str, ...]]:
    values: Dict[str, Tuple[int, str]] = {}
    for number, key, value in _assignments(entries):
        if key not in ("name", "n", "generators_10", "generators_01"):
            raise SpecError("unknown [manifold] key", number, key)
        values[key] = (number, value)
    for key in ("name", "n", "generators_10", "generators_01"):
        if key not in values:
            raise SpecError(f"[manifold] is missing `{key}`")
    number, n_text = values["n"]
    if not n_text.isdigit():
        raise SpecError("n must be a positive integer", number, n_text)
    n = int(n_text)
    if not 1 <= n <= MAX_GENERATORS:
        raise SpecError(f"n must lie in 1..{MAX_GENERATORS}", number, n_text)
    names = []
    for key in ("generators_10", "generators_01"):
        number, text = values[key]
        group = tuple(part.strip() for part in text.split(","))
        if len(group) != n:
            raise SpecError(f"{key} needs {n} names, got {len(group)}", number, text)
        for name in group:
            if not _NAME.match(name) or name == "i":
                raise SpecError("invalid generator name", number, name)
        names.append(group)
    holo, anti = names
    seen = set()
    for name in holo + anti:
        if name in seen:
            raise SpecError("duplicate generator name", values["generators_01"][0], name)
        seen.add(name)
    return values["name"][1], n, holo, anti


def _parse_rules(
    which: str,
    entries: List[Tuple[int, str]],
    names: GeneratorNames,
    parameters: Sequence[str],
) -> Dict[str, Form]:
    rules: Dict[str, Form] = {}
    for number, key, value in _assignments(entries, continued=True):
        if key in names.holo:
            side = Side.HOLO
        elif key in names.anti:
            side = Side.ANTI
        else:
            raise SpecError("unknown generator name", number, key)
        if key in rules:
            raise SpecError("duplicate rule", number, key)
        form = parse_expression(value, names, parameters, line=number)
        required = _required_bidegree(which, side)
        if not form.is_homogeneous_of(required):
            found = ", ".join(str(b) for b in form.bidegrees)
            raise SpecError(f"[{which}] value for {key} must have bidegree {required}, found {found}", number, key)
        if form:
            rules[key] = form
    return rules


def _parse_conjugation(entries: List[Tuple[int, str]], names: GeneratorNames) -> Conjugation:
    n = len(names.holo)
    partners: Dict[int, Tuple[int, GaussianRational]] = {}
    for number, key, value in _assignments(entries):
        if key not in names.anti:
            raise SpecError("conjugation must assign (0,1) generators", number, key)
        k = names.anti.index(key)
        if k in partners:
            raise SpecError("duplicate conjugation entry", number, key)
        form = parse_expression(value, names, (), line=number)
        terms = list(form)
        if len(terms) != 1 or terms[0][0].holo.bit_length() == 0 or terms[0][0].anti or terms[0][0].degree != 1:
            raise SpecError("conjugation value must be a unit scalar times one (1,0) generator", number, value)
        monomial, coefficient = terms[0]
        scalar = coefficient.constant_value()
        if scalar.norm() != 1:
            raise SpecError("conjugation scalar must have modulus 1", number, value)
        partners[k] = (monomial.holo.bit_length() - 1, scalar)
    if sorted(partners) != list(range(n)):
        raise SpecError("conjugation must pair every (0,1) generator")
    targets = [partners[k][0] for k in range(n)]
    if sorted(targets) != list(range(n)):
        raise SpecError("conjugation must pair (0,1) generators with distinct (1,0) generators")
    return Conjugation(tuple(targets), tuple(partners[k][1] for k in range(n)))


def parse_spec(text: str) -> ManifoldSpec:
    """Parse a spec document; SpecError names the line and token of the first problem"""
    sections = _read_sections(text)
    if "manifold" not in sections:
        raise SpecError("missing [manifold] section")
    name, n, holo, anti = _parse_manifold(sections["manifold"])
    names = GeneratorNames(holo, anti)

    parameters: Dict[str, GaussianRational] = {}
    for number, key, value in _assignments(sections.get("parameters", [])):
        if not _NAME.match(key) or key == "i":
            raise SpecError("invalid parameter name", number, key)
        if key in holo or key in anti:
            raise SpecError("parameter name collides with a generator", number, key)
        if key in parameters:
            raise SpecError("duplicate parameter", number, key)
        try:
            parameters[key] = parse_scalar(value)
        except SpecError as e:
            raise SpecError("malformed scalar", number, value) from e

    dbar_rules = _parse_rules("dbar", sections.get("dbar", []), names, list(parameters))
    del_rules = None
    if "del" in sections:
        del_rules = _parse_rules("del", sections["del"], names, list(parameters))

    if not sections.get("omega"):
        raise SpecError("missing [omega] section")
    omega_entries = sections["omega"]
    omega_text = " ".join(content for _, content in omega_entries)
    omega = parse_expression(omega_text, names, list(parameters), line=omega_entries[0][0])
    if not omega or not omega.is_homogeneous_of(Bidegree(1, 1)):
        found = ", ".join(str(b) for b in omega.bidegrees) or "zero"
        raise SpecError(f"omega must be a nonzero (1,1) form, found {found}", omega_entries[0][0], omega_text)

    weights: Tuple[Fraction, ...] = ()
    for number, key, value in _assignments(sections.get("metric", [])):
        if key != "weights":
            raise SpecError("unknown [metric] key", number, key)
        parsed = []
        for part in value.split(","):
            scalar = parse_scalar(part)
            if not scalar.is_real or scalar.re <= 0:
                raise SpecError("metric weights must be positive rationals", number, part.strip())
            parsed.append(scalar.re)
        if len(parsed) != n:
            raise SpecError(f"metric needs {n} weights, got {len(parsed)}", number, value)
        weights = tuple(parsed)

    conjugation = None
    if "conjugation" in sections:
        conjugation = _parse_conjugation(sections["conjugation"], names)

    return ManifoldSpec(
        name=name,
        n=n,
        holo_names=holo,
        anti_names=anti,
        dbar_rules=dbar_rules,
        omega=omega,
        del_rules=del_rules,
        metric_weights=weights,
        conjugation=conjugation,
        parameters=parameters,
    )


def format_spec(spec: ManifoldSpec) -> str:
    """Canonical spec document; parse_spec reads it back to an equal spec"""
    names = spec.names
    lines = [
        "[manifold]",
        f"name = {spec.name}",
        f"n = {spec.n}",
        f"generators_10 = {', '.join(spec.holo_names)}",
        f"generators_01 = {', '.join(spec.anti_names)}",
    ]
    if spec.parameters:
        lines += ["", "[parameters]"]
        lines += [f"{k} = {format_scalar(v)}" for k, v in sorted(spec.parameters.items())]
    ordered = list(spec.holo_names) + list(spec.anti_names)
    lines += ["", "[dbar]"]
    lines += [f"{g} = {format_form(spec.dbar_rules[g], names)}" for g in ordered if g in spec.dbar_rules]
    if spec.del_rules is not None:
        lines += ["", "[del]"]
        lines += [f"{g} = {format_form(spec.del_rules[g], names)}" for g in ordered if g in spec.del_rules]
    lines += ["", "[omega]", format_form(spec.omega, names)]
    lines += ["", "[metric]", f"weights = {', '.join(str(w) for w in spec.metric_weights)}"]
    if spec.conjugation is not None:
        lines += ["", "[conjugation]"]
        for k, (j, s) in enumerate(zip(spec.conjugation.partners, spec.conjugation.scalars)):
            value = spec.holo_names[j] if s == ONE else f"({format_scalar(s)})*{spec.holo_names[j]}"
            lines.append(f"{spec.anti_names[k]} = {value}")
    return "\n".join(lines) + "\n"


def _rule_images(spec: ManifoldSpec, rules: Mapping[str, Form], assignments) -> Dict[Tuple[Side, int], Form]:
    return {spec.generator(name): resolve_form(form, assignments) for name, form in rules.items()}


def derivation_family(n: int, images: Mapping[Tuple[Side, int], Form], shift: Tuple[int, int]) -> OperatorFamily:
    """Anti-derivation determined by its values on generators"""

    def apply(u: Form) -> Form:
        result = Form.zero(n)
        for m, c in u:
            gens = m.generators(n)
            for i, g in enumerate(gens):
                image = images.get(g)
                if not image:
                    continue
                prefix = Form.monomial(n, _monomial_of(gens[:i]))
                suffix = Form.monomial(n, _monomial_of(gens[i + 1:]))
                term = wedge(wedge(prefix, image), suffix).scale(c)
                result = result - term if i % 2 else result + term
        return result

    return OperatorFamily.from_map(n, shift, apply)


def _monomial_of(gens: Sequence[Tuple[Side, int]]) -> MonomialIndex:
    holo = sum(1 << j for side, j in gens if side is Side.HOLO)
    anti = sum(1 << j for side, j in gens if side is Side.ANTI)
    return MonomialIndex(holo, anti)


def _assign(spec: ManifoldSpec, assignments: Optional[Mapping[str, GaussianRational]]) -> Dict[str, GaussianRational]:
    values = dict(spec.parameters)
    for key, value in (assignments or {}).items():
        if key not in spec.parameters:
            raise SpecError(f"{spec.name} has no parameter {key}", token=key)
        values[key] = value if isinstance(value, GaussianRational) else GaussianRational(value)
    return values


def extend_derivation(
    spec: ManifoldSpec,
    which: str = "dbar",
    assignments: Optional[Mapping[str, GaussianRational]] = None,
) -> OperatorFamily:
    """The anti-derivation extending the [dbar] or [del] generator rules"""
    values = _assign(spec, assignments)
    if which == "dbar":
        return derivation_family(spec.n, _rule_images(spec, spec.dbar_rules, values), DBAR_SHIFT)
    if which == "del":
        if spec.del_rules is None:
            raise ValueError(f"{spec.name} has no [del] rules")
        return derivation_family(spec.n, _rule_images(spec, spec.del_rules, values), DEL_SHIFT)
    raise ValueError(f"unknown rule set {which!r}")


def omega_matrix(omega: Form) -> ExactMatrix:
    """Omega with omega = i * sum Omega_jk xi^j ^ eta^k"""
    n = omega.n
    rows = [[ZERO] * n for _ in range(n)]
    for j in range(n):
        for k in range(n):
            coefficient = omega.coefficient(MonomialIndex(1 << j, 1 << k))
            if coefficient:
                rows[j][k] = coefficient / I
    return ExactMatrix.from_rows(rows, cols=n)


@dataclass(frozen=True)
class ComplexInstance:
    """A spec at fixed parameter values with its differentials and symplectic data"""

    spec: ManifoldSpec
    assignments: Mapping[str, GaussianRational]
    dbar: OperatorFamily
    partial: Optional[OperatorFamily]
    omega: Form
    omega_matrix: ExactMatrix
    omega_inverse: Optional[ExactMatrix]
    report: ValidationReport

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def names(self) -> GeneratorNames:
        return self.spec.names

    @property
    def conjugation(self) -> Optional[Conjugation]:
        return self.spec.conjugation

    def format(self, u: Form) -> str:
        return format_form(u, self.names)

    def witness(self, bd: Bidegree, index: int) -> str:
        return f"{describe_basis_vector(self.names, bd, index)} in A^{bd}"


def _family_check(
    report: ValidationReport,
    name: str,
    family: OperatorFamily,
    names: GeneratorNames,
    strict: bool,
):
    for bd in sorted(family.blocks, key=lambda b: (b.total, b.q)):
        block = family.blocks[bd]
        for j in range(block.cols):
            if any(block.column(j)):
                witness = f"{describe_basis_vector(names, bd, j)} in A^{bd}"
                report.add(name, CheckStatus.FAILED, f"witness {witness}")
                if strict:
                    raise ValidationError(name, witness)
                return
    report.add(name, CheckStatus.PASSED)


def _form_check(report: ValidationReport, name: str, form: Form, names: GeneratorNames, strict: bool):
    if form:
        rendered = format_form(form, names)
        report.add(name, CheckStatus.FAILED, f"got {rendered}")
        if strict:
            raise ValidationError(name, detail=f"got {rendered}")
    else:
        report.add(name, CheckStatus.PASSED)


def instantiate(
    spec: ManifoldSpec,
    assignments: Optional[Mapping[str, GaussianRational]] = None,
    validate: bool = True,
) -> ComplexInstance:
    """Resolve parameters, build the differentials and check every structural identity

    With validate=False failures are recorded in the report instead of raised;
    only fault-injection tests want that.
    """
    values = _assign(spec, assignments)
    n = spec.n
    names = spec.names
    report = ValidationReport()
    logger.debug("instantiating %s at %s", spec.name, {k: str(v) for k, v in values.items()})

    dbar_images = _rule_images(spec, spec.dbar_rules, values)
    dbar = derivation_family(n, dbar_images, DBAR_SHIFT)
    partial = None
    del_images: Dict[Tuple[Side, int], Form] = {}
    if spec.del_rules is not None:
        del_images = _rule_images(spec, spec.del_rules, values)
        partial = derivation_family(n, del_images, DEL_SHIFT)

    omega = resolve_form(spec.omega, values)
    omega_m = omega_matrix(omega)
    det = determinant(omega_m)
    top = wedge_all([omega] * n, n)
    if bool(det) != bool(top):
        raise ConsistencyError(f"det Omega = {det} but omega^{n} = {format_form(top, names)}")
    omega_inv = None
    if det:
        omega_inv = inverse(omega_m)
        report.add("omega nondegenerate", CheckStatus.PASSED, f"det Omega = {format_scalar(det)}")
    else:
        report.add("omega nondegenerate", CheckStatus.FAILED, "det Omega = 0")
        if validate:
            raise ValidationError("omega nondegenerate", detail=f"omega^{n} = 0")

    _family_check(report, "dbar^2 = 0", dbar @ dbar, names, validate)
    _form_check(report, "dbar omega = 0", dbar.apply(omega), names, validate)
    if partial is not None:
        _family_check(report, "del^2 = 0", partial @ partial, names, validate)
        _family_check(report, "del dbar + dbar del = 0", (partial @ dbar) + (dbar @ partial), names, validate)
        _form_check(report, "del omega = 0", partial.apply(omega), names, validate)
    else:
        report.add("del omega = 0", CheckStatus.NOT_CHECKED, "no [del] rules")

    conjugation = spec.conjugation
    if conjugation is not None:
        _form_check(report, "omega real", conjugation.conjugate(omega) - omega, names, validate)
        if partial is not None:
            mismatch = Form.zero(n)
            for side in (Side.HOLO, Side.ANTI):
                for j in range(n):
                    generator = Form.generator(n, side, j)
                    expected = conjugation.conjugate(dbar.apply(conjugation.conjugate(generator)))
                    mismatch = mismatch + partial.apply(generator) - expected
            _form_check(report, "del = conj dbar conj", mismatch, names, validate)
    else:
        report.add("omega real", CheckStatus.NOT_CHECKED, "no conjugation data")

    resolved = replace(
        spec,
        dbar_rules={k: lift_form(resolve_form(v, values)) for k, v in spec.dbar_rules.items()},
        del_rules=None if spec.del_rules is None else {k: lift_form(resolve_form(v, values)) for k, v in spec.del_rules.items()},
        omega=lift_form(omega),
        parameters=values,
    )
    return ComplexInstance(
        spec=resolved,
        assignments=values,
        dbar=dbar,
        partial=partial,
        omega=omega,
        omega_matrix=omega_m,
        omega_inverse=omega_inv,
        report=report,
    )


def top_form_scale(n: int) -> GaussianRational:
    """1/n!, the volume normalization of omega^n"""
    return GaussianRational(Fraction(1, factorial(n)))


def change_frame(
    spec: ManifoldSpec,
    m: ExactMatrix,
    holo_names: Optional[Sequence[str]] = None,
    anti_names: Optional[Sequence[str]] = None,
    weights: Optional[Sequence[Fraction]] = None,
    name: Optional[str] = None,
) -> ManifoldSpec:
    """Rewrite the spec in the frame xi' = m * xi, eta' = conj(m) * eta"""
    n = spec.n
    if (m.rows, m.cols) != (n, n):
        raise ValueError(f"frame change needs an {n}x{n} matrix")
    if not determinant(m):
        raise SpecError("frame change matrix is singular")
    m_bar = m.conjugate()
    m_inv = inverse(m)
    m_bar_inv = inverse(m_bar)

    old_in_new: Dict[Tuple[Side, int], Form] = {}
    for j in range(n):
        holo = Form.zero(n)
        anti = Form.zero(n)
        for k in range(n):
            holo = holo + Form.generator(n, Side.HOLO, k, m_inv[j, k])
            anti = anti + Form.generator(n, Side.ANTI, k, m_bar_inv[j, k])
        old_in_new[(Side.HOLO, j)] = holo
        old_in_new[(Side.ANTI, j)] = anti

    def substitute(u: Form) -> Form:
        result = Form.zero(n)
        for monomial, c in u:
            image = wedge_all([old_in_new[g] for g in monomial.generators(n)], n)
            result = result + lift_form(image).scale(c)
        return lift_form(result)

    new_holo = tuple(holo_names or spec.holo_names)
    new_anti = tuple(anti_names or spec.anti_names)

    def transform(rules: Mapping[str, Form]) -> Dict[str, Form]:
        images = {spec.generator(g): substitute(form) for g, form in rules.items()}
        result = {}
        for side, matrix, labels in ((Side.HOLO, m, new_holo), (Side.ANTI, m_bar, new_anti)):
            for i in range(n):
                total = Form.zero(n)
                for j in range(n):
                    image = images.get((side, j))
                    if image and matrix[i, j]:
                        total = total + image.scale(matrix[i, j])
                total = lift_form(total)
                if total:
                    result[labels[i]] = total
        return result

    conjugation = None
    if spec.conjugation is not None:
        conjugation = Conjugation.from_matrix(m_bar @ spec.conjugation.matrix() @ m_bar_inv)
        if conjugation is None:
            logger.warning("conjugation data of %s is not a unit monomial matrix in the new frame; dropped", spec.name)

    return ManifoldSpec(
        name=name or spec.name,
        n=n,
        holo_names=new_holo,
        anti_names=new_anti,
        dbar_rules=transform(spec.dbar_rules),
        omega=substitute(spec.omega),
        del_rules=None if spec.del_rules is None else transform(spec.del_rules),
        metric_weights=tuple(Fraction(w) for w in weights) if weights else spec.metric_weights,
        conjugation=conjugation,
        parameters=dict(spec.parameters),
    )


def perturb_omega(spec: ManifoldSpec, form_text: str, parameter: str = "eps") -> ManifoldSpec:
    """omega + parameter * form, with the new parameter defaulting to 0"""
    if parameter in spec.parameters or parameter in spec.holo_names or parameter in spec.anti_names:
        raise SpecError("perturbation parameter name already in use", token=parameter)
    direction = parse_expression(form_text, spec.names, list(spec.parameters))
    if not direction.is_homogeneous_of(Bidegree(1, 1)):
        raise SpecError("omega perturbation must be a (1,1) form", token=form_text)
    scaled = direction.scale(Polynomial.variable(parameter))
    return replace(spec, omega=spec.omega + scaled).with_parameter(parameter, ZERO)