"""
Expression parser for forms and parameter polynomials
Reads the textual form syntax (`(-1/2*i) * xi1^eta1 + 2*t*xi2^eta1`) into forms
whose coefficients are exact polynomials in the spec's parameters.
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from .errors import SpecError
from .exterior import EMPTY, Form, GeneratorNames, Side, wedge
from .scalars import ONE, ZERO, GaussianRational, I

Key = Tuple[Tuple[str, int], ...]

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def _coerce(value) -> "Polynomial":
    if isinstance(value, Polynomial):
        return value
    if isinstance(value, (int, Fraction, GaussianRational)):
        return Polynomial.constant(value)
    raise TypeError(f"cannot use {type(value).__name__} as a polynomial")


def _merge(a: Key, b: Key) -> Key:
    powers: Dict[str, int] = dict(a)
    for name, exp in b:
        powers[name] = powers.get(name, 0) + exp
    return tuple(sorted(powers.items()))


@dataclass(frozen=True)
class Polynomial:
    """Polynomial in named parameters over Q(i)"""

    terms: Mapping[Key, GaussianRational]

    def __post_init__(self):
        cleaned = {k: v for k, v in self.terms.items() if v}
        object.__setattr__(self, "terms", dict(sorted(cleaned.items())))

    @classmethod
    def constant(cls, value) -> "Polynomial":
        if not isinstance(value, GaussianRational):
            value = GaussianRational(value)
        return cls({(): value})

    @classmethod
    def variable(cls, name: str) -> "Polynomial":
        return cls({((name, 1),): ONE})

    @property
    def variables(self) -> List[str]:
        return sorted({name for key in self.terms for name, _ in key})

    @property
    def is_constant(self) -> bool:
        return all(key == () for key in self.terms)

    def constant_value(self) -> GaussianRational:
        if not self.is_constant:
            raise ValueError(f"{self} depends on {', '.join(self.variables)}")
        return self.terms.get((), ZERO)

    def evaluate(self, assignments: Mapping[str, GaussianRational]) -> GaussianRational:
        total = ZERO
        for key, coefficient in self.terms.items():
            value = coefficient
            for name, exp in key:
                if name not in assignments:
                    raise SpecError(f"parameter {name} has no value")
                value = value * assignments[name] ** exp
            total = total + value
        return total

    def __add__(self, other):
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        merged = dict(self.terms)
        for key, value in other.terms.items():
            merged[key] = merged.get(key, ZERO) + value
        return Polynomial(merged)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        product: Dict[Key, GaussianRational] = {}
        for ka, va in self.terms.items():
            for kb, vb in other.terms.items():
                key = _merge(ka, kb)
                product[key] = product.get(key, ZERO) + va * vb
        return Polynomial(product)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Polynomial":
        result = Polynomial.constant(ONE)
        for _ in range(exponent):
            result = result * self
        return result

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(tuple(self.terms.items()))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for key, coefficient in self.terms.items():
            powers = "*".join(name if exp == 1 else f"{name}**{exp}" for name, exp in key)
            if not powers:
                pieces.append(str(coefficient))
            elif coefficient == ONE:
                pieces.append(powers)
            else:
                pieces.append(f"({coefficient})*{powers}")
        return " + ".join(pieces)


class _Parser:
    """Recursive descent over the token stream

    expr  := term (('+'|'-') term)*
    term  := wedge (('*'|'/') wedge)*
    wedge := power ('^' power)*
    power := ('+'|'-') power | atom ['**' NUMBER]
    atom  := NUMBER | NAME | '(' expr ')'
    """

    def __init__(self, text: str, names: GeneratorNames, parameters: Iterable[str], line: Optional[int]):
        self.text = text
        self.n = len(names.holo)
        self.line = line
        self.generators: Dict[str, Tuple[Side, int]] = {}
        for j, name in enumerate(names.holo):
            self.generators[name] = (Side.HOLO, j)
        for j, name in enumerate(names.anti):
            self.generators[name] = (Side.ANTI, j)
        self.parameters = set(parameters)
        self.tokens = self._tokenize(text)
        self.position = 0

    def _tokenize(self, text: str) -> List[str]:
        tokens = []
        position = 0
        stripped = text.rstrip()
        while position < len(stripped):
            match = _TOKEN.match(stripped, position)
            if not match:
                raise SpecError("unexpected character", self.line, stripped[position:].strip()[:12])
            tokens.append(match.group(match.lastindex))
            position = match.end()
        if not tokens:
            raise SpecError("empty expression", self.line, text)
        return tokens

    def _peek(self) -> Optional[str]:
        return self.tokens[self.position] if self.position < len(self.tokens) else None

    def _take(self) -> str:
        token = self._peek()
        if token is None:
            raise SpecError("unexpected end of expression", self.line, self.text.strip())
        self.position += 1
        return token

    def _scalar(self, value) -> Form:
        return Form.constant(self.n, Polynomial.constant(value))

    def _as_scalar(self, value: Form, token: str) -> Polynomial:
        if any(m != EMPTY for m in value.terms):
            raise SpecError("expected a scalar", self.line, token)
        return value.terms.get(EMPTY, Polynomial({}))

    def parse(self) -> Form:
        value = self.expr()
        if self._peek() is not None:
            raise SpecError("unexpected token", self.line, self._peek())
        return value

    def expr(self) -> Form:
        value = self.term()
        while self._peek() in ("+", "-"):
            op = self._take()
            right = self.term()
            value = value + right if op == "+" else value - right
        return value

    def term(self) -> Form:
        value = self.wedge()
        while self._peek() in ("*", "/"):
            op = self._take()
            token = self._peek() or ""
            right = self.wedge()
            if op == "/":
                divisor = self._as_scalar(right, token)
                if not divisor.is_constant or not divisor:
                    raise SpecError("division by a non-constant or zero scalar", self.line, token)
                value = value.scale(Polynomial.constant(divisor.constant_value().reciprocal()))
            elif all(m == EMPTY for m in right.terms):
                value = value.scale(right.terms.get(EMPTY, Polynomial({})))
            elif all(m == EMPTY for m in value.terms):
                value = right.scale(value.terms.get(EMPTY, Polynomial({})))
            else:
                raise SpecError("product of two forms; use ^ for the wedge product", self.line, token)
        return value

    def wedge(self) -> Form:
        value = self.power()
        while self._peek() == "^":
            self._take()
            value = wedge(value, self.power())
        return value

    def power(self) -> Form:
        if self._peek() in ("+", "-"):
            sign = self._take()
            value = self.power()
            return -value if sign == "-" else value
        value = self.atom()
        if self._peek() == "**":
            self._take()
            token = self._take()
            if not token.isdigit():
                raise SpecError("exponent must be a non-negative integer", self.line, token)
            base = self._as_scalar(value, token)
            value = Form.constant(self.n, base ** int(token))
        return value

    def atom(self) -> Form:
        token = self._take()
        if token.isdigit():
            return self._scalar(int(token))
        if token == "(":
            value = self.expr()
            if self._take() != ")":
                raise SpecError("missing closing parenthesis", self.line, self.text.strip())
            return value
        if token == "i":
            return self._scalar(I)
        if token in self.generators:
            side, j = self.generators[token]
            return Form.generator(self.n, side, j, Polynomial.constant(ONE))
        if token in self.parameters:
            return Form.constant(self.n, Polynomial.variable(token))
        if token[0].isalpha() or token[0] == "_":
            raise SpecError("unknown generator or parameter name", self.line, token)
        raise SpecError("unexpected token", self.line, token)


def parse_expression(
    text: str,
    names: GeneratorNames,
    parameters: Iterable[str] = (),
    line: Optional[int] = None,
) -> Form:
    """Form with Polynomial coefficients"""
    return _Parser(text, names, parameters, line).parse()


def resolve_form(form: Form, assignments: Mapping[str, GaussianRational]) -> Form:
    """Substitute parameter values, leaving a form with scalar coefficients"""

    def value(coefficient):
        if isinstance(coefficient, Polynomial):
            return coefficient.evaluate(assignments)
        return coefficient

    return form.map_coefficients(value)


def lift_form(form: Form) -> Form:
    """Scalar-coefficient form as a polynomial-coefficient one"""
    return form.map_coefficients(lambda c: c if isinstance(c, Polynomial) else Polynomial.constant(c))


def parse_form(
    text: str,
    names: GeneratorNames,
    assignments: Optional[Mapping[str, GaussianRational]] = None,
) -> Form:
    """Parse a form and resolve any parameters it mentions"""
    assignments = dict(assignments or {})
    return resolve_form(parse_expression(text, names, assignments.keys()), assignments)
