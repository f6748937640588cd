"""
Gaussian rationals
Exact scalars a + b*i with rational a, b, and the literal syntax shared by spec files and reports.
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import SpecError

Number = Union[int, Fraction, "GaussianRational"]

_TERM = re.compile(r"([+-])?(?:(\d+)(?:/(\d+))?(\*?i)?|(i))")


def _coerce(value) -> "GaussianRational":
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, (int, Fraction)):
        return GaussianRational(Fraction(value))
    raise TypeError(f"cannot use {type(value).__name__} as a Gaussian rational")


@dataclass(frozen=True)
class GaussianRational:
    """Exact element of Q(i); Fraction keeps both parts normalized"""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        if not isinstance(self.re, Fraction):
            object.__setattr__(self, "re", Fraction(self.re))
        if not isinstance(self.im, Fraction):
            object.__setattr__(self, "im", Fraction(self.im))

    @classmethod
    def parse(cls, text: str) -> "GaussianRational":
        return parse_scalar(text)

    def __add__(self, other):
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        return other * self.reciprocal()

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def __pow__(self, exponent: int) -> "GaussianRational":
        if not isinstance(exponent, int):
            return NotImplemented
        base = self if exponent >= 0 else self.reciprocal()
        result = ONE
        for _ in range(abs(exponent)):
            result = result * base
        return result

    def __bool__(self) -> bool:
        return self.re != 0 or self.im != 0

    def __eq__(self, other) -> bool:
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self) -> int:
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def reciprocal(self) -> "GaussianRational":
        norm = self.norm()
        if norm == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        return GaussianRational(self.re / norm, -self.im / norm)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def norm(self) -> Fraction:
        """Squared modulus"""
        return self.re * self.re + self.im * self.im

    @property
    def is_real(self) -> bool:
        return self.im == 0

    def __str__(self) -> str:
        return format_scalar(self)

    def __repr__(self) -> str:
        return f"GaussianRational({format_scalar(self)})"


ZERO = GaussianRational()
ONE = GaussianRational(Fraction(1))
I = GaussianRational(Fraction(0), Fraction(1))


def _fraction_text(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_scalar(value: GaussianRational) -> str:
    """Render in the literal syntax: 2, -1/2*i, 1+1/4*i, i"""
    if not value:
        return "0"
    parts = []
    if value.re != 0:
        parts.append(_fraction_text(value.re))
    if value.im != 0:
        magnitude = abs(value.im)
        body = "i" if magnitude == 1 else f"{_fraction_text(magnitude)}*i"
        if value.im < 0:
            parts.append(f"-{body}")
        elif parts:
            parts.append(f"+{body}")
        else:
            parts.append(body)
    return "".join(parts)


def parse_scalar(text: str) -> GaussianRational:
    """Parse a scalar literal such as `-1/2*i`, `2` or `1+1/4*i`"""
    compact = "".join(text.split())
    if not compact:
        raise SpecError("empty scalar literal", token=text)
    total = ZERO
    position = 0
    while position < len(compact):
        match = _TERM.match(compact, position)
        if not match or match.end() == position:
            raise SpecError("malformed scalar", token=compact[position:])
        if position > 0 and match.group(1) is None:
            raise SpecError("malformed scalar", token=compact[position:])
        sign = -1 if match.group(1) == "-" else 1
        if match.group(5):
            term = GaussianRational(Fraction(0), Fraction(sign))
        else:
            denominator = int(match.group(3)) if match.group(3) else 1
            if denominator == 0:
                raise SpecError("zero denominator", token=match.group(0))
            magnitude = Fraction(sign * int(match.group(2)), denominator)
            if match.group(4):
                term = GaussianRational(Fraction(0), magnitude)
            else:
                term = GaussianRational(magnitude)
        total = total + term
        position = match.end()
    return total
