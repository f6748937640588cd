"""
Bigraded exterior algebra
Monomials are pairs of bitmasks over n holomorphic and n antiholomorphic
generators. All generators anticommute in one canonical order: holomorphic
indices ascending, then antiholomorphic indices ascending.
"""

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from itertools import combinations
from typing import Callable, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from .scalars import ONE, ZERO, GaussianRational

MAX_GENERATORS = 16


class Side(Enum):
    HOLO = "holo"
    ANTI = "anti"


@dataclass(frozen=True, order=True)
class Bidegree:
    p: int
    q: int

    def is_valid(self, n: int) -> bool:
        return 0 <= self.p <= n and 0 <= self.q <= n

    def shifted(self, shift: Tuple[int, int]) -> "Bidegree":
        return Bidegree(self.p + shift[0], self.q + shift[1])

    @property
    def total(self) -> int:
        return self.p + self.q

    def __str__(self) -> str:
        return f"({self.p},{self.q})"


@dataclass(frozen=True, order=True)
class MonomialIndex:
    holo: int
    anti: int

    @property
    def bidegree(self) -> Bidegree:
        return Bidegree(bin(self.holo).count("1"), bin(self.anti).count("1"))

    @property
    def degree(self) -> int:
        return bin(self.holo).count("1") + bin(self.anti).count("1")

    def packed(self, n: int) -> int:
        """Single mask in canonical order: holomorphic bits low, antiholomorphic above them"""
        return self.holo | (self.anti << n)

    def generators(self, n: int) -> List[Tuple[Side, int]]:
        """Generators in canonical written order, 0-based indices"""
        holo = [(Side.HOLO, j) for j in range(n) if self.holo >> j & 1]
        anti = [(Side.ANTI, j) for j in range(n) if self.anti >> j & 1]
        return holo + anti


EMPTY = MonomialIndex(0, 0)


def check_rank(n: int):
    if not 1 <= n <= MAX_GENERATORS:
        raise ValueError(f"n must lie in 1..{MAX_GENERATORS}, got {n}")


def all_bidegrees(n: int) -> List[Bidegree]:
    """Ordered by total degree, then by q: (0,0), (1,0), (0,1), (2,0), ..."""
    return sorted((Bidegree(p, q) for p in range(n + 1) for q in range(n + 1)), key=lambda b: (b.total, b.q))


@lru_cache(maxsize=None)
def _masks(n: int, k: int) -> Tuple[int, ...]:
    return tuple(sorted(sum(1 << j for j in chosen) for chosen in combinations(range(n), k)))


@lru_cache(maxsize=None)
def enumerate_basis(n: int, bd: Bidegree) -> Tuple[MonomialIndex, ...]:
    """All monomials of bidegree bd ordered by (holo mask, anti mask)"""
    if not bd.is_valid(n):
        raise ValueError(f"bidegree {bd} is not valid for n={n}")
    return tuple(MonomialIndex(h, a) for h in _masks(n, bd.p) for a in _masks(n, bd.q))


@lru_cache(maxsize=None)
def _positions(n: int, bd: Bidegree) -> Dict[MonomialIndex, int]:
    return {m: k for k, m in enumerate(enumerate_basis(n, bd))}


def basis_dim(n: int, bd: Bidegree) -> int:
    if not bd.is_valid(n):
        return 0
    return len(enumerate_basis(n, bd))


def _popcount(x: int) -> int:
    return bin(x).count("1")


def monomial_wedge(n: int, a: MonomialIndex, b: MonomialIndex) -> Tuple[int, Optional[MonomialIndex]]:
    """Sign and product of two monomials; (0, None) when they share a generator"""
    pa, pb = a.packed(n), b.packed(n)
    if pa & pb:
        return 0, None
    inversions = 0
    rest = pb
    while rest:
        low = rest & -rest
        inversions += _popcount(pa & ~((low << 1) - 1))
        rest ^= low
    sign = -1 if inversions & 1 else 1
    return sign, MonomialIndex(a.holo | b.holo, a.anti | b.anti)


def _generator_bit(n: int, side: Side, j: int) -> int:
    return j if side is Side.HOLO else n + j


@dataclass(frozen=True)
class Form:
    """Sparse combination of monomials; zero coefficients are never stored

    Coefficients are GaussianRationals, or parameter Polynomials in forms
    read from a spec before its parameters are resolved.
    """

    n: int
    terms: Mapping[MonomialIndex, object]

    def __post_init__(self):
        cleaned = {m: c for m, c in self.terms.items() if c}
        object.__setattr__(self, "terms", dict(sorted(cleaned.items())))

    @classmethod
    def zero(cls, n: int) -> "Form":
        return cls(n, {})

    @classmethod
    def constant(cls, n: int, value=ONE) -> "Form":
        return cls(n, {EMPTY: value})

    @classmethod
    def monomial(cls, n: int, index: MonomialIndex, coefficient=ONE) -> "Form":
        return cls(n, {index: coefficient})

    @classmethod
    def generator(cls, n: int, side: Side, j: int, coefficient=ONE) -> "Form":
        """The generator with 0-based index j"""
        index = MonomialIndex(1 << j, 0) if side is Side.HOLO else MonomialIndex(0, 1 << j)
        return cls(n, {index: coefficient})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Form):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __iter__(self) -> Iterator[Tuple[MonomialIndex, object]]:
        return iter(self.terms.items())

    def __add__(self, other: "Form") -> "Form":
        _check_n(self, other)
        merged = dict(self.terms)
        for m, c in other.terms.items():
            merged[m] = merged[m] + c if m in merged else c
        return Form(self.n, merged)

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def __neg__(self) -> "Form":
        return Form(self.n, {m: -c for m, c in self.terms.items()})

    def scale(self, factor) -> "Form":
        return Form(self.n, {m: factor * c for m, c in self.terms.items()})

    def map_coefficients(self, fn: Callable) -> "Form":
        return Form(self.n, {m: fn(c) for m, c in self.terms.items()})

    @property
    def bidegrees(self) -> List[Bidegree]:
        return sorted({m.bidegree for m in self.terms})

    @property
    def bidegree(self) -> Optional[Bidegree]:
        """The common bidegree, or None for mixed and zero forms"""
        found = self.bidegrees
        return found[0] if len(found) == 1 else None

    def is_homogeneous_of(self, bd: Bidegree) -> bool:
        return all(m.bidegree == bd for m in self.terms)

    def component(self, bd: Bidegree) -> "Form":
        return Form(self.n, {m: c for m, c in self.terms.items() if m.bidegree == bd})

    def coefficient(self, index: MonomialIndex):
        return self.terms.get(index, ZERO)


def _check_n(a: Form, b: Form):
    if a.n != b.n:
        raise ValueError(f"forms over different generator counts: {a.n} vs {b.n}")


def wedge(a: Form, b: Form) -> Form:
    _check_n(a, b)
    n = a.n
    out: Dict[MonomialIndex, object] = {}
    for ma, ca in a.terms.items():
        for mb, cb in b.terms.items():
            sign, product = monomial_wedge(n, ma, mb)
            if not sign:
                continue
            value = ca * cb
            if sign < 0:
                value = -value
            out[product] = out[product] + value if product in out else value
    return Form(n, out)


def wedge_all(forms: Sequence[Form], n: int) -> Form:
    result = Form.constant(n)
    for form in forms:
        result = wedge(result, form)
    return result


def contract(side: Side, j: int, u: Form) -> Form:
    """Graded interior product against generator j (0-based)"""
    n = u.n
    bit = _generator_bit(n, side, j)
    out = {}
    for m, c in u.terms.items():
        packed = m.packed(n)
        if not packed >> bit & 1:
            continue
        preceding = _popcount(packed & ((1 << bit) - 1))
        if side is Side.HOLO:
            reduced = MonomialIndex(m.holo & ~(1 << j), m.anti)
        else:
            reduced = MonomialIndex(m.holo, m.anti & ~(1 << j))
        out[reduced] = -c if preceding & 1 else c
    return Form(n, out)


def to_vector(u: Form, bd: Bidegree) -> Tuple[GaussianRational, ...]:
    if not u.is_homogeneous_of(bd):
        raise ValueError(f"form of bidegrees {[str(b) for b in u.bidegrees]} is not of bidegree {bd}")
    positions = _positions(u.n, bd)
    vector = [ZERO] * len(positions)
    for m, c in u.terms.items():
        vector[positions[m]] = c
    return tuple(vector)


def from_vector(v: Sequence[GaussianRational], n: int, bd: Bidegree) -> Form:
    basis = enumerate_basis(n, bd)
    if len(v) != len(basis):
        raise ValueError(f"vector of length {len(v)} for bidegree {bd} of dimension {len(basis)}")
    return Form(n, {m: c for m, c in zip(basis, v)})


@dataclass(frozen=True)
class GeneratorNames:
    """Display names of the generators, 0-based"""

    holo: Tuple[str, ...]
    anti: Tuple[str, ...]

    def name(self, side: Side, j: int) -> str:
        return self.holo[j] if side is Side.HOLO else self.anti[j]

    def monomial(self, index: MonomialIndex) -> str:
        n = len(self.holo)
        return "^".join(self.name(side, j) for side, j in index.generators(n))


def format_form(u: Form, names: GeneratorNames) -> str:
    """Render in the textual form syntax, terms in canonical monomial order"""
    if not u:
        return "0"
    ordered = sorted(u.terms.items(), key=lambda item: (item[0].degree, item[0]))
    pieces = []
    for m, c in ordered:
        body = names.monomial(m)
        if c == ONE:
            piece = body or "1"
        elif body:
            piece = f"({c})*{body}"
        else:
            piece = f"({c})"
        pieces.append(piece)
    return " + ".join(pieces)
