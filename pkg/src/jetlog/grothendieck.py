"""Formal arithmetic in the completed Grothendieck ring with rational powers of L.

An element is a finite integer combination of ``[X_1]...[X_k] * L^e`` with
class symbols X_i and a rational exponent e. The symbols generate a free
commutative monoid: no scissor relation is imposed, so two elements are
compared either structurally or after :func:`specialize` at several q.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import MissingCountPolynomial, NonIntegerExponent

NEG_INFINITY = float("-inf")

Monomial = tuple  # sorted tuple of ClassSymbol; () is the point class


def _strip(poly) -> tuple[int, ...]:
    poly = [int(c) for c in poly]
    while poly and poly[-1] == 0:
        poly.pop()
    return tuple(poly)


@dataclass(frozen=True)
class ClassSymbol:
    """The class [X] of a variety, with its dimension and optional point count.

    ``count_poly`` lists integer coefficients in ascending degree; e.g. the
    projective line is ``ClassSymbol("P1", 1, (1, 1))``.
    """

    name: str
    dim: int | float
    count_poly: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.count_poly is not None:
            cp = _strip(self.count_poly)
            object.__setattr__(self, "count_poly", cp)
            degree = len(cp) - 1 if cp else NEG_INFINITY
            if degree != self.dim:
                raise ValueError(f"count polynomial of [{self.name}] has degree {degree}, dim is {self.dim}")
        if self.name == "PT" and (self.dim != 0 or self.count_poly not in (None, (1,))):
            raise ValueError("PT is reserved for the point class")

    def count(self, q: int) -> int:
        if self.count_poly is None:
            raise MissingCountPolynomial(f"[{self.name}] has no point-count polynomial")
        total = 0
        for c in reversed(self.count_poly):
            total = total * q + c
        return total


PT = ClassSymbol("PT", 0, (1,))
EMPTY = ClassSymbol("EMPTY", NEG_INFINITY, ())


def monomial_dim(mono: Monomial):
    return sum((s.dim for s in mono), 0)


def _monomial(symbols: Iterable[ClassSymbol]) -> Monomial | None:
    out = []
    for s in symbols:
        if s.dim == NEG_INFINITY:
            return None
        if s.name != "PT":
            out.append(s)
    return tuple(sorted(out, key=lambda s: s.name))


class MotivicElement:
    """Finite sum of coefficient * monomial * L^exponent, kept in normal form."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple[Monomial, Fraction], int] | None = None):
        clean: dict[tuple[Monomial, Fraction], int] = {}
        for (mono, exp), c in (terms or {}).items():
            mono = _monomial(mono)
            if mono is None:
                continue
            key = (mono, Fraction(exp))
            clean[key] = clean.get(key, 0) + int(c)
        self.terms = {k: c for k, c in clean.items() if c}

    @classmethod
    def _raw(cls, terms):
        el = cls.__new__(cls)
        el.terms = terms
        return el

    # constructors

    @classmethod
    def zero(cls) -> MotivicElement:
        return cls()

    @classmethod
    def one(cls) -> MotivicElement:
        return cls({((), Fraction(0)): 1})

    @classmethod
    def lefschetz(cls, exp=1) -> MotivicElement:
        """L^exp."""
        return cls({((), Fraction(exp)): 1})

    @classmethod
    def of_class(cls, symbol: ClassSymbol, exp=0) -> MotivicElement:
        return cls({((symbol,), Fraction(exp)): 1})

    @classmethod
    def from_count_poly(cls, coeffs: Iterable[int]) -> MotivicElement:
        """The polynomial sum c_k L^k as point-class terms."""
        return cls({((), Fraction(k)): c for k, c in enumerate(coeffs)})

    # arithmetic

    @staticmethod
    def _coerce(other):
        if isinstance(other, MotivicElement):
            return other
        if isinstance(other, int) and not isinstance(other, bool):
            return MotivicElement({((), Fraction(0)): other})
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for k, c in other.terms.items():
            s = terms.get(k, 0) + c
            if s:
                terms[k] = s
            else:
                terms.pop(k, None)
        return MotivicElement._raw(terms)

    __radd__ = __add__

    def __neg__(self):
        return MotivicElement._raw({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms: dict = {}
        for (m1, e1), c1 in self.terms.items():
            for (m2, e2), c2 in other.terms.items():
                key = (tuple(sorted(m1 + m2, key=lambda s: s.name)), e1 + e2)
                terms[key] = terms.get(key, 0) + c1 * c2
        return MotivicElement._raw({k: c for k, c in terms.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers")
        result = MotivicElement.one()
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    # structure

    def dim(self):
        """Max of monomial dimension plus exponent; NEG_INFINITY when empty."""
        return max((monomial_dim(m) + e for (m, e) in self.terms), default=NEG_INFINITY)

    def leading(self) -> MotivicElement:
        """The terms of top dimension."""
        top = self.dim()
        return MotivicElement._raw({k: c for k, c in self.terms.items() if monomial_dim(k[0]) + k[1] == top})

    def truncate(self, m) -> MotivicElement:
        """Image in the quotient by the filtration piece of dimension <= m."""
        return MotivicElement._raw({k: c for k, c in self.terms.items() if monomial_dim(k[0]) + k[1] > m})

    def shift(self, exp) -> MotivicElement:
        """Multiply by L^exp."""
        exp = Fraction(exp)
        return MotivicElement._raw({(m, e + exp): c for (m, e), c in self.terms.items()})

    def symbols(self) -> set[ClassSymbol]:
        return {s for (m, _e) in self.terms for s in m}

    def specialize(self, q: int) -> Fraction:
        """Substitute L -> q and every class by its point count."""
        total = Fraction(0)
        for (mono, exp), c in self.terms.items():
            if exp.denominator != 1:
                raise NonIntegerExponent(f"L^{exp} has no value at an integer q")
            value = Fraction(c)
            for s in mono:
                value *= s.count(q)
            value *= Fraction(q) ** int(exp)
            total += value
        return total

    def sorted_terms(self):
        def key(item):
            (mono, exp), _c = item
            return (-(monomial_dim(mono) + exp), [s.name for s in mono], -exp)
        return sorted(self.terms.items(), key=key)

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for i, ((mono, exp), c) in enumerate(self.sorted_terms()):
            factors = [f"[{s.name}]" for s in mono]
            if exp == 1:
                factors.append("L")
            elif exp != 0:
                factors.append(f"L^{exp}" if exp > 0 and exp.denominator == 1 else f"L^({exp})")
            a = abs(c)
            if not factors:
                body = str(a)
            elif a == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(a)] + factors)
            if i == 0:
                out.append(("-" if c < 0 else "") + body)
            else:
                out.append((" - " if c < 0 else " + ") + body)
        return "".join(out)

    def __repr__(self):
        return f"MotivicElement({self})"


def dim(a: MotivicElement):
    return a.dim()


def truncate(a: MotivicElement, m) -> MotivicElement:
    return a.truncate(m)


def specialize(a: MotivicElement, q: int) -> Fraction:
    return a.specialize(q)


L = MotivicElement.lefschetz()


# -- JSON ------------------------------------------------------------------


def element_to_json(a: MotivicElement) -> list[dict]:
    return [{"coeff": c, "symbols": [s.name for s in mono], "exp": str(exp)}
            for (mono, exp), c in a.sorted_terms()]


def element_from_json(data: list[dict], symbols: Mapping[str, ClassSymbol]) -> MotivicElement:
    terms: dict = {}
    for entry in data:
        syms = []
        for name in entry.get("symbols", []):
            if name == "PT":
                continue
            if name == "EMPTY":
                syms.append(EMPTY)
                continue
            if name not in symbols:
                raise KeyError(f"unknown class symbol {name!r}")
            syms.append(symbols[name])
        key = (tuple(syms), Fraction(str(entry.get("exp", "0"))))
        terms[key] = terms.get(key, 0) + int(entry["coeff"])
    return MotivicElement(terms)


def symbols_to_json(symbols: Iterable[ClassSymbol]) -> dict:
    return {s.name: {"dim": s.dim, "count_poly": list(s.count_poly) if s.count_poly is not None else None}
            for s in sorted(symbols, key=lambda s: s.name) if s.name not in ("PT", "EMPTY")}


def symbols_from_json(data: Mapping[str, Mapping]) -> dict[str, ClassSymbol]:
    out = {}
    for name, spec in data.items():
        cp = spec.get("count_poly")
        out[name] = ClassSymbol(name, int(spec["dim"]), tuple(cp) if cp is not None else None)
    return out
