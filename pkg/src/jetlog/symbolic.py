"""Exact multivariate polynomials, truncated power series in t, and ideals.

Coefficients live either in Q (``fractions.Fraction``) or in a prime field
F_p (ints reduced mod p). The string form is the contract used by every
JSON fixture::

    x^2 - 2*x*y + 1/3*y^3 - 5

Terms are joined by ``+``/``-``, powers use ``^`` and ``*`` between factors
is optional on input (``2x y`` parses). Printing is canonical, so
``parse_poly(str(f), f.variables) == f`` and the strings agree exactly.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import DomainMismatch, NotMonomial, PrecisionTooLow
from .finite_field import is_prime


@dataclass(frozen=True)
class Domain:
    """Coefficient domain: Q when ``modulus`` is None, else F_modulus."""

    modulus: int | None = None

    def __post_init__(self):
        if self.modulus is not None and not is_prime(self.modulus):
            raise ValueError(f"coefficient domain needs a prime modulus, got {self.modulus}")

    def __str__(self):
        return "QQ" if self.modulus is None else f"GF({self.modulus})"

    def coerce(self, c):
        if self.modulus is None:
            return Fraction(c)
        p = self.modulus
        if isinstance(c, Fraction):
            den = c.denominator % p
            if den == 0:
                raise ZeroDivisionError(f"{c} has no image in {self}")
            return c.numerator * pow(den, -1, p) % p
        return int(c) % p

    def inv(self, c):
        if self.modulus is None:
            return 1 / Fraction(c)
        return pow(c, -1, self.modulus)


QQ = Domain()


def GF(p: int) -> Domain:
    return Domain(p)


def _is_scalar(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


class Poly:
    """A polynomial over ``domain`` in the ordered ``variables``."""

    __slots__ = ("variables", "domain", "terms", "_hash")

    def __init__(self, variables: Sequence[str], terms: Mapping[tuple[int, ...], object] | None = None,
                 domain: Domain = QQ):
        self.variables = tuple(variables)
        self.domain = domain
        clean = {}
        for exps, c in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != len(self.variables):
                raise ValueError(f"exponent vector {exps} does not match {self.variables}")
            c = domain.coerce(c)
            if c:
                clean[exps] = clean.get(exps, 0) + c
                if domain.modulus is not None:
                    clean[exps] %= domain.modulus
                if not clean[exps]:
                    del clean[exps]
        self.terms = clean
        self._hash = None

    # constructors

    @classmethod
    def const(cls, c, variables: Sequence[str] = (), domain: Domain = QQ) -> Poly:
        return cls(variables, {(0,) * len(tuple(variables)): c}, domain)

    @classmethod
    def var(cls, name: str, variables: Sequence[str], domain: Domain = QQ) -> Poly:
        variables = tuple(variables)
        exps = tuple(int(v == name) for v in variables)
        if sum(exps) != 1:
            raise ValueError(f"{name!r} is not one of {variables}")
        return cls(variables, {exps: 1}, domain)

    def _from_terms(self, terms) -> Poly:
        p = Poly.__new__(Poly)
        p.variables = self.variables
        p.domain = self.domain
        p.terms = terms
        p._hash = None
        return p

    # predicates

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def constant_term(self):
        return self.terms.get((0,) * len(self.variables), self.domain.coerce(0))

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def used_variables(self) -> tuple[str, ...]:
        used = set()
        for e in self.terms:
            used.update(i for i, k in enumerate(e) if k)
        return tuple(self.variables[i] for i in sorted(used))

    # arithmetic

    def _check(self, other: Poly):
        if self.domain != other.domain:
            raise DomainMismatch(f"cannot combine polynomials over {self.domain} and {other.domain}")
        if self.variables != other.variables:
            raise DomainMismatch(f"variable sets differ: {self.variables} vs {other.variables}")

    def _lift(self, other) -> Poly:
        if isinstance(other, Poly):
            self._check(other)
            return other
        if _is_scalar(other):
            return Poly.const(other, self.variables, self.domain)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        mod = self.domain.modulus
        for e, c in other.terms.items():
            s = terms.get(e, 0) + c
            if mod is not None:
                s %= mod
            if s:
                terms[e] = s
            else:
                terms.pop(e, None)
        return self._from_terms(terms)

    __radd__ = __add__

    def __neg__(self):
        mod = self.domain.modulus
        if mod is None:
            return self._from_terms({e: -c for e, c in self.terms.items()})
        return self._from_terms({e: -c % mod for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if _is_scalar(other):
            return self.scalar(other)
        if not isinstance(other, Poly):
            return NotImplemented
        self._check(other)
        mod = self.domain.modulus
        terms: dict[tuple[int, ...], object] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        if mod is not None:
            terms = {e: c % mod for e, c in terms.items()}
        return self._from_terms({e: c for e, c in terms.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("polynomial powers must be non-negative integers")
        result = Poly.const(1, self.variables, self.domain)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def scalar(self, c) -> Poly:
        c = self.domain.coerce(c)
        if not c:
            return self._from_terms({})
        mod = self.domain.modulus
        if mod is None:
            return self._from_terms({e: v * c for e, v in self.terms.items()})
        return self._from_terms({e: v * c % mod for e, v in self.terms.items() if v * c % mod})

    def eval(self, values: Mapping[str, object] | Sequence[object]):
        """Substitute domain elements for every variable; returns a coefficient."""
        if isinstance(values, Mapping):
            missing = [v for v in self.variables if v not in values]
            if missing:
                raise ValueError(f"no value for {missing}")
            values = [values[v] for v in self.variables]
        vals = [self.domain.coerce(v) for v in values]
        if len(vals) != len(self.variables):
            raise ValueError("wrong number of values")
        mod = self.domain.modulus
        total = self.domain.coerce(0)
        for e, c in self.terms.items():
            t = c
            for v, k in zip(vals, e):
                if k:
                    t = t * (v ** k if mod is None else pow(v, k, mod))
            total += t
        return total if mod is None else total % mod

    def with_variables(self, variables: Sequence[str]) -> Poly:
        """Re-express in a variable list containing every used variable."""
        variables = tuple(variables)
        index = {v: i for i, v in enumerate(variables)}
        terms = {}
        for e, c in self.terms.items():
            new = [0] * len(variables)
            for v, k in zip(self.variables, e):
                if k:
                    if v not in index:
                        raise DomainMismatch(f"variable {v!r} missing from {variables}")
                    new[index[v]] = k
            terms[tuple(new)] = c
        return Poly(variables, terms, self.domain)

    def to_domain(self, domain: Domain) -> Poly:
        return Poly(self.variables, self.terms, domain)

    def divides(self, other: Poly) -> bool:
        """Monomial divisibility; both operands must be single terms."""
        (e1,), (e2,) = self.terms, other.terms
        return all(a <= b for a, b in zip(e1, e2))

    # comparison / display

    def __eq__(self, other):
        if _is_scalar(other):
            other = Poly.const(other, self.variables, self.domain)
        if not isinstance(other, Poly):
            return NotImplemented
        return (self.variables == other.variables and self.domain == other.domain
                and self.terms == other.terms)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.variables, self.domain, frozenset(self.terms.items())))
        return self._hash

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: (-sum(t[0]), tuple(-k for k in t[0])))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for i, (e, c) in enumerate(self.sorted_terms()):
            mono = "*".join(v if k == 1 else f"{v}^{k}" for v, k in zip(self.variables, e) if k)
            neg = c < 0
            a = -c if neg else c
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            if i == 0:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append((" - " if neg else " + ") + body)
        return "".join(parts)

    def __repr__(self):
        return f"Poly({str(self)!r}, {self.variables}, {self.domain})"


# -- parsing ---------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*)|(.))")


def _tokenize(s: str):
    tokens = []
    pos = 0
    s = s.rstrip()
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if m is None:
            break
        num, ident, op = m.groups()
        if num is not None:
            tokens.append(("num", int(num)))
        elif ident is not None:
            tokens.append(("id", ident))
        elif op is not None:
            if op not in "+-*/^()":
                raise ValueError(f"unexpected character {op!r} in {s!r}")
            tokens.append(("op", op))
        pos = m.end()
    return tokens


def _split_identifier(ident: str, known: Sequence[str]) -> list[str]:
    """Greedy longest-match split of a run like ``x_0y_1`` into known names."""
    if ident in known:
        return [ident]
    names = sorted(known, key=len, reverse=True)
    out, rest = [], ident
    while rest:
        for name in names:
            if rest.startswith(name):
                out.append(name)
                rest = rest[len(name):]
                break
        else:
            raise ValueError(f"unknown variable {ident!r}; variables are {tuple(known)}")
    return out


class _Parser:
    def __init__(self, tokens, variables, domain):
        self.tokens = tokens
        self.i = 0
        self.variables = variables
        self.domain = domain

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect_int(self):
        tok = self.take()
        if tok is None or tok[0] != "num":
            raise ValueError("expected an integer")
        return tok[1]

    def expr(self):
        sign = 1
        tok = self.peek()
        if tok in (("op", "+"), ("op", "-")):
            self.take()
            sign = -1 if tok[1] == "-" else 1
        acc = self.term().scalar(sign)
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            t = self.term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term(self):
        acc = self.factor()
        while True:
            tok = self.peek()
            if tok == ("op", "*"):
                self.take()
                acc = acc * self.factor()
            elif tok == ("op", "/"):
                self.take()
                acc = acc.scalar(self.domain.inv(self.domain.coerce(self.expect_int())))
            elif tok is not None and (tok[0] in ("num", "id") or tok == ("op", "(")):
                acc = acc * self.factor()
            else:
                return acc

    def factor(self):
        tok = self.take()
        if tok is None:
            raise ValueError("unexpected end of polynomial")
        kind, val = tok
        if kind == "num":
            base = Poly.const(val, self.variables, self.domain)
        elif kind == "id":
            names = _split_identifier(val, self.variables)
            base = Poly.const(1, self.variables, self.domain)
            for name in names[:-1]:
                base = base * Poly.var(name, self.variables, self.domain)
            last = Poly.var(names[-1], self.variables, self.domain)
            if self.peek() == ("op", "^"):
                self.take()
                last = last ** self.expect_int()
            return base * last
        elif tok == ("op", "("):
            base = self.expr()
            if self.take() != ("op", ")"):
                raise ValueError("unbalanced parenthesis")
        else:
            raise ValueError(f"unexpected token {val!r}")
        if self.peek() == ("op", "^"):
            self.take()
            base = base ** self.expect_int()
        return base


def parse_poly(s: str, variables: Sequence[str] | None = None, domain: Domain = QQ) -> Poly:
    """Parse the documented polynomial grammar.

    Without ``variables`` the identifiers are taken in order of first
    appearance.
    """
    tokens = _tokenize(s)
    if variables is None:
        seen = []
        for kind, val in tokens:
            if kind == "id" and val not in seen:
                seen.append(val)
        variables = seen
    parser = _Parser(tokens, tuple(variables), domain)
    if not tokens:
        raise ValueError("empty polynomial string")
    result = parser.expr()
    if parser.peek() is not None:
        raise ValueError(f"trailing input in {s!r}")
    return result


# -- truncated series ------------------------------------------------------


class TruncatedSeries:
    """A power series in t known modulo t^(precision+1); coefficients are Polys."""

    __slots__ = ("precision", "coeffs")

    def __init__(self, coeffs: Sequence[Poly], precision: int | None = None):
        coeffs = list(coeffs)
        if not coeffs:
            raise ValueError("a series needs at least one coefficient")
        if precision is None:
            precision = len(coeffs) - 1
        if len(coeffs) < precision + 1:
            zero = coeffs[0] * 0
            coeffs += [zero] * (precision + 1 - len(coeffs))
        self.precision = precision
        self.coeffs = coeffs[: precision + 1]

    def truncate(self, n: int) -> TruncatedSeries:
        if n > self.precision:
            raise PrecisionTooLow(f"series known to t^{self.precision}, asked for t^{n}")
        return TruncatedSeries(self.coeffs[: n + 1], n)

    def __add__(self, other: TruncatedSeries) -> TruncatedSeries:
        n = min(self.precision, other.precision)
        return TruncatedSeries([a + b for a, b in zip(self.coeffs[: n + 1], other.coeffs)], n)

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return TruncatedSeries([c * other for c in self.coeffs], self.precision)
        n = min(self.precision, other.precision)
        zero = self.coeffs[0] * 0
        out = [zero] * (n + 1)
        for i in range(n + 1):
            a = self.coeffs[i]
            if a.is_zero():
                continue
            for j in range(n + 1 - i):
                b = other.coeffs[j]
                if not b.is_zero():
                    out[i + j] = out[i + j] + a * b
        return TruncatedSeries(out, n)

    def __eq__(self, other):
        return (isinstance(other, TruncatedSeries) and self.precision == other.precision
                and self.coeffs == other.coeffs)

    def order(self) -> int | None:
        """Index of the first nonzero coefficient, None if all vanish."""
        for j, c in enumerate(self.coeffs):
            if not c.is_zero():
                return j
        return None

    def __repr__(self):
        return f"TruncatedSeries([{', '.join(str(c) for c in self.coeffs)}])"


def series_substitute(f: Poly, args: Sequence[TruncatedSeries], n: int) -> TruncatedSeries:
    """Expand f(args) modulo t^(n+1)."""
    if len(args) != len(f.variables):
        raise ValueError(f"{f.variables} needs {len(f.variables)} series, got {len(args)}")
    if not args:
        return TruncatedSeries([Poly.const(f.constant_term(), (), f.domain)], n)
    for a in args:
        if a.precision < n:
            raise PrecisionTooLow(f"argument known to t^{a.precision}, need t^{n}")
    args = [a.truncate(n) for a in args]
    ring_vars = args[0].coeffs[0].variables
    for a in args:
        for c in a.coeffs:
            if c.domain != f.domain:
                raise DomainMismatch(f"series over {c.domain} cannot feed a polynomial over {f.domain}")
            if c.variables != ring_vars:
                raise DomainMismatch("series coefficients use different variable sets")
    one = TruncatedSeries([Poly.const(1, ring_vars, f.domain)], n)
    powers: list[list[TruncatedSeries]] = [[one] for _ in args]

    def power(i, k):
        cache = powers[i]
        while len(cache) <= k:
            cache.append(cache[-1] * args[i])
        return cache[k]

    total = TruncatedSeries([Poly(ring_vars, {}, f.domain)], n)
    for e, c in f.sorted_terms():
        term = None
        for i, k in enumerate(e):
            if k:
                term = power(i, k) if term is None else term * power(i, k)
        if term is None:
            term = one
        total = total + term * c
    return total


# -- ideals ----------------------------------------------------------------


@dataclass(frozen=True)
class Ideal:
    """An ideal given by generators in a shared variable list.

    An empty generator list is the zero ideal.
    """

    gens: tuple[Poly, ...]
    variables: tuple[str, ...]

    def __post_init__(self):
        for g in self.gens:
            if g.variables != self.variables:
                raise DomainMismatch(f"generator {g} is not over {self.variables}")

    @classmethod
    def from_polys(cls, gens: Iterable[Poly], variables: Sequence[str] | None = None) -> Ideal:
        gens = [g for g in gens if not g.is_zero()]
        if variables is None:
            if not gens:
                raise ValueError("variables are required for the zero ideal")
            variables = gens[0].variables
        variables = tuple(variables)
        return cls(tuple(g.with_variables(variables) for g in gens), variables)

    @classmethod
    def parse(cls, gens: Iterable[str], variables: Sequence[str], domain: Domain = QQ) -> Ideal:
        return cls.from_polys([parse_poly(g, variables, domain) for g in gens], variables)

    @property
    def domain(self) -> Domain:
        return self.gens[0].domain if self.gens else QQ

    def is_zero(self) -> bool:
        return not self.gens

    def is_unit(self) -> bool:
        """True when some generator is a nonzero constant."""
        return any(g.is_constant() for g in self.gens)

    def is_monomial(self) -> bool:
        return all(g.is_monomial() for g in self.gens)

    def is_principal(self) -> bool:
        return len(self.gens) == 1

    def strings(self) -> list[str]:
        return [str(g) for g in self.gens]

    def __str__(self):
        return "(" + ", ".join(self.strings()) + ")"


def ideal_power(a: Ideal, l: int) -> Ideal:
    if l < 1:
        raise ValueError("ideal powers need l >= 1")
    out: list[Poly] = []
    for combo in itertools.combinations_with_replacement(range(len(a.gens)), l):
        g = a.gens[combo[0]]
        for i in combo[1:]:
            g = g * a.gens[i]
        if not g.is_zero() and g not in out:
            out.append(g)
    return Ideal(tuple(out), a.variables)


def monomial_membership_check(a: Ideal, b: Ideal) -> bool:
    """Whether a is contained in b, for monomial ideals only."""
    for name, ideal in (("first", a), ("second", b)):
        if not ideal.is_monomial():
            raise NotMonomial(f"the {name} ideal {ideal} is not monomial; assert containment instead")
    if a.variables != b.variables:
        raise DomainMismatch("ideals live in different variable sets")
    return all(any(h.divides(g) for h in b.gens) for g in a.gens)
