"""Small finite fields F_q for point counting.

Elements are plain ints in ``range(q)``. For a prime power q = p^k an
element encodes its coefficient vector over F_p in base p, so the prime
subfield is exactly ``range(p)`` and integers embed by reduction mod p.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def next_prime(n: int) -> int:
    """Smallest prime strictly greater than n."""
    c = max(n + 1, 2)
    while not is_prime(c):
        c += 1
    return c


def prime_power(q: int) -> tuple[int, int]:
    """Return (p, k) with q == p**k, or raise ValueError."""
    if q < 2:
        raise ValueError(f"field size must be >= 2, got {q}")
    for p in range(2, q + 1):
        if q % p == 0:
            k, m = 0, q
            while m % p == 0:
                m //= p
                k += 1
            if m != 1:
                raise ValueError(f"{q} is not a prime power")
            return p, k
    raise AssertionError("unreachable")


def _polymod(a: list[int], m: list[int], p: int) -> list[int]:
    a = a[:]
    while len(a) >= len(m):
        c = a[-1]
        if c:
            shift = len(a) - len(m)
            for i, mc in enumerate(m):
                a[shift + i] = (a[shift + i] - c * mc) % p
        a.pop()
    return a


def _irreducible(p: int, k: int) -> list[int]:
    # monic, ascending coefficients; irreducible iff no monic factor of degree <= k/2
    for tail in itertools.product(range(p), repeat=k):
        cand = list(tail) + [1]
        if cand[0] == 0:
            continue
        ok = True
        for deg in range(1, k // 2 + 1):
            for ftail in itertools.product(range(p), repeat=deg):
                if not any(_polymod(cand, list(ftail) + [1], p)):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return cand
    raise AssertionError(f"no irreducible polynomial of degree {k} over F_{p}")


class FiniteField:
    """The field with q elements."""

    def __init__(self, q: int):
        self.q = q
        self.p, self.k = prime_power(q)
        if self.k > 1:
            self._build_tables()

    def __repr__(self):
        return f"FiniteField({self.q})"

    def __reduce__(self):
        return (field, (self.q,))

    @property
    def elements(self) -> range:
        return range(self.q)

    def _to_vec(self, a):
        v = []
        for _ in range(self.k):
            v.append(a % self.p)
            a //= self.p
        return v

    def _from_vec(self, v):
        a = 0
        for c in reversed(v):
            a = a * self.p + c
        return a

    def _build_tables(self):
        p, q = self.p, self.q
        modulus = _irreducible(p, self.k)
        vecs = [self._to_vec(a) for a in range(q)]
        self._add = [[self._from_vec([(x + y) % p for x, y in zip(vecs[a], vecs[b])])
                      for b in range(q)] for a in range(q)]
        mul = [[0] * q for _ in range(q)]
        for a in range(q):
            for b in range(a, q):
                prod = [0] * (2 * self.k - 1)
                for i, x in enumerate(vecs[a]):
                    if x:
                        for j, y in enumerate(vecs[b]):
                            prod[i + j] = (prod[i + j] + x * y) % p
                red = _polymod(prod, modulus, p) + [0] * self.k
                mul[a][b] = mul[b][a] = self._from_vec(red[: self.k])
        self._mul = mul
        self._neg = [self._from_vec([(-x) % p for x in vecs[a]]) for a in range(q)]
        self._inv = [0] * q
        for a in range(1, q):
            for b in range(1, q):
                if mul[a][b] == 1:
                    self._inv[a] = b
                    break

    def add(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a + b) % self.p
        return self._add[a][b]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.k == 1:
            return a * b % self.p
        return self._mul[a][b]

    def neg(self, a: int) -> int:
        if self.k == 1:
            return -a % self.p
        return self._neg[a]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in a finite field")
        if self.k == 1:
            return pow(a, -1, self.p)
        return self._inv[a]

    def pow(self, a: int, e: int) -> int:
        if self.k == 1:
            return pow(a, e, self.p)
        result, base = 1, a
        while e:
            if e & 1:
                result = self._mul[result][base]
            base = self._mul[base][base]
            e >>= 1
        return result

    def coerce(self, c) -> int:
        """Map an integer or rational into the prime subfield."""
        if isinstance(c, Fraction):
            num = c.numerator % self.p
            den = c.denominator % self.p
            if den == 0:
                raise ZeroDivisionError(f"{c} has no image in F_{self.q}")
            return num * pow(den, -1, self.p) % self.p
        return int(c) % self.p


@lru_cache(maxsize=None)
def field(q: int) -> FiniteField:
    return FiniteField(q)
