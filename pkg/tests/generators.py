"""Random instances shared by the property and acceptance suites."""

from __future__ import annotations

import random
from fractions import Fraction

from jetlog.grothendieck import ClassSymbol, MotivicElement
from jetlog.resolution import Divisor, ResolutionData, subsets

SYMBOLS = (
    ClassSymbol("P1", 1, (1, 1)),
    ClassSymbol("Gm", 1, (-1, 1)),
    ClassSymbol("P2", 2, (1, 1, 1)),
    ClassSymbol("F", 0, (3,)),
)


def random_element(rng: random.Random, *, max_terms=4, integral=False, max_exp=3) -> MotivicElement:
    terms = {}
    for _ in range(rng.randint(0, max_terms)):
        mono = tuple(rng.choice(SYMBOLS) for _ in range(rng.randint(0, 2)))
        if integral:
            exp = Fraction(rng.randint(-max_exp, max_exp))
        else:
            exp = Fraction(rng.randint(-2 * max_exp, 2 * max_exp), rng.choice((1, 2, 3)))
        terms[(mono, exp)] = terms.get((mono, exp), 0) + rng.randint(-3, 3)
    return MotivicElement(terms)


def random_resolution(rng: random.Random, *, max_s=3, max_y=4, max_z=4) -> ResolutionData:
    s = rng.randint(0, max_s)
    d = rng.randint(max(s, 1), 3)
    r = rng.choice((1, 1, 2))
    divisors = []
    for i in range(s):
        y, z = rng.randint(0, max_y), rng.randint(0, max_z)
        if y == 0 and z == 0:
            y = 1
        divisors.append(Divisor(y, Fraction(rng.randint(-r, 4 * r), r), z, f"D{i}"))
    strata = {}
    for J in subsets(s):
        top = d - len(J)
        # effective classes: positive leading coefficient, so sums never cancel at the top
        el = MotivicElement.lefschetz(top) * rng.randint(1, 3)
        for k in range(top):
            el = el + MotivicElement.lefschetz(k) * rng.randint(-2, 2)
        if J and rng.random() < 0.2:
            el = MotivicElement.zero()
        strata[frozenset(J)] = el
    return ResolutionData(d, divisors, strata, r=r)
