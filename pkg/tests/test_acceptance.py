"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v`` or as a script.
"""

from __future__ import annotations

import random
import sys
import time
from fractions import Fraction

import pytest

from jetlog.counting import (
    CountQuery, bundle_ratio_check, count_points, jet_dimension_table, linear_bound_check,
)
from jetlog.fixture import load_fixture
from jetlog.grothendieck import NEG_INFINITY, MotivicElement
from jetlog.jets import AffineScheme, ContactCondition, PairSpec, jet_equations
from jetlog.resolution import lct, main_theorem_check, measure_level_set, s_dim, s_element, transformation_check
from jetlog.symbolic import Ideal

import acceptance_log
from generators import random_element, random_resolution


def report(number: int, title: str, ok: bool, seconds: float, detail: str = ""):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({seconds:.2f} s){' - ' + detail if detail else ''}"
    acceptance_log.LINES.append(line)
    print(line)


def test_criterion_1_transformation_rule_point():
    t0 = time.perf_counter()
    fx = load_fixture("point")
    rep = transformation_check(fx.pair, fx.resolution, 4, [2, 3, 5])
    expected = all(r.downstairs == Fraction(r.prime ** 2 - 1, r.prime ** (2 * r.m)) for r in rep.rows)
    elapsed = time.perf_counter() - t0
    ok = rep.holds and expected and len(rep.rows) == 15 and elapsed < 10
    report(1, "blow-up transformation rule, m <= 4, q in {2,3,5}", ok, elapsed,
           f"{sum(r.equal for r in rep.rows)}/{len(rep.rows)} rows equal")
    assert ok


def test_criterion_2_thresholds():
    t0 = time.perf_counter()
    point_lct = lct(load_fixture("point").resolution)
    cusp_fx = load_fixture("cusp")
    cusp_lct = lct(cusp_fx.resolution)
    pair = PairSpec.smooth(cusp_fx.require_scheme(), q=Fraction(1, 2))
    table = jet_dimension_table(pair, 6, 0, [5, 7, 11, 13])
    below = main_theorem_check(pair, cusp_fx.resolution, table, n_max=6)
    above = main_theorem_check(pair.replace(q=Fraction(1)), cusp_fx.resolution, table, n_max=6)
    violations = [r.n for r in above.violations()]
    elapsed = time.perf_counter() - t0
    ok = (point_lct == 2 and cusp_lct == Fraction(5, 6) and below.holds and bool(violations)
          and min(violations) <= 11 and elapsed < 120)
    report(2, "lct 2 and 5/6; cusp KLT at q=1/2 (n<=6), violation at q=1", ok, elapsed,
           f"lct(point)={point_lct}, lct(cusp)={cusp_lct}, first violation n={min(violations, default=None)}")
    assert ok


def test_criterion_3_s_dim_consistency():
    t0 = time.perf_counter()
    rng = random.Random(20261015)
    mismatches = 0
    for _ in range(100):
        data = random_resolution(rng, max_s=3, max_y=4, max_z=4)
        q = Fraction(rng.randint(0, 12), rng.randint(1, 4))
        e, n = rng.randint(0, 8), rng.randint(0, 8)
        if s_dim(data, q, e, n) != s_element(data, q, e, n).dim():
            mismatches += 1
    elapsed = time.perf_counter() - t0
    report(3, "s_dim equals dim(s_element) on 100 random data", mismatches == 0, elapsed,
           f"{mismatches} mismatches")
    assert mismatches == 0


def test_criterion_4_axes_level_sets():
    t0 = time.perf_counter()
    data = load_fixture("node").resolution
    a2 = AffineScheme.affine_space(2)
    x, y = Ideal.parse(["x"], a2.variables), Ideal.parse(["y"], a2.variables)
    failures = []
    checked = 0
    for m1 in range(4):
        for m2 in range(4 - m1):
            n = max(m1, m2)
            conds = (ContactCondition(x, m1), ContactCondition(y, m2))
            for q in (3, 5, 7):
                count = count_points(CountQuery(jet_equations(a2, n), conds, q))
                lhs = measure_level_set(data, [m1, m2]).specialize(q)
                checked += 1
                if lhs != Fraction(count, q ** (n * a2.dim)):
                    failures.append((m1, m2, q))
    elapsed = time.perf_counter() - t0
    report(4, "axes level-set measures vs counts, m1+m2 <= 3, q in {3,5,7}", not failures, elapsed,
           f"{checked - len(failures)}/{checked} equal")
    assert not failures


def test_criterion_5_cone_bundle_ratio():
    t0 = time.perf_counter()
    pair = load_fixture("cone").pair
    bad = []
    rows = 0
    for e in range(3):
        for q in (3, 5):
            rep = bundle_ratio_check(pair, e, range(2 * e, 6), q)
            for r in rep.rows:
                rows += 1
                if r.ratio != q ** 2:
                    bad.append((e, r.n, q, r.ratio))
    elapsed = time.perf_counter() - t0
    report(5, "cone ratio q^2 for n >= 2e, e <= 2, n <= 5, q in {3,5}", not bad, elapsed,
           f"{rows - len(bad)}/{rows} rows at q^2")
    assert not bad


def test_criterion_6_cusp_linear_bound():
    t0 = time.perf_counter()
    cusp = load_fixture("cusp").require_scheme()
    rep = linear_bound_check(cusp, 0, 4, [5, 7, 11, 13])
    dims = [rep.dims[n].dim for n in range(5)]
    elapsed = time.perf_counter() - t0
    ok = rep.holds and rep.slope < 2
    report(6, "cusp dim L_n <= n+1 for n <= 4, slope < 2", ok, elapsed, f"dims {dims}, slope {rep.slope}")
    assert ok


def test_criterion_7_grothendieck_properties():
    t0 = time.perf_counter()
    rng = random.Random(7)
    failures = 0
    elements = 0
    zero, one = MotivicElement.zero(), MotivicElement.one()
    for _ in range(200):
        a, b, c = (random_element(rng) for _ in range(3))
        ai, bi = (random_element(rng, integral=True) for _ in range(2))
        elements += 5
        checks = [
            a + b == b + a, a * b == b * a, (a + b) + c == a + (b + c), (a * b) * c == a * (b * c),
            a * (b + c) == a * b + a * c, a + zero == a, a * one == a, a - a == zero,
            (a + b).dim() <= max(a.dim(), b.dim()),
            a.dim() == b.dim() or (a + b).dim() == max(a.dim(), b.dim()),
            (a * b).dim() == (a.dim() + b.dim() if a and b else NEG_INFINITY),
        ]
        for q in (2, 3, 5):
            checks.append((ai + bi).specialize(q) == ai.specialize(q) + bi.specialize(q))
            checks.append((ai * bi).specialize(q) == ai.specialize(q) * bi.specialize(q))
        failures += checks.count(False)
    elapsed = time.perf_counter() - t0
    ok = failures == 0 and elements >= 500 and elapsed < 5
    report(7, f"Grothendieck ring properties on {elements} random elements", ok, elapsed, f"{failures} failures")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
