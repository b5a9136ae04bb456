"""Exact finite-field point counts of jet systems, and what they tell us.

The counter works on polynomial systems over F_q by a pruned search:

* an equation ``c*v + f`` with c a nonzero constant and v absent from f is
  used to eliminate v (a bijection, so the count is unchanged);
* otherwise a variable of the smallest remaining equation is branched on,
  trying only the roots when that equation is univariate;
* a nonzero constant equation kills the branch, and variables that no longer
  occur contribute a factor q each.

Jet equations are graded by level, so this prunes exactly the way level-wise
enumeration with early abort does, while collapsing the affine-linear fibres
over smooth points in one step.
"""

from __future__ import annotations

import itertools
import logging
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .errors import BudgetExceeded, StabilityViolation
from .finite_field import FiniteField, next_prime
from .finite_field import field as finite_field
from .grothendieck import NEG_INFINITY
from .jets import (AffineScheme, AtLeast, ContactCondition, JetSystem, PairSpec, Stratum, generator_series,
                   jet_equations, jet_variables, stratum_conditions)
from .symbolic import Poly

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10 ** 9


def default_budget() -> int:
    env = os.environ.get("JETLOG_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


# -- sparse polynomials over F_q ------------------------------------------------
# A polynomial is a dict {monomial: coefficient}; a monomial is a sorted tuple
# of (variable index, exponent) pairs and () is the constant monomial.


def _variables_of(poly: dict) -> set[int]:
    out = set()
    for mono in poly:
        for v, _e in mono:
            out.add(v)
    return out


def _mono_mul(m1: tuple, m2: tuple) -> tuple:
    if not m1:
        return m2
    if not m2:
        return m1
    d = dict(m1)
    for v, e in m2:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


class _Engine:
    def __init__(self, fld: FiniteField, budget: int, required: int | None = None):
        self.fld = fld
        self.q = fld.q
        self.budget = budget
        self.required = required
        self.nodes = 0
        if fld.k == 1:
            p = fld.p
            self.add = lambda a, b: (a + b) % p
            self.mul = lambda a, b: a * b % p
        else:
            self.add, self.mul = fld.add, fld.mul

    # polynomial helpers

    def _accumulate(self, out: dict, mono: tuple, c: int):
        s = self.add(out.get(mono, 0), c)
        if s:
            out[mono] = s
        else:
            out.pop(mono, None)

    def poly_mul(self, a: dict, b: dict) -> dict:
        out: dict = {}
        for m1, c1 in a.items():
            for m2, c2 in b.items():
                self._accumulate(out, _mono_mul(m1, m2), self.mul(c1, c2))
        return out

    def subst_value(self, poly: dict, v: int, a: int) -> dict:
        out: dict = {}
        powers = {}
        for mono, c in poly.items():
            for idx, (var, e) in enumerate(mono):
                if var == v:
                    if e not in powers:
                        powers[e] = self.fld.pow(a, e)
                    c = self.mul(c, powers[e])
                    if not c:
                        break
                    self._accumulate(out, mono[:idx] + mono[idx + 1:], c)
                    break
            else:
                self._accumulate(out, mono, c)
        return out

    def subst_poly(self, poly: dict, v: int, expr: dict) -> dict:
        out: dict = {}
        powers = {1: expr}
        for mono, c in poly.items():
            for idx, (var, e) in enumerate(mono):
                if var == v:
                    rest = mono[:idx] + mono[idx + 1:]
                    for m2, c2 in self._power(expr, e, powers).items():
                        self._accumulate(out, _mono_mul(rest, m2), self.mul(c, c2))
                    break
            else:
                self._accumulate(out, mono, c)
        return out

    def _power(self, expr, k, powers):
        if k not in powers:
            powers[k] = self.poly_mul(self._power(expr, k - 1, powers), expr)
        return powers[k]

    # search

    def _linear_candidate(self, eqs: list[dict]):
        for i, eq in enumerate(eqs):
            occurrences: dict[int, int] = {}
            linear: dict[int, int] = {}
            for mono, c in eq.items():
                for var, e in mono:
                    occurrences[var] = occurrences.get(var, 0) + 1
                if len(mono) == 1 and mono[0][1] == 1:
                    linear[mono[0][0]] = c
            best = None
            for var, c in linear.items():
                if occurrences[var] == 1 and (best is None or var > best):
                    best = var
            if best is not None:
                return i, best, linear[best]
        return None

    def reduce(self, eqs: list[dict], nleft: int):
        """Apply linear eliminations; returns (eqs, nleft) or None for an empty set."""
        while eqs:
            found = self._linear_candidate(eqs)
            if found is None:
                break
            i, v, c = found
            eq = eqs[i]
            scale = self.fld.neg(self.fld.inv(c))
            expr = {m: self.mul(k, scale) for m, k in eq.items() if m != ((v, 1),)}
            new = []
            for j, other in enumerate(eqs):
                if j == i:
                    continue
                if any(var == v for mono in other for var, _e in mono):
                    other = self.subst_poly(other, v, expr)
                    if not other:
                        continue
                    if len(other) == 1 and () in other:
                        return None
                new.append(other)
            eqs = new
            nleft -= 1
        return eqs, nleft

    def branch_plan(self, eqs: list[dict]):
        """Pick the branching variable and its candidate values."""
        best_eq, best_vars = None, None
        for eq in eqs:
            vs = _variables_of(eq)
            if best_vars is None or len(vs) < len(best_vars):
                best_eq, best_vars = eq, vs
                if len(vs) == 1:
                    break
        v = min(best_vars)
        if len(best_vars) == 1:
            values = []
            for a in self.fld.elements:
                self._tick()
                if not self.subst_value(best_eq, v, a):
                    values.append(a)
            return v, values, True
        return v, list(self.fld.elements), False

    def _tick(self):
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceeded(f"search exceeded the budget of {self.budget} candidate evaluations"
                                 + (f"; naive enumeration needs {self.required}" if self.required else ""),
                                 required=self.required)

    def assign(self, eqs: list[dict], v: int, a: int):
        new = []
        for eq in eqs:
            e2 = self.subst_value(eq, v, a)
            if not e2:
                continue
            if len(e2) == 1 and () in e2:
                return None
            new.append(e2)
        return new

    def solve(self, eqs: list[dict], nleft: int) -> int:
        reduced = self.reduce(eqs, nleft)
        if reduced is None:
            return 0
        eqs, nleft = reduced
        if not eqs:
            return self.q ** nleft
        v, values, presolved = self.branch_plan(eqs)
        total = 0
        for a in values:
            if not presolved:
                self._tick()
            new = self.assign(eqs, v, a)
            if new is not None:
                total += self.solve(new, nleft - 1)
        return total


def _solve_branch(args):
    q, budget, eqs, nleft, v, a = args
    eng = _Engine(finite_field(q), budget)
    new = eng.assign(eqs, v, a)
    if new is None:
        return 0, eng.nodes
    return eng.solve(new, nleft - 1), eng.nodes


def count_system(polys: Sequence[Poly], variables: Sequence[str], q: int, *, budget: int | None = None,
                 workers: int = 1) -> int:
    """Number of F_q-points of V(polys) in the affine space on ``variables``."""
    fld = finite_field(q)
    budget = default_budget() if budget is None else budget
    index = {v: i for i, v in enumerate(variables)}
    eqs = []
    for f in polys:
        d: dict = {}
        for exps, c in f.terms.items():
            mono = tuple(sorted((index[f.variables[i]], k) for i, k in enumerate(exps) if k))
            c = fld.coerce(c)
            if c:
                d[mono] = fld.add(d.get(mono, 0), c)
                if not d[mono]:
                    del d[mono]
        if not d:
            continue
        if len(d) == 1 and () in d:
            return 0
        eqs.append(d)
    eng = _Engine(fld, budget, required=q ** len(variables))
    nleft = len(variables)
    if workers <= 1:
        return eng.solve(eqs, nleft)
    reduced = eng.reduce(eqs, nleft)
    if reduced is None:
        return 0
    eqs, nleft = reduced
    if not eqs:
        return q ** nleft
    v, values, presolved = eng.branch_plan(eqs)
    tasks = [(q, budget - eng.nodes, eqs, nleft, v, a) for a in values]
    total = 0
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for count, nodes in pool.map(_solve_branch, tasks):
            total += count
            eng.nodes += nodes
    if eng.nodes > budget:
        raise BudgetExceeded(f"search exceeded the budget of {budget} candidate evaluations",
                             required=q ** len(variables))
    return total


# -- queries ------------------------------------------------------------------


@dataclass(frozen=True)
class CountQuery:
    system: JetSystem
    conditions: tuple[ContactCondition, ...] = ()
    field_size: int = 2

    def __post_init__(self):
        if self.field_size < 2:
            raise ValueError("field size must be at least 2")
        for c in self.conditions:
            if c.ideal.variables != self.system.base.variables:
                raise ValueError("condition ideals must use the base variables of the jet system")


def _at_least_equations(cond_ideal, m: int, level: int) -> list[Poly]:
    if m > level + 1:
        raise ValueError(f"order >= {m} is not visible on jets of level {level}")
    series = generator_series(cond_ideal, level)
    return [coeffs[j] for coeffs in series for j in range(m)]


def _condition_systems(system: JetSystem, conditions: Sequence[ContactCondition]):
    """Expand exact orders by inclusion-exclusion into (sign, equations) pairs."""
    base = list(system.equations)
    fixed = []
    exact = []
    for c in conditions:
        if c.exact:
            if c.order > system.level:
                raise ValueError(f"exact order {c.order} is not visible on jets of level {system.level}")
            exact.append(c)
        else:
            fixed += _at_least_equations(c.ideal, int(c.order.bound), system.level)
    for bumps in itertools.product((0, 1), repeat=len(exact)):
        eqs = base + fixed
        for c, b in zip(exact, bumps):
            eqs = eqs + _at_least_equations(c.ideal, c.order + b, system.level)
        yield (-1) ** sum(bumps), eqs


def count_points(query: CountQuery, *, budget: int | None = None, workers: int = 1) -> int:
    """Exact number of F_q-points of the jet system satisfying every condition."""
    total = 0
    for sign, eqs in _condition_systems(query.system, query.conditions):
        total += sign * count_system(eqs, query.system.variables, query.field_size, budget=budget,
                                     workers=workers)
    return total


def count_stratum(stratum: Stratum, q: int, *, budget: int | None = None, workers: int = 1) -> int:
    """Number of level-n jets in a stratum, with the lift fibre divided out."""
    system = jet_equations(stratum.ambient, stratum.count_level)
    raw = count_points(CountQuery(system, stratum.conditions, q), budget=budget, workers=workers)
    fibre = q ** (stratum.ambient.ambient_dim * stratum.lift)
    if raw % fibre:
        raise ArithmeticError(f"lifted count {raw} is not a multiple of the fibre size {fibre}")
    return raw // fibre


# -- dimension by interpolation ------------------------------------------------


def interpolate(xs: Sequence[int], ys: Sequence[int]) -> list[Fraction]:
    """Coefficients (ascending) of the interpolating polynomial of degree < len(xs)."""
    n = len(xs)
    coef = [Fraction(y) for y in ys]
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    poly = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        # poly = poly * (x - xs[i]) + coef[i]
        shifted = [Fraction(0)] + poly[:-1]
        poly = [s - xs[i] * p for s, p in zip(shifted, poly)]
        poly[0] += coef[i]
    while len(poly) > 1 and poly[-1] == 0:
        poly.pop()
    return poly


def poly_value(coeffs: Sequence, x):
    total = 0
    for c in reversed(coeffs):
        total = total * x + c
    return total


@dataclass
class DimEstimate:
    dim: int | float
    count_polynomial: tuple[int, ...] | None
    primes_used: list[int]
    consistent: bool
    counts: dict[int, int] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"dim": self.dim if self.dim != NEG_INFINITY else "-inf",
                "poly": list(self.count_polynomial) if self.count_polynomial is not None else None,
                "primes": self.primes_used, "consistent": self.consistent}


def fit_count_polynomial(counter: Callable[[int], int], primes: Sequence[int], *, held_out: int | None = None,
                         extend: bool = True, max_primes: int = 16) -> DimEstimate:
    """Interpolate point counts over primes and confirm on a held-out prime.

    When the held-out prime disagrees (or the fit has non-integer
    coefficients) and ``extend`` is set, the held-out prime joins the fit
    and the next prime is held out, up to ``max_primes`` fitted primes.
    """
    used = sorted(set(primes))
    if len(used) < 3:
        raise ValueError("dimension estimates need at least three primes")
    counts = {p: counter(p) for p in used}
    while True:
        fit = interpolate(used, [counts[p] for p in used])
        held = held_out if held_out is not None and held_out not in used else next_prime(max(used))
        held_out = None
        counts[held] = counter(held)
        integral = all(c.denominator == 1 for c in fit)
        if integral and poly_value(fit, held) == counts[held]:
            coeffs = tuple(int(c) for c in fit)
            dim = len(coeffs) - 1 if any(coeffs) else NEG_INFINITY
            return DimEstimate(dim, coeffs, used + [held], True, dict(sorted(counts.items())))
        if not extend or len(used) >= max_primes:
            everything = sorted(counts)
            best = interpolate(everything, [counts[p] for p in everything])
            dim = len(best) - 1 if any(best) else NEG_INFINITY
            warnings.warn(f"point counts over {everything} are not confirmed polynomial; "
                          f"best-fit degree {dim}")
            return DimEstimate(dim, None, used + [held], False, dict(sorted(counts.items())))
        used = sorted(used + [held])


def estimate_dimension(system: JetSystem, conditions: Sequence[ContactCondition], primes: Sequence[int], *,
                       budget: int | None = None, workers: int = 1, **kwargs) -> DimEstimate:
    def counter(p):
        return count_points(CountQuery(system, tuple(conditions), p), budget=budget, workers=workers)
    return fit_count_polynomial(counter, primes, **kwargs)


def estimate_stratum_dimension(stratum: Stratum, primes: Sequence[int], *, budget: int | None = None,
                               workers: int = 1, **kwargs) -> DimEstimate:
    return fit_count_polynomial(lambda p: count_stratum(stratum, p, budget=budget, workers=workers),
                                primes, **kwargs)


def jet_dimension_table(pair: PairSpec, n_max: int, e_max: int, primes: Sequence[int], *,
                        budget: int | None = None, workers: int = 1) -> dict[tuple[int, int], DimEstimate]:
    """dim L_n^e(lY) for every (e, n) with n >= theta*e inside the bounds."""
    table = {}
    for e in range(e_max + 1):
        for n in range(pair.theta * e, n_max + 1):
            if e > 0 and pair.smooth_ambient:
                table[(e, n)] = DimEstimate(NEG_INFINITY, (0,), [], True)
                continue
            stratum = stratum_conditions(pair, n, e)
            table[(e, n)] = estimate_stratum_dimension(stratum, primes, budget=budget, workers=workers)
            log.info("dim L_%d^%d = %s", n, e, table[(e, n)].dim)
    return table


# -- empirical checks ----------------------------------------------------------


@dataclass
class BundleRow:
    n: int
    count_n: int | None
    count_next: int | None
    ratio: Fraction | None
    in_regime: bool
    ok: bool | None


@dataclass
class BundleReport:
    e: int
    q: int
    d: int
    theta: int
    rows: list[BundleRow]

    @property
    def holds(self) -> bool:
        return all(r.ok for r in self.rows if r.in_regime)

    def to_json(self) -> dict:
        return {"e": self.e, "q": self.q, "expected_ratio": self.q ** self.d, "theta": self.theta,
                "rows": [{"n": r.n, "count_n": r.count_n, "count_n_plus_1": r.count_next,
                          "ratio": None if r.ratio is None else str(r.ratio), "in_regime": r.in_regime,
                          "ok": r.ok} for r in self.rows],
                "holds": self.holds}


def bundle_ratio_check(pair: PairSpec, e: int, n_range: Sequence[int], q: int, *, budget: int | None = None,
                       workers: int = 1, lift: bool = True) -> BundleReport:
    """Compare #pi_{n+1}(A_e) with q^d * #pi_n(A_e) along a range of levels."""
    cache: dict[int, int | None] = {}

    def count(n):
        if n not in cache:
            try:
                st = stratum_conditions(pair, n, e, y_order=None, force=True, lift=lift)
            except StabilityViolation:
                cache[n] = None
            else:
                cache[n] = count_stratum(st, q, budget=budget, workers=workers)
        return cache[n]

    rows = []
    for n in n_range:
        in_regime = n >= pair.theta * e
        a, b = count(n), count(n + 1)
        ratio = Fraction(b, a) if a and b is not None else None
        ok = (b == q ** pair.d * a) if in_regime else None
        rows.append(BundleRow(n, a, b, ratio, in_regime, ok))
    return BundleReport(e, q, pair.d, pair.theta, rows)


@dataclass
class LinearBoundReport:
    d_prime: int
    d: int
    dims: dict[int, DimEstimate]
    slope: Fraction | None

    def bound_ok(self, n: int) -> bool:
        return self.dims[n].dim <= (n + 1) * self.d_prime

    @property
    def slope_ok(self) -> bool:
        return self.slope is None or self.slope < self.d

    @property
    def holds(self) -> bool:
        return all(self.bound_ok(n) for n in self.dims) and self.slope_ok and \
            all(est.consistent for est in self.dims.values())

    def to_json(self) -> dict:
        return {"d_prime": self.d_prime, "d": self.d,
                "rows": [{"n": n, "dim": est.to_json()["dim"], "bound": (n + 1) * self.d_prime,
                          "ok": self.bound_ok(n), "consistent": est.consistent} for n, est in self.dims.items()],
                "slope": None if self.slope is None else str(self.slope), "slope_below_d": self.slope_ok,
                "holds": self.holds}


def least_squares_slope(points: Sequence[tuple[int, int]]) -> Fraction | None:
    if len(points) < 2:
        return None
    xs = [Fraction(x) for x, _ in points]
    ys = [Fraction(y) for _, y in points]
    mx, my = sum(xs) / len(xs), sum(ys) / len(ys)
    var = sum((x - mx) ** 2 for x in xs)
    return sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / var


def linear_bound_check(scheme: AffineScheme, e: int, n_max: int, primes: Sequence[int], *,
                       pair: PairSpec | None = None, budget: int | None = None,
                       workers: int = 1) -> LinearBoundReport:
    """Check dim L_n^e(Y) <= (n+1) d' and fit the growth slope of the dimensions."""
    if scheme.expected_dim is None:
        raise ValueError("the linear bound needs the declared dimension d' of Y")
    if pair is None:
        pair = PairSpec.smooth(scheme)
    dims = {}
    for n in range(n_max + 1):
        if e > 0 and pair.smooth_ambient:
            dims[n] = DimEstimate(NEG_INFINITY, (0,), [], True)
            continue
        st = stratum_conditions(pair, n, e, scaled=False, force=True)
        dims[n] = estimate_stratum_dimension(st, primes, budget=budget, workers=workers)
    finite = [(n, est.dim) for n, est in dims.items() if est.dim != NEG_INFINITY]
    return LinearBoundReport(scheme.expected_dim, pair.d, dims, least_squares_slope(finite))


def scheme_points(s: AffineScheme, n: int, q: int, **kwargs) -> int:
    """#L_n(s)(F_q)."""
    return count_points(CountQuery(jet_equations(s, n), (), q), **kwargs)


__all__ = ["CountQuery", "DimEstimate", "count_points", "count_stratum", "count_system", "estimate_dimension",
           "estimate_stratum_dimension", "fit_count_polynomial", "interpolate", "jet_dimension_table",
           "bundle_ratio_check", "linear_bound_check", "scheme_points", "jet_variables", "AtLeast"]
