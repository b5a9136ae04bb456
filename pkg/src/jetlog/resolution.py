"""Formulas over SNC resolution data: KLT/LC, thresholds, measures, S(e, n).

Resolution data describes a log resolution p: X~ -> X with SNC divisors
D_1..D_s, the order y_i of the ideal of Y along D_i, the discrepancy a_i,
the order z_i of the Z-ideal, and the classes [D_J°] of the open strata.
Everything here is exact rational arithmetic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

from .counting import DimEstimate, count_stratum
from .errors import IncompleteTable, MissingStratum, NonIntegerExponent, UnboundedEnumeration
from .grothendieck import (NEG_INFINITY, ClassSymbol, MotivicElement, element_from_json, element_to_json,
                           symbols_from_json, symbols_to_json)
from .jets import PairSpec, stratum_conditions

INFINITY = float("inf")

L = MotivicElement.lefschetz()
L_MINUS_1 = L - 1


@dataclass(frozen=True)
class Divisor:
    y: int
    a: Fraction
    z: int = 0
    name: str = ""


def subset_key(J: Sequence[int]) -> str:
    return ",".join(str(i) for i in sorted(J))


def parse_subset_key(key: str) -> frozenset[int]:
    return frozenset(int(k) for k in key.split(",") if k.strip())


@dataclass
class ResolutionData:
    d: int
    divisors: list[Divisor]
    strata: dict[frozenset[int], MotivicElement]
    r: int = 1
    theta: int = 2

    def __post_init__(self):
        self.divisors = [Divisor(int(D.y), Fraction(D.a), int(D.z), D.name) for D in self.divisors]
        self.strata = {frozenset(J): el for J, el in self.strata.items()}
        if self.r < 1 or self.theta < 1:
            raise ValueError("r and theta must be positive")
        for i, D in enumerate(self.divisors):
            if D.y < 0 or D.z < 0:
                raise ValueError(f"divisor {i}: orders y and z must be non-negative")
            if (self.r * D.a).denominator != 1:
                raise ValueError(f"divisor {i}: r*a = {self.r * D.a} is not an integer")
        if frozenset() not in self.strata:
            raise ValueError("the stratum of the empty set (complement of the divisors) is required")
        s = len(self.divisors)
        for J, el in self.strata.items():
            if any(i < 0 or i >= s for i in J):
                raise ValueError(f"stratum {subset_key(J)} refers to a missing divisor")
            if el and el.dim() > self.d - len(J):
                raise ValueError(f"stratum {subset_key(J)} has dimension {el.dim()} > d - |J|")

    @property
    def s(self) -> int:
        return len(self.divisors)

    def log_discrepancy(self, i: int, q) -> Fraction:
        D = self.divisors[i]
        return -Fraction(q) * D.y + D.a + 1

    def stratum(self, J, *, required: bool = False) -> MotivicElement:
        J = frozenset(J)
        if J in self.strata:
            return self.strata[J]
        if required:
            raise MissingStratum(f"no class supplied for the stratum D_J° with J = {{{subset_key(J)}}}")
        return MotivicElement.zero()

    def symbols(self) -> set[ClassSymbol]:
        out = set()
        for el in self.strata.values():
            out |= el.symbols()
        return out

    def to_json(self) -> dict:
        return {"d": self.d, "r": self.r, "theta": self.theta,
                "divisors": [{"name": D.name, "y": D.y, "a": str(D.a), "z": D.z} for D in self.divisors],
                "symbols": symbols_to_json(self.symbols()),
                "strata": {subset_key(J): element_to_json(el)
                           for J, el in sorted(self.strata.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))}}

    @classmethod
    def from_json(cls, data: Mapping) -> ResolutionData:
        symbols = symbols_from_json(data.get("symbols", {}))
        divisors = [Divisor(int(D["y"]), Fraction(str(D.get("a", "0"))), int(D.get("z", 0)), D.get("name", ""))
                    for D in data["divisors"]]
        strata = {parse_subset_key(k): element_from_json(v, symbols) for k, v in data.get("strata", {}).items()}
        return cls(int(data["d"]), divisors, strata, int(data.get("r", 1)), int(data.get("theta", 2)))


# -- KLT / LC ------------------------------------------------------------------


def is_klt(data: ResolutionData, q) -> bool:
    return all(data.log_discrepancy(i, q) > 0 for i in range(data.s))


def is_lc(data: ResolutionData, q) -> bool:
    return all(data.log_discrepancy(i, q) >= 0 for i in range(data.s))


def lct(data: ResolutionData):
    """min (a_i + 1)/y_i over divisors with y_i > 0, or INFINITY."""
    values = [(D.a + 1) / D.y for D in data.divisors if D.y > 0]
    return min(values) if values else INFINITY


# -- measures ------------------------------------------------------------------


def measure_level_set(data: ResolutionData, m: Sequence[int]) -> MotivicElement:
    """Motivic measure of the arcs with contact order m_i along every D_i."""
    if len(m) != data.s:
        raise ValueError(f"need {data.s} contact orders, got {len(m)}")
    if any(k < 0 for k in m):
        raise ValueError("contact orders are non-negative")
    J = frozenset(i for i, k in enumerate(m) if k > 0)
    stratum = data.stratum(J)
    if not stratum:
        return MotivicElement.zero()
    return (stratum * L_MINUS_1 ** len(J)).shift(-sum(m))


def lattice_points(ys: Sequence[int], zs: Sequence[int], target_y: int, target_z: int) -> Iterator[tuple[int, ...]]:
    """Positive integer vectors m with sum y_i m_i = target_y and sum z_i m_i = target_z.

    Lexicographic order. Every coordinate is bounded through whichever of
    y_i, z_i is positive; a coordinate with both zero is unbounded.
    """
    if not ys:
        if target_y == 0 and target_z == 0:
            yield ()
        return
    y, z = ys[0], zs[0]
    if y == 0 and z == 0:
        raise UnboundedEnumeration("a divisor with y = z = 0 gives infinitely many contact vectors")
    rest_y, rest_z = sum(ys[1:]), sum(zs[1:])
    caps = []
    if y:
        caps.append((target_y - rest_y) // y)
    if z:
        caps.append((target_z - rest_z) // z)
    for k in range(1, min(caps) + 1):
        for tail in lattice_points(ys[1:], zs[1:], target_y - y * k, target_z - z * k):
            yield (k,) + tail


def _target(n: int, mode: str) -> int:
    if mode not in ("n+1", "n"):
        raise ValueError("mode is 'n+1' or 'n'")
    return n + 1 if mode == "n+1" else n


def enumerate_M(data: ResolutionData, J: Sequence[int], n: int, e: int, mode: str = "n+1") -> list[tuple[int, ...]]:
    """Contact vectors on J with Y-order n+1 (or n) and Z-order e."""
    J = sorted(J)
    ys = [data.divisors[i].y for i in J]
    zs = [data.divisors[i].z for i in J]
    return list(lattice_points(ys, zs, _target(n, mode), e))


def subsets(s: int) -> list[tuple[int, ...]]:
    return sorted((J for k in range(s + 1) for J in itertools.combinations(range(s), k)))


def _level_sum(data: ResolutionData, q, target_y: int, e: int) -> MotivicElement:
    total = MotivicElement.zero()
    for J in subsets(data.s):
        pts = list(lattice_points([data.divisors[i].y for i in J], [data.divisors[i].z for i in J], target_y, e))
        if not pts:
            continue
        stratum = data.stratum(J, required=True)
        if not stratum:
            continue
        base = stratum * L_MINUS_1 ** len(J)
        for m in pts:
            weight = sum(data.log_discrepancy(i, q) * k for i, k in zip(J, m))
            total = total + base.shift(-weight)
    return total


def s_element(data: ResolutionData, q, e: int, n: int, mode: str = "n+1") -> MotivicElement:
    """The finite sum over J and contact vectors giving S(e, n)."""
    return _level_sum(data, q, _target(n, mode), e)


def s_dim(data: ResolutionData, q, e: int, n: int, mode: str = "n+1"):
    """max of d - sum (-q y_i + a_i + 1) m_i over admissible (J, m); NEG_INFINITY if none."""
    best = NEG_INFINITY
    target = _target(n, mode)
    for J in subsets(data.s):
        pts = list(lattice_points([data.divisors[i].y for i in J], [data.divisors[i].z for i in J], target, e))
        if not pts:
            continue
        if not data.stratum(J, required=True):
            continue
        for m in pts:
            value = data.d - sum(data.log_discrepancy(i, q) * k for i, k in zip(J, m))
            if value > best:
                best = value
    return best


# -- main theorem --------------------------------------------------------------


@dataclass
class InequalityRow:
    e: int
    n: int
    dim: object
    lhs: object
    rhs: Fraction
    holds: bool


@dataclass
class MainTheoremReport:
    mode: str
    q: Fraction
    l: int
    rows: list[InequalityRow]
    resolution_verdict: bool | None = None
    hypothesis: bool = True
    notes: list[str] = field(default_factory=list)

    @property
    def jet_verdict(self) -> bool:
        return all(r.holds for r in self.rows)

    @property
    def agree(self) -> bool | None:
        if self.resolution_verdict is None:
            return None
        return self.jet_verdict == self.resolution_verdict

    @property
    def holds(self) -> bool:
        return self.jet_verdict

    def violations(self) -> list[InequalityRow]:
        return [r for r in self.rows if not r.holds]

    def to_json(self) -> dict:
        def fmt(x):
            if isinstance(x, float):
                return "-inf" if x < 0 else "inf"
            return str(x)
        return {"mode": self.mode, "q": str(self.q), "l": self.l, "hypothesis": self.hypothesis,
                "rows": [{"e": r.e, "n": r.n, "dim": fmt(r.dim), "lhs": fmt(r.lhs), "rhs": str(r.rhs),
                          "holds": r.holds} for r in self.rows],
                "jet_verdict": self.jet_verdict, "resolution_verdict": self.resolution_verdict,
                "agree": self.agree, "notes": self.notes}


def main_theorem_check(pair: PairSpec, data: ResolutionData | None, jet_dims: Mapping[tuple[int, int], object],
                       mode: str = "klt", *, n_max: int, e_max: int = 0) -> MainTheoremReport:
    """Test dim L_n^e(lY) + e/r against (n+1)(d - q/l) for every n >= theta*e in range.

    ``jet_dims`` maps (e, n) to a dimension or a :class:`DimEstimate`. The
    verdict from the resolution data, when given, is reported beside the
    jet verdict and never merged into it.
    """
    mode = mode.lower()
    if mode not in ("klt", "lc"):
        raise ValueError("mode is 'klt' or 'lc'")
    needed = [(e, n) for e in range(e_max + 1) for n in range(pair.theta * e, n_max + 1)]
    missing = [k for k in needed if k not in jet_dims]
    if missing:
        raise IncompleteTable(missing)
    bound = pair.d - pair.q / pair.l
    rows = []
    notes = []
    for e, n in needed:
        dim = jet_dims[(e, n)]
        if isinstance(dim, DimEstimate):
            if not dim.consistent:
                notes.append(f"dimension at (e={e}, n={n}) is a best fit, not confirmed")
            dim = dim.dim
        lhs = dim + Fraction(e, pair.r) if dim != NEG_INFINITY else NEG_INFINITY
        rhs = (n + 1) * bound
        rows.append(InequalityRow(e, n, dim, lhs, rhs, lhs < rhs if mode == "klt" else lhs <= rhs))
    verdict = None
    if data is not None:
        verdict = is_klt(data, pair.q) if mode == "klt" else is_lc(data, pair.q)
    hypothesis = pair.hypothesis_holds()
    if not hypothesis:
        notes.append("a^l is not known to lie in J^theta; the criterion need not apply")
    return MainTheoremReport(mode, pair.q, pair.l, rows, verdict, hypothesis, notes)


# -- transformation rule -------------------------------------------------------


@dataclass
class TransformRow:
    m: int
    e: int
    prime: int
    downstairs: Fraction
    upstairs: Fraction

    @property
    def equal(self) -> bool:
        return self.downstairs == self.upstairs


@dataclass
class TransformReport:
    coefficient: Fraction
    rows: list[TransformRow]

    @property
    def holds(self) -> bool:
        return all(r.equal for r in self.rows)

    def to_json(self) -> dict:
        return {"coefficient": str(self.coefficient),
                "rows": [{"m": r.m, "e": r.e, "prime": r.prime, "downstairs": str(r.downstairs),
                          "upstairs": str(r.upstairs), "equal": r.equal} for r in self.rows],
                "holds": self.holds}


def upstairs_element(data: ResolutionData, coefficient, m: int, e: int) -> MotivicElement:
    """Integral of L^(c F_Y - F_K) over the arcs upstairs with Y-order m and Z-order e."""
    return _level_sum(data, coefficient, m, e)


def downstairs_measure(pair: PairSpec, m: int, e: int, q: int, *, budget: int | None = None,
                       workers: int = 1, lift: bool = True) -> Fraction:
    """Counting realization of mu_X(F_Y^{-1}(m) ∩ A_e) at a stable level."""
    n = max(m, pair.theta * e)
    st = stratum_conditions(pair, n, e, y_order=m, scaled=False, lift=lift)
    return Fraction(count_stratum(st, q, budget=budget, workers=workers)) / Fraction(q) ** (n * pair.d)


def transformation_check(pair: PairSpec, data: ResolutionData, m_max: int, primes: Sequence[int], *,
                         e_max: int | None = None, coefficient=0, budget: int | None = None,
                         workers: int = 1, lift: bool = True) -> TransformReport:
    """Compare both sides of the change of variables on level sets of F_Y and F_Z.

    Downstairs: mu_X(F_Y = m, F_Z = e) * L^(c m + e/r) from point counts.
    Upstairs: the SNC sum over strata, specialized at L = q. Both are
    divided by L^(c m + e/r) before specializing so that only integer
    exponents remain.
    """
    c = Fraction(coefficient)
    if e_max is None:
        e_max = 0 if pair.smooth_ambient else m_max
    rows = []
    for e in range(e_max + 1):
        for m in range(m_max + 1):
            up = upstairs_element(data, c, m, e).shift(-(c * m + Fraction(e, pair.r)))
            for p in primes:
                down = downstairs_measure(pair, m, e, p, budget=budget, workers=workers, lift=lift)
                try:
                    value = up.specialize(p)
                except NonIntegerExponent:
                    raise NonIntegerExponent(f"upstairs terms at m={m}, e={e} keep fractional powers of L")
                rows.append(TransformRow(m, e, p, down, value))
    return TransformReport(c, rows)
