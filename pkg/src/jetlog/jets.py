"""Jet schemes of affine schemes, contact orders, and the strata L_n^e(Y)."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .errors import NonPrincipalComponent, NotMonomial, StabilityViolation, UnsupportedShape
from .finite_field import FiniteField
from .symbolic import Ideal, Poly, TruncatedSeries, ideal_power, monomial_membership_check, series_substitute


def default_variables(n: int) -> tuple[str, ...]:
    if n <= 4:
        return ("x", "y", "z", "w")[:n]
    return tuple(f"x{i}" for i in range(1, n + 1))


def jet_variable(base: str, level: int) -> str:
    return f"{base}_{level}"


def jet_variables(base: Sequence[str], n: int) -> tuple[str, ...]:
    """Level-major ordering: every level-0 coordinate, then level 1, ..."""
    return tuple(jet_variable(v, j) for j in range(n + 1) for v in base)


@dataclass(frozen=True)
class AffineScheme:
    ambient_dim: int
    ideal: Ideal
    expected_dim: int | None = None

    def __post_init__(self):
        if len(self.ideal.variables) != self.ambient_dim:
            raise ValueError(f"ideal has {len(self.ideal.variables)} variables, ambient dimension is "
                             f"{self.ambient_dim}")
        if self.expected_dim is not None and not 0 <= self.expected_dim <= self.ambient_dim:
            raise ValueError(f"expected_dim {self.expected_dim} outside [0, {self.ambient_dim}]")

    @classmethod
    def affine_space(cls, n: int, variables: Sequence[str] | None = None) -> AffineScheme:
        variables = tuple(variables or default_variables(n))
        return cls(n, Ideal((), variables), n)

    @classmethod
    def parse(cls, gens: Sequence[str], ambient_dim: int, variables: Sequence[str] | None = None,
              expected_dim: int | None = None) -> AffineScheme:
        variables = tuple(variables or default_variables(ambient_dim))
        return cls(ambient_dim, Ideal.parse(gens, variables), expected_dim)

    @property
    def variables(self) -> tuple[str, ...]:
        return self.ideal.variables

    @property
    def dim(self) -> int:
        """Declared dimension, else N minus the number of generators."""
        if self.expected_dim is not None:
            return self.expected_dim
        return self.ambient_dim - len(self.ideal.gens)

    def to_json(self) -> dict:
        return {"ambient_dim": self.ambient_dim, "variables": list(self.variables),
                "ideal": self.ideal.strings(), "expected_dim": self.expected_dim}

    @classmethod
    def from_json(cls, data: dict) -> AffineScheme:
        return cls.parse(data.get("ideal", []), int(data["ambient_dim"]), data.get("variables"),
                         data.get("expected_dim"))


@dataclass(frozen=True)
class JetSystem:
    level: int
    base: AffineScheme
    variables: tuple[str, ...]
    equations: tuple[Poly, ...]

    def equations_at(self, j: int) -> tuple[Poly, ...]:
        g = len(self.base.ideal.gens)
        return self.equations[j * g:(j + 1) * g]

    def strings(self) -> list[str]:
        return [str(e) for e in self.equations]


@lru_cache(maxsize=256)
def generator_series(ideal: Ideal, n: int) -> tuple[tuple[Poly, ...], ...]:
    """For each generator g, the coefficients of g(v(t)) mod t^(n+1) in jet variables."""
    jvars = jet_variables(ideal.variables, n)
    args = []
    for v in ideal.variables:
        args.append(TruncatedSeries([Poly.var(jet_variable(v, j), jvars) for j in range(n + 1)], n))
    out = []
    for g in ideal.gens:
        out.append(tuple(series_substitute(g, args, n).coeffs))
    return tuple(out)


def jet_equations(s: AffineScheme, n: int) -> JetSystem:
    if n < 0:
        raise ValueError("jet level must be >= 0")
    series = generator_series(s.ideal, n)
    eqs = tuple(series[g][j] for j in range(n + 1) for g in range(len(series)))
    return JetSystem(n, s, jet_variables(s.variables, n), eqs)


# -- contact orders ----------------------------------------------------------


@dataclass(frozen=True, order=True)
class AtLeast:
    """An order that the truncation cannot pin down beyond a lower bound."""

    bound: int | Fraction

    def __str__(self):
        return f">={self.bound}"


@dataclass(frozen=True)
class ContactCondition:
    ideal: Ideal
    order: int | AtLeast

    @property
    def exact(self) -> bool:
        return not isinstance(self.order, AtLeast)

    def __str__(self):
        return f"ord{self.ideal} {'= ' + str(self.order) if self.exact else str(self.order)}"


def _numeric_series_order(g: Poly, jet, n: int, fld: FiniteField | None):
    """t-adic order of g(jet(t)) mod t^(n+1), None when it vanishes to that precision."""
    if fld is None:
        conv = Fraction
        add = lambda a, b: a + b
        mul = lambda a, b: a * b
        coef = Fraction
    else:
        conv = int
        add, mul, coef = fld.add, fld.mul, fld.coerce
    zero = conv(0)

    def smul(a, b):
        out = [zero] * (n + 1)
        for i, x in enumerate(a):
            if x:
                for j in range(n + 1 - i):
                    if b[j]:
                        out[i + j] = add(out[i + j], mul(x, b[j]))
        return out

    series = [[conv(c) for c in list(coords)[: n + 1]] + [zero] * (n + 1 - len(coords)) for coords in jet]
    total = [zero] * (n + 1)
    for exps, c in g.terms.items():
        term = [zero] * (n + 1)
        term[0] = coef(c)
        for s, k in zip(series, exps):
            for _ in range(k):
                term = smul(term, s)
        total = [add(a, b) for a, b in zip(total, term)]
    for j, c in enumerate(total):
        if c:
            return j
    return None


def contact_order(jet: Sequence[Sequence], a: Ideal, fld: FiniteField | None = None):
    """Order of contact of a truncated jet with an ideal.

    ``jet[i][j]`` is the t^j coefficient of the i-th coordinate. Coordinates
    are rationals when ``fld`` is None, else elements of ``fld``. Returns an
    int in 0..n, or ``AtLeast(n + 1)`` when every generator vanishes to the
    available precision.
    """
    n = max(len(c) for c in jet) - 1 if jet else 0
    best = None
    for g in a.gens:
        o = _numeric_series_order(g, jet, n, fld)
        if o is not None and (best is None or o < best):
            best = o
    return AtLeast(n + 1) if best is None else best


def divisor_order(jet: Sequence[Sequence], components: Sequence[tuple[Ideal, Fraction]],
                  fld: FiniteField | None = None):
    """Weighted sum of contact orders along the components of a Q-divisor."""
    total = Fraction(0)
    saturated = False
    for ideal, weight in components:
        if not ideal.is_principal():
            raise NonPrincipalComponent(f"divisor component {ideal} is not principal")
        o = contact_order(jet, ideal, fld)
        if isinstance(o, AtLeast):
            saturated = True
            o = o.bound
        total += Fraction(weight) * o
    return AtLeast(total) if saturated else total


def jacobian_z_ideal(s: AffineScheme) -> Ideal:
    """Partial derivatives of a hypersurface equation together with the equation.

    Only meaningful for a hypersurface with Gorenstein index 1.
    """
    if len(s.ideal.gens) != 1 or (s.expected_dim is not None and s.expected_dim != s.ambient_dim - 1):
        raise UnsupportedShape("the Jacobian ideal is only built for hypersurfaces; supply the Z-ideal")
    (f,) = s.ideal.gens
    gens = []
    for i, v in enumerate(s.variables):
        d = {}
        for exps, c in f.terms.items():
            if exps[i]:
                e = list(exps)
                e[i] -= 1
                d[tuple(e)] = c * exps[i]
        gens.append(Poly(s.variables, d, f.domain))
    gens.append(f)
    return Ideal.from_polys(gens, s.variables)


# -- pairs and strata ---------------------------------------------------------


def _monomial_hypothesis(y: Ideal, l: int, z: Ideal, theta: int) -> bool | None:
    try:
        y_power = ideal_power(y, l) if y.gens else y
        z_power = ideal_power(z, theta) if z.gens else z
        return monomial_membership_check(y_power, z_power)
    except NotMonomial:
        return None


@dataclass(frozen=True)
class PairSpec:
    """A pair (X, qY) with the data needed for the jet criterion."""

    X: AffineScheme
    z_ideal: Ideal
    y_ideal: Ideal
    q: Fraction
    l: int = 1
    theta: int = 2
    r: int = 1
    hypothesis_asserted: bool = False
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "q", Fraction(self.q))
        if self.q <= 0:
            raise ValueError("q must be positive")
        if self.l < 1 or self.theta < 1 or self.r < 1:
            raise ValueError("l, theta and r must be positive integers")
        for ideal in (self.z_ideal, self.y_ideal):
            if ideal.variables != self.X.variables:
                raise ValueError("Y and Z ideals must use the variables of X")
        checked = self.monomial_hypothesis()
        if checked is not None and checked != self.hypothesis_asserted:
            raise ValueError(f"hypothesis a^l in J^theta asserted {self.hypothesis_asserted} "
                             f"but the monomial check gives {checked}")

    @property
    def d(self) -> int:
        return self.X.dim

    @property
    def scaled_y(self) -> Ideal:
        """The ideal of lY."""
        return ideal_power(self.y_ideal, self.l) if self.y_ideal.gens else self.y_ideal

    @property
    def smooth_ambient(self) -> bool:
        return self.z_ideal.is_unit()

    def monomial_hypothesis(self) -> bool | None:
        """Monomial check of a^l in J^theta; None when it does not apply."""
        return _monomial_hypothesis(self.y_ideal, self.l, self.z_ideal, self.theta)

    def hypothesis_holds(self) -> bool:
        checked = self.monomial_hypothesis()
        return self.hypothesis_asserted if checked is None else checked

    def replace(self, **changes) -> PairSpec:
        """Copy with changed fields; the asserted flag follows the monomial check when it applies."""
        values = {f: getattr(self, f) for f in ("X", "z_ideal", "y_ideal", "q", "l", "theta", "r",
                                                 "hypothesis_asserted", "name")}
        values.update(changes)
        checked = _monomial_hypothesis(values["y_ideal"], values["l"], values["z_ideal"], values["theta"])
        if checked is not None:
            values["hypothesis_asserted"] = checked
        return PairSpec(**values)

    @classmethod
    def smooth(cls, Y: AffineScheme, q=1, l: int = 1, theta: int = 2, name: str = "") -> PairSpec:
        """Y inside the affine space A^N, whose Z-ideal is the unit ideal."""
        X = AffineScheme.affine_space(Y.ambient_dim, Y.variables)
        unit = Ideal((Poly.const(1, Y.variables),), Y.variables)
        # a^l is always inside the unit ideal
        return cls(X, unit, Y.ideal, Fraction(q), l, theta, 1, True, name)

    def to_json(self) -> dict:
        return {"name": self.name, "X": self.X.to_json(), "r": self.r, "z_ideal": self.z_ideal.strings(),
                "Y": self.y_ideal.strings(), "q": str(self.q), "l": self.l, "theta": self.theta,
                "hypothesis_asserted": self.hypothesis_asserted}

    @classmethod
    def from_json(cls, data: dict) -> PairSpec:
        X = AffineScheme.from_json(data["X"])
        z = data.get("z_ideal", ["1"])
        if z == "jacobian":
            z_ideal = jacobian_z_ideal(X)
        else:
            z_ideal = Ideal.parse(z, X.variables)
        y_ideal = Ideal.parse(data.get("Y", []), X.variables)
        return cls(X, z_ideal, y_ideal, Fraction(str(data.get("q", "1"))), int(data.get("l", 1)),
                   int(data.get("theta", 2)), int(data.get("r", 1)),
                   bool(data.get("hypothesis_asserted", False)), data.get("name", ""))


@dataclass(frozen=True)
class Stratum:
    """Contact conditions cutting out a set of jets of the ambient A^N.

    Points are enumerated at ``count_level = level + lift``; the number of
    level-``level`` jets is the raw count divided by q^(N * lift).
    """

    level: int
    lift: int
    ambient: AffineScheme
    conditions: tuple[ContactCondition, ...] = field(default_factory=tuple)

    @property
    def count_level(self) -> int:
        return self.level + self.lift


def stratum_conditions(pair: PairSpec, n: int, e: int, y_order="jet", *, scaled: bool = True,
                       force: bool = False, lift: bool = True) -> Stratum:
    """Conditions describing L_n(lY) intersected with the level-n image of A_e.

    ``y_order`` selects the condition along the Y-ideal: ``"jet"`` (the
    default) means the jet lies on lY, an int or :class:`AtLeast` gives a
    level set of the order function, and None drops the condition.

    A level-n jet of X with Z-order e lies in the image of A_e only when it
    extends to level n + e; with ``lift`` the conditions are imposed at
    level n + e and the fibre A^(N e) is divided out afterwards.
    """
    if n < 0 or e < 0:
        raise ValueError("n and e must be non-negative")
    if n < pair.theta * e and not force:
        raise StabilityViolation(f"n = {n} < theta*e = {pair.theta * e}; pass force to compute anyway")
    if n < e:
        raise StabilityViolation(f"Z-order {e} is not determined by jets of level {n}")
    extra = e if (lift and e > 0 and not pair.smooth_ambient) else 0
    top = n + extra
    ambient = AffineScheme.affine_space(pair.X.ambient_dim, pair.X.variables)
    conds = []
    if pair.X.ideal.gens:
        conds.append(ContactCondition(pair.X.ideal, AtLeast(top + 1)))
    y_ideal = pair.scaled_y if scaled else pair.y_ideal
    if y_order == "jet":
        y_order = AtLeast(n + 1)
    if y_order is not None:
        if isinstance(y_order, int) and y_order > n:
            raise ValueError(f"exact order {y_order} is not visible at level {n}")
        conds.append(ContactCondition(y_ideal, y_order))
    if not (pair.smooth_ambient and e == 0):
        conds.append(ContactCondition(pair.z_ideal, e))
    return Stratum(n, extra, ambient, tuple(conds))
