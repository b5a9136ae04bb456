"""JSON fixtures: one document bundling a scheme, a pair and resolution data.

Three shapes are accepted by :func:`load_fixture`:

* a full fixture with ``schema_version`` and any of ``scheme``, ``pair``,
  ``resolution``, ``primes``, ``budget``;
* a bare scheme document (has ``ambient_dim``);
* bare resolution data (has ``d`` and ``divisors``).

A name that is not an existing path is looked up among the shipped fixtures,
with or without the ``.json`` suffix.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import BadFixture, JetlogError
from .jets import AffineScheme, PairSpec
from .resolution import ResolutionData

SCHEMA_VERSION = 1
SHIPPED = ("a2", "point", "node", "cusp", "cone", "empty")

# names used in older examples for the same shipped data
ALIASES = {"cusp-res": "cusp", "point-res": "point", "blowup-a2": "point", "node-res": "node",
           "cone-res": "cone", "a2-res": "a2"}


@dataclass
class Fixture:
    name: str
    scheme: AffineScheme | None = None
    pair: PairSpec | None = None
    resolution: ResolutionData | None = None
    primes: list[int] = field(default_factory=list)
    budget: int | None = None
    raw: dict = field(default_factory=dict, repr=False)

    def require_scheme(self) -> AffineScheme:
        if self.scheme is not None:
            return self.scheme
        if self.pair is not None:
            return AffineScheme(self.pair.X.ambient_dim, self.pair.y_ideal, None)
        raise BadFixture(f"fixture {self.name!r} has no scheme")

    def require_pair(self) -> PairSpec:
        if self.pair is not None:
            return self.pair
        if self.scheme is not None:
            return PairSpec.smooth(self.scheme, name=self.name)
        raise BadFixture(f"fixture {self.name!r} has no pair and no scheme to build one from")

    def require_resolution(self) -> ResolutionData:
        if self.resolution is None:
            raise BadFixture(f"fixture {self.name!r} has no resolution data")
        return self.resolution


def fixture_path(ref: str | Path) -> Path:
    path = Path(ref)
    if path.exists():
        return path
    stem = path.name[:-5] if path.name.endswith(".json") else path.name
    stem = ALIASES.get(stem, stem)
    shipped = resources.files("jetlog") / "fixtures" / f"{stem}.json"
    if shipped.is_file():
        return Path(str(shipped))
    raise BadFixture(f"no such fixture: {ref}")


def parse_fixture(doc, name: str = "") -> Fixture:
    if not isinstance(doc, dict):
        raise BadFixture("a fixture must be a JSON object")
    try:
        if "schema_version" not in doc:
            if "ambient_dim" in doc:
                return Fixture(name, scheme=AffineScheme.from_json(doc), raw=doc)
            if "d" in doc and "divisors" in doc:
                return Fixture(name, resolution=ResolutionData.from_json(doc), raw=doc)
            raise BadFixture("missing schema_version tag")
        if doc["schema_version"] != SCHEMA_VERSION:
            raise BadFixture(f"unsupported schema_version {doc['schema_version']!r}")
        fx = Fixture(doc.get("name", name), raw=doc)
        if doc.get("scheme") is not None:
            fx.scheme = AffineScheme.from_json(doc["scheme"])
        if doc.get("pair") is not None:
            pair_doc = dict(doc["pair"])
            pair_doc.setdefault("name", fx.name)
            fx.pair = PairSpec.from_json(pair_doc)
        if doc.get("resolution") is not None:
            fx.resolution = ResolutionData.from_json(doc["resolution"])
        fx.primes = [int(p) for p in doc.get("primes", [])]
        if doc.get("budget") is not None:
            fx.budget = int(doc["budget"])
    except JetlogError:
        raise
    except (KeyError, TypeError, ValueError, ArithmeticError) as exc:
        raise BadFixture(f"fixture {name or '?'}: {exc}") from exc
    if fx.pair is not None and fx.resolution is not None:
        if fx.pair.d != fx.resolution.d or fx.pair.r != fx.resolution.r:
            raise BadFixture(f"fixture {fx.name}: pair and resolution disagree on d or r")
    return fx


def load_fixture(ref: str | Path) -> Fixture:
    path = fixture_path(ref)
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise BadFixture(f"cannot read {path}: {exc}") from exc
    return parse_fixture(doc, path.stem)
