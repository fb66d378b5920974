"""TOML manifests: named charts, bivectors, groups, bialgebras, actions,
momentum maps, ideals and check requests.

Example::

    version = 1

    [charts.gstar]
    coords = ["a", "b"]
    domain = { a = "positive" }

    [bivectors.pi]
    chart = "gstar"
    terms = [{ indices = ["a", "b"], coeff = "a*b" }]

    [groups.Gstar]
    bivector = "pi"
    mul = ["a1*a2", "a1*b2 + b1"]
    identity = ["1", "0"]

    [[checks]]
    kind = "jacobi"
    bivector = "pi"
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Optional

try:
    import tomllib as tomli
except ModuleNotFoundError:  # Python 3.10
    import tomli

from .bialgebra import Cobracket, LieAlgebraSC, LieBialgebra
from .exprcore import POSITIVE, UNCONSTRAINED, Chart, ExprError, Interval, parse
from .momentmap import ActionSpec, MomentumMap
from .multivec import ChartMap, multivector, vector_field
from .plgroup import GroupChart, GroupLawError, dressing_fields
from .poisson import PoissonChart, hamiltonian_field
from .reduction import CoordinateIdeal, ReductionError

FIXTURES = (
    "gstar",
    "gstar-case1",
    "gstar-case2",
    "gstar-case3",
    "gstar-alt-generators",
    "so3",
    "so3-perturbed",
    "cyclic",
    "product",
    "classical",
)


class ManifestError(Exception):
    pass


@dataclass
class Manifest:
    source: str
    charts: dict[str, Chart] = field(default_factory=dict)
    bivectors: dict[str, PoissonChart] = field(default_factory=dict)
    groups: dict[str, GroupChart] = field(default_factory=dict)
    bialgebras: dict[str, LieBialgebra] = field(default_factory=dict)
    actions: dict[str, ActionSpec] = field(default_factory=dict)
    action_expect: dict[str, str] = field(default_factory=dict)
    momentum_maps: dict[str, MomentumMap] = field(default_factory=dict)
    ideals: dict[str, CoordinateIdeal] = field(default_factory=dict)
    checks: list[dict] = field(default_factory=list)

    def get(self, section: str, name: Any) -> Any:
        table = getattr(self, section)
        if not isinstance(name, str) or name not in table:
            raise ManifestError(f"unknown {section[:-1].replace('_', ' ')} {name!r}")
        return table[name]


def _req(table: dict, key: str, where: str) -> Any:
    if key not in table:
        raise ManifestError(f"{where}: missing key {key!r}")
    return table[key]


def _constraint(spec, where: str):
    if spec in (POSITIVE, UNCONSTRAINED):
        return spec
    if isinstance(spec, list) and len(spec) == 2:
        return Interval(Fraction(str(spec[0])), Fraction(str(spec[1])))
    raise ManifestError(f"{where}: bad domain constraint {spec!r}")


def _parse(text, chart: Chart, where: str):
    if not isinstance(text, str):
        text = str(text)
    try:
        return parse(text, chart)
    except ExprError as err:
        raise ManifestError(f"{where}: {err}") from err


def _load_bialgebra(name: str, t: dict) -> LieBialgebra:
    where = f"bialgebras.{name}"
    basis = list(_req(t, "basis", where))
    try:
        alg = LieAlgebraSC.from_entries(
            basis, [(e["i"], e["j"], e["k"], Fraction(str(e["c"]))) for e in t.get("bracket", [])]
        )
        cob = Cobracket.from_entries(
            basis, [(e["i"], e["j"], e["k"], Fraction(str(e["d"]))) for e in t.get("cobracket", [])]
        )
    except (KeyError, ValueError) as err:
        raise ManifestError(f"{where}: bad structure constant entry ({err})") from err
    return LieBialgebra(alg, cob)


def _load_action(m: Manifest, name: str, t: dict) -> ActionSpec:
    where = f"actions.{name}"
    B = m.get("bialgebras", _req(t, "bialgebra", where))
    if "dressing" in t:
        d = t["dressing"]
        G = m.get("groups", _req(d, "group", where))
        return ActionSpec(B, tuple(dressing_fields(G, d.get("side", "left"))))
    chart = m.get("charts", _req(t, "chart", where))
    gens_spec = _req(t, "generators", where)
    gens = []
    for basis_name in B.basis:
        g = _req(gens_spec, basis_name, where)
        if "hamiltonian" in g:
            P = m.get("bivectors", _req(t, "bivector", where))
            X = hamiltonian_field(P, _parse(g["hamiltonian"], chart, where))
            if "scale" in g:
                X = X.scale(_parse(g["scale"], chart, where))
            gens.append(X)
        else:
            for coord in g:
                if coord not in chart.coords:
                    raise ManifestError(f"{where}: unknown identifier {coord!r}")
            gens.append(vector_field(chart, {c: _parse(e, chart, where) for c, e in g.items()}))
    return ActionSpec(B, tuple(gens))


def load_manifest(text: str, source: str = "<string>") -> Manifest:
    try:
        doc = tomli.loads(text)
    except tomli.TOMLDecodeError as err:
        raise ManifestError(f"{source}: {err}") from err
    m = Manifest(source)
    try:
        _populate(m, doc)
    except (ExprError, GroupLawError, ReductionError, ValueError) as err:
        if isinstance(err, ManifestError):
            raise
        raise ManifestError(f"{source}: {err}") from err
    return m


def _populate(m: Manifest, doc: dict) -> None:
    for name, t in doc.get("charts", {}).items():
        where = f"charts.{name}"
        coords = tuple(_req(t, "coords", where))
        domain = tuple((c, _constraint(s, where)) for c, s in t.get("domain", {}).items())
        m.charts[name] = Chart(name, coords, domain)

    for name, t in doc.get("bivectors", {}).items():
        where = f"bivectors.{name}"
        chart = m.get("charts", _req(t, "chart", where))
        terms = []
        for term in t.get("terms", []):
            idx = list(_req(term, "indices", where))
            for c in idx:
                if c not in chart.coords:
                    raise ManifestError(f"{where}: unknown identifier {c!r}")
            terms.append((idx, _parse(_req(term, "coeff", where), chart, where)))
        m.bivectors[name] = PoissonChart(chart, multivector(chart, 2, terms), t.get("label", name))

    for name, t in doc.get("groups", {}).items():
        where = f"groups.{name}"
        P = m.get("bivectors", _req(t, "bivector", where))
        try:
            m.groups[name] = GroupChart.from_text(
                P, list(_req(t, "mul", where)), [Fraction(str(v)) for v in _req(t, "identity", where)], t.get("inverse")
            )
        except ExprError as err:
            raise ManifestError(f"{where}: {err}") from err

    for name, t in doc.get("bialgebras", {}).items():
        m.bialgebras[name] = _load_bialgebra(name, t)

    for name, t in doc.get("actions", {}).items():
        m.actions[name] = _load_action(m, name, t)
        m.action_expect[name] = t.get("expect", "homomorphism")

    for name, t in doc.get("momentum_maps", {}).items():
        where = f"momentum_maps.{name}"
        source = m.get("charts", _req(t, "source", where))
        G = m.get("groups", _req(t, "group", where))
        if t.get("inverse", False):
            if G.inv is None:
                raise ManifestError(f"{where}: group {t['group']} has no inverse expressions")
            mp = ChartMap(source, G.chart, G.inv) if source == G.chart else None
            if mp is None:
                raise ManifestError(f"{where}: inverse momentum map needs source = group chart")
        else:
            comps = list(_req(t, "components", where))
            mp = ChartMap(source, G.chart, tuple(_parse(c, source, where) for c in comps))
        ident = None
        if "identification" in t:
            ident = tuple(G.chart.index(c) for c in t["identification"])
        m.momentum_maps[name] = MomentumMap(mp, G, ident)

    for name, t in doc.get("ideals", {}).items():
        where = f"ideals.{name}"
        chart = m.get("charts", _req(t, "chart", where))
        gens = [_parse(g, chart, where) for g in t.get("generators", [])]
        m.ideals[name] = CoordinateIdeal.from_exprs(chart, gens)

    checks = doc.get("checks", [])
    for n, c in enumerate(checks):
        if "kind" not in c:
            raise ManifestError(f"checks[{n}]: missing key 'kind'")
        c.setdefault("name", f"{c['kind']}-{n}")
    m.checks = checks


def load_path(path: str | Path) -> Manifest:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as err:
        raise ManifestError(f"cannot read {path}: {err}") from err
    return load_manifest(text, str(p))


def fixture_text(name: str) -> str:
    if name not in FIXTURES:
        raise ManifestError(f"unknown fixture {name!r}")
    return resources.files("poissonkit").joinpath("fixtures", f"{name}.toml").read_text()


def load_fixture(name: str) -> Manifest:
    return load_manifest(fixture_text(name), f"fixture:{name}")


def resolve(target: str) -> Manifest:
    """A path to a manifest, or the name of a bundled fixture."""
    if target in FIXTURES and not Path(target).exists():
        return load_fixture(target)
    return load_path(target)
