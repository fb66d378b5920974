"""Dispatch manifest check requests and collect a deterministic report."""
from __future__ import annotations

import itertools
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Optional

import numpy as np

from . import bialgebra as bi
from . import momentmap as mm
from . import plgroup as plg
from . import poisson as po
from . import reduction as red
from .exprcore import (
    ZERO,
    Const,
    ExprError,
    NonZero,
    ProbablyZero,
    ScalarExpr,
    SymbolicZero,
    Var,
    combine_verdicts,
    parse,
    simplify,
)
from .manifest import Manifest, ManifestError

REPORT_VERSION = 1
PASS, FAIL, WARN, ERROR = "PASS", "FAIL", "WARN", "ERROR"


@dataclass
class Options:
    samples: int = 100
    tol: float = 1e-9
    seed: int = 42
    step: float = 1e-3
    strict: bool = False
    timing: bool = False
    parallel: bool = False


@dataclass
class CheckRecord:
    name: str
    kind: str
    verdict: str
    witness: dict = field(default_factory=dict)
    millis: int = 0

    def as_json(self) -> dict:
        return {"name": self.name, "verdict": self.verdict, "witness": self.witness, "millis": self.millis}


@dataclass
class Report:
    seed: int
    checks: list[CheckRecord]

    def as_json(self) -> dict:
        return {"version": REPORT_VERSION, "seed": self.seed, "checks": [c.as_json() for c in self.checks]}

    def dumps(self) -> str:
        return json.dumps(self.as_json(), indent=2, sort_keys=True) + "\n"

    def exit_code(self, strict: bool = False) -> int:
        verdicts = {c.verdict for c in self.checks}
        if ERROR in verdicts:
            return 2
        if FAIL in verdicts or (strict and WARN in verdicts):
            return 1
        return 0


def _js(x: Any) -> Any:
    """JSON-safe, deterministic rendering of witness data."""
    if isinstance(x, dict):
        return {str(k) if not isinstance(k, tuple) else ",".join(map(str, k)): _js(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_js(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, ScalarExpr):
        return str(x)
    if isinstance(x, (SymbolicZero, NonZero, ProbablyZero)):
        return _verdict_json(x)
    if x is None or isinstance(x, str):
        return x
    return str(x)


def _verdict_json(v) -> dict:
    if isinstance(v, SymbolicZero):
        return {"kind": "SymbolicZero"}
    if isinstance(v, ProbablyZero):
        return {"kind": "ProbablyZero", "samples": v.samples, "max_abs": v.max_abs}
    return {"kind": "NonZero", "point": list(v.witness), "value": v.value, "where": v.where}


def _zero_verdict(v) -> str:
    if isinstance(v, SymbolicZero):
        return PASS
    if isinstance(v, ProbablyZero):
        return WARN
    return FAIL


def _worst(verdicts) -> str:
    order = [PASS, WARN, FAIL, ERROR]
    return max(verdicts, key=order.index, default=PASS)


def _expr(text, chart) -> ScalarExpr:
    return parse(str(text), chart)


# ---------------------------------------------------------------------------
# individual checks; each returns (verdict, witness)


def check_jacobi(m: Manifest, c: dict, o: Options):
    P = m.get("bivectors", c.get("bivector"))
    rep = po.jacobi_cross_check(P, o.samples, o.tol, o.seed)
    w = {"schouten": rep.schouten, "jacobiator": rep.jacobiator, "agree": rep.agree}
    if isinstance(rep.schouten, NonZero):
        w["jacobiator_magnitude_at_witness"] = po.jacobiator_magnitude_at(P, rep.schouten.witness)
    if not rep.agree:
        return FAIL, w
    return _zero_verdict(rep.schouten), w


def check_cocycle(m: Manifest, c: dict, o: Options):
    B = m.get("bialgebras", c.get("bialgebra"))
    results = {
        "jacobi": bi.check_jacobi_sc(B.algebra),
        "dual_jacobi": bi.check_jacobi_sc(bi.dual_algebra(B)),
        "cocycle": bi.check_cocycle(B),
    }
    w = {k: {"ok": r.ok, "witness": r.witness, "detail": r.detail} for k, r in results.items()}
    return (PASS if all(results.values()) else FAIL), w


def _table_json(B: bi.LieBialgebra) -> dict:
    b = B.basis
    return {
        "basis": list(b),
        "bracket": [f"[{b[i]},{b[j]}] += {v} {b[k]}" for (i, j, k), v in B.algebra.table],
        "cobracket": [f"delta({b[i]}) += {v} {b[j]}^{b[k]}" for (i, j, k), v in B.cobracket.table],
    }


def check_dual(m: Manifest, c: dict, o: Options):
    B = m.get("bialgebras", c.get("bialgebra"))
    try:
        D = bi.dualize(B)
    except bi.BialgebraError as err:
        return FAIL, {"error": str(err)}
    ok = bool(bi.check_bialgebra(D)) and bi.double_dual_roundtrip(B)
    return (PASS if ok else FAIL), {"dual": _table_json(D), "double_dual_roundtrip": bi.double_dual_roundtrip(B)}


def check_multiplicative(m: Manifest, c: dict, o: Options):
    G = m.get("groups", c.get("group"))
    r = plg.check_multiplicative(G, o.samples, o.tol, o.seed)
    pi_e = plg.pi_at_identity(G)
    vanishes = bool(np.all(pi_e == 0))
    w = {"pairs": r.pairs, "max_defect": r.max_defect, "witness": r.witness, "pi_vanishes_at_identity": vanishes}
    return (PASS if r.ok and vanishes else FAIL), w


def check_dressing(m: Manifest, c: dict, o: Options):
    G = m.get("groups", c.get("group"))
    side = c.get("side", plg.LEFT)
    fields = plg.dressing_fields(G, side)
    w: dict = {"fields": [str(f) for f in fields]}
    verdicts = []
    if "grid" in c:
        scan = plg.orbit_rank_scan(fields, {k: [float(v) for v in vs] for k, vs in c["grid"].items()})
        w["orbit_ranks"] = [{"point": list(p), "rank": r, "pi_rank": po.rank_at(G.poisson, p)} for p, r in scan.items()]
        verdicts.append(PASS if all(e["rank"] == e["pi_rank"] for e in w["orbit_ranks"]) else FAIL)
    rng = np.random.default_rng(o.seed)
    mismatches = []
    for p in G.chart.sample_points(int(c.get("random_points", o.samples)), rng):
        if plg.span_rank(fields, p) != po.rank_at(G.poisson, p):
            mismatches.append(list(map(float, p)))
    w["rank_agreement_mismatches"] = mismatches
    verdicts.append(FAIL if mismatches else PASS)
    if "bialgebra" in c:
        B = m.get("bialgebras", c["bialgebra"])
        lin = plg.linearize_at_identity(fields, G)
        match = plg.compare_with_coadjoint(lin, B.algebra, c.get("identification"))
        w["linearization"] = lin
        w["coadjoint_sign"] = match.sign
        verdicts.append(PASS if match.ok else FAIL)
    if c.get("completeness", True):
        starts = G.chart.sample_points(int(c.get("completeness_starts", 2)), np.random.default_rng(o.seed))
        probes = plg.completeness_probe(fields, starts, float(c.get("horizon", 10.0)), float(c.get("completeness_step", 1e-2)))
        w["completeness"] = [
            {"field": p.field_index, "start": list(p.start), "t": p.t_end, "status": p.status} for p in probes
        ]
    return _worst(verdicts), w


def check_action(m: Manifest, c: dict, o: Options):
    name = c.get("action")
    A = m.get("actions", name)
    P = m.get("bivectors", c.get("bivector"))
    hom = mm.check_action_homomorphism(A, m.action_expect.get(name, mm.HOMOMORPHISM))
    pa = mm.check_infinitesimal_poisson(A, P, o.samples, o.tol, o.seed)
    w = {
        "homomorphism_variant": hom.variant,
        "expected_variant": hom.expected,
        "poisson_action": pa,
    }
    verdict = _worst([PASS if hom.ok else FAIL] + [_zero_verdict(v) for v in pa.values()])
    return verdict, w


def check_moment(m: Manifest, c: dict, o: Options):
    A = m.get("actions", c.get("action"))
    mu = m.get("momentum_maps", c.get("momentum_map"))
    P = m.get("bivectors", c.get("bivector"))
    res = mm.check_momentum_map(A, mu, P, o.samples, o.tol, o.seed)
    return _worst(_zero_verdict(v) for v in res.values()), {"momentum_map": res}


def check_poisson_map(m: Manifest, c: dict, o: Options):
    mu = m.get("momentum_maps", c.get("momentum_map"))
    P = m.get("bivectors", c.get("bivector"))
    r = mm.check_poisson_map(mu, P, o.samples, o.tol, o.seed)
    return (PASS if r.ok else FAIL), {"points": r.points, "max_defect": r.max_defect, "witness": r.witness}


def check_transversals(m: Manifest, c: dict, o: Options):
    mu = m.get("momentum_maps", c.get("momentum_map"))
    P = m.get("bivectors", c.get("bivector"))
    T = mm.pull_transversals(mu, list(c.get("names", [])), P)
    w: dict = {"H": list(T.functions), "bracket_identity": T.bracket_identity}
    verdicts = [PASS if T.bracket_identity else FAIL]
    if "action" in c:
        A = m.get("actions", c["action"])
        coeffs = c.get("coefficients", "derive")
        if coeffs == "derive":
            coeffs = mm.derive_coefficients(mu, T)
        else:
            coeffs = [[_expr(x, P.chart) for x in row] for row in coeffs]
        res = mm.verify_generator_decomposition(A, T, coeffs, P, o.samples, o.tol, o.seed)
        w["coefficients"] = coeffs
        w["decomposition"] = res
        verdicts.extend(_zero_verdict(v) for v in res.values())
    return _worst(verdicts), w


def random_ideal_element(I: red.CoordinateIdeal, rng: np.random.Generator) -> ScalarExpr:
    """``sum_k m_k * gen_k`` with small random polynomial multipliers."""
    coords = [Var(x) for x in I.chart.coords]
    mults = []
    for _ in I.generators:
        m = Const(Fraction(int(rng.integers(-3, 4))))
        for _ in range(int(rng.integers(0, 3))):
            mono = Const(Fraction(int(rng.integers(-3, 4))))
            for _ in range(int(rng.integers(1, 3))):
                mono = mono * coords[int(rng.integers(len(coords)))]
            m = m + mono
        mults.append(m)
    return I.element(mults)


def check_reduce(m: Manifest, c: dict, o: Options):
    I = m.get("ideals", c.get("ideal"))
    A = m.get("actions", c.get("action"))
    P = m.get("bivectors", c.get("bivector"))
    w: dict = {"ideal": str(I)}
    verdicts = []
    inv = red.check_ideal_invariance(I, A)
    w["ideal_invariance"] = {f"{g} | {b}": ok for (g, b), ok in inv.items()}
    verdicts.append(PASS if all(inv.values()) else FAIL)
    if "transversals" in c:
        t = c["transversals"]
        T = mm.pull_transversals(m.get("momentum_maps", t.get("momentum_map")), list(t.get("names", [])), P)
        closure = red.check_ideal_poisson_closure(I, T, P)
        w["poisson_closure"] = {"ok": closure.ok, "witness": closure.witness, "residue": closure.residue}
        verdicts.append(PASS if closure.ok else FAIL)
    rng = np.random.default_rng(o.seed)
    shifts = int(c.get("shifts", 0))
    results = []
    for entry in c.get("brackets", []):
        f, g = _expr(entry["f"], P.chart), _expr(entry["g"], P.chart)
        rec: dict = {"f": f, "g": g}
        try:
            value = red.reduced_bracket(f, g, I, A, P)
        except red.MembershipUndecided as err:
            rec["error"] = str(err)
            verdicts.append(ERROR)
            results.append(rec)
            continue
        except red.ReductionError as err:
            rec["precondition_failed"] = f"{type(err).__name__}: {err}"
            verdicts.append(FAIL)
            results.append(rec)
            continue
        rec["value"] = value
        if "expect" in entry:
            ok = simplify(value - _expr(entry["expect"], P.chart)) == ZERO
            rec["matches_expected"] = ok
            verdicts.append(PASS if ok else FAIL)
        if shifts and I.generators:
            bad = 0
            for _ in range(shifts):
                i = random_ideal_element(I, rng)
                shifted = red.reduced_bracket(simplify(f + i), g, I, A, P)
                if red.ideal_reduce(shifted - value, I) != ZERO:
                    bad += 1
            rec["well_defined"] = {"shifts": shifts, "violations": bad}
            verdicts.append(FAIL if bad else PASS)
        results.append(rec)
    w["brackets"] = results
    return _worst(verdicts), w


def check_ideal_invariance(m: Manifest, c: dict, o: Options):
    I = m.get("ideals", c.get("ideal"))
    A = m.get("actions", c.get("action"))
    inv = red.check_ideal_invariance(I, A)
    holds = all(inv.values())
    expect_pass = c.get("expect", "pass") == "pass"
    w = {"ideal": str(I), "invariance": {f"{g} | {b}": ok for (g, b), ok in inv.items()}, "invariant": holds}
    return (PASS if holds == expect_pass else FAIL), w


def check_leaf_scan(m: Manifest, c: dict, o: Options):
    P = m.get("bivectors", c.get("bivector"))
    if "grid" in c:
        points = plg.grid_points(P.chart, {k: [float(v) for v in vs] for k, vs in c["grid"].items()})
    else:
        points = [tuple(map(float, p)) for p in c.get("points", [])]
    ranks = [{"point": list(p), "rank": po.rank_at(P, p)} for p in points]
    return PASS, {"ranks": ranks}


def check_casimir(m: Manifest, c: dict, o: Options):
    P = m.get("bivectors", c.get("bivector"))
    f = _expr(c.get("function"), P.chart)
    screen = po.casimir_screen(P, f)
    flows = []
    start = [float(v) for v in c.get("start")]
    t_end = float(c.get("t_end", 1.0))
    for h in c.get("hamiltonians", []):
        flows.append(po.flow(po.hamiltonian_field(P, _expr(h, P.chart)), start, t_end, o.step))
    drift = po.casimir_drift(P, f, flows)
    bound = float(c.get("drift_tol", 1e-6))
    w = {
        "screen": screen,
        "drift": drift,
        "drift_tol": bound,
        "escaped": [fr.escaped for fr in flows],
        "endpoints": [list(fr.end) for fr in flows],
    }
    ok = all(screen.values()) and drift < bound
    return (PASS if ok else FAIL), w


def check_closure(m: Manifest, c: dict, o: Options):
    A = m.get("actions", c.get("action"))
    P = m.get("bivectors", c.get("bivector"))
    fs = [_expr(t, P.chart) for t in c.get("functions", [])]
    out = {}
    verdicts = []
    for f, g in itertools.combinations(fs, 2):
        try:
            v = red.check_bracket_closure(f, g, A, P, samples=o.samples, tol=o.tol, seed=o.seed)
        except red.NotInvariantError as err:
            out[f"{f} | {g}"] = {"precondition_failed": str(err)}
            verdicts.append(FAIL)
            continue
        out[f"{f} | {g}"] = v
        verdicts.append(_zero_verdict(v))
    return _worst(verdicts), {"pairs": out}


CHECKS: dict[str, Callable] = {
    "jacobi": check_jacobi,
    "cocycle": check_cocycle,
    "dual": check_dual,
    "multiplicative": check_multiplicative,
    "dressing": check_dressing,
    "action": check_action,
    "moment": check_moment,
    "poisson-map": check_poisson_map,
    "transversals": check_transversals,
    "reduce": check_reduce,
    "ideal-invariance": check_ideal_invariance,
    "leaf-scan": check_leaf_scan,
    "casimir": check_casimir,
    "closure": check_closure,
}


def default_checks(m: Manifest, kind: str) -> list[dict]:
    """Checks synthesized when a manifest declares none of ``kind``."""
    if kind == "jacobi":
        return [{"kind": kind, "name": f"jacobi-{n}", "bivector": n} for n in m.bivectors]
    if kind in ("cocycle", "dual"):
        return [{"kind": kind, "name": f"{kind}-{n}", "bialgebra": n} for n in m.bialgebras]
    if kind in ("multiplicative", "dressing"):
        return [{"kind": kind, "name": f"{kind}-{n}", "group": n} for n in m.groups]
    return []


def select_checks(m: Manifest, kinds: Optional[list[str]]) -> list[dict]:
    if kinds is None:
        return list(m.checks)
    selected = [c for c in m.checks if c["kind"] in kinds]
    if not selected:
        for k in kinds:
            selected.extend(default_checks(m, k))
    if not selected:
        raise ManifestError(f"manifest declares no checks of kind {', '.join(kinds)}")
    return selected


def run_one(m: Manifest, c: dict, o: Options) -> CheckRecord:
    kind = c["kind"]
    if kind not in CHECKS:
        return CheckRecord(c["name"], kind, ERROR, {"error": f"unknown check kind {kind!r}"})
    t0 = time.perf_counter()
    try:
        verdict, witness = CHECKS[kind](m, c, o)
        witness = _js(witness)
    except (ManifestError, ExprError, KeyError, ValueError, TypeError) as err:
        verdict, witness = ERROR, {"error": f"{type(err).__name__}: {err}"}
    millis = int(round((time.perf_counter() - t0) * 1000)) if o.timing else 0
    return CheckRecord(c["name"], kind, verdict, witness, millis)


def run_checks(m: Manifest, o: Options, kinds: Optional[list[str]] = None) -> Report:
    """Run checks in declaration order; the report order never depends on ``--parallel``."""
    selected = select_checks(m, kinds)
    for c in selected:
        if c["kind"] not in CHECKS:
            raise ManifestError(f"unknown check kind {c['kind']!r} in {c['name']}")
    if o.parallel and len(selected) > 1:
        with ThreadPoolExecutor() as pool:
            records = list(pool.map(lambda c: run_one(m, c, o), selected))
    else:
        records = [run_one(m, c, o) for c in selected]
    return Report(o.seed, records)
