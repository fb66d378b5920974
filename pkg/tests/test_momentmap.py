import pytest

from poissonkit.bialgebra import Cobracket, LieAlgebraSC, LieBialgebra
from poissonkit.exprcore import ONE, ZERO, Chart, NonZero, SymbolicZero, Var, parse, simplify
from poissonkit.manifest import load_fixture
from poissonkit.momentmap import (
    ANTI_HOMOMORPHISM,
    HOMOMORPHISM,
    ActionSpec,
    MomentumMap,
    check_action_homomorphism,
    check_infinitesimal_poisson,
    check_momentum_map,
    check_poisson_map,
    derive_coefficients,
    pull_transversals,
    verify_generator_decomposition,
)
from poissonkit.multivec import ChartMap, bivector, vector_field
from poissonkit.plgroup import dressing_fields
from poissonkit.poisson import PoissonChart, bracket

R2 = LieAlgebraSC.from_entries(["xi", "eta"], [("xi", "eta", "eta", 1)])
R2B = LieBialgebra(R2, Cobracket.from_entries(["xi", "eta"], [("eta", "xi", "eta", 1)]))


@pytest.fixture(scope="module")
def dressing(gstar_group):
    return ActionSpec(R2B, tuple(dressing_fields(gstar_group)))


def test_dressing_is_homomorphism(dressing):
    r = check_action_homomorphism(dressing)
    assert r.variant == HOMOMORPHISM and r.ok


def test_wrong_table_is_not_homomorphism(gstar_group):
    wrong = LieBialgebra(LieAlgebraSC.from_entries(["xi", "eta"], [("xi", "eta", "xi", 1)]), Cobracket())
    r = check_action_homomorphism(ActionSpec(wrong, tuple(dressing_fields(gstar_group))))
    assert r.variant is None and not r.ok


def test_anti_homomorphism_detected(gstar_group):
    fields = [-f for f in dressing_fields(gstar_group)]
    r = check_action_homomorphism(ActionSpec(R2B, tuple(fields)), ANTI_HOMOMORPHISM)
    assert r.variant == ANTI_HOMOMORPHISM and r.ok


def test_abelian_commuting_fields():
    XY = Chart("xy", ("x", "y"))
    B = LieBialgebra(LieAlgebraSC.from_entries(["u", "v"], []), Cobracket())
    A = ActionSpec(B, (vector_field(XY, {"x": 1}), vector_field(XY, {"y": 1})))
    assert check_action_homomorphism(A).ok


def test_dressing_is_poisson_action(dressing, gstar):
    res = check_infinitesimal_poisson(dressing, gstar)
    assert all(isinstance(v, SymbolicZero) for v in res.values())


def test_zero_cobracket_requires_invariance():
    QP = Chart("qp", ("q", "p"))
    P = PoissonChart(QP, bivector(QP, [("q", "p", 1)]))
    B = LieBialgebra(LieAlgebraSC.from_entries(["u"], []), Cobracket())
    good = check_infinitesimal_poisson(ActionSpec(B, (vector_field(QP, {"q": "-1"}),)), P)
    bad = check_infinitesimal_poisson(ActionSpec(B, (vector_field(QP, {"q": "q"}),)), P)
    assert isinstance(good["u"], SymbolicZero)
    assert isinstance(bad["u"], NonZero)


def test_identity_momentum_map(gstar_manifest):
    m = gstar_manifest
    res = check_momentum_map(m.actions["dressing"], m.momentum_maps["identity"], m.bivectors["pi_gstar"])
    assert all(isinstance(v, SymbolicZero) for v in res.values())


def test_inverse_momentum_map_reported(gstar_group, dressing):
    mu = MomentumMap(ChartMap(gstar_group.chart, gstar_group.chart, gstar_group.inv), gstar_group)
    res = check_momentum_map(dressing, mu, gstar_group.poisson)
    # group inversion is not a momentum map for the left dressing action under these conventions
    assert not all(v.is_zero for v in res.values())


def test_classical_momentum_map():
    m = load_fixture("classical")
    A, P = m.actions["translation"], m.bivectors["pi_qp"]
    assert isinstance(check_momentum_map(A, m.momentum_maps["mu"], P)["xi"], SymbolicZero)
    assert isinstance(check_momentum_map(A, m.momentum_maps["mu_wrong"], P)["xi"], NonZero)


def test_poisson_map_examples(gstar_manifest):
    m = gstar_manifest
    assert check_poisson_map(m.momentum_maps["identity"], m.bivectors["pi_gstar"])
    c1 = load_fixture("gstar-case1")
    r = check_poisson_map(c1.momentum_maps["mu"], c1.bivectors["pi_pq"], 100, 1e-9)
    assert r.ok and r.points == 100
    G = c1.momentum_maps["mu"].gstar
    bad = MomentumMap(ChartMap.from_text(c1.charts["pq"], G.chart, ["exp(p)", "exp(2*q)"]), G)
    r = check_poisson_map(bad, c1.bivectors["pi_pq"])
    assert not r and r.witness is not None


def test_case1_momentum_condition():
    c1 = load_fixture("gstar-case1")
    res = check_momentum_map(c1.actions["induced"], c1.momentum_maps["mu"], c1.bivectors["pi_pq"])
    assert all(isinstance(v, SymbolicZero) for v in res.values())
    # the unreduced canonical bracket of the chart coordinates
    assert bracket(c1.bivectors["pi_pq"], Var("p"), Var("q")) == ONE


def test_case2_momentum_condition():
    c2 = load_fixture("gstar-case2")
    assert check_poisson_map(c2.momentum_maps["mu"], c2.bivectors["pi_pq"])
    res = check_momentum_map(c2.actions["induced"], c2.momentum_maps["mu"], c2.bivectors["pi_pq"])
    assert all(isinstance(v, SymbolicZero) for v in res.values())


def test_pull_transversals(gstar_manifest):
    m = gstar_manifest
    T = pull_transversals(m.momentum_maps["identity"], ["b"], m.bivectors["pi_gstar"])
    assert T.functions == (Var("b"),) and T.bracket_identity
    c1 = load_fixture("gstar-case1")
    T = pull_transversals(c1.momentum_maps["mu"], ["a", "b"], c1.bivectors["pi_pq"])
    assert T.functions[1] == simplify(parse("exp(q)"))
    assert T.bracket_identity


def test_generator_decomposition(gstar_manifest, dressing):
    m = gstar_manifest
    P = m.bivectors["pi_gstar"]
    T = pull_transversals(m.momentum_maps["identity"], ["a", "b"], P)
    coeffs = derive_coefficients(m.momentum_maps["identity"], T)
    assert coeffs == [[simplify(parse("1/a")), ZERO], [ZERO, simplify(parse("1/a"))]]
    res = verify_generator_decomposition(dressing, T, coeffs, P)
    assert all(isinstance(v, SymbolicZero) for v in res.values())
    wrong = [[ONE, ZERO], coeffs[1]]
    res = verify_generator_decomposition(dressing, T, wrong, P)
    assert isinstance(res["xi"], NonZero) and isinstance(res["eta"], SymbolicZero)


def test_zero_generator_zero_coefficients(gstar):
    c = gstar.chart
    B = LieBialgebra(LieAlgebraSC.from_entries(["u"], []), Cobracket())
    A = ActionSpec(B, (vector_field(c, {}),))
    G = load_fixture("gstar").groups["Gstar"]
    T = pull_transversals(MomentumMap(ChartMap.identity(c), G), ["a"], gstar)
    assert isinstance(verify_generator_decomposition(A, T, [[ZERO]], gstar)["u"], SymbolicZero)


def test_alt_generators_reported_as_computed():
    m = load_fixture("gstar-alt-generators")
    A, P = m.actions["alt_phi"], m.bivectors["pi_gstar"]
    c = P.chart
    assert A.generators == (vector_field(c, {"a": "-a^2*b"}), vector_field(c, {"b": "-b"}))
    assert check_action_homomorphism(A).variant is None
    assert not all(v.is_zero for v in check_infinitesimal_poisson(A, P).values())


@pytest.mark.parametrize("name", ["gstar", "gstar-case1", "gstar-case2", "classical"])
def test_momentum_and_poisson_map_imply_poisson_action(name):
    m = load_fixture(name)
    for c in m.checks:
        if c["kind"] != "moment":
            continue
        A, mu, P = m.actions[c["action"]], m.momentum_maps[c["momentum_map"]], m.bivectors[c["bivector"]]
        if all(v.is_zero for v in check_momentum_map(A, mu, P).values()) and check_poisson_map(mu, P):
            assert all(v.is_zero for v in check_infinitesimal_poisson(A, P).values())
