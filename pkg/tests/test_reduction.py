from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings

from poissonkit.bialgebra import Cobracket, LieAlgebraSC, LieBialgebra
from poissonkit.checks import random_ideal_element
from poissonkit.exprcore import ONE, ZERO, Chart, NonZero, SymbolicZero, Var, parse, simplify
from poissonkit.manifest import load_fixture
from poissonkit.momentmap import ActionSpec, TransversalData, pull_transversals
from poissonkit.multivec import bivector, vector_field
from poissonkit.poisson import PoissonChart
from poissonkit.reduction import (
    CoordinateIdeal,
    IdealNotClosedError,
    IdealNotInvariantError,
    LeafSpec,
    MembershipUndecided,
    NotInvariantError,
    ReductionError,
    check_bracket_closure,
    check_ideal_invariance,
    check_ideal_poisson_closure,
    check_invariant,
    ideal_reduce,
    in_ideal,
    leaf_tangent_check,
    reduced_bracket,
)
from strategies import polynomials


def E(text):
    return simplify(parse(text))


@pytest.fixture(scope="module")
def case3():
    return load_fixture("gstar-case3")


@pytest.fixture(scope="module")
def prod():
    return load_fixture("product")


# --- leaves -------------------------------------------------------------------


def test_leaf_tangent_examples(case3):
    m = case3
    c = m.charts["gstar"]
    T = pull_transversals(m.momentum_maps["identity"], ["b"])
    L = LeafSpec.at(c, T, (1.0, 0.5))
    pts = [(0.7, 0.5), (1.9, 0.5)]
    assert leaf_tangent_check(L, vector_field(c, {"a": 1}), pts)
    assert not leaf_tangent_check(L, vector_field(c, {"b": 1}), pts)
    assert leaf_tangent_check(L, vector_field(c, {"a": "-b"}), pts)
    with pytest.raises(ReductionError):
        leaf_tangent_check(L, vector_field(c, {"a": 1}), [(1.0, 0.7)])


def test_leaf_requires_regular_point(case3):
    c = case3.charts["gstar"]
    T = TransversalData(("b",), (E("b^2"),))
    with pytest.raises(ReductionError):
        LeafSpec.at(c, T, (1.0, 0.0))


# --- invariance and closure ---------------------------------------------------


def test_check_invariant_examples(case3, prod):
    A = case3.actions["dressing"]
    assert all(isinstance(v, SymbolicZero) for v in check_invariant(E("7"), A).values())
    assert all(isinstance(v, SymbolicZero) for v in check_invariant(E("q*p"), prod.actions["dressing"]).values())
    assert isinstance(check_invariant(Var("b"), A)["xi"], NonZero)


def test_bracket_closure_examples(prod):
    A, P = prod.actions["dressing"], prod.bivectors["pi_prod"]
    assert isinstance(check_bracket_closure(Var("q"), Var("p"), A, P), SymbolicZero)
    assert isinstance(check_bracket_closure(E("q*p"), E("q^2"), A, P), SymbolicZero)
    with pytest.raises(NotInvariantError):
        check_bracket_closure(Var("b"), Var("q"), A, P)


# --- ideals -------------------------------------------------------------------


def test_ideal_reduce_examples(case3, prod):
    I = case3.ideals["case3"]
    assert ideal_reduce(E("a - 1"), I) == ZERO
    assert ideal_reduce(E("a*b + a - 1"), I) == ZERO
    assert ideal_reduce(E("q*p"), prod.ideals["case3"]) == E("q*p")


def test_ideal_membership_undecided(case3):
    with pytest.raises(MembershipUndecided):
        ideal_reduce(E("a/b"), case3.ideals["case3"])


def test_ideal_shape_validated(case3):
    c = case3.charts["gstar"]
    with pytest.raises(ReductionError):
        CoordinateIdeal.from_exprs(c, ["a*b"])
    with pytest.raises(ReductionError):
        CoordinateIdeal.from_exprs(c, ["a - 1", "a - 2"])
    with pytest.raises(ReductionError):
        CoordinateIdeal.from_exprs(c, ["a + 1"])  # zero set a = -1 is outside a > 0
    assert CoordinateIdeal.from_exprs(c, ["b"]).generators == (("b", Fraction(0)),)


def test_ideal_invariance_examples(case3):
    inv = check_ideal_invariance(case3.ideals["case3"], case3.actions["dressing"])
    assert len(inv) == 4 and all(inv.values())
    assert all(check_ideal_invariance(case3.ideals["case3"], case3.actions["alt_phi"]).values())
    shifted = check_ideal_invariance(case3.ideals["shifted"], case3.actions["dressing"])
    assert shifted == {("b - 1", "xi"): False, ("b - 1", "eta"): True}


def test_ideal_poisson_closure_examples(case3):
    c, P = case3.charts["gstar"], case3.bivectors["pi_gstar"]
    T = pull_transversals(case3.momentum_maps["identity"], ["a", "b"], P)
    assert check_ideal_poisson_closure(case3.ideals["case3"], T, P)
    single = TransversalData(("b",), (Var("b"),))
    assert check_ideal_poisson_closure(CoordinateIdeal.from_exprs(c, ["b"]), single, P)
    Y = Chart("y", ("y1", "y2"))
    PY = PoissonChart(Y, bivector(Y, [("y1", "y2", 1)]))
    r = check_ideal_poisson_closure(
        CoordinateIdeal.from_exprs(Y, ["y1", "y2"]), TransversalData(("y1", "y2"), (Var("y1"), Var("y2"))), PY
    )
    assert not r and r.residue == ONE


# --- reduced brackets ---------------------------------------------------------


def test_reduced_bracket_product(prod):
    A, P, I = prod.actions["dressing"], prod.bivectors["pi_prod"], prod.ideals["case3"]
    assert reduced_bracket(Var("q"), Var("p"), I, A, P) == ONE
    f = E("q^2*p + 3")
    assert reduced_bracket(f, f, I, A, P) == ZERO


def test_reduced_bracket_preconditions(case3, prod):
    A, P = case3.actions["dressing"], case3.bivectors["pi_gstar"]
    with pytest.raises(NotInvariantError):
        reduced_bracket(Var("b"), Var("a"), case3.ideals["shifted"], A, P)
    with pytest.raises(IdealNotInvariantError):
        reduced_bracket(ONE, ONE, case3.ideals["shifted"], A, P)
    Y = Chart("y", ("y1", "y2"))
    PY = PoissonChart(Y, bivector(Y, [("y1", "y2", 1)]))
    trivial = ActionSpec(LieBialgebra(LieAlgebraSC.from_entries(["u"], []), Cobracket()), (vector_field(Y, {}),))
    with pytest.raises(IdealNotClosedError):
        reduced_bracket(ONE, ONE, CoordinateIdeal.from_exprs(Y, ["y1", "y2"]), trivial, PY)


def test_case1_representatives_not_invariant():
    m = load_fixture("gstar-case1")
    with pytest.raises(NotInvariantError):
        reduced_bracket(Var("p"), Var("q"), m.ideals["open"], m.actions["induced"], m.bivectors["pi_pq"])


def test_well_defined_under_shifts(case3, prod):
    rng = np.random.default_rng(42)
    for m, bivec, pairs in (
        (case3, "pi_gstar", [("a^2 + b", "a*b"), ("a", "b")]),
        (prod, "pi_prod", [("q", "p"), ("q*p", "q^2")]),
    ):
        I = m.ideals["case3"]
        A, P = m.actions["dressing"], m.bivectors[bivec]
        for f, g in pairs:
            f, g = E(f), E(g)
            base = reduced_bracket(f, g, I, A, P)
            for _ in range(25):
                i = random_ideal_element(I, rng)
                assert in_ideal(i, I)
                assert ideal_reduce(reduced_bracket(simplify(f + i), g, I, A, P) - base, I) == ZERO


# --- properties ---------------------------------------------------------------

SETTINGS = settings(max_examples=40, deadline=None)
POLY = polynomials(["a", "b", "q", "p"], max_leaves=5)
PRODUCT = load_fixture("product")
PROD_I = CoordinateIdeal.from_exprs(Chart("prod", ("a", "b", "q", "p"), (("a", "positive"),)), ["a - 1", "b"])


@SETTINGS
@given(POLY, POLY)
def test_ideal_reduce_idempotent_linear_multiplicative(f, g):
    I = PROD_I
    rf, rg = ideal_reduce(f, I), ideal_reduce(g, I)
    assert ideal_reduce(rf, I) == rf
    assert ideal_reduce(f + g, I) == simplify(rf + rg)
    assert ideal_reduce(f * g, I) == ideal_reduce(rf * rg, I)


@SETTINGS
@given(polynomials(["q", "p"], 5), polynomials(["q", "p"], 5))
def test_closure_for_qp_functions(f, g):
    m = PRODUCT
    v = check_bracket_closure(f, g, m.actions["dressing"], m.bivectors["pi_prod"])
    assert isinstance(v, SymbolicZero)
