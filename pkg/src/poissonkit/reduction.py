"""Executable checks for Poisson reduction by a momentum map.

Reduced spaces are never built as charts. They are represented by invariant
function representatives taken modulo a coordinate ideal, i.e. an ideal
generated by ``x - c`` for distinct coordinates ``x`` and rational ``c``.
Membership in such an ideal is decided by substituting ``x = c``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import numpy as np

from .exprcore import (
    ZERO,
    Chart,
    Const,
    ScalarExpr,
    SingularityError,
    Var,
    ZeroVerdict,
    combine_verdicts,
    differentiate,
    evaluate,
    is_zero,
    parse,
    simplify,
    substitute,
    variables,
)
from .momentmap import ActionSpec, TransversalData
from .multivec import MultivectorField, apply_vector
from .poisson import PoissonChart, bracket, numeric_rank

LEVEL_TOL = 1e-9


class ReductionError(ValueError):
    pass


class MembershipUndecided(ReductionError):
    """Reducing produced a singular representative (e.g. ``1/b`` at ``b = 0``)."""


class NotInvariantError(ReductionError):
    pass


class IdealNotInvariantError(ReductionError):
    pass


class IdealNotClosedError(ReductionError):
    pass


# ---------------------------------------------------------------------------
# leaves


@dataclass(frozen=True)
class LeafSpec:
    chart: Chart
    transversals: TransversalData
    base_point: Tuple[float, ...]
    level: Tuple[float, ...]

    @classmethod
    def at(cls, chart: Chart, T: TransversalData, base_point: Sequence[float]) -> "LeafSpec":
        base = tuple(float(v) for v in base_point)
        chart.check_point(base)
        level = tuple(evaluate(h, chart, base) for h in T.functions)
        dH = np.array([[evaluate(differentiate(h, x), chart, base) for x in chart.coords] for h in T.functions])
        if numeric_rank(dH) != len(T.functions):
            raise ReductionError(f"base point {base} is not a regular point of the transversals")
        return cls(chart, T, base, level)

    def on_level(self, point: Sequence[float]) -> bool:
        return all(
            abs(evaluate(h, self.chart, point) - v) < LEVEL_TOL
            for h, v in zip(self.transversals.functions, self.level)
        )


@dataclass(frozen=True)
class TangentResult:
    ok: bool
    witness: Optional[tuple] = None
    value: float = 0.0

    def __bool__(self) -> bool:
        return self.ok


def leaf_tangent_check(L: LeafSpec, v: MultivectorField, points: Sequence[Sequence[float]], tol: float = 1e-9) -> TangentResult:
    """``<dH_i, v> = 0`` at each point of the level set."""
    for p in points:
        if not L.on_level(p):
            raise ReductionError(f"point {tuple(p)} is not on the level set")
    pairings = [apply_vector(v, h) for h in L.transversals.functions]
    for p in points:
        for e in pairings:
            value = evaluate(e, L.chart, p)
            if abs(value) > tol:
                return TangentResult(False, tuple(map(float, p)), value)
    return TangentResult(True)


# ---------------------------------------------------------------------------
# invariant functions


def check_invariant(f: ScalarExpr, A: ActionSpec, samples: int = 100, tol: float = 1e-9, seed: int = 42) -> dict[str, ZeroVerdict]:
    return {
        name: is_zero(apply_vector(X, f), A.chart, samples, tol, seed, label=f"{name}_M(f)")
        for name, X in zip(A.bialgebra.basis, A.generators)
    }


def _all_zero(verdicts: dict) -> bool:
    return all(v.is_zero for v in verdicts.values())


def check_bracket_closure(f: ScalarExpr, g: ScalarExpr, A: ActionSpec, P: PoissonChart, **kw) -> ZeroVerdict:
    for name, h in (("f", f), ("g", g)):
        if not _all_zero(check_invariant(h, A, **kw)):
            raise NotInvariantError(f"{name} = {h} is not invariant")
    return combine_verdicts(check_invariant(bracket(P, f, g), A, **kw).values())


# ---------------------------------------------------------------------------
# coordinate ideals


@dataclass(frozen=True)
class CoordinateIdeal:
    chart: Chart
    generators: Tuple[Tuple[str, Fraction], ...]  # (coordinate, value): x - value

    def __post_init__(self):
        names = [n for n, _ in self.generators]
        if len(set(names)) != len(names):
            raise ReductionError("ideal generators must involve distinct coordinates")
        for n in names:
            self.chart.index(n)
        for n, c in self.generators:
            probe = Chart("zero-set", (n,), ((n, self.chart.constraint(n)),))
            if not probe.admissible([float(c)]):
                raise ReductionError(f"zero set {n} = {c} is outside the chart domain")

    @classmethod
    def from_exprs(cls, chart: Chart, exprs: Sequence) -> "CoordinateIdeal":
        gens = []
        for e in exprs:
            if isinstance(e, str):
                e = parse(e, chart)
            e = simplify(e)
            vs = variables(e)
            if len(vs) != 1:
                raise ReductionError(f"generator {e} is not of the form coordinate - constant")
            (x,) = vs
            rest = simplify(e - Var(x))
            if not isinstance(rest, Const):
                raise ReductionError(f"generator {e} is not of the form coordinate - constant")
            gens.append((x, -rest.value))
        return cls(chart, tuple(gens))

    def exprs(self) -> list[ScalarExpr]:
        return [simplify(Var(n) - Const(c)) for n, c in self.generators]

    def substitution(self) -> dict[str, ScalarExpr]:
        return {n: Const(c) for n, c in self.generators}

    def element(self, multipliers: Sequence[ScalarExpr]) -> ScalarExpr:
        """``sum_k m_k * generator_k``."""
        out = ZERO
        for m, g in zip(multipliers, self.exprs()):
            out = out + m * g
        return simplify(out)

    def __str__(self) -> str:
        return "<" + ", ".join(str(e) for e in self.exprs()) + ">"


def ideal_reduce(f: ScalarExpr, I: CoordinateIdeal) -> ScalarExpr:
    """Normal form of ``f`` modulo ``I``; ``f`` is in ``I`` iff the result is 0."""
    try:
        return simplify(substitute(simplify(f), I.substitution()))
    except SingularityError as err:
        raise MembershipUndecided(f"membership undecided - singular representative: {err}") from err


def in_ideal(f: ScalarExpr, I: CoordinateIdeal) -> bool:
    return ideal_reduce(f, I) == ZERO


def check_ideal_invariance(I: CoordinateIdeal, A: ActionSpec) -> dict[tuple[str, str], bool]:
    """``x_M(gen)`` lies in ``I`` for every generator and basis element."""
    out = {}
    for gen in I.exprs():
        for name, X in zip(A.bialgebra.basis, A.generators):
            out[(str(gen), name)] = in_ideal(apply_vector(X, gen), I)
    return out


@dataclass(frozen=True)
class ClosureResult:
    ok: bool
    witness: Optional[tuple] = None
    residue: Optional[ScalarExpr] = None

    def __bool__(self) -> bool:
        return self.ok


def check_ideal_poisson_closure(I: CoordinateIdeal, T: TransversalData, P: PoissonChart) -> ClosureResult:
    """``{H_i, H_j}`` reduces to 0 modulo ``I`` for all pairs."""
    for n, h in zip(T.names, T.functions):
        if not isinstance(ideal_reduce(h, I), Const):
            raise ReductionError(f"transversal {n} = {h} is not constant on the zero set of {I}")
    for (i, hi), (j, hj) in itertools.combinations(enumerate(T.functions), 2):
        r = ideal_reduce(bracket(P, hi, hj), I)
        if r != ZERO:
            return ClosureResult(False, (T.names[i], T.names[j]), r)
    return ClosureResult(True)


def _generators_as_transversals(I: CoordinateIdeal) -> TransversalData:
    return TransversalData(tuple(n for n, _ in I.generators), tuple(Var(n) for n, _ in I.generators))


def reduced_bracket(f: ScalarExpr, g: ScalarExpr, I: CoordinateIdeal, A: ActionSpec, P: PoissonChart) -> ScalarExpr:
    """Bracket of two invariant classes modulo ``I``.

    Raises a distinct error for each failed precondition: a non-invariant
    representative, a non-invariant ideal, an ideal not closed under brackets.
    """
    for name, h in (("first", f), ("second", g)):
        for basis, X in zip(A.bialgebra.basis, A.generators):
            if not in_ideal(apply_vector(X, h), I):
                raise NotInvariantError(f"{name} representative {h} is not invariant modulo {I} under {basis}")
    bad = [k for k, ok in check_ideal_invariance(I, A).items() if not ok]
    if bad:
        raise IdealNotInvariantError(f"ideal {I} is not invariant: {bad}")
    closure = check_ideal_poisson_closure(I, _generators_as_transversals(I), P)
    if not closure:
        raise IdealNotClosedError(f"ideal {I} is not closed under brackets: {closure.witness}")
    return ideal_reduce(bracket(P, f, g), I)
