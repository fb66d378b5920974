"""Infinitesimal Poisson actions of Lie bialgebras and their momentum maps."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import numpy as np

from .bialgebra import LieBialgebra, _unit
from .exprcore import (
    DEFAULT_SEED,
    DEFAULT_TOL,
    ZERO,
    Chart,
    DomainViolationError,
    SamplingError,
    ScalarExpr,
    SingularityError,
    Var,
    ZeroVerdict,
    combine_verdicts,
    evaluate,
    is_zero,
    simplify,
)
from .multivec import (
    ChartMap,
    ChartMismatchError,
    MultivectorField,
    lie_derivative,
    pullback_form,
    pushforward_bivector_at,
    schouten,
    wedge,
    zero_field,
)
from .plgroup import LEFT, GroupChart, invariant_frame
from .poisson import PoissonChart, bracket, hamiltonian_field, sharp

HOMOMORPHISM = "homomorphism"
ANTI_HOMOMORPHISM = "anti-homomorphism"


@dataclass(frozen=True)
class ActionSpec:
    bialgebra: LieBialgebra
    generators: Tuple[MultivectorField, ...]

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        if len(self.generators) != self.bialgebra.dim:
            raise ValueError("need one generator per basis element")
        charts = {g.chart for g in self.generators}
        if len(charts) != 1:
            raise ChartMismatchError("generators live on different charts")
        if any(g.degree != 1 for g in self.generators):
            raise ValueError("generators must be vector fields")

    @property
    def chart(self) -> Chart:
        return self.generators[0].chart

    def image(self, x: Sequence[Fraction]) -> MultivectorField:
        """``x_M`` for ``x = sum x_i e_i``."""
        out = zero_field(self.chart, 1)
        for xi, g in zip(x, self.generators):
            if xi:
                out = out + g.scale(ZERO + xi)
        return out

    def wedge_image(self, w: dict) -> MultivectorField:
        """``(e_j ^ e_k)_M := (e_j)_M ^ (e_k)_M``, extended linearly."""
        out = zero_field(self.chart, 2)
        for (j, k), d in w.items():
            if d:
                out = out + wedge(self.generators[j], self.generators[k]).scale(ZERO + d)
        return out


def _verdict_field(F: MultivectorField, samples: int, tol: float, seed: int, label: str) -> ZeroVerdict:
    return combine_verdicts(
        is_zero(c, F.chart, samples, tol, seed, label=f"{label}{list(k)}") for k, c in sorted(F.components.items())
    )


# ---------------------------------------------------------------------------
# action checks


@dataclass(frozen=True)
class HomomorphismResult:
    variant: Optional[str]
    pairs: dict = field(default_factory=dict)  # (i, j) -> (hom holds, anti holds)
    expected: str = HOMOMORPHISM

    @property
    def ok(self) -> bool:
        return self.variant == self.expected or (
            self.variant == "both" and self.expected in (HOMOMORPHISM, ANTI_HOMOMORPHISM)
        )

    def __bool__(self) -> bool:
        return self.ok


def check_action_homomorphism(A: ActionSpec, expected: str = HOMOMORPHISM) -> HomomorphismResult:
    """Compare ``[x_M, y_M]`` with ``([x, y])_M`` and with its negative."""
    alg = A.bialgebra.algebra
    n = alg.dim
    pairs = {}
    for i, j in itertools.combinations(range(n), 2):
        lhs = schouten(A.generators[i], A.generators[j])
        rhs = A.image(alg.bracket(_unit(n, i), _unit(n, j)))
        pairs[(i, j)] = ((lhs - rhs).is_zero(), (lhs + rhs).is_zero())
    hom = all(h for h, _ in pairs.values())
    anti = all(a for _, a in pairs.values())
    variant = "both" if hom and anti else HOMOMORPHISM if hom else ANTI_HOMOMORPHISM if anti else None
    return HomomorphismResult(variant, pairs, expected)


def infinitesimal_poisson_defect(A: ActionSpec, P: PoissonChart, i: int) -> MultivectorField:
    """``L_{x_M} pi + (delta(x))_M`` for basis element ``i``."""
    if A.chart != P.chart:
        raise ChartMismatchError("action and Poisson structure on different charts")
    return lie_derivative(A.generators[i], P.pi) + A.wedge_image(A.bialgebra.cobracket.delta(i))


def check_infinitesimal_poisson(
    A: ActionSpec, P: PoissonChart, samples: int = 100, tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED
) -> dict[str, ZeroVerdict]:
    return {
        name: _verdict_field(infinitesimal_poisson_defect(A, P, i), samples, tol, seed, f"pa[{name}]")
        for i, name in enumerate(A.bialgebra.basis)
    }


# ---------------------------------------------------------------------------
# momentum maps


@dataclass(frozen=True)
class MomentumMap:
    map: ChartMap
    gstar: GroupChart
    identification: Optional[Tuple[int, ...]] = None  # basis index -> coframe index

    def __post_init__(self):
        if self.map.target != self.gstar.chart:
            raise ChartMismatchError("momentum map must land in the G* chart")

    def theta(self, i: int):
        frame = invariant_frame(self.gstar, LEFT)
        if frame.forms is None:
            raise ValueError("symbolic coframe unavailable")
        k = self.identification[i] if self.identification is not None else i
        return frame.forms[k]


def momentum_defect(A: ActionSpec, mu: MomentumMap, P: PoissonChart, i: int) -> MultivectorField:
    return A.generators[i] - sharp(P, pullback_form(mu.map, mu.theta(i)))


def check_momentum_map(
    A: ActionSpec, mu: MomentumMap, P: PoissonChart, samples: int = 100, tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED
) -> dict[str, ZeroVerdict]:
    """``x_M = pi^#(mu^* theta_x)`` per basis element."""
    if mu.gstar.dim != A.bialgebra.dim:
        raise ValueError("G* dimension differs from the bialgebra dimension")
    return {
        name: _verdict_field(momentum_defect(A, mu, P, i), samples, tol, seed, f"mm[{name}]")
        for i, name in enumerate(A.bialgebra.basis)
    }


@dataclass(frozen=True)
class PoissonMapResult:
    ok: bool
    points: int
    max_defect: float
    witness: Optional[tuple] = None

    def __bool__(self) -> bool:
        return self.ok


def check_poisson_map(
    mu: MomentumMap, P_source: PoissonChart, samples: int = 100, tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED
) -> PoissonMapResult:
    """``mu_* pi = pi_{G*}`` at seeded random points of the source chart."""
    chart = P_source.chart
    target = mu.gstar.poisson
    rng = np.random.default_rng(seed)
    done, worst, attempts = 0, 0.0, 0
    while done < samples:
        attempts += 1
        if attempts > 50 * samples:
            raise SamplingError("could not sample admissible points for the Poisson-map check")
        x = chart.sample_points(1, rng)[0]
        try:
            image = mu.map.at(x)
            if not target.chart.admissible(image):
                continue
            pushed = pushforward_bivector_at(mu.map, P_source.pi, x)
            expected = target.pi.matrix_at(image)
        except (SingularityError, DomainViolationError):
            continue
        done += 1
        defect = float(np.max(np.abs(pushed - expected))) / max(1.0, float(np.max(np.abs(expected))))
        worst = max(worst, defect)
        if defect > tol:
            return PoissonMapResult(False, done, worst, tuple(map(float, x)))
    return PoissonMapResult(True, done, worst)


# ---------------------------------------------------------------------------
# transversal data


@dataclass(frozen=True)
class TransversalData:
    names: Tuple[str, ...]
    functions: Tuple[ScalarExpr, ...]
    bracket_identity: Optional[bool] = None  # {H_i,H_j}_M == {y_i,y_j} o mu, structurally


def pull_transversals(mu: MomentumMap, names: Sequence[str], P_source: Optional[PoissonChart] = None) -> TransversalData:
    gstar = mu.gstar.chart
    for n in names:
        gstar.index(n)
    H = tuple(mu.map.pull(Var(n)) for n in names)
    identity = None
    if P_source is not None:
        identity = True
        for (i, yi), (j, yj) in itertools.combinations(enumerate(names), 2):
            lhs = bracket(P_source, H[i], H[j])
            rhs = mu.map.pull(bracket(mu.gstar.poisson, Var(yi), Var(yj)))
            if simplify(lhs - rhs) != ZERO:
                identity = False
    return TransversalData(tuple(names), H, identity)


def derive_coefficients(mu: MomentumMap, T: TransversalData) -> list[list[ScalarExpr]]:
    """``c_i(x)`` from ``theta_x = sum_i c_i dy_i``, composed with ``mu``.

    Requires ``theta_x`` to have no component off the transversal coordinates.
    """
    chart = mu.gstar.chart
    idx = [chart.index(n) for n in T.names]
    out = []
    for i in range(mu.gstar.dim):
        theta = mu.theta(i)
        off = [c for k, c in enumerate(theta.components) if k not in idx and c != ZERO]
        if off:
            raise ValueError("coframe form has components off the transversal coordinates")
        out.append([mu.map.pull(theta.components[k]) for k in idx])
    return out


def verify_generator_decomposition(
    A: ActionSpec,
    T: TransversalData,
    coeffs: Sequence[Sequence[ScalarExpr]],
    P: PoissonChart,
    samples: int = 100,
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
) -> dict[str, ZeroVerdict]:
    """Verify ``x_M = sum_i c_i(x) X_{H_i}`` for supplied coefficients."""
    fields = [hamiltonian_field(P, h) for h in T.functions]
    out = {}
    for i, name in enumerate(A.bialgebra.basis):
        if len(coeffs[i]) != len(T.functions):
            raise ValueError("coefficient count must equal the transversal count")
        combo = zero_field(P.chart, 1)
        for c, X in zip(coeffs[i], fields):
            combo = combo + X.scale(c)
        out[name] = _verdict_field(A.generators[i] - combo, samples, tol, seed, f"xis[{name}]")
    return out
