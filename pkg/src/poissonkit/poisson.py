"""Poisson charts: brackets, Hamiltonian fields, Jacobi checks, rank and flows."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .exprcore import (
    DEFAULT_SEED,
    DEFAULT_TOL,
    ZERO,
    Chart,
    DomainViolationError,
    NonZero,
    ScalarExpr,
    SingularityError,
    SymbolicZero,
    Var,
    ZeroVerdict,
    combine_verdicts,
    differentiate,
    evaluate,
    is_zero,
    simplify,
)
from .multivec import (
    ChartMismatchError,
    CovectorField,
    MultivectorField,
    contract,
    differential,
    schouten,
)

PIVOT_THRESHOLD = 1e-10
BLOWUP = 1e12


class InternalError(RuntimeError):
    pass


@dataclass(frozen=True)
class PoissonChart:
    chart: Chart
    pi: MultivectorField
    label: str = ""

    def __post_init__(self):
        if self.pi.degree != 2:
            raise ValueError("Poisson structure must be a bivector")
        if self.pi.chart != self.chart:
            raise ChartMismatchError("bivector does not live on the chart")

    def _own(self, obj) -> None:
        if getattr(obj, "chart", self.chart) != self.chart:
            raise ChartMismatchError(f"object is not on chart {self.chart.name}")


def bracket(P: PoissonChart, f: ScalarExpr, g: ScalarExpr) -> ScalarExpr:
    """``{f, g} = pi(df, dg)``."""
    coords = P.chart.coords
    df = [differentiate(f, x) for x in coords]
    dg = [differentiate(g, x) for x in coords]
    out = ZERO
    for (i, j), c in P.pi.components.items():
        term = df[i] * dg[j] - df[j] * dg[i]
        out = out + c * term
    return simplify(out)


def sharp(P: PoissonChart, alpha: CovectorField) -> MultivectorField:
    P._own(alpha)
    return contract(P.pi, alpha)


def hamiltonian_field(P: PoissonChart, f: ScalarExpr) -> MultivectorField:
    """``X_f = pi^#(df)``, so that ``X_f(g) = {f, g}``."""
    return sharp(P, differential(P.chart, f))


def jacobi_tensor(P: PoissonChart) -> MultivectorField:
    return schouten(P.pi, P.pi)


def check_jacobi(P: PoissonChart, samples: int = 100, tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED) -> ZeroVerdict:
    """Zero test of every component of ``[pi, pi]``."""
    J = jacobi_tensor(P)
    verdicts = []
    for key, c in sorted(J.components.items()):
        label = "[pi,pi]^" + "".join(P.chart.coords[i] for i in key)
        verdicts.append(is_zero(c, P.chart, samples, tol, seed, label=label))
    return combine_verdicts(verdicts)


def jacobiator(P: PoissonChart, f: ScalarExpr, g: ScalarExpr, h: ScalarExpr) -> ScalarExpr:
    return simplify(
        bracket(P, bracket(P, f, g), h) + bracket(P, bracket(P, g, h), f) + bracket(P, bracket(P, h, f), g)
    )


def coordinate_jacobiators(P: PoissonChart) -> dict[tuple[str, str, str], ScalarExpr]:
    xs = P.chart.coords
    return {t: jacobiator(P, Var(t[0]), Var(t[1]), Var(t[2])) for t in itertools.combinations(xs, 3)}


def check_jacobiator(P: PoissonChart, samples: int = 100, tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED) -> ZeroVerdict:
    """Function-level Jacobi test on all coordinate triples (independent of the Schouten path)."""
    verdicts = [
        is_zero(e, P.chart, samples, tol, seed, label="jacobiator(" + ",".join(t) + ")")
        for t, e in coordinate_jacobiators(P).items()
    ]
    return combine_verdicts(verdicts)


def jacobiator_magnitude_at(P: PoissonChart, point: Sequence[float]) -> float:
    values = [abs(evaluate(e, P.chart, point)) for e in coordinate_jacobiators(P).values()]
    return max(values, default=0.0)


@dataclass(frozen=True)
class JacobiReport:
    schouten: ZeroVerdict
    jacobiator: ZeroVerdict

    @property
    def agree(self) -> bool:
        return self.schouten.is_zero == self.jacobiator.is_zero


def jacobi_cross_check(P: PoissonChart, samples: int = 100, tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED) -> JacobiReport:
    return JacobiReport(check_jacobi(P, samples, tol, seed), check_jacobiator(P, samples, tol, seed))


# ---------------------------------------------------------------------------
# rank


def numeric_rank(matrix, threshold: float = PIVOT_THRESHOLD) -> int:
    """Rank by Gaussian elimination with partial pivoting."""
    A = np.array(matrix, dtype=float, copy=True)
    if A.size == 0:
        return 0
    rows, cols = A.shape
    rank = 0
    for col in range(cols):
        if rank == rows:
            break
        pivot = rank + int(np.argmax(np.abs(A[rank:, col])))
        if abs(A[pivot, col]) <= threshold:
            continue
        A[[rank, pivot]] = A[[pivot, rank]]
        A[rank + 1 :] -= np.outer(A[rank + 1 :, col] / A[rank, col], A[rank])
        rank += 1
    return rank


def rank_at(P: PoissonChart, point: Sequence[float]) -> int:
    r = numeric_rank(P.pi.matrix_at(point))
    if r % 2:
        raise InternalError(f"odd rank {r} of a skew matrix at {tuple(point)}")
    return r


# ---------------------------------------------------------------------------
# flows


@dataclass(frozen=True)
class FlowResult:
    times: tuple[float, ...]
    points: tuple[tuple[float, ...], ...]
    escaped: bool = False

    @property
    def start(self) -> tuple[float, ...]:
        return self.points[0]

    @property
    def end(self) -> tuple[float, ...]:
        return self.points[-1]

    @property
    def trajectory(self) -> list[tuple[float, tuple[float, ...]]]:
        return list(zip(self.times, self.points))


def flow(X: MultivectorField, start: Sequence[float], t_end: float, step: float) -> FlowResult:
    """Fixed-step classical RK4; negative ``t_end`` integrates backwards."""
    if not step > 0:
        raise ValueError("step must be positive")
    chart = X.chart
    chart.check_point(start)
    n_steps = max(1, math.ceil(abs(t_end) / step - 1e-12))
    h = t_end / n_steps

    def rhs(y):
        return X.vector_at(y)

    y = np.array(start, dtype=float)
    times, points = [0.0], [tuple(y)]
    for n in range(n_steps):
        try:
            k1 = rhs(y)
            k2 = rhs(y + 0.5 * h * k1)
            k3 = rhs(y + 0.5 * h * k2)
            k4 = rhs(y + h * k3)
        except (SingularityError, DomainViolationError):
            return FlowResult(tuple(times), tuple(points), True)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(y)) or np.max(np.abs(y)) > BLOWUP or not chart.admissible(y):
            return FlowResult(tuple(times), tuple(points), True)
        times.append((n + 1) * h)
        points.append(tuple(float(v) for v in y))
    return FlowResult(tuple(times), tuple(points), False)


def casimir_drift(P: PoissonChart, f: ScalarExpr, flows: Sequence[FlowResult]) -> float:
    drift = 0.0
    for fr in flows:
        f0 = evaluate(f, P.chart, fr.start)
        for pt in fr.points:
            drift = max(drift, abs(evaluate(f, P.chart, pt) - f0))
    return drift


def casimir_screen(P: PoissonChart, f: ScalarExpr) -> dict[str, bool]:
    """Whether ``{f, x_i}`` simplifies to 0, per coordinate."""
    return {x: bracket(P, f, Var(x)) == ZERO for x in P.chart.coords}
