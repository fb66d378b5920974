"""Multivector fields, 1-forms and chart maps in coordinates.

A degree-k multivector field is stored sparsely on strictly increasing index
tuples: ``{(i1, ..., ik): f}`` stands for ``f d_{i1} ^ ... ^ d_{ik}``.
Internally the fields are treated as polynomials in anticommuting symbols
``z_i`` (one per coordinate), which makes the Schouten bracket a two-term
formula in derivatives.

Sign convention: ``schouten(X, A)`` equals the Lie derivative ``L_X A`` for a
vector field ``X``, and ``schouten(pi, pi) == 0`` iff ``pi`` is Poisson.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .exprcore import (
    ZERO,
    Chart,
    ScalarExpr,
    Var,
    differentiate,
    evaluate,
    parse,
    simplify,
    substitute,
)

Key = Tuple[int, ...]
ExprLike = Union[ScalarExpr, str, int]


class ChartMismatchError(ValueError):
    pass


def _expr(chart: Chart, e: ExprLike) -> ScalarExpr:
    if isinstance(e, str):
        return parse(e, chart)
    if isinstance(e, int):
        return ZERO + e
    return e


def _sort_sign(indices: Sequence[int]) -> tuple[int, Key]:
    """Sign of the permutation sorting ``indices``; sign 0 on repeats."""
    if len(set(indices)) != len(indices):
        return 0, ()
    inversions = sum(
        1 for a in range(len(indices)) for b in range(a + 1, len(indices)) if indices[a] > indices[b]
    )
    return (-1 if inversions % 2 else 1), tuple(sorted(indices))


def _same_chart(*objs) -> Chart:
    chart = objs[0].chart
    for o in objs[1:]:
        if o.chart != chart:
            raise ChartMismatchError(f"chart mismatch: {chart.name} vs {o.chart.name}")
    return chart


@dataclass(frozen=True)
class MultivectorField:
    chart: Chart
    degree: int
    components: Mapping[Key, ScalarExpr] = field(default_factory=dict)

    def __post_init__(self):
        comps = {}
        for key, value in self.components.items():
            key = tuple(key)
            if len(key) != self.degree or any(a >= b for a, b in zip(key, key[1:])):
                raise ValueError(f"bad component key {key} for degree {self.degree}")
            if key and not all(0 <= i < self.chart.dim for i in key):
                raise ValueError(f"component key {key} out of range")
            value = simplify(value)
            if value != ZERO:
                comps[key] = value
        object.__setattr__(self, "components", comps)

    def component(self, indices: Sequence[Union[int, str]]) -> ScalarExpr:
        """Component for any index order, with the permutation sign applied."""
        idx = [self.chart.index(i) if isinstance(i, str) else i for i in indices]
        sign, key = _sort_sign(idx)
        if sign == 0:
            return ZERO
        value = self.components.get(key, ZERO)
        return value if sign > 0 else simplify(-value)

    def is_zero(self) -> bool:
        return not self.components

    def __add__(self, other: "MultivectorField") -> "MultivectorField":
        _same_chart(self, other)
        if other.degree != self.degree:
            raise ValueError("cannot add multivectors of different degree")
        comps = dict(self.components)
        for k, v in other.components.items():
            comps[k] = comps.get(k, ZERO) + v
        return MultivectorField(self.chart, self.degree, comps)

    def __neg__(self) -> "MultivectorField":
        return MultivectorField(self.chart, self.degree, {k: -v for k, v in self.components.items()})

    def __sub__(self, other: "MultivectorField") -> "MultivectorField":
        return self + (-other)

    def scale(self, f: ExprLike) -> "MultivectorField":
        f = _expr(self.chart, f)
        return MultivectorField(self.chart, self.degree, {k: f * v for k, v in self.components.items()})

    def at(self, point: Sequence[float]) -> dict[Key, float]:
        return {k: evaluate(v, self.chart, point) for k, v in self.components.items()}

    def vector_at(self, point: Sequence[float]) -> np.ndarray:
        if self.degree != 1:
            raise ValueError("vector_at needs a vector field")
        out = np.zeros(self.chart.dim)
        for (i,), v in self.components.items():
            out[i] = evaluate(v, self.chart, point)
        return out

    def matrix_at(self, point: Sequence[float]) -> np.ndarray:
        """Skew matrix of a bivector at ``point``."""
        if self.degree != 2:
            raise ValueError("matrix_at needs a bivector")
        n = self.chart.dim
        out = np.zeros((n, n))
        for (i, j), v in self.components.items():
            val = evaluate(v, self.chart, point)
            out[i, j], out[j, i] = val, -val
        return out

    def __str__(self) -> str:
        if not self.components:
            return "0"
        parts = []
        for key, v in sorted(self.components.items()):
            basis = "^".join(f"d_{self.chart.coords[i]}" for i in key)
            parts.append(f"({v})" + (f"*{basis}" if basis else ""))
        return " + ".join(parts)


def scalar_field(chart: Chart, f: ExprLike) -> MultivectorField:
    return MultivectorField(chart, 0, {(): _expr(chart, f)})


def vector_field(chart: Chart, comps: Union[Mapping[str, ExprLike], Sequence[ExprLike]]) -> MultivectorField:
    if isinstance(comps, Mapping):
        items = [(chart.index(name), _expr(chart, e)) for name, e in comps.items()]
    else:
        if len(comps) != chart.dim:
            raise ValueError("vector field needs one component per coordinate")
        items = [(i, _expr(chart, e)) for i, e in enumerate(comps)]
    return MultivectorField(chart, 1, {(i,): e for i, e in items})


def multivector(chart: Chart, degree: int, terms: Iterable[tuple[Sequence[Union[str, int]], ExprLike]]) -> MultivectorField:
    """Build from ``(indices, coefficient)`` terms in any index order."""
    comps: dict[Key, ScalarExpr] = {}
    for indices, coeff in terms:
        if len(indices) != degree:
            raise ValueError(f"term {indices} does not have degree {degree}")
        idx = [chart.index(i) if isinstance(i, str) else i for i in indices]
        sign, key = _sort_sign(idx)
        if sign == 0:
            continue
        c = _expr(chart, coeff)
        comps[key] = comps.get(key, ZERO) + (c if sign > 0 else -c)
    return MultivectorField(chart, degree, comps)


def bivector(chart: Chart, terms: Iterable[tuple[str, str, ExprLike]]) -> MultivectorField:
    return multivector(chart, 2, (((i, j), c) for i, j, c in terms))


def zero_field(chart: Chart, degree: int) -> MultivectorField:
    return MultivectorField(chart, degree, {})


# ---------------------------------------------------------------------------
# algebra


def wedge(A: MultivectorField, B: MultivectorField) -> MultivectorField:
    chart = _same_chart(A, B)
    comps: dict[Key, ScalarExpr] = {}
    for I, a in A.components.items():
        for J, b in B.components.items():
            sign, K = _sort_sign(I + J)
            if sign == 0:
                continue
            term = a * b
            comps[K] = comps.get(K, ZERO) + (term if sign > 0 else -term)
    degree = A.degree + B.degree
    if degree > chart.dim:
        comps = {}
    return MultivectorField(chart, degree, comps)


def _partial(A: MultivectorField, i: int) -> MultivectorField:
    x = A.chart.coords[i]
    return MultivectorField(A.chart, A.degree, {k: differentiate(v, x) for k, v in A.components.items()})


def _odd_derivative(A: MultivectorField, i: int, right: bool) -> MultivectorField:
    comps: dict[Key, ScalarExpr] = {}
    for key, v in A.components.items():
        if i not in key:
            continue
        pos = key.index(i)
        moves = len(key) - 1 - pos if right else pos
        rest = key[:pos] + key[pos + 1 :]
        comps[rest] = -v if moves % 2 else v
    return MultivectorField(A.chart, A.degree - 1, comps)


def schouten(A: MultivectorField, B: MultivectorField) -> MultivectorField:
    """Schouten-Nijenhuis bracket, degree ``k + l - 1``."""
    chart = _same_chart(A, B)
    k, l = A.degree, B.degree
    if k + l < 1:
        raise ValueError("schouten bracket of two functions is undefined")
    sign = -1 if ((k - 1) * (l - 1)) % 2 else 1
    result = zero_field(chart, k + l - 1)
    for i in range(chart.dim):
        if k > 0:
            result = result + wedge(_odd_derivative(A, i, right=True), _partial(B, i))
        if l > 0:
            term = wedge(_odd_derivative(B, i, right=True), _partial(A, i))
            result = result - term if sign > 0 else result + term
    return result


def lie_derivative(X: MultivectorField, A: MultivectorField) -> MultivectorField:
    if X.degree != 1:
        raise ValueError("Lie derivative needs a vector field")
    return schouten(X, A)


def apply_vector(X: MultivectorField, f: ScalarExpr) -> ScalarExpr:
    """Directional derivative ``X(f)``, simplified."""
    if X.degree != 1:
        raise ValueError("apply_vector needs a vector field")
    out = ZERO
    for (i,), v in X.components.items():
        out = out + v * differentiate(f, X.chart.coords[i])
    return simplify(out)


# ---------------------------------------------------------------------------
# 1-forms


@dataclass(frozen=True)
class CovectorField:
    chart: Chart
    components: Tuple[ScalarExpr, ...]

    def __post_init__(self):
        comps = tuple(simplify(c) for c in self.components)
        if len(comps) != self.chart.dim:
            raise ValueError("covector needs one component per coordinate")
        object.__setattr__(self, "components", comps)

    def __add__(self, other: "CovectorField") -> "CovectorField":
        _same_chart(self, other)
        return CovectorField(self.chart, tuple(a + b for a, b in zip(self.components, other.components)))

    def scale(self, f: ExprLike) -> "CovectorField":
        f = _expr(self.chart, f)
        return CovectorField(self.chart, tuple(f * c for c in self.components))

    def at(self, point: Sequence[float]) -> np.ndarray:
        return np.array([evaluate(c, self.chart, point) for c in self.components])

    def __str__(self) -> str:
        parts = [f"({c})*d{x}" for c, x in zip(self.components, self.chart.coords) if c != ZERO]
        return " + ".join(parts) or "0"


def covector(chart: Chart, comps: Union[Mapping[str, ExprLike], Sequence[ExprLike]]) -> CovectorField:
    if isinstance(comps, Mapping):
        out = [ZERO] * chart.dim
        for name, e in comps.items():
            out[chart.index(name)] = _expr(chart, e)
        return CovectorField(chart, tuple(out))
    return CovectorField(chart, tuple(_expr(chart, e) for e in comps))


def differential(chart: Chart, f: ExprLike) -> CovectorField:
    f = _expr(chart, f)
    return CovectorField(chart, tuple(differentiate(f, x) for x in chart.coords))


def contract(A: MultivectorField, alpha: CovectorField) -> MultivectorField:
    """Insert ``alpha`` into the first slot of ``A``."""
    chart = _same_chart(A, alpha)
    if A.degree < 1:
        raise ValueError("cannot contract a function")
    result = zero_field(chart, A.degree - 1)
    for i, a in enumerate(alpha.components):
        if a != ZERO:
            result = result + _odd_derivative(A, i, right=False).scale(a)
    return result


def pair(alpha: CovectorField, X: MultivectorField) -> ScalarExpr:
    """``<alpha, X>`` for a vector field ``X``."""
    return contract(X, alpha).components.get((), ZERO)


# ---------------------------------------------------------------------------
# chart maps


@dataclass(frozen=True)
class ChartMap:
    source: Chart
    target: Chart
    components: Tuple[ScalarExpr, ...]

    def __post_init__(self):
        if len(self.components) != self.target.dim:
            raise ValueError("chart map needs one component per target coordinate")
        object.__setattr__(self, "components", tuple(self.components))

    @classmethod
    def from_text(cls, source: Chart, target: Chart, comps: Sequence[str]) -> "ChartMap":
        return cls(source, target, tuple(parse(c, source) for c in comps))

    @classmethod
    def identity(cls, chart: Chart) -> "ChartMap":
        return cls(chart, chart, tuple(Var(x) for x in chart.coords))

    def substitution(self) -> dict[str, ScalarExpr]:
        return dict(zip(self.target.coords, self.components))

    def compose(self, inner: "ChartMap") -> "ChartMap":
        """``self o inner``."""
        if inner.target != self.source:
            raise ChartMismatchError("cannot compose: chart mismatch")
        sub = inner.substitution()
        return ChartMap(inner.source, self.target, tuple(simplify(substitute(c, sub)) for c in self.components))

    def pull(self, f: ScalarExpr) -> ScalarExpr:
        """``f o mu`` for a function on the target chart."""
        return simplify(substitute(f, self.substitution()))

    def jacobian(self) -> list[list[ScalarExpr]]:
        """``J[j][i] = d mu_j / d x_i``."""
        return [[differentiate(c, x) for x in self.source.coords] for c in self.components]

    def at(self, point: Sequence[float]) -> np.ndarray:
        return np.array([evaluate(c, self.source, point) for c in self.components])

    def jacobian_at(self, point: Sequence[float]) -> np.ndarray:
        self.source.check_point(point)
        return np.array([[evaluate(d, self.source, point, check_domain=False) for d in row] for row in self.jacobian()])


def pullback_form(mu: ChartMap, theta: CovectorField) -> CovectorField:
    if theta.chart != mu.target:
        raise ChartMismatchError("form does not live on the target of the map")
    sub = mu.substitution()
    composed = [substitute(t, sub) for t in theta.components]
    J = mu.jacobian()
    comps = []
    for i in range(mu.source.dim):
        acc = ZERO
        for j, t in enumerate(composed):
            if t != ZERO and J[j][i] != ZERO:
                acc = acc + t * J[j][i]
        comps.append(acc)
    return CovectorField(mu.source, tuple(comps))


def pushforward_bivector_at(mu: ChartMap, pi: MultivectorField, point: Sequence[float]) -> np.ndarray:
    if pi.chart != mu.source:
        raise ChartMismatchError("bivector does not live on the source of the map")
    J = mu.jacobian_at(point)
    return J @ pi.matrix_at(point) @ J.T
