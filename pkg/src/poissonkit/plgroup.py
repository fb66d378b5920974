"""Poisson Lie groups on a single chart with an explicit group law."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .bialgebra import Cobracket, LieAlgebraSC
from .exprcore import (
    DEFAULT_SEED,
    DEFAULT_TOL,
    ZERO,
    Chart,
    Const,
    DomainViolationError,
    ScalarExpr,
    SingularityError,
    SamplingError,
    Var,
    differentiate,
    evaluate,
    parse,
    simplify,
    substitute,
)
from .multivec import CovectorField, MultivectorField, vector_field
from .poisson import FlowResult, PoissonChart, flow, numeric_rank, sharp

SYMBOLIC_MAX_DIM = 4
LEFT, RIGHT = "left", "right"


class GroupLawError(ValueError):
    pass


def pair_chart(chart: Chart) -> Chart:
    """Chart on G x G with coordinates suffixed ``1`` and ``2``."""
    coords = [c + "1" for c in chart.coords] + [c + "2" for c in chart.coords]
    domain = [(n + s, c) for s in ("1", "2") for n, c in chart.domain]
    return Chart(chart.name + "^2", tuple(coords), tuple(domain))


@dataclass(frozen=True)
class GroupChart:
    poisson: PoissonChart
    mul: Tuple[ScalarExpr, ...]
    identity: Tuple[Fraction, ...]
    inv: Optional[Tuple[ScalarExpr, ...]] = None

    @classmethod
    def from_text(
        cls,
        poisson: PoissonChart,
        mul: Sequence[str],
        identity: Sequence,
        inv: Optional[Sequence[str]] = None,
        validate: bool = True,
    ) -> "GroupChart":
        pc = pair_chart(poisson.chart)
        G = cls(
            poisson,
            tuple(parse(m, pc) for m in mul),
            tuple(Fraction(x) for x in identity),
            tuple(parse(e, poisson.chart) for e in inv) if inv is not None else None,
        )
        if validate:
            G.validate()
        return G

    @property
    def chart(self) -> Chart:
        return self.poisson.chart

    @property
    def dim(self) -> int:
        return self.chart.dim

    @property
    def pi(self) -> MultivectorField:
        return self.poisson.pi

    def _sub(self, first, second) -> dict[str, ScalarExpr]:
        sub = {}
        for c, a, b in zip(self.chart.coords, first, second):
            sub[c + "1"], sub[c + "2"] = a, b
        return sub

    def product(self, first: Sequence[ScalarExpr], second: Sequence[ScalarExpr]) -> list[ScalarExpr]:
        sub = self._sub(first, second)
        return [simplify(substitute(m, sub)) for m in self.mul]

    def coords(self) -> list[ScalarExpr]:
        return [Var(c) for c in self.chart.coords]

    def identity_exprs(self) -> list[ScalarExpr]:
        return [Const(v) for v in self.identity]

    def validate(self) -> None:
        if len(self.mul) != self.dim or len(self.identity) != self.dim:
            raise GroupLawError("group law and identity must have one entry per coordinate")
        x, e = self.coords(), self.identity_exprs()
        if self.product(e, x) != x or self.product(x, e) != x:
            raise GroupLawError("identity is not a two-sided unit for the group law")
        if self.inv is not None:
            if self.product(x, list(self.inv)) != e or self.product(list(self.inv), x) != e:
                raise GroupLawError("inverse expressions do not invert the group law")

    def mul_at(self, g: Sequence[float], h: Sequence[float]) -> np.ndarray:
        pc = pair_chart(self.chart)
        return np.array([evaluate(m, pc, list(g) + list(h)) for m in self.mul])


# ---------------------------------------------------------------------------
# invariant frames


@dataclass(frozen=True)
class InvariantFrame:
    side: str
    vectors: Tuple[MultivectorField, ...]
    forms: Optional[Tuple[CovectorField, ...]]
    matrix: Tuple[Tuple[ScalarExpr, ...], ...]  # matrix[j][i] = component j of vector i

    def coframe_at(self, point: Sequence[float]) -> np.ndarray:
        """Rows are the coframe covectors at ``point``."""
        chart = self.vectors[0].chart
        M = np.array([[evaluate(e, chart, point) for e in row] for row in self.matrix])
        return np.linalg.inv(M)


def _frame_matrix(G: GroupChart, side: str) -> list[list[ScalarExpr]]:
    x, e = G.coords(), G.identity_exprs()
    moving, fixed = ("2", "1") if side == LEFT else ("1", "2")
    cols = []
    for i, c in enumerate(G.chart.coords):
        col = []
        for m in G.mul:
            d = differentiate(m, c + moving)
            sub = {}
            for name, xv, ev in zip(G.chart.coords, x, e):
                sub[name + fixed] = xv
                sub[name + moving] = ev
            col.append(simplify(substitute(d, sub)))
        cols.append(col)
    n = G.dim
    return [[cols[i][j] for i in range(n)] for j in range(n)]


def _det(M: list[list[ScalarExpr]]) -> ScalarExpr:
    n = len(M)
    if n == 1:
        return M[0][0]
    out = ZERO
    for j in range(n):
        if M[0][j] == ZERO:
            continue
        minor = [row[:j] + row[j + 1 :] for row in M[1:]]
        term = M[0][j] * _det(minor)
        out = out + term if j % 2 == 0 else out - term
    return simplify(out)


def _inverse(M: list[list[ScalarExpr]]) -> list[list[ScalarExpr]]:
    n = len(M)
    det = _det(M)
    if det == ZERO:
        raise GroupLawError("frame matrix is singular")
    inv = [[ZERO] * n for _ in range(n)]
    for r in range(n):
        for c in range(n):
            minor = [row[:r] + row[r + 1 :] for k, row in enumerate(M) if k != c]
            cof = _det(minor) if minor else Const(1)
            inv[r][c] = simplify(cof / det if (r + c) % 2 == 0 else -cof / det)
    return inv


def invariant_frame(G: GroupChart, side: str = LEFT) -> InvariantFrame:
    if side not in (LEFT, RIGHT):
        raise ValueError(f"side must be {LEFT!r} or {RIGHT!r}")
    M = _frame_matrix(G, side)
    e = [float(v) for v in G.identity]
    M_e = np.array([[evaluate(x, G.chart, e, check_domain=False) for x in row] for row in M])
    if abs(np.linalg.det(M_e)) < 1e-12:
        raise GroupLawError("frame is degenerate at the identity (malformed group law)")
    n = G.dim
    vectors = tuple(vector_field(G.chart, [M[j][i] for j in range(n)]) for i in range(n))
    forms = None
    if n <= SYMBOLIC_MAX_DIM:
        inv = _inverse(M)
        forms = tuple(CovectorField(G.chart, tuple(inv[i])) for i in range(n))
    return InvariantFrame(side, vectors, forms, tuple(tuple(r) for r in M))


# ---------------------------------------------------------------------------
# multiplicativity


@dataclass(frozen=True)
class MultiplicativeResult:
    ok: bool
    pairs: int
    max_defect: float
    witness: Optional[tuple] = None

    def __bool__(self) -> bool:
        return self.ok


def multiplicative_defect(G: GroupChart, g: Sequence[float], h: Sequence[float]) -> float:
    pc = pair_chart(G.chart)
    point = list(g) + list(h)
    JL = np.array([[evaluate(differentiate(m, c + "2"), pc, point) for c in G.chart.coords] for m in G.mul])
    JR = np.array([[evaluate(differentiate(m, c + "1"), pc, point) for c in G.chart.coords] for m in G.mul])
    gh = G.mul_at(g, h)
    lhs = G.pi.matrix_at(gh)
    rhs = JL @ G.pi.matrix_at(h) @ JL.T + JR @ G.pi.matrix_at(g) @ JR.T
    scale = max(1.0, float(np.max(np.abs(lhs))))
    return float(np.max(np.abs(lhs - rhs))) / scale


def check_multiplicative(
    G: GroupChart, pairs: int = 100, tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED
) -> MultiplicativeResult:
    """``pi(gh) = (L_g)_* pi(h) + (R_h)_* pi(g)`` at seeded random pairs."""
    rng = np.random.default_rng(seed)
    done, worst, attempts = 0, 0.0, 0
    while done < pairs:
        attempts += 1
        if attempts > 50 * pairs:
            raise SamplingError("could not sample admissible group pairs")
        g, h = G.chart.sample_points(2, rng)
        try:
            if not G.chart.admissible(G.mul_at(g, h)):
                continue
            defect = multiplicative_defect(G, g, h)
        except (SingularityError, DomainViolationError):
            continue
        done += 1
        worst = max(worst, defect)
        if defect > tol:
            return MultiplicativeResult(False, done, worst, (tuple(map(float, g)), tuple(map(float, h))))
    return MultiplicativeResult(True, done, worst)


def pi_at_identity(G: GroupChart) -> np.ndarray:
    return G.pi.matrix_at([float(v) for v in G.identity])


# ---------------------------------------------------------------------------
# dressing


def dressing_fields(G_star: GroupChart, side: str = LEFT) -> list[MultivectorField]:
    """Left: ``pi^#(theta)`` on left-invariant forms; right: ``-pi^#(theta)`` on right-invariant ones."""
    frame = invariant_frame(G_star, side)
    if frame.forms is None:
        raise GroupLawError(f"symbolic coframe unavailable above dimension {SYMBOLIC_MAX_DIM}")
    fields = [sharp(G_star.poisson, th) for th in frame.forms]
    return fields if side == LEFT else [-f for f in fields]


def exact_value(e: ScalarExpr, chart: Chart, point: Sequence) -> Union[Fraction, float]:
    """Exact rational value when the point is rational and ``e`` folds to a constant."""
    if all(isinstance(v, (int, Fraction)) for v in point):
        folded = simplify(substitute(e, {c: Const(Fraction(v)) for c, v in zip(chart.coords, point)}))
        if isinstance(folded, Const):
            return folded.value
    return evaluate(e, chart, [float(v) for v in point])


def linearize_at_identity(fields: Sequence[MultivectorField], G: GroupChart) -> list[list[list]]:
    """Jacobian ``[r][s] = d X^r / d x_s`` of each field at the identity."""
    e = list(G.identity)
    out = []
    for X in fields:
        comps = [X.components.get((r,), ZERO) for r in range(G.dim)]
        if any(exact_value(c, G.chart, e) != 0 for c in comps):
            raise ValueError("field does not vanish at the identity")
        out.append([[exact_value(differentiate(c, x), G.chart, e) for x in G.chart.coords] for c in comps])
    return out


@dataclass(frozen=True)
class CoadjointMatch:
    ok: bool
    sign: Optional[int]


def compare_with_coadjoint(
    linearizations: Sequence[Sequence[Sequence]],
    algebra: LieAlgebraSC,
    identification: Optional[Sequence[int]] = None,
) -> CoadjointMatch:
    """Compare with ``ad*`` up to one global sign.

    ``identification[r]`` is the dual-basis index attached to coordinate ``r``
    (default: same order).
    """
    n = algebra.dim
    ident = list(identification) if identification is not None else list(range(n))
    ad = algebra.coadjoint_matrices()
    for sign in (1, -1):
        if all(
            linearizations[i][r][s] == sign * ad[i][ident[r]][ident[s]]
            for i in range(n)
            for r in range(n)
            for s in range(n)
        ):
            return CoadjointMatch(True, sign)
    return CoadjointMatch(False, None)


def linearize_bivector(G: GroupChart) -> Cobracket:
    """Cobracket ``x_k -> sum_{i<j} d_k pi^{ij}(e) x_i ^ x_j`` on the coordinate basis."""
    e = list(G.identity)
    entries = []
    for (i, j), c in G.pi.components.items():
        for k, x in enumerate(G.chart.coords):
            v = exact_value(differentiate(c, x), G.chart, e)
            if v != 0:
                entries.append((k, i, j, v))
    return Cobracket.from_entries(G.chart.coords, entries)


# ---------------------------------------------------------------------------
# orbits


def span_rank(fields: Sequence[MultivectorField], point: Sequence[float]) -> int:
    if not fields:
        return 0
    M = np.column_stack([X.vector_at(point) for X in fields])
    return numeric_rank(M)


def grid_points(chart: Chart, grid: Mapping[str, Sequence[float]]) -> list[tuple[float, ...]]:
    axes = [list(grid[c]) for c in chart.coords]
    return [tuple(float(v) for v in p) for p in itertools.product(*axes)]


def orbit_rank_scan(
    fields: Sequence[MultivectorField], grid: Union[Mapping[str, Sequence[float]], Iterable[Sequence[float]]]
) -> dict[tuple[float, ...], int]:
    chart = fields[0].chart
    points = grid_points(chart, grid) if isinstance(grid, Mapping) else [tuple(map(float, p)) for p in grid]
    return {p: span_rank(fields, p) for p in points}


@dataclass(frozen=True)
class CompletenessProbe:
    field_index: int
    start: tuple
    t_end: float
    escaped: bool

    @property
    def status(self) -> str:
        return "not established" if self.escaped else "no escape observed"


def completeness_probe(
    fields: Sequence[MultivectorField],
    starts: Sequence[Sequence[float]],
    horizon: float = 10.0,
    step: float = 1e-2,
) -> list[CompletenessProbe]:
    """Flow each field to ``+-horizon``; escaping is reported, never treated as failure."""
    out = []
    for i, X in enumerate(fields):
        for s in starts:
            for t in (horizon, -horizon):
                fr: FlowResult = flow(X, s, t, step)
                out.append(CompletenessProbe(i, tuple(s), t, fr.escaped))
    return out
