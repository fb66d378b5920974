"""Lie bialgebras given by structure constants, with exact rational checks."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Tuple, Union

Rational = Union[int, str, Fraction]
Wedge2 = dict  # {(j, k) with j < k: Fraction}


class BialgebraError(ValueError):
    pass


def _q(x: Rational) -> Fraction:
    return Fraction(x)


def _freeze(d: Mapping) -> Tuple:
    return tuple(sorted((k, v) for k, v in d.items() if v != 0))


@dataclass(frozen=True)
class LieAlgebraSC:
    """``[e_i, e_j] = sum_k c[i, j, k] e_k``; stored for ``i < j`` only."""

    basis: Tuple[str, ...]
    table: Tuple[Tuple[Tuple[int, int, int], Fraction], ...] = ()

    @classmethod
    def from_entries(cls, basis: Sequence[str], entries: Iterable[tuple]) -> "LieAlgebraSC":
        """``entries``: ``(i, j, k, c)`` with basis names or indices, any order of ``i, j``."""
        basis = tuple(basis)
        idx = {b: n for n, b in enumerate(basis)}
        table: dict[tuple[int, int, int], Fraction] = {}
        for i, j, k, c in entries:
            i, j, k = (idx[x] if isinstance(x, str) else x for x in (i, j, k))
            c = _q(c)
            if i == j:
                if c != 0:
                    raise BialgebraError(f"[e{i}, e{i}] must vanish")
                continue
            if i > j:
                i, j, c = j, i, -c
            key = (i, j, k)
            if key in table and table[key] != c:
                raise BialgebraError(f"conflicting entries for [{basis[i]}, {basis[j]}]")
            table[key] = c
        return cls(basis, _freeze(table))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def c(self, i: int, j: int, k: int) -> Fraction:
        if i == j:
            return Fraction(0)
        if i > j:
            return -self.c(j, i, k)
        return dict(self.table).get((i, j, k), Fraction(0))

    def structure_tensor(self) -> list:
        """Dense ``c[i][j][k]``."""
        t = dict(self.table)
        n = self.dim
        out = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
        for (i, j, k), v in t.items():
            out[i][j][k] = v
            out[j][i][k] = -v
        return out

    def bracket(self, x: Sequence[Fraction], y: Sequence[Fraction]) -> list[Fraction]:
        c = self.structure_tensor()
        n = self.dim
        out = [Fraction(0)] * n
        for i in range(n):
            if x[i] == 0:
                continue
            for j in range(n):
                if y[j] == 0:
                    continue
                for k in range(n):
                    if c[i][j][k]:
                        out[k] += x[i] * y[j] * c[i][j][k]
        return out

    def coadjoint_matrices(self) -> list[list[list[Fraction]]]:
        """Matrices of ``ad*_{e_i}`` on the dual basis, ``<ad*_x a, y> = -<a, [x, y]>``.

        Entry ``[r][s]`` is the ``e^r`` component of ``ad*_{e_i} e^s``.
        """
        c = self.structure_tensor()
        n = self.dim
        return [[[-c[i][r][s] for s in range(n)] for r in range(n)] for i in range(n)]


@dataclass(frozen=True)
class Cobracket:
    """``delta(e_i) = sum_{j<k} d[i, j, k] e_j ^ e_k``."""

    table: Tuple[Tuple[Tuple[int, int, int], Fraction], ...] = ()

    @classmethod
    def from_entries(cls, basis: Sequence[str], entries: Iterable[tuple]) -> "Cobracket":
        idx = {b: n for n, b in enumerate(basis)}
        table: dict[tuple[int, int, int], Fraction] = {}
        for i, j, k, d in entries:
            i, j, k = (idx[x] if isinstance(x, str) else x for x in (i, j, k))
            d = _q(d)
            if j == k:
                if d != 0:
                    raise BialgebraError("e_j ^ e_j must vanish")
                continue
            if j > k:
                j, k, d = k, j, -d
            key = (i, j, k)
            table[key] = table.get(key, Fraction(0)) + d
        return cls(_freeze(table))

    def delta(self, i: int) -> Wedge2:
        return {(j, k): v for (a, j, k), v in self.table if a == i}

    def d(self, i: int, j: int, k: int) -> Fraction:
        if j == k:
            return Fraction(0)
        if j > k:
            return -self.d(i, k, j)
        return dict(self.table).get((i, j, k), Fraction(0))


@dataclass(frozen=True)
class LieBialgebra:
    algebra: LieAlgebraSC
    cobracket: Cobracket

    @property
    def basis(self) -> Tuple[str, ...]:
        return self.algebra.basis

    @property
    def dim(self) -> int:
        return self.algebra.dim


# ---------------------------------------------------------------------------
# checks


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    witness: Optional[tuple] = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def check_jacobi_sc(A: LieAlgebraSC) -> CheckResult:
    c = A.structure_tensor()
    n = A.dim
    for i, j, k, l in itertools.product(range(n), repeat=4):
        s = sum(
            c[i][j][m] * c[m][k][l] + c[j][k][m] * c[m][i][l] + c[k][i][m] * c[m][j][l] for m in range(n)
        )
        if s != 0:
            b = A.basis
            return CheckResult(False, (i, j, k, l), f"Jacobi sum for ({b[i]},{b[j]},{b[k]}) has {b[l]}-component {s}")
    return CheckResult(True)


def _wedge_vectors(x: Sequence[Fraction], y: Sequence[Fraction]) -> Wedge2:
    out: Wedge2 = {}
    n = len(x)
    for j in range(n):
        for k in range(j + 1, n):
            v = x[j] * y[k] - x[k] * y[j]
            if v:
                out[(j, k)] = v
    return out


def _add_wedge(acc: Wedge2, w: Wedge2, scale: Fraction = Fraction(1)) -> None:
    for key, v in w.items():
        acc[key] = acc.get(key, Fraction(0)) + scale * v


def _unit(n: int, i: int) -> list[Fraction]:
    return [Fraction(int(m == i)) for m in range(n)]


def ad_wedge(A: LieAlgebraSC, x: Sequence[Fraction], w: Wedge2) -> Wedge2:
    """``ad_x`` on ``g ^ g`` by the Leibniz rule."""
    n = A.dim
    out: Wedge2 = {}
    for (j, k), v in w.items():
        ej, ek = _unit(n, j), _unit(n, k)
        _add_wedge(out, _wedge_vectors(A.bracket(x, ej), ek), v)
        _add_wedge(out, _wedge_vectors(ej, A.bracket(x, ek)), v)
    return {key: v for key, v in out.items() if v}


def delta_of(B: LieBialgebra, x: Sequence[Fraction]) -> Wedge2:
    out: Wedge2 = {}
    for i, xi in enumerate(x):
        if xi:
            _add_wedge(out, B.cobracket.delta(i), xi)
    return {key: v for key, v in out.items() if v}


def check_cocycle(B: LieBialgebra) -> CheckResult:
    """``delta([x, y]) = ad_x delta(y) - ad_y delta(x)`` on all basis pairs."""
    A = B.algebra
    n = A.dim
    for i, j in itertools.combinations(range(n), 2):
        ei, ej = _unit(n, i), _unit(n, j)
        lhs = delta_of(B, A.bracket(ei, ej))
        rhs = ad_wedge(A, ei, delta_of(B, ej))
        _add_wedge(rhs, ad_wedge(A, ej, delta_of(B, ei)), Fraction(-1))
        diff = dict(lhs)
        _add_wedge(diff, rhs, Fraction(-1))
        bad = {k: v for k, v in diff.items() if v}
        if bad:
            return CheckResult(False, (i, j), f"cocycle defect on ({A.basis[i]},{A.basis[j]}): {bad}")
    return CheckResult(True)


def dual_algebra(B: LieBialgebra) -> LieAlgebraSC:
    """Bracket on the dual basis read off the transpose of the cobracket."""
    names = tuple(_dual_name(b) for b in B.basis)
    entries = [(j, k, i, d) for (i, j, k), d in B.cobracket.table]
    return LieAlgebraSC.from_entries(names, entries)


def check_bialgebra(B: LieBialgebra) -> CheckResult:
    r = check_jacobi_sc(B.algebra)
    if not r:
        return CheckResult(False, r.witness, "bracket: " + r.detail)
    r = check_jacobi_sc(dual_algebra(B))
    if not r:
        return CheckResult(False, r.witness, "dual bracket: " + r.detail)
    return check_cocycle(B)


def _dual_name(name: str) -> str:
    return name[:-1] if name.endswith("*") else name + "*"


def dualize(B: LieBialgebra) -> LieBialgebra:
    """``(g*, transpose of delta)`` with cobracket the transpose of the bracket of ``g``."""
    r = check_bialgebra(B)
    if not r:
        raise BialgebraError(f"not a Lie bialgebra: {r.detail}")
    algebra = dual_algebra(B)
    cob = Cobracket.from_entries(algebra.basis, [(k, i, j, c) for (i, j, k), c in B.algebra.table])
    return LieBialgebra(algebra, cob)


def double_dual_roundtrip(B: LieBialgebra) -> bool:
    return dualize(dualize(B)) == B
