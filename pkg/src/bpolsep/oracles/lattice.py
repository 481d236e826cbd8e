"""Integer lattices in Z^d via Hermite normal form, and linear/semilinear sets."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

Vector = tuple[int, ...]
Basis = tuple[Vector, ...]


def hnf(vectors: Sequence[Sequence[int]], dim: int) -> Basis:
    """Canonical row-style Hermite normal form of the lattice spanned by ``vectors``.

    Two generating sets span the same lattice iff their HNFs are equal.
    """
    rows = [list(v) for v in vectors if any(v)]
    r = 0
    for col in range(dim):
        while True:
            nz = [i for i in range(r, len(rows)) if rows[i][col] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(rows[i][col]))
            done = True
            for i in nz:
                if i == piv:
                    continue
                f = rows[i][col] // rows[piv][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[piv])]
                if rows[i][col] != 0:
                    done = False
            if done:
                break
        nz = [i for i in range(r, len(rows)) if rows[i][col] != 0]
        if not nz:
            continue
        piv = nz[0]
        rows[r], rows[piv] = rows[piv], rows[r]
        if rows[r][col] < 0:
            rows[r] = [-x for x in rows[r]]
        p = rows[r][col]
        for i in range(r):
            f = rows[i][col] // p
            if f:
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        r += 1
        rows = rows[:r] + [row for row in rows[r:] if any(row)]
    return tuple(tuple(row) for row in rows[:r])


def _pivot(row: Vector) -> int:
    for j, x in enumerate(row):
        if x:
            return j
    raise ValueError("zero row in basis")


def reduce(v: Sequence[int], basis: Basis) -> Vector:
    """Canonical representative of ``v`` modulo the lattice with HNF ``basis``."""
    v = list(v)
    for row in basis:
        j = _pivot(row)
        f = v[j] // row[j]
        if f:
            v = [x - f * y for x, y in zip(v, row)]
    return tuple(v)


def join(a: Basis, b: Basis, dim: int) -> Basis:
    if not b:
        return a
    if not a:
        return b
    return hnf(a + b, dim)


def in_span(v: Sequence[int], vectors: Sequence[Sequence[int]]) -> bool:
    """Whether ``v`` is an integer combination of ``vectors``."""
    dim = len(v)
    return not any(reduce(v, hnf(vectors, dim)))


@dataclass(frozen=True)
class LinearSet:
    """``base + N * periods``: vectors ``base + sum(n_i * periods[i])``."""

    base: Vector
    periods: tuple[Vector, ...] = ()

    def contains_zero_mod_all(self) -> bool:
        """Whether every modulus ``m`` admits a member congruent to 0 componentwise.

        Holds iff ``base`` lies in the integer span of the periods: subgroups
        of Z^d are closed in the profinite topology.
        """
        return in_span(self.base, self.periods) if self.periods else not any(self.base)

    def hits_zero_mod(self, moduli: Sequence[int]) -> bool:
        """Whether some member is congruent to 0 modulo ``moduli`` componentwise."""
        scaled = [tuple(m if i == j else 0 for j in range(len(moduli))) for i, m in enumerate(moduli)]
        return in_span(self.base, list(self.periods) + scaled)


@dataclass(frozen=True)
class SemilinearSet:
    """Finite union of linear sets over a fixed alphabet ordering."""

    alphabet: tuple[str, ...]
    components: tuple[LinearSet, ...] = field(default_factory=tuple)

    def zero_mod_all(self) -> bool:
        return any(c.contains_zero_mod_all() for c in self.components)

    def hits_zero_mod(self, moduli: Sequence[int]) -> bool:
        return any(c.hits_zero_mod(moduli) for c in self.components)
