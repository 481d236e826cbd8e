"""AMT: Boolean combinations of letter-count residue languages.

An AMT language containing the empty word contains every word whose letter
counts are all divisible by some common modulus.  Hence ``{eps}`` is
AMT-inseparable from ``L`` iff for every modulus the Parikh image of ``L``
holds a vector that is 0 modulo it.

For a walk that has visited a set of SCCs, every further walk to the same
state differs from it by an integer combination of closed-walk Parikh
vectors of those SCCs, and mod any modulus all such combinations are
realisable by pumping.  So the exploration tracks
``(state, lattice spanned by visited SCC cycles, Parikh vector mod lattice)``.
A pair is inseparable iff some reachable node at ``dst`` has the zero coset.
This is exact: lattices in Z^d are closed in the profinite topology.  The
node space is finite but may be exponential; the budget bounds it.
"""

from __future__ import annotations

import itertools
from collections import deque
from typing import Optional

import numpy as np

from ..automata import EPSILON, Nfa
from .base import Backend, OracleAnswer, OracleUndecided
from .lattice import Basis, LinearSet, SemilinearSet, hnf, join, reduce

DEFAULT_BUDGET = 200_000


class _Explorer:
    """Per-automaton tables shared by all sources."""

    def __init__(self, b: Nfa, budget: int):
        self.b = b
        self.dim = len(b.alphabet)
        self.budget = budget
        index = {sym: i for i, sym in enumerate(b.alphabet)}
        self.out: list[list[tuple[int, int]]] = [[] for _ in b.states]
        for s, sym, d in sorted(b.transitions):
            self.out[s].append((d, -1 if sym == EPSILON else index[sym]))
        self.labels = [int(x) for x in b.scc_labels]
        self.scc_lattice = self._scc_lattices()
        self.lattices: list[Basis] = [()]
        self.lattice_ids: dict[Basis, int] = {(): 0}
        self.join_memo: dict[tuple[int, int], int] = {}
        self.step_memo: dict[tuple, tuple[int, tuple[int, ...]]] = {}

    def vec(self, letter: int) -> tuple[int, ...]:
        return tuple(1 if i == letter else 0 for i in range(self.dim))

    def _scc_lattices(self) -> dict[int, Basis]:
        labels = self.labels
        members: dict[int, list[int]] = {}
        for q in self.b.states:
            members.setdefault(int(labels[q]), []).append(q)
        out = {}
        for lab, states in members.items():
            pot = self._potentials(states[0], lab)
            gens = []
            for x in states:
                for y, letter in self.out[x]:
                    if labels[y] != lab:
                        continue
                    e = self.vec(letter)
                    gens.append(tuple(pot[x][i] + e[i] - pot[y][i] for i in range(self.dim)))
            out[lab] = hnf(gens, self.dim)
        return out

    def _potentials(self, root: int, lab: int) -> dict[int, tuple[int, ...]]:
        pot = {root: (0,) * self.dim}
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for y, letter in self.out[x]:
                if self.labels[y] == lab and y not in pot:
                    e = self.vec(letter)
                    pot[y] = tuple(a + c for a, c in zip(pot[x], e))
                    queue.append(y)
        return pot

    def enter(self, lat_id: int, state: int) -> int:
        lab = int(self.labels[state])
        key = (lat_id, lab)
        got = self.join_memo.get(key)
        if got is None:
            basis = join(self.lattices[lat_id], self.scc_lattice[lab], self.dim)
            got = self.lattice_ids.get(basis)
            if got is None:
                got = len(self.lattices)
                self.lattices.append(basis)
                self.lattice_ids[basis] = got
            self.join_memo[key] = got
        return got

    def explore(self, src: int, keep_parents: bool = False):
        zero = (0,) * self.dim
        lat0 = self.enter(0, src)
        start = (src, lat0, zero)
        parents: Optional[dict] = {start: None} if keep_parents else None
        seen = {start}
        queue = deque([start])
        units = [self.vec(i) for i in range(self.dim)]
        labels = self.labels
        steps = self.step_memo
        while queue:
            node = queue.popleft()
            x, lat, coset = node
            for y, letter in self.out[x]:
                key = (lat, coset, letter, labels[y])
                hit = steps.get(key)
                if hit is None:
                    nlat = self.enter(lat, y)
                    if letter < 0:
                        c = coset
                    else:
                        c = tuple(a + b for a, b in zip(coset, units[letter]))
                    if nlat != lat or letter >= 0:
                        c = reduce(c, self.lattices[nlat])
                    hit = steps[key] = (nlat, c)
                nxt = (y,) + hit
                if nxt not in seen:
                    seen.add(nxt)
                    if len(seen) > self.budget:
                        raise OracleUndecided(
                            f"AMT exploration exceeded budget of {self.budget} nodes"
                        )
                    if keep_parents:
                        parents[nxt] = (node, letter)
                    queue.append(nxt)
        return seen, parents


class AmtBackend(Backend):
    name = "amt"

    def __init__(self, budget: int = DEFAULT_BUDGET, evidence_bound: int = 12):
        self.budget = budget
        self.evidence_bound = evidence_bound

    def matrix(self, b: Nfa, sources, targets) -> np.ndarray:
        ex = _Explorer(b, self.budget)
        zero = (0,) * ex.dim
        col = {int(t): j for j, t in enumerate(targets)}
        out = np.zeros((len(sources), len(targets)), dtype=bool)
        for i, s in enumerate(sources):
            seen, _ = ex.explore(int(s))
            for x, _, c in seen:
                if c == zero and x in col:
                    out[i, col[x]] = True
        return out

    def answer(self, b: Nfa, src: int, dst: int) -> OracleAnswer:
        image = parikh_image(b, src, dst, self.budget)
        if image.zero_mod_all():
            witness = next(c for c in image.components if c.contains_zero_mod_all())
            return OracleAnswer(True, {"base": list(witness.base), "periods": [list(p) for p in witness.periods]})
        moduli = separating_moduli(image, len(b.alphabet), self.evidence_bound)
        return OracleAnswer(False, {"moduli": list(moduli)})


def separating_moduli(image: SemilinearSet, dim: int, bound: int) -> tuple[int, ...]:
    """A modulus vector under which no member of ``image`` is 0.

    Searches vectors with entries up to ``bound`` (small products first); if
    none works, falls back to a common modulus built from the components.
    """
    candidates = itertools.product(range(1, bound + 1), repeat=dim) if dim <= 3 else (
        (m,) * dim for m in range(1, bound + 1)
    )
    for moduli in sorted(candidates, key=lambda v: (int(np.prod(v)), v)):
        if not image.hits_zero_mod(moduli):
            return tuple(moduli)
    m = 1
    while m < 1 << 20:
        m *= 2
        for k in range(1, bound + 1):
            if not image.hits_zero_mod((m * k,) * dim):
                return (m * k,) * dim
    raise OracleUndecided("no separating modulus found within search bound")


def _closed_walks(ex: _Explorer, u: int) -> list[tuple[int, ...]]:
    """Parikh vectors of closed walks at ``u`` spanning its SCC's cycle lattice."""
    lab = ex.labels[u]
    fwd = ex._potentials(u, lab)
    # backward potentials: vector of some path x -> u inside the SCC
    back = {u: (0,) * ex.dim}
    preds: dict[int, list[tuple[int, int]]] = {}
    for x in fwd:
        for y, letter in ex.out[x]:
            if ex.labels[y] == lab:
                preds.setdefault(y, []).append((x, letter))
    queue = deque([u])
    while queue:
        y = queue.popleft()
        for x, letter in preds.get(y, ()):
            if x not in back:
                e = ex.vec(letter)
                back[x] = tuple(a + c for a, c in zip(back[y], e))
                queue.append(x)
    walks = set()
    for x in fwd:
        for y, letter in ex.out[x]:
            if ex.labels[y] == lab:
                e = ex.vec(letter)
                v = tuple(fwd[x][i] + e[i] + back[y][i] for i in range(ex.dim))
                if any(v):
                    walks.add(v)
    return sorted(walks)


def parikh_image(b: Nfa, src: int, dst: int, budget: int = DEFAULT_BUDGET) -> SemilinearSet:
    """Semilinear set agreeing with the Parikh image of ``L_b(src, dst)`` modulo every modulus.

    Each component is ``base + N * periods`` where ``base`` is the Parikh
    vector of an actual walk and each period is a closed walk insertable into
    it, so every component is contained in the Parikh image; the union of the
    components covers the image modulo every modulus.
    """
    ex = _Explorer(b, budget)
    seen, parents = ex.explore(src, keep_parents=True)
    components = []
    for node in sorted(n for n in seen if n[0] == dst):
        walk = []
        cur = node
        while cur is not None:
            walk.append(cur)
            link = parents[cur]
            cur = link[0] if link else None
        walk.reverse()
        base = [0] * ex.dim
        for nd in walk[1:]:
            letter = parents[nd][1]
            if letter >= 0:
                base[letter] += 1
        periods: set[tuple[int, ...]] = set()
        visited = set()
        for x, _, _ in walk:
            lab = int(ex.labels[x])
            if lab in visited:
                continue
            visited.add(lab)
            if ex.scc_lattice[lab]:
                periods.update(_closed_walks(ex, x))
        components.append(LinearSet(tuple(base), tuple(sorted(periods))))
    return SemilinearSet(b.alphabet, tuple(dict.fromkeys(components)))
