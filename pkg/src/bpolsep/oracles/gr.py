"""GR: languages recognised by finite groups.

``{eps}`` is GR-inseparable from ``L(p, r)`` when ``(p, r)`` belongs to the
least relation ``E`` that contains the identity and the epsilon edges, is
closed under composition, and satisfies the loop rule: if one word ``w``
labels walks ``p -> s``, ``s -> s`` and ``s -> r`` (the walks may also take
``E`` steps), then ``(p, r)`` is in ``E``.

The loop rule lets a walk step backwards along an edge inside a strongly
connected component, reading the inverse letter, since finishing the cycle
back to the start state makes ``a`` and ``a^-1`` cancel in any finite group.
``E`` therefore equals Dyck-style reachability where every
intra-component edge ``x -a-> y`` also contributes ``y -a^-1-> x``.  Only the
cancelling pairs need tracking, so the relation is the least one with

* ``D(x, x)``, ``D`` contains the epsilon edges and their intra-component reverses,
* ``D`` transitive,
* ``p -a-> p'``, ``D(p', r')``, ``r -a-> r'`` intra-component  gives ``D(p, r)``,
* ``p' -a-> p`` intra-component, ``D(p', r')``, ``r' -a-> r``  gives ``D(p, r)``.

``gr_relation_reference`` evaluates the loop rule literally and is kept for
cross-checking on small automata.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from ..automata import EPSILON, Nfa
from .base import Backend, OracleAnswer
from .groups import brute_force_group_search


def _bool_mm(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    # float32 goes through BLAS; sums of nonnegative terms stay positive
    return (x.astype(np.float32) @ y.astype(np.float32)) > 0


def _closure(d: np.ndarray) -> np.ndarray:
    while True:
        nxt = d | _bool_mm(d, d)
        if np.array_equal(nxt, d):
            return d
        d = nxt


def gr_relation(b: Nfa) -> np.ndarray:
    """Boolean ``n x n`` matrix of the relation ``E``."""
    n = b.state_count
    labels = np.asarray(b.scc_labels)
    same = labels[:, None] == labels[None, :]
    eps = b.epsilon_matrix
    d = np.eye(n, dtype=bool) | eps | (eps & same).T
    letters = [(m, m & same) for m in b.letter_matrices.values()]
    while True:
        d = _closure(d)
        prev = d.copy()
        for m, s in letters:
            d |= _bool_mm(_bool_mm(m, d), s.T)
            d |= _bool_mm(_bool_mm(s.T, d), m)
        if np.array_equal(d, prev):
            return d


def gr_relation_reference(b: Nfa) -> np.ndarray:
    """``E`` computed by saturating the loop rule directly.  Cubic product search per pair."""
    n = b.state_count
    e = np.eye(n, dtype=bool) | b.epsilon_matrix
    letters = [sym for sym in b.alphabet]
    succ = b.successors
    changed = True
    while changed:
        changed = False
        e = _closure(e)
        for p in range(n):
            # triples (x, y, z) reachable from (p, s, s) under a common word
            for s in range(n):
                start = (p, s, s)
                seen = {start}
                queue = deque([start])
                while queue:
                    x, y, z = queue.popleft()
                    moves = []
                    for sym in letters:
                        for x2 in succ[sym][x]:
                            for y2 in succ[sym][y]:
                                for z2 in succ[sym][z]:
                                    moves.append((x2, y2, z2))
                    for x2 in np.flatnonzero(e[x]):
                        moves.append((int(x2), y, z))
                    for y2 in np.flatnonzero(e[y]):
                        moves.append((x, int(y2), z))
                    for z2 in np.flatnonzero(e[z]):
                        moves.append((x, y, int(z2)))
                    for node in moves:
                        if node not in seen:
                            seen.add(node)
                            queue.append(node)
                for x, y, z in seen:
                    if x == s and y == s and not e[p, z]:
                        e[p, z] = True
                        changed = True
    return e


class GrBackend(Backend):
    name = "gr"

    def __init__(self, search_evidence: bool = True):
        self.search_evidence = search_evidence

    def matrix(self, b: Nfa, sources, targets) -> np.ndarray:
        d = gr_relation(b)
        return d[np.ix_(np.asarray(sources, dtype=np.int64), np.asarray(targets, dtype=np.int64))]

    def answer(self, b: Nfa, src: int, dst: int) -> OracleAnswer:
        inseparable = bool(gr_relation(b)[src, dst])
        if inseparable or not self.search_evidence:
            return OracleAnswer(inseparable, {"rule": "dyck-scc"})
        found = brute_force_group_search(b, src, dst)
        if found is None:
            return OracleAnswer(False, {"rule": "dyck-scc", "group": None})
        group, images = found
        return OracleAnswer(False, {"rule": "dyck-scc", "group": group.name, "morphism": images})


__all__ = ["GrBackend", "gr_relation", "gr_relation_reference"]
