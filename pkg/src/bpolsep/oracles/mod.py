"""MOD: Boolean combinations of length-residue languages.

A MOD language containing the empty word contains every word whose length
is divisible by its modulus, so ``{eps}`` is MOD-separable from ``L`` iff some
``m`` divides no length in ``L``.

Decision rule.  Let ``P`` be the lcm of the cycle-length gcds of all SCCs that
carry a positive-length cycle.  Then ``{eps}`` is inseparable from
``L(src, dst)`` iff ``dst`` is reachable from ``src`` by epsilon edges alone, or
some walk ``src -> dst`` passes through a positive-cycle SCC and has length
divisible by ``P``.  Pumping the visited cycles reaches every residue modulo any
``m`` that is compatible with the gcd of the visited SCCs, and that gcd divides
``P``.  The test runs as reachability in the product of the automaton with
``Z/P`` and a one-bit "cycle visited" flag.
"""

from __future__ import annotations

import numpy as np

from ..automata import EPSILON, Nfa
from ._graph import adjacency, edge_arrays, lcm_all, reach_rows, scc_periods
from .base import Backend, OracleAnswer


def lengths_hit_zero_mod(b: Nfa, src: int, dst: int, m: int) -> bool:
    """Whether some word of ``L_b(src, dst)`` has length divisible by ``m``."""
    seen = {(src, 0)}
    stack = [(src, 0)]
    while stack:
        q, r = stack.pop()
        if q == dst and r == 0:
            return True
        for sym, rows in b.successors.items():
            step = 0 if sym == EPSILON else 1
            for t in rows[q]:
                node = (t, (r + step) % m)
                if node not in seen:
                    seen.add(node)
                    stack.append(node)
    return False


class ModBackend(Backend):
    name = "mod"

    def __init__(self, evidence_sweep: int = 64):
        self.evidence_sweep = evidence_sweep

    def _graphs(self, b: Nfa):
        n = b.state_count
        src, dst, length = edge_arrays(b)
        periods = scc_periods(b)
        modulus = lcm_all(periods)
        positive = np.flatnonzero(periods > 0)
        res = np.arange(modulus, dtype=np.int64)
        froms, tos = [], []
        for flag in (0, 1):
            froms.append(((src[:, None] * 2 + flag) * modulus + res[None, :]).ravel())
            tos.append(((dst[:, None] * 2 + flag) * modulus + (res[None, :] + length[:, None]) % modulus).ravel())
        froms.append(((positive[:, None] * 2) * modulus + res[None, :]).ravel())
        tos.append(((positive[:, None] * 2 + 1) * modulus + res[None, :]).ravel())
        product = adjacency(n * 2 * modulus, np.concatenate(froms), np.concatenate(tos))
        eps = length == 0
        eps_graph = adjacency(n, src[eps], dst[eps])
        return modulus, product, eps_graph

    def matrix(self, b: Nfa, sources, targets) -> np.ndarray:
        modulus, product, eps_graph = self._graphs(b)
        targets = np.asarray(targets, dtype=np.int64)
        zero_len = reach_rows(eps_graph, sources)[:, targets]
        starts = [(int(s) * 2) * modulus for s in sources]
        hits = reach_rows(product, starts)[:, (targets * 2 + 1) * modulus]
        return zero_len | hits

    def answer(self, b: Nfa, src: int, dst: int) -> OracleAnswer:
        inseparable = bool(self.matrix(b, [src], [dst])[0, 0])
        modulus = lcm_all(scc_periods(b))
        if inseparable:
            return OracleAnswer(True, {"cycle_period_lcm": modulus})
        for m in range(1, self.evidence_sweep + 1):
            if not lengths_hit_zero_mod(b, src, dst, m):
                return OracleAnswer(False, {"modulus": m})
        # a walk longer than the state count must visit a positive cycle
        return OracleAnswer(False, {"modulus": modulus * (b.state_count + 1)})
