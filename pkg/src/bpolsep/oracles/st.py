"""ST = {empty, A*}: the only candidate separator containing the empty word is A*."""

from __future__ import annotations

import numpy as np

from ..automata import Nfa, pair_nonempty
from ._graph import adjacency, edge_arrays, reach_rows
from .base import Backend, OracleAnswer


class StBackend(Backend):
    name = "st"

    def answer(self, b: Nfa, src: int, dst: int) -> OracleAnswer:
        nonempty = pair_nonempty(b, src, dst)
        return OracleAnswer(nonempty, {"pair_language": "nonempty" if nonempty else "empty"})

    def matrix(self, b: Nfa, sources, targets) -> np.ndarray:
        src, dst, _ = edge_arrays(b)
        rows = reach_rows(adjacency(b.state_count, src, dst), sources)
        return rows[:, np.asarray(targets, dtype=np.int64)]
