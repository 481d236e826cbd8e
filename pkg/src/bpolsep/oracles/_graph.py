"""Graph helpers shared by the oracle backends."""

from __future__ import annotations

from functools import reduce
from math import gcd

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order

from ..automata import Nfa


def edge_arrays(b: Nfa) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sources, targets and letter-lengths (0 for epsilon) of all transitions."""
    table = b.edge_table
    return table[:, 0], table[:, 2], (table[:, 1] >= 0).astype(np.int64)


def adjacency(n: int, src: np.ndarray, dst: np.ndarray) -> csr_matrix:
    data = np.ones(len(src), dtype=np.float64)
    return csr_matrix((data, (src, dst)), shape=(n, n))


def reach_rows(graph: csr_matrix, sources) -> np.ndarray:
    """Row ``i`` marks every node reachable from ``sources[i]``."""
    n = graph.shape[0]
    out = np.zeros((len(sources), n), dtype=bool)
    for i, s in enumerate(sources):
        out[i, breadth_first_order(graph, int(s), directed=True, return_predecessors=False)] = True
    return out


def scc_periods(b: Nfa) -> np.ndarray:
    """Per state, the gcd of the letter-lengths of all cycles in its SCC.

    Zero means the SCC carries no cycle of positive length.
    """
    n = b.state_count
    labels = b.scc_labels
    src, dst, length = edge_arrays(b)
    intra = labels[src] == labels[dst]
    isrc, idst, ilen = src[intra], dst[intra], length[intra]
    if len(isrc) == 0:
        return np.zeros(n, dtype=np.int64)
    # potentials: one directed BFS per SCC, launched from a virtual root
    roots = {}
    for q in range(n):
        roots.setdefault(labels[q], q)
    root_nodes = np.array(sorted(roots.values()), dtype=np.int64)
    super_root = n
    g_src = np.concatenate([isrc, np.full(len(root_nodes), super_root)])
    g_dst = np.concatenate([idst, root_nodes])
    graph = adjacency(n + 1, g_src, g_dst)
    order, preds = breadth_first_order(graph, super_root, directed=True, return_predecessors=True)
    # length of a tree edge: 0 if an epsilon edge realises it
    zero_edges = set(zip(isrc[ilen == 0].tolist(), idst[ilen == 0].tolist()))
    potential = np.zeros(n + 1, dtype=np.int64)
    for v in order[1:]:
        p = preds[v]
        if p == super_root:
            continue
        potential[v] = potential[p] + (0 if (p, v) in zero_edges else 1)
    diffs = np.abs(potential[isrc] + ilen - potential[idst])
    per_scc: dict[int, int] = {}
    for lab, d in zip(labels[isrc].tolist(), diffs.tolist()):
        per_scc[lab] = gcd(per_scc.get(lab, 0), d)
    return np.array([per_scc.get(labels[q], 0) for q in range(n)], dtype=np.int64)


def lcm_all(values) -> int:
    return reduce(lambda x, y: x * y // gcd(x, y), (int(v) for v in values if v), 1)
