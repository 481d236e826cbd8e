"""Inseparable quadruples: auxiliary automata, the operators tau / tau+, and decisions.

For an input NFA over states ``Q``, a quadruple ``(q, r, s, t)`` is inseparable
when ``L(q, r)`` and ``L(s, t)`` cannot be separated by the chosen class.  The
controlled part is the greatest fixpoint of ``tau`` (or ``tau+``) starting at
``Q^4``; the full set is its closure under the letter and composition rules.

The auxiliary automaton ``B_S`` runs three copies of the input in lockstep
over ``Q^3``.  Its epsilon edges jump the second and third copies along a
quadruple of ``S`` while the first copy stays put.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

import numpy as np

from .automata import EpsNfa, Nfa, intersect_nonempty, reachability_matrix
from .oracles._graph import adjacency, reach_rows
from .oracles import Backend, ClassSpec, get_backend, inseparability_matrix

Quad = tuple[int, int, int, int]


class QuadSet:
    """A subset of ``Q^4`` stored as a dense boolean array indexed ``[q, r, s, t]``."""

    __slots__ = ("q", "bits")

    def __init__(self, q: int, bits: Optional[np.ndarray] = None):
        self.q = q
        if bits is None:
            bits = np.zeros((q, q, q, q), dtype=bool)
        bits = np.asarray(bits, dtype=bool)
        if bits.shape != (q, q, q, q):
            raise ValueError(f"expected shape {(q,) * 4}, got {bits.shape}")
        self.bits = bits

    @classmethod
    def full(cls, q: int) -> "QuadSet":
        return cls(q, np.ones((q,) * 4, dtype=bool))

    @classmethod
    def of(cls, q: int, quads: Iterable[Quad]) -> "QuadSet":
        out = cls(q)
        for quad in quads:
            if any(not 0 <= x < q for x in quad):
                raise ValueError(f"quadruple {quad} out of range for {q} states")
            out.bits[tuple(quad)] = True
        return out

    @staticmethod
    def index(quad: Quad, q: int) -> int:
        a, b, c, d = quad
        return ((a * q + b) * q + c) * q + d

    def __len__(self) -> int:
        return int(self.bits.sum())

    def __contains__(self, quad) -> bool:
        return bool(self.bits[tuple(quad)])

    def __iter__(self) -> Iterator[Quad]:
        for row in np.argwhere(self.bits):
            yield tuple(int(x) for x in row)

    def _check(self, other: "QuadSet") -> None:
        if not isinstance(other, QuadSet) or other.q != self.q:
            raise ValueError("quadruple sets over different state counts")

    def __or__(self, other: "QuadSet") -> "QuadSet":
        self._check(other)
        return QuadSet(self.q, self.bits | other.bits)

    def __and__(self, other: "QuadSet") -> "QuadSet":
        self._check(other)
        return QuadSet(self.q, self.bits & other.bits)

    def __le__(self, other: "QuadSet") -> bool:
        self._check(other)
        return not (self.bits & ~other.bits).any()

    def __eq__(self, other) -> bool:
        return isinstance(other, QuadSet) and other.q == self.q and np.array_equal(self.bits, other.bits)

    def __hash__(self) -> int:
        return hash((self.q, np.packbits(self.bits).tobytes()))

    def swapped(self) -> "QuadSet":
        """The image under ``(q, r, s, t) -> (s, t, q, r)``."""
        return QuadSet(self.q, np.ascontiguousarray(self.bits.transpose(2, 3, 0, 1)))

    def is_symmetric(self) -> bool:
        return np.array_equal(self.bits, self.bits.transpose(2, 3, 0, 1))

    def to_list(self) -> list[Quad]:
        return list(self)

    def __repr__(self) -> str:
        return f"QuadSet(q={self.q}, size={len(self)})"


@dataclass
class FixpointTrace:
    iterations: list[int] = field(default_factory=list)
    oracle_calls: int = 0
    wall_time: float = 0.0


@dataclass
class Verdict:
    separable: bool
    spec: ClassSpec
    witness: Optional[Quad]
    stats: FixpointTrace
    controlled_size: int = 0
    full_size: int = 0


def encode_triple(q1: int, q2: int, q3: int, q: int) -> int:
    for x in (q1, q2, q3):
        if not 0 <= x < q:
            raise ValueError(f"state {x} out of range for {q} states")
    return (q1 * q + q2) * q + q3


def decode_triple(index: int, q: int) -> tuple[int, int, int]:
    if not 0 <= index < q ** 3:
        raise ValueError(f"triple index {index} out of range for {q} states")
    rest, q3 = divmod(index, q)
    q1, q2 = divmod(rest, q)
    return q1, q2, q3


def _letter_triples(a: Nfa) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    n = a.state_count
    srcs, syms, dsts = [], [], []
    table = a.edge_table
    for i in range(len(a.alphabet)):
        rows = table[table[:, 1] == i]
        if len(rows) == 0:
            continue
        s, d = rows[:, 0], rows[:, 2]
        i1, i2, i3 = np.meshgrid(np.arange(len(rows)), np.arange(len(rows)), np.arange(len(rows)), indexing="ij")
        i1, i2, i3 = i1.ravel(), i2.ravel(), i3.ravel()
        srcs.append((s[i1] * n + s[i2]) * n + s[i3])
        dsts.append((d[i1] * n + d[i2]) * n + d[i3])
        syms.append(np.full(len(i1), i, dtype=np.int64))
    if not srcs:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty, empty
    return np.concatenate(srcs), np.concatenate(syms), np.concatenate(dsts)


class LoopWords:
    """Memoised test for a common nonempty word looping at every state of a set."""

    def __init__(self, a: Nfa):
        self.a = a
        self._memo: dict[frozenset, bool] = {}

    def __call__(self, states: Iterable[int]) -> bool:
        key = frozenset(states)
        got = self._memo.get(key)
        if got is None:
            got = intersect_nonempty(self.a, [(x, x) for x in sorted(key)], require_nonempty_word=True)
            self._memo[key] = got
        return got


def _epsilon_edges(a: Nfa, s: QuadSet, loops: Optional[LoopWords]) -> tuple[np.ndarray, np.ndarray]:
    n = a.state_count
    quads = np.argwhere(s.bits)  # columns q2, r2, q3, r3
    if len(quads) == 0:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty
    q1 = np.repeat(np.arange(n), len(quads))
    rows = np.tile(quads, (n, 1))
    q2, r2, q3, r3 = rows.T
    src = (q1 * n + q2) * n + q3
    dst = (q1 * n + r2) * n + r3
    if loops is not None:
        keep = np.fromiter(
            (loops((x1, x2, x3, y2, y3)) for x1, x2, x3, y2, y3 in zip(q1.tolist(), q2.tolist(), q3.tolist(), r2.tolist(), r3.tolist())),
            dtype=bool,
            count=len(q1),
        )
        src, dst = src[keep], dst[keep]
    return src, dst


def _build(a: Nfa, s: QuadSet, loops: Optional[LoopWords], letters=None) -> EpsNfa:
    if s.q != a.state_count:
        raise ValueError("quadruple set and automaton disagree on the state count")
    n = a.state_count
    ls, lsym, ld = letters if letters is not None else _letter_triples(a)
    es, ed = _epsilon_edges(a, s, loops)
    return EpsNfa.from_arrays(
        n ** 3,
        a.alphabet,
        np.concatenate([ls, es]),
        np.concatenate([lsym, np.full(len(es), -1, dtype=np.int64)]),
        np.concatenate([ld, ed]),
    )


def build_bs(a: Nfa, s: QuadSet) -> EpsNfa:
    """The auxiliary automaton ``B_S`` on ``Q^3``."""
    return _build(a, s, None)


def build_bs_plus(a: Nfa, s: QuadSet, loops: Optional[LoopWords] = None) -> EpsNfa:
    """``B_S+``: as ``B_S`` but an epsilon edge needs a nonempty word looping at all five states involved."""
    return _build(a, s, loops if loops is not None else LoopWords(a))


def _useful_restriction(b: Nfa, sources: np.ndarray, targets: np.ndarray) -> tuple[Nfa, np.ndarray]:
    """Restrict ``b`` to states on some source-to-target walk; returns the new index of each old state (-1 if dropped).

    Every walk between a source and a target, and every strongly connected
    component it meets, survives the restriction, so oracle answers between
    the kept sources and targets are unchanged.
    """
    n = b.state_count
    table = b.edge_table
    fwd = adjacency(n + 1, np.concatenate([table[:, 0], np.full(len(sources), n)]), np.concatenate([table[:, 2], sources]))
    bwd = adjacency(n + 1, np.concatenate([table[:, 2], np.full(len(targets), n)]), np.concatenate([table[:, 0], targets]))
    useful = reach_rows(fwd, [n])[0, :n] & reach_rows(bwd, [n])[0, :n]
    new_index = np.full(n, -1, dtype=np.int64)
    new_index[useful] = np.arange(int(useful.sum()))
    keep = useful[table[:, 0]] & useful[table[:, 2]]
    rows = table[keep]
    small = type(b).from_arrays(int(useful.sum()), b.alphabet, new_index[rows[:, 0]], rows[:, 1], new_index[rows[:, 2]])
    return small, new_index


def _query_matrix(backend: Backend, b: Nfa, n: int, threads: int = 1) -> np.ndarray:
    """``M[x, y, z, w]``: is ``{eps}`` inseparable from ``L_b((x,y,x), (z,w,z))``."""
    pairs = np.arange(n * n)
    x, y = np.divmod(pairs, n)
    nodes = (x * n + y) * n + x
    small, new_index = _useful_restriction(b, nodes, nodes)
    mapped = new_index[nodes]
    live = np.flatnonzero(mapped >= 0)
    m = np.zeros((n * n, n * n), dtype=bool)
    if len(live):
        live_nodes = mapped[live]
        if threads <= 1 or len(live) < 2:
            sub = inseparability_matrix(backend, small, live_nodes, live_nodes)
        else:
            chunks = [c for c in np.array_split(live_nodes, min(threads, len(live_nodes))) if len(c)]
            with ThreadPoolExecutor(max_workers=threads) as pool:
                parts = list(pool.map(lambda c: inseparability_matrix(backend, small, c, live_nodes), chunks))
            sub = np.concatenate(parts, axis=0)
        m[np.ix_(live, live)] = sub
    m[pairs, pairs] = True  # source equals target: the empty word
    return m.reshape(n, n, n, n)


def _tau_from_matrix(m: np.ndarray) -> np.ndarray:
    first = np.transpose(m, (1, 3, 0, 2))  # M[s, q, t, r]
    second = np.transpose(m, (0, 2, 1, 3))  # M[q, s, r, t]
    return first & second


def _resolve(oracle, base: str = "st") -> Backend:
    if oracle is None:
        return get_backend(base)
    if isinstance(oracle, str):
        return get_backend(oracle)
    return oracle


def tau(a: Nfa, s: QuadSet, oracle, threads: int = 1) -> QuadSet:
    backend = _resolve(oracle)
    m = _query_matrix(backend, build_bs(a, s), a.state_count, threads)
    return QuadSet(a.state_count, _tau_from_matrix(m))


def tau_plus(a: Nfa, s: QuadSet, oracle, threads: int = 1, loops: Optional[LoopWords] = None) -> QuadSet:
    backend = _resolve(oracle)
    m = _query_matrix(backend, build_bs_plus(a, s, loops), a.state_count, threads)
    return QuadSet(a.state_count, _tau_from_matrix(m))


def greatest_fixpoint(
    a: Nfa, spec: ClassSpec, oracle=None, threads: int = 1
) -> tuple[QuadSet, FixpointTrace]:
    """Iterate ``tau`` (``tau+`` for a plus class) downwards from ``Q^4`` until stable."""
    backend = _resolve(oracle, spec.base)
    n = a.state_count
    trace = FixpointTrace()
    start = time.perf_counter()
    loops = LoopWords(a) if spec.plus else None
    letters = _letter_triples(a)
    current = QuadSet.full(n)
    while True:
        b = _build(a, current, loops, letters)
        m = _query_matrix(backend, b, n, threads)
        trace.oracle_calls += n ** 4
        nxt = QuadSet(n, _tau_from_matrix(m))
        trace.iterations.append(len(nxt))
        if nxt == current:
            break
        current = nxt
    trace.wall_time = time.perf_counter() - start
    return current, trace


def letter_quads(a: Nfa) -> QuadSet:
    n = a.state_count
    bits = np.zeros((n,) * 4, dtype=bool)
    for m in a.letter_matrices.values():
        bits |= m[:, :, None, None] & m[None, None, :, :]
    return QuadSet(n, bits)


def compose_closure(s: QuadSet) -> QuadSet:
    """Least superset closed under ``(q1,r1,s1,t1), (r1,r2,t1,t2) -> (q1,r2,s1,t2)``.

    A quadruple ``(q, r, s, t)`` is an edge ``(q, s) -> (r, t)`` between state
    pairs, so the closure is the transitive closure of that pair graph.
    """
    n = s.q
    rel = np.ascontiguousarray(s.bits.transpose(0, 2, 1, 3)).reshape(n * n, n * n)
    for k in range(n * n):
        col = rel[:, k]
        if col.any():
            rel[col] |= rel[k]
    return QuadSet(n, rel.reshape(n, n, n, n).transpose(0, 2, 1, 3).copy())


def full_inseparable_quads(
    a: Nfa, spec: ClassSpec, oracle=None, threads: int = 1
) -> tuple[QuadSet, QuadSet, FixpointTrace]:
    """Controlled set, full set and the fixpoint trace."""
    controlled, trace = greatest_fixpoint(a, spec, oracle, threads)
    return controlled, compose_closure(controlled | letter_quads(a)), trace


def _least_witness(full: QuadSet, i1, f1, i2, f2) -> Optional[Quad]:
    n = full.q
    masks = []
    for group in (i1, f1, i2, f2):
        mask = np.zeros(n, dtype=bool)
        for x in group:
            if not 0 <= x < n:
                raise ValueError(f"state {x} out of range for {n} states")
            mask[x] = True
        masks.append(mask)
    box = masks[0][:, None, None, None] & masks[1][None, :, None, None] & masks[2][None, None, :, None] & masks[3][None, None, None, :]
    hits = np.argwhere(full.bits & box)
    if len(hits) == 0:
        return None
    return tuple(int(x) for x in hits[0])  # argwhere is in lexicographic order


def decide(
    a: Nfa, i1, f1, i2, f2, spec: ClassSpec, oracle=None, threads: int = 1
) -> Verdict:
    """Separable iff no quadruple of ``I1 x F1 x I2 x F2`` is inseparable."""
    controlled, full, trace = full_inseparable_quads(a, spec, oracle, threads)
    witness = _least_witness(full, i1, f1, i2, f2)
    return Verdict(witness is None, spec, witness, trace, len(controlled), len(full))


def common_word_quads(a: Nfa) -> QuadSet:
    """``(q, r, s, t)`` with ``L(q, r)`` and ``L(s, t)`` sharing a word."""
    n = a.state_count
    prod = Nfa.from_arrays(n * n, a.alphabet, *_pair_product(a))
    reach = reachability_matrix(prod)  # reach[(q,s), (r,t)]
    return QuadSet(n, reach.reshape(n, n, n, n).transpose(0, 2, 1, 3).copy())


def _pair_product(a: Nfa):
    n = a.state_count
    table = a.edge_table
    srcs, syms, dsts = [], [], []
    for i in range(len(a.alphabet)):
        rows = table[table[:, 1] == i]
        j, k = np.meshgrid(np.arange(len(rows)), np.arange(len(rows)), indexing="ij")
        j, k = j.ravel(), k.ravel()
        srcs.append(rows[j, 0] * n + rows[k, 0])
        dsts.append(rows[j, 2] * n + rows[k, 2])
        syms.append(np.full(len(j), i, dtype=np.int64))
    return np.concatenate(srcs), np.concatenate(syms), np.concatenate(dsts)


def nonempty_pair_quads(a: Nfa) -> QuadSet:
    """``(q, r, s, t)`` with both ``L(q, r)`` and ``L(s, t)`` nonempty."""
    reach = reachability_matrix(a)
    return QuadSet(a.state_count, reach[:, :, None, None] & reach[None, None, :, :])
