"""Automaton data model and the reachability/product primitives.

Automata are immutable.  States are the integers ``0 .. state_count - 1`` and
the pair language ``L(q, r)`` is the set of words labelling a run from ``q``
to ``r``.  Only the auxiliary automata built by :mod:`bpolsep.fixpoint` carry
epsilon transitions; everything read from user input is epsilon-free.
"""

from __future__ import annotations

import hashlib
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

EPSILON = ""

StateSet = frozenset
Transition = tuple[int, str, int]


class AutomatonError(ValueError):
    """Raised for malformed automata or automaton files."""


def check_alphabet(symbols: Iterable[str]) -> tuple[str, ...]:
    symbols = tuple(symbols)
    if not symbols:
        raise AutomatonError("alphabet must be nonempty")
    for sym in symbols:
        if len(sym) != 1:
            raise AutomatonError(f"alphabet symbol {sym!r} is not a single character")
    if len(set(symbols)) != len(symbols):
        raise AutomatonError(f"duplicate symbols in alphabet {symbols!r}")
    return symbols


@dataclass(frozen=True)
class Nfa:
    """Epsilon-free NFA ``(Q, delta)`` over an explicit alphabet."""

    state_count: int
    alphabet: tuple[str, ...]
    transitions: frozenset[Transition] = field(default_factory=frozenset)

    allows_epsilon = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "alphabet", check_alphabet(self.alphabet))
        object.__setattr__(self, "transitions", frozenset(self.transitions))
        if self.state_count < 0:
            raise AutomatonError("negative state count")
        symbols = set(self.alphabet)
        for src, sym, dst in self.transitions:
            if not (0 <= src < self.state_count and 0 <= dst < self.state_count):
                raise AutomatonError(
                    f"transition {(src, sym, dst)} out of range for {self.state_count} states"
                )
            if sym == EPSILON:
                if not self.allows_epsilon:
                    raise AutomatonError("epsilon transition in an epsilon-free NFA")
            elif sym not in symbols:
                raise AutomatonError(f"symbol {sym!r} not in alphabet {self.alphabet!r}")

    @classmethod
    def from_arrays(
        cls, state_count: int, alphabet: Sequence[str], src, sym, dst
    ) -> "Nfa":
        """Build from parallel index arrays; ``sym`` indexes ``alphabet`` and -1 means epsilon.

        Intended for large generated automata: the arrays are trusted to be in
        range and are deduplicated, skipping per-transition validation.
        """
        alphabet = check_alphabet(alphabet)
        table = np.stack(
            [np.asarray(src, dtype=np.int64), np.asarray(sym, dtype=np.int64), np.asarray(dst, dtype=np.int64)],
            axis=1,
        ).reshape(-1, 3)
        table = np.unique(table, axis=0)
        if table.size and (table[:, 1] < 0).any() and not cls.allows_epsilon:
            raise AutomatonError("epsilon transition in an epsilon-free NFA")
        labels = (*alphabet, EPSILON)
        transitions = frozenset(
            (s, labels[a], d) for s, a, d in table.tolist()
        )
        obj = object.__new__(cls)
        object.__setattr__(obj, "state_count", int(state_count))
        object.__setattr__(obj, "alphabet", alphabet)
        object.__setattr__(obj, "transitions", transitions)
        obj.__dict__["edge_table"] = table
        return obj

    @property
    def states(self) -> range:
        return range(self.state_count)

    @cached_property
    def edge_table(self) -> np.ndarray:
        """Sorted ``(src, symbol index, dst)`` rows; epsilon has symbol index -1."""
        index = {sym: i for i, sym in enumerate(self.alphabet)}
        index[EPSILON] = -1
        rows = sorted((s, index[a], d) for s, a, d in self.transitions)
        return np.array(rows, dtype=np.int64).reshape(-1, 3)

    @cached_property
    def successors(self) -> dict[str, tuple[tuple[int, ...], ...]]:
        """``successors[sym][q]`` lists the ``sym``-successors of ``q``."""
        table = {sym: [[] for _ in self.states] for sym in (*self.alphabet, EPSILON)}
        for src, sym, dst in sorted(self.transitions):
            table[sym][src].append(dst)
        return {sym: tuple(tuple(row) for row in rows) for sym, rows in table.items()}

    @cached_property
    def letter_matrices(self) -> dict[str, np.ndarray]:
        table = self.edge_table
        mats = {}
        for i, sym in enumerate(self.alphabet):
            mat = np.zeros((self.state_count, self.state_count), dtype=bool)
            rows = table[table[:, 1] == i]
            mat[rows[:, 0], rows[:, 2]] = True
            mats[sym] = mat
        return mats

    @cached_property
    def epsilon_matrix(self) -> np.ndarray:
        mat = np.zeros((self.state_count, self.state_count), dtype=bool)
        rows = self.edge_table[self.edge_table[:, 1] < 0]
        mat[rows[:, 0], rows[:, 2]] = True
        return mat

    @cached_property
    def graph(self) -> csr_matrix:
        """Underlying directed graph, all labels forgotten."""
        table = self.edge_table
        data = np.ones(len(table), dtype=np.float64)
        return csr_matrix((data, (table[:, 0], table[:, 2])), shape=(self.state_count, self.state_count))

    @cached_property
    def scc_labels(self) -> np.ndarray:
        if self.state_count == 0:
            return np.zeros(0, dtype=np.int32)
        _, labels = connected_components(self.graph, directed=True, connection="strong")
        return labels

    @cached_property
    def fingerprint(self) -> str:
        h = hashlib.sha1()
        h.update(f"{type(self).__name__}|{self.state_count}|{''.join(self.alphabet)}|".encode())
        for src, sym, dst in sorted(self.transitions):
            h.update(f"{src},{sym},{dst};".encode())
        return h.hexdigest()

    def step(self, states: Iterable[int], sym: str) -> set[int]:
        row = self.successors[sym]
        out: set[int] = set()
        for q in states:
            out.update(row[q])
        return out

    def epsilon_closure(self, states: Iterable[int]) -> set[int]:
        seen = set(states)
        stack = list(seen)
        eps = self.successors[EPSILON]
        while stack:
            q = stack.pop()
            for r in eps[q]:
                if r not in seen:
                    seen.add(r)
                    stack.append(r)
        return seen

    def reachable(self, sources: Iterable[int]) -> set[int]:
        seen = set(sources)
        stack = list(seen)
        while stack:
            q = stack.pop()
            for sym in self.successors:
                for r in self.successors[sym][q]:
                    if r not in seen:
                        seen.add(r)
                        stack.append(r)
        return seen

    def accepts(self, word: str, initial: Iterable[int], final: Iterable[int]) -> bool:
        current = self.epsilon_closure(initial)
        for letter in word:
            current = self.epsilon_closure(self.step(current, letter))
            if not current:
                return False
        return not current.isdisjoint(final)


@dataclass(frozen=True)
class EpsNfa(Nfa):
    """NFA whose transitions may also carry the :data:`EPSILON` label."""

    allows_epsilon = True


def disjoint_union(n1: Nfa, n2: Nfa) -> tuple[Nfa, int]:
    """Place ``n2`` next to ``n1``; states of ``n2`` are shifted by the returned offset."""
    if n1.alphabet != n2.alphabet:
        raise AutomatonError(f"alphabet mismatch: {n1.alphabet!r} vs {n2.alphabet!r}")
    offset = n1.state_count
    shifted = {(s + offset, a, d + offset) for s, a, d in n2.transitions}
    cls = EpsNfa if (n1.allows_epsilon or n2.allows_epsilon) else Nfa
    return cls(n1.state_count + n2.state_count, n1.alphabet, n1.transitions | shifted), offset


def pair_nonempty(a: Nfa, q: int, r: int) -> bool:
    """Whether ``L_a(q, r)`` is nonempty; epsilon edges cost nothing."""
    if q == r:
        return True
    return r in a.reachable([q])


def intersect_nonempty(
    a: Nfa, pairs: Sequence[tuple[int, int]], require_nonempty_word: bool = False
) -> bool:
    """Whether one word labels a run ``q_i -> r_i`` for every pair simultaneously.

    Explores the k-fold product on the fly.  A product node carries a flag
    recording whether a letter has been read yet; epsilon moves advance a single
    component.
    """
    if not pairs:
        raise ValueError("pairs must be nonempty")
    start = tuple(q for q, _ in pairs)
    goal = tuple(r for _, r in pairs)
    succ = a.successors
    letters = a.alphabet
    eps = succ[EPSILON]
    has_eps = any(eps)
    seen = {(start, False)}
    queue = deque(seen)
    while queue:
        node, moved = queue.popleft()
        if node == goal and (moved or not require_nonempty_word):
            return True
        nexts = []
        for sym in letters:
            row = succ[sym]
            frontier = [()]
            for q in node:
                targets = row[q]
                if not targets:
                    frontier = []
                    break
                frontier = [f + (t,) for f in frontier for t in targets]
            nexts.extend((f, True) for f in frontier)
        if has_eps:
            for i, q in enumerate(node):
                for t in eps[q]:
                    nexts.append((node[:i] + (t,) + node[i + 1 :], moved))
        for item in nexts:
            if item not in seen:
                seen.add(item)
                queue.append(item)
    return False


def trim(a: Nfa, sources: Iterable[int], sinks: Iterable[int]) -> tuple[Nfa, dict[int, int]]:
    """Keep the states lying on some ``sources -> sinks`` path.

    The designated sources always survive.  Renumbering preserves the original
    order; the returned map sends old indices to new ones.
    """
    sources = set(sources)
    forward = a.reachable(sources)
    backward = _coreachable(a, set(sinks))
    useful = (forward & backward) | sources
    keep = sorted(useful)
    mapping = {old: new for new, old in enumerate(keep)}
    transitions = {
        (mapping[s], sym, mapping[d])
        for s, sym, d in a.transitions
        if s in forward and s in backward and d in forward and d in backward
    }
    return type(a)(len(keep), a.alphabet, frozenset(transitions)), mapping


def _coreachable(a: Nfa, targets: set[int]) -> set[int]:
    preds: list[list[int]] = [[] for _ in a.states]
    for s, _, d in a.transitions:
        preds[d].append(s)
    seen = set(targets)
    stack = list(seen)
    while stack:
        q = stack.pop()
        for p in preds[q]:
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return seen


def reachability_matrix(a: Nfa) -> np.ndarray:
    """Boolean ``R[q, r]`` iff ``L_a(q, r)`` is nonempty (reflexive)."""
    n = a.state_count
    reach = np.eye(n, dtype=bool)
    adj = a.graph.toarray().astype(bool)
    reach |= adj
    while True:
        nxt = reach | ((reach.astype(np.int32) @ reach.astype(np.int32)) > 0)
        if np.array_equal(nxt, reach):
            return reach
        reach = nxt
