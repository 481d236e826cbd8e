"""Reference checks that do not share code paths with the fixpoint engine.

* k-piecewise-testable separation through the monoid of subword profiles.
* A bounded search for words that agree on prefix, suffix and ordered factor
  tests, which is evidence against dot-depth-one separability.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Optional

from .automata import Nfa
from .oracles import OracleUndecided

DEFAULT_PROFILE_BUDGET = 100_000


@dataclass(frozen=True)
class SubwordProfile:
    """The scattered subwords of length at most ``k`` of some word."""

    k: int
    subwords: frozenset

    def extend(self, letter: str) -> "SubwordProfile":
        grown = {u + letter for u in self.subwords if len(u) < self.k}
        return SubwordProfile(self.k, self.subwords | grown)

    def __le__(self, other: "SubwordProfile") -> bool:
        return self.k == other.k and self.subwords <= other.subwords


def empty_profile(k: int) -> SubwordProfile:
    return SubwordProfile(k, frozenset({""}))


def subword_profile(word: str, k: int) -> SubwordProfile:
    profile = empty_profile(k)
    for letter in word:
        profile = profile.extend(letter)
    return profile


def reachable_profiles(
    a: Nfa, initial: Iterable[int], final: Iterable[int], k: int, budget: int = DEFAULT_PROFILE_BUDGET
) -> set[SubwordProfile]:
    """Profiles of all words in ``L(initial, final)``."""
    final = set(final)
    start = [(q, empty_profile(k)) for q in sorted(set(initial))]
    seen = set(start)
    stack = list(start)
    out = set()
    while stack:
        q, prof = stack.pop()
        if q in final:
            out.add(prof)
        for letter in a.alphabet:
            targets = a.successors[letter][q]
            if not targets:
                continue
            nxt_prof = prof.extend(letter)
            for t in targets:
                node = (t, nxt_prof)
                if node not in seen:
                    seen.add(node)
                    if len(seen) > budget:
                        raise OracleUndecided(f"profile exploration exceeded budget of {budget} states")
                    stack.append(node)
    return out


def pt_separable_at_k(
    a: Nfa, i1, f1, i2, f2, k: int, budget: int = DEFAULT_PROFILE_BUDGET
) -> bool:
    """Whether a Boolean combination of subword tests of length <= k separates the two languages."""
    left = reachable_profiles(a, i1, f1, k, budget)
    if not left:
        return True
    right = reachable_profiles(a, i2, f2, k, budget)
    return left.isdisjoint(right)


def words_of(a: Nfa, initial: Iterable[int], final: Iterable[int], max_len: int) -> Iterator[str]:
    """Words of ``L(initial, final)`` up to ``max_len`` in shortlex order."""
    final = set(final)
    layer = [("", frozenset(initial))]
    for length in range(max_len + 1):
        nxt = []
        for word, states in layer:
            if states & final:
                yield word
            if length == max_len:
                continue
            for letter in a.alphabet:
                succ = frozenset(a.step(states, letter))
                if succ:
                    nxt.append((word + letter, succ))
        layer = nxt


def factor_sequences(word: str, k: int) -> frozenset:
    """Tuples of nonempty factors occurring left to right at disjoint positions, total length <= k."""

    @lru_cache(maxsize=None)
    def from_pos(pos: int, budget: int) -> frozenset:
        out = {()}
        for i in range(pos, len(word)):
            for j in range(i + 1, min(len(word), i + budget) + 1):
                head = word[i:j]
                for tail in from_pos(j, budget - (j - i)):
                    out.add((head,) + tail)
        return frozenset(out)

    return from_pos(0, k)


def dd1_profile(word: str, k: int) -> tuple:
    return word[:k], word[-k:] if k else "", factor_sequences(word, k)


def dd1_collision_search(
    a: Nfa, i1, f1, i2, f2, k: int, max_len: int
) -> Optional[tuple[str, str]]:
    """Shortlex-first pair of words, one per language, with identical dot-depth-one profiles."""
    right: dict[tuple, str] = {}
    for w in words_of(a, i2, f2, max_len):
        right.setdefault(dd1_profile(w, k), w)
    if not right:
        return None
    for w in words_of(a, i1, f1, max_len):
        hit = right.get(dd1_profile(w, k))
        if hit is not None:
            return w, hit
    return None


def subword_collision_search(
    a: Nfa, i1, f1, i2, f2, k: int, max_len: int
) -> Optional[tuple[str, str]]:
    """Shortlex-first pair of words, one per language, with identical k-subword profiles."""
    right: dict[SubwordProfile, str] = {}
    for w in words_of(a, i2, f2, max_len):
        right.setdefault(subword_profile(w, k), w)
    for w in words_of(a, i1, f1, max_len):
        hit = right.get(subword_profile(w, k))
        if hit is not None:
            return w, hit
    return None
