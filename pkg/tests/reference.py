"""Brute-force reference computations written directly from the definitions.

Nothing here touches the numpy code paths of the package; automata are plain
``(state_count, alphabet, transitions)`` data read through their public fields.
"""

from __future__ import annotations

import itertools
from collections import deque

EPS = ""


def adjacency(n, transitions):
    out = {q: [] for q in range(n)}
    for s, a, d in transitions:
        out[s].append((a, d))
    return out


def reach(n, transitions, src):
    adj = adjacency(n, transitions)
    seen = {src}
    queue = deque([src])
    while queue:
        q = queue.popleft()
        for _, d in adj[q]:
            if d not in seen:
                seen.add(d)
                queue.append(d)
    return seen


def nonempty(nfa, q, r):
    return r in reach(nfa.state_count, nfa.transitions, q)


def common_word(nfa, q, r, s, t):
    """Whether ``L(q, r)`` and ``L(s, t)`` share a word (epsilon-free input)."""
    adj = adjacency(nfa.state_count, nfa.transitions)
    seen = {(q, s)}
    queue = deque(seen)
    while queue:
        x, y = queue.popleft()
        if (x, y) == (r, t):
            return True
        for a, x2 in adj[x]:
            for b, y2 in adj[y]:
                if a == b and (x2, y2) not in seen:
                    seen.add((x2, y2))
                    queue.append((x2, y2))
    return False


def common_loop_word(nfa, states):
    """A nonempty word labelling a loop at every given state simultaneously."""
    states = tuple(states)
    adj = adjacency(nfa.state_count, nfa.transitions)
    starts = set()
    for a in nfa.alphabet:
        options = [[d for b, d in adj[x] if b == a] for x in states]
        starts.update(itertools.product(*options))
    seen = set(starts)
    queue = deque(starts)
    while queue:
        node = queue.popleft()
        if node == states:
            return True
        for a in nfa.alphabet:
            options = [[d for b, d in adj[x] if b == a] for x in node]
            for nxt in itertools.product(*options):
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
    return False


def aux_automaton(nfa, quads, plus=False):
    """Transitions of ``B_S`` (or ``B_S+``) over triples of states, as a set."""
    n = nfa.state_count
    trans = set()
    for (s1, a1, t1), (s2, a2, t2), (s3, a3, t3) in itertools.product(nfa.transitions, repeat=3):
        if a1 == a2 == a3:
            trans.add(((s1, s2, s3), a1, (t1, t2, t3)))
    for q1 in range(n):
        for q2, r2, q3, r3 in quads:
            if plus and not common_loop_word(nfa, (q1, q2, q3, r2, r3)):
                continue
            trans.add(((q1, q2, q3), EPS, (q1, r2, r3)))
    return trans


def triple_reach(trans, src):
    adj = {}
    for s, _, d in trans:
        adj.setdefault(s, []).append(d)
    seen = {src}
    queue = deque([src])
    while queue:
        x = queue.popleft()
        for y in adj.get(x, ()):
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return seen


def tau_st(nfa, quads, plus=False):
    """tau / tau+ for the trivial class, by one BFS per query source."""
    n = nfa.state_count
    trans = aux_automaton(nfa, quads, plus)
    cache = {}

    def ok(src, dst):
        if src not in cache:
            cache[src] = triple_reach(trans, src)
        return dst in cache[src]

    out = set()
    for q, r, s, t in itertools.product(range(n), repeat=4):
        if ok((s, q, s), (t, r, t)) and ok((q, s, q), (r, t, r)):
            out.add((q, r, s, t))
    return out


def gfp_st(nfa, plus=False):
    n = nfa.state_count
    current = set(itertools.product(range(n), repeat=4))
    sizes = []
    while True:
        nxt = tau_st(nfa, current, plus)
        sizes.append(len(nxt))
        if nxt == current:
            return current, sizes
        current = nxt


def letter_quads(nfa):
    return {
        (s1, d1, s2, d2)
        for (s1, a1, d1), (s2, a2, d2) in itertools.product(nfa.transitions, repeat=2)
        if a1 == a2
    }


def compose_closure(quads):
    """Naive saturation of the composition rule."""
    current = set(quads)
    while True:
        new = {
            (q1, r2, s1, t2)
            for (q1, r1, s1, t1) in current
            for (q2, r2, s2, t2) in current
            if r1 == q2 and t1 == s2
        } - current
        if not new:
            return current
        current |= new


def lengths_hit_zero(nfa, src, dst, m):
    """Some word of ``L(src, dst)`` has length divisible by ``m``; epsilon costs 0."""
    adj = adjacency(nfa.state_count, nfa.transitions)
    seen = {(src, 0)}
    queue = deque(seen)
    while queue:
        q, r = queue.popleft()
        if (q, r) == (dst, 0):
            return True
        for a, d in adj[q]:
            node = (d, (r + (a != EPS)) % m)
            if node not in seen:
                seen.add(node)
                queue.append(node)
    return False


def mod_sweep(nfa, src, dst, bound=64):
    return all(lengths_hit_zero(nfa, src, dst, m) for m in range(1, bound + 1))


def parikh_hits_zero(nfa, src, dst, moduli):
    adj = adjacency(nfa.state_count, nfa.transitions)
    index = {a: i for i, a in enumerate(nfa.alphabet)}
    start = (src, (0,) * len(moduli))
    seen = {start}
    queue = deque(seen)
    while queue:
        q, v = queue.popleft()
        if q == dst and not any(v):
            return True
        for a, d in adj[q]:
            if a == EPS:
                w = v
            else:
                w = list(v)
                w[index[a]] = (w[index[a]] + 1) % moduli[index[a]]
                w = tuple(w)
            if (d, w) not in seen:
                seen.add((d, w))
                queue.append((d, w))
    return False


def amt_sweep(nfa, src, dst, bound=12):
    k = len(nfa.alphabet)
    return all(parikh_hits_zero(nfa, src, dst, mods) for mods in itertools.product(range(1, bound + 1), repeat=k))


def group_word_hits_identity(nfa, src, dst, mul, identity, images):
    """With ``images[a]`` the image of each letter, can ``L(src, dst)`` evaluate to the identity?"""
    adj = adjacency(nfa.state_count, nfa.transitions)
    seen = {(src, identity)}
    queue = deque(seen)
    while queue:
        q, g = queue.popleft()
        if (q, g) == (dst, identity):
            return True
        for a, d in adj[q]:
            h = g if a == EPS else mul(g, images[a])
            if (d, h) not in seen:
                seen.add((d, h))
                queue.append((d, h))
    return False


def has_parikh_vector(nfa, src, dst, target):
    """Some word of ``L(src, dst)`` has exactly the letter counts ``target``."""
    adj = adjacency(nfa.state_count, nfa.transitions)
    index = {a: i for i, a in enumerate(nfa.alphabet)}
    start = (src, (0,) * len(target))
    seen = {start}
    queue = deque(seen)
    while queue:
        q, v = queue.popleft()
        if q == dst and v == tuple(target):
            return True
        for a, d in adj[q]:
            w = list(v)
            if a != EPS:
                w[index[a]] += 1
                if w[index[a]] > target[index[a]]:
                    continue
            node = (d, tuple(w))
            if node not in seen:
                seen.add(node)
                queue.append(node)
    return False


class PlainNfa:
    """Minimal automaton record accepted by every function in this module."""

    def __init__(self, state_count, alphabet, transitions):
        self.state_count = state_count
        self.alphabet = tuple(alphabet)
        self.transitions = frozenset(transitions)


def aux_plain(nfa, quads, plus=False):
    """``aux_automaton`` with triples flattened to ``(q1 * n + q2) * n + q3``."""
    n = nfa.state_count
    flat = lambda x: (x[0] * n + x[1]) * n + x[2]  # noqa: E731
    trans = {(flat(s), a, flat(d)) for s, a, d in aux_automaton(nfa, quads, plus)}
    return PlainNfa(n ** 3, nfa.alphabet, trans)


def tau_generic(nfa, quads, insep, plus=False):
    """tau / tau+ for an arbitrary ``insep(aux, src, dst)`` predicate."""
    n = nfa.state_count
    aux = aux_plain(nfa, quads, plus)
    flat = lambda x: (x[0] * n + x[1]) * n + x[2]  # noqa: E731
    memo = {}

    def ok(src, dst):
        key = (flat(src), flat(dst))
        if key not in memo:
            memo[key] = key[0] == key[1] or insep(aux, *key)
        return memo[key]

    return {
        (q, r, s, t)
        for q, r, s, t in itertools.product(range(n), repeat=4)
        if ok((s, q, s), (t, r, t)) and ok((q, s, q), (r, t, r))
    }


def gfp_generic(nfa, insep, plus=False):
    current = set(itertools.product(range(nfa.state_count), repeat=4))
    while True:
        nxt = tau_generic(nfa, current, insep, plus)
        if nxt == current:
            return current
        current = nxt


SMALL_GROUPS = [("Z%d" % m, m) for m in range(2, 7)]
S3 = list(itertools.permutations(range(3)))


def small_group_inseparable(nfa, src, dst):
    """No morphism into Z2..Z6 or S3 sends every word of ``L(src, dst)`` off the identity."""
    letters = list(nfa.alphabet)
    for _, m in SMALL_GROUPS:
        mul = lambda g, h, m=m: (g + h) % m  # noqa: E731
        for images in itertools.product(range(m), repeat=len(letters)):
            if not group_word_hits_identity(nfa, src, dst, mul, 0, dict(zip(letters, images))):
                return False
    compose = lambda g, h: tuple(h[g[i]] for i in range(3))  # noqa: E731
    for images in itertools.product(S3, repeat=len(letters)):
        if not group_word_hits_identity(nfa, src, dst, compose, (0, 1, 2), dict(zip(letters, images))):
            return False
    return True
