"""A small catalogue of finite groups and a brute-force separator search.

A morphism ``phi: A* -> G`` into a finite group separates ``{eps}`` from
``L(src, dst)`` when no word of the pair language maps to the identity.  The
search is used only to produce evidence and to test the GR oracle for
soundness; failing to find a morphism proves nothing.
"""

from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence

from ..automata import EPSILON, Nfa


@dataclass(frozen=True)
class GroupCatalogEntry:
    """A finite group as a multiplication table on ``0..order-1`` with identity 0."""

    name: str
    table: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.table)
        if n == 0 or any(len(row) != n for row in self.table):
            raise ValueError(f"{self.name}: table must be square and non-empty")
        if any(sorted(row) != list(range(n)) for row in self.table):
            raise ValueError(f"{self.name}: rows must be permutations")
        if any(self.table[0][g] != g or self.table[g][0] != g for g in range(n)):
            raise ValueError(f"{self.name}: element 0 must be the identity")
        for x, y, z in itertools.product(range(n), repeat=3):
            if self.table[self.table[x][y]][z] != self.table[x][self.table[y][z]]:
                raise ValueError(f"{self.name}: multiplication is not associative")

    @property
    def order(self) -> int:
        return len(self.table)

    def mul(self, x: int, y: int) -> int:
        return self.table[x][y]


def cyclic(n: int) -> GroupCatalogEntry:
    return GroupCatalogEntry(f"Z{n}", tuple(tuple((i + j) % n for j in range(n)) for i in range(n)))


def direct_product(g: GroupCatalogEntry, h: GroupCatalogEntry) -> GroupCatalogEntry:
    m = h.order
    size = g.order * m
    table = tuple(
        tuple(g.mul(x // m, y // m) * m + h.mul(x % m, y % m) for y in range(size))
        for x in range(size)
    )
    return GroupCatalogEntry(f"{g.name}x{h.name}", table)


def symmetric(k: int) -> GroupCatalogEntry:
    perms = sorted(itertools.permutations(range(k)))  # identity first
    index = {p: i for i, p in enumerate(perms)}
    table = tuple(
        tuple(index[tuple(p[q[i]] for i in range(k))] for q in perms) for p in perms
    )
    return GroupCatalogEntry(f"S{k}", table)


def default_catalog() -> list[GroupCatalogEntry]:
    groups = [cyclic(n) for n in range(2, 13)]
    groups.append(direct_product(cyclic(2), cyclic(2)))
    groups.append(direct_product(cyclic(2), cyclic(4)))
    groups.append(symmetric(3))
    groups.append(symmetric(4))
    return groups


def hits_identity(b: Nfa, src: int, dst: int, group: GroupCatalogEntry, images: Sequence[int]) -> bool:
    """Whether some word of ``L_b(src, dst)`` evaluates to the identity."""
    image_of = dict(zip(b.alphabet, images))
    start = (src, 0)
    seen = {start}
    queue = deque([start])
    while queue:
        q, g = queue.popleft()
        if q == dst and g == 0:
            return True
        for sym, rows in b.successors.items():
            h = g if sym == EPSILON else group.mul(g, image_of[sym])
            for t in rows[q]:
                node = (t, h)
                if node not in seen:
                    seen.add(node)
                    queue.append(node)
    return False


def verify_morphism(b: Nfa, src: int, dst: int, group: GroupCatalogEntry, images: Sequence[int]) -> bool:
    """Independent re-check by explicit word-level evaluation of reachable sets.

    Computes, for each group element, the set of automaton states reachable by
    words evaluating to it, as a fixpoint over subsets rather than a BFS.
    """
    n = group.order
    reach = [set() for _ in range(n)]
    reach[0] = set(b.epsilon_closure({src}))
    changed = True
    while changed:
        changed = False
        for g in range(n):
            for sym, img in zip(b.alphabet, images):
                h = group.mul(g, img)
                new = b.epsilon_closure(b.step(reach[g], sym)) - reach[h]
                if new:
                    reach[h] |= new
                    changed = True
    return dst not in reach[0]


def brute_force_group_search(
    b: Nfa,
    src: int,
    dst: int,
    catalog: Optional[Sequence[GroupCatalogEntry]] = None,
    exhaustive_limit: int = 4096,
    samples: int = 64,
    seed: int = 0,
) -> Optional[tuple[GroupCatalogEntry, list[int]]]:
    """Search the catalogue for a morphism separating ``{eps}`` from ``L_b(src, dst)``."""
    rng = random.Random(seed)
    k = len(b.alphabet)
    for group in catalog if catalog is not None else default_catalog():
        if group.order ** k <= exhaustive_limit:
            candidates = itertools.product(range(group.order), repeat=k)
        else:
            candidates = (tuple(rng.randrange(group.order) for _ in range(k)) for _ in range(samples))
        for images in candidates:
            images = list(images)
            if not hits_identity(b, src, dst, group, images):
                if not verify_morphism(b, src, dst, group, images):
                    raise AssertionError("group search and verification disagree")
                return group, images
    return None
