from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from ..automata import Nfa

BASES = ("st", "mod", "amt", "gr")


class OracleUndecided(RuntimeError):
    """An oracle exhausted its resource budget without reaching an answer."""


@dataclass(frozen=True)
class ClassSpec:
    """A base group class and whether its well-suited extension is meant."""

    base: str
    plus: bool = False

    def __post_init__(self) -> None:
        if self.base not in BASES:
            raise ValueError(f"unknown base class {self.base!r}; expected one of {BASES}")

    @classmethod
    def parse(cls, ident: str) -> "ClassSpec":
        text = ident.strip().lower()
        if text.startswith("bpol-"):
            text = text[len("bpol-"):]
        plus = text.endswith("+")
        return cls(text.rstrip("+"), plus)

    @property
    def ident(self) -> str:
        return f"bpol-{self.base}{'+' if self.plus else ''}"

    def __str__(self) -> str:
        return self.ident


ALL_CLASSES = tuple(ClassSpec(b, p) for b in BASES for p in (False, True))


@dataclass(frozen=True)
class OracleAnswer:
    """Whether ``{eps}`` fails to be separable from a pair language, with evidence."""

    inseparable: bool
    evidence: Optional[dict[str, Any]] = field(default=None, compare=False)


class Backend:
    """One group class.  ``matrix`` is the batched form of ``answer``."""

    name = ""

    def answer(self, b: Nfa, src: int, dst: int) -> OracleAnswer:
        raise NotImplementedError

    def matrix(self, b: Nfa, sources, targets) -> np.ndarray:
        out = np.zeros((len(sources), len(targets)), dtype=bool)
        for i, s in enumerate(sources):
            for j, t in enumerate(targets):
                out[i, j] = self.answer(b, s, t).inseparable
        return out


class OracleCache:
    """Answers keyed by (class, automaton fingerprint, src, dst).

    Reads take no lock; insertion is serialised.  Answers are deterministic, so
    a racing duplicate computation stores the same value.
    """

    def __init__(self) -> None:
        self._data: dict[tuple, OracleAnswer] = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def get(self, key) -> Optional[OracleAnswer]:
        ans = self._data.get(key)
        if ans is None:
            self.misses += 1
        else:
            self.hits += 1
        return ans

    def put(self, key, answer: OracleAnswer) -> OracleAnswer:
        with self._lock:
            return self._data.setdefault(key, answer)

    def __len__(self) -> int:
        return len(self._data)
