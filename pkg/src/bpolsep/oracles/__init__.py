"""Group-class oracles: is ``{eps}`` separable from a pair language by a class G?"""

from __future__ import annotations

from typing import Optional

import numpy as np

from ..automata import Nfa, pair_nonempty
from .amt import AmtBackend, parikh_image
from .base import (
    ALL_CLASSES,
    BASES,
    Backend,
    ClassSpec,
    OracleAnswer,
    OracleCache,
    OracleUndecided,
)
from .gr import GrBackend, gr_relation, gr_relation_reference
from .groups import (
    GroupCatalogEntry,
    brute_force_group_search,
    default_catalog,
    verify_morphism,
)
from .lattice import LinearSet, SemilinearSet
from .mod import ModBackend, lengths_hit_zero_mod
from .st import StBackend

_DEFAULT_CACHE = OracleCache()


def get_backend(base: str, budget: Optional[int] = None) -> Backend:
    if base == "st":
        return StBackend()
    if base == "mod":
        return ModBackend()
    if base == "amt":
        return AmtBackend() if budget is None else AmtBackend(budget=budget)
    if base == "gr":
        return GrBackend()
    raise ValueError(f"unknown base class {base!r}; expected one of {BASES}")


def eps_inseparable(
    base: str,
    b: Nfa,
    src: int,
    dst: int,
    backend: Optional[Backend] = None,
    cache: Optional[OracleCache] = _DEFAULT_CACHE,
) -> OracleAnswer:
    """Whether no language of class ``base`` contains ``eps`` and avoids ``L_b(src, dst)``."""
    if not (0 <= src < b.state_count and 0 <= dst < b.state_count):
        raise ValueError(f"states ({src}, {dst}) out of range for {b.state_count} states")
    if src == dst:
        return OracleAnswer(True, {"reason": "empty word in pair language"})
    if not pair_nonempty(b, src, dst):
        return OracleAnswer(False, {"reason": "empty pair language"})
    key = (base, b.fingerprint, src, dst)
    if cache is not None:
        got = cache.get(key)
        if got is not None:
            return got
    answer = (backend or get_backend(base)).answer(b, src, dst)
    if cache is not None:
        answer = cache.put(key, answer)
    return answer


def inseparability_matrix(backend: Backend, b: Nfa, sources, targets) -> np.ndarray:
    """``out[i, j]`` answers the query ``(sources[i], targets[j])``."""
    sources = np.asarray(sources, dtype=np.int64)
    targets = np.asarray(targets, dtype=np.int64)
    if len(sources) == 0 or len(targets) == 0:
        return np.zeros((len(sources), len(targets)), dtype=bool)
    out = np.asarray(backend.matrix(b, sources, targets), dtype=bool)
    return out | (sources[:, None] == targets[None, :])


__all__ = [
    "ALL_CLASSES",
    "BASES",
    "AmtBackend",
    "Backend",
    "ClassSpec",
    "GrBackend",
    "GroupCatalogEntry",
    "LinearSet",
    "ModBackend",
    "OracleAnswer",
    "OracleCache",
    "OracleUndecided",
    "SemilinearSet",
    "StBackend",
    "brute_force_group_search",
    "default_catalog",
    "eps_inseparable",
    "get_backend",
    "gr_relation",
    "gr_relation_reference",
    "inseparability_matrix",
    "lengths_hit_zero_mod",
    "parikh_image",
    "verify_morphism",
]
