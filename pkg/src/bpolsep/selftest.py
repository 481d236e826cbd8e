"""Self-test suites: curated instances plus seeded invariant sweeps.

Every suite is deterministic for a fixed seed; only the ``wall_ms`` fields
depend on the machine.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np

from .automata import EPSILON, EpsNfa, Nfa, disjoint_union, pair_nonempty
from .fixpoint import (
    QuadSet,
    common_word_quads,
    decide,
    full_inseparable_quads,
    greatest_fixpoint,
    nonempty_pair_quads,
    tau,
    tau_plus,
)
from .oracles import (
    ALL_CLASSES,
    BASES,
    Backend,
    ClassSpec,
    OracleAnswer,
    brute_force_group_search,
    get_backend,
    gr_relation,
    inseparability_matrix,
    lengths_hit_zero_mod,
)
from .parsing import parse_regex
from .validation import pt_separable_at_k

# (first regex, second regex, class, expected separable)
CURATED = [
    *[("a", "a", c.ident, False) for c in ALL_CLASSES],
    ("(aa)*", "a(aa)*", "bpol-mod", True),
    ("(aa)*", "a(aa)*", "bpol-mod+", True),
    ("(aa)*", "a(aa)*", "bpol-gr", True),
    ("(aa)*", "a(aa)*", "bpol-gr+", True),
    ("(aa)*", "a(aa)*", "bpol-st", False),
    ("(ab)*", "(a|b)*aa(a|b)*", "bpol-st", False),
    ("(ab)*", "(a|b)*aa(a|b)*", "bpol-st+", True),
    ("ab", "ab(ab)+", "bpol-st", True),
]


@dataclass
class SuiteResult:
    name: str
    checks: int = 0
    violations: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    wall_ms: float = 0.0

    def check(self, ok: bool, message: str) -> None:
        self.checks += 1
        if not ok:
            self.violations.append(message)


def regex_instance(r1: str, r2: str, alphabet: str = "ab"):
    """Disjoint union of two regex automata with the four designated state sets."""
    l1 = parse_regex(r1, alphabet)
    l2 = parse_regex(r2, alphabet)
    union, off = disjoint_union(l1.nfa, l2.nfa)
    shift = lambda states: frozenset(q + off for q in states)  # noqa: E731
    return union, l1.initial, l1.final, shift(l2.initial), shift(l2.final)


def random_nfa(rng: random.Random, n: int, alphabet=("a", "b"), density: Optional[float] = None) -> Nfa:
    p = rng.choice((0.2, 0.35, 0.5)) if density is None else density
    trans = {(s, a, d) for s in range(n) for a in alphabet for d in range(n) if rng.random() < p}
    return Nfa(n, tuple(alphabet), frozenset(trans))


def random_eps_nfa(rng: random.Random, n: int, alphabet=("a", "b"), max_eps: int = 2) -> EpsNfa:
    base = random_nfa(rng, n, alphabet)
    eps = {(rng.randrange(n), EPSILON, rng.randrange(n)) for _ in range(rng.randint(0, max_eps))}
    return EpsNfa(n, base.alphabet, base.transitions | eps)


def random_quadset(rng: random.Random, n: int, p: float) -> QuadSet:
    bits = np.array([rng.random() < p for _ in range(n ** 4)], dtype=bool).reshape((n,) * 4)
    return QuadSet(n, bits)


class _FaultyBackend(Backend):
    """Claims separability for every query with distinct endpoints."""

    name = "fault"

    def answer(self, b, src, dst):
        return OracleAnswer(src == dst)

    def matrix(self, b, sources, targets):
        return np.asarray(sources)[:, None] == np.asarray(targets)[None, :]


def _backend(spec: ClassSpec, fault: bool) -> Backend:
    return _FaultyBackend() if fault else get_backend(spec.base)


def suite_curated(rng, threads, fault) -> SuiteResult:
    res = SuiteResult("curated")
    cache = {}
    for r1, r2, ident, expected in CURATED:
        spec = ClassSpec.parse(ident)
        key = (r1, r2)
        if key not in cache:
            cache[key] = regex_instance(r1, r2)
        inst = cache[key]
        verdict = decide(*inst, spec, _backend(spec, fault), threads)
        res.check(verdict.separable == expected, f"{r1} vs {r2} under {ident}: expected separable={expected}")
    # piecewise-testable references backing the bpol-st rows
    inst = cache[("(aa)*", "a(aa)*")]
    for k in (1, 2, 3):
        res.check(not pt_separable_at_k(*inst, k), f"(aa)* vs a(aa)* unexpectedly {k}-PT separable")
    inst = cache[("ab", "ab(ab)+")]
    res.check(pt_separable_at_k(*inst, 3), "ab vs ab(ab)+ not 3-PT separable")
    return res


def suite_fixpoint(rng, threads, fault, count: int) -> SuiteResult:
    res = SuiteResult("fixpoint-invariants")
    for i in range(count):
        a = random_nfa(rng, rng.randint(1, 3))
        full = {}
        for spec in ALL_CLASSES:
            backend = _backend(spec, fault)
            controlled, trace = greatest_fixpoint(a, spec, backend, threads)
            step = tau_plus if spec.plus else tau
            res.check(step(a, controlled, backend, threads) == controlled, f"#{i} {spec}: not a fixpoint")
            res.check(len(trace.iterations) <= a.state_count ** 4 + 1, f"#{i} {spec}: too many rounds")
            _, f, _ = full_inseparable_quads(a, spec, backend, threads)
            full[spec.ident] = f
            res.check(controlled.is_symmetric() and f.is_symmetric(), f"#{i} {spec}: asymmetric")
            res.check(common_word_quads(a) <= f, f"#{i} {spec}: misses a common-word quadruple")
            res.check(f <= nonempty_pair_quads(a), f"#{i} {spec}: contains an empty-side quadruple")
        for base in BASES:
            res.check(full[f"bpol-{base}+"] <= full[f"bpol-{base}"], f"#{i} {base}: plus not contained")
        for sfx in ("", "+"):
            chain = lambda x, y: full[f"bpol-{x}{sfx}"] <= full[f"bpol-{y}{sfx}"]  # noqa: E731
            res.check(chain("gr", "mod") and chain("mod", "st"), f"#{i}: GR/MOD/ST chain broken")
            res.check(chain("gr", "amt") and chain("amt", "st"), f"#{i}: GR/AMT/ST chain broken")
    return res


def suite_oracles(rng, threads, fault, count: int) -> SuiteResult:
    res = SuiteResult("oracle-crosscheck")
    mod, amt = get_backend("mod"), get_backend("amt")
    for i in range(count):
        b = random_eps_nfa(rng, rng.randint(1, 4))
        n = b.state_count
        nodes = np.arange(n)
        got = inseparability_matrix(mod, b, nodes, nodes)
        for s, d in itertools.product(range(n), repeat=2):
            sweep = all(lengths_hit_zero_mod(b, s, d, m) for m in range(1, 65))
            res.check(bool(got[s, d]) == sweep, f"#{i} MOD disagrees with sweep at ({s},{d})")
        amt_got = None
        if n <= 3:
            amt_got = inseparability_matrix(amt, b, nodes, nodes)
            for s, d in itertools.product(range(n), repeat=2):
                res.check(bool(amt_got[s, d]) == _amt_sweep(b, s, d, 12), f"#{i} AMT disagrees with sweep at ({s},{d})")
        rel = gr_relation(b)
        s, d = rng.randrange(n), rng.randrange(n)
        found = brute_force_group_search(b, s, d) if pair_nonempty(b, s, d) else None
        if rel[s, d]:
            res.check(found is None, f"#{i} GR inseparable but {found and found[0].name} separates ({s},{d})")
        elif found is None and pair_nonempty(b, s, d):
            res.warnings.append(f"#{i} GR separable at ({s},{d}) but no catalog group found")
        res.check(not rel[s, d] or bool(got[s, d]), f"#{i} GR inseparable but MOD separable at ({s},{d})")
        if amt_got is not None:
            res.check(not rel[s, d] or bool(amt_got[s, d]), f"#{i} GR inseparable but AMT separable at ({s},{d})")
    return res


def _amt_sweep(b: Nfa, src: int, dst: int, bound: int) -> bool:
    """Whether every modulus vector with entries <= bound admits a Parikh-zero word."""
    k = len(b.alphabet)
    index = {sym: i for i, sym in enumerate(b.alphabet)}
    for moduli in itertools.product(range(1, bound + 1), repeat=k):
        start = (src, (0,) * k)
        seen = {start}
        stack = [start]
        hit = False
        while stack and not hit:
            q, v = stack.pop()
            if q == dst and not any(v):
                hit = True
                break
            for sym, rows in b.successors.items():
                if sym == EPSILON:
                    w = v
                else:
                    j = index[sym]
                    w = tuple((x + (i == j)) % moduli[i] for i, x in enumerate(v))
                for t in rows[q]:
                    if (t, w) not in seen:
                        seen.add((t, w))
                        stack.append((t, w))
        if not hit:
            return False
    return True


def suite_monotonicity(rng, threads, fault, count: int) -> SuiteResult:
    res = SuiteResult("tau-monotonicity")
    for i in range(count):
        a = random_nfa(rng, rng.randint(1, 3))
        n = a.state_count
        small = random_quadset(rng, n, rng.random())
        large = small | random_quadset(rng, n, rng.random())
        spec = ALL_CLASSES[i % len(ALL_CLASSES)]
        backend = _backend(spec, fault)
        step = tau_plus if spec.plus else tau
        res.check(step(a, small, backend, threads) <= step(a, large, backend, threads), f"#{i} {spec}: not monotone")
        res.check(tau_plus(a, small, backend, threads) <= tau(a, small, backend, threads), f"#{i} {spec}: tau+ exceeds tau")
    return res


def suite_validation(rng, threads, fault, count: int) -> SuiteResult:
    res = SuiteResult("pt-reference")
    spec = ClassSpec("st")
    for i in range(count):
        a = random_nfa(rng, rng.randint(1, 3))
        n = a.state_count
        i1, f1, i2, f2 = ({rng.randrange(n)} for _ in range(4))
        if pt_separable_at_k(a, i1, f1, i2, f2, 3):
            verdict = decide(a, i1, f1, i2, f2, spec, _backend(spec, fault), threads)
            res.check(verdict.separable, f"#{i}: 3-PT separable but engine says inseparable")
    return res


SUITES: list[tuple[str, Callable]] = [
    ("curated", lambda rng, th, f: suite_curated(rng, th, f)),
    ("fixpoint-invariants", lambda rng, th, f: suite_fixpoint(rng, th, f, 40)),
    ("oracle-crosscheck", lambda rng, th, f: suite_oracles(rng, th, f, 60)),
    ("tau-monotonicity", lambda rng, th, f: suite_monotonicity(rng, th, f, 200)),
    ("pt-reference", lambda rng, th, f: suite_validation(rng, th, f, 100)),
]


def run_selftest(threads: int = 1, inject_fault: bool = False, seed: int = 7) -> dict:
    suites = []
    for name, fn in SUITES:
        rng = random.Random(f"{seed}:{name}")
        start = time.perf_counter()
        res = fn(rng, threads, inject_fault)
        res.wall_ms = round((time.perf_counter() - start) * 1000.0, 3)
        suites.append(res)
    return {
        "passed": all(not s.violations for s in suites),
        "seed": seed,
        "suites": [asdict(s) for s in suites],
    }


def format_report(report: dict) -> str:
    lines = []
    for s in report["suites"]:
        status = "ok" if not s["violations"] else "FAIL"
        lines.append(f"{s['name']:<22} {status:<4} checks={s['checks']} violations={len(s['violations'])} wall_ms={s['wall_ms']}")
        lines.extend(f"    {v}" for v in s["violations"][:20])
        lines.extend(f"    warning: {w}" for w in s["warnings"][:20])
    lines.append("selftest: " + ("PASS" if report["passed"] else "FAIL"))
    return "\n".join(lines)
